#include <cmath>

#include "ratpcp/solvers.hpp"

namespace ratpcp {

RidgeOperator::RidgeOperator(const RowMatrix& a, double mu_r)
    : a_(&a), mu_r_(mu_r), dist_(SamplingDist::by_row_norms(a)) {
  require(mu_r > 0.0, "RidgeOperator: mu_r must be positive");
  top_eig_ = a.top_eig_estimate();
}

Vector RidgeOperator::apply(const Vector& x, CostCounter* cost) const {
  Vector out = gram_apply(*a_, x, cost) + mu_r_ * x;
  charge(cost, 1);
  return out;
}

double RidgeOperator::variance_bound() const {
  // Σ (1/p_i)‖(a_i a_iᵀ + p_i μ I)Δ‖² = Δᵀ((‖A‖_F² + 2μ)AᵀA + μ²I)Δ.
  return (a_->frob_sq() + 2.0 * mu_r_) * top_eig_ + mu_r_ * mu_r_;
}

Vector ridge_reg(const RowMatrix& a, double mu_r, const Vector& s, double eps, double delta,
                 const SolveOptions& options, SolveReport* report, RidgeBackend backend) {
  require(s.size() == a.cols(), "ridge_reg: dimension mismatch");
  require(mu_r > 0.0 && eps > 0.0, "ridge_reg: mu_r and eps must be positive");
  if (report) *report = {};
  double sn = s.norm();
  if (sn == 0.0) return Vector::Zero(a.cols());
  if (a.frob_sq() == 0.0) return s / mu_r;
  if (backend == RidgeBackend::dense) {
    DenseMatrix am = a.to_dense();
    DenseMatrix h = am.transpose() * am;
    h.diagonal().array() += mu_r;
    charge(options.cost, a.rows() * a.cols());
    if (report) report->certified = true;
    return h.llt().solve(s);
  }
  RidgeOperator op(a, mu_r);
  SvrgOptions so;
  so.seed = options.seed;
  so.convention = options.convention;
  so.max_vec_products = options.max_vec_products;
  so.cost = options.cost;
  so.trace = options.trace;
  so.error_probe = options.error_probe;
  SvrgResult r = svrg_solve(op, s, Vector::Zero(a.cols()), eps * sn, delta, so);
  if (report) {
    report->epochs = r.epochs;
    report->steps = r.steps;
    report->certified = r.certified;
    report->budget_exhausted = r.budget_exhausted;
    report->residual = r.residual;
  }
  return r.z;
}

}  // namespace ratpcp
