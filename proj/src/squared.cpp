#include <algorithm>
#include <cmath>
#include <deque>

#include "ratpcp/solvers.hpp"

namespace ratpcp {

namespace {

SvrgOptions svrg_options(const SolveOptions& o, Index d, bool y_block) {
  SvrgOptions s;
  s.seed = o.seed;
  s.convention = o.convention;
  s.max_vec_products = o.max_vec_products;
  s.cost = o.cost;
  s.trace = o.trace;
  if (o.error_probe) {
    auto probe = o.error_probe;
    if (y_block) {
      s.error_probe = [probe, d](const Vector& z) { return probe(z.tail(d)); };
    } else {
      s.error_probe = probe;
    }
  }
  return s;
}

void fill(SolveReport* report, const SvrgResult& r) {
  if (!report) return;
  report->epochs = r.epochs;
  report->steps = r.steps;
  report->certified = r.certified;
  report->budget_exhausted = r.budget_exhausted;
  report->residual = r.residual;
}

// (AᵀA − cI)x
Vector shifted_gram(const RowMatrix& a, double c, const Vector& x, CostCounter* cost) {
  Vector out = gram_apply(a, x, cost) - c * x;
  charge(cost, 1);
  return out;
}

}  // namespace

Vector ridge_square(const RowMatrix& a, double c, double mu_sq, const Vector& v, double eps, double delta,
                    const SolveOptions& options, SolveReport* report) {
  require(v.size() == a.cols(), "ridge_square: dimension mismatch");
  require(mu_sq > 0.0, "ridge_square: mu_sq must be positive");
  require(eps > 0.0, "ridge_square: eps must be positive");
  if (report) *report = {};
  double vn = v.norm();
  if (vn == 0.0) return Vector::Zero(a.cols());
  if (a.frob_sq() == 0.0) return v / (c * c + mu_sq);
  double mu = std::sqrt(mu_sq);
  AsymmetricSystem sys = AsymmetricSystem::for_squared(a, c, mu, v);
  SvrgOptions so = svrg_options(options, a.cols(), true);
  Vector z0 = Vector::Zero(sys.dim());
  SvrgResult r = options.accelerated ? asyacc_solve(sys, z0, eps * vn, delta, so)
                                     : asysvrg_solve(sys, z0, eps * vn, delta, so);
  fill(report, r);
  return r.z.tail(a.cols());
}

Vector nonpsd_solve(const RowMatrix& a, double c, const Vector& v, double mu_lower, double eps, double delta,
                    const SolveOptions& options, SolveReport* report) {
  require(v.size() == a.cols(), "nonpsd_solve: dimension mismatch");
  require(mu_lower > 0.0 && eps > 0.0, "nonpsd_solve: mu_lower and eps must be positive");
  if (report) *report = {};
  const double vn = v.norm();
  if (vn == 0.0) return Vector::Zero(a.cols());
  CostCounter* cost = options.cost;
  const double mu_sq = mu_lower * mu_lower;
  const double eps_inner = eps / 8.0;
  Vector sv = shifted_gram(a, c, v, cost);
  Vector x = Vector::Zero(a.cols());
  Vector r = -sv;
  double rn = r.norm();
  // Contraction is at most 3/4 per step plus the inner tolerance.
  double need = std::max(1.0, std::log(rn / (mu_sq * eps * vn)) / std::log(1.0 / (0.75 + eps_inner)));
  int max_outer = static_cast<int>(std::ceil(need)) + 20;
  std::deque<double> history{rn};
  for (int t = 0; t < max_outer; ++t) {
    if (rn / mu_sq <= eps * vn) {
      if (report) {
        report->certified = true;
        report->outer_steps = t;
        report->residual = rn;
      }
      return x;
    }
    SolveOptions inner = options;
    inner.seed = child_seed(options.seed, static_cast<std::uint64_t>(t));
    inner.trace = nullptr;
    SolveReport rep;
    Vector u = ridge_square(a, c, mu_sq, r, eps_inner, delta / max_outer, inner, &rep);
    if (report) {
      report->epochs += rep.epochs;
      report->steps += rep.steps;
    }
    x -= 0.5 * u;
    r = shifted_gram(a, c, shifted_gram(a, c, x, cost), cost) - sv;
    rn = r.norm();
    if (!std::isfinite(rn)) throw DivergenceError("nonpsd_solve: non-finite residual");
    if (options.trace && cost) {
      options.trace->record(*cost, options.error_probe ? options.error_probe(x) : rn / std::max(sv.norm(), 1e-300),
                            t + 1);
    }
    history.push_back(rn);
    if (history.size() > 4) history.pop_front();
    if (history.size() == 4 && history.back() >= history.front()) {
      throw GapViolation("nonpsd_solve: residual stagnated over 3 outer steps; mu_lower is likely too large "
                         "for the spectrum around c");
    }
  }
  if (rn / mu_sq <= eps * vn) {
    if (report) {
      report->certified = true;
      report->outer_steps = max_outer;
      report->residual = rn;
    }
    return x;
  }
  throw BudgetError("nonpsd_solve: outer iteration cap reached");
}

DirectSquaredOperator::DirectSquaredOperator(const RowMatrix& a, double c, double mu_sq)
    : a_(&a), c_(c), mu_sq_(mu_sq), dist_(SamplingDist::by_row_norms(a)), scratch_(Vector::Zero(a.cols())) {
  require(mu_sq > 0.0, "DirectSquaredOperator: mu_sq must be positive");
  top_eig_ = a.top_eig_estimate();
}

Vector DirectSquaredOperator::apply(const Vector& x, CostCounter* cost) const {
  Vector s = shifted_gram(*a_, c_, x, cost);
  Vector out = shifted_gram(*a_, c_, s, cost) + mu_sq_ * x;
  charge(cost, 1);
  return out;
}

Vector DirectSquaredOperator::apply_component(Index i, Index j, const Vector& x) const {
  const RowMatrix& a = *a_;
  const double f = a.frob_sq();
  Vector aj = Vector::Zero(a.cols());
  a.row_axpy(j, 1.0, aj.data());
  double s1 = a.row_dot(j, x.data());
  double s2 = a.row_dot(i, aj.data());
  double s3 = a.row_dot(i, x.data());
  double kappa = c_ * c_ + mu_sq_;
  Vector out = kappa * a.row_norm_sq(i) * a.row_norm_sq(j) / (f * f) * x;
  a.row_axpy(i, s2 * s1 - 2.0 * c_ * a.row_norm_sq(j) / f * s3, out.data());
  return out;
}

std::int64_t DirectSquaredOperator::step(const Pair& pr, double* delta, double eta, const double* g0) const {
  const RowMatrix& a = *a_;
  const Index d = a.cols();
  const double f = a.frob_sq();
  const double si = a.row_norm_sq(pr.i), sj = a.row_norm_sq(pr.j);
  a.row_axpy(pr.j, 1.0, scratch_.data());
  double s2 = a.row_dot(pr.i, scratch_.data());
  scratch_.setZero();
  double s1 = a.row_dot(pr.j, delta);
  double s3 = a.row_dot(pr.i, delta);
  double coef = f * f / (si * sj) * s2 * s1 - 2.0 * c_ * f / si * s3;
  double alpha = 1.0 - eta * (c_ * c_ + mu_sq_);
  for (Index k = 0; k < d; ++k) delta[k] = alpha * delta[k] - eta * g0[k];
  a.row_axpy(pr.i, -eta * coef, delta);
  return 5;
}

double DirectSquaredOperator::variance_bound() const {
  const double f = a_->frob_sq();
  const double kappa = c_ * c_ + mu_sq_;
  const double lam = top_eig_;
  auto q = [&](double s) {
    return f * f * lam * s + (2.0 * kappa - 4.0 * c_ * f) * s * s + (4.0 * c_ * c_ * f - 4.0 * c_ * kappa) * s +
           kappa * kappa;
  };
  double best = std::max(q(0.0), q(lam));
  double quad = 2.0 * kappa - 4.0 * c_ * f;
  if (quad < 0.0) {
    double vertex = -(f * f * lam + 4.0 * c_ * c_ * f - 4.0 * c_ * kappa) / (2.0 * quad);
    if (vertex > 0.0 && vertex < lam) best = std::max(best, q(vertex));
  }
  return best;
}

DenseMatrix DirectSquaredOperator::variance_form() const {
  const RowMatrix& a = *a_;
  const double f = a.frob_sq();
  const double kappa = c_ * c_ + mu_sq_;
  DenseMatrix am = a.to_dense();
  DenseMatrix g = am.transpose() * am;
  DenseMatrix w = DenseMatrix::Zero(a.cols(), a.cols());
  for (Index j = 0; j < a.rows(); ++j) {
    double sj = a.row_norm_sq(j);
    if (sj == 0.0) continue;
    Vector aj = am.row(j).transpose();
    w += (aj.dot(g * aj) / sj) * aj * aj.transpose();
  }
  DenseMatrix g2 = g * g;
  DenseMatrix id = DenseMatrix::Identity(a.cols(), a.cols());
  return f * f * w + (2.0 * kappa - 4.0 * c_ * f) * g2 + (4.0 * c_ * c_ * f - 4.0 * c_ * kappa) * g +
         kappa * kappa * id;
}

Vector direct_svrg_squared(const RowMatrix& a, double c, double mu_sq, const Vector& v, double eps, double delta,
                           const SolveOptions& options, SolveReport* report) {
  require(v.size() == a.cols(), "direct_svrg_squared: dimension mismatch");
  if (report) *report = {};
  double vn = v.norm();
  if (vn == 0.0) return Vector::Zero(a.cols());
  if (a.frob_sq() == 0.0) return v / (c * c + mu_sq);
  DirectSquaredOperator op(a, c, mu_sq);
  SvrgOptions so = svrg_options(options, a.cols(), false);
  SvrgResult r = svrg_solve(op, v, Vector::Zero(a.cols()), eps * vn, delta, so);
  fill(report, r);
  return r.z;
}

Vector agd_squared(const RowMatrix& a, double c, double mu_sq, const Vector& v, double eps,
                   const SolveOptions& options, SolveReport* report, std::int64_t max_iterations) {
  require(v.size() == a.cols(), "agd_squared: dimension mismatch");
  require(mu_sq > 0.0 && eps > 0.0, "agd_squared: mu_sq and eps must be positive");
  if (report) *report = {};
  const double vn = v.norm();
  if (vn == 0.0) return Vector::Zero(a.cols());
  CostCounter* cost = options.cost;
  const double mu = std::sqrt(mu_sq);
  const double lam = a.frob_sq() == 0.0 ? 0.0 : a.top_eig_estimate();
  const double step = 4.0 / (lam + 2.0 * mu);
  const double momentum = lam / (lam + 2.0 * mu);
  auto op = [&](const Vector& x) -> Vector {
    if (a.frob_sq() == 0.0) return (c * c + mu_sq) * x;
    Vector s = shifted_gram(a, c, x, cost);
    Vector out = shifted_gram(a, c, s, cost) + mu_sq * x;
    charge(cost, 1);
    return out;
  };
  Vector x = Vector::Zero(a.cols()), prev = x;
  // The gradient at x_t is the residual, so the certificate ‖x − x*‖ ≤
  // ‖residual‖/μ² is checked every iteration at no extra cost.
  for (std::int64_t t = 0; t < max_iterations; ++t) {
    Vector g = op(x) - v;
    double gn = g.norm();
    if (!std::isfinite(gn) || gn > 1e8 * vn / mu_sq) throw DivergenceError("agd_squared: iterates diverged");
    if (options.trace && cost && t % 10 == 0) {
      options.trace->record(*cost, options.error_probe ? options.error_probe(x) : gn / vn, static_cast<int>(t));
    }
    if (gn / mu_sq <= eps * vn) {
      if (report) {
        report->certified = true;
        report->outer_steps = static_cast<int>(t);
        report->residual = gn;
      }
      return x;
    }
    if (options.max_vec_products > 0 && cost && cost->vec_products >= options.max_vec_products) {
      if (report) {
        report->budget_exhausted = true;
        report->outer_steps = static_cast<int>(t);
        report->residual = gn;
      }
      return x;
    }
    Vector next = x - step * g + momentum * (x - prev);
    charge(cost, 3);
    prev = std::move(x);
    x = std::move(next);
  }
  throw BudgetError("agd_squared: iteration cap reached");
}

}  // namespace ratpcp
