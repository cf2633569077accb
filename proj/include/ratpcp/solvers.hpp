#pragma once

#include <functional>

#include "ratpcp/asvrg.hpp"
#include "ratpcp/core.hpp"

namespace ratpcp {

struct SolveOptions {
  std::uint64_t seed = 0;
  bool accelerated = false;
  StepConvention convention = StepConvention::proof;
  std::int64_t max_vec_products = 0;  // 0: unlimited
  CostCounter* cost = nullptr;
  ConvergenceTrace* trace = nullptr;
  // Diagnostic error of the d-dimensional answer; used only for traces.
  std::function<double(const Vector&)> error_probe;
};

struct SolveReport {
  int epochs = 0;
  int outer_steps = 0;
  std::int64_t steps = 0;
  bool certified = false;
  bool budget_exhausted = false;
  double residual = 0.0;
};

// ((AᵀA − cI)² + μ²I)⁻¹v via the asymmetric block system.
Vector ridge_square(const RowMatrix& a, double c, double mu_sq, const Vector& v, double eps, double delta,
                    const SolveOptions& options = {}, SolveReport* report = nullptr);

// (AᵀA − cI)⁻¹v by Richardson iteration preconditioned with ridge_square,
// assuming (AᵀA − cI)² ⪰ mu_lower² I.
Vector nonpsd_solve(const RowMatrix& a, double c, const Vector& v, double mu_lower, double eps, double delta,
                    const SolveOptions& options = {}, SolveReport* report = nullptr);

enum class RidgeBackend { svrg, dense };

// (AᵀA + μ_r I)⁻¹s.
Vector ridge_reg(const RowMatrix& a, double mu_r, const Vector& s, double eps, double delta,
                 const SolveOptions& options = {}, SolveReport* report = nullptr,
                 RidgeBackend backend = RidgeBackend::svrg);

// Components a_i a_iᵀ + p_i μ_r I of AᵀA + μ_r I.
class RidgeOperator {
 public:
  RidgeOperator(const RowMatrix& a, double mu_r);
  Index dim() const { return a_->cols(); }
  Index num_components() const { return a_->rows(); }
  Vector apply(const Vector& x, CostCounter* cost = nullptr) const;
  double strong_convexity() const { return mu_r_; }
  double variance_bound() const;
  Index draw(Rng& rng) const { return dist_.draw(rng); }
  std::int64_t step(Index i, double* delta, double eta, const double* g0) const {
    const RowMatrix& a = *a_;
    const Index d = a.cols();
    double s = a.row_dot(i, delta);
    double alpha = 1.0 - eta * mu_r_;
    for (Index j = 0; j < d; ++j) delta[j] = alpha * delta[j] - eta * g0[j];
    a.row_axpy(i, -eta * a.frob_sq() / a.row_norm_sq(i) * s, delta);
    return 3;
  }

 private:
  const RowMatrix* a_;
  double mu_r_;
  double top_eig_;
  SamplingDist dist_;
};

// Two-index components of (AᵀA − cI)² + μ²I sampled with p_ij ∝ ‖a_i‖²‖a_j‖².
class DirectSquaredOperator {
 public:
  struct Pair {
    Index i;
    Index j;
  };
  DirectSquaredOperator(const RowMatrix& a, double c, double mu_sq);
  Index dim() const { return a_->cols(); }
  Index num_components() const { return a_->rows(); }
  Vector apply(const Vector& x, CostCounter* cost = nullptr) const;
  Vector apply_component(Index i, Index j, const Vector& x) const;
  double strong_convexity() const { return mu_sq_; }
  // Bound on Σ (1/p_ij) M_ijᵀ M_ij from its exact form with
  // Σ_j (a_jᵀ G a_j/‖a_j‖²) a_j a_jᵀ ⪯ λ₁ G.
  double variance_bound() const;
  // The exact form Σ (1/p_ij) M_ijᵀ M_ij, densely.
  DenseMatrix variance_form() const;
  Pair draw(Rng& rng) const { return {dist_.draw(rng), dist_.draw(rng)}; }
  std::int64_t step(const Pair& pr, double* delta, double eta, const double* g0) const;

 private:
  const RowMatrix* a_;
  double c_;
  double mu_sq_;
  double top_eig_;
  SamplingDist dist_;
  mutable Vector scratch_;
};

// Heavy-ball iteration on the squared system with step 4/(λ₁+2μ) and
// momentum λ₁/(λ₁+2μ). Stops when the residual certifies eps‖v‖.
Vector agd_squared(const RowMatrix& a, double c, double mu_sq, const Vector& v, double eps,
                   const SolveOptions& options = {}, SolveReport* report = nullptr,
                   std::int64_t max_iterations = 10000000);

// SVRG on the squared system directly; honours options.max_vec_products and
// reports budget exhaustion instead of throwing.
Vector direct_svrg_squared(const RowMatrix& a, double c, double mu_sq, const Vector& v, double eps,
                           double delta, const SolveOptions& options = {}, SolveReport* report = nullptr);

struct SymmetricOperator {
  Index dim = 0;
  std::function<Vector(const Vector&)> apply;
};

struct SqrtOptions {
  Index dense_threshold = 512;
  CostCounter* cost = nullptr;
};

// M^{1/2}v for μI ⪯ M ⪯ λI.
Vector sqrt_apply(const SymmetricOperator& m, double mu, double lambda, const Vector& v, double eps,
                  double delta, const SqrtOptions& options = {});
Vector sqrt_apply(const DenseMatrix& m, double mu, double lambda, const Vector& v, double eps, double delta,
                  const SqrtOptions& options = {});

// Conjugate gradients on (M + shift·I)x = b to ‖residual‖ ≤ tol·‖b‖.
Vector conjugate_gradient(const SymmetricOperator& m, double shift, const Vector& b, double tol,
                          int max_iter, int* iterations = nullptr);

}  // namespace ratpcp
