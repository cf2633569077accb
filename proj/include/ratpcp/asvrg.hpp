#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>

#include "ratpcp/core.hpp"

namespace ratpcp {

enum class StepConvention {
  proof,           // η = μ/(4S²), T = ⌈8S²/μ²⌉
  algorithm_text,  // η = μ/(4S²), T = ⌈S²/μ²⌉
};

struct SvrgSchedule {
  double eta = 0.0;
  std::int64_t epoch_length = 0;
  double variance_bound = 0.0;     // S²
  double strong_convexity = 0.0;   // μ of the symmetric part
};

struct SvrgOptions {
  std::uint64_t seed = 0;
  StepConvention convention = StepConvention::proof;
  std::optional<double> eta;
  std::optional<std::int64_t> epoch_length;
  std::optional<int> max_epochs;
  std::int64_t max_vec_products = 0;      // 0: unlimited
  std::int64_t checkpoint_interval = 0;   // 0: max(n, 1000) inner steps
  // Also test the residual of the running average inside an epoch, at most
  // 16 times per epoch, and stop once it certifies.
  bool certify_within_epoch = true;
  CostCounter* cost = nullptr;
  ConvergenceTrace* trace = nullptr;
  // Diagnostic error of an iterate for traces; never charged to the counter.
  std::function<double(const Vector&)> error_probe;
};

struct SvrgResult {
  Vector z;
  int epochs = 0;
  std::int64_t steps = 0;
  bool certified = false;         // ‖Mz − v̂‖/μ ≤ eps_abs was observed
  bool budget_exhausted = false;
  bool no_progress = false;
  double residual = 0.0;          // ‖Mz − v̂‖ at z (last computed)
};

SvrgSchedule make_schedule(double variance_bound, double strong_convexity, const SvrgOptions& options);
int epoch_budget(double initial_residual, double strong_convexity, double eps_abs, double delta);

// Implicit 2d×2d block operator
//   M = [ I, −(AᵀA − cI)/μ ; (AᵀA − cI)/μ, I ] + τI
// split into components M_i built from row i with weight p_i = ‖a_i‖²/‖A‖_F².
class AsymmetricSystem {
 public:
  AsymmetricSystem(const RowMatrix& a, double c, double mu, Vector rhs, double tau = 0.0);
  // rhs (0, v/μ²): the y-block of the solution is ((AᵀA − cI)² + μ²I)⁻¹v.
  static AsymmetricSystem for_squared(const RowMatrix& a, double c, double mu, const Vector& v);

  AsymmetricSystem shifted(double tau, Vector rhs) const;

  const RowMatrix& matrix() const { return *a_; }
  Index dim() const { return 2 * a_->cols(); }
  Index num_components() const { return a_->rows(); }
  double c() const { return c_; }
  double mu() const { return mu_; }
  double tau() const { return tau_; }
  const Vector& rhs() const { return rhs_; }
  const SamplingDist& sampling() const { return *dist_; }
  double top_eig() const { return top_eig_; }

  Vector apply(const Vector& z, CostCounter* cost = nullptr) const;
  Vector apply_component(Index i, const Vector& z, CostCounter* cost = nullptr) const;

  double strong_convexity() const { return 1.0 + tau_; }
  // S² ≥ Σ (1/p_i)‖M_i Δ‖²/‖Δ‖², from ‖A‖_F²λ₁/μ² plus the shift.
  double variance_bound() const;
  double norm_bound() const;

  Index draw(Rng& rng) const { return dist_->draw(rng); }

  // Δ ← Δ − η((1/p_i) M_i Δ + g0) for the component i; returns units charged.
  std::int64_t step(Index i, double* delta, double eta, const double* g0) const {
    const RowMatrix& a = *a_;
    const Index d = a.cols();
    double* dx = delta;
    double* dy = delta + d;
    double sx = a.row_dot(i, dx);
    double sy = a.row_dot(i, dy);
    double w = a.frob_sq() / (a.row_norm_sq(i) * mu_);
    double alpha = 1.0 - eta * (1.0 + tau_);
    double beta = eta * c_ / mu_;
    for (Index j = 0; j < d; ++j) {
      double ox = dx[j], oy = dy[j];
      dx[j] = alpha * ox - beta * oy - eta * g0[j];
      dy[j] = alpha * oy + beta * ox - eta * g0[d + j];
    }
    a.row_axpy(i, eta * w * sy, dx);
    a.row_axpy(i, -eta * w * sx, dy);
    return 6;
  }

 private:
  const RowMatrix* a_;
  double c_;
  double mu_;
  double tau_;
  Vector rhs_;
  double top_eig_;
  std::shared_ptr<const SamplingDist> dist_;
};

// One SVRG epoch from anchor z0 with g0 = Mz0 − v̂; returns the average of
// the T iterates after each step. The checkpoint callback sees the running
// average and may end the epoch early.
template <class Op>
Vector svrg_epoch(const Op& op, const Vector& z0, const Vector& g0, double eta, std::int64_t length, Rng& rng,
                  CostCounter* cost, std::int64_t* steps_done = nullptr,
                  const std::function<bool(std::int64_t, const Vector&)>& on_checkpoint = {},
                  std::int64_t checkpoint_interval = 0) {
  Vector delta = Vector::Zero(z0.size());
  Vector sum = Vector::Zero(z0.size());
  std::int64_t units = 0;
  std::int64_t t = 0;
  for (; t < length; ++t) {
    auto idx = op.draw(rng);
    units += op.step(idx, delta.data(), eta, g0.data());
    sum += delta;
    if (on_checkpoint && checkpoint_interval > 0 && (t + 1) % checkpoint_interval == 0) {
      if (cost) cost->charge(units);
      units = 0;
      if (!on_checkpoint(t + 1, z0 + sum / static_cast<double>(t + 1))) {
        ++t;
        break;
      }
    }
  }
  if (cost) cost->charge(units);
  if (steps_done) *steps_done = t;
  return z0 + sum / static_cast<double>(std::max<std::int64_t>(t, 1));
}

template <class Op>
SvrgResult svrg_solve(const Op& op, const Vector& rhs, const Vector& z0, double eps_abs, double delta,
                      const SvrgOptions& options) {
  require(z0.size() == op.dim() && rhs.size() == op.dim(), "svrg_solve: dimension mismatch");
  require(eps_abs > 0.0, "svrg_solve: eps_abs must be positive");
  require(delta > 0.0 && delta < 1.0, "svrg_solve: delta must lie in (0,1)");
  const double mu = op.strong_convexity();
  SvrgSchedule sched = make_schedule(op.variance_bound(), mu, options);
  Rng rng = make_stream(options.seed, 0x73767267ULL);
  CostCounter* cost = options.cost;
  ConvergenceTrace* trace = options.trace;
  const double rhs_norm = std::max(rhs.norm(), 1e-300);

  SvrgResult out;
  out.z = z0;
  Vector g = op.apply(out.z, cost) - rhs;
  out.residual = g.norm();
  const double initial = out.residual;
  int q_max = options.max_epochs ? *options.max_epochs : epoch_budget(initial, mu, eps_abs, delta);
  std::int64_t interval = options.checkpoint_interval > 0
                              ? options.checkpoint_interval
                              : std::max<std::int64_t>(op.num_components(), 1000);
  auto over_budget = [&] {
    return options.max_vec_products > 0 && cost && cost->vec_products >= options.max_vec_products;
  };
  auto record = [&](const Vector& z, double fallback) {
    if (!trace || !cost) return;
    trace->record(*cost, options.error_probe ? options.error_probe(z) : fallback, out.epochs);
  };
  record(out.z, out.residual / rhs_norm);

  for (;;) {
    if (out.residual / mu <= eps_abs) {
      out.certified = true;
      break;
    }
    if (out.epochs >= q_max) break;
    if (over_budget()) {
      out.budget_exhausted = true;
      break;
    }
    std::function<bool(std::int64_t, const Vector&)> hook;
    const bool tracing = trace && options.error_probe && cost;
    const std::int64_t cert_every = std::max(interval, sched.epoch_length / 16);
    std::int64_t last_cert = 0;
    bool certified_inside = false;
    Vector certified_z;
    double certified_residual = 0.0;
    if (options.max_vec_products > 0 || tracing || options.certify_within_epoch) {
      hook = [&](std::int64_t t, const Vector& zt) {
        if (tracing) trace->record(*cost, options.error_probe(zt), out.epochs);
        if (options.certify_within_epoch && t - last_cert >= cert_every && t < sched.epoch_length) {
          last_cert = t;
          double r = (op.apply(zt, cost) - rhs).norm();
          if (r / mu <= eps_abs) {
            certified_inside = true;
            certified_z = zt;
            certified_residual = r;
            return false;
          }
        }
        return !over_budget();
      };
    }
    std::int64_t steps = 0;
    Vector next = svrg_epoch(op, out.z, g, sched.eta, sched.epoch_length, rng, cost, &steps, hook, interval);
    out.steps += steps;
    if (!next.allFinite()) throw DivergenceError("svrg: non-finite iterate; step size too large");
    ++out.epochs;
    if (certified_inside) {
      out.z = certified_z;
      out.residual = certified_residual;
      g.resize(0);
      out.certified = true;
      record(out.z, out.residual / rhs_norm);
      break;
    }
    if (steps < sched.epoch_length) {
      // Budget hit mid-epoch: keep the partial average.
      out.z = next;
      g = op.apply(out.z, cost) - rhs;
      out.residual = g.norm();
      out.budget_exhausted = true;
      record(out.z, out.residual / rhs_norm);
      break;
    }
    out.z = next;
    g = op.apply(out.z, cost) - rhs;
    out.residual = g.norm();
    record(out.z, out.residual / rhs_norm);
  }
  if (!out.certified && out.residual >= initial && out.epochs > 0) {
    out.no_progress = true;
    if (trace) trace->warnings.push_back("svrg: epoch budget exhausted without residual reduction");
  }
  return out;
}

// Alg 1 on the particular system.
SvrgResult asysvrg_solve(const AsymmetricSystem& sys, const Vector& z0, double eps_abs, double delta,
                         const SvrgOptions& options = {});

struct AccelOptions {
  std::optional<double> tau;
  double outer_constant = 4.0;
  // Per outer step: ‖z^{(i+1)} − z*‖ after each proximal step, for diagnostics.
  std::function<void(int, const Vector&)> on_outer_step;
};

// τ = max(0, S·√(d/nnz(A)) − 1) with S = ‖A‖_F·√λ₁/μ.
double acceleration_tau(const AsymmetricSystem& sys);

// Alg 2: proximal outer loop, each step an AsySVRG solve of (τI + M).
SvrgResult asyacc_solve(const AsymmetricSystem& sys, const Vector& z0, double eps_abs, double delta,
                        const SvrgOptions& options = {}, const AccelOptions& accel = {});

}  // namespace ratpcp
