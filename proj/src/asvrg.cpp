#include "ratpcp/asvrg.hpp"

#include <algorithm>
#include <cmath>

namespace ratpcp {

SvrgSchedule make_schedule(double variance_bound, double strong_convexity, const SvrgOptions& options) {
  require(variance_bound > 0.0 && strong_convexity > 0.0, "make_schedule: constants must be positive");
  SvrgSchedule s;
  s.variance_bound = variance_bound;
  s.strong_convexity = strong_convexity;
  double ratio = variance_bound / (strong_convexity * strong_convexity);
  s.eta = options.eta ? *options.eta : strong_convexity / (4.0 * variance_bound);
  double factor = options.convention == StepConvention::proof ? 8.0 : 1.0;
  double length = std::ceil(factor * ratio);
  // Lengths beyond ~1e15 only matter under a vector-product budget.
  s.epoch_length = options.epoch_length ? *options.epoch_length
                                        : static_cast<std::int64_t>(std::min(length, 1e15));
  require(s.eta > 0.0 && s.epoch_length >= 1, "make_schedule: invalid schedule");
  return s;
}

int epoch_budget(double initial_residual, double strong_convexity, double eps_abs, double delta) {
  double dist = initial_residual / strong_convexity;
  if (dist <= eps_abs) return 0;
  double ratio = dist * dist / (eps_abs * eps_abs * delta);
  return std::max(1, static_cast<int>(std::ceil(std::log(ratio) / std::log(1.5))));
}

SvrgResult asysvrg_solve(const AsymmetricSystem& sys, const Vector& z0, double eps_abs, double delta,
                         const SvrgOptions& options) {
  if (sys.matrix().frob_sq() == 0.0) throw DegenerateInput("asysvrg_solve: A is zero, nothing to sample");
  return svrg_solve(sys, sys.rhs(), z0, eps_abs, delta, options);
}

double acceleration_tau(const AsymmetricSystem& sys) {
  const RowMatrix& a = sys.matrix();
  double s = std::sqrt(a.frob_sq() * sys.top_eig()) / sys.mu();
  double per_sample = static_cast<double>(a.cols());
  double full = static_cast<double>(std::max<Index>(a.nnz(), 1));
  return std::max(0.0, s * std::sqrt(per_sample / full) - 1.0);
}

SvrgResult asyacc_solve(const AsymmetricSystem& sys, const Vector& z0, double eps_abs, double delta,
                        const SvrgOptions& options, const AccelOptions& accel) {
  require(sys.tau() == 0.0, "asyacc_solve: base system must be unshifted");
  if (sys.matrix().frob_sq() == 0.0) throw DegenerateInput("asyacc_solve: A is zero, nothing to sample");
  double tau = accel.tau ? *accel.tau : acceleration_tau(sys);
  if (tau <= 0.0) return asysvrg_solve(sys, z0, eps_abs, delta, options);

  CostCounter* cost = options.cost;
  SvrgResult out;
  out.z = z0;
  out.residual = (sys.apply(out.z, cost) - sys.rhs()).norm();
  const double initial = out.residual;
  const double rhs_norm = std::max(sys.rhs().norm(), 1e-300);
  int outer = 1;
  if (initial > eps_abs) {
    outer = std::max(1, static_cast<int>(std::ceil(accel.outer_constant * (tau + 1.0) *
                                                   std::log(initial / eps_abs))));
  }
  const double rel = 0.5 / (1.0 + 2.0 * tau);
  const double inner_delta = delta / (outer + 1);
  const double shifted_norm = tau + sys.norm_bound();
  if (options.trace && cost) options.trace->record(*cost, options.error_probe ? options.error_probe(out.z)
                                                                               : initial / rhs_norm, 0);
  for (int i = 0; i < outer; ++i) {
    if (out.residual <= eps_abs) {
      out.certified = true;
      break;
    }
    if (options.max_vec_products > 0 && cost && cost->vec_products >= options.max_vec_products) {
      out.budget_exhausted = true;
      break;
    }
    // The τ-shifted residual at z^{(i)} equals Mz^{(i)} − v̂, so r/‖τI+M‖
    // lower-bounds the distance to the proximal point.
    AsymmetricSystem inner = sys.shifted(tau, tau * out.z + sys.rhs());
    SvrgOptions inner_opts = options;
    inner_opts.seed = child_seed(options.seed, static_cast<std::uint64_t>(i) + 1);
    inner_opts.trace = nullptr;
    inner_opts.max_epochs.reset();
    double target = rel * out.residual / shifted_norm;
    SvrgResult step = svrg_solve(inner, inner.rhs(), out.z, target, inner_delta, inner_opts);
    out.z = step.z;
    out.steps += step.steps;
    out.epochs += step.epochs;
    out.residual = (sys.apply(out.z, cost) - sys.rhs()).norm();
    if (accel.on_outer_step) accel.on_outer_step(i, out.z);
    if (options.trace && cost) {
      options.trace->record(*cost, options.error_probe ? options.error_probe(out.z) : out.residual / rhs_norm,
                            i + 1);
    }
    if (step.budget_exhausted) {
      out.budget_exhausted = true;
      break;
    }
  }
  if (out.residual <= eps_abs) out.certified = true;
  if (!out.certified && out.residual >= initial) {
    out.no_progress = true;
    if (options.trace) options.trace->warnings.push_back("asyacc: no residual reduction");
  }
  return out;
}

}  // namespace ratpcp
