#include <algorithm>
#include <cmath>

#include "ratpcp/bench.hpp"
#include "ratpcp/random.hpp"

namespace ratpcp {

namespace {

double grid_error(const ChebyshevSign& p, double gap) {
  const int points = 4000;
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    double x = gap + (1.0 - gap) * i / (points - 1);
    worst = std::max(worst, std::abs(p(x) - 1.0));
  }
  return worst;
}

// Sharpness a with erfc(a·gap) = eps/2.
double sharpness_for(double gap, double eps) {
  double lo = 0.0, hi = 1.0;
  while (std::erfc(hi * gap) > 0.5 * eps) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (std::erfc(mid * gap) > 0.5 * eps ? lo : hi) = mid;
  }
  return hi;
}

int odd_up(int k) { return k % 2 == 0 ? k + 1 : k; }

void check_accuracy_args(double gap, double eps) {
  require(gap > 0.0 && gap < 1.0, "sign baseline: gap must lie in (0,1)");
  require(eps > 0.0 && eps < 1.0, "sign baseline: eps must lie in (0,1)");
}

Vector apply_sign_polynomial(const ChebyshevSign& p, const RowMatrix& a, double lambda, double gamma, double eps,
                             const Vector& v, const BaselineOptions& options) {
  require(v.size() == a.cols(), "sign baseline: dimension mismatch");
  require(lambda > 0.0 && lambda < 1.0, "sign baseline: lambda must lie in (0,1) after normalization");
  require(gamma > 0.0 && gamma < 1.0, "sign baseline: gamma must lie in (0,1)");
  if (p.degree > baseline_degree_cap(gamma, eps)) {
    throw CapabilityError("sign baseline: degree " + std::to_string(p.degree) + " exceeds the cap " +
                          std::to_string(baseline_degree_cap(gamma, eps)));
  }
  CostCounter* cost = options.cost;
  const double solve_eps = eps / (4.0 * p.degree);
  auto apply_x = [&](const Vector& x, int j) {
    Vector s = gram_apply(a, x, cost) - lambda * x;
    charge(cost, 1);
    SolveOptions so;
    so.seed = child_seed(options.seed, static_cast<std::uint64_t>(j));
    so.cost = cost;
    return ridge_reg(a, lambda, s, solve_eps, 0.01 / p.degree, so);
  };
  auto checkpoint = [&](const Vector& partial, int j) {
    if (options.trace && cost) {
      Vector out = 0.5 * (v + partial);
      options.trace->record(*cost, options.error_probe ? options.error_probe(out) : 0.0, j);
    }
  };

  checkpoint(Vector::Zero(v.size()), 0);
  Vector prev = v;
  Vector cur = apply_x(v, 1);
  Vector sum = p.coeffs[1] * cur;
  for (int j = 2; j <= p.degree; ++j) {
    Vector next = 2.0 * apply_x(cur, j) - prev;
    charge(cost, 1);
    prev = std::move(cur);
    cur = std::move(next);
    if (j % 2 == 1) {
      sum += p.coeffs[j] * cur;
      charge(cost, 1);
    }
    if (j % options.checkpoint_every == 0) checkpoint(sum, j);
  }
  Vector out = 0.5 * (v + sum);
  charge(cost, 1);
  checkpoint(sum, p.degree);
  return out;
}

}  // namespace

double transformed_gap(double gamma) {
  require(gamma > 0.0 && gamma < 1.0, "transformed_gap: gamma must lie in (0,1)");
  return gamma / (2.0 + gamma);
}

int baseline_degree_cap(double gamma, double eps) {
  return static_cast<int>(std::ceil(10.0 / gamma * std::max(1.0, std::log10(10.0 / eps))));
}

ChebyshevSign chebyshev_sign_for_accuracy(double gap, double eps) {
  check_accuracy_args(gap, eps);
  const double a = sharpness_for(gap, eps);
  auto ok = [&](int k) { return grid_error(chebyshev_erf_sign(a, k), gap) <= eps; };
  int hi = 3;
  while (!ok(hi)) {
    hi = odd_up(2 * hi);
    if (hi > 20000) throw CapabilityError("chebyshev sign: no degree below 20000 reaches eps");
  }
  int lo = 1;  // lo fails or is trivial; hi succeeds
  while (hi - lo > 2) {
    int mid = odd_up((lo + hi) / 2);
    if (mid >= hi) mid = hi - 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return chebyshev_erf_sign(a, hi);
}

ChebyshevSign chebyshev_sign_a_priori(double gap, double eps) {
  check_accuracy_args(gap, eps);
  const double a = sharpness_for(gap, eps);
  int degree = 2 * static_cast<int>(std::ceil(a * std::sqrt(std::log(2.0 / eps)))) + 1;
  return chebyshev_erf_sign(a, degree);
}

Vector chebyshev_sign_baseline(const RowMatrix& a, double lambda, double gamma, double eps, const Vector& v,
                               const BaselineOptions& options, BaselineReport* report) {
  ChebyshevSign p = chebyshev_sign_for_accuracy(transformed_gap(gamma), eps);
  if (report) *report = {p.degree, p.sharpness};
  return apply_sign_polynomial(p, a, lambda, gamma, eps, v, options);
}

Vector polynomial_sign_baseline(const RowMatrix& a, double lambda, double gamma, double eps, const Vector& v,
                                const BaselineOptions& options, BaselineReport* report) {
  ChebyshevSign p = chebyshev_sign_a_priori(transformed_gap(gamma), eps);
  if (report) *report = {p.degree, p.sharpness};
  return apply_sign_polynomial(p, a, lambda, gamma, eps, v, options);
}

}  // namespace ratpcp
