#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ratpcp/errors.hpp"
#include "ratpcp/rational.hpp"

namespace ratpcp {

namespace {

// x · ∏ (x² + c_2i)/(x² + c_2i−1) for sign, x · ∏ (x + c_2i)/(x + c_2i−1) for sqrt.
long double unscaled(const ZolotarevRational& r, long double x) {
  long double arg = r.kind == RationalKind::sign ? x * x : x;
  long double p = 1.0L;
  for (int i = 0; i < r.degree; ++i) {
    p *= (arg + r.coeffs[2 * i + 1]) / (arg + r.coeffs[2 * i]);
  }
  return x * p;
}

// c_i = g² tan²(am(i K′/(2k+1))) at complementary modulus g, i = 1..2k.
std::vector<double> elliptic_coeffs(double g, int k) {
  double kprime = complete_elliptic_K_comp(g);
  std::vector<double> c(static_cast<std::size_t>(2 * k));
  for (int i = 1; i <= 2 * k; ++i) {
    SnCn v = jacobi_sn_cn_comp(i * kprime / (2 * k + 1), g);
    double t = v.sn / v.cn;
    c[i - 1] = g * g * t * t;
  }
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (!(c[i] >= c[i - 1])) throw Error("Zolotarev coefficients are not nondecreasing");
  }
  return c;
}

// Max of |r(x)/target(x) − 1| on log-spaced points of [lo,1]; guards the
// equioscillation estimate once rounding in the coefficients dominates.
double sampled_error(const ZolotarevRational& r, double lo) {
  const int points = 2001;
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    double x = i + 1 == points ? 1.0 : lo * std::pow(1.0 / lo, static_cast<double>(i) / (points - 1));
    double target = r.kind == RationalKind::sign ? 1.0 : std::sqrt(x);
    worst = std::max(worst, std::abs(r(x) / target - 1.0));
  }
  return worst;
}

void check_degree(int k) {
  if (k < 1 || k > kMaxRationalDegree) {
    throw CapabilityError("rational degree " + std::to_string(k) + " outside [1, " +
                          std::to_string(kMaxRationalDegree) + "]");
  }
}

}  // namespace

double zolotarev_rho(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("zolotarev_rho: gamma must lie in (0,1)");
  double s = std::sqrt(gamma);
  double mu = (1.0 - s) / (1.0 + s);
  // μ′ = √(1−μ²) = 2·γ^{1/4}/(1+√γ), computed without cancellation.
  double mu_comp = 2.0 * std::sqrt(s) / (1.0 + s);
  double k_mu = complete_elliptic_K_comp(mu_comp);
  double k_mu_comp = complete_elliptic_K_comp(mu);
  return std::exp(std::numbers::pi * k_mu_comp / (4.0 * k_mu));
}

double zolotarev_predicted_error(double rho, int k) {
  double q = std::pow(rho, -(2.0 * k + 1.0));
  return 2.0 * q / (1.0 - q);
}

double ZolotarevRational::operator()(double x) const { return eval_rational_scalar(*this, x); }

double eval_rational_scalar(const ZolotarevRational& r, double x) {
  return static_cast<double>(r.scale * unscaled(r, x));
}

ZolotarevRational sign_rational_of_degree(double gamma, int k) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("sign rational: gamma must lie in (0,1)");
  check_degree(k);
  ZolotarevRational r;
  r.kind = RationalKind::sign;
  r.degree = k;
  r.gap = gamma;
  r.coeffs = elliptic_coeffs(gamma, k);
  long double lo = unscaled(r, gamma);
  long double hi = unscaled(r, 1.0L);
  r.scale = static_cast<double>(2.0L / (lo + hi));
  r.attained_error = std::max(static_cast<double>((hi - lo) / (hi + lo)), sampled_error(r, gamma));
  r.rho = zolotarev_rho(gamma);
  r.predicted_error = zolotarev_predicted_error(r.rho, k);
  return r;
}

ZolotarevRational sqrt_rational_of_degree(double mu, int k) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("sqrt rational: mu must lie in (0,1)");
  check_degree(k);
  ZolotarevRational r;
  r.kind = RationalKind::sqrt;
  r.degree = k;
  r.gap = mu;
  double root = std::sqrt(mu);
  r.coeffs = elliptic_coeffs(root, k);
  // Equioscillation of x ↦ r(x)/√x at μ and 1.
  long double lo = unscaled(r, mu) / root;
  long double hi = unscaled(r, 1.0L);
  r.scale = static_cast<double>(2.0L / (lo + hi));
  r.attained_error = std::max(static_cast<double>((hi - lo) / (hi + lo)), sampled_error(r, mu));
  r.rho = zolotarev_rho(root);
  r.predicted_error = zolotarev_predicted_error(r.rho, k);
  return r;
}

ZolotarevRational build_sign_rational(double gamma, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("build_sign_rational: eps must lie in (0,1)");
  ZolotarevRational r;
  double prev = 2.0;
  for (int k = 1; k <= kMaxRationalDegree; ++k) {
    r = sign_rational_of_degree(gamma, k);
    if (r.attained_error <= 2.0 * eps) return r;
    if (r.attained_error >= prev) break;  // rounding floor
    prev = r.attained_error;
  }
  throw CapabilityError("sign rational for gamma=" + std::to_string(gamma) +
                        " is out of reach in double precision; attainable eps is about " +
                        std::to_string(0.5 * r.attained_error));
}

ZolotarevRational build_sqrt_rational(double mu, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("build_sqrt_rational: eps must lie in (0,1)");
  ZolotarevRational r;
  double prev = 2.0;
  for (int k = 1; k <= kMaxRationalDegree; ++k) {
    r = sqrt_rational_of_degree(mu, k);
    if (r.attained_error <= eps) return r;
    if (r.attained_error >= prev) break;  // rounding floor
    prev = r.attained_error;
  }
  throw CapabilityError("sqrt rational for mu=" + std::to_string(mu) +
                        " is out of reach in double precision; attainable eps is about " +
                        std::to_string(r.attained_error));
}

double ChebyshevSign::operator()(double x) const {
  // Clenshaw.
  double b1 = 0.0, b2 = 0.0;
  for (int j = degree; j >= 1; --j) {
    double b0 = coeffs[j] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs[0] + x * b1 - b2;
}

ChebyshevSign chebyshev_erf_sign(double sharpness, int degree) {
  if (degree < 1 || degree % 2 == 0) throw DomainError("chebyshev sign: degree must be odd and positive");
  ChebyshevSign p;
  p.degree = degree;
  p.sharpness = sharpness;
  p.coeffs.assign(static_cast<std::size_t>(degree) + 1, 0.0);
  int nodes = std::max(4 * degree, 1024);
  std::vector<double> theta(nodes), fx(nodes);
  for (int l = 0; l < nodes; ++l) {
    theta[l] = std::numbers::pi * (l + 0.5) / nodes;
    fx[l] = std::erf(sharpness * std::cos(theta[l]));
  }
  for (int j = 1; j <= degree; j += 2) {
    double s = 0.0;
    for (int l = 0; l < nodes; ++l) s += fx[l] * std::cos(j * theta[l]);
    p.coeffs[j] = 2.0 * s / nodes;
  }
  return p;
}

namespace {

double max_sign_error(const ChebyshevSign& p, double gamma, int points) {
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    double x = gamma + (1.0 - gamma) * i / (points - 1);
    worst = std::max(worst, std::abs(p(x) - 1.0));
  }
  return worst;
}

}  // namespace

ChebyshevSign chebyshev_sign_best_of_degree(double gamma, int degree) {
  // Golden-section search over log(sharpness).
  double lo = std::log(0.1 / gamma), hi = std::log(10.0 * degree);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double t) { return max_sign_error(chebyshev_erf_sign(std::exp(t), degree), gamma, 2000); };
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return chebyshev_erf_sign(std::exp(0.5 * (lo + hi)), degree);
}

double truncated_series_sign(double x, int terms) {
  double y = 1.0 - x * x;
  double term = 1.0, sum = 0.0;
  for (int j = 0; j < terms; ++j) {
    sum += term;
    term *= y * (2.0 * j + 1.0) / (2.0 * j + 2.0);
  }
  return x * sum;
}

}  // namespace ratpcp
