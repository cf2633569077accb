#include <cmath>
#include <numbers>

#include "ratpcp/errors.hpp"
#include "ratpcp/rational.hpp"

namespace ratpcp {

namespace {

constexpr int kMaxIter = 64;
constexpr double kTol = 1e-15;

double agm(double a, double b) {
  for (int i = 0; i < kMaxIter; ++i) {
    if (std::abs(a - b) <= kTol * a) break;
    double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return 0.5 * (a + b);
}

double complement(double m) { return std::sqrt((1.0 - m) * (1.0 + m)); }

}  // namespace

double complete_elliptic_K_comp(double m_comp) {
  if (!(m_comp > 0.0) || m_comp > 1.0) throw DomainError("complete_elliptic_K: modulus must lie in [0,1)");
  return std::numbers::pi / (2.0 * agm(1.0, m_comp));
}

double complete_elliptic_K(double m) {
  if (!(m >= 0.0) || m >= 1.0) throw DomainError("complete_elliptic_K: modulus must lie in [0,1)");
  return complete_elliptic_K_comp(complement(m));
}

SnCn jacobi_sn_cn_comp(double u, double m_comp) {
  if (!(m_comp > 0.0) || m_comp > 1.0) throw DomainError("jacobi_sn_cn: modulus must lie in [0,1)");
  if (!std::isfinite(u)) throw DomainError("jacobi_sn_cn: argument must be finite");
  double m = complement(m_comp);
  if (m == 0.0) return {std::sin(u), std::cos(u)};
  double a[kMaxIter + 1];
  double c[kMaxIter + 1];
  a[0] = 1.0;
  double b = m_comp;
  c[0] = m;
  int n = 0;
  while (n < kMaxIter && std::abs(c[n]) > kTol * a[n]) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  for (int j = n; j > 0; --j) phi = 0.5 * (phi + std::asin(c[j] / a[j] * std::sin(phi)));
  return {std::sin(phi), std::cos(phi)};
}

SnCn jacobi_sn_cn(double u, double m) {
  if (!(m >= 0.0) || m >= 1.0) throw DomainError("jacobi_sn_cn: modulus must lie in [0,1)");
  if (m == 0.0) {
    if (!std::isfinite(u)) throw DomainError("jacobi_sn_cn: argument must be finite");
    return {std::sin(u), std::cos(u)};
  }
  return jacobi_sn_cn_comp(u, complement(m));
}

}  // namespace ratpcp
