#pragma once

#include <vector>

namespace ratpcp {

// Complete elliptic integral of the first kind, modulus convention:
// K(m) = ∫₀¹ dt / √((1−t²)(1−m²t²)).
double complete_elliptic_K(double m);
// Same integral given the complementary modulus m' = √(1−m²); accurate when
// m is within rounding of 1.
double complete_elliptic_K_comp(double m_comp);

struct SnCn {
  double sn;
  double cn;
};

// Jacobi sn, cn by the descending Landen (AGM) scheme.
SnCn jacobi_sn_cn(double u, double m);
SnCn jacobi_sn_cn_comp(double u, double m_comp);

enum class RationalKind { sign, sqrt };

struct ZolotarevRational {
  RationalKind kind = RationalKind::sign;
  int degree = 0;
  double gap = 0.0;             // γ for sign on |x| ∈ [γ,1]; μ for sqrt on [μ,1]
  std::vector<double> coeffs;   // c_1..c_2k, index order of construction
  double scale = 0.0;           // C
  double rho = 0.0;             // error base of the stated a-priori law
  double predicted_error = 0.0; // 2q/(1−q), q = ρ^{-(2k+1)}
  double attained_error = 0.0;  // equioscillation level max|r − sign| (sign) or max relative error (sqrt)

  double operator()(double x) const;
};

inline constexpr int kMaxRationalDegree = 64;

// ρ = exp(πK(μ′)/(4K(μ))), μ = (1−√γ)/(1+√γ).
double zolotarev_rho(double gamma);
double zolotarev_predicted_error(double rho, int k);

ZolotarevRational sign_rational_of_degree(double gamma, int k);
ZolotarevRational sqrt_rational_of_degree(double mu, int k);

// Smallest degree whose attained sign error is ≤ 2·eps.
ZolotarevRational build_sign_rational(double gamma, double eps);
// Smallest degree whose relative error for √x on [μ,1] is ≤ eps.
ZolotarevRational build_sqrt_rational(double mu, double eps);

double eval_rational_scalar(const ZolotarevRational& r, double x);

// Scalar comparison curves used for the fixed-degree comparison.
// Chebyshev expansion of erf(a·x), with a chosen to minimise the max error
// on |x| ∈ [γ,1] at the given odd degree.
struct ChebyshevSign {
  int degree = 0;
  double sharpness = 0.0;
  std::vector<double> coeffs;  // Chebyshev coefficients, odd entries only nonzero
  double operator()(double x) const;
};
ChebyshevSign chebyshev_erf_sign(double sharpness, int degree);
ChebyshevSign chebyshev_sign_best_of_degree(double gamma, int degree);
// x · Σ_{j<terms} binom(2j,j)/4^j (1−x²)^j; degree 2·terms − 1.
double truncated_series_sign(double x, int terms);

}  // namespace ratpcp
