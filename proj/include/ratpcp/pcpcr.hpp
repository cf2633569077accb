#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ratpcp/core.hpp"
#include "ratpcp/rational.hpp"
#include "ratpcp/solvers.hpp"

namespace ratpcp {

enum class PcpMode { practical, theoretical };
// agd and direct_svrg swap in the baseline squared solvers for comparison.
enum class SquaredBackend { automatic, plain, accelerated, agd, direct_svrg };

struct PcpOptions {
  PcpMode mode = PcpMode::practical;
  SquaredBackend backend = SquaredBackend::automatic;
  std::uint64_t seed = 0;
  StepConvention convention = StepConvention::proof;
  std::int64_t max_vec_products = 0;  // 0: unlimited; shared by all inner solves
  CostCounter* cost = nullptr;
  ConvergenceTrace* trace = nullptr;
  // Diagnostic error of the final output, for the trace endpoint.
  std::function<double(const Vector&)> error_probe;
};

struct PcpReport {
  int degree = 0;
  double eps_inner = 0.0;
  bool accelerated = false;
  bool budget_exhausted = false;
  // Theoretical mode substitutes 1 for the unspecified coefficient-bound constants.
  bool constants_are_stand_ins = false;
  std::vector<SolveReport> solves;
};

struct PcrReport {
  int steps = 0;
  double eps_pcp = 0.0;
  double eps_ridge = 0.0;
  PcpReport pcp;
};

// Inner squared-solver tolerance: ε/(10k²) (practical) or ε/(8k³M^{k−1}) with
// M = k⁴/(γλ)² (theoretical, unit constants).
double ispcp_inner_tolerance(PcpMode mode, double eps, int k, double gamma, double lambda);
bool prefers_acceleration(const RowMatrix& a, double gamma, double lambda);

// Projection of v onto the eigenvectors of AᵀA with eigenvalue ≥ λ, for A with
// top eigenvalue at most 1.
Vector ispcp(const RowMatrix& a, const Vector& v, double lambda, double gamma, double eps, double delta,
             const PcpOptions& options = {}, PcpReport* report = nullptr);

// Least squares restricted to the same eigenspace.
Vector ispcr(const RowMatrix& a, const Vector& b, double lambda, double gamma, double eps, double delta,
             const PcpOptions& options = {}, PcrReport* report = nullptr);
int ispcr_steps(double eps, double gamma);

// 2·eps_step·k·M^{k−1}.
double accumulate_error_bound(double eps_step, int k, double m_bound);

// Dense eigensystem of AᵀA, ascending eigenvalues, eigenvectors as columns.
struct DenseSpectrum {
  Vector values;
  DenseMatrix vectors;

  static DenseSpectrum of(const RowMatrix& a);
  DenseMatrix projector(double threshold) const;
  Vector project(const Vector& v, double threshold) const;
};

Vector exact_pcp(const RowMatrix& a, const Vector& v, double lambda);
Vector exact_pcr(const RowMatrix& a, const Vector& b, double lambda);
Vector exact_pcr(const DenseSpectrum& spec, const RowMatrix& a, const Vector& b, double lambda);

struct PcpResiduals {
  double top = 0.0;        // ‖P_{(1+γ)λ}(out − v)‖
  double bottom = 0.0;     // ‖(I − P_{(1−γ)λ})out‖
  double middle = 0.0;     // ‖(P_{(1+γ)λ} − P_{(1−γ)λ})(out − v)‖
  double middle_ref = 0.0; // ‖(P_{(1+γ)λ} − P_{(1−γ)λ})v‖
  double v_norm = 0.0;
  bool holds(double eps) const;
  std::string describe(double eps) const;
};

struct PcrResiduals {
  double outside = 0.0;   // ‖(I − P_{(1−γ)λ})out‖
  double residual = 0.0;  // ‖A·out − b‖
  double reference = 0.0; // ‖A x*_{(1+γ)λ} − b‖
  double b_norm = 0.0;
  bool holds(double eps) const;
  std::string describe(double eps) const;
};

PcpResiduals pcp_residuals(const DenseSpectrum& spec, const Vector& v, const Vector& out, double lambda,
                           double gamma);
PcrResiduals pcr_residuals(const DenseSpectrum& spec, const RowMatrix& a, const Vector& b, const Vector& out,
                           double lambda, double gamma);

}  // namespace ratpcp
