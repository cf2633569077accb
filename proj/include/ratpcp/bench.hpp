#pragma once

#include <string>
#include <vector>

#include "ratpcp/core.hpp"
#include "ratpcp/pcpcr.hpp"

namespace ratpcp {

enum class EigenCase { eigengap_uniform, eigengap_skewed, no_eigengap_skewed };

EigenCase parse_case(const std::string& name);
std::string case_name(EigenCase c);

struct SyntheticSpec {
  Index n = 2000;
  Index d = 50;
  double lambda = 0.5;
  double gamma = 0.05;
  EigenCase eigen_case = EigenCase::eigengap_uniform;
  std::uint64_t seed = 0;
};

struct SyntheticInstance {
  RowMatrix a;
  DenseSpectrum spectrum;   // exact eigensystem of AᵀA
  Vector v;                 // seeded Gaussian test vector
};

// Eigenvalues for one case, sorted ascending.
Vector synthetic_eigenvalues(const SyntheticSpec& spec);
// A = U Λ^{1/2} V with orthonormal U (n×d) and orthogonal V (d×d).
SyntheticInstance generate_synthetic(const SyntheticSpec& spec);

struct BaselineOptions {
  std::uint64_t seed = 0;
  CostCounter* cost = nullptr;
  ConvergenceTrace* trace = nullptr;
  std::function<double(const Vector&)> error_probe;
  // Record a checkpoint after every this many polynomial terms.
  int checkpoint_every = 8;
};

struct BaselineReport {
  int degree = 0;
  double sharpness = 0.0;
};

// Largest degree the sign baselines accept at (γ, ε).
int baseline_degree_cap(double gamma, double eps);
// Gap of X = (AᵀA + λI)⁻¹(AᵀA − λI) induced by the eigengap γ.
double transformed_gap(double gamma);
// Odd degree and sharpness of the erf Chebyshev approximation reaching
// max error ≤ eps on |x| ∈ [gap,1]; measured on a grid (chebyshev) or from an
// a-priori formula (polynomial).
ChebyshevSign chebyshev_sign_for_accuracy(double gap, double eps);
ChebyshevSign chebyshev_sign_a_priori(double gap, double eps);

Vector chebyshev_sign_baseline(const RowMatrix& a, double lambda, double gamma, double eps, const Vector& v,
                               const BaselineOptions& options = {}, BaselineReport* report = nullptr);
Vector polynomial_sign_baseline(const RowMatrix& a, double lambda, double gamma, double eps, const Vector& v,
                                const BaselineOptions& options = {}, BaselineReport* report = nullptr);

struct BenchPlan {
  SyntheticSpec instance;
  std::vector<std::string> methods{"rational", "chebyshev"};
  std::vector<double> eps_grid{1e-1, 1e-2};
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir;
  bool record_wall_time = false;
  // Direct SVRG and AGD budgets relative to the rational method's cost.
  double budget_multiple = 10.0;
};

struct BenchCell {
  std::string method;
  std::uint64_t seed = 0;
  double eps = 0.0;
  ConvergenceTrace trace;
  double final_error = 0.0;
  std::int64_t vec_products = 0;
  bool failed = false;
  std::string failure;
};

struct BenchSummaryRow {
  std::string method;
  double eps = 0.0;
  double median_vec_products = 0.0;  // NaN when fewer than half the seeds reach eps
  int reached = 0;
  int runs = 0;
};

struct BenchResult {
  std::vector<BenchCell> cells;
  std::vector<BenchSummaryRow> summary;
};

extern const std::vector<std::string> kBenchMethods;

// Runs every (method, seed, eps) cell. Writes trace_<method>_<seed>.csv
// (all eps of that cell concatenated) and summary.csv when out_dir is set.
BenchResult run_bench(const BenchPlan& plan);

}  // namespace ratpcp
