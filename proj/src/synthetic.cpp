#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "ratpcp/bench.hpp"

namespace ratpcp {

EigenCase parse_case(const std::string& name) {
  if (name == "eigengap-uniform") return EigenCase::eigengap_uniform;
  if (name == "eigengap-skewed") return EigenCase::eigengap_skewed;
  if (name == "no-eigengap-skewed") return EigenCase::no_eigengap_skewed;
  throw ContractViolation("unknown case '" + name +
                          "' (expected eigengap-uniform, eigengap-skewed or no-eigengap-skewed)");
}

std::string case_name(EigenCase c) {
  switch (c) {
    case EigenCase::eigengap_uniform:
      return "eigengap-uniform";
    case EigenCase::eigengap_skewed:
      return "eigengap-skewed";
    case EigenCase::no_eigengap_skewed:
      return "no-eigengap-skewed";
  }
  return "";
}

namespace {

// Uniform draw from [a0,a1] ∪ [b0,b1], weighted by length.
double draw_union(Rng& rng, double a0, double a1, double b0, double b1) {
  double la = a1 - a0, lb = b1 - b0;
  double u = uniform01(rng) * (la + lb);
  return u < la ? a0 + u : b0 + (u - la);
}

DenseMatrix orthonormal_columns(Index rows, Index cols, Rng& rng) {
  DenseMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) g(i, j) = gaussian(rng);
  }
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(rows, cols);
  // Fix column signs so the factor is a deterministic function of g.
  DenseMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

}  // namespace

Vector synthetic_eigenvalues(const SyntheticSpec& spec) {
  require(spec.d >= 2 && spec.n >= spec.d, "generate_synthetic: need n >= d >= 2");
  require(spec.gamma > 0.0 && spec.gamma < 1.0, "generate_synthetic: gamma must lie in (0,1)");
  require(spec.lambda > 0.0 && spec.lambda * (1.0 + spec.gamma) < 1.0, "generate_synthetic: lambda(1+gamma) must be < 1");
  Rng rng = make_stream(spec.seed, 0x65696773ULL);
  const double lo = spec.lambda * (1.0 - spec.gamma);
  const double hi = spec.lambda * (1.0 + spec.gamma);
  auto away = [&] { return draw_union(rng, 0.0, lo, hi, 1.0); };
  auto close = [&] { return std::min(1.0, draw_union(rng, 0.9 * lo, lo, hi, 1.1 * hi)); };
  Vector values(spec.d);
  const Index half = spec.d / 2;
  for (Index i = 0; i < spec.d; ++i) {
    switch (spec.eigen_case) {
      case EigenCase::eigengap_uniform:
        values[i] = away();
        break;
      case EigenCase::eigengap_skewed:
        values[i] = i < spec.d - half ? away() : close();
        break;
      case EigenCase::no_eigengap_skewed:
        values[i] = i < spec.d - half ? uniform01(rng) : close();
        break;
    }
  }
  std::sort(values.begin(), values.end());
  return values;
}

SyntheticInstance generate_synthetic(const SyntheticSpec& spec) {
  Vector values = synthetic_eigenvalues(spec);
  Rng rng = make_stream(spec.seed, 0x6d617472ULL);
  DenseMatrix u = orthonormal_columns(spec.n, spec.d, rng);
  DenseMatrix vt = orthonormal_columns(spec.d, spec.d, rng);  // columns are the eigenvectors of AᵀA
  double orth = (u.transpose() * u - DenseMatrix::Identity(spec.d, spec.d)).cwiseAbs().maxCoeff();
  if (orth > 1e-10) throw Error("generate_synthetic: U is not orthonormal");
  DenseMatrix a = u * values.cwiseSqrt().asDiagonal() * vt.transpose();
  DenseMatrix gram = a.transpose() * a;
  DenseMatrix expect = vt * values.asDiagonal() * vt.transpose();
  if ((gram - expect).cwiseAbs().maxCoeff() > 1e-10) throw Error("generate_synthetic: spectrum check failed");

  SyntheticInstance inst;
  inst.a = RowMatrix::from_dense(a);
  inst.spectrum = {values, vt};
  Rng vrng = make_stream(spec.seed, 0x76656374ULL);
  inst.v.resize(spec.d);
  for (Index i = 0; i < spec.d; ++i) inst.v[i] = gaussian(vrng);
  return inst;
}

}  // namespace ratpcp
