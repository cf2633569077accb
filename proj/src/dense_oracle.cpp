#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "ratpcp/pcpcr.hpp"

namespace ratpcp {

DenseSpectrum DenseSpectrum::of(const RowMatrix& a) {
  require(a.cols() <= 2048, "DenseSpectrum: d must be at most 2048");
  DenseMatrix am = a.to_dense();
  DenseMatrix g = am.transpose() * am;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(g);
  if (es.info() != Eigen::Success) throw Error("DenseSpectrum: eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

DenseMatrix DenseSpectrum::projector(double threshold) const {
  DenseMatrix p = DenseMatrix::Zero(vectors.rows(), vectors.rows());
  for (Index i = 0; i < values.size(); ++i) {
    if (values[i] >= threshold) p += vectors.col(i) * vectors.col(i).transpose();
  }
  return p;
}

Vector DenseSpectrum::project(const Vector& v, double threshold) const {
  Vector out = Vector::Zero(v.size());
  for (Index i = 0; i < values.size(); ++i) {
    if (values[i] >= threshold) out += vectors.col(i).dot(v) * vectors.col(i);
  }
  return out;
}

Vector exact_pcp(const RowMatrix& a, const Vector& v, double lambda) {
  require(v.size() == a.cols(), "exact_pcp: dimension mismatch");
  return DenseSpectrum::of(a).project(v, lambda);
}

Vector exact_pcr(const DenseSpectrum& spec, const RowMatrix& a, const Vector& b, double lambda) {
  require(b.size() == a.rows(), "exact_pcr: dimension mismatch");
  require(lambda > 0.0, "exact_pcr: lambda must be positive");
  Vector atb = matvec_t(a, b);
  Vector out = Vector::Zero(a.cols());
  for (Index i = 0; i < spec.values.size(); ++i) {
    if (spec.values[i] >= lambda) out += (spec.vectors.col(i).dot(atb) / spec.values[i]) * spec.vectors.col(i);
  }
  return out;
}

Vector exact_pcr(const RowMatrix& a, const Vector& b, double lambda) {
  return exact_pcr(DenseSpectrum::of(a), a, b, lambda);
}

bool PcpResiduals::holds(double eps) const {
  double slack = eps * v_norm;
  return top <= slack && bottom <= slack && middle <= middle_ref + slack;
}

std::string PcpResiduals::describe(double eps) const {
  std::ostringstream os;
  os << "top=" << top / v_norm << " bottom=" << bottom / v_norm << " middle=" << middle / v_norm
     << " (allowed " << (middle_ref / v_norm + eps) << ")";
  return os.str();
}

bool PcrResiduals::holds(double eps) const {
  double slack = eps * b_norm;
  return outside <= slack && residual <= reference + slack;
}

std::string PcrResiduals::describe(double eps) const {
  std::ostringstream os;
  os << "outside=" << outside / b_norm << " residual-excess=" << (residual - reference) / b_norm << " (eps "
     << eps << ")";
  return os.str();
}

PcpResiduals pcp_residuals(const DenseSpectrum& spec, const Vector& v, const Vector& out, double lambda,
                           double gamma) {
  PcpResiduals r;
  Vector diff = out - v;
  Vector top_diff = spec.project(diff, (1.0 + gamma) * lambda);
  Vector wide_diff = spec.project(diff, (1.0 - gamma) * lambda);
  r.top = top_diff.norm();
  r.bottom = (out - spec.project(out, (1.0 - gamma) * lambda)).norm();
  r.middle = (top_diff - wide_diff).norm();
  r.middle_ref = (spec.project(v, (1.0 + gamma) * lambda) - spec.project(v, (1.0 - gamma) * lambda)).norm();
  r.v_norm = v.norm();
  return r;
}

PcrResiduals pcr_residuals(const DenseSpectrum& spec, const RowMatrix& a, const Vector& b, const Vector& out,
                           double lambda, double gamma) {
  PcrResiduals r;
  r.outside = (out - spec.project(out, (1.0 - gamma) * lambda)).norm();
  r.residual = (matvec(a, out) - b).norm();
  Vector ref = exact_pcr(spec, a, b, (1.0 + gamma) * lambda);
  r.reference = (matvec(a, ref) - b).norm();
  r.b_norm = b.norm();
  return r;
}

double accumulate_error_bound(double eps_step, int k, double m_bound) {
  if (k < 1) throw DomainError("accumulate_error_bound: k must be positive");
  if (!(m_bound >= 1.0)) throw DomainError("accumulate_error_bound: M must be at least 1");
  if (!(eps_step >= 0.0) || eps_step > m_bound / (2.0 * k)) {
    throw DomainError("accumulate_error_bound: eps_step must lie in [0, M/(2k)]");
  }
  return 2.0 * eps_step * k * std::pow(m_bound, k - 1);
}

}  // namespace ratpcp
