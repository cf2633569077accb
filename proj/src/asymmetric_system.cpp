#include <algorithm>
#include <cmath>

#include "ratpcp/asvrg.hpp"

namespace ratpcp {

AsymmetricSystem::AsymmetricSystem(const RowMatrix& a, double c, double mu, Vector rhs, double tau)
    : a_(&a), c_(c), mu_(mu), tau_(tau), rhs_(std::move(rhs)) {
  require(mu > 0.0, "AsymmetricSystem: mu must be positive");
  require(tau >= 0.0, "AsymmetricSystem: tau must be nonnegative");
  require(rhs_.size() == 2 * a.cols(), "AsymmetricSystem: rhs must have length 2d");
  // A zero matrix still has a well-defined M; only sampling needs rows.
  if (a.frob_sq() == 0.0) {
    top_eig_ = 0.0;
    return;
  }
  top_eig_ = a.top_eig_estimate();
  dist_ = std::make_shared<const SamplingDist>(SamplingDist::by_row_norms(a));
}

AsymmetricSystem AsymmetricSystem::for_squared(const RowMatrix& a, double c, double mu, const Vector& v) {
  require(v.size() == a.cols(), "AsymmetricSystem: rhs must have length d");
  Vector rhs = Vector::Zero(2 * a.cols());
  rhs.tail(a.cols()) = v / (mu * mu);
  return AsymmetricSystem(a, c, mu, std::move(rhs));
}

AsymmetricSystem AsymmetricSystem::shifted(double tau, Vector rhs) const {
  AsymmetricSystem s = *this;
  require(tau >= 0.0, "AsymmetricSystem: tau must be nonnegative");
  require(rhs.size() == dim(), "AsymmetricSystem: rhs must have length 2d");
  s.tau_ = tau;
  s.rhs_ = std::move(rhs);
  return s;
}

Vector AsymmetricSystem::apply(const Vector& z, CostCounter* cost) const {
  require(z.size() == dim(), "apply_M: dimension mismatch");
  const Index d = a_->cols();
  Vector x = z.head(d), y = z.tail(d);
  Vector sy = gram_apply(*a_, y, cost) - c_ * y;
  Vector sx = gram_apply(*a_, x, cost) - c_ * x;
  Vector out(dim());
  out.head(d) = (1.0 + tau_) * x - sy / mu_;
  out.tail(d) = sx / mu_ + (1.0 + tau_) * y;
  charge(cost, 4);
  return out;
}

Vector AsymmetricSystem::apply_component(Index i, const Vector& z, CostCounter* cost) const {
  require(i >= 0 && i < a_->rows(), "apply_Mi: row index out of range");
  require(z.size() == dim(), "apply_Mi: dimension mismatch");
  const Index d = a_->cols();
  const double p = dist_ ? dist_->prob(i) : 0.0;
  Vector out(dim());
  Vector x = z.head(d), y = z.tail(d);
  double sx = a_->row_dot(i, x.data());
  double sy = a_->row_dot(i, y.data());
  out.head(d) = p * (1.0 + tau_) * x + (c_ * p / mu_) * y;
  out.tail(d) = p * (1.0 + tau_) * y - (c_ * p / mu_) * x;
  a_->row_axpy(i, -sy / mu_, out.data());
  a_->row_axpy(i, sx / mu_, out.data() + d);
  charge(cost, 4);
  return out;
}

double AsymmetricSystem::variance_bound() const {
  double base = 1.0 + a_->frob_sq() * top_eig_ / (mu_ * mu_);
  return base + 2.0 * tau_ + tau_ * tau_;
}

double AsymmetricSystem::norm_bound() const {
  double spread = std::max(c_, top_eig_ - c_);
  return std::sqrt(1.0 + spread * spread / (mu_ * mu_)) + tau_;
}

}  // namespace ratpcp
