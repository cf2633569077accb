#include <cmath>

#include "ratpcp/rational.hpp"
#include "ratpcp/solvers.hpp"

namespace ratpcp {

Vector conjugate_gradient(const SymmetricOperator& m, double shift, const Vector& b, double tol, int max_iter,
                          int* iterations) {
  Vector x = Vector::Zero(b.size());
  Vector r = b;
  Vector p = r;
  double rr = r.squaredNorm();
  const double stop = tol * tol * b.squaredNorm();
  int it = 0;
  for (; it < max_iter && rr > stop; ++it) {
    Vector q = m.apply(p) + shift * p;
    double alpha = rr / p.dot(q);
    x += alpha * p;
    r -= alpha * q;
    double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  if (iterations) *iterations = it;
  if (rr > stop) throw Error("conjugate_gradient: no convergence within the iteration cap");
  return x;
}

namespace {

Vector sqrt_apply_impl(const SymmetricOperator& m, const DenseMatrix* dense, double mu, double lambda,
                       const Vector& v, double eps, const SqrtOptions& options) {
  require(v.size() == m.dim, "sqrt_apply: dimension mismatch");
  require(mu > 0.0 && lambda >= mu, "sqrt_apply: need 0 < mu <= lambda");
  require(eps > 0.0 && eps < 1.0, "sqrt_apply: eps must lie in (0,1)");
  const double ratio = mu / lambda;
  if (ratio >= 1.0 - 1e-12) return std::sqrt(lambda) * v;  // M = λI
  // Half the budget for the rational, half for the solves.
  ZolotarevRational r = build_sqrt_rational(ratio, 0.5 * eps);
  const int k = r.degree;
  auto scaled = [&](const Vector& x) -> Vector {
    charge(options.cost, m.dim);
    return m.apply(x) / lambda;
  };
  DenseMatrix ms;
  const bool direct = m.dim <= options.dense_threshold;
  if (direct) {
    if (dense) {
      ms = *dense / lambda;
    } else {
      ms.resize(m.dim, m.dim);
      for (Index j = 0; j < m.dim; ++j) ms.col(j) = scaled(Vector::Unit(m.dim, j));
      ms = 0.5 * (ms + ms.transpose());
    }
  }
  double growth = 1.0;
  for (int i = 0; i < k; ++i) growth *= (ratio + r.coeffs[2 * i + 1]) / (ratio + r.coeffs[2 * i]);
  const double tol = eps * std::sqrt(ratio) / (8.0 * k * growth);

  SymmetricOperator ms_op{m.dim, scaled};
  Vector x = v;
  for (int i = 0; i < k; ++i) {
    double up = r.coeffs[2 * i + 1];
    double down = r.coeffs[2 * i];
    if (direct) {
      x = ms * x + up * x;
      DenseMatrix h = ms;
      h.diagonal().array() += down;
      x = h.llt().solve(x);
    } else {
      x = scaled(x) + up * x;
      x = conjugate_gradient(ms_op, down, x, tol * (ratio + down), 10 * static_cast<int>(m.dim) + 100);
    }
  }
  x = r.scale * (direct ? Vector(ms * x) : scaled(x));
  return std::sqrt(lambda) * x;
}

}  // namespace

Vector sqrt_apply(const SymmetricOperator& m, double mu, double lambda, const Vector& v, double eps, double,
                  const SqrtOptions& options) {
  return sqrt_apply_impl(m, nullptr, mu, lambda, v, eps, options);
}

Vector sqrt_apply(const DenseMatrix& m, double mu, double lambda, const Vector& v, double eps, double,
                  const SqrtOptions& options) {
  require(m.rows() == m.cols(), "sqrt_apply: matrix must be square");
  SymmetricOperator op{m.rows(), [&m](const Vector& x) -> Vector { return m * x; }};
  return sqrt_apply_impl(op, &m, mu, lambda, v, eps, options);
}

}  // namespace ratpcp
