#include "ratpcp/core.hpp"

#include <algorithm>
#include <cmath>

namespace ratpcp {

void require(bool ok, const std::string& message) {
  if (!ok) throw ContractViolation(message);
}

namespace {

bool prefer_sparse(Index rows, Index cols, Index nnz) {
  double total = static_cast<double>(rows) * static_cast<double>(cols);
  return total > 0 && static_cast<double>(nnz) <= 0.25 * total;
}

}  // namespace

RowMatrix RowMatrix::dense_storage(const DenseMatrix& m) {
  RowMatrix r;
  r.rows_ = m.rows();
  r.cols_ = m.cols();
  r.sparse_ = false;
  r.dense_ = m;
  r.finish();
  return r;
}

RowMatrix RowMatrix::sparse_storage(const DenseMatrix& m) {
  RowMatrix r;
  r.rows_ = m.rows();
  r.cols_ = m.cols();
  r.sparse_ = true;
  r.row_ptr_.assign(static_cast<std::size_t>(m.rows()) + 1, 0);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) {
        r.col_idx_.push_back(j);
        r.values_.push_back(m(i, j));
      }
    }
    r.row_ptr_[i + 1] = static_cast<Index>(r.values_.size());
  }
  r.finish();
  return r;
}

RowMatrix RowMatrix::from_dense(const DenseMatrix& m) {
  Index nnz = (m.array() != 0.0).count();
  return prefer_sparse(m.rows(), m.cols(), nnz) ? sparse_storage(m) : dense_storage(m);
}

RowMatrix RowMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    require(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols, "triplet index out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  // Merge duplicates by summation, drop explicit zeros.
  std::vector<Triplet> merged;
  for (const auto& t : entries) {
    if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col) {
      merged.back().value += t.value;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Triplet& t) { return t.value == 0.0; });

  RowMatrix r;
  r.rows_ = rows;
  r.cols_ = cols;
  if (prefer_sparse(rows, cols, static_cast<Index>(merged.size()))) {
    r.sparse_ = true;
    r.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
    for (const auto& t : merged) {
      r.col_idx_.push_back(t.col);
      r.values_.push_back(t.value);
      ++r.row_ptr_[t.row + 1];
    }
    for (Index i = 0; i < rows; ++i) r.row_ptr_[i + 1] += r.row_ptr_[i];
  } else {
    r.sparse_ = false;
    r.dense_ = RowMajorMatrix::Zero(rows, cols);
    for (const auto& t : merged) r.dense_(t.row, t.col) = t.value;
  }
  r.finish();
  return r;
}

void RowMatrix::finish() {
  row_norms_sq_.assign(static_cast<std::size_t>(rows_), 0.0);
  frob_sq_ = 0.0;
  if (sparse_) {
    nnz_ = static_cast<Index>(values_.size());
    for (Index i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * values_[p];
      row_norms_sq_[i] = s;
    }
  } else {
    nnz_ = (dense_.array() != 0.0).count();
    for (Index i = 0; i < rows_; ++i) row_norms_sq_[i] = dense_.row(i).squaredNorm();
  }
  for (double v : row_norms_sq_) frob_sq_ += v;
  eig_cache_ = std::make_shared<EigCache>();
}

double RowMatrix::row_nnz(Index i) const {
  if (!sparse_) return static_cast<double>(cols_);
  return static_cast<double>(row_ptr_[i + 1] - row_ptr_[i]);
}

DenseMatrix RowMatrix::to_dense() const {
  if (!sparse_) return dense_;
  DenseMatrix m = DenseMatrix::Zero(rows_, cols_);
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) m(i, col_idx_[p]) = values_[p];
  }
  return m;
}

std::vector<Triplet> RowMatrix::triplets() const {
  std::vector<Triplet> out;
  if (sparse_) {
    for (Index i = 0; i < rows_; ++i) {
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out.push_back({i, col_idx_[p], values_[p]});
    }
  } else {
    for (Index i = 0; i < rows_; ++i) {
      for (Index j = 0; j < cols_; ++j) {
        if (dense_(i, j) != 0.0) out.push_back({i, j, dense_(i, j)});
      }
    }
  }
  return out;
}

RowMatrix RowMatrix::scaled(double s) const {
  RowMatrix r = *this;
  r.dense_ *= s;
  for (double& v : r.values_) v *= s;
  r.finish();
  return r;
}

double RowMatrix::top_eig_estimate() const {
  std::lock_guard<std::mutex> guard(eig_cache_->lock);
  if (!eig_cache_->value) eig_cache_->value = estimate_top_eig(*this, 0).overestimate;
  return *eig_cache_->value;
}

void RowMatrix::set_top_eig_estimate(double value) const {
  std::lock_guard<std::mutex> guard(eig_cache_->lock);
  eig_cache_->value = value;
}

SamplingDist::SamplingDist(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("sampling weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw DegenerateInput("sampling weights sum to zero");
  prob_.resize(weights.size());
  cumulative_.resize(weights.size());
  double run = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    prob_[i] = weights[i] / total;
    run += prob_[i];
    cumulative_[i] = run;
  }
  cumulative_.back() = 1.0;
}

Index SamplingDist::draw(Rng& rng) const {
  double u = uniform01(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  auto i = static_cast<Index>(it - cumulative_.begin());
  if (i >= size()) i = size() - 1;
  // Zero-probability rows share a cumulative value with their predecessor and
  // are never returned by upper_bound.
  return i;
}

void ConvergenceTrace::record(std::int64_t vec_products, double rel_error, std::int64_t wall_ns, int epoch) {
  if (!record_wall_time) wall_ns = 0;
  if (!points.empty()) {
    if (vec_products < points.back().vec_products) {
      throw ContractViolation("trace checkpoints must have nondecreasing cost");
    }
    if (vec_products == points.back().vec_products) {
      points.back() = {vec_products, rel_error, wall_ns, epoch};
      return;
    }
  }
  points.push_back({vec_products, rel_error, wall_ns, epoch});
}

Vector matvec(const RowMatrix& a, const Vector& x, CostCounter* cost) {
  require(x.size() == a.cols(), "matvec: dimension mismatch");
  Vector y(a.rows());
  for (Index i = 0; i < a.rows(); ++i) y[i] = a.row_dot(i, x.data());
  if (cost) cost->charge_matvec(a.rows());
  return y;
}

Vector matvec_t(const RowMatrix& a, const Vector& y, CostCounter* cost) {
  require(y.size() == a.rows(), "matvec_t: dimension mismatch");
  Vector x = Vector::Zero(a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    if (y[i] != 0.0) a.row_axpy(i, y[i], x.data());
  }
  if (cost) cost->charge_matvec(a.rows());
  return x;
}

Vector gram_apply(const RowMatrix& a, const Vector& x, CostCounter* cost) {
  require(x.size() == a.cols(), "gram_apply: dimension mismatch");
  Vector out = Vector::Zero(a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    double s = a.row_dot(i, x.data());
    if (s != 0.0) a.row_axpy(i, s, out.data());
  }
  if (cost) {
    cost->charge_matvec(a.rows());
    cost->charge_matvec(a.rows());
  }
  return out;
}

int power_iteration_count(Index d) {
  return static_cast<int>(std::ceil(8.0 * std::log(static_cast<double>(std::max<Index>(d, 1)) / 0.01)));
}

PowerEstimate estimate_top_eig(const RowMatrix& a, std::uint64_t seed, CostCounter* cost) {
  if (a.frob_sq() == 0.0) throw DegenerateInput("power method on a zero matrix");
  Rng rng = make_stream(seed, 0x706f776572ULL);
  Vector x(a.cols());
  for (Index j = 0; j < x.size(); ++j) x[j] = gaussian(rng);
  x /= x.norm();
  int iters = power_iteration_count(a.cols());
  double rayleigh = 0.0;
  for (int t = 0; t < iters; ++t) {
    Vector y = gram_apply(a, x, cost);
    rayleigh = x.dot(y);
    double ny = y.norm();
    if (ny == 0.0) {
      // Start vector in the null space; restart along a fresh direction.
      for (Index j = 0; j < x.size(); ++j) x[j] = gaussian(rng);
      x /= x.norm();
      continue;
    }
    x = y / ny;
  }
  rayleigh = std::max(rayleigh, x.dot(gram_apply(a, x, cost)));
  if (!(rayleigh > 0.0)) throw DegenerateInput("power method found no positive eigenvalue");
  // After this many iterations the Rayleigh quotient is at least 3/4 of λ₁
  // except with negligible probability, so 4/3 of it covers λ₁ and stays
  // below 2λ₁.
  return {rayleigh, rayleigh * 4.0 / 3.0, iters};
}

NormalizedProblem normalize_spectrum(const RowMatrix& a, double lambda, const Vector& rhs, bool scale_rhs,
                                     std::uint64_t seed, CostCounter* cost) {
  if (a.frob_sq() == 0.0) throw DegenerateInput("normalize_spectrum: A is zero");
  PowerEstimate est = estimate_top_eig(a, seed, cost);
  double s = 1.0 / std::sqrt(est.overestimate);
  NormalizedProblem out{a.scaled(s), lambda / est.overestimate, scale_rhs ? Vector(rhs * s) : rhs,
                        est.overestimate};
  out.a.set_top_eig_estimate(est.rayleigh / est.overestimate * 4.0 / 3.0);
  return out;
}

}  // namespace ratpcp
