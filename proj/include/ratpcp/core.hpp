#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ratpcp/errors.hpp"
#include "ratpcp/random.hpp"

namespace ratpcp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Rows a_i of A, stored densely or as compressed rows. Immutable after
// construction apart from the lazily filled top eigenvalue cache.
class RowMatrix {
 public:
  RowMatrix() = default;

  // Picks compressed storage when at most 25% of entries are nonzero.
  static RowMatrix from_dense(const DenseMatrix& m);
  static RowMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> entries);
  static RowMatrix dense_storage(const DenseMatrix& m);
  static RowMatrix sparse_storage(const DenseMatrix& m);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return nnz_; }
  bool is_sparse() const { return sparse_; }
  double frob_sq() const { return frob_sq_; }
  double row_norm_sq(Index i) const { return row_norms_sq_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& row_norms_sq() const { return row_norms_sq_; }
  double row_nnz(Index i) const;

  double row_dot(Index i, const double* x) const {
    if (!sparse_) {
      const double* a = dense_.data() + i * cols_;
      double s = 0.0;
      for (Index j = 0; j < cols_; ++j) s += a[j] * x[j];
      return s;
    }
    double s = 0.0;
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * x[col_idx_[p]];
    return s;
  }

  // y += alpha * a_i
  void row_axpy(Index i, double alpha, double* y) const {
    if (!sparse_) {
      const double* a = dense_.data() + i * cols_;
      for (Index j = 0; j < cols_; ++j) y[j] += alpha * a[j];
      return;
    }
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) y[col_idx_[p]] += alpha * values_[p];
  }

  DenseMatrix to_dense() const;
  RowMatrix scaled(double s) const;

  // Cached power-method overestimate of the top eigenvalue of AᵀA.
  double top_eig_estimate() const;
  void set_top_eig_estimate(double value) const;

  std::vector<Triplet> triplets() const;

 private:
  void finish();

  Index rows_ = 0;
  Index cols_ = 0;
  Index nnz_ = 0;
  bool sparse_ = false;
  RowMajorMatrix dense_;
  std::vector<Index> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<double> values_;
  std::vector<double> row_norms_sq_;
  double frob_sq_ = 0.0;

  struct EigCache {
    std::mutex lock;
    std::optional<double> value;
  };
  std::shared_ptr<EigCache> eig_cache_ = std::make_shared<EigCache>();
};

// Row sampling with p_i ∝ ‖a_i‖².
class SamplingDist {
 public:
  SamplingDist() = default;
  explicit SamplingDist(const std::vector<double>& weights);
  static SamplingDist by_row_norms(const RowMatrix& a) { return SamplingDist(a.row_norms_sq()); }

  Index size() const { return static_cast<Index>(prob_.size()); }
  double prob(Index i) const { return prob_[static_cast<std::size_t>(i)]; }
  Index draw(Rng& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<double> cumulative_;
};

// One unit is one inner product or axpy of length d (or n).
struct CostCounter {
  std::int64_t vec_products = 0;
  std::int64_t full_matvecs = 0;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void charge(std::int64_t units) { vec_products += units; }
  void charge_matvec(std::int64_t units) {
    vec_products += units;
    ++full_matvecs;
  }
  std::int64_t wall_ns() const {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

inline void charge(CostCounter* cost, std::int64_t units) {
  if (cost) cost->charge(units);
}

struct Checkpoint {
  std::int64_t vec_products;
  double rel_error;
  std::int64_t wall_ns;
  int epoch;
};

struct ConvergenceTrace {
  std::string method;
  std::uint64_t seed = 0;
  bool record_wall_time = true;
  std::vector<Checkpoint> points;
  std::vector<std::string> warnings;

  // Equal counts replace the previous point; a decreasing count is a bug.
  void record(std::int64_t vec_products, double rel_error, std::int64_t wall_ns, int epoch);
  void record(const CostCounter& cost, double rel_error, int epoch) {
    record(cost.vec_products, rel_error, cost.wall_ns(), epoch);
  }
};

Vector matvec(const RowMatrix& a, const Vector& x, CostCounter* cost = nullptr);
Vector matvec_t(const RowMatrix& a, const Vector& y, CostCounter* cost = nullptr);
// AᵀA x, charged as two passes.
Vector gram_apply(const RowMatrix& a, const Vector& x, CostCounter* cost = nullptr);

struct PowerEstimate {
  double rayleigh;      // lower estimate after the iterations
  double overestimate;  // rayleigh inflated by 4/3
  int iterations;
};

int power_iteration_count(Index d);
PowerEstimate estimate_top_eig(const RowMatrix& a, std::uint64_t seed, CostCounter* cost = nullptr);

struct NormalizedProblem {
  RowMatrix a;
  double lambda;
  Vector rhs;
  double scale;  // the top eigenvalue overestimate A was divided by (squared)
};

// Divides A by the square root of a power-method overestimate of λ₁. The
// right-hand side is left alone for PCP and scaled with A for PCR.
NormalizedProblem normalize_spectrum(const RowMatrix& a, double lambda, const Vector& rhs,
                                     bool scale_rhs, std::uint64_t seed = 0,
                                     CostCounter* cost = nullptr);

void require(bool ok, const std::string& message);

}  // namespace ratpcp
