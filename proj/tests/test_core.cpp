#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ratpcp/core.hpp"
#include "ratpcp/io.hpp"

using namespace ratpcp;

namespace {

DenseMatrix gaussian_matrix(Index n, Index d, std::uint64_t seed) {
  Rng rng = make_stream(seed, 99);
  DenseMatrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = gaussian(rng);
  return m;
}

double top_eig(const DenseMatrix& a) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a.transpose() * a);
  return es.eigenvalues().maxCoeff();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ratpcp_test_" + name)).string();
}

}  // namespace

TEST(Matvec, IdentityReturnsInput) {
  RowMatrix a = RowMatrix::from_dense(DenseMatrix::Identity(3, 3));
  Vector x(3);
  x << 1, 2, 3;
  EXPECT_EQ(matvec(a, x), x);
}

TEST(Matvec, ZeroMatrixAnnihilates) {
  RowMatrix a = RowMatrix::from_dense(DenseMatrix::Zero(2, 3));
  Vector x = Vector::Constant(3, 7.0);
  EXPECT_EQ(matvec(a, x), Vector::Zero(2));
}

TEST(Matvec, MatchesDoubleLoop) {
  DenseMatrix m = gaussian_matrix(5, 4, 1);
  Vector x = gaussian_matrix(4, 1, 2).col(0);
  for (const RowMatrix& a : {RowMatrix::dense_storage(m), RowMatrix::sparse_storage(m)}) {
    Vector y = matvec(a, x);
    for (Index i = 0; i < 5; ++i) {
      double s = 0.0;
      for (Index j = 0; j < 4; ++j) s += m(i, j) * x[j];
      EXPECT_NEAR(y[i], s, 1e-14);
    }
  }
}

TEST(Matvec, DimensionMismatchThrows) {
  RowMatrix a = RowMatrix::from_dense(DenseMatrix::Identity(3, 3));
  EXPECT_THROW(matvec(a, Vector::Zero(2)), ContractViolation);
  EXPECT_THROW(matvec_t(a, Vector::Zero(4)), ContractViolation);
}

TEST(Matvec, ChargesOneUnitPerRow) {
  RowMatrix a = RowMatrix::from_dense(gaussian_matrix(7, 3, 3));
  CostCounter cost;
  matvec(a, Vector::Ones(3), &cost);
  EXPECT_EQ(cost.vec_products, 7);
  matvec_t(a, Vector::Ones(7), &cost);
  EXPECT_EQ(cost.vec_products, 14);
  gram_apply(a, Vector::Ones(3), &cost);
  EXPECT_EQ(cost.vec_products, 28);
  EXPECT_EQ(cost.full_matvecs, 4);
}

TEST(Matvec, GramMatchesDenseProduct) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = make_stream(seed, 5);
    Index n = 1 + static_cast<Index>(uniform01(rng) * 50), d = 1 + static_cast<Index>(uniform01(rng) * 50);
    DenseMatrix m = gaussian_matrix(n, d, seed);
    Vector x = gaussian_matrix(d, 1, seed + 100).col(0);
    Vector expect = m.transpose() * (m * x);
    Vector got = matvec_t(RowMatrix::from_dense(m), matvec(RowMatrix::from_dense(m), x));
    EXPECT_LE((got - expect).norm(), 1e-10 * expect.norm());
  }
}

TEST(RowMatrix, SparseAndDenseStorageAgree) {
  DenseMatrix m = DenseMatrix::Zero(6, 5);
  m(0, 1) = 2.0;
  m(3, 4) = -1.5;
  m(5, 0) = 0.5;
  RowMatrix auto_pick = RowMatrix::from_dense(m);
  EXPECT_TRUE(auto_pick.is_sparse());
  EXPECT_EQ(auto_pick.nnz(), 3);
  EXPECT_DOUBLE_EQ(auto_pick.frob_sq(), 4.0 + 2.25 + 0.25);
  EXPECT_EQ(auto_pick.to_dense(), m);
  EXPECT_FALSE(RowMatrix::from_dense(gaussian_matrix(4, 4, 1)).is_sparse());
  RowMatrix t = RowMatrix::from_triplets(6, 5, auto_pick.triplets());
  EXPECT_EQ(t.to_dense(), m);
}

TEST(SamplingDist, ProbabilitiesProportionalToRowNorms) {
  DenseMatrix m(3, 2);
  m << 1, 0, 0, 2, 0, 0;
  SamplingDist dist = SamplingDist::by_row_norms(RowMatrix::from_dense(m));
  EXPECT_NEAR(dist.prob(0), 0.2, 1e-15);
  EXPECT_NEAR(dist.prob(1), 0.8, 1e-15);
  EXPECT_EQ(dist.prob(2), 0.0);
  Rng rng = make_stream(1, 1);
  int hits = 0;
  for (int i = 0; i < 20000; ++i) {
    Index k = dist.draw(rng);
    ASSERT_NE(k, 2);
    hits += k == 1;
  }
  EXPECT_NEAR(hits / 20000.0, 0.8, 0.02);
}

TEST(SamplingDist, SumsToOne) {
  RowMatrix a = RowMatrix::from_dense(gaussian_matrix(200, 7, 4));
  SamplingDist dist = SamplingDist::by_row_norms(a);
  double s = 0.0;
  for (Index i = 0; i < dist.size(); ++i) s += dist.prob(i);
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(PowerMethod, DiagonalTopFourRescalesIntoHalfOne) {
  DenseMatrix m = DenseMatrix::Zero(3, 3);
  m.diagonal() << 2.0, 1.0, 0.5;  // λ₁ = 4
  NormalizedProblem p = normalize_spectrum(RowMatrix::from_dense(m), 0.5, Vector::Ones(3), false, 7);
  double rescaled = top_eig(p.a.to_dense());
  EXPECT_GE(rescaled, 0.5);
  EXPECT_LE(rescaled, 1.0);
  EXPECT_NEAR(p.lambda, 0.5 / p.scale, 1e-15);
  EXPECT_EQ(p.rhs, Vector::Ones(3));
}

TEST(PowerMethod, UnitTopEigenvalueScaleWithinOneTwo) {
  DenseMatrix m = DenseMatrix::Zero(4, 3);
  m.diagonal() << 1.0, 0.6, 0.2;
  NormalizedProblem p = normalize_spectrum(RowMatrix::from_dense(m), 0.5, Vector::Ones(4), true, 1);
  EXPECT_GE(p.scale, 1.0);
  EXPECT_LE(p.scale, 2.0);
  EXPECT_NEAR(p.rhs[0], 1.0 / std::sqrt(p.scale), 1e-15);
}

TEST(PowerMethod, ThresholdArithmetic) {
  // Overestimate 2 halves the threshold.
  DenseMatrix m = DenseMatrix::Zero(2, 2);
  m.diagonal() << std::sqrt(1.5), 0.1;  // λ₁ = 1.5, Rayleigh 1.5, inflated to 2
  NormalizedProblem p = normalize_spectrum(RowMatrix::from_dense(m), 0.5, Vector::Ones(2), false, 3);
  EXPECT_NEAR(p.scale, 2.0, 1e-9);
  EXPECT_NEAR(p.lambda, 0.25, 1e-9);
}

TEST(PowerMethod, OverestimateWithinFactorTwo) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng = make_stream(seed, 11);
    Index d = 2 + static_cast<Index>(uniform01(rng) * 48);
    DenseMatrix q = gaussian_matrix(d, d, seed).householderQr().householderQ();
    Vector sv(d);
    for (Index i = 0; i < d; ++i) sv[i] = uniform01(rng);
    sv[0] = 1.2 * sv.maxCoeff() + 0.1;  // λ₁/λ₂ ≥ 1.44
    DenseMatrix m = sv.asDiagonal() * q;
    double truth = top_eig(m);
    PowerEstimate est = estimate_top_eig(RowMatrix::from_dense(m), seed);
    EXPECT_GE(est.overestimate, truth * (1 - 1e-12)) << "seed " << seed;
    EXPECT_LE(est.overestimate, 2.0 * truth) << "seed " << seed;
    EXPECT_EQ(est.iterations, power_iteration_count(d));
  }
}

TEST(PowerMethod, ZeroMatrixIsDegenerate) {
  EXPECT_THROW(normalize_spectrum(RowMatrix::from_dense(DenseMatrix::Zero(3, 2)), 0.5, Vector::Ones(2), false),
               DegenerateInput);
}

TEST(PowerMethod, CostIsDeterministic) {
  RowMatrix a = RowMatrix::from_dense(gaussian_matrix(40, 9, 8));
  CostCounter c1, c2;
  PowerEstimate e1 = estimate_top_eig(a, 5, &c1);
  PowerEstimate e2 = estimate_top_eig(a, 5, &c2);
  EXPECT_EQ(c1.vec_products, c2.vec_products);
  EXPECT_EQ(e1.rayleigh, e2.rayleigh);
}

TEST(Trace, RejectsDecreasingCost) {
  ConvergenceTrace t;
  t.record(10, 0.5, 0, 0);
  t.record(10, 0.4, 0, 1);
  EXPECT_EQ(t.points.size(), 1u);
  EXPECT_EQ(t.points.back().rel_error, 0.4);
  t.record(12, 0.3, 0, 2);
  EXPECT_THROW(t.record(11, 0.2, 0, 3), ContractViolation);
}

TEST(Trace, WallTimeCanBeSuppressed) {
  ConvergenceTrace t;
  t.record_wall_time = false;
  t.record(1, 0.5, 12345, 0);
  EXPECT_EQ(t.points.back().wall_ns, 0);
}

TEST(Io, MatrixMarketDiagonal) {
  std::string path = temp_path("diag.mtx");
  std::ofstream(path) << "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 1.0\n2 2 2.0\n";
  RowMatrix a = load_matrix(path);
  EXPECT_EQ(a.rows(), 2);
  EXPECT_EQ(a.cols(), 2);
  EXPECT_DOUBLE_EQ(a.frob_sq(), 5.0);
  EXPECT_EQ(a.to_dense()(1, 1), 2.0);
  std::remove(path.c_str());
}

TEST(Io, EmptyFileIsFormatError) {
  std::string path = temp_path("empty.csv");
  std::ofstream(path).close();
  EXPECT_THROW(load_matrix(path), FormatError);
  EXPECT_THROW(load_vector(path), FormatError);
  std::remove(path.c_str());
}

TEST(Io, MissingFileIsFormatError) { EXPECT_THROW(load_matrix(temp_path("does_not_exist.csv")), FormatError); }

TEST(Io, MalformedEntriesAreFormatErrors) {
  std::string path = temp_path("bad.csv");
  std::ofstream(path) << "1,2\n3\n";
  EXPECT_THROW(load_matrix(path), FormatError);
  std::ofstream(path) << "1,abc\n";
  EXPECT_THROW(load_matrix(path), FormatError);
  std::ofstream(path) << "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
  EXPECT_THROW(load_matrix(path), FormatError);
  std::remove(path.c_str());
}

TEST(Io, CsvRoundTripIsBitwise) {
  DenseMatrix m = gaussian_matrix(10, 5, 21);
  std::string path = temp_path("round.csv");
  save_matrix_csv(RowMatrix::from_dense(m), path);
  EXPECT_EQ(load_matrix(path).to_dense(), m);
  save_matrix_market(RowMatrix::from_dense(m), path);
  EXPECT_EQ(load_matrix(path).to_dense(), m);
  Vector v = m.col(2);
  save_vector(v, path);
  EXPECT_EQ(load_vector(path), v);
  std::remove(path.c_str());
}

TEST(Io, TraceHeaderAndRows) {
  ConvergenceTrace t;
  t.method = "m";
  t.seed = 3;
  t.record(5, 0.25, 0, 1);
  std::string path = temp_path("trace.csv");
  save_trace(t, path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, kTraceHeader);
  EXPECT_EQ(row, "m,3,1,5,0.25,0");
  std::remove(path.c_str());
}
