#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "ratpcp/asvrg.hpp"

using namespace ratpcp;

namespace {

DenseMatrix gaussian_matrix(Index n, Index d, std::uint64_t seed) {
  Rng rng = make_stream(seed, 7);
  DenseMatrix m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = gaussian(rng);
  return m;
}

Vector gaussian_vector(Index d, std::uint64_t seed) {
  Rng rng = make_stream(seed, 8);
  Vector v(d);
  for (Index j = 0; j < d; ++j) v(j) = gaussian(rng);
  return v;
}

// Random A rescaled so the top eigenvalue of AᵀA is 1.
DenseMatrix unit_top(Index n, Index d, std::uint64_t seed) {
  DenseMatrix a = gaussian_matrix(n, d, seed);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a.transpose() * a);
  return a / std::sqrt(es.eigenvalues().maxCoeff());
}

// The block operator written out densely.
DenseMatrix dense_block(const DenseMatrix& a, double c, double mu, double tau = 0.0) {
  const Index d = a.cols();
  DenseMatrix s = (a.transpose() * a - c * DenseMatrix::Identity(d, d)) / mu;
  DenseMatrix m = DenseMatrix::Identity(2 * d, 2 * d) * (1.0 + tau);
  m.topRightCorner(d, d) = -s;
  m.bottomLeftCorner(d, d) = s;
  return m;
}

DenseMatrix component_matrix(const AsymmetricSystem& sys, Index i) {
  DenseMatrix out(sys.dim(), sys.dim());
  for (Index j = 0; j < sys.dim(); ++j) out.col(j) = sys.apply_component(i, Vector::Unit(sys.dim(), j));
  return out;
}

double spectral_norm(const DenseMatrix& m) {
  Eigen::JacobiSVD<DenseMatrix> svd(m);
  return svd.singularValues()(0);
}

struct Instance {
  DenseMatrix dense;
  RowMatrix a;
  double c;
  double mu;
  Vector v;
};

Instance small_instance(std::uint64_t seed, Index n = 50, Index d = 10, double c = 0.4, double mu = 0.5) {
  Instance in{unit_top(n, d, seed), {}, c, mu, gaussian_vector(d, seed)};
  in.a = RowMatrix::from_dense(in.dense);
  return in;
}

// M = Σ M_i given by explicit dense components, sampled with p_i ∝ ‖M_i‖.
struct DenseComponents {
  std::vector<DenseMatrix> parts;
  DenseMatrix total;
  std::vector<double> norms;
  double norm_sum = 0.0;
  SamplingDist dist;

  explicit DenseComponents(std::vector<DenseMatrix> ps) : parts(std::move(ps)) {
    total = DenseMatrix::Zero(parts[0].rows(), parts[0].cols());
    for (const auto& p : parts) {
      total += p;
      norms.push_back(spectral_norm(p));
      norm_sum += norms.back();
    }
    dist = SamplingDist(norms);
  }
  double prob(std::size_t i) const { return norms[i] / norm_sum; }

  Index dim() const { return total.rows(); }
  Index num_components() const { return static_cast<Index>(parts.size()); }
  Vector apply(const Vector& z, CostCounter* = nullptr) const { return total * z; }
  double strong_convexity() const {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (total + total.transpose()));
    return es.eigenvalues().minCoeff();
  }
  double variance_bound() const { return norm_sum * norm_sum; }
  Index draw(Rng& rng) const { return dist.draw(rng); }
  std::int64_t step(Index i, double* delta, double eta, const double* g0) const {
    Eigen::Map<Vector> d(delta, dim());
    Eigen::Map<const Vector> g(g0, dim());
    Vector upd = parts[static_cast<std::size_t>(i)] * d / prob(static_cast<std::size_t>(i)) + g;
    d -= eta * upd;
    return 1;
  }
};

}  // namespace

TEST(BlockOperator, MatchesDenseForm) {
  Instance in = small_instance(1, 30, 8);
  AsymmetricSystem sys(in.a, in.c, in.mu, Vector::Zero(16));
  Vector z = gaussian_vector(16, 2);
  EXPECT_LT((sys.apply(z) - dense_block(in.dense, in.c, in.mu) * z).norm(), 1e-12 * z.norm());
  AsymmetricSystem shifted = sys.shifted(0.7, Vector::Zero(16));
  EXPECT_LT((shifted.apply(z) - dense_block(in.dense, in.c, in.mu, 0.7) * z).norm(), 1e-12 * z.norm());
}

TEST(BlockOperator, SymmetricPartIsIdentity) {
  Instance in = small_instance(3, 40, 12, 0.9, 0.05);
  AsymmetricSystem sys(in.a, in.c, in.mu, Vector::Zero(24));
  for (std::uint64_t s = 0; s < 10; ++s) {
    Vector z = gaussian_vector(24, 100 + s);
    EXPECT_NEAR(z.dot(sys.apply(z)), z.squaredNorm(), 1e-10 * z.squaredNorm());
  }
}

TEST(BlockOperator, ZeroMatrixWithZeroShiftIsIdentity) {
  RowMatrix a = RowMatrix::from_dense(DenseMatrix::Zero(4, 3));
  AsymmetricSystem sys(a, 0.0, 0.3, Vector::Zero(6));
  Vector z = gaussian_vector(6, 5);
  EXPECT_LT((sys.apply(z) - z).norm(), 1e-15);
  EXPECT_THROW(asysvrg_solve(sys, Vector::Zero(6), 1e-3, 0.1), DegenerateInput);
}

TEST(BlockOperator, ScalarClosedForm) {
  const double a = 1.3, c = 0.5, mu = 0.3;
  DenseMatrix m(1, 1);
  m << a;
  RowMatrix rm = RowMatrix::from_dense(m);
  AsymmetricSystem sys(rm, c, mu, Vector::Zero(2));
  const double s = (a * a - c) / mu;
  Vector z(2);
  z << 0.7, -1.1;
  Vector expected(2);
  expected << z(0) - s * z(1), s * z(0) + z(1);
  EXPECT_LT((sys.apply(z) - expected).norm(), 1e-14);
}

TEST(BlockOperator, ComponentsSumToOperator) {
  Instance in = small_instance(4, 25, 20);
  AsymmetricSystem sys(in.a, in.c, in.mu, Vector::Zero(40));
  Vector z = gaussian_vector(40, 6);
  Vector sum = Vector::Zero(40);
  for (Index i = 0; i < in.a.rows(); ++i) sum += sys.apply_component(i, z);
  EXPECT_LT((sum - sys.apply(z)).norm(), 1e-10 * z.norm());
}

TEST(BlockOperator, ZeroRowAndSingleRow) {
  DenseMatrix m = gaussian_matrix(3, 4, 9);
  m.row(1).setZero();
  RowMatrix rm = RowMatrix::from_dense(m);
  AsymmetricSystem sys(rm, 0.2, 0.5, Vector::Zero(8));
  Vector z = gaussian_vector(8, 10);
  EXPECT_EQ(sys.apply_component(1, z).norm(), 0.0);
  EXPECT_THROW(sys.apply_component(3, z), ContractViolation);

  RowMatrix one = RowMatrix::from_dense(gaussian_matrix(1, 4, 11));
  AsymmetricSystem single(one, 0.2, 0.5, Vector::Zero(8));
  EXPECT_LT((single.apply_component(0, z) - single.apply(z)).norm(), 1e-12 * z.norm());
}

TEST(BlockOperator, ChargesCost) {
  Instance in = small_instance(5, 20, 5);
  AsymmetricSystem sys(in.a, in.c, in.mu, Vector::Zero(10));
  CostCounter cost;
  sys.apply_component(0, Vector::Ones(10), &cost);
  EXPECT_EQ(cost.vec_products, 4);
  std::int64_t before = cost.vec_products;
  sys.apply(Vector::Ones(10), &cost);
  EXPECT_GT(cost.vec_products - before, 4);
}

TEST(Variance, SampledFormMatchesClosedForm) {
  for (std::uint64_t seed : {1, 2, 3}) {
    Instance in = small_instance(seed, 30, 15, 0.3, 0.2);
    AsymmetricSystem sys(in.a, in.c, in.mu, Vector::Zero(30));
    const Index d = 15;
    const DenseMatrix g = in.dense.transpose() * in.dense;
    const double frob = in.a.frob_sq();
    DenseMatrix block = DenseMatrix::Identity(d, d) +
                        (frob * g - 2.0 * in.c * g + in.c * in.c * DenseMatrix::Identity(d, d)) / (in.mu * in.mu);
    Vector delta = gaussian_vector(2 * d, seed + 50);
    double sampled = 0.0;
    for (Index i = 0; i < in.a.rows(); ++i) {
      sampled += sys.apply_component(i, delta).squaredNorm() / sys.sampling().prob(i);
    }
    double exact = delta.head(d).dot(block * delta.head(d)) + delta.tail(d).dot(block * delta.tail(d));
    EXPECT_NEAR(sampled, exact, 1e-8 * exact);
    EXPECT_LE(sampled, sys.variance_bound() * delta.squaredNorm() * (1.0 + 1e-12));
  }
}

TEST(Variance, GeneralDecompositionBound) {
  const Index dim = 10;
  Rng rng = make_stream(21, 0);
  std::vector<DenseMatrix> parts;
  DenseMatrix skew = gaussian_matrix(dim, dim, 22);
  skew = 0.5 * (skew - skew.transpose().eval());
  for (int i = 0; i < 6; ++i) parts.push_back(gaussian_matrix(dim, dim, 30 + i) * 0.1);
  DenseMatrix rest = DenseMatrix::Identity(dim, dim) * 2.0 + skew;
  for (const auto& p : parts) rest -= p;
  parts.push_back(rest);
  DenseComponents op(parts);

  Vector zstar = gaussian_vector(dim, 40);
  for (int trial = 0; trial < 20; ++trial) {
    Vector zt = zstar + gaussian_vector(dim, 100 + trial);
    Vector z0 = zstar + gaussian_vector(dim, 200 + trial);
    double variance = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      Vector est = parts[i] * (zt - z0) / op.prob(i) + op.total * (z0 - zstar);
      variance += op.prob(i) * est.squaredNorm();
    }
    double bound = 2.0 * op.norm_sum * op.norm_sum * ((zt - zstar).squaredNorm() + (z0 - zstar).squaredNorm());
    EXPECT_LE(variance, bound);
  }

  // The generic solver converges on this decomposition too.
  Vector rhs = op.total * zstar;
  SvrgOptions o;
  o.seed = 3;
  SvrgResult r = svrg_solve(op, rhs, Vector::Zero(dim), 1e-4, 0.1, o);
  EXPECT_TRUE(r.certified);
  EXPECT_LT((r.z - zstar).norm(), 1e-4);
}

TEST(PsdProperties, ResolventNorms) {
  for (std::uint64_t seed : {1, 2}) {
    Instance in = small_instance(seed, 20, 10, 0.6, 0.1);
    DenseMatrix m = dense_block(in.dense, in.c, in.mu);
    DenseMatrix id = DenseMatrix::Identity(20, 20);
    EXPECT_LE(spectral_norm((id + m).inverse()), 1.0 / std::sqrt(3.0) + 1e-12);
    DenseMatrix minv = m.inverse();
    for (double tau : {0.0, 0.5, 3.0}) EXPECT_LE(spectral_norm((tau * minv + id).inverse()), 1.0 + 1e-12);
  }
}

TEST(Schedule, ProofAndTextConventions) {
  SvrgOptions o;
  SvrgSchedule proof = make_schedule(50.0, 1.0, o);
  EXPECT_DOUBLE_EQ(proof.eta, 1.0 / 200.0);
  EXPECT_EQ(proof.epoch_length, 400);
  double product = proof.eta * static_cast<double>(proof.epoch_length);
  EXPECT_GE(product, 0.25);
  EXPECT_LE(product, 4.0);
  o.convention = StepConvention::algorithm_text;
  EXPECT_EQ(make_schedule(50.0, 1.0, o).epoch_length, 50);
  o.eta = 0.01;
  o.epoch_length = 7;
  SvrgSchedule forced = make_schedule(50.0, 1.0, o);
  EXPECT_EQ(forced.eta, 0.01);
  EXPECT_EQ(forced.epoch_length, 7);
  EXPECT_THROW(make_schedule(0.0, 1.0, {}), ContractViolation);
}

TEST(Schedule, EpochBudget) {
  EXPECT_EQ(epoch_budget(1e-4, 1.0, 1e-3, 0.1), 0);
  // (1/1e-2)² / 0.1 = 1e5; log_{3/2} 1e5 = 28.4
  EXPECT_EQ(epoch_budget(1.0, 1.0, 1e-2, 0.1), 29);
}

TEST(Svrg, StationaryAtSolution) {
  Instance in = small_instance(7, 30, 8);
  AsymmetricSystem sys = AsymmetricSystem::for_squared(in.a, in.c, in.mu, in.v);
  Vector zstar = dense_block(in.dense, in.c, in.mu).partialPivLu().solve(sys.rhs());
  SvrgSchedule sch = make_schedule(sys.variance_bound(), 1.0, {});
  Rng rng = make_stream(1, 1);
  Vector out = svrg_epoch(sys, zstar, Vector::Zero(16), sch.eta, 500, rng, nullptr);
  EXPECT_EQ(out, zstar);
  Vector g0 = sys.apply(zstar) - sys.rhs();
  Rng rng2 = make_stream(1, 1);
  Vector out2 = svrg_epoch(sys, zstar, g0, sch.eta, 500, rng2, nullptr);
  EXPECT_LT((out2 - zstar).norm(), 1e-10 * zstar.norm());
}

TEST(Svrg, ScalarSystem) {
  const double a = 1.0, c = 0.5, mu = 0.3, v = 0.8;
  DenseMatrix m(1, 1);
  m << a;
  RowMatrix rm = RowMatrix::from_dense(m);
  Vector vv(1);
  vv << v;
  AsymmetricSystem sys = AsymmetricSystem::for_squared(rm, c, mu, vv);
  // [[1, −s], [s, 1]] z = (0, v/μ²)
  const double s = (a * a - c) / mu, r = v / (mu * mu);
  Vector expected(2);
  expected << s * r / (1.0 + s * s), r / (1.0 + s * s);
  const double eps_abs = 1e-6;
  SvrgResult res = asysvrg_solve(sys, Vector::Zero(2), eps_abs, 0.1);
  EXPECT_TRUE(res.certified);
  EXPECT_LT((res.z - expected).norm(), eps_abs);
  // The y-block is the squared ridge solution.
  EXPECT_NEAR(expected(1), v / ((a * a - c) * (a * a - c) + mu * mu), 1e-12);
}

TEST(Svrg, MatchesDenseSolve) {
  Instance in = small_instance(8);
  AsymmetricSystem sys = AsymmetricSystem::for_squared(in.a, in.c, in.mu, in.v);
  Vector zstar = dense_block(in.dense, in.c, in.mu).partialPivLu().solve(sys.rhs());
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SvrgOptions o;
    o.seed = seed;
    SvrgResult r = asysvrg_solve(sys, Vector::Zero(20), 1e-5, 0.1, o);
    if ((r.z - zstar).norm() <= 1e-5) ++ok;
  }
  EXPECT_GE(ok, 18);
}

TEST(Svrg, EpochContraction) {
  Instance in = small_instance(9);
  AsymmetricSystem sys = AsymmetricSystem::for_squared(in.a, in.c, in.mu, in.v);
  Vector zstar = dense_block(in.dense, in.c, in.mu).partialPivLu().solve(sys.rhs());
  const double start = zstar.squaredNorm();
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SvrgOptions o;
    o.seed = seed;
    o.max_epochs = 1;
    o.certify_within_epoch = false;
    SvrgResult r = asysvrg_solve(sys, Vector::Zero(20), 1e-12, 0.1, o);
    EXPECT_EQ(r.epochs, 1);
    mean += (r.z - zstar).squaredNorm() / 100.0;
  }
  EXPECT_LE(mean, (2.0 / 3.0) * start);
}

TEST(Svrg, SameSeedSameIterates) {
  Instance in = small_instance(10);
  AsymmetricSystem sys = AsymmetricSystem::for_squared(in.a, in.c, in.mu, in.v);
  SvrgOptions o;
  o.seed = 77;
  SvrgResult r1 = asysvrg_solve(sys, Vector::Zero(20), 1e-6, 0.1, o);
  SvrgResult r2 = asysvrg_solve(sys, Vector::Zero(20), 1e-6, 0.1, o);
  EXPECT_EQ(r1.z, r2.z);
  EXPECT_EQ(r1.steps, r2.steps);
  o.seed = 78;
  SvrgResult r3 = asysvrg_solve(sys, Vector::Zero(20), 1e-6, 0.1, o);
  EXPECT_NE(r1.z, r3.z);
}

TEST(Svrg, BudgetStopsEarly) {
  Instance in = small_instance(11, 50, 10, 0.4, 0.05);
  AsymmetricSystem sys = AsymmetricSystem::for_squared(in.a, in.c, in.mu, in.v);
  CostCounter cost;
  SvrgOptions o;
  o.cost = &cost;
  o.max_vec_products = 5000;
  o.checkpoint_interval = 100;
  SvrgResult r = asysvrg_solve(sys, Vector::Zero(20), 1e-12, 0.1, o);
  EXPECT_TRUE(r.budget_exhausted);
  EXPECT_FALSE(r.certified);
  EXPECT_LT(cost.vec_products, 5000 + 1000);
}

TEST(Svrg, TraceCountsIncrease) {
  Instance in = small_instance(12);
  AsymmetricSystem sys = AsymmetricSystem::for_squared(in.a, in.c, in.mu, in.v);
  CostCounter cost;
  ConvergenceTrace trace;
  SvrgOptions o;
  o.cost = &cost;
  o.trace = &trace;
  o.checkpoint_interval = 50;
  o.error_probe = [](const Vector& z) { return z.norm(); };
  asysvrg_solve(sys, Vector::Zero(20), 1e-6, 0.1, o);
  ASSERT_GT(trace.points.size(), 3u);
  for (std::size_t i = 1; i < trace.points.size(); ++i) {
    EXPECT_GT(trace.points[i].vec_products, trace.points[i - 1].vec_products);
  }
}

TEST(Accelerated, ZeroShiftIsPlainSolve) {
  Instance in = small_instance(13);
  AsymmetricSystem sys = AsymmetricSystem::for_squared(in.a, in.c, in.mu, in.v);
  SvrgOptions o;
  o.seed = 5;
  AccelOptions acc;
  acc.tau = 0.0;
  SvrgResult plain = asysvrg_solve(sys, Vector::Zero(20), 1e-6, 0.1, o);
  SvrgResult shifted = asyacc_solve(sys, Vector::Zero(20), 1e-6, 0.1, o, acc);
  EXPECT_EQ(plain.z, shifted.z);
}

TEST(Accelerated, AgreesWithPlain) {
  Instance in = small_instance(14);
  AsymmetricSystem sys = AsymmetricSystem::for_squared(in.a, in.c, in.mu, in.v);
  Vector zstar = dense_block(in.dense, in.c, in.mu).partialPivLu().solve(sys.rhs());
  const double eps_abs = 1e-5;
  SvrgOptions o;
  o.seed = 6;
  AccelOptions acc;
  acc.tau = 2.0;
  SvrgResult plain = asysvrg_solve(sys, Vector::Zero(20), eps_abs, 0.1, o);
  SvrgResult fast = asyacc_solve(sys, Vector::Zero(20), eps_abs, 0.1, o, acc);
  EXPECT_LT((plain.z - zstar).norm(), 2.0 * eps_abs);
  EXPECT_LT((fast.z - zstar).norm(), 2.0 * eps_abs);
  EXPECT_LT((plain.z - fast.z).norm(), 2.0 * eps_abs);
}

TEST(Accelerated, OuterStepContraction) {
  Instance in = small_instance(15);
  AsymmetricSystem sys = AsymmetricSystem::for_squared(in.a, in.c, in.mu, in.v);
  Vector zstar = dense_block(in.dense, in.c, in.mu).partialPivLu().solve(sys.rhs());
  for (double tau : {0.5, 3.0}) {
    const double factor = 1.0 / (1.0 + 1.0 / (2.0 * tau)) + 1.0 / (2.0 + 4.0 * tau);
    int steps = 0, within = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      double prev = zstar.norm();
      AccelOptions acc;
      acc.tau = tau;
      acc.on_outer_step = [&](int, const Vector& z) {
        double now = (z - zstar).norm();
        ++steps;
        if (now <= factor * prev) ++within;
        prev = now;
      };
      SvrgOptions o;
      o.seed = seed;
      asyacc_solve(sys, Vector::Zero(20), 1e-6, 0.1, o, acc);
    }
    ASSERT_GT(steps, 0);
    EXPECT_GE(within, static_cast<int>(0.9 * steps)) << "tau=" << tau;
  }
}

TEST(Accelerated, ShiftFormula) {
  Instance in = small_instance(16, 40, 10, 0.4, 0.05);
  AsymmetricSystem sys = AsymmetricSystem::for_squared(in.a, in.c, in.mu, in.v);
  double s = std::sqrt(in.a.frob_sq() * sys.top_eig()) / in.mu;
  double expected = std::max(0.0, s * std::sqrt(10.0 / static_cast<double>(in.a.nnz())) - 1.0);
  EXPECT_DOUBLE_EQ(acceleration_tau(sys), expected);
}
