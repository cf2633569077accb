#include <cmath>

#include "ratpcp/pcpcr.hpp"

namespace ratpcp {

namespace {

void check_problem(const RowMatrix& a, double lambda, double gamma, double eps, double delta) {
  require(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0,1) after normalization");
  require(gamma > 0.0 && gamma <= 2.0 / 3.0, "gamma must lie in (0, 2/3]");
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0,1)");
  if (a.frob_sq() == 0.0) throw DegenerateInput("A is zero");
}

// (AᵀA − λI)x
Vector shifted(const RowMatrix& a, double lambda, const Vector& x, CostCounter* cost) {
  Vector out = gram_apply(a, x, cost) - lambda * x;
  charge(cost, 1);
  return out;
}

}  // namespace

double ispcp_inner_tolerance(PcpMode mode, double eps, int k, double gamma, double lambda) {
  if (mode == PcpMode::practical) return eps / (10.0 * k * k);
  double m = std::pow(static_cast<double>(k), 4) / (gamma * gamma * lambda * lambda);
  double value = eps / (8.0 * std::pow(static_cast<double>(k), 3) * std::pow(m, k - 1));
  if (!(value >= 1e-300)) {
    throw CapabilityError("theoretical inner tolerance underflows (" + std::to_string(value) +
                          "); use practical mode");
  }
  return value;
}

bool prefers_acceleration(const RowMatrix& a, double gamma, double lambda) {
  double stable_rank = a.frob_sq() / a.top_eig_estimate();
  double gl = gamma * lambda;
  return static_cast<double>(a.nnz()) <= static_cast<double>(a.cols()) * stable_rank / (gl * gl);
}

Vector ispcp(const RowMatrix& a, const Vector& v, double lambda, double gamma, double eps, double delta,
             const PcpOptions& options, PcpReport* report) {
  require(v.size() == a.cols(), "ispcp: dimension mismatch");
  check_problem(a, lambda, gamma, eps, delta);
  CostCounter* cost = options.cost;
  const double vn = v.norm();
  if (vn == 0.0) return Vector::Zero(a.cols());
  if (options.trace && cost) options.trace->record(*cost, 1.0, 0);

  // |r − sign| ≤ ε on the gap, i.e. an ε/2 projection, leaving ε/2 for solves.
  ZolotarevRational r = build_sign_rational(lambda * gamma, 0.5 * eps);
  const int k = r.degree;
  const double eps1 = ispcp_inner_tolerance(options.mode, eps, k, gamma, lambda);
  bool accelerated = options.backend == SquaredBackend::accelerated ||
                     (options.backend == SquaredBackend::automatic && prefers_acceleration(a, gamma, lambda));
  if (report) {
    *report = {};
    report->degree = k;
    report->eps_inner = eps1;
    report->accelerated = accelerated;
    report->constants_are_stand_ins = options.mode == PcpMode::theoretical;
  }

  Vector w = v;
  for (int i = 0; i < k; ++i) {
    double up = r.coeffs[2 * i + 1];
    double down = r.coeffs[2 * i];
    Vector rhs = shifted(a, lambda, shifted(a, lambda, w, cost), cost) + up * w;
    charge(cost, 1);
    double rn = rhs.norm();
    if (rn == 0.0) {
      w.setZero();
      continue;
    }
    SolveOptions so;
    so.seed = child_seed(options.seed, static_cast<std::uint64_t>(i));
    so.accelerated = accelerated;
    so.convention = options.convention;
    so.cost = cost;
    so.max_vec_products = options.max_vec_products;
    SolveReport rep;
    // Absolute error ε₁‖v‖ per factor; later factors only amplify it by at
    // most max|r| ≤ 1 + attained error.
    const double rel = eps1 * vn / rn;
    switch (options.backend) {
      case SquaredBackend::agd:
        w = agd_squared(a, lambda, down, rhs, rel, so, &rep);
        break;
      case SquaredBackend::direct_svrg:
        w = direct_svrg_squared(a, lambda, down, rhs, rel, delta / k, so, &rep);
        break;
      default:
        w = ridge_square(a, lambda, down, rhs, rel, delta / k, so, &rep);
    }
    if (report) {
      report->solves.push_back(rep);
      report->budget_exhausted = report->budget_exhausted || rep.budget_exhausted;
    }
  }
  Vector out = 0.5 * (v + r.scale * shifted(a, lambda, w, cost));
  charge(cost, 2);
  if (options.trace && cost) {
    options.trace->record(*cost, options.error_probe ? options.error_probe(out) : 0.0, k);
  }
  return out;
}

int ispcr_steps(double eps, double gamma) {
  return std::max(2, static_cast<int>(std::ceil(2.0 * std::log(1.0 / (eps * gamma)))));
}

Vector ispcr(const RowMatrix& a, const Vector& b, double lambda, double gamma, double eps, double delta,
             const PcpOptions& options, PcrReport* report) {
  require(b.size() == a.rows(), "ispcr: dimension mismatch");
  check_problem(a, lambda, gamma, eps, delta);
  CostCounter* cost = options.cost;
  if (b.norm() == 0.0) return Vector::Zero(a.cols());
  const int k = ispcr_steps(eps, gamma);
  const double eps1 = gamma * eps / (10.0 * k * k);
  const double eps2 = eps / (10.0 * k * k);
  if (options.trace && cost) options.trace->record(*cost, 1.0, 0);

  PcpOptions pcp_opts = options;
  pcp_opts.trace = nullptr;
  pcp_opts.seed = child_seed(options.seed, 0);
  PcpReport pcp_rep;
  Vector atb = matvec_t(a, b, cost);
  Vector x = ispcp(a, atb, lambda, gamma, eps1, 0.5 * delta, pcp_opts, &pcp_rep);

  const double ridge_delta = 0.5 * delta / (k - 1);
  SolveOptions so;
  so.convention = options.convention;
  so.cost = cost;
  so.seed = child_seed(options.seed, 1);
  Vector x0 = ridge_reg(a, lambda, x, eps2, ridge_delta, so);
  x = x0;
  for (int m = 1; m < k; ++m) {
    so.seed = child_seed(options.seed, static_cast<std::uint64_t>(m) + 1);
    x = lambda * ridge_reg(a, lambda, x, eps2, ridge_delta, so) + x0;
    charge(cost, 1);
  }
  if (report) {
    report->steps = k;
    report->eps_pcp = eps1;
    report->eps_ridge = eps2;
    report->pcp = pcp_rep;
  }
  if (options.trace && cost) {
    options.trace->record(*cost, options.error_probe ? options.error_probe(x) : 0.0, k);
  }
  return x;
}

}  // namespace ratpcp
