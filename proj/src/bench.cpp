#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ratpcp/bench.hpp"
#include "ratpcp/io.hpp"
#include "ratpcp/random.hpp"

namespace ratpcp {

const std::vector<std::string> kBenchMethods{"rational", "rational-accelerated", "chebyshev",
                                             "polynomial", "agd",                  "direct-svrg"};

namespace {

constexpr double kBenchDelta = 0.05;

// The polynomial baseline is the erf construction at an a-priori degree, not
// the original truncated series, so its output says so.
std::string output_label(const std::string& method) {
  return method == "polynomial" ? "polynomial-proxy" : method;
}

std::string eps_tag(double eps) {
  std::ostringstream os;
  os << eps;
  return os.str();
}

// First checkpoint cost at which the error is within eps; infinity if never.
double cost_to_reach(const ConvergenceTrace& trace, double eps) {
  for (const auto& p : trace.points) {
    if (p.rel_error <= eps) return static_cast<double>(p.vec_products);
  }
  return std::numeric_limits<double>::infinity();
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::size_t m = xs.size();
  return m % 2 ? xs[m / 2] : 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
}

struct SeedInstance {
  SyntheticInstance inst;
  Vector reference;
  double reference_norm;
};

BenchCell run_cell(const BenchPlan& plan, const SeedInstance& si, const std::string& method, std::uint64_t seed,
                   double eps, std::int64_t budget) {
  BenchCell cell;
  cell.method = method;
  cell.seed = seed;
  cell.eps = eps;
  cell.trace.method = output_label(method) + "/eps=" + eps_tag(eps);
  cell.trace.seed = seed;
  cell.trace.record_wall_time = plan.record_wall_time;

  auto probe = [&](const Vector& out) { return (out - si.reference).norm() / si.reference_norm; };
  CostCounter cost;
  const std::uint64_t run_seed = child_seed(seed, 0x62656e63ULL);
  try {
    NormalizedProblem np =
        normalize_spectrum(si.inst.a, plan.instance.lambda, si.inst.v, false, child_seed(run_seed, 0), &cost);
    const double gamma = plan.instance.gamma;
    Vector out;
    if (method == "chebyshev" || method == "polynomial") {
      BaselineOptions bo;
      bo.seed = child_seed(run_seed, 1);
      bo.cost = &cost;
      bo.trace = &cell.trace;
      bo.error_probe = probe;
      out = method == "chebyshev" ? chebyshev_sign_baseline(np.a, np.lambda, gamma, eps, np.rhs, bo)
                                  : polynomial_sign_baseline(np.a, np.lambda, gamma, eps, np.rhs, bo);
    } else {
      PcpOptions po;
      po.seed = child_seed(run_seed, 1);
      po.cost = &cost;
      po.trace = &cell.trace;
      po.error_probe = probe;
      if (method == "rational") {
        po.backend = SquaredBackend::plain;
      } else if (method == "rational-accelerated") {
        po.backend = SquaredBackend::accelerated;
      } else if (method == "agd") {
        po.backend = SquaredBackend::agd;
        po.max_vec_products = budget;
      } else if (method == "direct-svrg") {
        po.backend = SquaredBackend::direct_svrg;
        po.max_vec_products = budget;
      } else {
        throw ContractViolation("unknown bench method '" + method + "'");
      }
      PcpReport rep;
      out = ispcp(np.a, np.rhs, np.lambda, gamma, eps, kBenchDelta, po, &rep);
      if (rep.budget_exhausted) {
        cell.failed = true;
        cell.failure = "vector-product budget exhausted";
      }
    }
    cell.final_error = probe(out);
  } catch (const Error& e) {
    cell.failed = true;
    cell.failure = e.what();
    cell.final_error = std::numeric_limits<double>::quiet_NaN();
  }
  cell.vec_products = cost.vec_products;
  return cell;
}

void write_outputs(const BenchPlan& plan, const BenchResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(plan.out_dir);
  std::map<std::pair<std::string, std::uint64_t>, std::vector<const BenchCell*>> files;
  for (const auto& c : result.cells) files[{c.method, c.seed}].push_back(&c);
  for (const auto& [key, cells] : files) {
    std::string name = "trace_" + output_label(key.first) + "_" + std::to_string(key.second) + ".csv";
    fs::path path = fs::path(plan.out_dir) / name;
    std::ofstream out(path);
    if (!out) throw FormatError(path.string() + ": cannot write file");
    out << kTraceHeader << '\n';
    for (const BenchCell* c : cells) {
      for (const auto& p : c->trace.points) {
        out << c->trace.method << ',' << c->seed << ',' << p.epoch << ',' << p.vec_products << ','
            << format_double(p.rel_error) << ',' << p.wall_ns << '\n';
      }
    }
  }
  fs::path path = fs::path(plan.out_dir) / "summary.csv";
  std::ofstream out(path);
  if (!out) throw FormatError(path.string() + ": cannot write file");
  out << "method,eps,median_vec_products,reached,runs\n";
  for (const auto& row : result.summary) {
    out << output_label(row.method) << ',' << format_double(row.eps) << ','
        << format_double(row.median_vec_products) << ','
        << row.reached << ',' << row.runs << '\n';
  }
  std::ofstream fails(fs::path(plan.out_dir) / "failures.csv");
  fails << "method,seed,eps,failure\n";
  for (const auto& c : result.cells) {
    if (!c.failed) continue;
    fails << output_label(c.method) << ',' << c.seed << ',' << format_double(c.eps) << ",\"" << c.failure << "\"\n";
  }
}

}  // namespace

BenchResult run_bench(const BenchPlan& plan) {
  require(!plan.methods.empty(), "bench: no methods");
  require(!plan.eps_grid.empty(), "bench: empty eps grid");
  require(!plan.seeds.empty(), "bench: no seeds");
  for (const auto& m : plan.methods) {
    require(std::find(kBenchMethods.begin(), kBenchMethods.end(), m) != kBenchMethods.end(),
            "bench: unknown method '" + m + "'");
  }
  for (double e : plan.eps_grid) require(e > 0.0 && e < 1.0, "bench: eps must lie in (0,1)");
  const bool budgeted = std::any_of(plan.methods.begin(), plan.methods.end(),
                                    [](const std::string& m) { return m == "agd" || m == "direct-svrg"; });

  BenchResult result;
  for (std::uint64_t seed : plan.seeds) {
    SyntheticSpec spec = plan.instance;
    spec.seed = seed;
    SeedInstance si{generate_synthetic(spec), {}, 0.0};
    si.reference = si.inst.spectrum.project(si.inst.v, plan.instance.lambda);
    si.reference_norm = si.reference.norm();
    if (si.reference_norm == 0.0) throw DegenerateInput("bench: reference projection is zero");

    for (double eps : plan.eps_grid) {
      // Budgeted baselines get a multiple of what the plain rational method spent.
      std::int64_t budget = 0;
      std::vector<BenchCell> here;
      if (budgeted) {
        BenchCell ref = run_cell(plan, si, "rational", seed, eps, 0);
        budget = static_cast<std::int64_t>(plan.budget_multiple * static_cast<double>(ref.vec_products));
        if (std::find(plan.methods.begin(), plan.methods.end(), "rational") != plan.methods.end()) {
          here.push_back(std::move(ref));
        }
      }
      for (const auto& m : plan.methods) {
        if (budgeted && m == "rational") continue;
        here.push_back(run_cell(plan, si, m, seed, eps, budget));
      }
      for (auto& c : here) result.cells.push_back(std::move(c));
    }
  }
  // Keep cells in plan order: method, then seed, then eps.
  std::stable_sort(result.cells.begin(), result.cells.end(), [&](const BenchCell& x, const BenchCell& y) {
    auto rank = [&](const std::string& m) {
      return std::find(plan.methods.begin(), plan.methods.end(), m) - plan.methods.begin();
    };
    if (rank(x.method) != rank(y.method)) return rank(x.method) < rank(y.method);
    if (x.seed != y.seed) return x.seed < y.seed;
    return false;
  });

  for (const auto& m : plan.methods) {
    for (double eps : plan.eps_grid) {
      BenchSummaryRow row;
      row.method = m;
      row.eps = eps;
      std::vector<double> costs;
      for (const auto& c : result.cells) {
        if (c.method != m || c.eps != eps) continue;
        double reach = cost_to_reach(c.trace, eps);
        costs.push_back(reach);
        if (std::isfinite(reach)) ++row.reached;
      }
      row.runs = static_cast<int>(costs.size());
      row.median_vec_products =
          2 * row.reached >= row.runs && row.runs > 0 ? median(costs) : std::numeric_limits<double>::quiet_NaN();
      result.summary.push_back(row);
    }
  }
  if (!plan.out_dir.empty()) write_outputs(plan, result);
  return result;
}

}  // namespace ratpcp
