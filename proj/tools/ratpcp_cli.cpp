#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "ratpcp/bench.hpp"
#include "ratpcp/io.hpp"
#include "ratpcp/rational.hpp"
#include "ratpcp/solvers.hpp"

using namespace ratpcp;

namespace {

void emit_vector(const Vector& x, const std::string& path) {
  if (!path.empty()) {
    save_vector(x, path);
    return;
  }
  for (double v : x) std::cout << format_double(v) << '\n';
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ContractViolation("bad number '" + item + "' in list");
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

// "3", "0..9" or "1,4,7".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      std::uint64_t lo = std::stoull(text.substr(0, dots)), hi = std::stoull(text.substr(dots + 2));
      require(lo <= hi, "seed range must be ascending");
      for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      for (const auto& s : split(text)) out.push_back(std::stoull(s));
    }
  } catch (const std::logic_error&) {
    throw ContractViolation("bad seed list '" + text + "'");
  }
  return out;
}

PcpMode parse_mode(const std::string& m) {
  if (m == "practical") return PcpMode::practical;
  if (m == "theoretical") return PcpMode::theoretical;
  throw ContractViolation("mode must be practical or theoretical");
}

struct SolverArgs {
  std::string matrix, vector, trace, output;
  double c = 0.0, mu = 0.0, eps = 1e-6, delta = 0.1;
  std::uint64_t seed = 0;
  bool accelerated = false;
};

void add_solver_flags(CLI::App* cmd, SolverArgs& s) {
  cmd->add_option("--matrix", s.matrix, "matrix file (.mtx or .csv)")->required();
  cmd->add_option("--vector", s.vector, "right-hand side, single-column CSV")->required();
  cmd->add_option("--c", s.c, "shift");
  cmd->add_option("--mu", s.mu, "regularization / spectral lower bound")->required();
  cmd->add_option("--eps", s.eps, "relative accuracy");
  cmd->add_option("--delta", s.delta, "failure probability");
  cmd->add_option("--seed", s.seed);
  cmd->add_flag("--accelerated", s.accelerated);
  cmd->add_option("--trace", s.trace, "write convergence trace CSV");
  cmd->add_option("--output", s.output, "write the result here instead of stdout");
}

struct ProblemArgs {
  std::string matrix, vector, trace, output, mode = "practical";
  double lambda = 0.5, gamma = 0.05, eps = 1e-3, delta = 0.1;
  std::uint64_t seed = 0;
};

void add_problem_flags(CLI::App* cmd, ProblemArgs& p) {
  cmd->add_option("--matrix", p.matrix)->required();
  cmd->add_option("--vector", p.vector)->required();
  cmd->add_option("--lambda", p.lambda, "threshold on eigenvalues of AᵀA");
  cmd->add_option("--gamma", p.gamma, "relative eigengap");
  cmd->add_option("--eps", p.eps);
  cmd->add_option("--delta", p.delta);
  cmd->add_option("--seed", p.seed);
  cmd->add_option("--mode", p.mode, "practical or theoretical");
  cmd->add_option("--trace", p.trace);
  cmd->add_option("--output", p.output);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rational-approximation PCP/PCR solvers"};
  app.require_subcommand(1);

  double zgamma = 0.1, zeps = 1e-3;
  std::string zkind = "sign";
  bool zjson = false;
  auto* zolo = app.add_subcommand("zolo-coeffs", "print the rational approximation coefficients");
  zolo->add_option("--gamma", zgamma, "gap (sign) or lower end (sqrt)")->required();
  zolo->add_option("--eps", zeps)->required();
  zolo->add_option("--kind", zkind)->check(CLI::IsMember({"sign", "sqrt"}));
  zolo->add_flag("--json", zjson);

  SolverArgs sq, np, sr;
  double sr_upper = 1.0;
  auto* solve_sq = app.add_subcommand("solve-squared", "((AᵀA − cI)² + μ²I)⁻¹v");
  add_solver_flags(solve_sq, sq);
  auto* solve_np = app.add_subcommand("solve-nonpsd", "(AᵀA − cI)⁻¹v given (AᵀA − cI)² ⪰ μ²I");
  add_solver_flags(solve_np, np);
  auto* sqrt_cmd = app.add_subcommand("sqrt-apply", "M^{1/2}v for a symmetric M with μI ⪯ M ⪯ upper·I");
  add_solver_flags(sqrt_cmd, sr);
  sqrt_cmd->add_option("--upper", sr_upper, "upper spectral bound")->required();

  ProblemArgs pcp_args, pcr_args;
  auto* pcp_cmd = app.add_subcommand("pcp", "project v onto the eigenvectors of AᵀA above lambda");
  add_problem_flags(pcp_cmd, pcp_args);
  auto* pcr_cmd = app.add_subcommand("pcr", "least squares restricted to eigenvalues above lambda");
  add_problem_flags(pcr_cmd, pcr_args);

  std::string bcase = "eigengap-skewed", bmethods = "rational,chebyshev", beps = "1e-1,1e-2", bseeds = "0",
              bout;
  BenchPlan plan;
  auto* bench = app.add_subcommand("bench", "synthetic benchmark");
  bench->add_option("--case", bcase);
  bench->add_option("--n", plan.instance.n);
  bench->add_option("--d", plan.instance.d);
  bench->add_option("--lambda", plan.instance.lambda);
  bench->add_option("--gamma", plan.instance.gamma);
  bench->add_option("--methods", bmethods);
  bench->add_option("--eps", beps);
  bench->add_option("--seeds", bseeds, "N, A..B or a comma list");
  bench->add_option("--out", bout)->required();
  bench->add_flag("--wall-time", plan.record_wall_time, "record wall-clock time (breaks byte determinism)");
  bench->add_option("--budget-multiple", plan.budget_multiple);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*zolo) {
      ZolotarevRational r = zkind == "sign" ? build_sign_rational(zgamma, zeps) : build_sqrt_rational(zgamma, zeps);
      nlohmann::json j{{"kind", zkind},   {"k", r.degree},   {"C", r.scale},
                       {"c", r.coeffs},   {"rho", r.rho},    {"predicted_error", r.predicted_error},
                       {"attained_error", r.attained_error}};
      if (zjson) {
        std::cout << j.dump(2) << '\n';
      } else {
        std::cout << "k=" << r.degree << " C=" << format_double(r.scale) << " rho=" << format_double(r.rho)
                  << " predicted_error=" << format_double(r.predicted_error)
                  << " attained_error=" << format_double(r.attained_error) << '\n';
        for (std::size_t i = 0; i < r.coeffs.size(); ++i) {
          std::cout << "c" << i + 1 << '=' << format_double(r.coeffs[i]) << '\n';
        }
      }
      return 0;
    }

    for (auto [cmd, s] : {std::pair{solve_sq, &sq}, std::pair{solve_np, &np}, std::pair{sqrt_cmd, &sr}}) {
      if (!*cmd) continue;
      RowMatrix a = load_matrix(s->matrix);
      Vector v = load_vector(s->vector);
      CostCounter cost;
      ConvergenceTrace trace;
      trace.method = cmd->get_name();
      trace.seed = s->seed;
      SolveOptions so;
      so.seed = s->seed;
      so.accelerated = s->accelerated;
      so.cost = &cost;
      so.trace = s->trace.empty() ? nullptr : &trace;
      Vector x;
      if (cmd == solve_sq) {
        x = ridge_square(a, s->c, s->mu * s->mu, v, s->eps, s->delta, so);
      } else if (cmd == solve_np) {
        x = nonpsd_solve(a, s->c, v, s->mu, s->eps, s->delta, so);
      } else {
        SqrtOptions qo;
        qo.cost = &cost;
        x = sqrt_apply(a.to_dense(), s->mu, sr_upper, v, s->eps, s->delta, qo);
        trace.record(cost, 0.0, 0);
      }
      if (!s->trace.empty()) save_trace(trace, s->trace);
      emit_vector(x, s->output);
      std::cerr << "vec_products=" << cost.vec_products << '\n';
      return 0;
    }

    for (auto [cmd, p] : {std::pair{pcp_cmd, &pcp_args}, std::pair{pcr_cmd, &pcr_args}}) {
      if (!*cmd) continue;
      const bool is_pcr = cmd == pcr_cmd;
      RowMatrix a = load_matrix(p->matrix);
      Vector rhs = load_vector(p->vector);
      CostCounter cost;
      ConvergenceTrace trace;
      trace.method = cmd->get_name();
      trace.seed = p->seed;
      NormalizedProblem prob = normalize_spectrum(a, p->lambda, rhs, is_pcr, p->seed, &cost);
      PcpOptions po;
      po.mode = parse_mode(p->mode);
      po.seed = p->seed;
      po.cost = &cost;
      po.trace = p->trace.empty() ? nullptr : &trace;
      Vector x;
      if (is_pcr) {
        PcrReport rep;
        x = ispcr(prob.a, prob.rhs, prob.lambda, p->gamma, p->eps, p->delta, po, &rep);
        std::cerr << "steps=" << rep.steps << " degree=" << rep.pcp.degree;
      } else {
        PcpReport rep;
        x = ispcp(prob.a, prob.rhs, prob.lambda, p->gamma, p->eps, p->delta, po, &rep);
        std::cerr << "degree=" << rep.degree << " eps_inner=" << format_double(rep.eps_inner);
        if (rep.constants_are_stand_ins) std::cerr << " (unit stand-in constants)";
      }
      std::cerr << " vec_products=" << cost.vec_products << '\n';
      if (!p->trace.empty()) save_trace(trace, p->trace);
      emit_vector(x, p->output);
      return 0;
    }

    if (*bench) {
      plan.instance.eigen_case = parse_case(bcase);
      plan.methods = split(bmethods);
      plan.eps_grid = parse_list(beps);
      plan.seeds = parse_seeds(bseeds);
      plan.out_dir = bout;
      BenchResult res = run_bench(plan);
      std::cout << "method,eps,median_vec_products,reached,runs\n";
      for (const auto& row : res.summary) {
        std::cout << row.method << ',' << format_double(row.eps) << ',' << format_double(row.median_vec_products)
                  << ',' << row.reached << ',' << row.runs << '\n';
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
