#include "splitfeas/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "splitfeas/diagnostics.hpp"
#include "splitfeas/errors.hpp"
#include "splitfeas/problems.hpp"

namespace splitfeas::cli {

using nlohmann::json;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SPLITFEAS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::runtime_error("SPLITFEAS_SEED is not an unsigned integer");
    }
  }
  return 0;
}

// CLI11's vector overload consumes a reversed argument list.
void parse_args(CLI::App& app, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  app.parse(args);
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::stringstream stream(s);
  std::string item;
  while (std::getline(stream, item, delim)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
  std::vector<double> out;
  for (const auto& tok : split(csv, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw std::runtime_error(std::string(what) + ": '" + tok + "' is not a number");
    }
  }
  if (out.empty()) throw std::runtime_error(std::string(what) + ": empty list");
  return out;
}

problems::SetFamily parse_family(const std::string& name, const char* flag) {
  const auto family = problems::family_from_string(name);
  if (!family) {
    throw std::runtime_error(std::string(flag) + ": unknown set family '" + name +
                             "' (ball, box, simplex, sparsity, sphere, finite, union-box)");
  }
  return *family;
}

/// CLI algorithm names; wpadmm comes in two flavors selecting the N mode.
struct AlgorithmChoice {
  AlgorithmId id;
  NMode n_mode = NMode::ProxIdentity;
};

AlgorithmChoice parse_algorithm(const std::string& name) {
  if (name == "wpadmm-prox") return {AlgorithmId::WPADMM_SF4, NMode::ProxIdentity};
  if (name == "wpadmm-lin") return {AlgorithmId::WPADMM_SF4, NMode::Linearized};
  const auto id = algorithm_from_string(name);
  if (!id || *id == AlgorithmId::WPADMM_SF4) {
    throw std::runtime_error(
        "unknown algorithm '" + name +
        "' (padmm-sf1, pg-sf1p, am-sf1p, cq, pg-sf3, wpadmm-prox, wpadmm-lin, cq-multiset)");
  }
  return {*id, NMode::ProxIdentity};
}

std::string cli_algorithm_name(const solvers::SolverConfig& config) {
  if (config.algorithm == AlgorithmId::WPADMM_SF4) {
    return config.n_mode == NMode::Linearized ? "wpadmm-lin" : "wpadmm-prox";
  }
  return std::string(to_string(config.algorithm));
}

Eigen::VectorXd default_start(const objectives::ProblemInstance& problem, std::uint64_t seed) {
  std::mt19937_64 engine(seed ^ 0x5f3759df9e3779b9ull);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd draw(problem.dim_x());
  for (Eigen::Index i = 0; i < draw.size(); ++i) draw[i] = normal(engine);
  return sets::project(problem.set_c, draw);
}

std::string format_residuals(double rc, double rq) {
  std::ostringstream os;
  os << "(" << rc << ", " << rq << ")";
  return os.str();
}

/// Certificates whose pass/fail feeds the exit code, per algorithm.
std::vector<diagnostics::Condition> required_conditions(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::CQ_SF1P:
    case AlgorithmId::AM_SF1P:
      return {diagnostics::Condition::C1, diagnostics::Condition::C2,
              diagnostics::Condition::C3Continuity};
    case AlgorithmId::PG_SF1P:
      return {diagnostics::Condition::C3Continuity};
    case AlgorithmId::WPADMM_SF4:
      return {diagnostics::Condition::LagrangianDecrease,
              diagnostics::Condition::MultiplierIdentity};
    case AlgorithmId::PADMM_SF1:   // experimental: reported, no contract
    case AlgorithmId::PG_SF3:
    case AlgorithmId::CQ_MULTISET:
      return {};
  }
  return {};
}

struct CertificationOutcome {
  json report;
  bool required_passed = true;
  int passed_count = 0;
  int total_count = 0;
};

json report_entry(const diagnostics::CertificateReport& report, bool required) {
  json entry;
  entry["condition"] = std::string(diagnostics::to_string(report.condition));
  entry["constant_used"] = report.constant_used;
  entry["worst_violation"] = report.worst_violation;
  entry["slack"] = report.slack;
  entry["passed"] = report.passed;
  entry["required"] = required;
  json violating = json::array();
  for (std::size_t i = 0; i < report.violating_iterations.size() && i < 50; ++i) {
    violating.push_back(report.violating_iterations[i]);
  }
  entry["violating_iterations"] = std::move(violating);
  return entry;
}

CertificationOutcome certify_trace(const objectives::ProblemInstance& problem,
                                   const solvers::IterateTrace& trace) {
  CertificationOutcome outcome;
  const AlgorithmId id = trace.config.algorithm;
  const auto required = required_conditions(id);
  const auto is_required = [&](diagnostics::Condition c) {
    return std::find(required.begin(), required.end(), c) != required.end();
  };

  json certificates = json::array();
  json not_applicable = json::array();
  auto attempt = [&](diagnostics::Condition condition, auto&& fn) {
    try {
      const diagnostics::CertificateReport report = fn();
      const bool req = is_required(condition);
      certificates.push_back(report_entry(report, req));
      ++outcome.total_count;
      if (report.passed) ++outcome.passed_count;
      if (req && !report.passed) outcome.required_passed = false;
    } catch (const std::invalid_argument& e) {
      not_applicable.push_back(std::string(diagnostics::to_string(condition)) + ": " + e.what());
    }
  };

  attempt(diagnostics::Condition::C1, [&] { return diagnostics::certify_c1(problem, trace); });
  attempt(diagnostics::Condition::C2, [&] { return diagnostics::certify_c2(problem, trace); });
  attempt(diagnostics::Condition::C3Continuity,
          [&] { return diagnostics::certify_c3(problem, trace); });
  attempt(diagnostics::Condition::LagrangianDecrease,
          [&] { return diagnostics::certify_lagrangian_decrease(problem, trace); });
  attempt(diagnostics::Condition::MultiplierIdentity,
          [&] { return diagnostics::certify_multiplier_identity(problem, trace); });

  outcome.report["algorithm"] = cli_algorithm_name(trace.config);
  outcome.report["certificates"] = std::move(certificates);
  outcome.report["not_applicable"] = std::move(not_applicable);
  if (id == AlgorithmId::PADMM_SF1) {
    outcome.report["experimental"] = "padmm-sf1 has no convergence contract; reports are informational";
  }

  const auto convergence = diagnostics::certify_convergence(trace);
  json conv;
  conv["final_residual_c"] = convergence.final_residual_c;
  conv["final_residual_q"] = convergence.final_residual_q;
  conv["tail_metric"] = convergence.tail_metric;
  conv["approximate_solution"] = convergence.approximate_solution;
  conv["residual_tol"] = convergence.residual_tol;
  conv["iterations"] = convergence.iterations;
  conv["termination_reason"] = std::string(to_string(convergence.termination_reason));
  outcome.report["convergence"] = std::move(conv);

  if (is_lagrangian(id) && trace.has_vectors && trace.records.size() > 1) {
    double max_norm = 0.0;
    for (std::size_t k = 0; k + 1 < trace.records.size(); ++k) {
      max_norm = std::max(max_norm, diagnostics::lagrangian_u_witness_norm(
                                        problem, trace, static_cast<int>(k)));
    }
    outcome.report["lagrangian_u_witness_max_norm"] = max_norm;
  }
  outcome.report["required_passed"] = outcome.required_passed;
  return outcome;
}

int exit_code_for_parse_error(CLI::App& app, const CLI::ParseError& e, std::string& summary) {
  std::ostringstream out;
  const int code = app.exit(e, out, out);
  summary = out.str();
  return code == 0 ? 0 : 1;
}

CommandResult guard(const std::function<CommandResult()>& body) {
  try {
    return body();
  } catch (const RequirementError& e) {
    return {2, {}, std::string("requirement violation: ") + e.what()};
  } catch (const std::exception& e) {
    return {1, {}, std::string("error: ") + e.what()};
  }
}

}  // namespace

// -------------------------------------------------------------------------
// generate
// -------------------------------------------------------------------------

CommandResult cmd_generate(const std::vector<std::string>& args) {
  CLI::App app{"generate a split-feasibility instance"};
  app.name("splitfeas generate");
  std::int64_t n = 0;
  std::string m_list;
  std::string set_c = "ball";
  std::string set_q = "ball";
  bool consistent = true;
  std::uint64_t seed = default_seed();
  std::string spectrum;
  std::string require;
  std::string out_path;
  app.add_option("--n", n, "dimension of x")->required();
  app.add_option("--m", m_list, "image dimension(s), comma separated for multiset")->required();
  app.add_option("--set-c", set_c, "family of C");
  app.add_option("--set-q", set_q, "family/families of Q");
  app.add_flag("--consistent,!--inconsistent", consistent, "build a consistent instance");
  app.add_option("--seed", seed, "generator seed (default: SPLITFEAS_SEED or 0)");
  app.add_option("--spectrum", spectrum, "singular values of A, comma separated");
  app.add_option("--require", require, "enforce requirements for alg6|alg7");
  app.add_option("--out", out_path, "output problem JSON")->required();

  std::string parse_summary;
  try {
    parse_args(app, args);
  } catch (const CLI::ParseError& e) {
    const int code = exit_code_for_parse_error(app, e, parse_summary);
    return {code, {}, parse_summary};
  }

  return guard([&]() -> CommandResult {
    problems::GeneratorSpec spec;
    spec.n = n;
    for (const auto& tok : split(m_list, ',')) spec.m.push_back(std::stoll(tok));
    spec.set_family_c = parse_family(set_c, "--set-c");
    for (const auto& tok : split(set_q, ',')) {
      spec.set_family_q.push_back(parse_family(tok, "--set-q"));
    }
    spec.consistent = consistent;
    spec.seed = seed;
    if (!spectrum.empty()) spec.spectrum = parse_double_list(spectrum, "--spectrum");
    if (!require.empty()) {
      if (require == "alg6" || require == "wpadmm-prox") {
        spec.enforce_requirements_for = AlgorithmId::WPADMM_SF4;
        spec.enforce_mode = NMode::ProxIdentity;
      } else if (require == "alg7" || require == "wpadmm-lin") {
        spec.enforce_requirements_for = AlgorithmId::WPADMM_SF4;
        spec.enforce_mode = NMode::Linearized;
      } else {
        throw std::runtime_error("--require: expected alg6 or alg7");
      }
    }

    const objectives::ProblemInstance problem = problems::generate(spec);
    problems::save_problem(problem, out_path);

    std::ostringstream summary;
    summary << "wrote " << out_path << "\n";
    if (problem.consistency_witness) {
      const auto [rc, rq] = objectives::residuals(problem, *problem.consistency_witness);
      summary << "witness residuals: " << format_residuals(rc, rq) << "\n";
    }
    if (problem.infeasibility_margin) {
      summary << "certified infeasibility margin: " << *problem.infeasibility_margin << "\n";
    }
    if (!require.empty()) {
      const auto s = linops::spectral_summary(problem.map());
      summary << "kappa(A^T A) = " << s.gram_condition
              << ", lambda_min(AA^T) = " << s.rowgram_lambda_min << "\n";
    }
    return {0, {out_path}, summary.str()};
  });
}

// -------------------------------------------------------------------------
// solve
// -------------------------------------------------------------------------

CommandResult cmd_solve(const std::vector<std::string>& args) {
  CLI::App app{"run a solver on a problem file"};
  app.name("splitfeas solve");
  std::string problem_path;
  std::string algorithm;
  std::optional<double> lambda, rho, tau, tau1, tau2;
  int max_iter = 10000;
  std::optional<double> tol, step_tol, inner_tol;
  std::optional<int> inner_max_iter;
  bool override_requirements = false;
  std::uint64_t seed = default_seed();
  std::string x0_list;
  bool full_trace = false;
  std::string trace_out = "trace.csv";
  app.add_option("--problem", problem_path, "problem JSON")->required();
  app.add_option("--algorithm", algorithm,
                 "padmm-sf1|pg-sf1p|am-sf1p|cq|pg-sf3|wpadmm-prox|wpadmm-lin|cq-multiset")
      ->required();
  app.add_option("--lambda", lambda, "penalty weight");
  app.add_option("--rho", rho, "Lagrangian penalty");
  app.add_option("--tau", tau, "step size / proximal weight");
  app.add_option("--tau1", tau1, "padmm-sf1 u-proximal weight");
  app.add_option("--tau2", tau2, "padmm-sf1 x-proximal weight");
  app.add_option("--max-iter", max_iter, "iteration cap");
  app.add_option("--tol", tol, "residual tolerance");
  app.add_option("--step-tol", step_tol, "step-norm tolerance");
  app.add_option("--inner-tol", inner_tol, "inner-solver tolerance");
  app.add_option("--inner-max-iter", inner_max_iter, "inner-solver iteration cap");
  app.add_flag("--override", override_requirements, "run despite violated requirements");
  app.add_option("--seed", seed, "seed for the default start point");
  app.add_option("--x0", x0_list, "start point, comma separated (default: seeded draw onto C)");
  app.add_flag("--full-trace", full_trace, "store iterate vectors in the trace JSON");
  app.add_option("--trace-out", trace_out, "trace CSV path (JSON written beside it)");

  std::string parse_summary;
  try {
    parse_args(app, args);
  } catch (const CLI::ParseError& e) {
    const int code = exit_code_for_parse_error(app, e, parse_summary);
    return {code, {}, parse_summary};
  }

  return guard([&]() -> CommandResult {
    const objectives::ProblemInstance problem = problems::load_problem(problem_path);
    const AlgorithmChoice choice = parse_algorithm(algorithm);

    solvers::SolverConfig config;
    config.algorithm = choice.id;
    config.n_mode = choice.n_mode;
    config.lambda = lambda;
    config.rho = rho;
    config.tau = tau;
    config.tau1 = tau1;
    config.tau2 = tau2;
    config.max_iter = max_iter;
    if (tol) config.residual_tol = *tol;
    if (step_tol) config.step_tol = *step_tol;
    if (inner_tol) config.inner_tol = *inner_tol;
    if (inner_max_iter) config.inner_max_iter = *inner_max_iter;
    config.override_requirements = override_requirements;

    Eigen::VectorXd x0;
    if (!x0_list.empty()) {
      const auto values = parse_double_list(x0_list, "--x0");
      x0 = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                             static_cast<Eigen::Index>(values.size()));
    } else {
      x0 = default_start(problem, seed);
    }

    const solvers::IterateTrace trace = solvers::run(problem, config, x0);
    problems::save_trace(trace, trace_out, full_trace);
    std::filesystem::path json_path(trace_out);
    json_path.replace_extension(".json");

    std::ostringstream summary;
    if (choice.id == AlgorithmId::PADMM_SF1) {
      summary << "[experimental] padmm-sf1: convergence Unknown\n";
    }
    for (const auto& warning : trace.warnings) summary << "warning: " << warning << "\n";
    const auto& last = trace.records.back();
    summary << "algorithm: " << cli_algorithm_name(trace.config) << "\n"
            << "termination: " << to_string(trace.termination_reason) << " after " << last.k
            << " iterations\n"
            << "final residuals: " << format_residuals(last.residual_c, last.residual_q) << "\n"
            << "wrote " << trace_out << " and " << json_path.string() << "\n";
    return {0, {trace_out, json_path.string()}, summary.str()};
  });
}

// -------------------------------------------------------------------------
// certify
// -------------------------------------------------------------------------

CommandResult cmd_certify(const std::vector<std::string>& args) {
  CLI::App app{"verify descent/Lagrangian certificates along a trace"};
  app.name("splitfeas certify");
  std::string trace_path;
  std::string problem_path;
  std::string config_path;
  std::string out_path = "certificates.json";
  app.add_option("--trace", trace_path, "trace JSON (written by solve)")->required();
  app.add_option("--problem", problem_path, "problem JSON")->required();
  app.add_option("--config", config_path, "optional config JSON overriding the trace snapshot");
  app.add_option("--out", out_path, "certificate report path");

  std::string parse_summary;
  try {
    parse_args(app, args);
  } catch (const CLI::ParseError& e) {
    const int code = exit_code_for_parse_error(app, e, parse_summary);
    return {code, {}, parse_summary};
  }

  return guard([&]() -> CommandResult {
    const objectives::ProblemInstance problem = problems::load_problem(problem_path);
    solvers::IterateTrace trace = problems::load_trace(trace_path);
    if (trace.problem_digest != objectives::problem_digest(problem)) {
      throw std::runtime_error("certify: trace was produced from a different problem (digest mismatch)");
    }
    if (!config_path.empty()) {
      trace.config = solvers::resolve_defaults(problems::load_config(config_path), problem);
    }

    const CertificationOutcome outcome = certify_trace(problem, trace);
    {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("certify: cannot open " + out_path);
      out << outcome.report.dump(2) << "\n";
    }

    std::ostringstream summary;
    for (const auto& entry : outcome.report.at("certificates")) {
      summary << (entry.at("passed").get<bool>() ? "PASS " : "FAIL ")
              << entry.at("condition").get<std::string>()
              << (entry.at("required").get<bool>() ? "" : " (informational)") << "\n";
    }
    for (const auto& line : outcome.report.at("not_applicable")) {
      summary << "n/a  " << line.get<std::string>() << "\n";
    }
    summary << "wrote " << out_path << "\n";
    const int code = outcome.required_passed ? 0 : 1;
    return {code, {out_path}, summary.str()};
  });
}

// -------------------------------------------------------------------------
// sweep
// -------------------------------------------------------------------------

namespace {

struct SweepCell {
  std::string algorithm;
  std::vector<std::pair<std::string, double>> params;
  std::string label() const {
    std::ostringstream os;
    os << algorithm;
    for (const auto& [k, v] : params) os << "_" << k << "=" << v;
    return os.str();
  }
};

struct SweepCellResult {
  std::string status = "ok";
  std::string termination;
  int iterations = 0;
  double residual_c = 0.0;
  double residual_q = 0.0;
  int certificates_passed = 0;
  int certificates_total = 0;
  bool experimental = false;
};

}  // namespace

CommandResult cmd_sweep(const std::vector<std::string>& args) {
  CLI::App app{"run an algorithm/parameter grid and tabulate the outcomes"};
  app.name("splitfeas sweep");
  std::string problem_path;
  std::string algorithms;
  std::string grid;
  std::string out_dir = "sweep";
  int max_iter = 10000;
  std::optional<double> tol;
  std::uint64_t seed = default_seed();
  app.add_option("--problem", problem_path, "problem JSON")->required();
  app.add_option("--algorithms", algorithms, "comma-separated algorithm list")->required();
  app.add_option("--grid", grid, "parameter grid, e.g. 'tau=1.5,2.0;lambda=1'");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--max-iter", max_iter, "iteration cap per cell");
  app.add_option("--tol", tol, "residual tolerance per cell");
  app.add_option("--seed", seed, "seed for the shared start point");

  std::string parse_summary;
  try {
    parse_args(app, args);
  } catch (const CLI::ParseError& e) {
    const int code = exit_code_for_parse_error(app, e, parse_summary);
    return {code, {}, parse_summary};
  }

  return guard([&]() -> CommandResult {
    const objectives::ProblemInstance problem = problems::load_problem(problem_path);
    std::filesystem::create_directories(out_dir);

    // Parse grid "name=v1,v2;name2=w1" preserving order.
    std::vector<std::pair<std::string, std::vector<double>>> axes;
    if (!grid.empty()) {
      for (const auto& axis : split(grid, ';')) {
        const auto eq = axis.find('=');
        if (eq == std::string::npos) {
          throw std::runtime_error("--grid: expected name=v1,v2 in '" + axis + "'");
        }
        const std::string name = axis.substr(0, eq);
        if (name != "lambda" && name != "rho" && name != "tau" && name != "tau1" &&
            name != "tau2") {
          throw std::runtime_error("--grid: unknown parameter '" + name + "'");
        }
        axes.emplace_back(name, parse_double_list(axis.substr(eq + 1), "--grid"));
      }
    }

    std::vector<SweepCell> cells;
    for (const auto& alg : split(algorithms, ',')) {
      std::vector<std::vector<std::pair<std::string, double>>> combos{{}};
      for (const auto& [name, values] : axes) {
        std::vector<std::vector<std::pair<std::string, double>>> next;
        for (const auto& combo : combos) {
          for (double v : values) {
            auto extended = combo;
            extended.emplace_back(name, v);
            next.push_back(std::move(extended));
          }
        }
        combos = std::move(next);
      }
      for (auto& combo : combos) cells.push_back({alg, std::move(combo)});
    }

    const Eigen::VectorXd x0 = default_start(problem, seed);

    auto run_cell = [&](const SweepCell& cell, const std::string& csv_path) -> SweepCellResult {
      SweepCellResult result;
      const AlgorithmChoice choice = parse_algorithm(cell.algorithm);
      result.experimental = choice.id == AlgorithmId::PADMM_SF1;
      solvers::SolverConfig config;
      config.algorithm = choice.id;
      config.n_mode = choice.n_mode;
      config.max_iter = max_iter;
      if (tol) config.residual_tol = *tol;
      for (const auto& [name, value] : cell.params) {
        if (name == "lambda") config.lambda = value;
        if (name == "rho") config.rho = value;
        if (name == "tau") config.tau = value;
        if (name == "tau1") config.tau1 = value;
        if (name == "tau2") config.tau2 = value;
      }
      const solvers::IterateTrace trace = solvers::run(problem, config, x0);
      problems::save_trace(trace, csv_path, false);
      const auto& last = trace.records.back();
      result.termination = std::string(to_string(trace.termination_reason));
      result.iterations = last.k;
      result.residual_c = last.residual_c;
      result.residual_q = last.residual_q;
      const CertificationOutcome outcome = certify_trace(problem, trace);
      result.certificates_passed = outcome.passed_count;
      result.certificates_total = outcome.total_count;
      return result;
    };

    // Cells are independent; run them concurrently and assemble in order.
    std::vector<std::string> cell_paths;
    cell_paths.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::ostringstream name;
      name << out_dir << "/cell_" << i << "_" << cells[i].algorithm << ".csv";
      cell_paths.push_back(name.str());
    }
    std::vector<std::future<SweepCellResult>> futures;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      futures.push_back(std::async(std::launch::async, [&, i]() {
        return run_cell(cells[i], cell_paths[i]);
      }));
    }
    std::vector<SweepCellResult> results;
    for (std::size_t i = 0; i < futures.size(); ++i) {
      try {
        results.push_back(futures[i].get());
      } catch (const std::exception& e) {
        SweepCellResult failed;
        failed.status = std::string("error: ") + e.what();
        results.push_back(std::move(failed));
      }
    }

    const std::string summary_path = out_dir + "/summary.csv";
    std::ofstream out(summary_path);
    if (!out) throw std::runtime_error("sweep: cannot open " + summary_path);
    out << "cell,algorithm,params,status,termination,iterations,final_residual_c,"
           "final_residual_q,certificates_passed,certificates_total,experimental\n";
    std::ostringstream table;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::ostringstream params;
      for (std::size_t p = 0; p < cells[i].params.size(); ++p) {
        if (p) params << " ";
        params << cells[i].params[p].first << "=" << cells[i].params[p].second;
      }
      const auto& r = results[i];
      out << i << ',' << cells[i].algorithm << ',' << params.str() << ','
          << (r.status == "ok" ? "ok" : "error") << ',' << r.termination << ',' << r.iterations
          << ',' << r.residual_c << ',' << r.residual_q << ',' << r.certificates_passed << ','
          << r.certificates_total << ',' << (r.experimental ? "yes" : "no") << '\n';
      table << cells[i].label() << ": " << r.status;
      if (r.status == "ok") {
        table << ", " << r.termination << " @" << r.iterations << ", residuals "
              << format_residuals(r.residual_c, r.residual_q) << ", certificates "
              << r.certificates_passed << "/" << r.certificates_total;
        if (r.experimental) table << " [experimental]";
      }
      table << "\n";
    }
    out.close();

    std::vector<std::string> artifacts = cell_paths;
    artifacts.push_back(summary_path);
    std::ostringstream summary;
    summary << table.str() << "wrote " << summary_path << " and " << cells.size()
            << " cell traces\n";
    return {0, artifacts, summary.str()};
  });
}

// -------------------------------------------------------------------------
// plot
// -------------------------------------------------------------------------

CommandResult cmd_plot(const std::vector<std::string>& args) {
  CLI::App app{"render a residual-vs-iteration SVG from a trace CSV"};
  app.name("splitfeas plot");
  std::string trace_path;
  std::string out_path = "convergence.svg";
  app.add_option("--trace", trace_path, "trace CSV")->required();
  app.add_option("--out", out_path, "output SVG path");

  std::string parse_summary;
  try {
    parse_args(app, args);
  } catch (const CLI::ParseError& e) {
    const int code = exit_code_for_parse_error(app, e, parse_summary);
    return {code, {}, parse_summary};
  }

  return guard([&]() -> CommandResult {
    std::ifstream in(trace_path);
    if (!in) throw std::runtime_error("plot: cannot open " + trace_path);
    std::string header;
    if (!std::getline(in, header) ||
        header.rfind("k,step_norm_x,step_norm_u,residual_C,residual_Q", 0) != 0) {
      throw std::runtime_error("plot: " + trace_path + " is not a trace CSV");
    }
    std::vector<double> ks, res_c, res_q;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto fields = [&line] {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        return f;
      }();
      if (fields.size() < 5) throw std::runtime_error("plot: malformed CSV row '" + line + "'");
      ks.push_back(std::stod(fields[0]));
      res_c.push_back(std::stod(fields[3]));
      res_q.push_back(std::stod(fields[4]));
    }
    if (ks.empty()) throw std::runtime_error("plot: trace has no records");

    constexpr double kFloor = 1e-16;
    const double width = 720, height = 480, left = 70, right = 20, top = 20, bottom = 50;
    double lo = 0.0, hi = -15.0;  // log10 bounds
    for (std::size_t i = 0; i < ks.size(); ++i) {
      for (double v : {res_c[i], res_q[i]}) {
        const double lg = std::log10(std::max(v, kFloor));
        lo = std::min(lo, lg);
        hi = std::max(hi, lg);
      }
    }
    lo = std::floor(lo) - 0.5;
    hi = std::ceil(hi) + 0.5;
    const double xmax = std::max(1.0, ks.back());
    auto sx = [&](double k) { return left + (width - left - right) * (k / xmax); };
    auto sy = [&](double v) {
      const double lg = std::log10(std::max(v, kFloor));
      return top + (height - top - bottom) * (hi - lg) / (hi - lo);
    };
    auto polyline = [&](const std::vector<double>& values, const char* color) {
      std::ostringstream os;
      os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < ks.size(); ++i) {
        os << sx(ks[i]) << ',' << sy(values[i]) << ' ';
      }
      os << "\"/>\n";
      return os.str();
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n"
        << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n"
        << "  <line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
        << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
    for (int decade = static_cast<int>(std::ceil(lo)); decade <= static_cast<int>(std::floor(hi));
         ++decade) {
      const double y = sy(std::pow(10.0, decade));
      svg << "  <line x1=\"" << left - 4 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\""
          << y << "\" stroke=\"black\"/>\n"
          << "  <text x=\"" << left - 8 << "\" y=\"" << y + 4
          << "\" text-anchor=\"end\" font-size=\"11\">1e" << decade << "</text>\n";
    }
    svg << "  <text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 14
        << "\" text-anchor=\"middle\" font-size=\"12\">iteration k (0.." << ks.back()
        << ")</text>\n"
        << polyline(res_c, "#c0392b") << polyline(res_q, "#2a6fb0")
        << "  <text x=\"" << width - right - 10 << "\" y=\"" << top + 16
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#c0392b\">d_C(x^k)</text>\n"
        << "  <text x=\"" << width - right - 10 << "\" y=\"" << top + 32
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#2a6fb0\">max_j d_Qj(A_j x^k)</text>\n"
        << "</svg>\n";

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("plot: cannot open " + out_path);
    out << svg.str();
    return {0, {out_path}, "wrote " + out_path + "\n"};
  });
}

// -------------------------------------------------------------------------
// dispatch
// -------------------------------------------------------------------------

int run_main(int argc, char** argv) {
  const std::string usage =
      "usage: splitfeas <generate|solve|certify|sweep|plot> [options]\n"
      "       splitfeas <subcommand> --help\n";
  if (argc < 2) {
    std::cerr << usage;
    return 1;
  }
  const std::string sub = argv[1];
  std::vector<std::string> args(argv + 2, argv + argc);

  CommandResult result;
  if (sub == "generate") {
    result = cmd_generate(args);
  } else if (sub == "solve") {
    result = cmd_solve(args);
  } else if (sub == "certify") {
    result = cmd_certify(args);
  } else if (sub == "sweep") {
    result = cmd_sweep(args);
  } else if (sub == "plot") {
    result = cmd_plot(args);
  } else {
    std::cerr << "unknown subcommand '" << sub << "'\n" << usage;
    return 1;
  }

  if (result.exit_code == 0) {
    std::cout << result.summary;
  } else {
    std::cerr << result.summary;
    if (!result.summary.empty() && result.summary.back() != '\n') std::cerr << '\n';
  }
  return result.exit_code;
}

}  // namespace splitfeas::cli
