#include "splitfeas/solvers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "splitfeas/errors.hpp"

namespace splitfeas::solvers {

namespace {

double required(const std::optional<double>& value, const char* name) {
  if (!value) {
    throw std::invalid_argument(std::string("config.") + name +
                                " is unset; run resolve_defaults first");
  }
  return *value;
}

bool is_scaled_orthogonal(const linops::SpectralSummary& s) {
  return s.gram_lambda_min > 0.0 &&
         s.gram_lambda_max - s.gram_lambda_min <= 1e-10 * s.gram_lambda_max;
}

}  // namespace

std::string_view to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::ResidualTol: return "residual_tol";
    case TerminationReason::StepTol: return "step_tol";
    case TerminationReason::MaxIter: return "max_iter";
  }
  return "unknown";
}

std::optional<TerminationReason> termination_from_string(std::string_view name) {
  if (name == "residual_tol") return TerminationReason::ResidualTol;
  if (name == "step_tol") return TerminationReason::StepTol;
  if (name == "max_iter") return TerminationReason::MaxIter;
  return std::nullopt;
}

// -------------------------------------------------------------------------
// Per-run precomputation.
// -------------------------------------------------------------------------

class StepContext {
public:
  std::vector<linops::SpectralSummary> summaries;
  // Factorization of rho*A^T A + (1+tau)*I for the WPADMM prox-identity
  // x-subproblem; built once per run.
  std::shared_ptr<const Eigen::LLT<Eigen::MatrixXd>> sf4_llt;
};

std::shared_ptr<const StepContext> make_step_context(const objectives::ProblemInstance& problem,
                                                     const SolverConfig& config) {
  auto ctx = std::make_shared<StepContext>();
  ctx->summaries.reserve(problem.maps.size());
  for (const auto& map : problem.maps) {
    ctx->summaries.push_back(linops::spectral_summary(map));
  }
  if (config.algorithm == AlgorithmId::WPADMM_SF4 && config.n_mode == NMode::ProxIdentity &&
      config.rho && config.tau) {
    const auto& a = problem.map().entries();
    Eigen::MatrixXd m = *config.rho * (a.transpose() * a);
    m.diagonal().array() += 1.0 + *config.tau;
    auto llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(m);
    if (llt->info() != Eigen::Success) {
      throw std::runtime_error("wpadmm-sf4: factorization of rho*A^T A + (1+tau)*I failed");
    }
    ctx->sf4_llt = std::move(llt);
  }
  return ctx;
}

namespace {

const StepContext& ensure_context(const objectives::ProblemInstance& problem,
                                  const SolverConfig& config, const StepContext* ctx,
                                  std::shared_ptr<const StepContext>& local) {
  if (ctx != nullptr) return *ctx;
  local = make_step_context(problem, config);
  return *local;
}

// Exact minimization of (c_a/2)||A x - t||^2 + (c_p/2)||x - p||^2 over C.
// Backends: a single projection when A^T A is a positive multiple of the
// identity (valid for any C), a warm-started projected-gradient loop for
// convex C, and a refusal otherwise.
Eigen::VectorXd minimize_quadratic_over_set(const sets::SetSpec& set_c,
                                            const linops::LinearMap& map,
                                            const linops::SpectralSummary& summary, double c_a,
                                            const Eigen::VectorXd& t, double c_p,
                                            const Eigen::VectorXd& p, const Eigen::VectorXd& warm,
                                            const SolverConfig& config, const char* subproblem) {
  if (is_scaled_orthogonal(summary)) {
    const double c2 = 0.5 * (summary.gram_lambda_max + summary.gram_lambda_min);
    const double denom = c_a * c2 + c_p;
    const Eigen::VectorXd center = (c_a * linops::apply_adjoint(map, t) + c_p * p) / denom;
    return sets::project(set_c, center);
  }
  if (!sets::is_convex(set_c)) {
    throw RequirementError(std::string(subproblem) +
                           ": not exactly solvable; needs A^T A proportional to the identity "
                           "(any C) or a convex C (inner solver)");
  }
  const double lip = c_a * summary.gram_lambda_max + c_p;
  Eigen::VectorXd x = sets::project(set_c, warm);
  if (lip == 0.0) return x;  // zero map, no proximal weight: the objective is constant
  for (int it = 0; it < config.inner_max_iter; ++it) {
    Eigen::VectorXd grad = c_a * linops::apply_adjoint(map, linops::apply(map, x) - t);
    if (c_p != 0.0) grad += c_p * (x - p);
    Eigen::VectorXd next = sets::project(set_c, x - grad / lip);
    const double step = (next - x).norm();
    x = std::move(next);
    if (step <= config.inner_tol) return x;
  }
  throw std::runtime_error(std::string(subproblem) +
                           ": inner projected-gradient solver did not converge within "
                           "inner_max_iter");
}

// Fixed point x <- M^{-1}(P_C(x) + c) for the prox-identity x-subproblem;
// contraction factor at most 1/(1+tau).
Eigen::VectorXd sf4_prox_solve(const sets::SetSpec& set_c,
                               const Eigen::LLT<Eigen::MatrixXd>& llt,
                               const Eigen::VectorXd& c_vec, const Eigen::VectorXd& warm,
                               const SolverConfig& config) {
  Eigen::VectorXd x = warm;
  for (int it = 0; it < config.inner_max_iter; ++it) {
    Eigen::VectorXd next = llt.solve(sets::project(set_c, x) + c_vec);
    const double step = (next - x).norm();
    x = std::move(next);
    if (step <= config.inner_tol) return x;
  }
  throw std::runtime_error(
      "wpadmm-sf4 x-subproblem: fixed-point inner solver did not converge within inner_max_iter");
}

void check_state_x(const IterateState& state, const objectives::ProblemInstance& problem) {
  if (state.x.size() != problem.dim_x()) {
    throw DimensionError("step: state.x dimension does not match the problem");
  }
}

const Eigen::VectorXd& state_u(const IterateState& state) {
  if (!state.u) throw std::invalid_argument("step: state.u required by this algorithm");
  return *state.u;
}

const Eigen::VectorXd& state_y(const IterateState& state) {
  if (!state.y) throw std::invalid_argument("step: state.y required by this algorithm");
  return *state.y;
}

}  // namespace

// -------------------------------------------------------------------------
// Defaults and validation.
// -------------------------------------------------------------------------

SolverConfig resolve_defaults(SolverConfig config, const objectives::ProblemInstance& problem) {
  if (!config.lambda) config.lambda = 1.0;
  if (!config.tau1) config.tau1 = 1.0;
  if (!config.tau2) config.tau2 = 1.0;

  std::vector<linops::SpectralSummary> summaries;
  summaries.reserve(problem.maps.size());
  for (const auto& map : problem.maps) summaries.push_back(linops::spectral_summary(map));
  const double lambda_max = summaries.front().gram_lambda_max;

  if (!config.rho) config.rho = 10.0 * std::max(1.0, lambda_max);

  if (!config.tau) {
    const double lambda = *config.lambda;
    switch (config.algorithm) {
      case AlgorithmId::CQ_SF1P:
        config.tau = lambda_max > 0.0 ? 1.01 * lambda * lambda_max : 1.0;
        break;
      case AlgorithmId::PG_SF1P:
        config.tau = 1.01 * lambda * (lambda_max + 1.0);
        break;
      case AlgorithmId::PG_SF3:
        config.tau = lambda_max > 0.0 ? 1.01 * lambda_max : 1.0;
        break;
      case AlgorithmId::WPADMM_SF4:
        config.tau = config.n_mode == NMode::Linearized && lambda_max > 0.0
                         ? 1.01 * *config.rho * lambda_max
                         : 1.0;
        break;
      case AlgorithmId::CQ_MULTISET: {
        double sum = 0.0;
        for (const auto& s : summaries) sum += s.gram_lambda_max;
        config.tau = sum > 0.0 ? 1.01 * sum : 1.0;
        break;
      }
      case AlgorithmId::PADMM_SF1:
      case AlgorithmId::AM_SF1P:
        config.tau = 1.0;
        break;
    }
  }
  return config;
}

std::vector<std::string> validate_config(const SolverConfig& config,
                                         const objectives::ProblemInstance& problem) {
  std::vector<std::string> warnings;
  const double lambda = required(config.lambda, "lambda");
  const double rho = required(config.rho, "rho");
  const double tau = required(config.tau, "tau");
  const double tau1 = required(config.tau1, "tau1");
  const double tau2 = required(config.tau2, "tau2");

  if (!(lambda > 0.0)) throw std::invalid_argument("config: lambda must be positive");
  if (!(rho > 0.0)) throw std::invalid_argument("config: rho must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("config: tau must be positive");
  if (tau1 < 0.0 || tau2 < 0.0) throw std::invalid_argument("config: tau1, tau2 must be >= 0");
  if (config.max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
  if (!(config.residual_tol > 0.0)) throw std::invalid_argument("config: residual_tol must be > 0");
  if (config.step_tol < 0.0) throw std::invalid_argument("config: step_tol must be >= 0");
  if (!(config.inner_tol > 0.0)) throw std::invalid_argument("config: inner_tol must be > 0");
  if (config.inner_max_iter < 1) throw std::invalid_argument("config: inner_max_iter must be >= 1");

  if (problem.multiset() && config.algorithm != AlgorithmId::CQ_MULTISET) {
    throw std::invalid_argument("config: only cq-multiset accepts multiset problems");
  }

  std::vector<linops::SpectralSummary> summaries;
  for (const auto& map : problem.maps) summaries.push_back(linops::spectral_summary(map));
  const double lambda_max = summaries.front().gram_lambda_max;

  // Step-size bounds; these keep the certificate constants positive and are
  // not overridable.
  switch (config.algorithm) {
    case AlgorithmId::CQ_SF1P:
      if (!(tau > lambda * lambda_max)) {
        throw RequirementError("cq: requires tau > lambda * lambda_max(A^T A)");
      }
      break;
    case AlgorithmId::PG_SF1P:
      if (!(tau >= lambda * (lambda_max + 1.0))) {
        throw RequirementError("pg-sf1p: requires tau >= lambda * (lambda_max(A^T A) + 1)");
      }
      break;
    case AlgorithmId::PG_SF3:
      if (!(tau > lambda_max)) {
        throw RequirementError("pg-sf3: requires tau > lambda_max(A^T A)");
      }
      break;
    case AlgorithmId::WPADMM_SF4:
      if (config.n_mode == NMode::Linearized && !(tau > rho * lambda_max)) {
        throw RequirementError(
            "wpadmm-sf4 (linearized): requires tau > rho * lambda_max(A^T A) so N > 0");
      }
      break;
    case AlgorithmId::CQ_MULTISET: {
      double sum = 0.0;
      for (const auto& s : summaries) sum += s.gram_lambda_max;
      if (!(tau > sum)) {
        throw RequirementError("cq-multiset: requires tau > sum_j lambda_max(A_j^T A_j)");
      }
      break;
    }
    case AlgorithmId::PADMM_SF1:
    case AlgorithmId::AM_SF1P:
      break;
  }

  // Requirements on the linear map (advisory table); overridable.
  const auto report =
      linops::check_table_requirements(summaries.front(), config.algorithm, config.n_mode);
  if (!report.satisfied) {
    if (!config.override_requirements) {
      std::ostringstream msg;
      msg << to_string(config.algorithm) << ": requirements on A violated:";
      for (const auto& v : report.violations) msg << " " << v << ";";
      throw RequirementError(msg.str());
    }
    for (const auto& v : report.violations) {
      warnings.push_back("overridden requirement: " + v);
    }
  }

  // Convexity preconditions of the update rules; overridable with a warning.
  auto convexity = [&](bool ok, const char* text) {
    if (ok) return;
    if (!config.override_requirements) {
      throw RequirementError(std::string(to_string(config.algorithm)) + ": " + text);
    }
    warnings.push_back(std::string("overridden precondition: ") + text);
  };
  switch (config.algorithm) {
    case AlgorithmId::PG_SF3:
      convexity(sets::is_convex(problem.set_q()),
                "Q must be convex for the half-squared-distance gradient");
      break;
    case AlgorithmId::AM_SF1P:
      convexity(sets::is_convex(problem.set_q()),
                "Q must be convex for the alternating-minimization analysis");
      break;
    case AlgorithmId::CQ_MULTISET:
      for (const auto& q : problem.sets_q) {
        convexity(sets::is_convex(q), "every Q_j must be convex");
        if (config.override_requirements && !sets::is_convex(q)) break;
      }
      break;
    case AlgorithmId::WPADMM_SF4:
      convexity(sets::is_convex(problem.set_c),
                "C must be convex for the half-squared-distance term");
      break;
    default:
      break;
  }

  if (config.algorithm == AlgorithmId::PADMM_SF1) {
    warnings.push_back("padmm-sf1 is experimental: global convergence unknown");
  }
  return warnings;
}

// -------------------------------------------------------------------------
// One-step update rules.
// -------------------------------------------------------------------------

IterateState step_padmm_sf1(const IterateState& state, const objectives::ProblemInstance& problem,
                            const SolverConfig& config, const StepContext* ctx) {
  check_state_x(state, problem);
  std::shared_ptr<const StepContext> local;
  const StepContext& c = ensure_context(problem, config, ctx, local);
  const double rho = required(config.rho, "rho");
  const double tau1 = required(config.tau1, "tau1");
  const double tau2 = required(config.tau2, "tau2");
  const auto& map = problem.map();
  const Eigen::VectorXd& u = state_u(state);
  const Eigen::VectorXd& y = state_y(state);

  const Eigen::VectorXd ax = linops::apply(map, state.x);
  // u-subproblem closed form: projection of a weighted average; a global
  // minimizer even for non-convex Q.
  const Eigen::VectorXd u_next =
      sets::project(problem.set_q(), (rho * ax + y + tau1 * u) / (rho + tau1));

  // x-subproblem: min over C of <y, Ax> + (rho/2)||Ax - u+||^2 +
  // (tau2/2)||x - x^k||^2, folded into a squared-distance form.
  const Eigen::VectorXd t = u_next - y / rho;
  const Eigen::VectorXd x_next =
      minimize_quadratic_over_set(problem.set_c, map, c.summaries.front(), rho, t, tau2, state.x,
                                  state.x, config, "padmm-sf1 x-subproblem");

  IterateState next;
  next.x = x_next;
  next.u = u_next;
  next.y = y + rho * (linops::apply(map, x_next) - u_next);
  next.k = state.k + 1;
  return next;
}

IterateState step_pg_sf1p(const IterateState& state, const objectives::ProblemInstance& problem,
                          const SolverConfig& config, const StepContext* /*ctx*/) {
  check_state_x(state, problem);
  const double lambda = required(config.lambda, "lambda");
  const double tau = required(config.tau, "tau");
  const auto& map = problem.map();
  const Eigen::VectorXd& u = state_u(state);
  const double coef = lambda / tau;

  // Parallel update: both blocks read the old (x^k, u^k).
  const Eigen::VectorXd ax = linops::apply(map, state.x);
  IterateState next;
  next.u = sets::project(problem.set_q(), u - coef * (u - ax));
  next.x = sets::project(problem.set_c, state.x - coef * linops::apply_adjoint(map, ax - u));
  next.k = state.k + 1;
  return next;
}

IterateState step_am_sf1p(const IterateState& state, const objectives::ProblemInstance& problem,
                          const SolverConfig& config, const StepContext* ctx) {
  check_state_x(state, problem);
  std::shared_ptr<const StepContext> local;
  const StepContext& c = ensure_context(problem, config, ctx, local);
  const double lambda = required(config.lambda, "lambda");
  const auto& map = problem.map();
  const Eigen::VectorXd& u = state_u(state);

  const Eigen::VectorXd x_next =
      minimize_quadratic_over_set(problem.set_c, map, c.summaries.front(), lambda, u, 0.0, state.x,
                                  state.x, config, "am-sf1p x-subproblem");
  IterateState next;
  next.x = x_next;
  next.u = sets::project(problem.set_q(), linops::apply(map, x_next));
  next.k = state.k + 1;
  return next;
}

IterateState step_cq_sf1p(const IterateState& state, const objectives::ProblemInstance& problem,
                          const SolverConfig& config, const StepContext* /*ctx*/) {
  check_state_x(state, problem);
  const double lambda = required(config.lambda, "lambda");
  const double tau = required(config.tau, "tau");
  const auto& map = problem.map();

  const Eigen::VectorXd ax = linops::apply(map, state.x);
  const Eigen::VectorXd u_next = sets::project(problem.set_q(), ax);
  const double coef = lambda / tau;
  IterateState next;
  next.x =
      sets::project(problem.set_c, state.x - coef * linops::apply_adjoint(map, ax - u_next));
  next.u = u_next;
  next.k = state.k + 1;
  return next;
}

namespace {

// Shared by pg-sf3 (single block) and cq-multiset so the r = 1 reduction is
// bit-exact.
IterateState cq_simultaneous_step(const IterateState& state,
                                  const objectives::ProblemInstance& problem, double tau) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(state.x.size());
  for (std::size_t j = 0; j < problem.maps.size(); ++j) {
    const Eigen::VectorXd ax = linops::apply(problem.maps[j], state.x);
    grad += linops::apply_adjoint(problem.maps[j], ax - sets::project(problem.sets_q[j], ax));
  }
  IterateState next;
  next.x = sets::project(problem.set_c, state.x - (1.0 / tau) * grad);
  next.k = state.k + 1;
  return next;
}

}  // namespace

IterateState step_pg_sf3(const IterateState& state, const objectives::ProblemInstance& problem,
                         const SolverConfig& config, const StepContext* /*ctx*/) {
  check_state_x(state, problem);
  return cq_simultaneous_step(state, problem, required(config.tau, "tau"));
}

IterateState step_cq_multiset(const IterateState& state,
                              const objectives::ProblemInstance& problem,
                              const SolverConfig& config, const StepContext* /*ctx*/) {
  check_state_x(state, problem);
  return cq_simultaneous_step(state, problem, required(config.tau, "tau"));
}

IterateState step_wpadmm_sf4(const IterateState& state, const objectives::ProblemInstance& problem,
                             const SolverConfig& config, const StepContext* ctx) {
  check_state_x(state, problem);
  std::shared_ptr<const StepContext> local;
  const StepContext& c = ensure_context(problem, config, ctx, local);
  const double rho = required(config.rho, "rho");
  const double tau = required(config.tau, "tau");
  const auto& map = problem.map();
  const Eigen::VectorXd& y = state_y(state);
  state_u(state);  // shape check; the update does not read u^k

  const Eigen::VectorXd ax = linops::apply(map, state.x);
  const Eigen::VectorXd u_next = sets::project(problem.set_q(), ax + y / rho);

  IterateState next;
  if (config.n_mode == NMode::Linearized) {
    next.x = state.x - (1.0 / tau) * ((state.x - sets::project(problem.set_c, state.x)) +
                                      linops::apply_adjoint(map, y) +
                                      rho * linops::apply_adjoint(map, ax - u_next));
  } else {
    // A context built for another mode lacks the factorization; rebuild.
    std::shared_ptr<const StepContext> rebuilt;
    const Eigen::LLT<Eigen::MatrixXd>* llt = c.sf4_llt.get();
    if (llt == nullptr) {
      rebuilt = make_step_context(problem, config);
      llt = rebuilt->sf4_llt.get();
    }
    if (llt == nullptr) {
      throw std::invalid_argument("wpadmm-sf4: prox-identity step requires rho and tau");
    }
    const Eigen::VectorXd c_vec =
        tau * state.x - linops::apply_adjoint(map, y) + rho * linops::apply_adjoint(map, u_next);
    next.x = sf4_prox_solve(problem.set_c, *llt, c_vec, state.x, config);
  }
  next.u = u_next;
  next.y = y + rho * (linops::apply(map, next.x) - u_next);
  next.k = state.k + 1;
  return next;
}

// -------------------------------------------------------------------------
// Driver.
// -------------------------------------------------------------------------

namespace {

IterateState dispatch_step(const IterateState& state, const objectives::ProblemInstance& problem,
                           const SolverConfig& config, const StepContext* ctx) {
  switch (config.algorithm) {
    case AlgorithmId::PADMM_SF1: return step_padmm_sf1(state, problem, config, ctx);
    case AlgorithmId::PG_SF1P: return step_pg_sf1p(state, problem, config, ctx);
    case AlgorithmId::AM_SF1P: return step_am_sf1p(state, problem, config, ctx);
    case AlgorithmId::CQ_SF1P: return step_cq_sf1p(state, problem, config, ctx);
    case AlgorithmId::PG_SF3: return step_pg_sf3(state, problem, config, ctx);
    case AlgorithmId::WPADMM_SF4: return step_wpadmm_sf4(state, problem, config, ctx);
    case AlgorithmId::CQ_MULTISET: return step_cq_multiset(state, problem, config, ctx);
  }
  throw std::invalid_argument("run: unknown algorithm");
}

TraceRecord make_record(const IterateState& state, const objectives::ProblemInstance& problem,
                        const SolverConfig& config, double step_x,
                        std::optional<double> step_u) {
  TraceRecord rec;
  rec.k = state.k;
  rec.x = state.x;
  rec.u = state.u;
  rec.y = state.y;
  rec.step_norm_x = step_x;
  rec.step_norm_u = step_u;

  switch (config.algorithm) {
    case AlgorithmId::PADMM_SF1:
      rec.objective = objectives::eval_f1_penalized(problem, state.x, *state.u, *config.lambda);
      rec.lagrangian_value = objectives::eval_augmented_lagrangian(
          problem, state.x, *state.u, *state.y, *config.rho, objectives::LagrangianModel::SF1);
      break;
    case AlgorithmId::PG_SF1P:
    case AlgorithmId::AM_SF1P:
    case AlgorithmId::CQ_SF1P:
      rec.objective = objectives::eval_f1_penalized(problem, state.x, *state.u, *config.lambda);
      break;
    case AlgorithmId::PG_SF3:
    case AlgorithmId::CQ_MULTISET:
      rec.objective = objectives::eval_sf3(problem, state.x);
      break;
    case AlgorithmId::WPADMM_SF4:
      rec.objective = objectives::eval_f2_sf4(problem, state.x);
      rec.lagrangian_value = objectives::eval_augmented_lagrangian(
          problem, state.x, *state.u, *state.y, *config.rho, objectives::LagrangianModel::SF4);
      break;
  }

  const auto [rc, rq] = objectives::residuals(problem, state.x);
  rec.residual_c = rc;
  rec.residual_q = rq;
  return rec;
}

}  // namespace

IterateTrace run(const objectives::ProblemInstance& problem, const SolverConfig& config_in,
                 const Eigen::VectorXd& x0, std::optional<Eigen::VectorXd> u0,
                 std::optional<Eigen::VectorXd> y0) {
  objectives::validate(problem);
  const SolverConfig config = resolve_defaults(config_in, problem);
  std::vector<std::string> warnings = validate_config(config, problem);

  if (x0.size() != problem.dim_x()) {
    std::ostringstream msg;
    msg << "run: x0 has length " << x0.size() << ", problem dimension is " << problem.dim_x();
    throw DimensionError(msg.str());
  }
  const AlgorithmId alg = config.algorithm;
  const bool accepts_u0 = alg == AlgorithmId::PADMM_SF1 || alg == AlgorithmId::PG_SF1P ||
                          alg == AlgorithmId::WPADMM_SF4;
  if (u0 && !accepts_u0) {
    throw std::invalid_argument("run: this algorithm derives its split variable internally; "
                                "do not pass u0");
  }
  if (y0 && !is_lagrangian(alg)) {
    throw std::invalid_argument("run: y0 is only accepted by Lagrangian algorithms");
  }

  IterateState state;
  state.x = x0;
  state.k = 0;
  if (has_split_variable(alg)) {
    const auto& map = problem.map();
    if (u0) {
      if (u0->size() != map.rows()) throw DimensionError("run: u0 dimension does not match A");
      state.u = std::move(*u0);
    } else {
      state.u = sets::project(problem.set_q(), linops::apply(map, x0));
    }
  }
  if (is_lagrangian(alg)) {
    const auto& map = problem.map();
    if (y0) {
      if (y0->size() != map.rows()) throw DimensionError("run: y0 dimension does not match A");
      state.y = std::move(*y0);
    } else {
      state.y = Eigen::VectorXd::Zero(map.rows());
    }
  }

  const auto ctx = make_step_context(problem, config);

  IterateTrace trace;
  trace.config = config;
  trace.problem_digest = objectives::problem_digest(problem);
  trace.warnings = std::move(warnings);
  trace.termination_reason = TerminationReason::MaxIter;
  trace.records.reserve(static_cast<std::size_t>(config.max_iter) + 1);

  trace.records.push_back(make_record(state, problem, config, 0.0,
                                      state.u ? std::optional<double>(0.0) : std::nullopt));
  if (trace.records.back().residual_c <= config.residual_tol &&
      trace.records.back().residual_q <= config.residual_tol) {
    trace.termination_reason = TerminationReason::ResidualTol;
    return trace;
  }

  for (int k = 0; k < config.max_iter; ++k) {
    IterateState next = dispatch_step(state, problem, config, ctx.get());
    const double step_x = (next.x - state.x).norm();
    std::optional<double> step_u;
    if (next.u && state.u) step_u = (*next.u - *state.u).norm();
    trace.records.push_back(make_record(next, problem, config, step_x, step_u));
    state = std::move(next);

    const auto& rec = trace.records.back();
    if (rec.residual_c <= config.residual_tol && rec.residual_q <= config.residual_tol) {
      trace.termination_reason = TerminationReason::ResidualTol;
      break;
    }
    if (step_x <= config.step_tol) {
      trace.termination_reason = TerminationReason::StepTol;
      break;
    }
  }
  return trace;
}

}  // namespace splitfeas::solvers
