#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splitfeas/objectives.hpp"

namespace splitfeas::solvers {

/// Algorithm selector plus every scalar the update rules leave to the user.
/// lambda/rho/tau/tau1/tau2 may be left unset and filled by resolve_defaults.
struct SolverConfig {
  AlgorithmId algorithm = AlgorithmId::CQ_SF1P;
  std::optional<double> lambda;  // penalty of the penalized coupling
  std::optional<double> rho;     // augmented-Lagrangian penalty
  std::optional<double> tau;     // step size / proximal weight
  std::optional<double> tau1;    // PADMM_SF1 u-proximal weight
  std::optional<double> tau2;    // PADMM_SF1 x-proximal weight
  NMode n_mode = NMode::ProxIdentity;
  int max_iter = 10000;
  double residual_tol = 1e-8;
  double step_tol = 1e-14;
  double inner_tol = 1e-10;
  int inner_max_iter = 200000;
  bool override_requirements = false;
};

/// Fills unset scalars:
///   lambda = 1; tau1 = tau2 = 1; rho = 10 * max(1, lambda_max(A^T A));
///   tau: CQ 1.01*lambda*lambda_max, PG_SF1P 1.01*lambda*(lambda_max+1),
///        PG_SF3 1.01*lambda_max, WPADMM prox 1 / linearized 1.01*rho*lambda_max,
///        multiset 1.01*sum_j lambda_max_j, PADMM_SF1 1.
SolverConfig resolve_defaults(SolverConfig config, const objectives::ProblemInstance& problem);

/// Enforces the step-size bounds and, unless override_requirements is set, the
/// per-algorithm requirements on A and the convexity preconditions. Throws
/// RequirementError. Returns warnings for overridden or advisory conditions.
std::vector<std::string> validate_config(const SolverConfig& config,
                                         const objectives::ProblemInstance& problem);

struct IterateState {
  Eigen::VectorXd x;
  std::optional<Eigen::VectorXd> u;
  std::optional<Eigen::VectorXd> y;
  int k = 0;
};

struct TraceRecord {
  int k = 0;
  Eigen::VectorXd x;
  std::optional<Eigen::VectorXd> u;
  std::optional<Eigen::VectorXd> y;
  objectives::ObjectiveValue objective;
  double step_norm_x = 0.0;
  std::optional<double> step_norm_u;
  double residual_c = 0.0;
  double residual_q = 0.0;
  std::optional<double> lagrangian_value;
};

enum class TerminationReason { ResidualTol, StepTol, MaxIter };
std::string_view to_string(TerminationReason reason);
std::optional<TerminationReason> termination_from_string(std::string_view name);

struct IterateTrace {
  std::vector<TraceRecord> records;
  SolverConfig config;  // resolved snapshot
  std::string problem_digest;
  TerminationReason termination_reason = TerminationReason::MaxIter;
  std::vector<std::string> warnings;
  /// False when the trace was loaded from a file saved without full vectors;
  /// certificates then refuse to run.
  bool has_vectors = true;
};

/// Per-run precomputation (spectral summaries, factorization of the SF4
/// prox-identity system). Step functions build one on the fly when none is
/// supplied, so they stay pure; run() caches one.
class StepContext;
std::shared_ptr<const StepContext> make_step_context(const objectives::ProblemInstance& problem,
                                                     const SolverConfig& config);

IterateState step_padmm_sf1(const IterateState& state, const objectives::ProblemInstance& problem,
                            const SolverConfig& config, const StepContext* ctx = nullptr);
IterateState step_pg_sf1p(const IterateState& state, const objectives::ProblemInstance& problem,
                          const SolverConfig& config, const StepContext* ctx = nullptr);
IterateState step_am_sf1p(const IterateState& state, const objectives::ProblemInstance& problem,
                          const SolverConfig& config, const StepContext* ctx = nullptr);
IterateState step_cq_sf1p(const IterateState& state, const objectives::ProblemInstance& problem,
                          const SolverConfig& config, const StepContext* ctx = nullptr);
IterateState step_pg_sf3(const IterateState& state, const objectives::ProblemInstance& problem,
                         const SolverConfig& config, const StepContext* ctx = nullptr);
IterateState step_wpadmm_sf4(const IterateState& state, const objectives::ProblemInstance& problem,
                             const SolverConfig& config, const StepContext* ctx = nullptr);
IterateState step_cq_multiset(const IterateState& state, const objectives::ProblemInstance& problem,
                              const SolverConfig& config, const StepContext* ctx = nullptr);

/// Drives the per-iteration rule until residuals(problem, x) <= residual_tol,
/// the step norm falls below step_tol, or max_iter. Records every iterate.
/// u0/y0 are accepted only by algorithms whose initialization reads them
/// (PADMM_SF1, PG_SF1P, WPADMM_SF4); when omitted there, u0 = P_Q(A x0) and
/// y0 = 0. AM_SF1P and CQ_SF1P derive their split variable internally.
IterateTrace run(const objectives::ProblemInstance& problem, const SolverConfig& config,
                 const Eigen::VectorXd& x0, std::optional<Eigen::VectorXd> u0 = {},
                 std::optional<Eigen::VectorXd> y0 = {});

}  // namespace splitfeas::solvers
