#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "splitfeas/linops.hpp"
#include "splitfeas/sets.hpp"

namespace splitfeas::objectives {

/// Which augmented Lagrangian to evaluate: indicator-only (split SF1) or
/// half-squared-distance-plus-indicator (split SF4).
enum class LagrangianModel { SF1, SF4 };

/// A split-feasibility instance: find x in C with A_j x in Q_j for every j.
/// Single-set problems have one block; multiset problems have r >= 2.
struct ProblemInstance {
  sets::SetSpec set_c;
  std::vector<linops::LinearMap> maps;
  std::vector<sets::SetSpec> sets_q;
  std::optional<Eigen::VectorXd> consistency_witness;
  /// Certified separation between A(C) and Q for generated inconsistent
  /// instances; absent otherwise.
  std::optional<double> infeasibility_margin;

  Eigen::Index dim_x() const { return sets::dimension(set_c); }
  std::size_t blocks() const { return maps.size(); }
  bool multiset() const { return maps.size() > 1; }
  const linops::LinearMap& map() const;
  const sets::SetSpec& set_q() const;
};

/// Checks list lengths, the dimension chain, and (when present) that the
/// witness residuals are below 1e-9. Throws std::invalid_argument.
void validate(const ProblemInstance& problem);

struct ObjectiveValue {
  double value = 0.0;          // +inf exactly when an indicator term is violated
  double coupling = 0.0;       // smooth term: (lambda/2)||Ax-u||^2 or the distance term
  double feasibility_x = 0.0;  // d_C(x)
  double feasibility_u = 0.0;  // d_Q(u), or max_j d_Qj(A_j x) without a split variable
  double constraint_gap = 0.0; // ||Ax - u||; 0 when there is no split variable
};

/// F1(x, u) = delta_C(x) + delta_Q(u) + (lambda/2)||Ax - u||^2.
ObjectiveValue eval_f1_penalized(const ProblemInstance& problem, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, double lambda);

/// delta_C(x) + (1/2) d_Q^2(Ax); multiset instances sum the blocks.
ObjectiveValue eval_sf3(const ProblemInstance& problem, const Eigen::VectorXd& x);

/// F2(x) = (1/2) d_C^2(x) + delta_Q(Ax).
ObjectiveValue eval_f2_sf4(const ProblemInstance& problem, const Eigen::VectorXd& x);

/// L_rho(x, u, y) for the chosen model; the SF4 variant uses the (1/2) d_C^2
/// convention matching the implemented updates.
double eval_augmented_lagrangian(const ProblemInstance& problem, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& y, double rho,
                                 LagrangianModel model);

/// (d_C(x), max_j d_Qj(A_j x)); both below tolerance certifies an approximate
/// solution of the feasibility problem.
std::pair<double, double> residuals(const ProblemInstance& problem, const Eigen::VectorXd& x);

/// Stable structural hash (FNV-1a over kinds, dimensions and entries), hex.
std::string problem_digest(const ProblemInstance& problem);

}  // namespace splitfeas::objectives
