#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "splitfeas/solvers.hpp"

namespace splitfeas::problems {

/// Catalog families the generator can realize. UnionBoxes produces a
/// non-convex union of two disjoint boxes.
enum class SetFamily { Ball, Box, Simplex, SparsityBall, Sphere, FiniteSet, UnionBoxes };

std::string_view to_string(SetFamily family);
std::optional<SetFamily> family_from_string(std::string_view name);

struct GeneratorSpec {
  Eigen::Index n = 0;
  std::vector<Eigen::Index> m;          // one entry per block
  SetFamily set_family_c = SetFamily::Ball;
  std::vector<SetFamily> set_family_q;  // size 1 (applied to all blocks) or m.size()
  bool consistent = true;
  std::uint64_t seed = 0;
  std::optional<std::vector<double>> spectrum;  // singular values, length min(m, n)
  /// When set to WPADMM_SF4, reshapes the spectrum so the requirements on A
  /// hold: full row rank for prox-identity, square with kappa(A^T A) < 2 for
  /// linearized. Ignored for the unrestricted algorithms.
  std::optional<AlgorithmId> enforce_requirements_for;
  NMode enforce_mode = NMode::ProxIdentity;
};

/// Deterministic in seed. Consistent instances carry a stored witness with
/// residuals (0, 0); inconsistent generation is supported for ball/box
/// geometry only and records a certified separation margin.
objectives::ProblemInstance generate(const GeneratorSpec& spec);

void save_problem(const objectives::ProblemInstance& problem, const std::filesystem::path& path);
objectives::ProblemInstance load_problem(const std::filesystem::path& path);

/// Serialized problem document (the save_problem payload) for byte-level
/// comparisons in tests.
std::string problem_to_string(const objectives::ProblemInstance& problem);

/// Writes the per-iteration CSV (header
/// k,step_norm_x,step_norm_u,residual_C,residual_Q,objective,lagrangian) and a
/// companion JSON next to it; the JSON carries full iterate vectors only when
/// full_vectors is set.
void save_trace(const solvers::IterateTrace& trace, const std::filesystem::path& csv_path,
                bool full_vectors);
solvers::IterateTrace load_trace(const std::filesystem::path& json_path);

std::string trace_csv_string(const solvers::IterateTrace& trace);

/// Reads a solver configuration document (same schema as the trace "config"
/// block).
solvers::SolverConfig load_config(const std::filesystem::path& path);

}  // namespace splitfeas::problems
