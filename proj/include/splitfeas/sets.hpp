#pragma once

#include <Eigen/Dense>
#include <string_view>
#include <variant>
#include <vector>

namespace splitfeas::sets {

/// Absolute tolerance used by is_member and the indicator terms of the
/// objective evaluators.
inline constexpr double kMembershipTol = 1e-9;

// -------------------------------------------------------------------------
// Catalog variants. All are semi-algebraic; the last four are non-convex.
// -------------------------------------------------------------------------

struct Box {
  Eigen::VectorXd lower, upper;
};

struct Ball {
  Eigen::VectorXd center;
  double radius = 1.0;
};

/// {u : <normal, u> <= offset}
struct Halfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;
};

/// {u : <normal, u> == offset}
struct Hyperplane {
  Eigen::VectorXd normal;
  double offset = 0.0;
};

/// {anchor + basis * t}; basis has orthonormal columns.
struct AffineSubspace {
  Eigen::MatrixXd basis;
  Eigen::VectorXd anchor;
};

/// {u >= 0 : sum_i u_i = scale}
struct Simplex {
  Eigen::Index dimension = 0;
  double scale = 1.0;
};

/// {u : ||u||_0 <= max_nonzeros}  (non-convex)
struct SparsityBall {
  Eigen::Index dimension = 0;
  Eigen::Index max_nonzeros = 1;
};

/// {u : ||u - center|| == radius}  (non-convex)
struct Sphere {
  Eigen::VectorXd center;
  double radius = 1.0;
};

struct FiniteSet {
  std::vector<Eigen::VectorXd> points;
};

using ConvexSetSpec = std::variant<Box, Ball, Halfspace, Hyperplane, AffineSubspace, Simplex>;

/// Finite union of convex members; nesting depth is fixed at one by the type.
struct UnionOfConvex {
  std::vector<ConvexSetSpec> members;
};

using SetSpec = std::variant<Box, Ball, Halfspace, Hyperplane, AffineSubspace, Simplex,
                             SparsityBall, Sphere, FiniteSet, UnionOfConvex>;

SetSpec to_set_spec(const ConvexSetSpec& convex);

Eigen::Index dimension(const SetSpec& set);
bool is_convex(const SetSpec& set);
std::string_view kind_name(const SetSpec& set);

/// Checks construction invariants (bounds ordering, nonzero normals,
/// orthonormal basis, consistent member dimensions, ...). Throws
/// std::invalid_argument naming the broken invariant.
void validate(const SetSpec& set);

/// One element of the projection set P_D(u). Multivalued cases use fixed
/// tie-breaking: SparsityBall keeps the largest-magnitude entries (ties to the
/// lowest index), Sphere at its center returns center + radius*e_1, FiniteSet
/// and UnionOfConvex pick the equidistant candidate of lowest index.
Eigen::VectorXd project(const SetSpec& set, const Eigen::VectorXd& u);

/// ||u - project(set, u)||.
double distance(const SetSpec& set, const Eigen::VectorXd& u);

bool is_member(const SetSpec& set, const Eigen::VectorXd& u, double tol = kMembershipTol);

/// Gradient of (1/2) d_D^2 at u, i.e. u - P_D(u). Defined for convex variants
/// only; throws std::invalid_argument otherwise.
Eigen::VectorXd half_sq_distance_gradient(const SetSpec& set, const Eigen::VectorXd& u);

}  // namespace splitfeas::sets
