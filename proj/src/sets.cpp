#include "splitfeas/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "splitfeas/errors.hpp"

namespace splitfeas::sets {

namespace {

void check_dim(const SetSpec& set, const Eigen::VectorXd& u) {
  const Eigen::Index d = dimension(set);
  if (u.size() != d) {
    std::ostringstream msg;
    msg << kind_name(set) << ": point dimension " << u.size() << " does not match set dimension "
        << d;
    throw DimensionError(msg.str());
  }
}

Eigen::VectorXd project_box(const Box& b, const Eigen::VectorXd& u) {
  return u.cwiseMax(b.lower).cwiseMin(b.upper);
}

Eigen::VectorXd project_ball(const Ball& b, const Eigen::VectorXd& u) {
  const Eigen::VectorXd diff = u - b.center;
  const double norm = diff.norm();
  if (norm <= b.radius) return u;
  return b.center + (b.radius / norm) * diff;
}

Eigen::VectorXd project_halfspace(const Halfspace& h, const Eigen::VectorXd& u) {
  const double excess = h.normal.dot(u) - h.offset;
  if (excess <= 0.0) return u;
  return u - (excess / h.normal.squaredNorm()) * h.normal;
}

Eigen::VectorXd project_hyperplane(const Hyperplane& h, const Eigen::VectorXd& u) {
  const double gap = h.normal.dot(u) - h.offset;
  return u - (gap / h.normal.squaredNorm()) * h.normal;
}

Eigen::VectorXd project_affine(const AffineSubspace& a, const Eigen::VectorXd& u) {
  const Eigen::VectorXd shifted = u - a.anchor;
  return a.anchor + a.basis * (a.basis.transpose() * shifted);
}

// Sort-based projection onto {v >= 0 : sum v = scale}.
Eigen::VectorXd project_simplex(const Simplex& s, const Eigen::VectorXd& u) {
  const Eigen::Index d = s.dimension;
  std::vector<double> sorted(u.data(), u.data() + d);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  Eigen::Index active = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - s.scale) / static_cast<double>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) {
      theta = candidate;
      active = j + 1;
    }
  }
  (void)active;
  Eigen::VectorXd out(d);
  for (Eigen::Index i = 0; i < d; ++i) out[i] = std::max(u[i] - theta, 0.0);
  return out;
}

// Keep the max_nonzeros largest-magnitude entries; ties to the lowest index.
Eigen::VectorXd project_sparsity(const SparsityBall& s, const Eigen::VectorXd& u) {
  const Eigen::Index d = s.dimension;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&u](Eigen::Index i, Eigen::Index j) {
    return std::abs(u[i]) > std::abs(u[j]);
  });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  for (Eigen::Index r = 0; r < s.max_nonzeros && r < d; ++r) {
    const Eigen::Index i = order[static_cast<std::size_t>(r)];
    out[i] = u[i];
  }
  return out;
}

Eigen::VectorXd project_sphere(const Sphere& s, const Eigen::VectorXd& u) {
  const Eigen::VectorXd diff = u - s.center;
  const double norm = diff.norm();
  if (norm == 0.0) {
    Eigen::VectorXd out = s.center;
    out[0] += s.radius;
    return out;
  }
  return s.center + (s.radius / norm) * diff;
}

Eigen::VectorXd project_finite(const FiniteSet& f, const Eigen::VectorXd& u) {
  std::size_t best = 0;
  double best_sq = (u - f.points[0]).squaredNorm();
  for (std::size_t i = 1; i < f.points.size(); ++i) {
    const double sq = (u - f.points[i]).squaredNorm();
    if (sq < best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  return f.points[best];
}

Eigen::VectorXd project_union(const UnionOfConvex& un, const Eigen::VectorXd& u) {
  Eigen::VectorXd best;
  double best_sq = std::numeric_limits<double>::infinity();
  for (const ConvexSetSpec& member : un.members) {
    const Eigen::VectorXd candidate = project(to_set_spec(member), u);
    const double sq = (u - candidate).squaredNorm();
    if (sq < best_sq) {
      best_sq = sq;
      best = candidate;
    }
  }
  return best;
}

void validate_nonzero(const Eigen::VectorXd& normal, const char* kind) {
  if (normal.size() < 1) throw std::invalid_argument(std::string(kind) + ": empty normal");
  if (normal.norm() == 0.0) throw std::invalid_argument(std::string(kind) + ": zero normal");
}

}  // namespace

SetSpec to_set_spec(const ConvexSetSpec& convex) {
  return std::visit([](const auto& v) -> SetSpec { return v; }, convex);
}

Eigen::Index dimension(const SetSpec& set) {
  struct Visitor {
    Eigen::Index operator()(const Box& b) const { return b.lower.size(); }
    Eigen::Index operator()(const Ball& b) const { return b.center.size(); }
    Eigen::Index operator()(const Halfspace& h) const { return h.normal.size(); }
    Eigen::Index operator()(const Hyperplane& h) const { return h.normal.size(); }
    Eigen::Index operator()(const AffineSubspace& a) const { return a.anchor.size(); }
    Eigen::Index operator()(const Simplex& s) const { return s.dimension; }
    Eigen::Index operator()(const SparsityBall& s) const { return s.dimension; }
    Eigen::Index operator()(const Sphere& s) const { return s.center.size(); }
    Eigen::Index operator()(const FiniteSet& f) const {
      return f.points.empty() ? 0 : f.points.front().size();
    }
    Eigen::Index operator()(const UnionOfConvex& u) const {
      return u.members.empty() ? 0 : dimension(to_set_spec(u.members.front()));
    }
  };
  return std::visit(Visitor{}, set);
}

bool is_convex(const SetSpec& set) {
  struct Visitor {
    bool operator()(const Box&) const { return true; }
    bool operator()(const Ball&) const { return true; }
    bool operator()(const Halfspace&) const { return true; }
    bool operator()(const Hyperplane&) const { return true; }
    bool operator()(const AffineSubspace&) const { return true; }
    bool operator()(const Simplex&) const { return true; }
    bool operator()(const SparsityBall&) const { return false; }
    bool operator()(const Sphere&) const { return false; }
    bool operator()(const FiniteSet&) const { return false; }
    bool operator()(const UnionOfConvex&) const { return false; }
  };
  return std::visit(Visitor{}, set);
}

std::string_view kind_name(const SetSpec& set) {
  struct Visitor {
    std::string_view operator()(const Box&) const { return "box"; }
    std::string_view operator()(const Ball&) const { return "ball"; }
    std::string_view operator()(const Halfspace&) const { return "halfspace"; }
    std::string_view operator()(const Hyperplane&) const { return "hyperplane"; }
    std::string_view operator()(const AffineSubspace&) const { return "affine_subspace"; }
    std::string_view operator()(const Simplex&) const { return "simplex"; }
    std::string_view operator()(const SparsityBall&) const { return "sparsity_ball"; }
    std::string_view operator()(const Sphere&) const { return "sphere"; }
    std::string_view operator()(const FiniteSet&) const { return "finite_set"; }
    std::string_view operator()(const UnionOfConvex&) const { return "union_of_convex"; }
  };
  return std::visit(Visitor{}, set);
}

void validate(const SetSpec& set) {
  struct Visitor {
    void operator()(const Box& b) const {
      if (b.lower.size() != b.upper.size()) {
        throw std::invalid_argument("box: lower and upper dimensions differ");
      }
      if (b.lower.size() < 1) throw std::invalid_argument("box: empty bounds");
      if ((b.lower.array() > b.upper.array()).any()) {
        throw std::invalid_argument("box: lower > upper violates lower <= upper");
      }
    }
    void operator()(const Ball& b) const {
      if (b.center.size() < 1) throw std::invalid_argument("ball: empty center");
      if (!(b.radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
    }
    void operator()(const Halfspace& h) const { validate_nonzero(h.normal, "halfspace"); }
    void operator()(const Hyperplane& h) const { validate_nonzero(h.normal, "hyperplane"); }
    void operator()(const AffineSubspace& a) const {
      if (a.anchor.size() < 1) throw std::invalid_argument("affine_subspace: empty anchor");
      if (a.basis.rows() != a.anchor.size()) {
        throw std::invalid_argument("affine_subspace: basis rows != anchor dimension");
      }
      if (a.basis.cols() < 1 || a.basis.cols() > a.basis.rows()) {
        throw std::invalid_argument("affine_subspace: basis must have 1..dim columns");
      }
      const Eigen::MatrixXd gram = a.basis.transpose() * a.basis;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(a.basis.cols(), a.basis.cols());
      if ((gram - eye).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("affine_subspace: basis columns are not orthonormal");
      }
    }
    void operator()(const Simplex& s) const {
      if (s.dimension < 1) throw std::invalid_argument("simplex: dimension must be positive");
      if (!(s.scale > 0.0)) throw std::invalid_argument("simplex: scale must be positive");
    }
    void operator()(const SparsityBall& s) const {
      if (s.dimension < 1) throw std::invalid_argument("sparsity_ball: dimension must be positive");
      if (s.max_nonzeros < 1 || s.max_nonzeros > s.dimension) {
        throw std::invalid_argument("sparsity_ball: need 1 <= s <= dimension");
      }
    }
    void operator()(const Sphere& s) const {
      if (s.center.size() < 1) throw std::invalid_argument("sphere: empty center");
      if (!(s.radius > 0.0)) throw std::invalid_argument("sphere: radius must be positive");
    }
    void operator()(const FiniteSet& f) const {
      if (f.points.empty()) throw std::invalid_argument("finite_set: point list must be nonempty");
      const Eigen::Index d = f.points.front().size();
      if (d < 1) throw std::invalid_argument("finite_set: empty points");
      for (const auto& p : f.points) {
        if (p.size() != d) throw std::invalid_argument("finite_set: inconsistent point dimensions");
      }
    }
    void operator()(const UnionOfConvex& u) const {
      if (u.members.empty()) {
        throw std::invalid_argument("union_of_convex: member list must be nonempty");
      }
      const Eigen::Index d = dimension(to_set_spec(u.members.front()));
      for (const auto& member : u.members) {
        const SetSpec spec = to_set_spec(member);
        validate(spec);
        if (dimension(spec) != d) {
          throw std::invalid_argument("union_of_convex: inconsistent member dimensions");
        }
      }
    }
  };
  std::visit(Visitor{}, set);
}

Eigen::VectorXd project(const SetSpec& set, const Eigen::VectorXd& u) {
  check_dim(set, u);
  struct Visitor {
    const Eigen::VectorXd& u;
    Eigen::VectorXd operator()(const Box& b) const { return project_box(b, u); }
    Eigen::VectorXd operator()(const Ball& b) const { return project_ball(b, u); }
    Eigen::VectorXd operator()(const Halfspace& h) const { return project_halfspace(h, u); }
    Eigen::VectorXd operator()(const Hyperplane& h) const { return project_hyperplane(h, u); }
    Eigen::VectorXd operator()(const AffineSubspace& a) const { return project_affine(a, u); }
    Eigen::VectorXd operator()(const Simplex& s) const { return project_simplex(s, u); }
    Eigen::VectorXd operator()(const SparsityBall& s) const { return project_sparsity(s, u); }
    Eigen::VectorXd operator()(const Sphere& s) const { return project_sphere(s, u); }
    Eigen::VectorXd operator()(const FiniteSet& f) const { return project_finite(f, u); }
    Eigen::VectorXd operator()(const UnionOfConvex& un) const { return project_union(un, u); }
  };
  return std::visit(Visitor{u}, set);
}

double distance(const SetSpec& set, const Eigen::VectorXd& u) {
  return (u - project(set, u)).norm();
}

bool is_member(const SetSpec& set, const Eigen::VectorXd& u, double tol) {
  return distance(set, u) <= tol;
}

Eigen::VectorXd half_sq_distance_gradient(const SetSpec& set, const Eigen::VectorXd& u) {
  if (!is_convex(set)) {
    throw std::invalid_argument(std::string("half_sq_distance_gradient: ") +
                                "gradient undefined for non-convex set '" +
                                std::string(kind_name(set)) + "'");
  }
  return u - project(set, u);
}

}  // namespace splitfeas::sets
