#include "splitfeas/objectives.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "splitfeas/errors.hpp"

namespace splitfeas::objectives {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_single_set(const ProblemInstance& problem, const char* op) {
  if (problem.multiset()) {
    throw std::invalid_argument(std::string(op) + ": defined for single-set problems only");
  }
}

void check_x(const ProblemInstance& problem, const Eigen::VectorXd& x, const char* op) {
  if (x.size() != problem.dim_x()) {
    std::ostringstream msg;
    msg << op << ": x has length " << x.size() << ", problem dimension is " << problem.dim_x();
    throw DimensionError(msg.str());
  }
}

// FNV-1a, seeded per object kind.
struct Fnv {
  std::uint64_t state = 1469598103934665603ull;
  void feed_bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state ^= p[i];
      state *= 1099511628211ull;
    }
  }
  void feed(double v) { feed_bytes(&v, sizeof v); }
  void feed(std::uint64_t v) { feed_bytes(&v, sizeof v); }
  void feed(std::string_view s) { feed_bytes(s.data(), s.size()); }
  void feed(const Eigen::VectorXd& v) {
    feed(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) feed(v[i]);
  }
  void feed(const Eigen::MatrixXd& m) {
    feed(static_cast<std::uint64_t>(m.rows()));
    feed(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) feed(m(i, j));
    }
  }
};

void feed_set(Fnv& h, const sets::SetSpec& set) {
  h.feed(sets::kind_name(set));
  struct Visitor {
    Fnv& h;
    void operator()(const sets::Box& b) const {
      h.feed(b.lower);
      h.feed(b.upper);
    }
    void operator()(const sets::Ball& b) const {
      h.feed(b.center);
      h.feed(b.radius);
    }
    void operator()(const sets::Halfspace& hs) const {
      h.feed(hs.normal);
      h.feed(hs.offset);
    }
    void operator()(const sets::Hyperplane& hp) const {
      h.feed(hp.normal);
      h.feed(hp.offset);
    }
    void operator()(const sets::AffineSubspace& a) const {
      h.feed(a.basis);
      h.feed(a.anchor);
    }
    void operator()(const sets::Simplex& s) const {
      h.feed(static_cast<std::uint64_t>(s.dimension));
      h.feed(s.scale);
    }
    void operator()(const sets::SparsityBall& s) const {
      h.feed(static_cast<std::uint64_t>(s.dimension));
      h.feed(static_cast<std::uint64_t>(s.max_nonzeros));
    }
    void operator()(const sets::Sphere& s) const {
      h.feed(s.center);
      h.feed(s.radius);
    }
    void operator()(const sets::FiniteSet& f) const {
      h.feed(static_cast<std::uint64_t>(f.points.size()));
      for (const auto& p : f.points) h.feed(p);
    }
    void operator()(const sets::UnionOfConvex& u) const {
      h.feed(static_cast<std::uint64_t>(u.members.size()));
      for (const auto& m : u.members) feed_set(h, sets::to_set_spec(m));
    }
  };
  std::visit(Visitor{h}, set);
}

}  // namespace

const linops::LinearMap& ProblemInstance::map() const {
  if (multiset()) {
    throw std::invalid_argument("ProblemInstance::map: multiset problem has several maps");
  }
  return maps.front();
}

const sets::SetSpec& ProblemInstance::set_q() const {
  if (multiset()) {
    throw std::invalid_argument("ProblemInstance::set_q: multiset problem has several sets");
  }
  return sets_q.front();
}

void validate(const ProblemInstance& problem) {
  if (problem.maps.empty() || problem.maps.size() != problem.sets_q.size()) {
    throw std::invalid_argument("problem: maps and sets_q must be nonempty lists of equal length");
  }
  sets::validate(problem.set_c);
  const Eigen::Index n = problem.dim_x();
  for (std::size_t j = 0; j < problem.maps.size(); ++j) {
    const auto& map = problem.maps[j];
    if (map.cols() != n) {
      std::ostringstream msg;
      msg << "problem: maps[" << j << "] has " << map.cols() << " cols, expected " << n;
      throw std::invalid_argument(msg.str());
    }
    sets::validate(problem.sets_q[j]);
    if (sets::dimension(problem.sets_q[j]) != map.rows()) {
      std::ostringstream msg;
      msg << "problem: sets_q[" << j << "] dimension " << sets::dimension(problem.sets_q[j])
          << " does not match maps[" << j << "] rows " << map.rows();
      throw std::invalid_argument(msg.str());
    }
  }
  if (problem.consistency_witness) {
    if (problem.consistency_witness->size() != n) {
      throw std::invalid_argument("problem: witness dimension does not match C");
    }
    const auto [rc, rq] = residuals(problem, *problem.consistency_witness);
    if (rc > 1e-9 || rq > 1e-9) {
      std::ostringstream msg;
      msg << "problem: consistency witness has residuals (" << rc << ", " << rq
          << ") above 1e-9";
      throw std::invalid_argument(msg.str());
    }
  }
  if (problem.infeasibility_margin && !(*problem.infeasibility_margin > 0.0)) {
    throw std::invalid_argument("problem: infeasibility margin must be positive when present");
  }
}

ObjectiveValue eval_f1_penalized(const ProblemInstance& problem, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, double lambda) {
  check_single_set(problem, "eval_f1_penalized");
  check_x(problem, x, "eval_f1_penalized");
  if (u.size() != problem.map().rows()) {
    throw DimensionError("eval_f1_penalized: u dimension does not match map rows");
  }
  ObjectiveValue out;
  const Eigen::VectorXd ax = linops::apply(problem.map(), x);
  out.feasibility_x = sets::distance(problem.set_c, x);
  out.feasibility_u = sets::distance(problem.set_q(), u);
  out.constraint_gap = (ax - u).norm();
  out.coupling = 0.5 * lambda * (ax - u).squaredNorm();
  const bool feasible =
      out.feasibility_x <= sets::kMembershipTol && out.feasibility_u <= sets::kMembershipTol;
  out.value = feasible ? out.coupling : kInf;
  return out;
}

ObjectiveValue eval_sf3(const ProblemInstance& problem, const Eigen::VectorXd& x) {
  check_x(problem, x, "eval_sf3");
  ObjectiveValue out;
  out.feasibility_x = sets::distance(problem.set_c, x);
  double coupling = 0.0;
  double worst = 0.0;
  for (std::size_t j = 0; j < problem.maps.size(); ++j) {
    const double dj = sets::distance(problem.sets_q[j], linops::apply(problem.maps[j], x));
    coupling += 0.5 * dj * dj;
    worst = std::max(worst, dj);
  }
  out.coupling = coupling;
  out.feasibility_u = worst;
  out.constraint_gap = 0.0;
  out.value = out.feasibility_x <= sets::kMembershipTol ? coupling : kInf;
  return out;
}

ObjectiveValue eval_f2_sf4(const ProblemInstance& problem, const Eigen::VectorXd& x) {
  check_single_set(problem, "eval_f2_sf4");
  check_x(problem, x, "eval_f2_sf4");
  ObjectiveValue out;
  const Eigen::VectorXd ax = linops::apply(problem.map(), x);
  out.feasibility_x = sets::distance(problem.set_c, x);
  out.feasibility_u = sets::distance(problem.set_q(), ax);
  out.constraint_gap = 0.0;
  out.coupling = 0.5 * out.feasibility_x * out.feasibility_x;
  out.value = out.feasibility_u <= sets::kMembershipTol ? out.coupling : kInf;
  return out;
}

double eval_augmented_lagrangian(const ProblemInstance& problem, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u, const Eigen::VectorXd& y, double rho,
                                 LagrangianModel model) {
  check_single_set(problem, "eval_augmented_lagrangian");
  check_x(problem, x, "eval_augmented_lagrangian");
  const auto& map = problem.map();
  if (u.size() != map.rows() || y.size() != map.rows()) {
    throw DimensionError("eval_augmented_lagrangian: u/y dimension does not match map rows");
  }
  const Eigen::VectorXd gap = linops::apply(map, x) - u;
  const double multiplier_terms = y.dot(gap) + 0.5 * rho * gap.squaredNorm();

  const double du = sets::distance(problem.set_q(), u);
  if (du > sets::kMembershipTol) return kInf;

  if (model == LagrangianModel::SF1) {
    const double dx = sets::distance(problem.set_c, x);
    if (dx > sets::kMembershipTol) return kInf;
    return multiplier_terms;
  }
  const double dx = sets::distance(problem.set_c, x);
  return 0.5 * dx * dx + multiplier_terms;
}

std::pair<double, double> residuals(const ProblemInstance& problem, const Eigen::VectorXd& x) {
  check_x(problem, x, "residuals");
  const double rc = sets::distance(problem.set_c, x);
  double rq = 0.0;
  for (std::size_t j = 0; j < problem.maps.size(); ++j) {
    rq = std::max(rq, sets::distance(problem.sets_q[j], linops::apply(problem.maps[j], x)));
  }
  return {rc, rq};
}

std::string problem_digest(const ProblemInstance& problem) {
  Fnv h;
  feed_set(h, problem.set_c);
  h.feed(static_cast<std::uint64_t>(problem.maps.size()));
  for (std::size_t j = 0; j < problem.maps.size(); ++j) {
    h.feed(problem.maps[j].entries());
    feed_set(h, problem.sets_q[j]);
  }
  if (problem.consistency_witness) h.feed(*problem.consistency_witness);
  if (problem.infeasibility_margin) h.feed(*problem.infeasibility_margin);
  std::ostringstream out;
  out << std::hex << h.state;
  return out.str();
}

}  // namespace splitfeas::objectives
