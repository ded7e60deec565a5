#include "splitfeas/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "splitfeas/errors.hpp"

namespace splitfeas::problems {

using nlohmann::json;

namespace {

constexpr int kProblemVersion = 1;
constexpr int kTraceVersion = 1;

// ---------------------------------------------------------------------
// Seeded draws.
// ---------------------------------------------------------------------

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine);
  }
  Eigen::Index index(Eigen::Index lo, Eigen::Index hi) {  // inclusive bounds
    return std::uniform_int_distribution<Eigen::Index>(lo, hi)(engine);
  }
  Eigen::VectorXd normal_vector(Eigen::Index d) {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal();
    return v;
  }
  Eigen::VectorXd unit_vector(Eigen::Index d) {
    Eigen::VectorXd v = normal_vector(d);
    double n = v.norm();
    while (n < 1e-12) {
      v = normal_vector(d);
      n = v.norm();
    }
    return v / n;
  }
};

// Modified Gram-Schmidt on a seeded standard-normal matrix; columns are
// re-drawn in the (measure-zero) degenerate case.
Eigen::MatrixXd random_orthogonal(Rng& rng, Eigen::Index d) {
  Eigen::MatrixXd q(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::VectorXd v = rng.normal_vector(d);
    for (;;) {
      for (Eigen::Index i = 0; i < j; ++i) v -= q.col(i).dot(v) * q.col(i);
      const double norm = v.norm();
      if (norm > 1e-10) {
        q.col(j) = v / norm;
        break;
      }
      v = rng.normal_vector(d);
    }
  }
  return q;
}

linops::LinearMap build_map(Rng& rng, Eigen::Index m, Eigen::Index n,
                            const std::vector<double>& sigma) {
  const Eigen::MatrixXd u = random_orthogonal(rng, m);
  const Eigen::MatrixXd v = random_orthogonal(rng, n);
  const Eigen::Index p = std::min(m, n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  for (Eigen::Index i = 0; i < p; ++i) {
    a += sigma[static_cast<std::size_t>(i)] * u.col(i) * v.col(i).transpose();
  }
  return linops::LinearMap(std::move(a));
}

bool is_rigid(SetFamily family) {
  return family == SetFamily::Simplex || family == SetFamily::SparsityBall;
}

// Builds a set of the requested family containing `inside` strictly (on the
// sphere for Sphere). Used for both C around x* and Q_j around A_j x*.
sets::SetSpec build_set_around(Rng& rng, SetFamily family, const Eigen::VectorXd& inside) {
  const Eigen::Index d = inside.size();
  switch (family) {
    case SetFamily::Ball: {
      const double radius = rng.uniform(0.8, 1.6);
      const Eigen::VectorXd center =
          inside + rng.uniform(0.0, 0.4) * radius * rng.unit_vector(d);
      return sets::Ball{center, radius};
    }
    case SetFamily::Box: {
      Eigen::VectorXd half(d), shift(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        half[i] = rng.uniform(0.5, 1.5);
        shift[i] = rng.uniform(-0.4, 0.4) * half[i];
      }
      const Eigen::VectorXd center = inside + shift;
      return sets::Box{center - half, center + half};
    }
    case SetFamily::Sphere: {
      const double radius = rng.uniform(0.8, 1.6);
      const Eigen::VectorXd center = inside - radius * rng.unit_vector(d);
      return sets::Sphere{center, radius};
    }
    case SetFamily::FiniteSet: {
      sets::FiniteSet f;
      f.points.push_back(inside);
      const Eigen::Index extras = rng.index(2, 5);
      for (Eigen::Index i = 0; i < extras; ++i) {
        f.points.push_back(inside + rng.uniform(0.8, 2.0) * rng.unit_vector(d));
      }
      return f;
    }
    case SetFamily::UnionBoxes: {
      Eigen::VectorXd half(d);
      for (Eigen::Index i = 0; i < d; ++i) half[i] = rng.uniform(0.4, 1.0);
      sets::Box home{inside - half, inside + half};
      // A disjoint second member, offset along a random axis.
      const Eigen::Index axis = rng.index(0, d - 1);
      Eigen::VectorXd offset = Eigen::VectorXd::Zero(d);
      offset[axis] = (rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * (3.0 * half[axis] + 1.0);
      sets::Box away{home.lower + offset, home.upper + offset};
      return sets::UnionOfConvex{{home, away}};
    }
    case SetFamily::Simplex:
    case SetFamily::SparsityBall:
      break;
  }
  throw std::invalid_argument("generate: cannot build a rigid family around a given point");
}

// Draws an interior-ish point of a freshly generated rigid set.
sets::SetSpec build_rigid_set(Rng& rng, SetFamily family, Eigen::Index d,
                              Eigen::VectorXd& point_out) {
  if (family == SetFamily::Simplex) {
    const double scale = rng.uniform(0.5, 2.0);
    Eigen::VectorXd g(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      g[i] = std::exponential_distribution<double>(1.0)(rng.engine);
    }
    point_out = scale * g / g.sum();
    return sets::Simplex{d, scale};
  }
  // SparsityBall: plant a well-separated s-sparse point.
  const Eigen::Index s = std::max<Eigen::Index>(1, d / 3);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < s; ++i) {
    const Eigen::Index pick = rng.index(i, d - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick)]);
    const double sign = rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    x[idx[static_cast<std::size_t>(i)]] = sign * rng.uniform(0.5, 1.5);
  }
  point_out = x;
  return sets::SparsityBall{d, s};
}

double circumradius(const sets::SetSpec& set) {
  if (const auto* ball = std::get_if<sets::Ball>(&set)) return ball->radius;
  if (const auto* box = std::get_if<sets::Box>(&set)) {
    return (0.5 * (box->upper - box->lower)).norm();
  }
  throw std::invalid_argument("generate: inconsistent instances need ball or box families");
}

Eigen::VectorXd set_center(const sets::SetSpec& set) {
  if (const auto* ball = std::get_if<sets::Ball>(&set)) return ball->center;
  if (const auto* box = std::get_if<sets::Box>(&set)) return 0.5 * (box->lower + box->upper);
  throw std::invalid_argument("generate: inconsistent instances need ball or box families");
}

// ---------------------------------------------------------------------
// Doubles <-> text.
// ---------------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double parse_number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::runtime_error(path + ": expected a number");
}

// ---------------------------------------------------------------------
// JSON encoding with field-path errors.
// ---------------------------------------------------------------------

const json& member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::runtime_error(path + ": missing field '" + key + "'");
  }
  return j.at(key);
}

double number_field(const json& j, const char* key, const std::string& path) {
  return parse_number(member(j, key, path), path + "." + key);
}

Eigen::Index index_field(const json& j, const char* key, const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_number_integer()) {
    throw std::runtime_error(path + "." + key + ": expected an integer");
  }
  return v.get<Eigen::Index>();
}

Eigen::VectorXd vector_field(const json& j, const char* key, const std::string& path) {
  const json& v = member(j, key, path);
  if (!v.is_array()) throw std::runtime_error(path + "." + key + ": expected an array");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] =
        parse_number(v[i], path + "." + key + "[" + std::to_string(i) + "]");
  }
  return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(m(i, j));
  }
  out["entries"] = std::move(entries);
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& path) {
  const Eigen::Index rows = index_field(j, "rows", path);
  const Eigen::Index cols = index_field(j, "cols", path);
  const json& entries = member(j, "entries", path);
  if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != rows * cols) {
    throw std::runtime_error(path + ".entries: expected " + std::to_string(rows * cols) +
                             " row-major entries");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(i, c) = parse_number(entries[static_cast<std::size_t>(i * cols + c)],
                             path + ".entries[" + std::to_string(i * cols + c) + "]");
    }
  }
  return m;
}

json set_to_json(const sets::SetSpec& set) {
  json out;
  out["kind"] = std::string(sets::kind_name(set));
  struct Visitor {
    json& out;
    void operator()(const sets::Box& b) const {
      out["lower"] = vector_to_json(b.lower);
      out["upper"] = vector_to_json(b.upper);
    }
    void operator()(const sets::Ball& b) const {
      out["center"] = vector_to_json(b.center);
      out["radius"] = b.radius;
    }
    void operator()(const sets::Halfspace& h) const {
      out["normal"] = vector_to_json(h.normal);
      out["offset"] = h.offset;
    }
    void operator()(const sets::Hyperplane& h) const {
      out["normal"] = vector_to_json(h.normal);
      out["offset"] = h.offset;
    }
    void operator()(const sets::AffineSubspace& a) const {
      out["basis"] = matrix_to_json(a.basis);
      out["anchor"] = vector_to_json(a.anchor);
    }
    void operator()(const sets::Simplex& s) const {
      out["dimension"] = s.dimension;
      out["scale"] = s.scale;
    }
    void operator()(const sets::SparsityBall& s) const {
      out["dimension"] = s.dimension;
      out["s"] = s.max_nonzeros;
    }
    void operator()(const sets::Sphere& s) const {
      out["center"] = vector_to_json(s.center);
      out["radius"] = s.radius;
    }
    void operator()(const sets::FiniteSet& f) const {
      json pts = json::array();
      for (const auto& p : f.points) pts.push_back(vector_to_json(p));
      out["points"] = std::move(pts);
    }
    void operator()(const sets::UnionOfConvex& u) const {
      json members = json::array();
      for (const auto& m : u.members) members.push_back(set_to_json(sets::to_set_spec(m)));
      out["members"] = std::move(members);
    }
  };
  std::visit(Visitor{out}, set);
  return out;
}

sets::SetSpec set_from_json(const json& j, const std::string& path);

sets::ConvexSetSpec convex_set_from_json(const json& j, const std::string& path) {
  sets::SetSpec spec = set_from_json(j, path);
  return std::visit(
      [&path](auto&& v) -> sets::ConvexSetSpec {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, sets::Box> || std::is_same_v<T, sets::Ball> ||
                      std::is_same_v<T, sets::Halfspace> || std::is_same_v<T, sets::Hyperplane> ||
                      std::is_same_v<T, sets::AffineSubspace> || std::is_same_v<T, sets::Simplex>) {
          return v;
        } else {
          throw std::runtime_error(path + ": union members must be convex variants");
        }
      },
      std::move(spec));
}

sets::SetSpec set_from_json(const json& j, const std::string& path) {
  const json& kind_json = member(j, "kind", path);
  if (!kind_json.is_string()) throw std::runtime_error(path + ".kind: expected a string");
  const std::string kind = kind_json.get<std::string>();

  sets::SetSpec spec;
  if (kind == "box") {
    spec = sets::Box{vector_field(j, "lower", path), vector_field(j, "upper", path)};
  } else if (kind == "ball") {
    spec = sets::Ball{vector_field(j, "center", path), number_field(j, "radius", path)};
  } else if (kind == "halfspace") {
    spec = sets::Halfspace{vector_field(j, "normal", path), number_field(j, "offset", path)};
  } else if (kind == "hyperplane") {
    spec = sets::Hyperplane{vector_field(j, "normal", path), number_field(j, "offset", path)};
  } else if (kind == "affine_subspace") {
    spec = sets::AffineSubspace{matrix_from_json(member(j, "basis", path), path + ".basis"),
                                vector_field(j, "anchor", path)};
  } else if (kind == "simplex") {
    spec = sets::Simplex{index_field(j, "dimension", path), number_field(j, "scale", path)};
  } else if (kind == "sparsity_ball") {
    spec = sets::SparsityBall{index_field(j, "dimension", path), index_field(j, "s", path)};
  } else if (kind == "sphere") {
    spec = sets::Sphere{vector_field(j, "center", path), number_field(j, "radius", path)};
  } else if (kind == "finite_set") {
    const json& pts = member(j, "points", path);
    if (!pts.is_array()) throw std::runtime_error(path + ".points: expected an array");
    sets::FiniteSet f;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string p = path + ".points[" + std::to_string(i) + "]";
      if (!pts[i].is_array()) throw std::runtime_error(p + ": expected an array");
      Eigen::VectorXd point(pts[i].size());
      for (std::size_t c = 0; c < pts[i].size(); ++c) {
        point[static_cast<Eigen::Index>(c)] =
            parse_number(pts[i][c], p + "[" + std::to_string(c) + "]");
      }
      f.points.push_back(std::move(point));
    }
    spec = std::move(f);
  } else if (kind == "union_of_convex") {
    const json& members = member(j, "members", path);
    if (!members.is_array()) throw std::runtime_error(path + ".members: expected an array");
    sets::UnionOfConvex u;
    for (std::size_t i = 0; i < members.size(); ++i) {
      u.members.push_back(
          convex_set_from_json(members[i], path + ".members[" + std::to_string(i) + "]"));
    }
    spec = std::move(u);
  } else {
    throw std::runtime_error(path + ".kind: unknown set kind '" + kind + "'");
  }

  try {
    sets::validate(spec);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return spec;
}

}  // namespace

std::string_view to_string(SetFamily family) {
  switch (family) {
    case SetFamily::Ball: return "ball";
    case SetFamily::Box: return "box";
    case SetFamily::Simplex: return "simplex";
    case SetFamily::SparsityBall: return "sparsity";
    case SetFamily::Sphere: return "sphere";
    case SetFamily::FiniteSet: return "finite";
    case SetFamily::UnionBoxes: return "union-box";
  }
  return "unknown";
}

std::optional<SetFamily> family_from_string(std::string_view name) {
  if (name == "ball") return SetFamily::Ball;
  if (name == "box") return SetFamily::Box;
  if (name == "simplex") return SetFamily::Simplex;
  if (name == "sparsity") return SetFamily::SparsityBall;
  if (name == "sphere") return SetFamily::Sphere;
  if (name == "finite") return SetFamily::FiniteSet;
  if (name == "union-box") return SetFamily::UnionBoxes;
  return std::nullopt;
}

objectives::ProblemInstance generate(const GeneratorSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("generate: n must be positive");
  if (spec.m.empty()) throw std::invalid_argument("generate: need at least one block dimension");
  for (Eigen::Index mj : spec.m) {
    if (mj < 1) throw std::invalid_argument("generate: every m_j must be positive");
  }
  std::vector<SetFamily> q_families = spec.set_family_q;
  if (q_families.empty()) q_families.assign(spec.m.size(), SetFamily::Ball);
  if (q_families.size() == 1 && spec.m.size() > 1) {
    q_families.assign(spec.m.size(), q_families.front());
  }
  if (q_families.size() != spec.m.size()) {
    throw std::invalid_argument("generate: set_family_q must have 1 or m.size() entries");
  }

  Rng rng(spec.seed);
  const std::size_t blocks = spec.m.size();

  // Per-block singular values.
  std::vector<std::vector<double>> sigmas(blocks);
  for (std::size_t j = 0; j < blocks; ++j) {
    const Eigen::Index p = std::min(spec.m[j], spec.n);
    if (spec.spectrum) {
      if (static_cast<Eigen::Index>(spec.spectrum->size()) != p) {
        throw std::invalid_argument("generate: spectrum must have min(m, n) entries");
      }
      sigmas[j] = *spec.spectrum;
      for (double s : sigmas[j]) {
        if (!(s >= 0.0)) throw std::invalid_argument("generate: singular values must be >= 0");
      }
    } else {
      sigmas[j].resize(static_cast<std::size_t>(p));
      for (auto& s : sigmas[j]) s = rng.uniform(0.8, 1.6);
    }
  }

  // Requirement enforcement reshapes the spectrum.
  if (spec.enforce_requirements_for == AlgorithmId::WPADMM_SF4) {
    if (blocks != 1) throw std::invalid_argument("generate: requirement enforcement is single-set");
    auto& sigma = sigmas.front();
    if (spec.enforce_mode == NMode::Linearized) {
      if (spec.m.front() != spec.n) {
        throw std::invalid_argument(
            "generate: kappa(A^T A) < 2 with AA^T > 0 needs a square map; set m = n");
      }
      const double smax = *std::max_element(sigma.begin(), sigma.end());
      const double smin = *std::min_element(sigma.begin(), sigma.end());
      if (smax <= 0.0) {
        std::fill(sigma.begin(), sigma.end(), 1.0);
      } else if (!(smin * smin * 2.0 > smax * smax)) {
        // kappa >= 2: compress the spread into [0.75, 1] * smax (kappa <= 16/9).
        for (auto& s : sigma) {
          const double t = smax > smin ? (s - smin) / (smax - smin) : 1.0;
          s = (0.75 + 0.25 * t) * smax;
        }
      }
    } else {
      if (spec.m.front() > spec.n) {
        throw std::invalid_argument("generate: AA^T > 0 needs m <= n");
      }
      double smax = *std::max_element(sigmas.front().begin(), sigmas.front().end());
      if (smax <= 0.0) smax = 1.0;
      for (auto& s : sigma) s = std::max(s, 0.05 * smax);
    }
  }

  objectives::ProblemInstance problem;

  if (!spec.consistent) {
    if (blocks != 1) {
      throw std::invalid_argument("generate: inconsistent generation is single-set only");
    }
    if ((spec.set_family_c != SetFamily::Ball && spec.set_family_c != SetFamily::Box) ||
        (q_families.front() != SetFamily::Ball && q_families.front() != SetFamily::Box)) {
      throw std::invalid_argument(
          "generate: inconsistent instances need ball or box families on both sides "
          "(certified margin)");
    }
    const Eigen::VectorXd c_anchor = rng.normal_vector(spec.n);
    problem.set_c = build_set_around(rng, spec.set_family_c, c_anchor);
    problem.maps.push_back(build_map(rng, spec.m.front(), spec.n, sigmas.front()));

    const Eigen::VectorXd q_anchor = rng.normal_vector(spec.m.front());
    sets::SetSpec q = build_set_around(rng, q_families.front(), q_anchor);
    const auto summary = linops::spectral_summary(problem.maps.front());
    const double margin = rng.uniform(0.3, 1.0);
    const double reach = summary.operator_norm * circumradius(problem.set_c) + circumradius(q) +
                         margin;
    const Eigen::VectorXd image_center = linops::apply(problem.maps.front(),
                                                       set_center(problem.set_c));
    const Eigen::VectorXd shift =
        image_center + reach * rng.unit_vector(spec.m.front()) - set_center(q);
    if (auto* ball = std::get_if<sets::Ball>(&q)) {
      ball->center += shift;
    } else {
      auto& box = std::get<sets::Box>(q);
      box.lower += shift;
      box.upper += shift;
    }
    problem.sets_q.push_back(std::move(q));
    problem.infeasibility_margin = margin;
    objectives::validate(problem);
    return problem;
  }

  // Consistent construction. Rigid Q needs the witness image first; rigid C
  // draws the witness from a fresh set. Both rigid is unsupported.
  const bool rigid_q = blocks == 1 && is_rigid(q_families.front());
  Eigen::VectorXd witness;

  for (std::size_t j = 0; j < blocks; ++j) {
    problem.maps.push_back(build_map(rng, spec.m[j], spec.n, sigmas[j]));
  }

  if (rigid_q) {
    if (is_rigid(spec.set_family_c)) {
      throw std::invalid_argument(
          "generate: simplex/sparsity on both C and Q cannot be made consistent");
    }
    const Eigen::Index m0 = spec.m.front();
    if (m0 > spec.n) {
      throw std::invalid_argument(
          "generate: a rigid Q family needs m <= n so targets are reachable");
    }
    const double smin =
        *std::min_element(sigmas.front().begin(), sigmas.front().end());
    if (!(smin > 0.0)) {
      throw std::invalid_argument("generate: a rigid Q family needs a full-row-rank map");
    }
    Eigen::VectorXd q_target;
    problem.sets_q.push_back(build_rigid_set(rng, q_families.front(), m0, q_target));
    // Least-norm preimage of the planted target.
    const Eigen::MatrixXd& a = problem.maps.front().entries();
    witness = a.transpose() * (a * a.transpose()).llt().solve(q_target);
    problem.set_c = build_set_around(rng, spec.set_family_c, witness);
  } else {
    if (is_rigid(spec.set_family_c)) {
      problem.set_c = build_rigid_set(rng, spec.set_family_c, spec.n, witness);
    } else {
      const Eigen::VectorXd anchor = rng.normal_vector(spec.n);
      problem.set_c = build_set_around(rng, spec.set_family_c, anchor);
      witness = anchor;
    }
    for (std::size_t j = 0; j < blocks; ++j) {
      if (is_rigid(q_families[j])) {
        throw std::invalid_argument(
            "generate: rigid Q families need a single-block problem with translatable C");
      }
      const Eigen::VectorXd image = linops::apply(problem.maps[j], witness);
      problem.sets_q.push_back(build_set_around(rng, q_families[j], image));
    }
  }

  problem.consistency_witness = witness;
  objectives::validate(problem);
  return problem;
}

// ---------------------------------------------------------------------
// Problem documents.
// ---------------------------------------------------------------------

namespace {

json problem_to_json(const objectives::ProblemInstance& problem) {
  json doc;
  doc["version"] = kProblemVersion;
  doc["C"] = set_to_json(problem.set_c);
  if (problem.multiset()) {
    json maps = json::array();
    json qs = json::array();
    for (std::size_t j = 0; j < problem.maps.size(); ++j) {
      maps.push_back(matrix_to_json(problem.maps[j].entries()));
      qs.push_back(set_to_json(problem.sets_q[j]));
    }
    doc["A"] = std::move(maps);
    doc["Q"] = std::move(qs);
  } else {
    doc["A"] = matrix_to_json(problem.map().entries());
    doc["Q"] = set_to_json(problem.set_q());
  }
  if (problem.consistency_witness) doc["witness"] = vector_to_json(*problem.consistency_witness);
  if (problem.infeasibility_margin) doc["infeasibility_margin"] = *problem.infeasibility_margin;
  return doc;
}

objectives::ProblemInstance problem_from_json(const json& doc) {
  const json& version = member(doc, "version", "problem");
  if (!version.is_number_integer() || version.get<int>() != kProblemVersion) {
    throw std::runtime_error("problem.version: expected schema version " +
                             std::to_string(kProblemVersion));
  }
  objectives::ProblemInstance problem;
  problem.set_c = set_from_json(member(doc, "C", "problem"), "problem.C");

  const json& a = member(doc, "A", "problem");
  const json& q = member(doc, "Q", "problem");
  if (a.is_array() != q.is_array()) {
    throw std::runtime_error("problem: A and Q must both be lists or both single objects");
  }
  if (a.is_array()) {
    if (a.size() != q.size() || a.empty()) {
      throw std::runtime_error("problem: A and Q lists must be nonempty and equally long");
    }
    for (std::size_t j = 0; j < a.size(); ++j) {
      problem.maps.emplace_back(
          matrix_from_json(a[j], "problem.A[" + std::to_string(j) + "]"));
      problem.sets_q.push_back(
          set_from_json(q[j], "problem.Q[" + std::to_string(j) + "]"));
    }
  } else {
    problem.maps.emplace_back(matrix_from_json(a, "problem.A"));
    problem.sets_q.push_back(set_from_json(q, "problem.Q"));
  }
  if (doc.contains("witness")) {
    problem.consistency_witness = vector_field(doc, "witness", "problem");
  }
  if (doc.contains("infeasibility_margin")) {
    problem.infeasibility_margin = number_field(doc, "infeasibility_margin", "problem");
  }
  try {
    objectives::validate(problem);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("problem: ") + e.what());
  }
  return problem;
}

}  // namespace

std::string problem_to_string(const objectives::ProblemInstance& problem) {
  return problem_to_json(problem).dump(2) + "\n";
}

void save_problem(const objectives::ProblemInstance& problem, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_problem: cannot open " + path.string());
  out << problem_to_string(problem);
  if (!out) throw std::runtime_error("save_problem: write failed for " + path.string());
}

objectives::ProblemInstance load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_problem: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("load_problem: " + path.string() + ": " + e.what());
  }
  return problem_from_json(doc);
}

// ---------------------------------------------------------------------
// Trace files.
// ---------------------------------------------------------------------

std::string trace_csv_string(const solvers::IterateTrace& trace) {
  std::ostringstream out;
  out << "k,step_norm_x,step_norm_u,residual_C,residual_Q,objective,lagrangian\n";
  for (const auto& rec : trace.records) {
    out << rec.k << ',' << format_double(rec.step_norm_x) << ',';
    if (rec.step_norm_u) out << format_double(*rec.step_norm_u);
    out << ',' << format_double(rec.residual_c) << ',' << format_double(rec.residual_q) << ','
        << format_double(rec.objective.value) << ',';
    if (rec.lagrangian_value) out << format_double(*rec.lagrangian_value);
    out << '\n';
  }
  return out.str();
}

namespace {

json config_to_json(const solvers::SolverConfig& config) {
  json out;
  out["algorithm"] = std::string(to_string(config.algorithm));
  out["n_mode"] = std::string(to_string(config.n_mode));
  if (config.lambda) out["lambda"] = *config.lambda;
  if (config.rho) out["rho"] = *config.rho;
  if (config.tau) out["tau"] = *config.tau;
  if (config.tau1) out["tau1"] = *config.tau1;
  if (config.tau2) out["tau2"] = *config.tau2;
  out["max_iter"] = config.max_iter;
  out["residual_tol"] = config.residual_tol;
  out["step_tol"] = config.step_tol;
  out["inner_tol"] = config.inner_tol;
  out["inner_max_iter"] = config.inner_max_iter;
  out["override_requirements"] = config.override_requirements;
  return out;
}

solvers::SolverConfig config_from_json(const json& j, const std::string& path) {
  solvers::SolverConfig config;
  const json& alg = member(j, "algorithm", path);
  const auto id = algorithm_from_string(alg.is_string() ? alg.get<std::string>() : "");
  if (!id) throw std::runtime_error(path + ".algorithm: unknown algorithm");
  config.algorithm = *id;
  if (j.contains("n_mode")) {
    const auto mode = n_mode_from_string(j.at("n_mode").get<std::string>());
    if (!mode) throw std::runtime_error(path + ".n_mode: unknown mode");
    config.n_mode = *mode;
  }
  if (j.contains("lambda")) config.lambda = number_field(j, "lambda", path);
  if (j.contains("rho")) config.rho = number_field(j, "rho", path);
  if (j.contains("tau")) config.tau = number_field(j, "tau", path);
  if (j.contains("tau1")) config.tau1 = number_field(j, "tau1", path);
  if (j.contains("tau2")) config.tau2 = number_field(j, "tau2", path);
  if (j.contains("max_iter")) config.max_iter = static_cast<int>(index_field(j, "max_iter", path));
  if (j.contains("residual_tol")) config.residual_tol = number_field(j, "residual_tol", path);
  if (j.contains("step_tol")) config.step_tol = number_field(j, "step_tol", path);
  if (j.contains("inner_tol")) config.inner_tol = number_field(j, "inner_tol", path);
  if (j.contains("inner_max_iter")) {
    config.inner_max_iter = static_cast<int>(index_field(j, "inner_max_iter", path));
  }
  if (j.contains("override_requirements")) {
    config.override_requirements = j.at("override_requirements").get<bool>();
  }
  return config;
}

}  // namespace

void save_trace(const solvers::IterateTrace& trace, const std::filesystem::path& csv_path,
                bool full_vectors) {
  {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("save_trace: cannot open " + csv_path.string());
    out << trace_csv_string(trace);
    if (!out) throw std::runtime_error("save_trace: write failed for " + csv_path.string());
  }

  json doc;
  doc["version"] = kTraceVersion;
  doc["config"] = config_to_json(trace.config);
  doc["problem_digest"] = trace.problem_digest;
  doc["termination_reason"] = std::string(to_string(trace.termination_reason));
  doc["warnings"] = trace.warnings;
  doc["full_vectors"] = full_vectors;
  json records = json::array();
  for (const auto& rec : trace.records) {
    json r;
    r["k"] = rec.k;
    r["step_norm_x"] = rec.step_norm_x;
    if (rec.step_norm_u) r["step_norm_u"] = *rec.step_norm_u;
    r["residual_c"] = rec.residual_c;
    r["residual_q"] = rec.residual_q;
    json obj;
    obj["value"] = json_number(rec.objective.value);
    obj["coupling"] = rec.objective.coupling;
    obj["feasibility_x"] = rec.objective.feasibility_x;
    obj["feasibility_u"] = rec.objective.feasibility_u;
    obj["constraint_gap"] = rec.objective.constraint_gap;
    r["objective"] = std::move(obj);
    if (rec.lagrangian_value) r["lagrangian"] = json_number(*rec.lagrangian_value);
    if (full_vectors) {
      r["x"] = vector_to_json(rec.x);
      if (rec.u) r["u"] = vector_to_json(*rec.u);
      if (rec.y) r["y"] = vector_to_json(*rec.y);
    }
    records.push_back(std::move(r));
  }
  doc["records"] = std::move(records);

  std::filesystem::path json_path = csv_path;
  json_path.replace_extension(".json");
  std::ofstream out(json_path);
  if (!out) throw std::runtime_error("save_trace: cannot open " + json_path.string());
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("save_trace: write failed for " + json_path.string());
}

solvers::SolverConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("load_config: " + path.string() + ": " + e.what());
  }
  return config_from_json(doc, "config");
}

solvers::IterateTrace load_trace(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("load_trace: cannot open " + json_path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("load_trace: " + json_path.string() + ": " + e.what());
  }
  const json& version = member(doc, "version", "trace");
  if (!version.is_number_integer() || version.get<int>() != kTraceVersion) {
    throw std::runtime_error("trace.version: expected schema version " +
                             std::to_string(kTraceVersion));
  }

  solvers::IterateTrace trace;
  trace.config = config_from_json(member(doc, "config", "trace"), "trace.config");
  trace.problem_digest = member(doc, "problem_digest", "trace").get<std::string>();
  const auto reason =
      solvers::termination_from_string(member(doc, "termination_reason", "trace")
                                           .get<std::string>());
  if (!reason) throw std::runtime_error("trace.termination_reason: unknown value");
  trace.termination_reason = *reason;
  if (doc.contains("warnings")) {
    trace.warnings = doc.at("warnings").get<std::vector<std::string>>();
  }
  trace.has_vectors = member(doc, "full_vectors", "trace").get<bool>();

  const json& records = member(doc, "records", "trace");
  if (!records.is_array()) throw std::runtime_error("trace.records: expected an array");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string path = "trace.records[" + std::to_string(i) + "]";
    const json& r = records[i];
    solvers::TraceRecord rec;
    rec.k = static_cast<int>(index_field(r, "k", path));
    rec.step_norm_x = number_field(r, "step_norm_x", path);
    if (r.contains("step_norm_u")) rec.step_norm_u = number_field(r, "step_norm_u", path);
    rec.residual_c = number_field(r, "residual_c", path);
    rec.residual_q = number_field(r, "residual_q", path);
    const json& obj = member(r, "objective", path);
    rec.objective.value = parse_number(member(obj, "value", path), path + ".objective.value");
    rec.objective.coupling = number_field(obj, "coupling", path + ".objective");
    rec.objective.feasibility_x = number_field(obj, "feasibility_x", path + ".objective");
    rec.objective.feasibility_u = number_field(obj, "feasibility_u", path + ".objective");
    rec.objective.constraint_gap = number_field(obj, "constraint_gap", path + ".objective");
    if (r.contains("lagrangian")) {
      rec.lagrangian_value = parse_number(r.at("lagrangian"), path + ".lagrangian");
    }
    if (trace.has_vectors) {
      rec.x = vector_field(r, "x", path);
      if (r.contains("u")) rec.u = vector_field(r, "u", path);
      if (r.contains("y")) rec.y = vector_field(r, "y", path);
    }
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace splitfeas::problems
