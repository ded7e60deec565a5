#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "splitfeas/errors.hpp"
#include "splitfeas/sets.hpp"

using namespace splitfeas::sets;
using splitfeas::DimensionError;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd random_vector(std::mt19937_64& engine, Eigen::Index d, double scale = 3.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(engine);
  return v;
}

// The convex members exercised by the property tests, all in dimension 4.
std::vector<SetSpec> convex_catalog() {
  std::vector<SetSpec> out;
  Eigen::VectorXd lower(4), upper(4);
  lower << -1, -0.5, 0, -2;
  upper << 1, 1.5, 2, 0;
  out.push_back(Box{lower, upper});
  Eigen::VectorXd center(4);
  center << 0.5, -0.25, 1, 0;
  out.push_back(Ball{center, 1.25});
  Eigen::VectorXd normal(4);
  normal << 1, -2, 0.5, 1;
  out.push_back(Halfspace{normal, 0.75});
  out.push_back(Hyperplane{normal, -0.5});
  Eigen::MatrixXd basis(4, 2);
  basis << 1, 0, 0, 1, 0, 0, 0, 0;
  Eigen::VectorXd anchor(4);
  anchor << 0, 0, 1, -1;
  out.push_back(AffineSubspace{basis, anchor});
  out.push_back(Simplex{4, 1.5});
  return out;
}

std::vector<SetSpec> nonconvex_catalog() {
  std::vector<SetSpec> out;
  out.push_back(SparsityBall{4, 2});
  Eigen::VectorXd center(4);
  center << 0.5, -0.25, 1, 0;
  out.push_back(Sphere{center, 1.25});
  FiniteSet f;
  std::mt19937_64 engine(99);
  for (int i = 0; i < 7; ++i) f.points.push_back(random_vector(engine, 4));
  out.push_back(f);
  Eigen::VectorXd l0(4), u0(4), l1(4), u1(4);
  l0 << -2, -2, -2, -2;
  u0 << -1, -1, -1, -1;
  l1 << 1, 1, 1, 1;
  u1 << 2, 2, 2, 2;
  out.push_back(UnionOfConvex{{Box{l0, u0}, Box{l1, u1}}});
  return out;
}

}  // namespace

TEST_CASE("projection examples") {
  CHECK(project(Ball{Eigen::VectorXd::Zero(2), 1.0}, vec2(2, 0)) == vec2(1, 0));
  CHECK(project(Box{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)}, vec2(2, -1)) ==
        vec2(1, 0));
  CHECK(project(SparsityBall{2, 1}, vec2(3, -4)) == vec2(0, -4));
  CHECK(project(Sphere{Eigen::VectorXd::Zero(2), 1.0}, vec2(0, 0)) == vec2(1, 0));
}

TEST_CASE("sparsity tie-break picks the lowest index") {
  Eigen::VectorXd u(3);
  u << 2, -2, 1;
  CHECK(project(SparsityBall{3, 1}, u) == (Eigen::VectorXd(3) << 2, 0, 0).finished());
}

TEST_CASE("distance examples") {
  CHECK(distance(Ball{Eigen::VectorXd::Zero(2), 1.0}, vec2(2, 0)) == doctest::Approx(1.0));
  CHECK(distance(Box{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)}, vec2(0.5, 0.5)) == 0.0);
  UnionOfConvex un{{Ball{Eigen::VectorXd::Zero(2), 1.0}, Ball{vec2(4, 0), 1.0}}};
  CHECK(distance(un, vec2(2, 0)) == doctest::Approx(1.0));
  // Equidistant: the lowest-index member wins.
  CHECK(project(SetSpec{un}, vec2(2, 0)) == vec2(1, 0));
}

TEST_CASE("membership examples") {
  CHECK(is_member(Box{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)}, vec2(0.5, 0.5), 0.0));
  CHECK(is_member(Ball{Eigen::VectorXd::Zero(2), 1.0}, vec2(1.0 + 1e-12, 0), 1e-9));
  Eigen::VectorXd two_nonzero(3);
  two_nonzero << 1, 1, 0;
  CHECK_FALSE(is_member(SparsityBall{3, 1}, two_nonzero, 1e-9));
}

TEST_CASE("half-squared-distance gradient examples") {
  CHECK(half_sq_distance_gradient(Ball{Eigen::VectorXd::Zero(2), 1.0}, vec2(2, 0)) == vec2(1, 0));
  CHECK(half_sq_distance_gradient(Ball{Eigen::VectorXd::Zero(2), 1.0}, vec2(0.25, 0)) ==
        vec2(0, 0));
  CHECK(half_sq_distance_gradient(Hyperplane{vec2(0, 1), 0.0}, vec2(3, 2)) == vec2(0, 2));
  CHECK_THROWS_AS(half_sq_distance_gradient(SparsityBall{2, 1}, vec2(1, 1)),
                  std::invalid_argument);
}

TEST_CASE("validate rejects broken invariants") {
  CHECK_THROWS_AS(validate(Box{Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate(Ball{Eigen::VectorXd::Zero(2), -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Halfspace{Eigen::VectorXd::Zero(2), 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(FiniteSet{}), std::invalid_argument);
  CHECK_THROWS_AS(validate(SparsityBall{3, 5}), std::invalid_argument);
  Eigen::MatrixXd skewed(2, 2);
  skewed << 1, 1, 0, 1;
  CHECK_THROWS_AS(validate(AffineSubspace{skewed, Eigen::VectorXd::Zero(2)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(project(Ball{Eigen::VectorXd::Zero(2), 1.0}, Eigen::VectorXd::Zero(3)),
                  DimensionError);
}

TEST_CASE("projection is idempotent on every variant") {
  std::mt19937_64 engine(2024);
  auto all = convex_catalog();
  for (auto& s : nonconvex_catalog()) all.push_back(s);
  for (const auto& set : all) {
    CAPTURE(kind_name(set));
    for (int trial = 0; trial < 40; ++trial) {
      const Eigen::VectorXd u = random_vector(engine, 4);
      const Eigen::VectorXd p = project(set, u);
      CHECK((project(set, p) - p).norm() <= 1e-12);
      CHECK(is_member(set, p, 1e-9));
    }
  }
}

TEST_CASE("brute-force optimality for FiniteSet and SparsityBall") {
  std::mt19937_64 engine(7);

  FiniteSet f;
  for (int i = 0; i < 9; ++i) f.points.push_back(random_vector(engine, 5));
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::VectorXd u = random_vector(engine, 5);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : f.points) best = std::min(best, (u - p).norm());
    CHECK(distance(SetSpec{f}, u) == doctest::Approx(best).epsilon(1e-14));
  }

  const SparsityBall sb{6, 2};
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::VectorXd u = random_vector(engine, 6);
    // Enumerate all supports of size 2: distance^2 is the mass dropped.
    double best_sq = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 6; ++i) {
      for (int j = i + 1; j < 6; ++j) {
        double sq = 0.0;
        for (int k = 0; k < 6; ++k) {
          if (k != i && k != j) sq += u[k] * u[k];
        }
        best_sq = std::min(best_sq, sq);
      }
    }
    CHECK(distance(SetSpec{sb}, u) == doctest::Approx(std::sqrt(best_sq)).epsilon(1e-14));
  }
}

TEST_CASE("firm nonexpansiveness and Lipschitz-1 on convex variants") {
  std::mt19937_64 engine(11);
  for (const auto& set : convex_catalog()) {
    CAPTURE(kind_name(set));
    for (int trial = 0; trial < 60; ++trial) {
      const Eigen::VectorXd u = random_vector(engine, 4);
      const Eigen::VectorXd v = random_vector(engine, 4);
      const Eigen::VectorXd pu = project(set, u);
      const Eigen::VectorXd pv = project(set, v);
      CHECK((pu - pv).squaredNorm() <= (pu - pv).dot(u - v) + 1e-12);
      CHECK(((u - pu) - (v - pv)).norm() <= (u - v).norm() + 1e-12);
    }
  }
}

TEST_CASE("finite differences match the distance gradient away from the boundary") {
  std::mt19937_64 engine(13);
  const double h = 1e-5;
  for (const auto& set : convex_catalog()) {
    CAPTURE(kind_name(set));
    int checked = 0;
    while (checked < 50) {
      const Eigen::VectorXd u = random_vector(engine, 4);
      if (distance(set, u) < 1e-3) continue;  // keep the FD stencil off the boundary
      const Eigen::VectorXd grad = half_sq_distance_gradient(set, u);
      Eigen::VectorXd fd(4);
      for (Eigen::Index i = 0; i < 4; ++i) {
        Eigen::VectorXd up = u, dn = u;
        up[i] += h;
        dn[i] -= h;
        const double dup = distance(set, up);
        const double ddn = distance(set, dn);
        fd[i] = (0.5 * dup * dup - 0.5 * ddn * ddn) / (2.0 * h);
      }
      CHECK((fd - grad).norm() <= 1e-5 * (1.0 + grad.norm()));
      ++checked;
    }
  }
}

TEST_CASE("simplex projection lands on the simplex") {
  std::mt19937_64 engine(17);
  const Simplex s{6, 2.5};
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd u = random_vector(engine, 6);
    const Eigen::VectorXd p = project(SetSpec{s}, u);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.sum() == doctest::Approx(2.5).epsilon(1e-12));
  }
}

TEST_CASE("union members must be convex and consistent") {
  Eigen::VectorXd l(2), u(2);
  l << 0, 0;
  u << 1, 1;
  UnionOfConvex un{{Box{l, u}, Ball{Eigen::VectorXd::Zero(3), 1.0}}};
  CHECK_THROWS_AS(validate(SetSpec{un}), std::invalid_argument);
  CHECK_FALSE(is_convex(SetSpec{UnionOfConvex{{Box{l, u}}}}));
}
