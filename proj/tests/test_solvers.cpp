#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "splitfeas/errors.hpp"
#include "splitfeas/solvers.hpp"

using namespace splitfeas;
using objectives::ProblemInstance;
using solvers::IterateState;
using solvers::SolverConfig;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

ProblemInstance identity_problem(sets::SetSpec c, sets::SetSpec q) {
  ProblemInstance p;
  p.set_c = std::move(c);
  const Eigen::Index n = sets::dimension(p.set_c);
  p.maps.emplace_back(Eigen::MatrixXd::Identity(n, n));
  p.sets_q.push_back(std::move(q));
  return p;
}

sets::SetSpec free_box(Eigen::Index d, double extent = 1e6) {
  return sets::Box{Eigen::VectorXd::Constant(d, -extent), Eigen::VectorXd::Constant(d, extent)};
}

SolverConfig resolved(SolverConfig config, const ProblemInstance& p) {
  return solvers::resolve_defaults(config, p);
}

Eigen::MatrixXd random_orthogonalish(Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = normal(engine);
  }
  return Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
}

}  // namespace

TEST_CASE("cq step: hand example and fixed point") {
  auto p = identity_problem(sets::Ball{Eigen::VectorXd::Zero(2), 10.0},
                            sets::FiniteSet{{Eigen::VectorXd::Zero(2)}});
  SolverConfig config;
  config.algorithm = AlgorithmId::CQ_SF1P;
  config.lambda = 1.0;
  config.tau = 21.0 / 20.0;
  config = resolved(config, p);

  IterateState s;
  s.x = vec2(1, 0);
  s.u = vec2(0, 0);
  const auto next = solvers::step_cq_sf1p(s, p, config);
  CHECK(*next.u == vec2(0, 0));
  CHECK((next.x - vec2(1.0 / 21.0, 0)).norm() <= 1e-15);

  // x in C with Ax in Q is stationary.
  auto fixed = identity_problem(sets::Ball{Eigen::VectorXd::Zero(2), 10.0},
                                sets::Ball{Eigen::VectorXd::Zero(2), 2.0});
  s.x = vec2(1, 0);
  s.u = vec2(1, 0);
  SolverConfig fc = resolved(SolverConfig{.algorithm = AlgorithmId::CQ_SF1P}, fixed);
  const auto stay = solvers::step_cq_sf1p(s, fixed, fc);
  CHECK((stay.x - s.x).norm() == 0.0);
}

TEST_CASE("cq run: geometric decay on the 1-D example") {
  auto p = identity_problem(sets::Ball{Eigen::VectorXd::Zero(2), 10.0},
                            sets::FiniteSet{{Eigen::VectorXd::Zero(2)}});
  SolverConfig config;
  config.algorithm = AlgorithmId::CQ_SF1P;
  config.lambda = 1.0;
  config.tau = 21.0;  // contraction factor 20/21 per step
  config.max_iter = 10;
  config.residual_tol = 1e-30;
  config.step_tol = 0.0;
  const auto trace = solvers::run(p, config, vec2(1, 0));
  REQUIRE(trace.records.size() == 11);
  for (int k = 0; k <= 10; ++k) {
    const double expected = std::pow(20.0 / 21.0, k);
    CHECK(std::abs(trace.records[static_cast<std::size_t>(k)].x[0] - expected) <= 1e-13);
    CHECK(std::abs(trace.records[static_cast<std::size_t>(k)].x[1]) == 0.0);
  }
  CHECK(trace.termination_reason == solvers::TerminationReason::MaxIter);
}

TEST_CASE("pg-sf1p step: hand example, parallel reads, swap symmetry") {
  auto p = identity_problem(free_box(2), free_box(2));
  SolverConfig config;
  config.algorithm = AlgorithmId::PG_SF1P;
  config.lambda = 1.0;
  config.tau = 2.0;
  config = resolved(config, p);

  IterateState s;
  s.x = vec2(1, 0);
  s.u = vec2(0, 0);
  const auto next = solvers::step_pg_sf1p(s, p, config);
  CHECK(*next.u == vec2(0.5, 0));
  CHECK(next.x == vec2(0.5, 0));

  // Swapping x and u swaps the outputs when A = I and C = Q.
  IterateState swapped;
  swapped.x = vec2(0, 0);
  swapped.u = vec2(1, 0);
  const auto other = solvers::step_pg_sf1p(swapped, p, config);
  CHECK(other.x == *next.u);
  CHECK(*other.u == next.x);

  // Consistent stationary pair stays put.
  auto balls = identity_problem(sets::Ball{Eigen::VectorXd::Zero(2), 1.0},
                                sets::Ball{Eigen::VectorXd::Zero(2), 1.0});
  SolverConfig bc = resolved(SolverConfig{.algorithm = AlgorithmId::PG_SF1P}, balls);
  IterateState st;
  st.x = vec2(0.5, 0);
  st.u = vec2(0.5, 0);
  const auto stay = solvers::step_pg_sf1p(st, balls, bc);
  CHECK((stay.x - st.x).norm() == 0.0);
  CHECK((*stay.u - *st.u).norm() == 0.0);
}

TEST_CASE("am step: orthogonal reduction and two-step convergence") {
  auto p = identity_problem(sets::Ball{Eigen::VectorXd::Zero(2), 1.0},
                            sets::Ball{Eigen::VectorXd::Zero(2), 1.0});
  SolverConfig config = resolved(SolverConfig{.algorithm = AlgorithmId::AM_SF1P}, p);

  const auto trace = solvers::run(p, config, vec2(3, 0));
  // u^0 = P_Q(A x^0) = (1,0); the first x-step already solves the problem.
  REQUIRE(trace.records.size() >= 2);
  CHECK(*trace.records[0].u == vec2(1, 0));
  CHECK(trace.records[1].x == vec2(1, 0));
  CHECK(*trace.records[1].u == vec2(1, 0));
  CHECK(trace.termination_reason == solvers::TerminationReason::ResidualTol);

  // Orthogonal A: the x-update is P_C(A^T u / c^2).
  const Eigen::MatrixXd q = random_orthogonalish(3, 5);
  ProblemInstance rotated;
  rotated.set_c = sets::SparsityBall{3, 1};
  rotated.maps.emplace_back(2.0 * q);  // A^T A = 4 I
  rotated.sets_q.push_back(free_box(3));
  SolverConfig rc = resolved(SolverConfig{.algorithm = AlgorithmId::AM_SF1P}, rotated);
  IterateState s;
  s.x = (Eigen::VectorXd(3) << 1, 0, 0).finished();
  s.u = (Eigen::VectorXd(3) << 2, 4, 0).finished();
  const auto next = solvers::step_am_sf1p(s, rotated, rc);
  const Eigen::VectorXd expected =
      sets::project(rotated.set_c, linops::apply_adjoint(rotated.maps[0], *s.u) / 4.0);
  CHECK((next.x - expected).norm() <= 1e-14);
}

TEST_CASE("am step: inner solver handles convex C with a generic map") {
  ProblemInstance p;
  p.set_c = sets::Ball{Eigen::VectorXd::Zero(2), 0.8};
  Eigen::MatrixXd a(3, 2);
  a << 1.2, 0.3, -0.4, 0.9, 0.5, 1.1;
  p.maps.emplace_back(a);
  p.sets_q.push_back(free_box(3));
  SolverConfig config = resolved(SolverConfig{.algorithm = AlgorithmId::AM_SF1P}, p);

  IterateState s;
  s.x = vec2(0.1, -0.2);
  s.u = (Eigen::VectorXd(3) << 2, 1, -1).finished();
  const auto next = solvers::step_am_sf1p(s, p, config);
  // Inner solve reaches a KKT point: the gradient must be (almost) normal to
  // the ball at the solution.
  const Eigen::VectorXd grad =
      linops::apply_adjoint(p.maps[0], linops::apply(p.maps[0], next.x) - *s.u);
  const Eigen::VectorXd pg = sets::project(p.set_c, next.x - grad) - next.x;
  CHECK(pg.norm() <= 1e-7);

  // Non-convex C with a non-orthogonal map must refuse.
  ProblemInstance bad = p;
  bad.set_c = sets::SparsityBall{2, 1};
  SolverConfig bc = resolved(SolverConfig{.algorithm = AlgorithmId::AM_SF1P}, bad);
  bc.override_requirements = true;
  IterateState sb;
  sb.x = vec2(0.1, -0.2);
  sb.u = s.u;
  CHECK_THROWS_AS(solvers::step_am_sf1p(sb, bad, bc), RequirementError);
}

TEST_CASE("pg-sf3 step: hand example and scaling invariance") {
  auto p = identity_problem(sets::Ball{Eigen::VectorXd::Zero(2), 10.0},
                            sets::Ball{Eigen::VectorXd::Zero(2), 1.0});
  SolverConfig config;
  config.algorithm = AlgorithmId::PG_SF3;
  config.tau = 1.25;
  config = resolved(config, p);
  IterateState s;
  s.x = vec2(2, 0);
  const auto next = solvers::step_pg_sf3(s, p, config);
  CHECK((next.x - vec2(1.2, 0)).norm() <= 1e-15);

  // Scaling A by c, tau by c^2, and Q by c leaves the map unchanged.
  const double c = 3.0;
  ProblemInstance scaled = p;
  scaled.maps[0] = linops::LinearMap(c * Eigen::MatrixXd::Identity(2, 2));
  scaled.sets_q[0] = sets::Ball{Eigen::VectorXd::Zero(2), c * 1.0};
  SolverConfig sc;
  sc.algorithm = AlgorithmId::PG_SF3;
  sc.tau = c * c * 1.25;
  sc = resolved(sc, scaled);
  const auto scaled_next = solvers::step_pg_sf3(s, scaled, sc);
  CHECK((scaled_next.x - next.x).norm() <= 1e-12);
}

TEST_CASE("cq-multiset: bit-exact r=1 reduction and hand example") {
  auto p = identity_problem(sets::Ball{Eigen::VectorXd::Zero(2), 10.0},
                            sets::Ball{Eigen::VectorXd::Zero(2), 1.0});
  SolverConfig pg;
  pg.algorithm = AlgorithmId::PG_SF3;
  pg.tau = 1.7;
  pg = resolved(pg, p);
  SolverConfig ms = pg;
  ms.algorithm = AlgorithmId::CQ_MULTISET;

  IterateState s;
  s.x = vec2(1.8, -0.6);
  for (int k = 0; k < 25; ++k) {
    const auto a = solvers::step_pg_sf3(s, p, pg);
    const auto b = solvers::step_cq_multiset(s, p, ms);
    REQUIRE(a.x == b.x);  // identical arithmetic, identical bits
    s = a;
    s.k = 0;
  }

  // r = 2 hand example.
  ProblemInstance multi;
  multi.set_c = free_box(2);
  multi.maps.emplace_back(Eigen::MatrixXd::Identity(2, 2));
  multi.maps.emplace_back(Eigen::MatrixXd::Identity(2, 2));
  multi.sets_q.push_back(sets::Ball{Eigen::VectorXd::Zero(2), 1.0});
  multi.sets_q.push_back(sets::Box{vec2(-1, -1), vec2(1, 1)});
  SolverConfig mc;
  mc.algorithm = AlgorithmId::CQ_MULTISET;
  mc.tau = 2.5;
  mc = resolved(mc, multi);
  IterateState m;
  m.x = vec2(2, 0);
  const auto next = solvers::step_cq_multiset(m, multi, mc);
  CHECK((next.x - vec2(1.2, 0)).norm() <= 1e-15);
}

TEST_CASE("padmm-sf1 step: weighted average, fixed point, y-update arithmetic") {
  auto p = identity_problem(sets::Ball{Eigen::VectorXd::Zero(2), 1.0},
                            sets::Ball{Eigen::VectorXd::Zero(2), 1.0});
  SolverConfig config;
  config.algorithm = AlgorithmId::PADMM_SF1;
  config.rho = 2.0;
  config.tau1 = 0.0;
  config.tau2 = 1.0;
  config = resolved(config, p);

  // tau1 = 0 and y = 0 degenerate the u-update to P_Q(Ax).
  IterateState s;
  s.x = vec2(3, 0);
  s.u = vec2(-5, 0);
  s.y = vec2(0, 0);
  const auto next = solvers::step_padmm_sf1(s, p, config);
  CHECK((*next.u - vec2(1, 0)).norm() <= 1e-15);

  // Feasible stationary triple is a fixed point.
  SolverConfig fp = resolved(SolverConfig{.algorithm = AlgorithmId::PADMM_SF1}, p);
  IterateState st;
  st.x = vec2(0.5, 0);
  st.u = vec2(0.5, 0);
  st.y = vec2(0, 0);
  const auto stay = solvers::step_padmm_sf1(st, p, fp);
  CHECK((stay.x - st.x).norm() <= 1e-12);
  CHECK((*stay.u - *st.u).norm() <= 1e-12);
  CHECK(stay.y->norm() <= 1e-12);

  // y-update: third line of the update rule with a forced gap of (0.5, 0).
  ProblemInstance gap;
  gap.set_c = sets::FiniteSet{{vec2(1, 0)}};
  gap.maps.emplace_back(Eigen::MatrixXd::Identity(2, 2));
  gap.sets_q.push_back(sets::FiniteSet{{vec2(0.5, 0)}});
  SolverConfig gc;
  gc.algorithm = AlgorithmId::PADMM_SF1;
  gc.rho = 2.0;
  gc = resolved(gc, gap);
  IterateState g;
  g.x = vec2(1, 0);
  g.u = vec2(0.5, 0);
  g.y = vec2(0, 0);
  const auto after = solvers::step_padmm_sf1(g, gap, gc);
  CHECK((*after.y - vec2(1, 0)).norm() <= 1e-15);
}

TEST_CASE("wpadmm step: linearized hand example") {
  ProblemInstance p;
  p.set_c = sets::Ball{Eigen::VectorXd::Zero(2), 1.0};
  p.maps.emplace_back(Eigen::MatrixXd::Identity(2, 2));
  p.sets_q.push_back(sets::Ball{vec2(2, 0), 1.0});
  SolverConfig config;
  config.algorithm = AlgorithmId::WPADMM_SF4;
  config.n_mode = NMode::Linearized;
  config.rho = 1.0;
  config.tau = 2.0;
  config = resolved(config, p);

  IterateState s;
  s.x = vec2(2, 0);
  s.u = vec2(2, 0);
  s.y = vec2(0, 0);
  const auto next = solvers::step_wpadmm_sf4(s, p, config);
  CHECK((*next.u - vec2(2, 0)).norm() == 0.0);  // P_Q fixes its own center
  CHECK((next.x - vec2(1.5, 0)).norm() <= 1e-15);
}

TEST_CASE("wpadmm: consistent stationary triple is fixed in both modes") {
  ProblemInstance p;
  p.set_c = sets::Ball{Eigen::VectorXd::Zero(2), 1.0};
  p.maps.emplace_back(Eigen::MatrixXd::Identity(2, 2));
  p.sets_q.push_back(sets::Ball{Eigen::VectorXd::Zero(2), 1.0});
  for (NMode mode : {NMode::ProxIdentity, NMode::Linearized}) {
    SolverConfig config;
    config.algorithm = AlgorithmId::WPADMM_SF4;
    config.n_mode = mode;
    config = resolved(config, p);
    IterateState s;
    s.x = vec2(0.5, 0);
    s.u = vec2(0.5, 0);
    s.y = vec2(0, 0);
    const auto next = solvers::step_wpadmm_sf4(s, p, config);
    CHECK((next.x - s.x).norm() <= 1e-9);
    CHECK((*next.u - *s.u).norm() <= 1e-12);
    CHECK(next.y->norm() <= 1e-9);
  }
}

TEST_CASE("wpadmm prox-identity step solves its subproblem to inner_tol") {
  // Optimality equation of the x-subproblem with weight tau*I:
  // (rho A^T A + (1+tau) I) x - P_C(x) - (tau x^k - A^T y + rho A^T u+) = 0.
  std::mt19937_64 engine(123);
  std::normal_distribution<double> normal(0.0, 1.0);
  ProblemInstance p;
  p.set_c = sets::Ball{Eigen::VectorXd::Ones(3), 0.9};
  Eigen::MatrixXd a(3, 3);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) a(i, j) = normal(engine);
  }
  p.maps.emplace_back(a);
  p.sets_q.push_back(sets::SparsityBall{3, 1});
  SolverConfig config;
  config.algorithm = AlgorithmId::WPADMM_SF4;
  config.n_mode = NMode::ProxIdentity;
  config.rho = 2.5;
  config.tau = 1.5;
  config = resolved(config, p);

  IterateState s;
  s.x = (Eigen::VectorXd(3) << 0.7, 1.2, 0.4).finished();
  s.u = sets::project(p.set_q(), linops::apply(p.maps[0], s.x));
  s.y = (Eigen::VectorXd(3) << 0.3, -0.1, 0.2).finished();
  const auto next = solvers::step_wpadmm_sf4(s, p, config);

  const Eigen::MatrixXd m =
      2.5 * (a.transpose() * a) + 2.5 * Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd c_vec = 1.5 * s.x - linops::apply_adjoint(p.maps[0], *s.y) +
                                2.5 * linops::apply_adjoint(p.maps[0], *next.u);
  const Eigen::VectorXd residual = m * next.x - sets::project(p.set_c, next.x) - c_vec;
  CHECK(residual.norm() <= 10.0 * config.inner_tol * m.norm());
}

TEST_CASE("wpadmm: prox-identity equals linearized for orthogonal A inside C") {
  // With A^T A = I, tau_prox = tau_lin - rho, and iterates interior to C, the
  // two x-updates solve the same equation.
  const Eigen::MatrixXd q = random_orthogonalish(4, 77);
  ProblemInstance p;
  p.set_c = sets::Ball{Eigen::VectorXd::Zero(4), 50.0};
  p.maps.emplace_back(q);
  p.sets_q.push_back(sets::SparsityBall{4, 2});

  const double rho = 4.0;
  const double tau_lin = 1.7 * rho;
  SolverConfig lin;
  lin.algorithm = AlgorithmId::WPADMM_SF4;
  lin.n_mode = NMode::Linearized;
  lin.rho = rho;
  lin.tau = tau_lin;
  lin = resolved(lin, p);
  SolverConfig prox = lin;
  prox.n_mode = NMode::ProxIdentity;
  prox.tau = tau_lin - rho;

  std::mt19937_64 engine(3);
  std::normal_distribution<double> normal(0.0, 1.0);
  IterateState s;
  s.x = Eigen::VectorXd::NullaryExpr(4, [&](Eigen::Index) { return normal(engine); });
  s.u = linops::apply(p.maps[0], s.x);
  s.y = Eigen::VectorXd::Zero(4);
  for (int k = 0; k < 20; ++k) {
    const auto a = solvers::step_wpadmm_sf4(s, p, lin);
    const auto b = solvers::step_wpadmm_sf4(s, p, prox);
    CHECK((a.x - b.x).norm() <= 1e-10);
    s = a;
    s.k = 0;
  }
}

TEST_CASE("feasible points are fixed for the projection-driven steps") {
  auto p = identity_problem(sets::Ball{Eigen::VectorXd::Zero(2), 2.0},
                            sets::Box{vec2(-1, -1), vec2(1, 1)});
  SolverConfig pg = resolved(SolverConfig{.algorithm = AlgorithmId::PG_SF3}, p);
  IterateState s;
  s.x = vec2(0.5, -0.5);
  CHECK((solvers::step_pg_sf3(s, p, pg).x - s.x).norm() == 0.0);

  ProblemInstance multi = p;
  multi.maps.emplace_back(Eigen::MatrixXd::Identity(2, 2));
  multi.sets_q.push_back(sets::Ball{Eigen::VectorXd::Zero(2), 1.0});
  SolverConfig ms = resolved(SolverConfig{.algorithm = AlgorithmId::CQ_MULTISET}, multi);
  CHECK((solvers::step_cq_multiset(s, multi, ms).x - s.x).norm() == 0.0);
}

TEST_CASE("multiplier identity along Lagrangian traces") {
  ProblemInstance p;
  p.set_c = sets::Ball{Eigen::VectorXd::Zero(3), 1.0};
  p.maps.emplace_back(Eigen::MatrixXd::Identity(3, 3));
  p.sets_q.push_back(sets::SparsityBall{3, 1});
  SolverConfig config;
  config.algorithm = AlgorithmId::WPADMM_SF4;
  config.n_mode = NMode::Linearized;
  config.max_iter = 40;
  config.residual_tol = 1e-12;
  const auto trace = solvers::run(p, config, (Eigen::VectorXd(3) << 0.4, 0.3, -0.1).finished());
  for (std::size_t k = 0; k + 1 < trace.records.size(); ++k) {
    const auto& cur = trace.records[k];
    const auto& nxt = trace.records[k + 1];
    const Eigen::VectorXd expected =
        *trace.config.rho * (linops::apply(p.maps[0], nxt.x) - *nxt.u);
    CHECK((*nxt.y - *cur.y - expected).norm() == 0.0);
  }
}

TEST_CASE("monotone F1 along descent-algorithm traces") {
  std::mt19937_64 engine(31);
  std::normal_distribution<double> normal(0.0, 1.0);
  ProblemInstance p;
  p.set_c = sets::Ball{Eigen::VectorXd::Zero(4), 2.0};
  Eigen::MatrixXd a(3, 4);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) a(i, j) = normal(engine);
  }
  p.maps.emplace_back(a);
  p.sets_q.push_back(sets::Box{Eigen::VectorXd::Constant(3, 0.5),
                               Eigen::VectorXd::Constant(3, 2.0)});

  for (AlgorithmId id : {AlgorithmId::CQ_SF1P, AlgorithmId::AM_SF1P, AlgorithmId::PG_SF1P}) {
    CAPTURE(to_string(id));
    SolverConfig config;
    config.algorithm = id;
    config.lambda = 1.5;
    config.max_iter = 120;
    config.residual_tol = 1e-13;
    Eigen::VectorXd x0(4);
    for (Eigen::Index i = 0; i < 4; ++i) x0[i] = normal(engine);
    x0 = sets::project(p.set_c, x0);
    const auto trace = solvers::run(p, config, x0);
    for (std::size_t k = 0; k + 1 < trace.records.size(); ++k) {
      const double cur = trace.records[k].objective.value;
      const double nxt = trace.records[k + 1].objective.value;
      REQUIRE(std::isfinite(cur));
      CHECK(nxt <= cur + 1e-10 * (1.0 + std::abs(cur)));
    }
  }
}

TEST_CASE("run: witness start terminates immediately") {
  auto p = identity_problem(sets::Ball{Eigen::VectorXd::Zero(2), 1.0},
                            sets::Ball{Eigen::VectorXd::Zero(2), 1.0});
  p.consistency_witness = vec2(0.5, 0);
  SolverConfig config;
  config.algorithm = AlgorithmId::CQ_SF1P;
  const auto trace = solvers::run(p, config, *p.consistency_witness);
  CHECK(trace.records.size() == 1);
  CHECK(trace.termination_reason == solvers::TerminationReason::ResidualTol);
}

TEST_CASE("run: max_iter bounds the record count") {
  // Inconsistent pair: the iteration cannot converge.
  ProblemInstance p;
  p.set_c = sets::Ball{Eigen::VectorXd::Zero(2), 1.0};
  p.maps.emplace_back(Eigen::MatrixXd::Identity(2, 2));
  p.sets_q.push_back(sets::Ball{vec2(10, 0), 1.0});
  SolverConfig config;
  config.algorithm = AlgorithmId::CQ_SF1P;
  config.max_iter = 5;
  config.step_tol = 0.0;
  const auto trace = solvers::run(p, config, vec2(0.3, 0.1));
  CHECK(trace.records.size() == 6);
  CHECK(trace.termination_reason == solvers::TerminationReason::MaxIter);
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    CHECK(trace.records[k].k == static_cast<int>(k));
  }
}

TEST_CASE("run: determinism") {
  ProblemInstance p;
  p.set_c = sets::Ball{Eigen::VectorXd::Zero(3), 2.0};
  p.maps.emplace_back(Eigen::MatrixXd::Identity(3, 3));
  p.sets_q.push_back(sets::SparsityBall{3, 1});
  SolverConfig config;
  config.algorithm = AlgorithmId::WPADMM_SF4;
  config.n_mode = NMode::Linearized;
  config.max_iter = 30;
  const Eigen::VectorXd x0 = (Eigen::VectorXd(3) << 0.2, -0.7, 0.4).finished();
  const auto a = solvers::run(p, config, x0);
  const auto b = solvers::run(p, config, x0);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].x == b.records[k].x);
    CHECK(a.records[k].objective.value == b.records[k].objective.value);
  }
}

TEST_CASE("run: u0/y0 admissibility") {
  auto p = identity_problem(sets::Ball{Eigen::VectorXd::Zero(2), 1.0},
                            sets::Ball{Eigen::VectorXd::Zero(2), 1.0});
  SolverConfig am{.algorithm = AlgorithmId::AM_SF1P};
  CHECK_THROWS_AS(solvers::run(p, am, vec2(0, 0), vec2(0, 0)), std::invalid_argument);
  SolverConfig cq{.algorithm = AlgorithmId::CQ_SF1P};
  CHECK_THROWS_AS(solvers::run(p, cq, vec2(0, 0), vec2(0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(solvers::run(p, cq, vec2(0, 0), {}, vec2(0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(solvers::run(p, cq, Eigen::VectorXd::Zero(5)), DimensionError);
}

TEST_CASE("requirement checks gate the run") {
  // kappa(A^T A) = 9: the linearized mode must refuse without an override.
  Eigen::MatrixXd d(2, 2);
  d << 3, 0, 0, 1;
  ProblemInstance p;
  p.set_c = sets::Ball{Eigen::VectorXd::Zero(2), 1.0};
  p.maps.emplace_back(d);
  p.sets_q.push_back(sets::Ball{Eigen::VectorXd::Zero(2), 1.0});

  SolverConfig config;
  config.algorithm = AlgorithmId::WPADMM_SF4;
  config.n_mode = NMode::Linearized;
  CHECK_THROWS_AS(solvers::run(p, config, vec2(0.1, 0.1)), RequirementError);

  config.override_requirements = true;
  const auto trace = solvers::run(p, config, vec2(0.1, 0.1));
  bool noted = false;
  for (const auto& w : trace.warnings) noted = noted || w.find("kappa") != std::string::npos;
  CHECK(noted);

  // Step-size bounds are not overridable.
  SolverConfig bad;
  bad.algorithm = AlgorithmId::CQ_SF1P;
  bad.tau = 0.5;  // below lambda * lambda_max = 9
  bad.override_requirements = true;
  CHECK_THROWS_AS(solvers::run(p, bad, vec2(0.1, 0.1)), RequirementError);

  // pg-sf3 on non-convex Q errors unless overridden.
  ProblemInstance nq;
  nq.set_c = sets::Ball{Eigen::VectorXd::Zero(2), 1.0};
  nq.maps.emplace_back(Eigen::MatrixXd::Identity(2, 2));
  nq.sets_q.push_back(sets::SparsityBall{2, 1});
  SolverConfig pg{.algorithm = AlgorithmId::PG_SF3};
  CHECK_THROWS_AS(solvers::run(nq, pg, vec2(0.3, 0.2)), RequirementError);
  pg.override_requirements = true;
  const auto t = solvers::run(nq, pg, vec2(0.3, 0.2));
  CHECK_FALSE(t.warnings.empty());
}

TEST_CASE("resolve_defaults fills the documented values") {
  Eigen::MatrixXd d(2, 2);
  d << 2, 0, 0, 1;  // lambda_max = 4
  ProblemInstance p;
  p.set_c = sets::Ball{Eigen::VectorXd::Zero(2), 1.0};
  p.maps.emplace_back(d);
  p.sets_q.push_back(sets::Ball{Eigen::VectorXd::Zero(2), 1.0});

  SolverConfig cq = solvers::resolve_defaults(SolverConfig{.algorithm = AlgorithmId::CQ_SF1P}, p);
  CHECK(*cq.lambda == 1.0);
  CHECK(*cq.tau == doctest::Approx(1.01 * 4.0));
  CHECK(*cq.rho == doctest::Approx(40.0));
  CHECK(*cq.tau1 == 1.0);

  SolverConfig pg = solvers::resolve_defaults(SolverConfig{.algorithm = AlgorithmId::PG_SF1P}, p);
  CHECK(*pg.tau == doctest::Approx(1.01 * 5.0));

  SolverConfig lin = solvers::resolve_defaults(
      SolverConfig{.algorithm = AlgorithmId::WPADMM_SF4, .n_mode = NMode::Linearized}, p);
  CHECK(*lin.tau == doctest::Approx(1.01 * 40.0 * 4.0));
}
