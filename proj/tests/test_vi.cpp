#include <gtest/gtest.h>

#include "support.hpp"

using namespace rothe;

namespace {

VertexField obstacle_below(std::mt19937_64& rng, const Domain& dom) {
  std::uniform_real_distribution<double> u(-0.5, 0.3);
  VertexField psi(dom.graph_ptr());
  for (Vertex x : dom.interior()) psi[x] = u(rng);
  return psi;
}

}  // namespace

TEST(TimeExpression, Grammar) {
  EXPECT_DOUBLE_EQ(TimeExpression::parse("t")(0.3), 0.3);
  EXPECT_DOUBLE_EQ(TimeExpression::parse("2*t^2 - 3*t + 1")(2.0), 3.0);
  EXPECT_DOUBLE_EQ(TimeExpression::parse("exp(-t) * sin(2*t)")(0.5), std::exp(-0.5) * std::sin(1.0));
  EXPECT_DOUBLE_EQ(TimeExpression::parse("-(t+1)/4")(3.0), -1.0);
  EXPECT_DOUBLE_EQ(TimeExpression::parse("t^0.5")(4.0), 2.0);
  for (const char* bad : {"", "t +", "cos(t)", "exp t", "(t", "2 t", "t $"}) {
    try {
      (void)TimeExpression::parse(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError) << bad;
    }
  }
}

TEST(Lipschitz, ConstantForcingGivesZero) {
  const auto dom = support::two_interior_domain();
  const auto f = Forcing::constant(constant_field(dom.graph_ptr(), 3.0));
  const std::vector<double> ts{0.0, 0.25, 0.5, 1.0};
  EXPECT_EQ(lipschitz_validate(f, dom, ts).estimate, 0.0);
}

TEST(Lipschitz, LinearInTimeRecoversNorm) {
  const auto dom = support::single_interior_domain();
  VertexField chi(dom.graph_ptr());
  chi[2] = 2.0;  // ‖χ‖_{L²(Ω°)} = 2
  const auto f = Forcing::separable(chi, TimeExpression::parse("t"));
  std::vector<double> ts;
  for (int k = 0; k <= 20; ++k) ts.push_back(k / 20.0);
  const auto rep = lipschitz_validate(f, dom, ts, 2.0);
  EXPECT_NEAR(rep.estimate, 2.0, 1e-12);
  EXPECT_FALSE(rep.violation);
}

TEST(Lipschitz, SquareRootFlagged) {
  const auto dom = support::single_interior_domain();
  const auto f = Forcing::separable(indicator(dom.graph_ptr(), 2), TimeExpression::parse("t^0.5"));
  double last = 0.0;
  for (int density : {10, 100, 1000}) {
    std::vector<double> ts;
    for (int k = 0; k <= density; ++k) ts.push_back(static_cast<double>(k) / density);
    const auto rep = lipschitz_validate(f, dom, ts, 5.0);
    EXPECT_GT(rep.estimate, last);
    last = rep.estimate;
  }
  std::vector<double> ts;
  for (int k = 0; k <= 1000; ++k) ts.push_back(k / 1000.0);
  EXPECT_TRUE(lipschitz_validate(f, dom, ts, 20.0).violation);
}

TEST(Lipschitz, InsufficientSamples) {
  const auto dom = support::single_interior_domain();
  const auto f = Forcing::zero(dom.graph_ptr());
  const std::vector<double> ts{0.5, 0.5};
  try {
    (void)lipschitz_validate(f, dom, ts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientSamples);
  }
}

TEST(VIStep, ScalarSubspace) {
  const auto dom = support::single_interior_domain();
  const auto g = dom.graph_ptr();
  const auto rep = vi_step(indicator(g, 2), VertexField(g), 0.1, dom, Subspace{});
  EXPECT_NEAR(rep.u[2], 5.0 / 6.0, 1e-15);
  EXPECT_DOUBLE_EQ(rep.beta, 1.0);
  const auto zero = vi_step(VertexField(g), VertexField(g), 0.1, dom, Subspace{});
  EXPECT_EQ(sup_norm(zero.u), 0.0);
}

TEST(VIStep, ScalarObstacleClamps) {
  const auto dom = support::single_interior_domain();
  const auto g = dom.graph_ptr();
  VertexField f(g);
  f[2] = -20.0;
  const auto rep = vi_step(indicator(g, 2), f, 0.1, dom, Obstacle{VertexField(g)});
  EXPECT_EQ(rep.u[2], 0.0);
  EXPECT_EQ(rep.feasibility, 0.0);
  EXPECT_EQ(rep.dual, 0.0);
  EXPECT_EQ(rep.complementarity, 0.0);
  // r = 12·0 - (-20 + 10) = 10
  const InteriorSystem sys(dom);
  EXPECT_NEAR((sys.shifted(10.0) * sys.gather(rep.u))[0] - (-20.0 + 10.0), 10.0, 1e-15);
}

TEST(VIStep, SubspaceEqualsDirectSolve) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = support::random_graph(rng, 5 + rng() % 30);
    const auto dom = support::random_domain(rng, g);
    const double ell = std::uniform_real_distribution<double>(0.01, 2.0)(rng);
    const auto prev = support::random_admissible(rng, dom);
    const auto f = support::random_field(rng, g);
    const auto rep = vi_step(prev, f, ell, dom, Subspace{});
    const InteriorSystem sys(dom);
    Eigen::MatrixXd a(sys.shifted(1.0 / ell));
    const Eigen::VectorXd b = sys.mass().cwiseProduct(sys.gather(f) + sys.gather(prev) / ell);
    const Eigen::VectorXd direct = a.llt().solve(b);
    EXPECT_LE((sys.gather(rep.u) - direct).lpNorm<Eigen::Infinity>(), 1e-10 * rep.scale);
    EXPECT_LE(rep.variational_residual, 1e-10 * rep.scale);
    EXPECT_DOUBLE_EQ(rep.beta, std::min(1.0 / ell, 1.0));
  }
}

TEST(VIStep, ObstacleKktAndOrderingIndependence) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = support::random_graph(rng, 5 + rng() % 35);
    const auto dom = support::random_domain(rng, g);
    const auto prev = support::random_admissible(rng, dom);
    const auto f = support::random_field(rng, g, 5.0);
    const auto psi = obstacle_below(rng, dom);
    const double ell = 0.1;
    VIStepOptions fwd, bwd;
    bwd.order = SweepOrder::Backward;
    bwd.initial_iterate = VertexField(g);
    const auto a = vi_step(prev, f, ell, dom, Obstacle{psi}, fwd);
    const auto b = vi_step(prev, f, ell, dom, Obstacle{psi}, bwd);
    for (const auto* r : {&a, &b}) {
      EXPECT_LE(r->feasibility, 1e-10);
      EXPECT_LE(r->dual, 1e-8);
      EXPECT_LE(r->complementarity, 1e-8 * r->scale);
    }
    EXPECT_LE(support::sup_diff(a.u, b.u), 1e-8);
    for (Vertex x : dom.interior()) EXPECT_GE(a.u[x], psi[x] - 1e-10);
  }
}

TEST(Coercivity, RandomAdmissibleFields) {
  std::mt19937_64 rng(14);
  for (double ell : {0.01, 0.5, 1.0, 4.0}) {
    auto g = support::random_graph(rng, 20);
    const auto dom = support::random_domain(rng, g);
    const auto c = check_coercivity(dom, ell, 50, 99);
    EXPECT_TRUE(c.ok);
    EXPECT_EQ(c.samples, 50u);
    EXPECT_GE(c.min_ratio, c.beta * (1 - 1e-12));
  }
}

TEST(BilinearForm, MatchesMatrix) {
  std::mt19937_64 rng(15);
  auto g = support::random_graph(rng, 18);
  const auto dom = support::random_domain(rng, g);
  const auto u = support::random_admissible(rng, dom), v = support::random_admissible(rng, dom);
  const InteriorSystem sys(dom);
  const double ell = 0.3;
  const double viaMatrix = sys.gather(u).dot(sys.shifted(1.0 / ell) * sys.gather(v));
  EXPECT_NEAR(bilinear_form(u, v, dom, ell), viaMatrix, 1e-12 * (1 + std::abs(viaMatrix)));
}

TEST(RunVI, ZeroDataZeroTrajectory) {
  const auto dom = support::two_interior_domain();
  const auto g = dom.graph_ptr();
  const auto prob = make_vi_problem(dom, Forcing::zero(g), VertexField(g), 1.0);
  const auto run = run_vi(prob, TimePartition(1.0, 10));
  for (const auto& u : run.trajectory.levels) EXPECT_EQ(sup_norm(u), 0.0);
  const auto mono = vi_monotonicity_monitor(run);
  EXPECT_EQ(mono.max_quotient, 0.0);
  EXPECT_TRUE(mono.recurrence_ok);
}

TEST(RunVI, LinearDecayClosedForm) {
  // Each step divides by 1 + 2ℓ.
  const auto dom = support::single_interior_domain();
  const auto g = dom.graph_ptr();
  const auto prob = make_vi_problem(dom, Forcing::zero(g), indicator(g, 2), 1.0);
  const auto run = run_vi(prob, TimePartition(1.0, 1000));
  EXPECT_NEAR(run.trajectory.final_state()[2], std::pow(1.002, -1000.0), 1e-13);
}

TEST(RunVI, SteadyStateForConstantForcing) {
  const auto dom = support::two_interior_domain();
  const auto g = dom.graph_ptr();
  VertexField f(g), h(g);
  f[2] = 1.5;
  f[3] = -0.5;
  h[2] = 0.3;
  h[3] = 0.9;
  const auto run = run_vi(make_vi_problem(dom, Forcing::constant(f), h, 50.0), TimePartition(50.0, 500));
  // K u = M f  gives u = (5/6, 1/6).
  EXPECT_LE(std::abs(run.trajectory.final_state()[2] - 5.0 / 6.0), 1e-6);
  EXPECT_LE(std::abs(run.trajectory.final_state()[3] - 1.0 / 6.0), 1e-6);
  const auto mono = vi_monotonicity_monitor(run);
  for (const auto& row : mono.rows) EXPECT_LE(row.quotient, row.previous * (1 + 1e-12) + 1e-14);
}

TEST(RunVI, ContractionBetweenInitials) {
  std::mt19937_64 rng(17);
  auto g = support::random_graph(rng, 20);
  const auto dom = support::random_domain(rng, g);
  const auto f = Forcing::separable(support::random_field(rng, g), TimeExpression::parse("sin(3*t)"));
  const auto run1 = run_vi(make_vi_problem(dom, f, support::random_admissible(rng, dom), 1.0), TimePartition(1.0, 50));
  const auto run2 = run_vi(make_vi_problem(dom, f, support::random_admissible(rng, dom), 1.0), TimePartition(1.0, 50));
  double prev = l2_distance(run1.trajectory.levels[0], run2.trajectory.levels[0], dom.omega());
  for (std::size_t i = 1; i <= 50; ++i) {
    const double d = l2_distance(run1.trajectory.levels[i], run2.trajectory.levels[i], dom.omega());
    EXPECT_LE(d, prev + 1e-12 * (1 + prev));
    prev = d;
  }
}

TEST(RunVI, QuotientRecurrenceAndChainBound) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = support::random_graph(rng, 5 + rng() % 25);
    const auto dom = support::random_domain(rng, g);
    const auto chi = support::random_field(rng, g);
    const auto f = Forcing::separable(chi, TimeExpression::parse("1 + 2*t"));
    const double c = 2.0 * norms(*g, chi, dom).l2_interior;
    const auto prob = make_vi_problem(dom, f, support::random_admissible(rng, dom), 1.0, Subspace{}, c);
    const auto run = run_vi(prob, TimePartition(1.0, 40));
    const auto mono = vi_monotonicity_monitor(run, c);
    EXPECT_TRUE(mono.recurrence_ok);
    EXPECT_TRUE(mono.chain_ok);
  }
}

TEST(RunVI, ForcingStepFunction) {
  const auto dom = support::single_interior_domain();
  const auto g = dom.graph_ptr();
  const auto f = Forcing::separable(indicator(g, 2), TimeExpression::parse("t"));
  const auto run = run_vi(make_vi_problem(dom, f, VertexField(g), 1.0), TimePartition(1.0, 4));
  EXPECT_EQ(forcing_step_function(run, 0.0)[2], 0.0);
  EXPECT_EQ(forcing_step_function(run, 0.1)[2], 0.25);
  EXPECT_EQ(forcing_step_function(run, 0.25)[2], 0.25);
  EXPECT_EQ(forcing_step_function(run, 0.26)[2], 0.5);
  EXPECT_EQ(forcing_step_function(run, 1.0)[2], 1.0);
}

TEST(VIExhaustion, LatticeDecayAndZeroData) {
  LatticeZ z;
  using K = LatticeZ::key_type;
  auto exh = lattice_exhaustion(z, [](const K&) { return true; }, std::vector<K>{K{0}}, 11);
  const auto& g = exh.graph_ptr();
  const auto f = Forcing::separable(indicator(g, g->at("1")), TimeExpression::parse("exp(-t)"));
  const std::vector<std::size_t> levels{2, 4, 6, 8, 10};
  const auto rep = run_vi_exhaustion(exh, indicator(g, g->at("0")), f, TimePartition(1.0, 50), levels);
  EXPECT_TRUE(rep.strictly_decreasing());
  const auto zero = run_vi_exhaustion(exh, VertexField(g), Forcing::zero(g), TimePartition(1.0, 10), levels);
  for (const auto& d : zero.deltas) EXPECT_EQ(d.delta, 0.0);
}

TEST(VIExhaustion, FiniteDomainStabilizes) {
  auto g = path_graph(9);
  const auto dom = whole_domain(g);
  const std::vector<Vertex> seeds{4};
  auto exh = exhaust(dom, seeds, 8);
  const std::vector<std::size_t> levels{5, 6, 7};
  const auto rep = run_vi_exhaustion(exh, indicator(g, 4), Forcing::constant(constant_field(g, 1.0)),
                                     TimePartition(1.0, 10), levels);
  for (const auto& d : rep.deltas) EXPECT_EQ(d.delta, 0.0);
}
