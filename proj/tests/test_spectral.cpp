#include <gtest/gtest.h>

#include "support.hpp"

using namespace rothe;

namespace {

// Closed form of u' = -2u - u³, u(0) = 1, at t = 0.1: 1/sqrt(1.5 e^{0.4} - 0.5).
constexpr double kCubicOdeAtTenth = 0.7585914964015493;

}  // namespace

TEST(Eigenbasis, SingleInterior) {
  const auto basis = dirichlet_eigenbasis(support::single_interior_domain());
  ASSERT_EQ(basis.size(), 1u);
  EXPECT_NEAR(basis.eigenvalues[0], 2.0, 1e-14);
  EXPECT_NEAR(basis.eigenfields[0][2], 1.0 / std::sqrt(3.0), 1e-14);
}

TEST(Eigenbasis, TwoInteriorPath) {
  const auto basis = dirichlet_eigenbasis(support::two_interior_domain());
  ASSERT_EQ(basis.size(), 2u);
  EXPECT_NEAR(basis.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(basis.eigenvalues[1], 3.0, 1e-14);
  const auto c = check_basis(basis);
  EXPECT_LE(c.max_residual, 1e-12);
  EXPECT_LE(c.max_orthonormality, 1e-12);
}

TEST(Eigenbasis, DegeneratePairPassesInvariants) {
  // Two non-adjacent interior vertices a1, a2, each with two boundary
  // neighbours; all boundary vertices attach to one exterior vertex c.
  const std::vector<EdgeSpec> edges{{"a1", "b1", 1}, {"a1", "b2", 1}, {"a2", "b3", 1}, {"a2", "b4", 1},
                                    {"b1", "c", 1},  {"b2", "c", 1},  {"b3", "c", 1},  {"b4", "c", 1}};
  std::vector<std::pair<std::string, double>> mu;
  for (const char* l : {"a1", "a2", "b1", "b2", "b3", "b4", "c"}) mu.emplace_back(l, 1.0);
  auto g = build_finite_graph(edges, mu);
  const std::vector<std::string> omega{"a1", "a2", "b1", "b2", "b3", "b4"};
  const auto dom = make_domain(g, std::span<const std::string>(omega));
  ASSERT_EQ(dom.interior().size(), 2u);
  const auto basis = dirichlet_eigenbasis(dom);
  EXPECT_NEAR(basis.eigenvalues[0], 2.0, 1e-14);
  EXPECT_NEAR(basis.eigenvalues[1], 2.0, 1e-14);
  const auto c = check_basis(basis);
  EXPECT_LE(c.max_residual, 1e-12);
  EXPECT_LE(c.max_orthonormality, 1e-12);
}

TEST(Eigenbasis, RandomGraphsInvariants) {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = support::random_graph(rng, 5 + rng() % 40);
    const auto dom = support::random_domain(rng, g);
    const auto basis = dirichlet_eigenbasis(dom);
    const auto c = check_basis(basis);
    EXPECT_LE(c.max_residual, 1e-10);
    EXPECT_LE(c.max_orthonormality, 1e-10);
    EXPECT_GE(c.min_eigenvalue, -1e-12);
    for (std::size_t j = 1; j < basis.size(); ++j) EXPECT_LE(basis.eigenvalues[j - 1], basis.eigenvalues[j]);
    // (h, φ_j)_{W12} = (1 + λ_j) ∫ h φ_j.
    const auto h = support::random_admissible(rng, dom);
    const auto coeff = spectral_coefficients(basis, h);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double l2 = inner_product(*g, h, basis.eigenfields[j], dom, InnerProduct::L2);
      EXPECT_NEAR(coeff[j], (1.0 + basis.eigenvalues[j]) * l2, 1e-10 * (1.0 + std::abs(coeff[j])));
    }
  }
}

TEST(Eigenbasis, EmptyInterior) {
  auto g = path_graph(5);
  const std::vector<Vertex> omega{2};
  try {
    (void)dirichlet_eigenbasis(make_domain(g, omega));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInterior);
  }
}

TEST(ExactSolution, SingleInteriorDecay) {
  const auto dom = support::single_interior_domain();
  const auto basis = dirichlet_eigenbasis(dom);
  const auto h = indicator(dom.graph_ptr(), 2);
  EXPECT_NEAR(spectral_coefficients(basis, h)[0], std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(exact_p1_solution(basis, h, 1.0)[2], 0.0497870683678639, 1e-15);
  for (double t : {0.0, 0.3, 2.0}) EXPECT_NEAR(exact_p1_solution(basis, h, t)[2], std::exp(-3 * t), 1e-15);
}

TEST(ExactSolution, ReconstructsInitialAndDecays) {
  std::mt19937_64 rng(88);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = support::random_graph(rng, 5 + rng() % 30);
    const auto dom = support::random_domain(rng, g);
    const auto basis = dirichlet_eigenbasis(dom);
    const auto h = support::random_admissible(rng, dom);
    EXPECT_LE(support::sup_diff(exact_p1_solution(basis, h, 0.0), h), 1e-10);
    double prev = norms(*g, h, dom).l2_interior;
    for (double t : {0.1, 0.2, 0.5, 1.0, 3.0}) {
      const double now = norms(*g, exact_p1_solution(basis, h, t), dom).l2_interior;
      EXPECT_LE(now, prev * (1 + 1e-12));
      prev = now;
    }
  }
}

TEST(ExactSolution, EigenfieldIsSingleMode) {
  const auto dom = support::two_interior_domain();
  const auto basis = dirichlet_eigenbasis(dom);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto u = exact_p1_solution(basis, basis.eigenfields[k], 0.7);
    const auto expect = std::exp(-(basis.eigenvalues[k] + 1.0) * 0.7) * basis.eigenfields[k];
    EXPECT_LE(support::sup_diff(u, expect), 1e-14);
  }
}

TEST(OdeOracle, AgreesWithExactForLinearCase) {
  const auto dom = support::two_interior_domain();
  VertexField h(dom.graph_ptr());
  h[2] = 0.8;
  h[3] = -0.3;
  const auto prob = make_heat_problem(dom, 1.0, h, 1.0);
  const auto basis = dirichlet_eigenbasis(dom);
  const std::vector<double> ts{0.25, 0.5, 1.0};
  const double tol = 1e-11;
  const auto out = ode_oracle(prob, ts, tol);
  EXPECT_LT(out.defect, tol);
  for (std::size_t k = 0; k < ts.size(); ++k)
    EXPECT_LE(support::sup_diff(out.fields[k], exact_p1_solution(basis, prob.initial, ts[k])), 10 * tol);
}

TEST(OdeOracle, CubicSingleInterior) {
  const auto dom = support::single_interior_domain();
  const auto prob = make_heat_problem(dom, 3.0, indicator(dom.graph_ptr(), 2), 1.0);
  const std::vector<double> ts{0.1};
  const auto out = ode_oracle(prob, ts, 1e-12);
  EXPECT_NEAR(out.fields[0][2], kCubicOdeAtTenth, 1e-11);
}

TEST(OdeOracle, ZeroData) {
  const auto dom = support::two_interior_domain();
  const auto prob = make_heat_problem(dom, 2.0, VertexField(dom.graph_ptr()), 1.0);
  const std::vector<double> ts{0.5, 1.0};
  for (const auto& f : ode_oracle(prob, ts, 1e-12).fields) EXPECT_EQ(sup_norm(f), 0.0);
}

TEST(OdeOracle, RejectsBadArguments) {
  const auto dom = support::single_interior_domain();
  const auto prob = make_heat_problem(dom, 2.0, indicator(dom.graph_ptr(), 2), 1.0);
  const std::vector<double> ts{0.5};
  EXPECT_THROW((void)ode_oracle(prob, ts, 1e-15), Error);
  const std::vector<double> neg{-0.5};
  EXPECT_THROW((void)ode_oracle(prob, neg, 1e-10), Error);
}
