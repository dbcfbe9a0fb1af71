#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "rothe/domain.hpp"
#include "rothe/field.hpp"
#include "rothe/graph.hpp"

// Discrete calculus on a weighted graph. Every reduction runs in ascending
// vertex order so results are bit-reproducible.

namespace rothe {

/// μ-Laplacian Δv(x) = (1/μ(x)) Σ_{y~x} ω_xy (v(y) - v(x)).
inline double laplacian(const WeightedGraph& g, const VertexField& v, Vertex x) {
  require_same_graph(g, v.graph());
  g.require_complete(x);
  double s = 0.0;
  for (const auto& nb : g.neighbors(x)) s += nb.weight * (v[nb.vertex] - v[x]);
  return s / g.measure(x);
}

/// Gradient form Γ(w,v)(x) = (1/2μ(x)) Σ_{y~x} ω_xy (w(y)-w(x)) (v(y)-v(x)).
inline double gamma(const WeightedGraph& g, const VertexField& w, const VertexField& v, Vertex x) {
  require_same_graph(g, w.graph());
  require_same_graph(g, v.graph());
  g.require_complete(x);
  double s = 0.0;
  for (const auto& nb : g.neighbors(x)) s += nb.weight * ((w[nb.vertex] - w[x]) * (v[nb.vertex] - v[x]));
  return s / (2.0 * g.measure(x));
}

/// |∇v|(x).
inline double gradient_length(const WeightedGraph& g, const VertexField& v, Vertex x) {
  return std::sqrt(gamma(g, v, v, x));
}

/// Σ_{x∈over} μ(x) v(x), summed in ascending vertex order.
inline double integrate(const WeightedGraph& g, const VertexField& v, std::span<const Vertex> over) {
  require_same_graph(g, v.graph());
  std::vector<Vertex> order(over.begin(), over.end());
  std::sort(order.begin(), order.end());
  double s = 0.0;
  for (Vertex x : order) s += g.measure(x) * v[x];
  return s;
}

/// ∫_S |v|^q dμ over an ascending vertex list.
inline double power_integral(const WeightedGraph& g, const VertexField& v, std::span<const Vertex> over, double q) {
  double s = 0.0;
  for (Vertex x : over) s += g.measure(x) * std::pow(std::abs(v[x]), q);
  return s;
}

/// ∫_S Γ(w,v) dμ over an ascending vertex list.
inline double gamma_integral(const WeightedGraph& g, const VertexField& w, const VertexField& v,
                             std::span<const Vertex> over) {
  double s = 0.0;
  for (Vertex x : over) s += g.measure(x) * gamma(g, w, v, x);
  return s;
}

inline double sup_norm(const VertexField& v, std::span<const Vertex> over) {
  double m = 0.0;
  for (Vertex x : over) m = std::max(m, std::abs(v[x]));
  return m;
}

inline double sup_norm(const VertexField& v) {
  double m = 0.0;
  for (double a : v.values()) m = std::max(m, std::abs(a));
  return m;
}

/// ‖v‖_{L^q(S)} for q in [1, ∞]; q = ∞ is the exact sup over S.
inline double lq_norm(const WeightedGraph& g, const VertexField& v, std::span<const Vertex> over, double q) {
  if (!(q >= 1.0)) fail(ErrorCode::InvalidQ, "q must be at least 1");
  require_same_graph(g, v.graph());
  if (std::isinf(q)) return sup_norm(v, over);
  return std::pow(power_integral(g, v, over, q), 1.0 / q);
}

struct Norms {
  double l2_interior;  // ‖v‖_{L²(Ω°)}
  double l2_domain;    // ‖v‖_{L²(Ω)}
  double lq;           // ‖v‖_{L^q(Ω)}
  double w12;          // ‖v‖_{W^{1,2}(Ω)}
  double gradient_l2;  // ‖∇v‖_{L²(Ω)}
};

inline Norms norms(const WeightedGraph& g, const VertexField& v, const Domain& dom, double q = 2.0) {
  if (!(q >= 1.0)) fail(ErrorCode::InvalidQ, "q must be at least 1");
  require_same_graph(g, dom.graph());
  require_same_graph(g, v.graph());
  const double mass_interior = power_integral(g, v, dom.interior(), 2.0);
  const double mass_domain = power_integral(g, v, dom.omega(), 2.0);
  const double grad = gamma_integral(g, v, v, dom.omega());
  return Norms{std::sqrt(mass_interior), std::sqrt(mass_domain), lq_norm(g, v, dom.omega(), q),
               std::sqrt(grad + mass_domain), std::sqrt(grad)};
}

enum class InnerProduct { L2, W12 };

/// L2: ∫_{Ω°} w v dμ.  W12: ∫_Ω (Γ(w,v) + w v) dμ.
inline double inner_product(const WeightedGraph& g, const VertexField& w, const VertexField& v, const Domain& dom,
                            InnerProduct kind) {
  require_same_graph(g, dom.graph());
  require_same_graph(g, w.graph());
  require_same_graph(g, v.graph());
  double s = 0.0;
  if (kind == InnerProduct::L2) {
    for (Vertex x : dom.interior()) s += g.measure(x) * (w[x] * v[x]);
    return s;
  }
  for (Vertex x : dom.omega()) s += g.measure(x) * (gamma(g, w, v, x) + w[x] * v[x]);
  return s;
}

struct GreenResidual {
  double lhs;  // -∫_{Ω°} Δv1 · v2 dμ
  double rhs;  // ∫_Ω Γ(v1, v2) dμ
  [[nodiscard]] double residual() const { return std::abs(lhs - rhs); }
};

/// Summation by parts for fields vanishing off the interior:
/// -∫_{Ω°} Δv1 · v2 dμ = ∫_Ω Γ(v1, v2) dμ.
inline GreenResidual green_identity_check(const WeightedGraph& g, const Domain& dom, const VertexField& v1,
                                          const VertexField& v2) {
  require_same_graph(g, dom.graph());
  if (!is_dirichlet_admissible(v1, dom) || !is_dirichlet_admissible(v2, dom))
    fail(ErrorCode::NotDirichletAdmissible, "Green identity needs fields vanishing off the interior");
  double lhs = 0.0;
  for (Vertex x : dom.interior()) lhs -= g.measure(x) * laplacian(g, v1, x) * v2[x];
  return GreenResidual{lhs, gamma_integral(g, v1, v2, dom.omega())};
}

/// Δv restricted to the interior, zero elsewhere.
inline VertexField laplacian_field(const Domain& dom, const VertexField& v) {
  VertexField out(v.graph_ptr());
  for (Vertex x : dom.interior()) out[x] = laplacian(dom.graph(), v, x);
  return out;
}

}  // namespace rothe
