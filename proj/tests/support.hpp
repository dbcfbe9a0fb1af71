#pragma once

#include <algorithm>
#include <random>
#include <tuple>
#include <vector>

#include "rothe/rothe.hpp"

namespace rothe::support {

/// Random connected graph: a random spanning tree plus extra edges,
/// μ ∈ [0.5, 2], ω ∈ [0.1, 3].
inline GraphPtr random_graph(std::mt19937_64& rng, std::size_t n, double extra_edge_ratio = 0.6) {
  std::uniform_real_distribution<double> mu(0.5, 2.0), w(0.1, 3.0);
  std::vector<std::tuple<int, int, double>> edges;
  std::vector<std::vector<char>> used(n, std::vector<char>(n, 0));
  for (std::size_t v = 1; v < n; ++v) {
    std::uniform_int_distribution<std::size_t> parent(0, v - 1);
    const auto u = parent(rng);
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v), w(rng));
    used[u][v] = used[v][u] = 1;
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const auto extra = static_cast<std::size_t>(extra_edge_ratio * static_cast<double>(n));
  for (std::size_t k = 0; k < extra; ++k) {
    const auto a = pick(rng), b = pick(rng);
    if (a == b || used[a][b]) continue;
    used[a][b] = used[b][a] = 1;
    edges.emplace_back(static_cast<int>(a), static_cast<int>(b), w(rng));
  }
  std::vector<double> measure(n);
  for (auto& m : measure) m = mu(rng);
  return build_finite_graph(edges, measure);
}

/// Ω = a graph ball around a random vertex, grown until Ω° is nonempty; may be all of V.
inline Domain random_domain(std::mt19937_64& rng, const GraphPtr& g) {
  std::uniform_int_distribution<std::size_t> pick(0, g->size() - 1);
  std::uniform_int_distribution<std::size_t> extra(0, 2);
  const Vertex seed = pick(rng);
  const std::vector<Vertex> seeds{seed};
  const auto dist = g->distances_from(seeds);
  for (std::size_t r = 1 + extra(rng);; ++r) {
    std::vector<Vertex> omega;
    for (Vertex x = 0; x < g->size(); ++x)
      if (dist[x] <= r) omega.push_back(x);
    auto dom = make_domain(g, omega);
    if (dom.has_interior()) return dom;
  }
}

inline VertexField random_admissible(std::mt19937_64& rng, const Domain& dom, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  VertexField v(dom.graph_ptr());
  for (Vertex x : dom.interior()) v[x] = u(rng);
  return v;
}

inline VertexField random_field(std::mt19937_64& rng, const GraphPtr& g, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  VertexField v(g);
  for (Vertex x = 0; x < g->size(); ++x) v[x] = u(rng);
  return v;
}

/// P5 with Ω = {1,2,3}, so Ω° = {2}.
inline Domain single_interior_domain() {
  auto g = path_graph(5);
  const std::vector<Vertex> omega{1, 2, 3};
  return make_domain(g, omega);
}

/// P6 with Ω = {1,2,3,4}, so Ω° = {2,3}.
inline Domain two_interior_domain() {
  auto g = path_graph(6);
  const std::vector<Vertex> omega{1, 2, 3, 4};
  return make_domain(g, omega);
}

inline double sup_diff(const VertexField& a, const VertexField& b) {
  double s = 0.0;
  for (Vertex x = 0; x < a.size(); ++x) s = std::max(s, std::abs(a[x] - b[x]));
  return s;
}

}  // namespace rothe::support
