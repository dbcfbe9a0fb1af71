#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rothe/graph.hpp"

namespace rothe {

/// A deterministic neighbor oracle describing a (possibly infinite) locally
/// finite graph. Keys must be totally ordered so materialization is reproducible.
template <class O>
concept NeighborOracle = requires(const O& oracle, const typename O::key_type& key, std::string_view text) {
  { oracle.neighbors(key) } -> std::convertible_to<std::vector<std::pair<typename O::key_type, double>>>;
  { oracle.measure(key) } -> std::convertible_to<double>;
  { oracle.label(key) } -> std::convertible_to<std::string>;
  { oracle.parse(text) } -> std::convertible_to<std::optional<typename O::key_type>>;
} && std::totally_ordered<typename O::key_type>;

/// The integer lattice Z^D with nearest-neighbor edges, uniform weight and measure.
template <std::size_t D>
struct IntegerLattice {
  static_assert(D >= 1);
  using key_type = std::array<std::int64_t, D>;

  double omega = 1.0;
  double mu = 1.0;

  [[nodiscard]] std::vector<std::pair<key_type, double>> neighbors(const key_type& k) const {
    std::vector<std::pair<key_type, double>> out;
    out.reserve(2 * D);
    for (std::size_t axis = 0; axis < D; ++axis) {
      for (std::int64_t step : {-1, 1}) {
        key_type n = k;
        n[axis] += step;
        out.emplace_back(n, omega);
      }
    }
    return out;
  }

  [[nodiscard]] double measure(const key_type&) const { return mu; }

  [[nodiscard]] std::string label(const key_type& k) const {
    std::string s;
    for (std::size_t axis = 0; axis < D; ++axis) {
      if (axis) s += ',';
      s += std::to_string(k[axis]);
    }
    return s;
  }

  [[nodiscard]] std::optional<key_type> parse(std::string_view text) const {
    key_type k{};
    std::string buf(text);
    for (auto& c : buf)
      if (c == ',') c = ' ';
    std::istringstream in(buf);
    for (std::size_t axis = 0; axis < D; ++axis)
      if (!(in >> k[axis])) return std::nullopt;
    std::string rest;
    if (in >> rest) return std::nullopt;
    return k;
  }
};

using LatticeZ = IntegerLattice<1>;
using LatticeZ2 = IntegerLattice<2>;

/// Materializes the graph-distance ball of `radius` around `seeds`. Vertices
/// whose every oracle neighbor lies inside the ball are complete; the rest
/// (the outer shell) keep only their materialized edges and are marked
/// incomplete. Vertex handles follow BFS order with neighbors in oracle order,
/// so two materializations of the same ball agree exactly.
template <NeighborOracle O>
GraphPtr materialize_ball(const O& oracle, const std::vector<typename O::key_type>& seeds,
                          std::size_t radius) {
  using Key = typename O::key_type;
  if (seeds.empty()) fail(ErrorCode::EmptyScope, "ball needs at least one seed");
  std::map<Key, std::size_t> dist;
  std::vector<Key> order;
  std::queue<Key> queue;
  for (const auto& s : seeds) {
    if (dist.emplace(s, 0).second) {
      order.push_back(s);
      queue.push(s);
    }
  }
  while (!queue.empty()) {
    Key k = queue.front();
    queue.pop();
    const std::size_t d = dist[k];
    if (d == radius) continue;
    for (const auto& [n, w] : oracle.neighbors(k)) {
      (void)w;
      if (dist.emplace(n, d + 1).second) {
        order.push_back(n);
        queue.push(n);
      }
    }
  }

  GraphBuilder builder(Provenance::Generative);
  for (const auto& k : order) builder.add_vertex(oracle.label(k), oracle.measure(k));
  std::map<Key, Vertex> handle;
  for (Vertex v = 0; v < order.size(); ++v) handle.emplace(order[v], v);
  for (Vertex v = 0; v < order.size(); ++v) {
    bool complete = true;
    for (const auto& [n, w] : oracle.neighbors(order[v])) {
      auto it = handle.find(n);
      if (it == handle.end()) {
        complete = false;
        continue;
      }
      if (v < it->second) builder.add_edge(v, it->second, w);
    }
    if (!complete) builder.mark_incomplete(v);
  }
  return builder.build();
}

}  // namespace rothe
