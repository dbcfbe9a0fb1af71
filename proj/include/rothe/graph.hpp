#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rothe/error.hpp"

namespace rothe {

using Vertex = std::size_t;

struct Neighbor {
  Vertex vertex;
  double weight;
};

enum class Provenance { FiniteExplicit, Generative };

class WeightedGraph;
using GraphPtr = std::shared_ptr<const WeightedGraph>;

/// Locally finite weighted graph with symmetric positive edge weights and a
/// positive vertex measure. Vertices are dense handles `0..size()-1`, each
/// carrying an external label used for I/O.
///
/// Graphs produced from a generative neighbor oracle are partial
/// materializations: a vertex whose full neighborhood was not materialized is
/// marked incomplete, and operators that need the full neighborhood refuse it.
class WeightedGraph {
 public:
  [[nodiscard]] std::size_t size() const noexcept { return measure_.size(); }
  [[nodiscard]] std::size_t edge_count() const noexcept { return edge_count_; }
  [[nodiscard]] Provenance provenance() const noexcept { return provenance_; }

  [[nodiscard]] std::span<const Neighbor> neighbors(Vertex x) const { return adjacency_.at(x); }
  [[nodiscard]] double measure(Vertex x) const { return measure_.at(x); }
  [[nodiscard]] std::size_t degree(Vertex x) const { return adjacency_.at(x).size(); }
  [[nodiscard]] bool complete(Vertex x) const { return complete_.at(x) != 0; }
  [[nodiscard]] const std::string& label(Vertex x) const { return labels_.at(x); }

  /// Sum of incident edge weights.
  [[nodiscard]] double weighted_degree(Vertex x) const {
    double s = 0.0;
    for (const auto& nb : adjacency_.at(x)) s += nb.weight;
    return s;
  }

  [[nodiscard]] std::optional<Vertex> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] Vertex at(std::string_view label) const {
    auto v = find(label);
    if (!v) fail(ErrorCode::UnknownVertex, "no vertex labelled '" + std::string(label) + "'");
    return *v;
  }

  /// Throws UnmaterializedNeighbor unless the full neighborhood of x is known.
  void require_complete(Vertex x) const {
    if (!complete(x))
      fail(ErrorCode::UnmaterializedNeighbor,
           "neighborhood of vertex '" + label(x) + "' is not fully materialized");
  }

  [[nodiscard]] bool is_connected() const {
    if (size() == 0) return true;
    std::vector<char> seen(size(), 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      Vertex x = stack.back();
      stack.pop_back();
      for (const auto& nb : adjacency_[x]) {
        if (!seen[nb.vertex]) {
          seen[nb.vertex] = 1;
          ++count;
          stack.push_back(nb.vertex);
        }
      }
    }
    return count == size();
  }

  /// Breadth-first graph distance from a seed set; unreachable vertices get SIZE_MAX.
  [[nodiscard]] std::vector<std::size_t> distances_from(std::span<const Vertex> seeds) const {
    constexpr auto kInf = static_cast<std::size_t>(-1);
    std::vector<std::size_t> dist(size(), kInf);
    std::queue<Vertex> queue;
    for (Vertex s : seeds) {
      if (dist.at(s) != 0) {
        dist[s] = 0;
        queue.push(s);
      }
    }
    while (!queue.empty()) {
      Vertex x = queue.front();
      queue.pop();
      for (const auto& nb : adjacency_[x]) {
        if (dist[nb.vertex] == kInf) {
          dist[nb.vertex] = dist[x] + 1;
          queue.push(nb.vertex);
        }
      }
    }
    return dist;
  }

  friend bool same_graph(const WeightedGraph& a, const WeightedGraph& b) {
    if (&a == &b) return true;
    if (a.labels_ != b.labels_ || a.measure_ != b.measure_) return false;
    for (std::size_t x = 0; x < a.size(); ++x) {
      const auto& ra = a.adjacency_[x];
      const auto& rb = b.adjacency_[x];
      if (ra.size() != rb.size()) return false;
      for (std::size_t k = 0; k < ra.size(); ++k)
        if (ra[k].vertex != rb[k].vertex || ra[k].weight != rb[k].weight) return false;
    }
    return true;
  }

 private:
  friend class GraphBuilder;

  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> measure_;
  std::vector<char> complete_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Vertex> index_;
  std::size_t edge_count_ = 0;
  Provenance provenance_ = Provenance::FiniteExplicit;
};

/// Incremental construction with validation. Edges may be given in one
/// direction (auto-symmetrized) or both directions with bit-identical weights;
/// repeating a direction is a DuplicateEdge.
class GraphBuilder {
 public:
  explicit GraphBuilder(Provenance provenance = Provenance::FiniteExplicit)
      : provenance_(provenance) {}

  Vertex add_vertex(const std::string& label, double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu))
      fail(ErrorCode::NonPositiveMeasure, "measure of '" + label + "' must be positive and finite");
    auto [it, inserted] = index_.emplace(label, labels_.size());
    if (!inserted) fail(ErrorCode::DuplicateVertex, "vertex '" + label + "' declared twice");
    labels_.push_back(label);
    measure_.push_back(mu);
    complete_.push_back(1);
    return it->second;
  }

  void add_edge(const std::string& a, const std::string& b, double omega) {
    add_edge(lookup(a), lookup(b), omega);
  }

  void add_edge(Vertex a, Vertex b, double omega) {
    if (a >= labels_.size() || b >= labels_.size())
      fail(ErrorCode::UnknownVertex, "edge endpoint out of range");
    if (a == b) fail(ErrorCode::SelfLoop, "self-loop at '" + labels_[a] + "'");
    if (!(omega > 0.0) || !std::isfinite(omega))
      fail(ErrorCode::NonPositiveWeight,
           "weight of edge '" + labels_[a] + "'-'" + labels_[b] + "' must be positive and finite");
    const auto key = std::minmax(a, b);
    const unsigned direction = a < b ? 1u : 2u;
    auto it = edges_.find(key);
    if (it == edges_.end()) {
      edges_.emplace(key, EdgeRecord{omega, direction});
      return;
    }
    if (it->second.directions & direction)
      fail(ErrorCode::DuplicateEdge, "edge '" + labels_[a] + "'-'" + labels_[b] + "' listed twice");
    if (it->second.weight != omega)
      fail(ErrorCode::AsymmetricWeight,
           "edge '" + labels_[a] + "'-'" + labels_[b] + "' has different weights per direction");
    it->second.directions |= direction;
  }

  void mark_incomplete(Vertex x) { complete_.at(x) = 0; }

  [[nodiscard]] bool contains(const std::string& label) const { return index_.count(label) != 0; }
  [[nodiscard]] Vertex lookup(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) fail(ErrorCode::UnknownVertex, "no vertex labelled '" + label + "'");
    return it->second;
  }

  /// Validates and freezes the graph. Connectivity is only enforced for
  /// finite-explicit graphs; a materialized ball is connected by construction.
  [[nodiscard]] GraphPtr build() const {
    auto g = std::make_shared<WeightedGraph>();
    g->provenance_ = provenance_;
    g->labels_ = labels_;
    g->measure_ = measure_;
    g->complete_ = complete_;
    g->index_ = index_;
    g->adjacency_.assign(labels_.size(), {});
    for (const auto& [key, rec] : edges_) {
      g->adjacency_[key.first].push_back({key.second, rec.weight});
      g->adjacency_[key.second].push_back({key.first, rec.weight});
    }
    for (auto& row : g->adjacency_)
      std::sort(row.begin(), row.end(),
                [](const Neighbor& l, const Neighbor& r) { return l.vertex < r.vertex; });
    g->edge_count_ = edges_.size();
    if (labels_.empty()) fail(ErrorCode::EmptyScope, "graph has no vertices");
    for (Vertex x = 0; x < g->size(); ++x)
      if (g->adjacency_[x].empty())
        fail(ErrorCode::IsolatedVertex, "vertex '" + labels_[x] + "' has no neighbours");
    if (provenance_ == Provenance::FiniteExplicit && !g->is_connected())
      fail(ErrorCode::DisconnectedGraph, "graph has more than one connected component");
    return g;
  }

 private:
  struct EdgeRecord {
    double weight;
    unsigned directions;
  };

  Provenance provenance_;
  std::vector<std::string> labels_;
  std::vector<double> measure_;
  std::vector<char> complete_;
  std::unordered_map<std::string, Vertex> index_;
  std::map<std::pair<Vertex, Vertex>, EdgeRecord> edges_;
};

struct EdgeSpec {
  std::string from;
  std::string to;
  double weight;
};

/// Builds a finite graph. Vertex handles follow the order of `measure`.
inline GraphPtr build_finite_graph(std::span<const EdgeSpec> edges,
                                   std::span<const std::pair<std::string, double>> measure) {
  GraphBuilder builder;
  for (const auto& [label, mu] : measure) builder.add_vertex(label, mu);
  for (const auto& e : edges) builder.add_edge(e.from, e.to, e.weight);
  return builder.build();
}

/// Integer-labelled convenience form: vertex i has label std::to_string(i) and measure mu[i].
inline GraphPtr build_finite_graph(std::span<const std::tuple<int, int, double>> edges,
                                   std::span<const double> mu) {
  GraphBuilder builder;
  for (std::size_t i = 0; i < mu.size(); ++i) builder.add_vertex(std::to_string(i), mu[i]);
  for (const auto& [a, b, w] : edges) {
    if (a < 0 || b < 0) fail(ErrorCode::UnknownVertex, "negative vertex id");
    builder.add_edge(static_cast<Vertex>(a), static_cast<Vertex>(b), w);
  }
  return builder.build();
}

/// Path graph 0 - 1 - ... - (n-1) with uniform weight and measure.
inline GraphPtr path_graph(std::size_t n, double omega = 1.0, double mu = 1.0) {
  std::vector<std::tuple<int, int, double>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i)
    edges.emplace_back(static_cast<int>(i), static_cast<int>(i + 1), omega);
  std::vector<double> measure(n, mu);
  return build_finite_graph(edges, measure);
}

struct GraphMetrics {
  double mu0;  // inf of the measure
  std::size_t max_degree;
  double d_mu;  // sup of weighted degree / measure
};

/// Metrics over `scope`. Every vertex of the scope needs its full neighborhood.
inline GraphMetrics compute_metrics(const WeightedGraph& g, std::span<const Vertex> scope) {
  if (scope.empty()) fail(ErrorCode::EmptyScope, "metrics need a nonempty scope");
  GraphMetrics m{std::numeric_limits<double>::infinity(), 0, 0.0};
  for (Vertex x : scope) {
    g.require_complete(x);
    m.mu0 = std::min(m.mu0, g.measure(x));
    m.max_degree = std::max(m.max_degree, g.degree(x));
    m.d_mu = std::max(m.d_mu, g.weighted_degree(x) / g.measure(x));
  }
  return m;
}

inline GraphMetrics compute_metrics(const WeightedGraph& g) {
  std::vector<Vertex> all;
  for (Vertex x = 0; x < g.size(); ++x)
    if (g.complete(x)) all.push_back(x);
  return compute_metrics(g, all);
}

}  // namespace rothe
