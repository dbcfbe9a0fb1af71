#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rothe/graph.hpp"
#include "rothe/lattice.hpp"

namespace rothe {

/// A finite vertex subset of a graph with its boundary (members that have a
/// neighbor outside the subset) and interior. Boundary and interior are always
/// taken relative to the ambient graph.
class Domain {
 public:
  Domain() = default;

  [[nodiscard]] const GraphPtr& graph_ptr() const noexcept { return graph_; }
  [[nodiscard]] const WeightedGraph& graph() const noexcept { return *graph_; }

  [[nodiscard]] std::span<const Vertex> omega() const noexcept { return omega_; }
  [[nodiscard]] std::span<const Vertex> boundary() const noexcept { return boundary_; }
  [[nodiscard]] std::span<const Vertex> interior() const noexcept { return interior_; }

  [[nodiscard]] bool contains(Vertex x) const { return x < member_.size() && member_[x] != 0; }
  [[nodiscard]] bool is_interior(Vertex x) const { return x < member_.size() && member_[x] == 2; }
  [[nodiscard]] bool is_boundary(Vertex x) const { return x < member_.size() && member_[x] == 1; }
  [[nodiscard]] bool has_interior() const noexcept { return !interior_.empty(); }

  /// Problems can only be posed on domains with a nonempty interior.
  void require_interior() const {
    if (interior_.empty()) fail(ErrorCode::EmptyInterior, "domain has an empty interior");
  }

  friend Domain make_domain(GraphPtr g, std::span<const Vertex> omega);

 private:
  GraphPtr graph_;
  std::vector<Vertex> omega_;
  std::vector<Vertex> boundary_;
  std::vector<Vertex> interior_;
  std::vector<char> member_;  // 0 outside, 1 boundary, 2 interior
};

/// Builds Ω, ∂Ω and Ω°. Every vertex of Ω needs a fully materialized
/// neighborhood. An empty interior is allowed here and rejected by solvers.
inline Domain make_domain(GraphPtr g, std::span<const Vertex> omega) {
  if (!g) fail(ErrorCode::InvalidArgument, "null graph");
  if (omega.empty()) fail(ErrorCode::EmptyOmega, "domain needs at least one vertex");
  Domain d;
  d.graph_ = std::move(g);
  const auto& graph = *d.graph_;
  d.member_.assign(graph.size(), 0);
  for (Vertex x : omega) {
    if (x >= graph.size()) fail(ErrorCode::UnknownVertex, "domain vertex out of range");
    d.member_[x] = 1;
  }
  for (Vertex x = 0; x < graph.size(); ++x) {
    if (!d.member_[x]) continue;
    graph.require_complete(x);
    d.omega_.push_back(x);
    bool inside = true;
    for (const auto& nb : graph.neighbors(x)) {
      if (!d.member_[nb.vertex]) {
        inside = false;
        break;
      }
    }
    (inside ? d.interior_ : d.boundary_).push_back(x);
  }
  for (Vertex x : d.interior_) d.member_[x] = 2;
  return d;
}

/// Domain covering every vertex of a finite graph (empty boundary).
inline Domain whole_domain(GraphPtr g) {
  std::vector<Vertex> all(g->size());
  for (Vertex x = 0; x < all.size(); ++x) all[x] = x;
  return make_domain(std::move(g), all);
}

inline Domain make_domain(GraphPtr g, std::span<const std::string> labels) {
  std::vector<Vertex> omega;
  omega.reserve(labels.size());
  for (const auto& l : labels) omega.push_back(g->at(l));
  return make_domain(std::move(g), omega);
}

/// Nested finite levels Ω_1 ⊆ Ω_2 ⊆ ... of a target region on one shared
/// graph. Level m is the graph-distance ball of radius m around the seeds,
/// intersected with the region.
class ExhaustionSequence {
 public:
  [[nodiscard]] const GraphPtr& graph_ptr() const noexcept { return graph_; }
  [[nodiscard]] std::size_t max_level() const noexcept { return levels_.size(); }
  [[nodiscard]] std::span<const Vertex> seeds() const noexcept { return seeds_; }

  /// Level m, 1-based.
  [[nodiscard]] const Domain& level(std::size_t m) const {
    if (m < 1 || m > levels_.size())
      fail(ErrorCode::InvalidArgument, "exhaustion level " + std::to_string(m) + " out of range");
    return levels_[m - 1];
  }

  /// First level whose interior is nonempty, or 0 if none is.
  [[nodiscard]] std::size_t first_usable() const noexcept { return first_usable_; }

  /// Smallest level from which the sequence no longer grows, or 0 if it grows up to max_level.
  [[nodiscard]] std::size_t stabilized_at() const noexcept { return stabilized_at_; }

  friend ExhaustionSequence exhaust(GraphPtr g, const std::function<bool(Vertex)>& in_region,
                                    std::span<const Vertex> seeds, std::size_t max_level);

 private:
  GraphPtr graph_;
  std::vector<Vertex> seeds_;
  std::vector<Domain> levels_;
  std::size_t first_usable_ = 0;
  std::size_t stabilized_at_ = 0;
};

inline ExhaustionSequence exhaust(GraphPtr g, const std::function<bool(Vertex)>& in_region,
                                  std::span<const Vertex> seeds, std::size_t max_level) {
  if (max_level < 1) fail(ErrorCode::InvalidArgument, "max_level must be at least 1");
  if (seeds.empty()) fail(ErrorCode::SeedOutsideDomain, "exhaustion needs a seed");
  for (Vertex s : seeds)
    if (s >= g->size() || !in_region(s))
      fail(ErrorCode::SeedOutsideDomain, "seed vertex lies outside the domain");

  ExhaustionSequence seq;
  seq.graph_ = g;
  seq.seeds_.assign(seeds.begin(), seeds.end());
  const auto dist = g->distances_from(seeds);
  std::size_t previous_size = 0;
  for (std::size_t m = 1; m <= max_level; ++m) {
    std::vector<Vertex> members;
    for (Vertex x = 0; x < g->size(); ++x)
      if (dist[x] <= m && in_region(x)) members.push_back(x);
    seq.levels_.push_back(make_domain(g, members));
    if (seq.first_usable_ == 0 && seq.levels_.back().has_interior()) seq.first_usable_ = m;
    if (members.size() != previous_size) seq.stabilized_at_ = 0;
    else if (seq.stabilized_at_ == 0) seq.stabilized_at_ = m - 1;
    previous_size = members.size();
  }
  return seq;
}

/// Exhaustion of a finite domain; the sequence stabilizes at Ω itself.
inline ExhaustionSequence exhaust(const Domain& dom, std::span<const Vertex> seeds, std::size_t max_level) {
  return exhaust(dom.graph_ptr(), [&dom](Vertex x) { return dom.contains(x); }, seeds, max_level);
}

/// Materializes a lattice ball large enough that every vertex up to
/// `max_level` has its full neighborhood, then builds the exhaustion of the
/// region selected by `in_region` (a predicate on lattice keys).
template <NeighborOracle O>
ExhaustionSequence lattice_exhaustion(const O& oracle,
                                      const std::function<bool(const typename O::key_type&)>& in_region,
                                      const std::vector<typename O::key_type>& seeds, std::size_t max_level) {
  for (const auto& s : seeds)
    if (!in_region(s)) fail(ErrorCode::SeedOutsideDomain, "seed " + oracle.label(s) + " lies outside the region");
  GraphPtr g = materialize_ball(oracle, seeds, max_level + 1);
  std::vector<char> region(g->size(), 0);
  for (Vertex x = 0; x < g->size(); ++x) {
    auto key = oracle.parse(g->label(x));
    region[x] = key && in_region(*key) ? 1 : 0;
  }
  std::vector<Vertex> seed_handles;
  for (const auto& s : seeds) seed_handles.push_back(g->at(oracle.label(s)));
  return exhaust(g, [region = std::move(region)](Vertex x) { return region[x] != 0; }, seed_handles, max_level);
}

}  // namespace rothe
