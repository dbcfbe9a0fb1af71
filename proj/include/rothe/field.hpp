#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "rothe/domain.hpp"
#include "rothe/graph.hpp"

namespace rothe {

/// A real value per materialized vertex of a graph.
class VertexField {
 public:
  VertexField() = default;
  explicit VertexField(GraphPtr g) : graph_(std::move(g)), values_(graph_->size(), 0.0) {}
  VertexField(GraphPtr g, std::vector<double> values) : graph_(std::move(g)), values_(std::move(values)) {
    if (values_.size() != graph_->size())
      fail(ErrorCode::DomainMismatch, "field length does not match the graph");
  }

  [[nodiscard]] const GraphPtr& graph_ptr() const noexcept { return graph_; }
  [[nodiscard]] const WeightedGraph& graph() const noexcept { return *graph_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  double operator[](Vertex x) const { return values_[x]; }
  double& operator[](Vertex x) { return values_[x]; }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }

  [[nodiscard]] bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const VertexField& a, const VertexField& b) {
    return a.graph_ == b.graph_ && a.values_ == b.values_;
  }

 private:
  GraphPtr graph_;
  std::vector<double> values_;
};

inline void require_same_graph(const WeightedGraph& a, const WeightedGraph& b) {
  if (&a != &b) fail(ErrorCode::DomainMismatch, "fields live on different graphs");
}

inline void require_on(const VertexField& v, const Domain& dom) {
  require_same_graph(v.graph(), dom.graph());
}

inline VertexField indicator(const GraphPtr& g, Vertex x) {
  VertexField f(g);
  f[x] = 1.0;
  return f;
}

inline VertexField constant_field(const GraphPtr& g, double c) {
  return VertexField(g, std::vector<double>(g->size(), c));
}

/// True when v vanishes exactly on every vertex outside the interior.
inline bool is_dirichlet_admissible(const VertexField& v, const Domain& dom) {
  require_on(v, dom);
  for (Vertex x = 0; x < v.size(); ++x)
    if (!dom.is_interior(x) && v[x] != 0.0) return false;
  return true;
}

/// Copy of v restricted to the interior and zero elsewhere.
inline VertexField restrict_to_interior(const VertexField& v, const Domain& dom) {
  require_on(v, dom);
  VertexField out(v.graph_ptr());
  for (Vertex x : dom.interior()) out[x] = v[x];
  return out;
}

inline VertexField operator-(const VertexField& a, const VertexField& b) {
  require_same_graph(a.graph(), b.graph());
  VertexField out(a.graph_ptr());
  for (Vertex x = 0; x < a.size(); ++x) out[x] = a[x] - b[x];
  return out;
}

inline VertexField operator+(const VertexField& a, const VertexField& b) {
  require_same_graph(a.graph(), b.graph());
  VertexField out(a.graph_ptr());
  for (Vertex x = 0; x < a.size(); ++x) out[x] = a[x] + b[x];
  return out;
}

inline VertexField operator*(double s, const VertexField& a) {
  VertexField out(a.graph_ptr());
  for (Vertex x = 0; x < a.size(); ++x) out[x] = s * a[x];
  return out;
}

}  // namespace rothe
