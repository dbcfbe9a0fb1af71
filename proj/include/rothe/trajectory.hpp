#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "rothe/calculus.hpp"
#include "rothe/domain.hpp"
#include "rothe/field.hpp"

namespace rothe {

/// Equidistant grid t_i = i·ℓ on [0, T] with ℓ = T/n.
class TimePartition {
 public:
  TimePartition(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) fail(ErrorCode::InvalidArgument, "horizon must be positive");
    if (steps < 1) fail(ErrorCode::InvalidArgument, "step count must be at least 1");
  }

  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] std::size_t steps() const noexcept { return steps_; }
  [[nodiscard]] double step_size() const noexcept { return horizon_ / static_cast<double>(steps_); }

  /// t_i; the last grid point is exactly T.
  [[nodiscard]] double time(std::size_t i) const {
    if (i > steps_) fail(ErrorCode::TimeOutOfRange, "grid index past the horizon");
    if (i == steps_) return horizon_;
    return static_cast<double>(i) * step_size();
  }

 private:
  double horizon_;
  std::size_t steps_;
};

struct StepDiagnostics {
  std::size_t iterations = 0;
  double residual = 0.0;  // sup-norm residual of the step equation
};

/// The Rothe sequence u_{n,0}, ..., u_{n,n} on a fixed domain.
struct RotheTrajectory {
  Domain domain;
  TimePartition partition{1.0, 1};
  std::vector<VertexField> levels;
  std::vector<StepDiagnostics> diagnostics;  // one per step i = 1..n

  [[nodiscard]] const VertexField& at(std::size_t i) const { return levels.at(i); }
  [[nodiscard]] const VertexField& final_state() const { return levels.back(); }

  /// δu_{n,i} = (u_{n,i} - u_{n,i-1}) / ℓ for i ≥ 1.
  [[nodiscard]] VertexField quotient(std::size_t i) const {
    if (i < 1 || i >= levels.size()) fail(ErrorCode::InvalidArgument, "quotient index out of range");
    return (1.0 / partition.step_size()) * (levels[i] - levels[i - 1]);
  }
};

enum class InterpolantKind { Linear, Step };

/// Piecewise-linear Rothe interpolant or the step function. The step function
/// equals u_{n,i} on (t_{i-1}, t_i] and the initial state on [-ℓ, 0].
inline VertexField evaluate_interpolant(const RotheTrajectory& traj, double t, InterpolantKind kind) {
  const auto& part = traj.partition;
  const double ell = part.step_size();
  const double lower = kind == InterpolantKind::Step ? -ell : 0.0;
  if (!(t >= lower && t <= part.horizon()))
    fail(ErrorCode::TimeOutOfRange, "time " + std::to_string(t) + " outside the trajectory");
  const std::size_t n = part.steps();
  if (t <= 0.0) return traj.levels.front();

  // Smallest i with t <= t_i.
  std::size_t i = std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(t / ell)));
  while (i > 1 && t <= part.time(i - 1)) --i;
  while (i < n && t > part.time(i)) ++i;
  if (i == 0) i = 1;
  if (kind == InterpolantKind::Step || t == part.time(i)) return traj.levels[i];

  const double theta = t - part.time(i - 1);
  const auto& a = traj.levels[i - 1];
  const auto& b = traj.levels[i];
  VertexField out(a.graph_ptr());
  for (Vertex x = 0; x < a.size(); ++x) out[x] = a[x] + theta * ((b[x] - a[x]) / ell);
  return out;
}

struct CompareRow {
  double t;
  double l2;   // ‖a - b‖_{L²(Ω°)}
  double sup;  // max over Ω° of |a - b|
};

struct CompareTable {
  std::vector<CompareRow> rows;
  double max_l2 = 0.0;
  double max_sup = 0.0;
};

/// Differences between two trajectories on a shared graph at the given
/// times, measured on the interior of `dom`.
inline CompareTable compare(const RotheTrajectory& a, const RotheTrajectory& b, const Domain& dom,
                            std::span<const double> times) {
  if (!same_graph(a.domain.graph(), b.domain.graph()) || !same_graph(a.domain.graph(), dom.graph()))
    fail(ErrorCode::GraphMismatch, "trajectories live on different graphs");
  CompareTable table;
  for (double t : times) {
    const auto ua = evaluate_interpolant(a, t, InterpolantKind::Linear);
    const auto ub = evaluate_interpolant(b, t, InterpolantKind::Linear);
    double mass = 0.0, sup = 0.0;
    for (Vertex x : dom.interior()) {
      const double d = ua[x] - ub[x];
      mass += dom.graph().measure(x) * d * d;
      sup = std::max(sup, std::abs(d));
    }
    table.rows.push_back({t, std::sqrt(mass), sup});
    table.max_l2 = std::max(table.max_l2, std::sqrt(mass));
    table.max_sup = std::max(table.max_sup, sup);
  }
  return table;
}

/// L²(S) distance between two fields on the same graph.
inline double l2_distance(const VertexField& a, const VertexField& b, std::span<const Vertex> over) {
  require_same_graph(a.graph(), b.graph());
  double s = 0.0;
  for (Vertex x : over) {
    const double d = a[x] - b[x];
    s += a.graph().measure(x) * d * d;
  }
  return std::sqrt(s);
}

struct ExhaustionRun {
  std::size_t level;
  RotheTrajectory trajectory;
};

struct LevelDelta {
  std::size_t level;
  double delta;  // ‖u_{m+1}(·,T) - u_m(·,T)‖_{L²(Ω_m)}
};

struct ExhaustionReport {
  std::vector<ExhaustionRun> runs;  // ascending level, each level solved once
  std::vector<LevelDelta> deltas;   // one per requested level

  [[nodiscard]] bool strictly_decreasing() const {
    for (std::size_t k = 1; k < deltas.size(); ++k)
      if (!(deltas[k].delta < deltas[k - 1].delta)) return false;
    return true;
  }
};

/// Solves each requested level m and its successor m+1 with `solve_level`
/// (a callable Domain -> RotheTrajectory) and compares final states on Ω_m.
template <class SolveLevel>
ExhaustionReport exhaustion_study(const ExhaustionSequence& exh, std::span<const std::size_t> levels,
                                  SolveLevel&& solve_level) {
  std::vector<std::size_t> needed;
  for (std::size_t m : levels) {
    if (m < 1 || m + 1 > exh.max_level())
      fail(ErrorCode::InvalidArgument, "level " + std::to_string(m) + " needs level m+1 within the exhaustion");
    needed.push_back(m);
    needed.push_back(m + 1);
  }
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());

  ExhaustionReport report;
  for (std::size_t m : needed) report.runs.push_back({m, solve_level(exh.level(m))});
  auto find = [&](std::size_t m) -> const RotheTrajectory& {
    for (const auto& r : report.runs)
      if (r.level == m) return r.trajectory;
    fail(ErrorCode::InvalidArgument, "missing level");
  };
  for (std::size_t m : levels) {
    const auto& small = find(m).final_state();
    const auto& large = find(m + 1).final_state();
    report.deltas.push_back({m, l2_distance(large, small, exh.level(m).omega())});
  }
  return report;
}

}  // namespace rothe
