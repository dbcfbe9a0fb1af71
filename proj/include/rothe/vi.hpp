#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rothe/calculus.hpp"
#include "rothe/forcing.hpp"
#include "rothe/operator.hpp"
#include "rothe/trajectory.hpp"

namespace rothe {

/// Admissible set: all fields vanishing off Ω°.
struct Subspace {};

/// Admissible fields with u ≥ ψ on Ω° (and zero off Ω°).
struct Obstacle {
  VertexField psi;
};

using Constraint = std::variant<Subspace, Obstacle>;

/// ∫ ∂ₜu (v - u) ≥ ∫ (Δu + f)(v - u) over the admissible set, u(·,0) = g.
struct VIProblem {
  Domain domain;
  Forcing forcing;
  VertexField initial;  // g, zero off Ω°
  double horizon = 1.0;
  std::optional<double> lipschitz_bound;
  Constraint constraint = Subspace{};
};

inline VIProblem make_vi_problem(const Domain& dom, Forcing forcing, const VertexField& g, double horizon,
                                 Constraint constraint = Subspace{}, std::optional<double> lipschitz_bound = {}) {
  dom.require_interior();
  require_on(g, dom);
  require_same_graph(*forcing.graph_ptr(), dom.graph());
  if (!g.all_finite()) fail(ErrorCode::NonFiniteValue, "initial field has non-finite values");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail(ErrorCode::InvalidArgument, "horizon must be positive");
  if (lipschitz_bound && !(*lipschitz_bound >= 0.0))
    fail(ErrorCode::InvalidArgument, "declared Lipschitz constant must be non-negative");
  if (const auto* ob = std::get_if<Obstacle>(&constraint)) {
    require_on(ob->psi, dom);
    if (!ob->psi.all_finite()) fail(ErrorCode::NonFiniteValue, "obstacle has non-finite values");
  }
  return VIProblem{dom, std::move(forcing), restrict_to_interior(g, dom), horizon, lipschitz_bound,
                   std::move(constraint)};
}

struct LipschitzReport {
  double estimate = 0.0;
  std::optional<double> declared;
  bool violation = false;  // estimate exceeds the declared bound by more than 1%
  std::size_t pairs = 0;
};

/// max over sampled pairs of ‖f(·,t) - f(·,s)‖_{L²(Ω°)} / |t - s|.
inline LipschitzReport lipschitz_validate(const Forcing& f, const Domain& dom, std::span<const double> times,
                                          std::optional<double> declared = {}) {
  std::vector<double> ts(times.begin(), times.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (ts.size() < 2) fail(ErrorCode::InsufficientSamples, "need at least two distinct sample times");
  std::vector<VertexField> samples;
  samples.reserve(ts.size());
  for (double t : ts) samples.push_back(f(t));

  LipschitzReport rep;
  rep.declared = declared;
  for (std::size_t a = 0; a < ts.size(); ++a) {
    for (std::size_t b = a + 1; b < ts.size(); ++b) {
      const double q = l2_distance(samples[b], samples[a], dom.interior()) / (ts[b] - ts[a]);
      rep.estimate = std::max(rep.estimate, q);
      ++rep.pairs;
    }
  }
  if (declared) rep.violation = rep.estimate > 1.01 * *declared;
  return rep;
}

/// a(u, v) = (1/ℓ)∫_{Ω°} u v + ∫_Ω Γ(u, v).
inline double bilinear_form(const VertexField& u, const VertexField& v, const Domain& dom, double ell) {
  require_on(u, dom);
  require_on(v, dom);
  const auto& g = dom.graph();
  double mass = 0.0;
  for (Vertex x : dom.interior()) mass += g.measure(x) * u[x] * v[x];
  return mass / ell + gamma_integral(g, u, v, dom.omega());
}

/// Coercivity constant of a on the admissible subspace with the norm ‖v‖² + ‖∇v‖².
inline double coercivity_constant(double ell) { return std::min(1.0 / ell, 1.0); }

struct CoercivityCheck {
  std::size_t samples = 0;
  double min_ratio = 0.0;  // min a(v,v) / ‖v‖²_{W12}
  double beta = 0.0;
  bool ok = true;
};

/// Evaluates a(v,v) ≥ β‖v‖² on random admissible fields.
inline CoercivityCheck check_coercivity(const Domain& dom, double ell, std::size_t samples, std::uint64_t seed) {
  dom.require_interior();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  CoercivityCheck c;
  c.beta = coercivity_constant(ell);
  c.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    VertexField v(dom.graph_ptr());
    for (Vertex x : dom.interior()) v[x] = unif(rng);
    const double a = bilinear_form(v, v, dom, ell);
    const double h = inner_product(dom.graph(), v, v, dom, InnerProduct::W12);
    if (h <= 0.0) continue;
    c.min_ratio = std::min(c.min_ratio, a / h);
    if (!(a >= c.beta * h * (1.0 - 1e-12))) c.ok = false;
    ++c.samples;
  }
  return c;
}

enum class SweepOrder { Forward, Backward };

struct VIStepOptions {
  SweepOrder order = SweepOrder::Forward;
  std::optional<VertexField> initial_iterate;  // obstacle start; defaults to max(u_prev, ψ)
  std::size_t max_sweeps = 200000;
  double relaxation = 1.0;
  double tolerance = 1e-12;  // KKT stopping level relative to scale
  LinearSolverKind solver = LinearSolverKind::Auto;
};

struct VIStepReport {
  std::size_t i = 0;
  VertexField u;
  VertexField quotient;            // (u - u_prev)/ℓ
  double variational_residual = 0.0;  // sup over Ω° of |r|/μ for unconstrained vertices
  double feasibility = 0.0;        // max over Ω° of (ψ - u)⁺
  double dual = 0.0;               // max over Ω° of (-r/μ)⁺
  double complementarity = 0.0;    // max over Ω° of |r/μ · (u - ψ)|
  double scale = 1.0;              // 1 + ‖f_i + u_prev/ℓ‖_∞
  double beta = 0.0;
  std::size_t sweeps = 0;
};

/// One implicit VI step with a fixed ℓ. The subspace case is the SPD system
/// (M/ℓ + K)u = M(f + u_prev/ℓ) with a cached factorization; the obstacle
/// case is projected Gauss-Seidel on the same matrix.
class VIStepper {
 public:
  VIStepper(const Domain& dom, double ell, VIStepOptions options = {})
      : system_(dom), ell_(ell), options_(std::move(options)), solver_(options_.solver) {
    if (!(ell > 0.0) || !std::isfinite(ell)) fail(ErrorCode::InvalidArgument, "step size must be positive");
    matrix_ = system_.shifted(1.0 / ell_);
  }

  [[nodiscard]] const InteriorSystem& system() const noexcept { return system_; }
  [[nodiscard]] double step_size() const noexcept { return ell_; }

  [[nodiscard]] VIStepReport step(const VertexField& u_prev, const VertexField& f, const Constraint& constraint) {
    require_on(f, system_.domain());
    const Eigen::VectorXd prev = system_.gather(u_prev);
    const Eigen::VectorXd load = system_.gather(f) + prev / ell_;
    const Eigen::VectorXd& m = system_.mass();
    const Eigen::VectorXd b = m.cwiseProduct(load);

    VIStepReport rep;
    rep.scale = 1.0 + load.lpNorm<Eigen::Infinity>();
    rep.beta = coercivity_constant(ell_);

    Eigen::VectorXd u;
    const auto* ob = std::get_if<Obstacle>(&constraint);
    if (!ob) {
      if (!factored_) {
        solver_.compute(matrix_);
        factored_ = true;
      }
      u = solver_.solve(b);
      rep.sweeps = 1;
    } else {
      u = project(system_.gather(ob->psi), prev, b, rep.sweeps);
    }

    const Eigen::VectorXd r = (matrix_ * u - b).cwiseQuotient(m);
    if (!ob) {
      rep.variational_residual = r.lpNorm<Eigen::Infinity>();
      if (!(rep.variational_residual <= 1e-10 * rep.scale))
        fail(ErrorCode::NonConvergence, "linear VI step residual " + std::to_string(rep.variational_residual));
    } else {
      const Eigen::VectorXd psi = system_.gather(ob->psi);
      for (Eigen::Index k = 0; k < u.size(); ++k) {
        const double gap = u[k] - psi[k];
        rep.feasibility = std::max(rep.feasibility, -gap);
        rep.dual = std::max(rep.dual, -r[k]);
        rep.complementarity = std::max(rep.complementarity, std::abs(r[k] * gap));
        if (gap > 0.0) rep.variational_residual = std::max(rep.variational_residual, std::abs(r[k]));
      }
    }
    rep.u = system_.scatter(u);
    rep.quotient = system_.scatter((u - prev) / ell_);
    return rep;
  }

 private:
  // Projected Gauss-Seidel; stops when the KKT triple falls below tolerance·scale.
  Eigen::VectorXd project(const Eigen::VectorXd& psi, const Eigen::VectorXd& prev, const Eigen::VectorXd& b,
                          std::size_t& sweeps) const {
    const auto n = system_.size();
    const Eigen::VectorXd& m = system_.mass();
    Eigen::VectorXd u;
    if (options_.initial_iterate) {
      u = system_.gather(*options_.initial_iterate).cwiseMax(psi);
    } else {
      u = prev.cwiseMax(psi);
    }
    const double scale = 1.0 + b.cwiseQuotient(m).lpNorm<Eigen::Infinity>();
    const double omega = options_.relaxation;
    const bool forward = options_.order == SweepOrder::Forward;
    for (sweeps = 1; sweeps <= options_.max_sweeps; ++sweeps) {
      for (Eigen::Index s = 0; s < n; ++s) {
        const Eigen::Index k = forward ? s : n - 1 - s;
        double off = 0.0, diag = 0.0;
        for (InteriorSystem::SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
          if (it.row() == k) {
            diag = it.value();
          } else {
            off += it.value() * u[it.row()];
          }
        }
        const double gs = (b[k] - off) / diag;
        u[k] = std::max(psi[k], u[k] + omega * (gs - u[k]));
      }
      const Eigen::VectorXd r = (matrix_ * u - b).cwiseQuotient(m);
      double kkt = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double gap = u[k] - psi[k];
        kkt = std::max({kkt, -r[k], std::abs(r[k] * gap)});
      }
      if (!std::isfinite(kkt)) fail(ErrorCode::SolverBreakdown, "projected iteration diverged");
      if (kkt <= options_.tolerance * scale) return u;
    }
    fail(ErrorCode::NonConvergence, "projected Gauss-Seidel did not reach the KKT tolerance");
  }

  InteriorSystem system_;
  double ell_;
  VIStepOptions options_;
  SpdSolver solver_;
  InteriorSystem::SparseMatrix matrix_;
  bool factored_ = false;
};

inline VIStepReport vi_step(const VertexField& u_prev, const VertexField& f, double ell, const Domain& dom,
                            const Constraint& constraint, VIStepOptions options = {}) {
  VIStepper stepper(dom, ell, std::move(options));
  return stepper.step(u_prev, f, constraint);
}

struct VIRun {
  RotheTrajectory trajectory;
  std::vector<VertexField> forcing;  // f_{n,i} = f(·, t_i), i = 0..n
  std::vector<VIStepReport> reports; // one per step i = 1..n
};

inline VIRun run_vi(const VIProblem& prob, const TimePartition& part, VIStepOptions options = {}) {
  VIStepper stepper(prob.domain, part.step_size(), std::move(options));
  VIRun run{RotheTrajectory{prob.domain, part, {}, {}}, {}, {}};
  run.trajectory.levels.push_back(prob.initial);
  run.forcing.push_back(prob.forcing(part.time(0)));
  for (std::size_t i = 1; i <= part.steps(); ++i) {
    run.forcing.push_back(prob.forcing(part.time(i)));
    auto rep = stepper.step(run.trajectory.levels.back(), run.forcing.back(), prob.constraint);
    rep.i = i;
    run.trajectory.levels.push_back(rep.u);
    run.trajectory.diagnostics.push_back({rep.sweeps, rep.variational_residual});
    run.reports.push_back(std::move(rep));
  }
  return run;
}

/// Step function of the sampled forcing: f_{n,i} on (t_{i-1}, t_i], f_{n,0} at t ≤ 0.
inline const VertexField& forcing_step_function(const VIRun& run, double t) {
  const auto& part = run.trajectory.partition;
  if (!(t >= -part.step_size() && t <= part.horizon()))
    fail(ErrorCode::TimeOutOfRange, "time " + std::to_string(t) + " outside the run");
  if (t <= 0.0) return run.forcing.front();
  std::size_t i = std::min<std::size_t>(part.steps(), static_cast<std::size_t>(std::ceil(t / part.step_size())));
  while (i > 1 && t <= part.time(i - 1)) --i;
  while (i < part.steps() && t > part.time(i)) ++i;
  return run.forcing[std::max<std::size_t>(i, 1)];
}

struct MonotonicityRow {
  std::size_t j;
  double quotient;      // ‖δu_{n,j}‖_{L²(Ω°)}
  double previous;      // ‖δu_{n,j-1}‖
  double forcing_jump;  // ‖f_{n,j} - f_{n,j-1}‖
  bool holds;
};

struct MonotonicityReport {
  std::vector<MonotonicityRow> rows;  // j = 2..n
  double first_bound = 0.0;           // ‖Δg + f_{n,1}‖ bounds ‖δu_{n,1}‖
  double chain_bound = 0.0;           // ‖Δg‖ + ‖f(·,0)‖ + c·T
  double max_quotient = 0.0;
  bool recurrence_ok = true;
  bool chain_ok = true;
};

/// Quotient recurrence ‖δu_j‖ ≤ ‖δu_{j-1}‖ + ‖f_j - f_{j-1}‖ per step, and the
/// cumulative bound with Lipschitz constant `c` (estimated when not given).
inline MonotonicityReport vi_monotonicity_monitor(const VIRun& run, std::optional<double> c = {}) {
  const auto& traj = run.trajectory;
  const auto& dom = traj.domain;
  const auto interior = dom.interior();
  const std::size_t n = traj.partition.steps();
  MonotonicityReport rep;

  const VertexField lap_g = laplacian_field(dom, traj.levels.front());
  rep.first_bound = l2_distance(lap_g, -1.0 * run.forcing[1], interior);

  double cval = 0.0;
  if (c) {
    cval = *c;
  } else {
    for (std::size_t j = 1; j <= n; ++j)
      cval = std::max(cval, l2_distance(run.forcing[j], run.forcing[j - 1], interior) / traj.partition.step_size());
  }
  const VertexField zero(dom.graph_ptr());
  rep.chain_bound = l2_distance(lap_g, zero, interior) + l2_distance(run.forcing[0], zero, interior) +
                    cval * traj.partition.horizon();

  double prev = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    const double q = l2_distance(run.reports[j - 1].quotient, zero, interior);
    rep.max_quotient = std::max(rep.max_quotient, q);
    const double slack = 1e-10 * (1.0 + q);
    if (j == 1) {
      if (!(q <= rep.first_bound + slack)) rep.recurrence_ok = false;
    } else {
      const double jump = l2_distance(run.forcing[j], run.forcing[j - 1], interior);
      const bool holds = q <= prev + jump + 1e-10 * (1.0 + prev);
      rep.rows.push_back({j, q, prev, jump, holds});
      if (!holds) rep.recurrence_ok = false;
    }
    if (!(q <= rep.chain_bound + slack)) rep.chain_ok = false;
    prev = q;
  }
  return rep;
}

/// VI on an exhaustion with g and f given on the shared exhaustion graph.
inline ExhaustionReport run_vi_exhaustion(const ExhaustionSequence& exh, const VertexField& g, const Forcing& f,
                                          const TimePartition& part, std::span<const std::size_t> levels,
                                          const VIStepOptions& options = {}) {
  require_same_graph(g.graph(), *exh.graph_ptr());
  require_same_graph(*f.graph_ptr(), *exh.graph_ptr());
  return exhaustion_study(exh, levels, [&](const Domain& level) {
    return run_vi(make_vi_problem(level, f, g, part.horizon()), part, options).trajectory;
  });
}

}  // namespace rothe
