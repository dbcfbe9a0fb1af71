#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rothe/calculus.hpp"
#include "rothe/domain.hpp"
#include "rothe/field.hpp"
#include "rothe/operator.hpp"
#include "rothe/trajectory.hpp"

namespace rothe {

/// ∂_t u + |u|^{p-1} u = Δu on Ω°, u = 0 off Ω°, u(·,0) = h.
struct HeatProblem {
  Domain domain;
  double p = 1.0;
  VertexField initial;  // h restricted to Ω°
  double horizon = 1.0;
};

/// Validates the data and restricts h to the interior of `dom`.
inline HeatProblem make_heat_problem(const Domain& dom, double p, const VertexField& h, double horizon) {
  dom.require_interior();
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorCode::InvalidArgument, "exponent p must satisfy p >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail(ErrorCode::InvalidArgument, "horizon must be positive");
  require_on(h, dom);
  if (!h.all_finite()) fail(ErrorCode::NonFiniteValue, "initial field has non-finite values");
  return HeatProblem{dom, p, restrict_to_interior(h, dom), horizon};
}

/// s ↦ |s|^{p-1} s.
inline double signed_power(double s, double p) {
  if (p == 1.0) return s;
  return std::copysign(std::pow(std::abs(s), p), s);
}

/// ℱ_i(u) = (1/ℓ)∫_{Ω°}|u|² - (2/ℓ)∫_{Ω°} u_prev·u + (2/(p+1))∫_{Ω°}|u|^{p+1} + ∫_Ω|∇u|².
inline double step_functional(const VertexField& u, const VertexField& u_prev, const HeatProblem& prob, double ell) {
  const auto& dom = prob.domain;
  require_on(u, dom);
  require_on(u_prev, dom);
  if (!(ell > 0.0)) fail(ErrorCode::InvalidArgument, "step size must be positive");
  const auto& g = dom.graph();
  double mass = 0.0, cross = 0.0, power = 0.0;
  for (Vertex x : dom.interior()) {
    const double mu = g.measure(x);
    mass += mu * u[x] * u[x];
    cross += mu * u_prev[x] * u[x];
    power += mu * std::pow(std::abs(u[x]), prob.p + 1.0);
  }
  return mass / ell - 2.0 * cross / ell + 2.0 / (prob.p + 1.0) * power + gamma_integral(g, u, u, dom.omega());
}

/// Per-vertex residual of (u - u_prev)/ℓ + |u|^{p-1}u - Δu on Ω°, zero elsewhere.
inline VertexField euler_lagrange_residual(const VertexField& u, const VertexField& u_prev, const HeatProblem& prob,
                                           double ell) {
  const auto& dom = prob.domain;
  VertexField r(u.graph_ptr());
  for (Vertex x : dom.interior())
    r[x] = (u[x] - u_prev[x]) / ell + signed_power(u[x], prob.p) - laplacian(dom.graph(), u, x);
  return r;
}

struct StepOptions {
  std::optional<VertexField> initial_iterate;  // Newton start; defaults to u_prev
  LinearSolverKind solver = LinearSolverKind::Auto;
  std::size_t max_iterations = 100;
  double tolerance = 1e-12;  // target sup residual relative to 1 + ‖u_prev‖_∞
  double accept = 1e-10;     // residual still accepted when round-off stalls Newton
};

struct StepOutcome {
  VertexField field;
  StepDiagnostics diagnostics;
};

/// Implicit step solver for a fixed domain, exponent and step size. For p = 1
/// the step is one SPD solve with a cached factorization; otherwise damped
/// Newton on the Euler-Lagrange system with backtracking on ℱ_i.
class HeatStepper {
 public:
  HeatStepper(const Domain& dom, double p, double ell, StepOptions options = {})
      : system_(dom), p_(p), ell_(ell), options_(std::move(options)), solver_(options_.solver) {
    if (!(ell > 0.0) || !std::isfinite(ell)) fail(ErrorCode::InvalidArgument, "step size must be positive");
    if (!(p >= 1.0)) fail(ErrorCode::InvalidArgument, "exponent p must satisfy p >= 1");
    if (p_ == 1.0) solver_.compute(system_.shifted(1.0 / ell_ + 1.0));
  }

  [[nodiscard]] const InteriorSystem& system() const noexcept { return system_; }

  [[nodiscard]] StepOutcome step(const VertexField& u_prev) {
    return step(u_prev, options_.initial_iterate ? &*options_.initial_iterate : nullptr);
  }

  [[nodiscard]] StepOutcome step(const VertexField& u_prev, const VertexField* start) {
    const Eigen::VectorXd prev = system_.gather(u_prev);
    const double scale = 1.0 + prev.lpNorm<Eigen::Infinity>();
    const Eigen::VectorXd& m = system_.mass();

    if (p_ == 1.0) {
      Eigen::VectorXd u = solver_.solve(m.cwiseProduct(prev) / ell_);
      const double res = residual(u, prev).lpNorm<Eigen::Infinity>();
      if (!(res <= options_.accept * scale))
        fail(ErrorCode::NonConvergence, "linear step residual " + std::to_string(res) + " above tolerance");
      return {system_.scatter(u), {1, res}};
    }

    Eigen::VectorXd u = start ? system_.gather(*start) : prev;
    Eigen::VectorXd r = residual(u, prev);
    double res = r.lpNorm<Eigen::Infinity>();
    std::size_t it = 0;
    for (; it < options_.max_iterations && res > options_.tolerance * scale; ++it) {
      Eigen::VectorXd slope(u.size());
      for (Eigen::Index k = 0; k < u.size(); ++k)
        slope[k] = p_ * std::pow(std::max(std::abs(u[k]), 1e-12), p_ - 1.0);
      solver_.compute(system_.shifted(1.0 / ell_, &slope));
      const Eigen::VectorXd grad = m.cwiseProduct(r);  // half the gradient of ℱ_i
      const Eigen::VectorXd d = solver_.solve(-grad);

      const double f0 = functional(u, prev);
      const double decrease = grad.dot(d);  // negative for a descent direction
      double t = 1.0;
      Eigen::VectorXd trial;
      Eigen::VectorXd trial_r;
      double trial_res = 0.0;
      bool accepted = false;
      for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
        trial = u + t * d;
        trial_r = residual(trial, prev);
        trial_res = trial_r.lpNorm<Eigen::Infinity>();
        // Armijo on ℱ_i; near the minimizer ℱ_i stalls in round-off, where a
        // non-increasing residual is accepted instead.
        if (functional(trial, prev) <= f0 + 1e-4 * t * 2.0 * decrease || trial_res <= res) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      const double moved = (trial - u).lpNorm<Eigen::Infinity>();
      u = std::move(trial);
      r = std::move(trial_r);
      res = trial_res;
      if (moved <= 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + u.lpNorm<Eigen::Infinity>()) &&
          res <= options_.accept * scale) {
        ++it;
        break;
      }
    }
    if (!(res <= options_.accept * scale))
      fail(ErrorCode::NonConvergence, "Newton residual " + std::to_string(res) + " after " + std::to_string(it) +
                                          " iterations");
    return {system_.scatter(u), {it, res}};
  }

 private:
  [[nodiscard]] Eigen::VectorXd residual(const Eigen::VectorXd& u, const Eigen::VectorXd& prev) const {
    Eigen::VectorXd r = (u - prev) / ell_ + system_.negative_laplacian(u);
    for (Eigen::Index k = 0; k < u.size(); ++k) r[k] += signed_power(u[k], p_);
    return r;
  }

  // ℱ_i in interior coordinates; ∫_Ω|∇u|² equals uᵀKu for admissible u.
  [[nodiscard]] double functional(const Eigen::VectorXd& u, const Eigen::VectorXd& prev) const {
    const Eigen::VectorXd& m = system_.mass();
    double power = 0.0;
    for (Eigen::Index k = 0; k < u.size(); ++k) power += m[k] * std::pow(std::abs(u[k]), p_ + 1.0);
    return (m.cwiseProduct(u).dot(u) - 2.0 * m.cwiseProduct(prev).dot(u)) / ell_ + 2.0 / (p_ + 1.0) * power +
           u.dot(system_.stiffness() * u);
  }

  InteriorSystem system_;
  double p_;
  double ell_;
  StepOptions options_;
  SpdSolver solver_;
};

/// The unique minimizer of ℱ_i over fields vanishing off Ω°.
inline VertexField solve_step(const VertexField& u_prev, const HeatProblem& prob, double ell, StepOptions options = {}) {
  require_on(u_prev, prob.domain);
  HeatStepper stepper(prob.domain, prob.p, ell, std::move(options));
  return stepper.step(u_prev).field;
}

inline RotheTrajectory run_rothe(const HeatProblem& prob, const TimePartition& part, StepOptions options = {}) {
  options.initial_iterate.reset();
  HeatStepper stepper(prob.domain, prob.p, part.step_size(), options);
  RotheTrajectory traj{prob.domain, part, {}, {}};
  traj.levels.reserve(part.steps() + 1);
  traj.levels.push_back(restrict_to_interior(prob.initial, prob.domain));
  for (std::size_t i = 1; i <= part.steps(); ++i) {
    auto out = stepper.step(traj.levels.back());
    traj.levels.push_back(std::move(out.field));
    traj.diagnostics.push_back(out.diagnostics);
  }
  return traj;
}

struct EstimateRow {
  std::size_t i;
  double t;
  double l2;              // ‖u_i‖_{L²(Ω)}
  double grad_l2;         // ‖∇u_i‖_{L²(Ω)}
  double l2p;             // ‖u_i‖_{L^{2p}(Ω)}
  double delta_l2;        // ‖δu_i‖_{L²(Ω)}
  double energy_residual; // r_i
  double energy_defect;   // d_i
};

struct EstimateReport {
  std::vector<EstimateRow> rows;
  double initial_l2 = 0.0;
  double initial_lp1 = 0.0;    // ‖h‖_{L^{p+1}}, reported for the L^{p+1} hypothesis
  double max_step_gap = 0.0;   // max_i ℓ‖δu_i‖, bounds sup_t ‖u^{(n)} - ū^{(n)}‖
  double max_grad_l2 = 0.0;
  bool l2_monotone = true;     // ‖u_i‖ ≤ ‖u_{i-1}‖ + 1e-12(1 + ‖u_{i-1}‖)
  bool energy_ok = true;       // r_i ≤ 1e-10(1 + ‖u_{i-1}‖²)
  bool defect_ok = true;       // d_i ≤ 1e-10(1 + ‖u_{i-1}‖²)
};

/// Per-step norms and the discrete energy balance of a heat trajectory.
/// With v = u_i in the step equation, r_i = -½‖u_i - u_{i-1}‖² and
/// d_i = 2 r_i / ℓ at the exact minimizer, so both must be non-positive.
inline EstimateReport monitor_estimates(const RotheTrajectory& traj, const HeatProblem& prob) {
  const auto& dom = traj.domain;
  const auto& g = dom.graph();
  const double ell = traj.partition.step_size();
  const double p = prob.p;
  EstimateReport rep;
  rep.initial_l2 = norms(g, traj.levels.front(), dom).l2_domain;
  rep.initial_lp1 = lq_norm(g, prob.initial, dom.interior(), p + 1.0);
  double prev_mass = power_integral(g, traj.levels.front(), dom.omega(), 2.0);
  for (std::size_t i = 1; i < traj.levels.size(); ++i) {
    const auto& u = traj.levels[i];
    const double mass = power_integral(g, u, dom.omega(), 2.0);
    const double grad2 = gamma_integral(g, u, u, dom.omega());
    const double power = power_integral(g, u, dom.omega(), p + 1.0);
    const double delta = norms(g, traj.quotient(i), dom).l2_domain;
    EstimateRow row{i,
                    traj.partition.time(i),
                    std::sqrt(mass),
                    std::sqrt(grad2),
                    lq_norm(g, u, dom.omega(), 2.0 * p),
                    delta,
                    mass + ell * (power + grad2) - 0.5 * (mass + prev_mass),
                    (mass - prev_mass) / ell + 2.0 * power + 2.0 * grad2};
    const double scale = 1.0 + prev_mass;
    if (!(row.l2 <= std::sqrt(prev_mass) + 1e-12 * (1.0 + std::sqrt(prev_mass)))) rep.l2_monotone = false;
    if (!(row.energy_residual <= 1e-10 * scale)) rep.energy_ok = false;
    if (!(row.energy_defect <= 1e-10 * scale)) rep.defect_ok = false;
    rep.max_step_gap = std::max(rep.max_step_gap, ell * delta);
    rep.max_grad_l2 = std::max(rep.max_grad_l2, row.grad_l2);
    rep.rows.push_back(row);
    prev_mass = mass;
  }
  return rep;
}

/// Heat problem on an exhaustion: h lives on the shared exhaustion graph and
/// is restricted to each level's interior.
inline ExhaustionReport run_exhaustion(const ExhaustionSequence& exh, double p, const VertexField& h,
                                       const TimePartition& part, std::span<const std::size_t> levels,
                                       const StepOptions& options = {}) {
  require_same_graph(h.graph(), *exh.graph_ptr());
  if (!h.all_finite()) fail(ErrorCode::NonFiniteValue, "initial field has non-finite values");
  return exhaustion_study(exh, levels, [&](const Domain& level) {
    return run_rothe(make_heat_problem(level, p, h, part.horizon()), part, options);
  });
}

}  // namespace rothe
