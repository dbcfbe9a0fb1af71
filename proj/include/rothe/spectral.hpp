#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rothe/calculus.hpp"
#include "rothe/heat.hpp"
#include "rothe/operator.hpp"

namespace rothe {

/// Eigenpairs of -Δ with zero values off Ω°, eigenfields orthonormal in the
/// W^{1,2}_0(Ω) inner product, eigenvalues ascending.
struct SpectralBasis {
  Domain domain;
  std::vector<double> eigenvalues;
  std::vector<VertexField> eigenfields;

  [[nodiscard]] std::size_t size() const noexcept { return eigenvalues.size(); }
};

/// Dense symmetric solve of M^{-1/2} K M^{-1/2}; eigenvectors are mapped
/// back, scaled by 1/sqrt(1+λ) to unit W^{1,2} norm, and sign-fixed so the
/// first nonzero component is positive.
inline SpectralBasis dirichlet_eigenbasis(const Domain& dom) {
  dom.require_interior();
  const InteriorSystem sys(dom);
  const Eigen::MatrixXd k(sys.stiffness());
  const Eigen::VectorXd inv_sqrt_m = sys.mass().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd b = inv_sqrt_m.asDiagonal() * k * inv_sqrt_m.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (b + b.transpose()));
  if (eig.info() != Eigen::Success) fail(ErrorCode::SolverBreakdown, "dense eigensolver failed");

  SpectralBasis basis{dom, {}, {}};
  for (Eigen::Index j = 0; j < sys.size(); ++j) {
    const double lambda = eig.eigenvalues()[j];
    Eigen::VectorXd phi = inv_sqrt_m.cwiseProduct(eig.eigenvectors().col(j)) / std::sqrt(1.0 + lambda);
    const double cutoff = 1e-12 * phi.lpNorm<Eigen::Infinity>();
    for (Eigen::Index c = 0; c < phi.size(); ++c) {
      if (std::abs(phi[c]) > cutoff) {
        if (phi[c] < 0.0) phi = -phi;
        break;
      }
    }
    basis.eigenvalues.push_back(lambda);
    basis.eigenfields.push_back(sys.scatter(phi));
  }
  return basis;
}

struct BasisCheck {
  double max_residual = 0.0;        // max_j ‖-Δφ_j - λ_j φ_j‖_{L²(Ω°)} / (1 + λ_j)
  double max_orthonormality = 0.0;  // max_{i,j} |(φ_i, φ_j)_{W12} - δ_ij|
  double min_eigenvalue = 0.0;
};

inline BasisCheck check_basis(const SpectralBasis& basis) {
  const auto& dom = basis.domain;
  const auto& g = dom.graph();
  BasisCheck c;
  c.min_eigenvalue = basis.eigenvalues.empty() ? 0.0 : basis.eigenvalues.front();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto& phi = basis.eigenfields[j];
    double mass = 0.0;
    for (Vertex x : dom.interior()) {
      const double r = -laplacian(g, phi, x) - basis.eigenvalues[j] * phi[x];
      mass += g.measure(x) * r * r;
    }
    c.max_residual = std::max(c.max_residual, std::sqrt(mass) / (1.0 + basis.eigenvalues[j]));
    for (std::size_t i = 0; i <= j; ++i) {
      const double ip = inner_product(g, basis.eigenfields[i], phi, dom, InnerProduct::W12);
      c.max_orthonormality = std::max(c.max_orthonormality, std::abs(ip - (i == j ? 1.0 : 0.0)));
    }
  }
  return c;
}

/// Coefficients h_j(0) = (h, φ_j)_{W^{1,2}_0(Ω)}.
inline std::vector<double> spectral_coefficients(const SpectralBasis& basis, const VertexField& h) {
  const auto& dom = basis.domain;
  require_on(h, dom);
  if (!is_dirichlet_admissible(h, dom))
    fail(ErrorCode::NotDirichletAdmissible, "initial field must vanish off the interior");
  std::vector<double> coeff;
  coeff.reserve(basis.size());
  for (const auto& phi : basis.eigenfields) coeff.push_back(inner_product(dom.graph(), h, phi, dom, InnerProduct::W12));
  return coeff;
}

/// u(·,t) = Σ_j h_j(0) e^{-(λ_j+1)t} φ_j, the solution of the p = 1 problem.
inline VertexField exact_p1_solution(const SpectralBasis& basis, const VertexField& h, double t) {
  if (!(t >= 0.0)) fail(ErrorCode::TimeOutOfRange, "time must be non-negative");
  const auto coeff = spectral_coefficients(basis, h);
  VertexField u(h.graph_ptr());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double a = coeff[j] * std::exp(-(basis.eigenvalues[j] + 1.0) * t);
    const auto& phi = basis.eigenfields[j];
    for (Vertex x : basis.domain.interior()) u[x] += a * phi[x];
  }
  return u;
}

/// Exact p = 1 trajectory sampled on a time grid, for comparisons.
inline RotheTrajectory exact_p1_trajectory(const SpectralBasis& basis, const VertexField& h, const TimePartition& part) {
  RotheTrajectory traj{basis.domain, part, {}, {}};
  for (std::size_t i = 0; i <= part.steps(); ++i) traj.levels.push_back(exact_p1_solution(basis, h, part.time(i)));
  return traj;
}

struct OracleResult {
  std::vector<VertexField> fields;  // one per requested time, in request order
  std::size_t steps = 0;            // RK4 steps of the accepted (finer) run
  double defect = 0.0;              // sup difference against the half-as-fine run
};

/// Classical RK4 for the semi-discrete system u' = Δu - |u|^{p-1}u on Ω°.
/// The step is halved until the answers at all requested times change by
/// less than `tol` in the sup norm; the finer run is returned.
inline OracleResult ode_oracle(const HeatProblem& prob, std::span<const double> t_eval, double tol) {
  if (!(tol >= 1e-13)) fail(ErrorCode::InvalidArgument, "oracle tolerance must be at least 1e-13");
  if (t_eval.empty()) return {};
  for (double t : t_eval)
    if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorCode::TimeOutOfRange, "oracle times must be non-negative");
  const InteriorSystem sys(prob.domain);
  const Eigen::VectorXd u0 = sys.gather(prob.initial);
  const double p = prob.p;

  std::vector<double> times(t_eval.begin(), t_eval.end());
  std::sort(times.begin(), times.end());
  const double t_max = times.back();

  auto rhs = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd f = -sys.negative_laplacian(u);
    for (Eigen::Index k = 0; k < u.size(); ++k) f[k] -= signed_power(u[k], p);
    return f;
  };

  // Integrates with at most `h` per step, landing exactly on each output time.
  auto integrate_to = [&](double h, std::size_t& steps) {
    std::vector<Eigen::VectorXd> out;
    Eigen::VectorXd u = u0;
    double t = 0.0;
    for (double target : times) {
      const double span = target - t;
      if (span > 0.0) {
        const auto k = static_cast<std::size_t>(std::ceil(span / h - 1e-9));
        const double dt = span / static_cast<double>(k);
        for (std::size_t s = 0; s < k; ++s) {
          const Eigen::VectorXd k1 = rhs(u);
          const Eigen::VectorXd k2 = rhs(u + 0.5 * dt * k1);
          const Eigen::VectorXd k3 = rhs(u + 0.5 * dt * k2);
          const Eigen::VectorXd k4 = rhs(u + dt * k3);
          u += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        steps += k;
        t = target;
      }
      out.push_back(u);
    }
    return out;
  };

  // Start inside the RK4 stability interval: |Δ| ≤ 2 D_μ and the reaction
  // slope is at most p ‖h‖_∞^{p-1} by the maximum principle.
  const GraphMetrics metrics = compute_metrics(prob.domain.graph(), prob.domain.interior());
  const double amplitude = u0.size() ? u0.lpNorm<Eigen::Infinity>() : 0.0;
  const double stiffness = 2.0 * metrics.d_mu + p * std::pow(std::max(amplitude, 1e-300), p - 1.0);
  double h = std::min(t_max > 0.0 ? t_max : 1.0, 1.0 / stiffness);

  std::size_t steps = 0;
  auto coarse = integrate_to(h, steps);
  constexpr std::size_t kMaxSteps = std::size_t{1} << 26;
  while (true) {
    h *= 0.5;
    std::size_t fine_steps = 0;
    auto fine = integrate_to(h, fine_steps);
    double defect = 0.0;
    for (std::size_t k = 0; k < fine.size(); ++k)
      defect = std::max(defect, (fine[k] - coarse[k]).lpNorm<Eigen::Infinity>());
    if (defect < tol) {
      OracleResult result;
      result.steps = fine_steps;
      result.defect = defect;
      for (double t : t_eval) {
        const auto pos = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
        result.fields.push_back(sys.scatter(fine[pos]));
      }
      return result;
    }
    if (fine_steps > kMaxSteps || !std::isfinite(defect))
      fail(ErrorCode::StiffnessFailure, "RK4 oracle did not settle before the step budget");
    coarse = std::move(fine);
  }
}

}  // namespace rothe
