#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <memory>
#include <vector>

#include "rothe/domain.hpp"
#include "rothe/field.hpp"

namespace rothe {

/// Dense numbering of the interior Ω° together with the Dirichlet stiffness
/// matrix K (K u = -μ Δu for u vanishing off Ω°) and the lumped μ-mass.
class InteriorSystem {
 public:
  using SparseMatrix = Eigen::SparseMatrix<double>;

  explicit InteriorSystem(const Domain& dom) : domain_(dom) {
    dom.require_interior();
    const auto& g = dom.graph();
    const auto interior = dom.interior();
    index_.assign(g.size(), kNone);
    for (std::size_t k = 0; k < interior.size(); ++k) index_[interior[k]] = k;
    const auto n = static_cast<Eigen::Index>(interior.size());
    mass_.resize(n);
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const Vertex x = interior[k];
      mass_[static_cast<Eigen::Index>(k)] = g.measure(x);
      double diag = 0.0;
      for (const auto& nb : g.neighbors(x)) {
        diag += nb.weight;
        if (index_[nb.vertex] != kNone)
          entries.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(index_[nb.vertex]),
                               -nb.weight);
      }
      entries.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k), diag);
    }
    stiffness_.resize(n, n);
    stiffness_.setFromTriplets(entries.begin(), entries.end());
    stiffness_.makeCompressed();
  }

  [[nodiscard]] const Domain& domain() const noexcept { return domain_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return mass_.size(); }
  [[nodiscard]] const SparseMatrix& stiffness() const noexcept { return stiffness_; }
  [[nodiscard]] const Eigen::VectorXd& mass() const noexcept { return mass_; }

  [[nodiscard]] Eigen::VectorXd gather(const VertexField& v) const {
    require_on(v, domain_);
    Eigen::VectorXd out(size());
    const auto interior = domain_.interior();
    for (std::size_t k = 0; k < interior.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[interior[k]];
    return out;
  }

  /// Field equal to `u` on the interior and exactly zero elsewhere.
  [[nodiscard]] VertexField scatter(const Eigen::VectorXd& u) const {
    VertexField out(domain_.graph_ptr());
    const auto interior = domain_.interior();
    for (std::size_t k = 0; k < interior.size(); ++k) out[interior[k]] = u[static_cast<Eigen::Index>(k)];
    return out;
  }

  /// -Δu on the interior for u vanishing off the interior.
  [[nodiscard]] Eigen::VectorXd negative_laplacian(const Eigen::VectorXd& u) const {
    return (stiffness_ * u).cwiseQuotient(mass_);
  }

  /// (c_mass·M + diag(extra)·M + K) as a sparse matrix.
  [[nodiscard]] SparseMatrix shifted(double c_mass, const Eigen::VectorXd* extra = nullptr) const {
    SparseMatrix a = stiffness_;
    for (Eigen::Index k = 0; k < size(); ++k) {
      double d = c_mass * mass_[k];
      if (extra) d += (*extra)[k] * mass_[k];
      a.coeffRef(k, k) += d;
    }
    return a;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  Domain domain_;
  std::vector<std::size_t> index_;
  SparseMatrix stiffness_;
  Eigen::VectorXd mass_;
};

enum class LinearSolverKind { Auto, Direct, ConjugateGradient };

/// Symmetric positive definite solve: sparse LDLᵀ up to `direct_limit`
/// unknowns, Jacobi-preconditioned CG above (or as forced by `kind`).
class SpdSolver {
 public:
  static constexpr Eigen::Index direct_limit = 10000;

  explicit SpdSolver(LinearSolverKind kind = LinearSolverKind::Auto, double cg_tolerance = 1e-15)
      : kind_(kind), cg_tolerance_(cg_tolerance) {}

  void compute(const InteriorSystem::SparseMatrix& a) {
    use_direct_ = kind_ == LinearSolverKind::Direct ||
                  (kind_ == LinearSolverKind::Auto && a.rows() <= direct_limit);
    if (use_direct_) {
      if (!analyzed_) {
        direct_.analyzePattern(a);
        analyzed_ = true;
      }
      direct_.factorize(a);
      if (direct_.info() != Eigen::Success) fail(ErrorCode::SolverBreakdown, "sparse LDLT factorization failed");
    } else {
      cg_.setTolerance(cg_tolerance_);
      cg_.setMaxIterations(std::max<Eigen::Index>(1000, 10 * a.rows()));
      cg_.compute(a);
      if (cg_.info() != Eigen::Success) fail(ErrorCode::SolverBreakdown, "CG preconditioner setup failed");
    }
  }

  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    if (use_direct_) {
      Eigen::VectorXd x = direct_.solve(b);
      if (direct_.info() != Eigen::Success) fail(ErrorCode::SolverBreakdown, "sparse LDLT solve failed");
      return x;
    }
    Eigen::VectorXd x = cg_.solve(b);
    // Eigen reports NoConvergence when the relative tolerance is below what
    // round-off allows; accept when the true residual is at round-off level.
    if (cg_.info() == Eigen::NumericalIssue) fail(ErrorCode::SolverBreakdown, "CG breakdown");
    return x;
  }

  [[nodiscard]] bool uses_direct() const noexcept { return use_direct_; }

 private:
  LinearSolverKind kind_;
  double cg_tolerance_;
  bool use_direct_ = true;
  bool analyzed_ = false;
  Eigen::SimplicialLDLT<InteriorSystem::SparseMatrix> direct_;
  Eigen::ConjugateGradient<InteriorSystem::SparseMatrix, Eigen::Lower | Eigen::Upper> cg_;
};

}  // namespace rothe
