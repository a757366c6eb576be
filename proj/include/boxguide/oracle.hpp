#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "boxguide/matcher.hpp"

namespace boxguide {

enum class FarEnd { Neumann, Dirichlet };

// Tensor grid fitted to the breakpoints x1 ∈ {0, l, L}, x2 ∈ {-ε, 0, 1}: every
// segment is split uniformly into round(length / h) cells (at least one), so the
// box corners are grid nodes for any (ε, l). Nodes with x1 > l and x2 < 0 are absent.
class FDMesh {
 public:
  FDMesh(double eps, double l, double L, double h, Variant v, FarEnd far = FarEnd::Neumann);

  double eps() const { return eps_; }
  double l() const { return l_; }
  double L() const { return L_; }
  double h() const { return h_; }
  Variant variant() const { return v_; }
  FarEnd far_end() const { return far_; }

  const std::vector<double>& x1() const { return xs_; }
  const std::vector<double>& x2() const { return ys_; }
  bool in_domain(int i, int j) const;
  // Unknown index of grid node (i, j); -1 if absent or on a Dirichlet wall.
  int index(int i, int j) const { return idx_[static_cast<std::size_t>(j) * xs_.size() + i]; }
  int unknowns() const { return n_; }
  std::pair<int, int> node(int k) const { return nodes_[static_cast<std::size_t>(k)]; }

  // 5-point finite-volume stiffness and lumped mass; K u = λ M u is the discrete
  // eigenproblem with natural (mirror) Neumann conditions.
  const Eigen::SparseMatrix<double>& stiffness() const { return K_; }
  const Eigen::VectorXd& mass() const { return M_; }
  // Trapezoid weights of the far-end edge x1 = L (zero elsewhere).
  const Eigen::VectorXd& far_weights() const { return W_; }

 private:
  double eps_, l_, L_, h_;
  Variant v_;
  FarEnd far_;
  std::vector<double> xs_, ys_;
  std::vector<int> idx_;
  std::vector<std::pair<int, int>> nodes_;
  int n_ = 0;
  Eigen::SparseMatrix<double> K_;
  Eigen::VectorXd M_;
  Eigen::VectorXd W_;
};

struct FDEigenpair {
  double lambda = 0.0;
  Eigen::VectorXd u;          // M-normalised discrete eigenvector
  double localization = 0.0;  // ‖u‖ over x1 < 2l divided by ‖u‖
  double residual = 0.0;      // ‖K u - λ M u‖_{M^{-1}} / ‖u‖_M
};

struct FDEigenOptions {
  int max_iter = 500;
  double tol = 1e-8;
};

// All discrete eigenvalues in (lo, hi), found by shift-invert subspace iteration
// around σ (defaults to the window centre). The count comes from Sylvester
// inertia of K - λM at both window ends.
std::vector<FDEigenpair> fd_eigensolve(const FDMesh& mesh, double lo, double hi,
                                       std::optional<double> sigma = std::nullopt,
                                       const FDEigenOptions& opts = {});

// Number of discrete eigenvalues below s.
int fd_count_below(const FDMesh& mesh, double s);

// Reflection coefficient of the Neumann problem with an exact discrete one-mode
// radiation closure at x1 = L. Mode 0 must propagate and mode 1 must decay below
// 1e-8 over (l, L).
cplx fd_scattering(double eps, double l, Variant v, double lambda, double L, double h);

struct ResidualReport {
  double interior = 0.0;  // L2 norm of the 5-point Helmholtz residual over interior nodes
  double boundary = 0.0;  // L2 norm of ∂n u over the ledge side nodes
  double far_fraction = 0.0;  // ‖u‖ over x1 > L/2 relative to the total
};

// Samples the modal field on the mesh. The interior residual skips stencils that
// touch the interface column x1 = l and nodes within `corner_exclusion` of the
// re-entrant corner (l, 0).
ResidualReport residual_check(const FieldSolution& sol, const FDMesh& mesh,
                              double corner_exclusion = 0.0);

}  // namespace boxguide
