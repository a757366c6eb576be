#include "boxguide/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "boxguide/errors.hpp"

namespace boxguide {

namespace {

constexpr double kGeomTol = 1e-12;

void append_segment(std::vector<double>& pts, double a, double b, double h) {
  const int n = std::max(1, static_cast<int>(std::lround((b - a) / h)));
  for (int k = pts.empty() ? 0 : 1; k <= n; ++k) pts.push_back(a + (b - a) * k / n);
}

Eigen::SparseMatrix<double> shifted(const FDMesh& mesh, double s) {
  Eigen::SparseMatrix<double> A = mesh.stiffness();
  for (int k = 0; k < mesh.unknowns(); ++k) A.coeffRef(k, k) -= s * mesh.mass()(k);
  return A;
}

}  // namespace

FDMesh::FDMesh(double eps, double l, double L, double h, Variant v, FarEnd far)
    : eps_(eps), l_(l), L_(L), h_(h), v_(v), far_(far) {
  if (!(eps >= 0.0) || !(l > 0.0) || !(L >= l) || !(h > 0.0)) {
    throw DomainError("finite-difference mesh needs ε >= 0, l > 0, L >= l and h > 0");
  }
  append_segment(xs_, 0.0, l, h);
  if (L > l) append_segment(xs_, l, L, h);
  if (eps > 0.0) append_segment(ys_, -eps, 0.0, h);
  append_segment(ys_, 0.0, 1.0, h);

  const int nx = static_cast<int>(xs_.size());
  const int ny = static_cast<int>(ys_.size());
  const bool dir_walls = dirichlet_ledge(v);
  const bool dir_top = dir_walls || v == Variant::MixedTopDirichlet;
  idx_.assign(static_cast<std::size_t>(nx * ny), -1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!in_domain(i, j)) continue;
      const double x = xs_[i];
      const double y = ys_[j];
      bool dirichlet = false;
      if (dir_top && std::abs(y - 1.0) < kGeomTol) dirichlet = true;
      if (odd_at_truncation(v) && x < kGeomTol) dirichlet = true;
      if (far == FarEnd::Dirichlet && L > l && std::abs(x - L) < kGeomTol) dirichlet = true;
      if (dir_walls) {
        if (eps > 0.0 && std::abs(y + eps) < kGeomTol) dirichlet = true;
        if (std::abs(x - l) < kGeomTol && y < kGeomTol) dirichlet = true;
        if (x > l + kGeomTol && std::abs(y) < kGeomTol) dirichlet = true;
        if (eps == 0.0 && std::abs(y) < kGeomTol) dirichlet = true;
      }
      if (dirichlet) continue;
      idx_[static_cast<std::size_t>(j * nx + i)] = n_++;
      nodes_.emplace_back(i, j);
    }
  }

  std::vector<Eigen::Triplet<double>> trip;
  M_ = Eigen::VectorXd::Zero(n_);
  W_ = Eigen::VectorXd::Zero(n_);
  auto edge = [&](int a, int b, double w) {
    if (a >= 0) trip.emplace_back(a, a, w);
    if (b >= 0) trip.emplace_back(b, b, w);
    if (a >= 0 && b >= 0) {
      trip.emplace_back(a, b, -w);
      trip.emplace_back(b, a, -w);
    }
  };
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double xc = 0.5 * (xs_[i] + xs_[i + 1]);
      const double yc = 0.5 * (ys_[j] + ys_[j + 1]);
      if (xc > l && yc < 0.0) continue;
      const double hx = xs_[i + 1] - xs_[i];
      const double hy = ys_[j + 1] - ys_[j];
      const int c00 = index(i, j), c10 = index(i + 1, j);
      const int c01 = index(i, j + 1), c11 = index(i + 1, j + 1);
      edge(c00, c10, 0.5 * hy / hx);
      edge(c01, c11, 0.5 * hy / hx);
      edge(c00, c01, 0.5 * hx / hy);
      edge(c10, c11, 0.5 * hx / hy);
      for (int c : {c00, c10, c01, c11}) {
        if (c >= 0) M_(c) += 0.25 * hx * hy;
      }
      if (L > l && i + 1 == nx - 1) {
        for (int c : {c10, c11}) {
          if (c >= 0) W_(c) += 0.5 * hy;
        }
      }
    }
  }
  K_.resize(n_, n_);
  K_.setFromTriplets(trip.begin(), trip.end());
  K_.makeCompressed();
}

bool FDMesh::in_domain(int i, int j) const {
  return xs_[i] <= l_ + kGeomTol || ys_[j] >= -kGeomTol;
}

int fd_count_below(const FDMesh& mesh, double s) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted(mesh, s));
  if (ldlt.info() != Eigen::Success) {
    throw SolverError("LDLT factorisation failed at shift " + std::to_string(s));
  }
  return static_cast<int>((ldlt.vectorD().array() < 0.0).count());
}

std::vector<FDEigenpair> fd_eigensolve(const FDMesh& mesh, double lo, double hi,
                                       std::optional<double> sigma, const FDEigenOptions& opts) {
  if (!(hi > lo)) throw DomainError("empty eigenvalue window");
  const int count = fd_count_below(mesh, hi) - fd_count_below(mesh, lo);
  std::vector<FDEigenpair> out;
  if (count <= 0) return out;

  const int n = mesh.unknowns();
  const double s = sigma.value_or(0.5 * (lo + hi));
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted(mesh, s));
  if (ldlt.info() != Eigen::Success) throw SolverError("shift factorisation failed");
  const Eigen::VectorXd sq = mesh.mass().cwiseSqrt();
  const Eigen::VectorXd isq = sq.cwiseInverse();
  // Work with y = M^{1/2} u so that A = M^{-1/2} K M^{-1/2} is symmetric.
  auto apply_A = [&](const Eigen::MatrixXd& Y) {
    return Eigen::MatrixXd(isq.asDiagonal() * (mesh.stiffness() * (isq.asDiagonal() * Y)));
  };

  const int B = std::min(n, count + std::max(6, count));
  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd Y(n, B);
  for (int c = 0; c < B; ++c)
    for (int r = 0; r < n; ++r) Y(r, c) = gauss(rng);

  Eigen::VectorXd theta;
  Eigen::MatrixXd X;
  Eigen::VectorXd res;
  bool converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    Eigen::MatrixXd Z = sq.asDiagonal() * Y;
    for (int c = 0; c < B; ++c) Z.col(c) = ldlt.solve(Eigen::VectorXd(Z.col(c)));
    Z = sq.asDiagonal() * Z;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, B);
    const Eigen::MatrixXd AQ = apply_A(Q);
    const Eigen::MatrixXd H = Q.transpose() * AQ;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
    theta = es.eigenvalues();
    X = Q * es.eigenvectors();
    const Eigen::MatrixXd R = AQ * es.eigenvectors() - X * theta.asDiagonal();
    res = R.colwise().norm();
    int inside = 0;
    bool ok = true;
    for (int c = 0; c < B; ++c) {
      if (theta(c) > lo && theta(c) < hi) {
        ++inside;
        if (res(c) > opts.tol) ok = false;
      }
    }
    Y = X;
    if (ok && inside == count) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("subspace iteration did not resolve " + std::to_string(count) +
                           " eigenvalue(s) in the window");
  }
  for (int c = 0; c < B; ++c) {
    if (!(theta(c) > lo && theta(c) < hi)) continue;
    FDEigenpair p;
    p.lambda = theta(c);
    p.u = isq.asDiagonal() * X.col(c);
    p.residual = res(c);
    double inner = 0.0, total = 0.0;
    for (int k = 0; k < n; ++k) {
      const double w = mesh.mass()(k) * p.u(k) * p.u(k);
      total += w;
      if (mesh.x1()[mesh.node(k).first] < 2.0 * mesh.l()) inner += w;
    }
    p.localization = std::sqrt(inner / total);
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(),
            [](const FDEigenpair& a, const FDEigenpair& b) { return a.lambda < b.lambda; });
  return out;
}

cplx fd_scattering(double eps, double l, Variant v, double lambda, double L, double h) {
  if (v != Variant::NeumannEven && v != Variant::NeumannOdd) {
    throw DomainError("finite-difference scattering is implemented for the Neumann strip");
  }
  if (!(lambda > 0.0)) throw DomainError("λ must be positive");
  if (!(lambda < kPi2)) {
    throw DomainError("one-mode closure invalid: the second strip mode propagates at λ = " +
                      std::to_string(lambda));
  }
  if (std::exp(-std::sqrt(kPi2 - lambda) * (L - l)) >= 1e-8) {
    throw DomainError("truncation too short: the first evanescent mode exceeds 1e-8 at x1 = L");
  }
  const FDMesh mesh(eps, l, L, h, v, FarEnd::Neumann);
  const auto& xs = mesh.x1();
  const int nx = static_cast<int>(xs.size());
  const double hx = xs[nx - 1] - xs[nx - 2];
  // Discrete dispersion of mode 0 on the uniform far segment.
  const double cos_t = 1.0 - 0.5 * lambda * hx * hx;
  if (!(std::abs(cos_t) < 1.0)) throw DomainError("mesh too coarse for the requested λ");
  const double theta = std::acos(cos_t);
  const cplx beta{0.0, std::sin(theta) / hx};
  const cplx I{0.0, 1.0};
  auto incident = [&](double x) { return std::exp(-I * theta * x / hx); };

  const int n = mesh.unknowns();
  Eigen::SparseMatrix<cplx> A = mesh.stiffness().cast<cplx>();
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  for (int k = 0; k < n; ++k) {
    A.coeffRef(k, k) -= lambda * mesh.mass()(k) + beta * mesh.far_weights()(k);
    if (mesh.far_weights()(k) != 0.0) {
      rhs(k) = -2.0 * beta * mesh.far_weights()(k) * incident(xs[mesh.node(k).first]);
    }
  }
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverError("finite-difference Helmholtz system singular");
  const Eigen::VectorXcd u = lu.solve(rhs);

  // Mode-0 amplitude of a column: mass-weighted mean over x2.
  auto column_mean = [&](int i) {
    cplx s{};
    double w = 0.0;
    for (int j = 0; j < static_cast<int>(mesh.x2().size()); ++j) {
      const int k = mesh.index(i, j);
      if (k < 0) continue;
      s += mesh.mass()(k) * u(k);
      w += mesh.mass()(k);
    }
    return s / w;
  };
  const int ia = nx - 1;
  const int q = std::clamp(static_cast<int>(std::lround(0.5 * kPi / theta)), 1, nx / 4);
  const int ib = nx - 1 - q;
  Eigen::Matrix2cd F;
  F << incident(xs[ia]), 1.0 / incident(xs[ia]), incident(xs[ib]), 1.0 / incident(xs[ib]);
  const Eigen::Vector2cd ab = F.fullPivLu().solve(Eigen::Vector2cd(column_mean(ia), column_mean(ib)));
  return ab(1) / ab(0);
}

ResidualReport residual_check(const FieldSolution& sol, const FDMesh& mesh,
                              double corner_exclusion) {
  const int n = mesh.unknowns();
  const double l = mesh.l();
  Eigen::VectorXcd u(n);
  for (int k = 0; k < n; ++k) {
    const auto [i, j] = mesh.node(k);
    const double x = mesh.x1()[i];
    const double y = mesh.x2()[j];
    if (x < l || (x <= l + kGeomTol && y < 0.0)) {
      u(k) = sol.eval_box(std::min(x, l), y).value;
    } else {
      u(k) = sol.eval_strip(std::max(x, l), y).value;
    }
  }
  const Eigen::VectorXcd Ku = mesh.stiffness().cast<cplx>() * u;
  const int nx = static_cast<int>(mesh.x1().size());
  const int ny = static_cast<int>(mesh.x2().size());
  auto present = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < nx && j < ny && mesh.in_domain(i, j) && mesh.index(i, j) >= 0;
  };
  ResidualReport rep;
  double interior = 0.0, total = 0.0, far = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto [i, j] = mesh.node(k);
    const double m = mesh.mass()(k);
    total += m * std::norm(u(k));
    if (mesh.x1()[i] > 0.5 * mesh.L()) far += m * std::norm(u(k));
    if (!(present(i - 1, j) && present(i + 1, j) && present(i, j - 1) && present(i, j + 1))) continue;
    const double x = mesh.x1()[i];
    const double y = mesh.x2()[j];
    // Stencils reaching the interface column mix the two expansions; their mismatch
    // is the interface residual, not a Helmholtz residual.
    if (mesh.x1()[i - 1] <= l + kGeomTol && mesh.x1()[i + 1] >= l - kGeomTol) continue;
    if (std::hypot(x - l, y) < corner_exclusion) continue;
    const cplx r = (Ku(k) - sol.lambda() * m * u(k)) / m;
    interior += m * std::norm(r);
  }
  rep.interior = std::sqrt(interior);
  rep.far_fraction = total > 0.0 ? std::sqrt(far / total) : 0.0;

  double boundary = 0.0;
  const bool dir = dirichlet_ledge(sol.config().variant);
  int il = -1;
  for (int i = 0; i < nx; ++i) {
    if (std::abs(mesh.x1()[i] - l) < kGeomTol) il = i;
  }
  if (il >= 0) {
    for (int j = 0; j + 1 < ny; ++j) {
      const double y0 = mesh.x2()[j];
      const double y1 = mesh.x2()[j + 1];
      if (!(y1 <= kGeomTol)) break;
      for (double y : {y0, y1}) {
        if (y >= -kGeomTol || y <= -mesh.eps() + kGeomTol) continue;  // skip the corners
        const WaveValue w = sol.eval_box(l, y);
        boundary += 0.5 * (y1 - y0) * std::norm(dir ? w.value : w.gradient[0]);
      }
    }
  }
  rep.boundary = std::sqrt(boundary);
  return rep;
}

}  // namespace boxguide
