#include "boxguide/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "boxguide/errors.hpp"

namespace boxguide {

namespace {

constexpr cplx kI{0.0, 1.0};

double sinc(double z) {
  if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0 + z * z * z * z / 120.0;
  return std::sin(z) / z;
}

// ∫_0^1 cos(c x + d) dx
double cos_integral(double c, double d) { return std::cos(d + 0.5 * c) * sinc(0.5 * c); }

// Longitudinal factor of a box mode, normalised so that |X(l)| or |X'(l)| is O(1).
struct BoxLongitudinal {
  double s = 0.0;  // Λ^A_n - λ
  double l = 1.0;
  bool odd = false;
  Regime regime = Regime::Threshold;

  std::array<double, 2> eval(double x) const {
    if (regime == Regime::Threshold) return odd ? std::array{x, 1.0} : std::array{1.0, 0.0};
    const double k = std::sqrt(std::abs(s));
    if (regime == Regime::Propagating) {
      if (odd) return {std::sin(k * x) / k, std::cos(k * x)};
      return {std::cos(k * x), -k * std::sin(k * x)};
    }
    // cosh(kx)/cosh(kl) and sinh(kx)/sinh(kl) written without overflow
    const double g = std::exp(k * (x - l));
    const double ex = std::exp(-2.0 * k * x);
    if (odd) {
      const double den = -std::expm1(-2.0 * k * l);
      return {g * -std::expm1(-2.0 * k * x) / den, k * g * (1.0 + ex) / den};
    }
    const double den = 1.0 + std::exp(-2.0 * k * l);
    return {g * (1.0 + ex) / den, k * g * (1.0 - ex) / den};
  }
};

ModalWave oscillatory_mode_wave(Variant v, int ordinal, double lambda, Sign sign) {
  const auto mode = transverse_mode(v, ordinal);
  const double s = mode.eigenvalue - lambda;
  const double k = std::sqrt(-s);
  ModalTerm t;
  t.ordinal = ordinal;
  t.s = s;
  t.regime = Regime::Propagating;
  const double n = 1.0 / std::sqrt(2.0 * k);
  t.a = sign == Sign::Plus ? n : 0.0;
  t.b = sign == Sign::Plus ? 0.0 : n;
  ModalWave w(v, lambda);
  w.add_term(t);
  return w;
}

WaveBasis basis_of(RadiationCondition rc) {
  switch (rc) {
    case RadiationCondition::Stabilized:
      return WaveBasis::Stabilized;
    case RadiationCondition::Threshold:
      return WaveBasis::Threshold;
    default:
      return WaveBasis::Standard;
  }
}

std::string where(double lambda, int N) {
  std::ostringstream os;
  os.precision(17);
  os << "(λ = " << lambda << ", N = " << N << ")";
  return os.str();
}

}  // namespace

double spectral_parameter(const ProblemConfig& cfg) {
  if (!(cfg.eps >= 0.0)) throw DomainError("box depth ε must be nonnegative");
  if (!(cfg.l > 0.0)) throw DomainError("box half-length l must be positive");
  if (cfg.N < 8) throw DomainError("strip mode count N must be at least 8");
  if (cfg.lambda.has_value() == cfg.mu.has_value()) {
    throw DomainError("exactly one of λ and μ must be given");
  }
  const double lambda =
      cfg.lambda ? *cfg.lambda : trapping_threshold(cfg.variant) - cfg.eps * cfg.eps * *cfg.mu;
  if (!(lambda > 0.0) || !(lambda < upper_threshold(cfg.variant))) {
    throw DomainError("spectral parameter " + std::to_string(lambda) + " outside (0, " +
                      std::to_string(upper_threshold(cfg.variant)) + ")");
  }
  return lambda;
}

int box_mode_count(const ProblemConfig& cfg) {
  return static_cast<int>(std::lround(cfg.N * (1.0 + cfg.eps)));
}

double overlap(const TransverseMode& strip, const TransverseMode& box) {
  const double a = strip.frequency();
  const double b = box.frequency();
  const double shift = -b * box.bottom;  // ψ(x2) = f(b x2 + shift)
  if (strip.profile == Profile::Sine) {
    return 0.5 * (cos_integral(a - b, -shift) - cos_integral(a + b, shift));
  }
  return 0.5 * (cos_integral(a - b, -shift) + cos_integral(a + b, shift));
}

class InterfaceSystem {
 public:
  InterfaceSystem(const ProblemConfig& cfg, RadiationCondition rc)
      : cfg_(cfg), rc_(rc), lambda_(spectral_parameter(cfg)), v_(cfg.variant) {
    N_ = cfg.N;
    NA_ = box_mode_count(cfg);
    const double H = 1.0 + cfg.eps;
    for (int j = 0; j < N_; ++j) strip_.push_back(transverse_mode(v_, j));
    for (int n = 0; n < NA_; ++n) {
      box_.push_back(transverse_mode(v_, n, H, -cfg.eps));
      BoxLongitudinal bl;
      bl.s = box_.back().eigenvalue - lambda_;
      bl.l = cfg.l;
      bl.odd = odd_at_truncation(v_);
      bl.regime = classify(lambda_, box_.back().eigenvalue);
      box_long_.push_back(bl);
    }
    setup_channels();
    assemble();
  }

  int channels() const { return static_cast<int>(channel_ordinals_.size()); }

  std::vector<FieldSolution> solve_all() {
    std::vector<FieldSolution> out;
    for (int p = 0; p < channels(); ++p) out.push_back(solve(p));
    return out;
  }

  FieldSolution solve(int p) {
    if (p < 0 || p >= channels()) {
      throw DomainError("incident index " + std::to_string(p) + " out of range for " +
                        std::to_string(channels()) + " channel(s)");
    }
    const int j0 = channel_ordinals_[static_cast<std::size_t>(p)];
    const auto [inc, dinc] = incoming_[static_cast<std::size_t>(p)].longitudinal(j0, cfg_.l);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N_ + NA_);
    if (dirichlet_ledge(v_)) {
      for (int n = 0; n < NA_; ++n) rhs(n) = inc * O_(j0, n);
      rhs(NA_ + j0) = strip_[j0].norm_squared() * dinc;
    } else {
      rhs(j0) = strip_[j0].norm_squared() * inc;
      for (int n = 0; n < NA_; ++n) rhs(N_ + n) = dinc * O_(j0, n);
    }
    rhs = row_scale_.asDiagonal() * rhs;
    Eigen::VectorXcd z = lu_.solve(rhs);
    z = col_scale_.asDiagonal() * z;

    FieldSolution sol;
    sol.cfg_ = cfg_;
    sol.lambda_ = lambda_;
    sol.rc_ = rc_;
    sol.p_ = p;
    sol.a_ = z.head(NA_);
    sol.c_ = Eigen::VectorXcd::Zero(channels());
    sol.d_ = Eigen::VectorXcd::Zero(N_);
    for (int j = 0; j < N_; ++j) {
      const int q = channel_index_[static_cast<std::size_t>(j)];
      if (q >= 0) {
        sol.c_(q) = z(NA_ + j);
      } else {
        sol.d_(j) = z(NA_ + j);
      }
    }
    sol.incoming_ = incoming_[static_cast<std::size_t>(p)];
    sol.outgoing_waves_ = outgoing_;
    sol.channel_ordinals_ = channel_ordinals_;
    sol.cond_ = cond_;
    sol.residual_ = residual(sol);
    return sol;
  }

 private:
  void setup_channels() {
    channel_index_.assign(static_cast<std::size_t>(N_), -1);
    const double thr = trapping_threshold(v_);
    const double gap = lambda_ - thr;
    switch (rc_) {
      case RadiationCondition::Physical:
        for (int j = 0; j < N_; ++j) {
          if (classify(lambda_, strip_[j].eigenvalue) == Regime::Propagating) {
            add_channel(j, oscillatory_mode_wave(v_, j, lambda_, Sign::Minus),
                        oscillatory_mode_wave(v_, j, lambda_, Sign::Plus));
          }
        }
        if (channel_ordinals_.empty()) {
          throw DomainError("physical radiation condition needs a propagating mode");
        }
        break;
      case RadiationCondition::Artificial:
      case RadiationCondition::Stabilized:
      case RadiationCondition::Threshold: {
        if (rc_ == RadiationCondition::Threshold && std::abs(gap) > kThresholdTol) {
          throw DomainError("threshold radiation condition requested off the threshold");
        }
        if (rc_ == RadiationCondition::Artificial && !(gap < -kThresholdTol)) {
          throw DomainError("standard augmented basis needs λ strictly below the threshold");
        }
        if (gap > kThresholdTol) {
          throw DomainError("augmented scattering matrix needs λ at or below the threshold " +
                            std::to_string(thr));
        }
        const WaveBasis basis = basis_of(rc_);
        for (int p = 0; p < channel_count(v_); ++p) {
          const int j = p == channel_count(v_) - 1 ? exponential_channel_ordinal(v_) : 0;
          add_channel(j, to_modal(channel_wave(basis, p, Sign::Minus, lambda_, v_)),
                      to_modal(channel_wave(basis, p, Sign::Plus, lambda_, v_)));
        }
        break;
      }
    }
    for (int j = 0; j < N_; ++j) {
      if (channel_index_[static_cast<std::size_t>(j)] < 0 &&
          classify(lambda_, strip_[j].eigenvalue) != Regime::Evanescent) {
        throw DomainError("strip mode " + std::to_string(j) +
                          " is not evanescent and carries no channel wave " + where(lambda_, N_));
      }
    }
  }

  void add_channel(int j, ModalWave in, ModalWave out) {
    channel_index_[static_cast<std::size_t>(j)] = channels();
    channel_ordinals_.push_back(j);
    incoming_.push_back(std::move(in));
    outgoing_.push_back(std::move(out));
  }

  // Value and x1-derivative at x1 = l of the unknown attached to strip mode j.
  std::array<cplx, 2> strip_unknown(int j) const {
    const int q = channel_index_[static_cast<std::size_t>(j)];
    if (q >= 0) return outgoing_[static_cast<std::size_t>(q)].longitudinal(j, cfg_.l);
    return {1.0, -std::sqrt(strip_[j].eigenvalue - lambda_)};
  }

  void assemble() {
    O_.resize(N_, NA_);
    for (int j = 0; j < N_; ++j)
      for (int n = 0; n < NA_; ++n) O_(j, n) = overlap(strip_[j], box_[n]);

    const int M = N_ + NA_;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M, M);
    const bool dir = dirichlet_ledge(v_);
    // Neumann ledge: value rows tested on strip modes (rows 0..N), flux rows on box
    // modes (rows N..N+NA). Dirichlet ledge: value on box modes, flux on strip modes.
    for (int n = 0; n < NA_; ++n) {
      const auto X = box_long_[n].eval(cfg_.l);
      const double nb = box_[n].norm_squared();
      if (dir) {
        A(n, n) = X[0] * nb;
        for (int j = 0; j < N_; ++j) A(NA_ + j, n) = X[1] * O_(j, n);
      } else {
        for (int j = 0; j < N_; ++j) A(j, n) = X[0] * O_(j, n);
        A(N_ + n, n) = X[1] * nb;
      }
    }
    for (int j = 0; j < N_; ++j) {
      const auto U = strip_unknown(j);
      const double ns = strip_[j].norm_squared();
      if (dir) {
        for (int n = 0; n < NA_; ++n) A(n, NA_ + j) = -U[0] * O_(j, n);
        A(NA_ + j, NA_ + j) = -U[1] * ns;
      } else {
        A(j, NA_ + j) = -U[0] * ns;
        for (int n = 0; n < NA_; ++n) A(N_ + n, NA_ + j) = -U[1] * O_(j, n);
      }
    }

    row_scale_.resize(M);
    for (int r = 0; r < M; ++r) {
      const double m = A.row(r).cwiseAbs().maxCoeff();
      row_scale_(r) = m > 0.0 ? 1.0 / m : 1.0;
    }
    A = row_scale_.asDiagonal() * A;
    col_scale_.resize(M);
    for (int c = 0; c < M; ++c) {
      const double m = A.col(c).cwiseAbs().maxCoeff();
      col_scale_(c) = m > 0.0 ? 1.0 / m : 1.0;
    }
    A = A * col_scale_.asDiagonal();
    lu_.compute(A);
    const double rc = lu_.rcond();
    cond_ = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(cond_ <= kMaxCondition)) {
      std::ostringstream os;
      os << "interface system ill-conditioned " << where(lambda_, N_) << ": condition estimate "
         << cond_;
      throw SolverError(os.str());
    }
  }

  InterfaceResidual residual(const FieldSolution& sol) const {
    using Quad = boost::math::quadrature::gauss<double, 8>;
    const int panels = std::max(16, 2 * N_);
    const double eps = cfg_.eps;
    const bool dir = dirichlet_ledge(v_);
    double val2 = 0.0;
    double flux2 = 0.0;
    auto integrate = [&](double lo, double hi, bool on_ledge) {
      if (!(hi > lo)) return;
      const double hp = (hi - lo) / panels;
      for (int k = 0; k < panels; ++k) {
        const double mid = lo + (k + 0.5) * hp;
        auto add = [&](double t, double w) {
          const double x2 = mid + 0.5 * hp * t;
          const double wt = 0.5 * hp * w;
          const WaveValue A = sol.eval_box(cfg_.l, x2);
          cplx uB{}, dB{};
          if (!on_ledge) {
            const WaveValue B = sol.eval_strip(cfg_.l, x2);
            uB = B.value;
            dB = B.gradient[0];
          }
          if (!on_ledge || dir) val2 += wt * std::norm(A.value - uB);
          if (!on_ledge || !dir) flux2 += wt * std::norm(A.gradient[0] - dB);
        };
        const auto& xs = Quad::abscissa();
        const auto& ws = Quad::weights();
        for (std::size_t i = 0; i < xs.size(); ++i) {
          if (xs[i] == 0.0) {
            add(0.0, ws[i]);
          } else {
            add(xs[i], ws[i]);
            add(-xs[i], ws[i]);
          }
        }
      }
    };
    integrate(-eps, 0.0, true);
    integrate(0.0, 1.0, false);
    return {std::sqrt(val2), std::sqrt(flux2)};
  }

  ProblemConfig cfg_;
  RadiationCondition rc_;
  double lambda_;
  Variant v_;
  int N_ = 0;
  int NA_ = 0;
  std::vector<TransverseMode> strip_;
  std::vector<TransverseMode> box_;
  std::vector<BoxLongitudinal> box_long_;
  std::vector<int> channel_index_;  // strip ordinal -> channel, -1 for tail modes
  std::vector<int> channel_ordinals_;
  std::vector<ModalWave> incoming_;
  std::vector<ModalWave> outgoing_;
  Eigen::MatrixXd O_;
  Eigen::VectorXd row_scale_;
  Eigen::VectorXd col_scale_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  double cond_ = 0.0;
};

WaveValue FieldSolution::eval_box(double x1, double x2) const {
  if (!(x1 >= 0.0 && x1 <= cfg_.l && x2 >= -cfg_.eps && x2 <= 1.0)) {
    throw DomainError("point outside the box region");
  }
  const double H = 1.0 + cfg_.eps;
  WaveValue out{cplx{}, {cplx{}, cplx{}}};
  for (int n = 0; n < a_.size(); ++n) {
    const auto mode = transverse_mode(cfg_.variant, n, H, -cfg_.eps);
    BoxLongitudinal bl;
    bl.s = mode.eigenvalue - lambda_;
    bl.l = cfg_.l;
    bl.odd = odd_at_truncation(cfg_.variant);
    bl.regime = classify(lambda_, mode.eigenvalue);
    const auto X = bl.eval(x1);
    const double psi = mode.value(x2);
    out.value += a_(n) * X[0] * psi;
    out.gradient[0] += a_(n) * X[1] * psi;
    out.gradient[1] += a_(n) * X[0] * mode.derivative(x2);
  }
  return out;
}

WaveValue FieldSolution::eval_strip(double x1, double x2) const {
  if (!(x1 >= cfg_.l && x2 >= 0.0 && x2 <= 1.0)) {
    throw DomainError("point outside the strip region");
  }
  WaveValue out = incoming_.eval(x1, x2);
  for (std::size_t q = 0; q < outgoing_waves_.size(); ++q) {
    const WaveValue w = outgoing_waves_[q].eval(x1, x2);
    out.value += c_(static_cast<Eigen::Index>(q)) * w.value;
    out.gradient[0] += c_(static_cast<Eigen::Index>(q)) * w.gradient[0];
    out.gradient[1] += c_(static_cast<Eigen::Index>(q)) * w.gradient[1];
  }
  for (int j = 0; j < d_.size(); ++j) {
    if (d_(j) == cplx{}) continue;
    const auto mode = transverse_mode(cfg_.variant, j);
    const double k = std::sqrt(mode.eigenvalue - lambda_);
    const double e = std::exp(-k * (x1 - cfg_.l));
    out.value += d_(j) * e * mode.value(x2);
    out.gradient[0] += -k * d_(j) * e * mode.value(x2);
    out.gradient[1] += d_(j) * e * mode.derivative(x2);
  }
  return out;
}

cplx eval_field(const FieldSolution& sol, double x1, double x2) {
  const auto& cfg = sol.config();
  if (x1 < cfg.l) return sol.eval_box(x1, x2).value;
  if (x1 == cfg.l && x2 < 0.0) return sol.eval_box(x1, x2).value;
  return sol.eval_strip(x1, x2).value;
}

std::vector<FieldSolution> solve_all(const ProblemConfig& cfg, RadiationCondition rc) {
  InterfaceSystem sys(cfg, rc);
  return sys.solve_all();
}

FieldSolution solve_scattering(const ProblemConfig& cfg, int p, RadiationCondition rc) {
  InterfaceSystem sys(cfg, rc);
  return sys.solve(p);
}

void ScatteringMatrix::update_diagnostics() {
  const auto n = S.rows();
  unitarity_defect = (S.adjoint() * S - Eigen::MatrixXcd::Identity(n, n)).norm();
  symmetry_defect = (S - S.transpose()).cwiseAbs().maxCoeff();
}

ScatteringMatrix assemble_in_basis(const ProblemConfig& cfg, WaveBasis basis) {
  RadiationCondition rc = RadiationCondition::Artificial;
  if (basis == WaveBasis::Stabilized) rc = RadiationCondition::Stabilized;
  if (basis == WaveBasis::Threshold) rc = RadiationCondition::Threshold;
  const auto sols = solve_all(cfg, rc);
  ScatteringMatrix out;
  const auto s = static_cast<Eigen::Index>(sols.size());
  out.S.resize(s, s);
  out.basis = basis;
  out.variant = cfg.variant;
  out.lambda = sols.front().lambda();
  out.N = cfg.N;
  for (Eigen::Index p = 0; p < s; ++p) {
    const auto& sol = sols[static_cast<std::size_t>(p)];
    out.S.col(p) = sol.outgoing();
    out.cond_estimate = std::max(out.cond_estimate, sol.cond_estimate());
    out.residual.value = std::max(out.residual.value, sol.residual().value);
    out.residual.flux = std::max(out.residual.flux, sol.residual().flux);
  }
  out.update_diagnostics();
  return out;
}

ScatteringMatrix assemble_augmented_smatrix(const ProblemConfig& cfg) {
  const double lambda = spectral_parameter(cfg);
  const double thr = trapping_threshold(cfg.variant);
  if (lambda > thr + kThresholdTol) {
    throw DomainError("λ = " + std::to_string(lambda) + " lies above the window (0, " +
                      std::to_string(thr) + "]");
  }
  if (std::abs(lambda - thr) <= kThresholdTol) return assemble_in_basis(cfg, WaveBasis::Threshold);
  if (lambda > thr - kSwitchFraction * thr) {
    const ScatteringMatrix bold = assemble_in_basis(cfg, WaveBasis::Stabilized);
    ScatteringMatrix out = stabilized_to_standard(bold, lambda);
    out.N = bold.N;
    out.cond_estimate = bold.cond_estimate;
    out.residual = bold.residual;
    return out;
  }
  return assemble_in_basis(cfg, WaveBasis::Standard);
}

cplx physical_reflection(const ProblemConfig& cfg) {
  const auto sols = solve_all(cfg, RadiationCondition::Physical);
  if (sols.size() != 1) {
    throw DomainError("physical reflection needs exactly one propagating mode, found " +
                      std::to_string(sols.size()));
  }
  return sols.front().outgoing()(0);
}

cplx reduction_from_augmented(const ScatteringMatrix& S) {
  if (S.size() != 2) throw DomainError("reduction formula needs a 2x2 augmented matrix");
  const cplx den = S.S(1, 1) + 1.0;
  if (std::abs(den) < 1e-12) {
    throw PoleError("S11 = -1: the reduction formula has a pole and a trapped mode is present");
  }
  return S.S(0, 0) - S.S(0, 1) * S.S(1, 0) / den;
}

ScatteringMatrix stabilized_to_standard(const ScatteringMatrix& Sbold, double lambda) {
  const Variant v = Sbold.variant;
  const int s = Sbold.size();
  const int e = s - 1;  // exponential channel index
  if (s != channel_count(v)) throw DomainError("matrix size does not match the variant");
  if (!(lambda < trapping_threshold(v) - kThresholdTol)) {
    throw DomainError("standard exponential basis needs λ strictly below the threshold");
  }
  const cplx Se = Sbold.S(e, e);
  if (std::abs(1.0 - Se) < kConversionCutoff) {
    throw ConversionError("|1 - S_ee| below the conversion cutoff");
  }
  auto coeffs = [&](WaveBasis b, Sign sg) {
    const ModalTerm t = to_modal(channel_wave(b, e, sg, lambda, v)).terms().front();
    return std::array<cplx, 2>{t.a, t.b};
  };
  const auto wp = coeffs(WaveBasis::Standard, Sign::Plus);
  const auto wm = coeffs(WaveBasis::Standard, Sign::Minus);
  Eigen::Matrix2cd basis;
  basis << wp[0], wm[0], wp[1], wm[1];
  const Eigen::PartialPivLU<Eigen::Matrix2cd> lu(basis);
  // bold w^± = P± w^+ + Q± w^-
  Eigen::Vector2cd bp, bm;
  {
    const auto sp = coeffs(WaveBasis::Stabilized, Sign::Plus);
    const auto sm = coeffs(WaveBasis::Stabilized, Sign::Minus);
    bp = lu.solve(Eigen::Vector2cd(sp[0], sp[1]));
    bm = lu.solve(Eigen::Vector2cd(sm[0], sm[1]));
  }
  Eigen::MatrixXcd alpha = Eigen::MatrixXcd::Zero(s, s);
  Eigen::MatrixXcd beta = Eigen::MatrixXcd::Zero(s, s);
  for (int p = 0; p < s; ++p) {
    for (int q = 0; q < s; ++q) {
      const cplx in = p == q ? 1.0 : 0.0;
      const cplx out = Sbold.S(q, p);
      if (q == e) {
        beta(q, p) = in * bm(0) + out * bp(0);
        alpha(q, p) = in * bm(1) + out * bp(1);
      } else {
        beta(q, p) = out;
        alpha(q, p) = in;
      }
    }
  }
  const Eigen::PartialPivLU<Eigen::MatrixXcd> alu(alpha);
  if (!(alu.rcond() > 1e-14)) throw ConversionError("stabilized-to-standard map is degenerate");
  ScatteringMatrix out = Sbold;
  out.S = beta * alu.inverse();
  out.basis = WaveBasis::Standard;
  out.lambda = lambda;
  out.update_diagnostics();
  return out;
}

ConvergenceStudy convergence_study(const ProblemConfig& cfg, const std::vector<int>& Ns) {
  ConvergenceStudy out;
  double prev = std::numeric_limits<double>::infinity();
  for (int N : Ns) {
    ProblemConfig c = cfg;
    c.N = N;
    ScatteringMatrix S = assemble_augmented_smatrix(c);
    const double r = std::hypot(S.residual.value, S.residual.flux);
    if (r > 1.2 * prev) {
      throw ConvergenceError("interface residual grew from " + std::to_string(prev) + " to " +
                             std::to_string(r) + " at N = " + std::to_string(N));
    }
    prev = r;
    out.N.push_back(N);
    out.S.push_back(std::move(S));
  }
  return out;
}

}  // namespace boxguide
