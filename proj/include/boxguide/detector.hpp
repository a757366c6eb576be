#pragma once

#include <optional>
#include <string>
#include <vector>

#include "boxguide/matcher.hpp"

namespace boxguide {

// Trapping criterion S11 = -1. The Neumann problem is parametrised by
//   μ = 4π⁴l² + Δμ,   l = l* + Δl,   λ = π² - ε²μ,
// with base length l* a zero of sin(πl). One-channel variants keep l fixed and
// solve for Δμ alone with μ = c² + Δμ, c = ledge_coupling(variant, l).

struct CriterionResidual {
  cplx s11_plus_one;
  cplx s01;  // zero for one-channel variants
};

// At ε = 0 the λ-independent straight-strip value below the threshold is returned.
CriterionResidual criterion_residual(double eps, double l, double mu, Variant v, int N = 64);

struct DetectorOptions {
  // Admissible disk (Δμ/μ*)² + (Δl/l_scale)² ≤ ϱ² with μ* = c(l*)².
  double rho = 0.9;
  double l_scale = 0.25;
  int max_iter = 200;
  double step_tol = 1e-10;  // max-norm of the raw (Δμ, Δl) step
  int stall_window = 3;     // non-decreasing residual count that triggers the quasi-Newton fallback
  int N = 64;
  // Base length l*; defaults to the integer k.
  std::optional<double> base_point;
  double fd_step_mu = 1e-6;  // relative to μ*
  double fd_step_l = 1e-7;
};

enum class StepMethod { FixedPoint, QuasiNewton };

struct IterationRecord {
  double dmu = 0.0;
  double dl = 0.0;
  double im_s11 = 0.0;
  double re_s01 = 0.0;
  double step = 0.0;  // max-norm of the (Δμ, Δl) update
  StepMethod method = StepMethod::FixedPoint;
};

struct FixedPointState {
  double eps = 0.0;
  int k = 1;
  Variant variant = Variant::NeumannEven;
  double l_star = 1.0;
  double dmu = 0.0;
  double dl = 0.0;
  double im_s11 = 0.0;  // residuals at (dmu, dl), filled by fixed_point_step
  double re_s01 = 0.0;
  int iterations = 0;

  double l() const { return l_star + dl; }
  double mu() const;
  double lambda() const;
};

// Scale μ* of the Δμ coordinate.
double mu_scale(const FixedPointState& st);
double scaled_distance(const FixedPointState& a, const FixedPointState& b,
                       const DetectorOptions& opts = {});
double scaled_radius(const FixedPointState& st, const DetectorOptions& opts = {});

// One application of the map
//   Δμ ← -(2c² + Δμ) Im Ŝ11,
//   Δl ← π⁻¹ arcsin((-1)^{l*} (4μ)^{-1/4}(2π)^{-1/2} (c² + μ)/(c + √μ) ε^{-1/2} Re Ŝ01),
// with c = 2π²l, Ŝ11 = S11 - S11⁰(μ,l), Ŝ01 = S01 - ε^{1/2} S01⁰(μ,l). The image
// is projected back into the disk. Throws StepError if the arcsin argument leaves [-1,1].
FixedPointState fixed_point_step(const FixedPointState& st, const DetectorOptions& opts = {});

// Same map with supplied remainders instead of a matcher solve.
FixedPointState fixed_point_map(const FixedPointState& st, cplx s11_hat, cplx s01_hat,
                                const DetectorOptions& opts = {});

struct TrappedModeResult {
  double eps = 0.0;
  int k = 0;
  Variant variant = Variant::NeumannEven;
  double l_star = 0.0;
  double l = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double dmu = 0.0;
  double dl = 0.0;
  double s11_residual = 0.0;  // |S11 + 1|
  double s01_residual = 0.0;  // |S01|
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<IterationRecord> history;
  std::optional<ScatteringMatrix> S;
  // Solution of the exponential incident channel at the root; the trapped mode
  // is this field up to the factor 1 + S11 → 0 in the growing part.
  std::optional<FieldSolution> mode;
};

TrappedModeResult find_trapped(double eps, int k, Variant v, const DetectorOptions& opts = {});
// Start from a prescribed (Δμ, Δl).
TrappedModeResult find_trapped_from(double eps, int k, Variant v, double dmu0, double dl0,
                                    const DetectorOptions& opts = {});
// One-channel variants at fixed l: root of Im S = 0 with Re S < 0.
TrappedModeResult find_trapped_scalar(double eps, double l, Variant v,
                                      const DetectorOptions& opts = {});

struct ScanRow {
  double l = 0.0;
  double min_residual = 0.0;  // min over λ of |S11 + 1|
  double argmin_lambda = 0.0;
  bool in_window = false;     // inside the excluded window around the detected root
};

struct ScanReport {
  double eps = 0.0;
  int k = 1;
  double delta = 0.0;
  double l_root = 0.0;       // detected l_k(ε)
  double window = 0.0;       // half-width of the excluded window
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  std::vector<ScanRow> rows;
  std::vector<std::pair<double, double>> zero_intervals;  // grid intervals with min < zero_tol
};

struct ScanOptions {
  int grid = 50;
  int lambda_samples = 64;
  double zero_tol = 1e-6;
  // Excluded half-width: window_factor · ε(1+|ln ε|)².
  double window_factor = 1.0;
  // Spectral range scanned; defaults to (π² - 0.5, π²).
  std::optional<double> lambda_lo;
  std::optional<double> lambda_hi;
  int N = 64;
  bool include_root = true;  // also evaluate at the detected root
};

// min over λ of |S11 + 1| on an l-grid over [k - 1 + δ, k + 1 - δ].
ScanReport scan_absence(double eps, int k, double delta, Variant v, const ScanOptions& opts = {});

// min over λ ∈ [lo, hi] of |S11 + 1| at fixed (ε, l); returns (min, argmin).
std::pair<double, double> min_criterion_over_lambda(double eps, double l, Variant v, double lo,
                                                    double hi, int samples, int N);

}  // namespace boxguide
