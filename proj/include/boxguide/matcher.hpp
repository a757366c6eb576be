#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "boxguide/waves.hpp"

namespace boxguide {

// Geometry: box region (0,l) x (-ε,1) joined at x1 = l to the strip region (l,∞) x (0,1).
struct ProblemConfig {
  double eps = 0.0;
  double l = 1.0;
  // Exactly one of lambda / mu is set; mu means λ = trapping_threshold - ε²μ.
  std::optional<double> lambda;
  std::optional<double> mu;
  Variant variant = Variant::NeumannEven;
  int N = 64;  // strip-region modes; the box region gets round(N (1+ε))
};

// Validates the geometry and returns the absolute spectral parameter.
double spectral_parameter(const ProblemConfig& cfg);
int box_mode_count(const ProblemConfig& cfg);

// Below the trapping threshold the augmented matrix is assembled in the
// stabilized basis when λ > threshold - kSwitchFraction * threshold.
inline constexpr double kSwitchFraction = 0.05;
inline constexpr double kMaxCondition = 1e12;

enum class RadiationCondition {
  Physical,    // outgoing oscillatory waves only, every other mode decays
  Artificial,  // oscillatory plus exponential combinations (standard basis)
  Stabilized,  // oscillatory plus stabilized near-threshold combinations
  Threshold,   // λ on the trapping threshold, linear waves in the channel mode
};

// L2 mismatch on the interface x1 = l. The strip trace is extended by zero over
// the ledge side: for a Neumann ledge the flux residual covers (-ε,1) and the
// value residual (0,1); a Dirichlet ledge swaps the two ranges.
struct InterfaceResidual {
  double value = 0.0;
  double flux = 0.0;
};

// One solution of the interface problem. Strip side:
//   u_B = w_p^- + Σ_q c_q w_q^+ + Σ_j d_j e^{-k_j (x1 - l)} φ_j(x2),
// box side: u_A = Σ_n a_n X_n(x1) ψ_n(x2) with X_n meeting the x1 = 0 condition.
class FieldSolution {
 public:
  const ProblemConfig& config() const { return cfg_; }
  double lambda() const { return lambda_; }
  RadiationCondition radiation() const { return rc_; }
  int incident() const { return p_; }
  const Eigen::VectorXcd& box_coefficients() const { return a_; }
  const Eigen::VectorXcd& outgoing() const { return c_; }
  // Tail amplitudes indexed by strip ordinal; zero for channel modes.
  const Eigen::VectorXcd& tail() const { return d_; }
  double cond_estimate() const { return cond_; }
  const InterfaceResidual& residual() const { return residual_; }

  // Box-region value and gradient; requires 0 <= x1 <= l, -ε <= x2 <= 1.
  WaveValue eval_box(double x1, double x2) const;
  // Strip-region value and gradient; requires x1 >= l, 0 <= x2 <= 1.
  WaveValue eval_strip(double x1, double x2) const;

 private:
  friend class InterfaceSystem;
  ProblemConfig cfg_;
  double lambda_ = 0.0;
  RadiationCondition rc_ = RadiationCondition::Physical;
  int p_ = 0;
  Eigen::VectorXcd a_;
  Eigen::VectorXcd c_;
  Eigen::VectorXcd d_;
  ModalWave incoming_;
  std::vector<ModalWave> outgoing_waves_;
  std::vector<int> channel_ordinals_;
  double cond_ = 0.0;
  InterfaceResidual residual_;
};

// Value of the modal series; the box expansion is used for x1 < l and on the
// ledge side, the strip expansion for x1 >= l.
cplx eval_field(const FieldSolution& sol, double x1, double x2);

FieldSolution solve_scattering(const ProblemConfig& cfg, int p, RadiationCondition rc);

// Solves for every incident channel at once; column p of the result is the
// outgoing amplitude vector of incident p.
std::vector<FieldSolution> solve_all(const ProblemConfig& cfg, RadiationCondition rc);

struct ScatteringMatrix {
  Eigen::MatrixXcd S;
  WaveBasis basis = WaveBasis::Standard;
  Variant variant = Variant::NeumannEven;
  double lambda = 0.0;
  int N = 0;
  double unitarity_defect = 0.0;  // ‖S*S - I‖_F
  double symmetry_defect = 0.0;   // ‖S - S^T‖_max
  double cond_estimate = 0.0;
  InterfaceResidual residual;

  int size() const { return static_cast<int>(S.rows()); }
  void update_diagnostics();
};

// Augmented matrix in the standard basis below the stabilized switch, converted
// from the stabilized basis above it, and in the threshold basis on the threshold.
ScatteringMatrix assemble_augmented_smatrix(const ProblemConfig& cfg);
// Augmented matrix in a prescribed basis, without conversion.
ScatteringMatrix assemble_in_basis(const ProblemConfig& cfg, WaveBasis basis);

// Reflection coefficient of the single propagating mode under the physical condition.
cplx physical_reflection(const ProblemConfig& cfg);

// s00 = S00 - S01 (S11 + 1)^{-1} S10.
cplx reduction_from_augmented(const ScatteringMatrix& S);

// Minimum admissible |1 - S_ee| for the stabilized-to-standard conversion.
inline constexpr double kConversionCutoff = 1e-6;
ScatteringMatrix stabilized_to_standard(const ScatteringMatrix& Sbold, double lambda);

// Closed-form ∫_0^1 φ_j ψ_n dx2 between a strip mode and a box mode.
double overlap(const TransverseMode& strip, const TransverseMode& box);

struct ConvergenceStudy {
  std::vector<int> N;
  std::vector<ScatteringMatrix> S;
};

// Augmented matrices for each N in the list; throws ConvergenceError if the
// interface residual fails to decrease (slack factor 1.2) as N grows.
ConvergenceStudy convergence_study(const ProblemConfig& cfg, const std::vector<int>& Ns);

}  // namespace boxguide
