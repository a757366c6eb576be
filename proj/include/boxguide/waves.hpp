#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace boxguide {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kPi2 = kPi * kPi;

// |λ - Λ_m| at or below this value is treated as sitting on the threshold Λ_m.
inline constexpr double kThresholdTol = 1e-12;

// Wall conditions of the half-waveguide. Even/Odd name the condition on the
// truncation segment x1 = 0 (Neumann / Dirichlet). MixedTopDirichlet has the
// Dirichlet condition on the upper wall x2 = 1 and Neumann elsewhere.
enum class Variant { NeumannEven, NeumannOdd, MixedTopDirichlet, DirichletEven, DirichletOdd };

enum class Profile { Cosine, HalfCosine, Sine };

Profile transverse_profile(Variant v);
bool odd_at_truncation(Variant v);
// Dirichlet condition on the vertical ledge side {x1 = l, -ε < x2 < 0}.
bool dirichlet_ledge(Variant v);
// Size of the augmented scattering matrix below the trapping threshold.
int channel_count(Variant v);
// Bottom of the continuous spectrum of the straight half-strip.
double continuum_edge(Variant v);
// Threshold Λ_c of the exponential channel mode; λ = Λ_c - ε²μ.
double trapping_threshold(Variant v);
// Next threshold above the window; one more wave would start propagating there.
double upper_threshold(Variant v);
// Ordinal of the strip mode carrying the exponential channel waves.
int exponential_channel_ordinal(Variant v);

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

struct TransverseMode {
  int index = 0;    // natural label m; Dirichlet modes start at m = 1
  int ordinal = 0;  // 0-based position in the basis
  double height = 1.0;
  double bottom = 0.0;
  Profile profile = Profile::Cosine;
  double eigenvalue = 0.0;

  double frequency() const;  // sqrt(eigenvalue)
  double value(double x2) const;
  double derivative(double x2) const;
  // Integral of the squared profile over (bottom, bottom + height).
  double norm_squared() const;
};

TransverseMode transverse_mode(Variant v, int ordinal, double height = 1.0, double bottom = 0.0);

enum class Regime { Propagating, Threshold, Evanescent };

struct ModeWavenumber {
  TransverseMode mode;
  double k = 0.0;  // sqrt(|λ - Λ_m|)
  Regime regime = Regime::Evanescent;
};

Regime classify(double lambda, double transverse_eigenvalue);

std::vector<ModeWavenumber> wavenumbers(double lambda, Variant v, double height, int count);

enum class WaveFamily {
  Oscillatory,           // (2k)^{-1/2} e^{±ikx1}
  ExponentialRaw,        // k1^{-1/2} e^{±k1 x1} φ(x2)
  ExponentialCombo,      // 2^{-1/2}(v+ ∓ i v-)
  ThresholdOscillatory,  // (2π)^{-1/2} e^{±iπx1} at λ = π²
  ThresholdLinear,       // (x1 ∓ i) φ(x2) at the trapping threshold
  Stabilized,            // (sinh(k1 x1)/k1 ∓ i cosh(k1 x1)) φ(x2)
};

enum class Sign { Plus, Minus };

struct WaveSpec {
  WaveFamily family = WaveFamily::Oscillatory;
  Sign sign = Sign::Plus;
  double lambda = 0.0;
  Variant variant = Variant::NeumannEven;
};

struct WaveValue {
  cplx value;
  std::array<cplx, 2> gradient;
};

// Closed-form value and gradient on the closed straight strip 0 <= x2 <= 1.
WaveValue eval_wave(const WaveSpec& w, double x1, double x2);

// Channel bases used for the augmented scattering matrix.
//   Standard:   oscillatory (13) and exponential combinations (30)
//   Stabilized: oscillatory (13) and the near-threshold combinations
//   Threshold:  (17) and (20), only at λ equal to the trapping threshold
enum class WaveBasis { Standard, Stabilized, Threshold };

std::string_view to_string(WaveBasis b);

WaveSpec channel_wave(WaveBasis basis, int p, Sign sign, double lambda, Variant v);

// One transverse mode times a two-term longitudinal factor. With k = sqrt|s|:
//   Propagating: X = a e^{ik x1} + b e^{-ik x1}
//   Evanescent:  X = a e^{k x1}  + b e^{-k x1}
//   Threshold:   X = a + b x1
struct ModalTerm {
  int ordinal = 0;
  double s = 0.0;  // Λ_m - λ
  Regime regime = Regime::Threshold;
  cplx a{};
  cplx b{};

  double k() const;
  // X(x1) and X'(x1).
  std::array<cplx, 2> longitudinal(double x1) const;
};

// A wave (or combination of waves) of the straight strip in modal form.
class ModalWave {
 public:
  ModalWave() = default;
  ModalWave(Variant v, double lambda) : variant_(v), lambda_(lambda) {}

  Variant variant() const { return variant_; }
  double lambda() const { return lambda_; }
  const std::vector<ModalTerm>& terms() const { return terms_; }

  void add_term(const ModalTerm& t);
  ModalWave& operator+=(const ModalWave& other);
  ModalWave& operator*=(cplx c);

  // X(x1), X'(x1) of the given ordinal; zero if absent.
  std::array<cplx, 2> longitudinal(int ordinal, double x1) const;
  WaveValue eval(double x1, double x2) const;

 private:
  Variant variant_ = Variant::NeumannEven;
  double lambda_ = 0.0;
  std::vector<ModalTerm> terms_;
};

ModalWave operator+(ModalWave lhs, const ModalWave& rhs);
ModalWave operator*(cplx c, ModalWave w);

ModalWave to_modal(const WaveSpec& w);

// q_R(w, v) = ∫_0^1 (conj(v) ∂1 w - w conj(∂1 v)) dx2 at x1 = R. Evaluated from
// the modal coefficients; exact solutions make it independent of R.
cplx symplectic_form(const ModalWave& w, const ModalWave& v, double R = 1.0);
cplx symplectic_form(const WaveSpec& w, const WaveSpec& v, double R = 1.0);

// Boundary-layer log coefficient of the ledge problem.
struct AsymptoticConstants {
  static constexpr double B = 1.0;
};

}  // namespace boxguide
