#include "boxguide/waves.hpp"

#include <cmath>
#include <string>

#include "boxguide/errors.hpp"

namespace boxguide {

namespace {

constexpr cplx kI{0.0, 1.0};

double sign_factor(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }

bool is_neumann(Variant v) { return v == Variant::NeumannEven || v == Variant::NeumannOdd; }

void require_strip(double x2) {
  if (!(x2 >= 0.0 && x2 <= 1.0)) {
    throw DomainError("point x2 = " + std::to_string(x2) + " lies outside the closed strip [0, 1]");
  }
}

}  // namespace

Profile transverse_profile(Variant v) {
  switch (v) {
    case Variant::NeumannEven:
    case Variant::NeumannOdd:
      return Profile::Cosine;
    case Variant::MixedTopDirichlet:
      return Profile::HalfCosine;
    case Variant::DirichletEven:
    case Variant::DirichletOdd:
      return Profile::Sine;
  }
  return Profile::Cosine;
}

bool odd_at_truncation(Variant v) { return v == Variant::NeumannOdd || v == Variant::DirichletOdd; }

bool dirichlet_ledge(Variant v) { return v == Variant::DirichletEven || v == Variant::DirichletOdd; }

int channel_count(Variant v) { return is_neumann(v) ? 2 : 1; }

double continuum_edge(Variant v) {
  switch (transverse_profile(v)) {
    case Profile::Cosine:
      return 0.0;
    case Profile::HalfCosine:
      return kPi2 / 4.0;
    case Profile::Sine:
      return kPi2;
  }
  return 0.0;
}

double trapping_threshold(Variant v) { return is_neumann(v) ? kPi2 : continuum_edge(v); }

double upper_threshold(Variant v) {
  switch (transverse_profile(v)) {
    case Profile::Cosine:
      return 4.0 * kPi2;
    case Profile::HalfCosine:
      return 9.0 * kPi2 / 4.0;
    case Profile::Sine:
      return 4.0 * kPi2;
  }
  return 0.0;
}

int exponential_channel_ordinal(Variant v) { return is_neumann(v) ? 1 : 0; }

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::NeumannEven:
      return "neumann-even";
    case Variant::NeumannOdd:
      return "neumann-odd";
    case Variant::MixedTopDirichlet:
      return "mixed-top";
    case Variant::DirichletEven:
      return "dirichlet-even";
    case Variant::DirichletOdd:
      return "dirichlet-odd";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : {Variant::NeumannEven, Variant::NeumannOdd, Variant::MixedTopDirichlet,
                    Variant::DirichletEven, Variant::DirichletOdd}) {
    if (name == to_string(v)) return v;
  }
  if (name == "neumann") return Variant::NeumannEven;
  if (name == "dirichlet") return Variant::DirichletEven;
  return std::nullopt;
}

double TransverseMode::frequency() const { return std::sqrt(eigenvalue); }

double TransverseMode::value(double x2) const {
  const double y = x2 - bottom;
  switch (profile) {
    case Profile::Cosine:
    case Profile::HalfCosine:
      return std::cos(frequency() * y);
    case Profile::Sine:
      return std::sin(frequency() * y);
  }
  return 0.0;
}

double TransverseMode::derivative(double x2) const {
  const double y = x2 - bottom;
  const double f = frequency();
  switch (profile) {
    case Profile::Cosine:
    case Profile::HalfCosine:
      return -f * std::sin(f * y);
    case Profile::Sine:
      return f * std::cos(f * y);
  }
  return 0.0;
}

double TransverseMode::norm_squared() const {
  if (profile == Profile::Cosine && index == 0) return height;
  return 0.5 * height;
}

TransverseMode transverse_mode(Variant v, int ordinal, double height, double bottom) {
  if (ordinal < 0) throw DomainError("negative mode ordinal");
  if (!(height > 0.0)) throw DomainError("transverse height must be positive");
  TransverseMode m;
  m.ordinal = ordinal;
  m.height = height;
  m.bottom = bottom;
  m.profile = transverse_profile(v);
  double freq = 0.0;
  switch (m.profile) {
    case Profile::Cosine:
      m.index = ordinal;
      freq = ordinal * kPi / height;
      break;
    case Profile::HalfCosine:
      m.index = ordinal;
      freq = (ordinal + 0.5) * kPi / height;
      break;
    case Profile::Sine:
      m.index = ordinal + 1;
      freq = (ordinal + 1) * kPi / height;
      break;
  }
  m.eigenvalue = freq * freq;
  return m;
}

Regime classify(double lambda, double transverse_eigenvalue) {
  const double s = transverse_eigenvalue - lambda;
  if (std::abs(s) <= kThresholdTol) return Regime::Threshold;
  return s < 0.0 ? Regime::Propagating : Regime::Evanescent;
}

std::vector<ModeWavenumber> wavenumbers(double lambda, Variant v, double height, int count) {
  if (!(lambda > 0.0)) throw DomainError("spectral parameter must be positive");
  if (count < 1) throw DomainError("mode count must be at least 1");
  std::vector<ModeWavenumber> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    ModeWavenumber mw;
    mw.mode = transverse_mode(v, j, height);
    mw.regime = classify(lambda, mw.mode.eigenvalue);
    mw.k = mw.regime == Regime::Threshold ? 0.0 : std::sqrt(std::abs(lambda - mw.mode.eigenvalue));
    out.push_back(mw);
  }
  return out;
}

std::string_view to_string(WaveBasis b) {
  switch (b) {
    case WaveBasis::Standard:
      return "standard";
    case WaveBasis::Stabilized:
      return "stabilized";
    case WaveBasis::Threshold:
      return "threshold";
  }
  return "unknown";
}

WaveSpec channel_wave(WaveBasis basis, int p, Sign sign, double lambda, Variant v) {
  const int s = channel_count(v);
  if (p < 0 || p >= s) throw DomainError("channel index out of range for the variant");
  const bool oscillatory = is_neumann(v) && p == 0;
  WaveSpec w;
  w.sign = sign;
  w.lambda = lambda;
  w.variant = v;
  switch (basis) {
    case WaveBasis::Standard:
      w.family = oscillatory ? WaveFamily::Oscillatory : WaveFamily::ExponentialCombo;
      break;
    case WaveBasis::Stabilized:
      w.family = oscillatory ? WaveFamily::Oscillatory : WaveFamily::Stabilized;
      break;
    case WaveBasis::Threshold:
      w.family = oscillatory ? WaveFamily::ThresholdOscillatory : WaveFamily::ThresholdLinear;
      break;
  }
  return w;
}

double ModalTerm::k() const { return regime == Regime::Threshold ? 0.0 : std::sqrt(std::abs(s)); }

std::array<cplx, 2> ModalTerm::longitudinal(double x1) const {
  const double kk = k();
  switch (regime) {
    case Regime::Propagating: {
      const cplx e = std::exp(kI * kk * x1);
      const cplx f = std::conj(e);
      return {a * e + b * f, kI * kk * (a * e - b * f)};
    }
    case Regime::Evanescent: {
      const double e = std::exp(kk * x1);
      const double f = std::exp(-kk * x1);
      return {a * e + b * f, kk * (a * e - b * f)};
    }
    case Regime::Threshold:
      return {a + b * x1, b};
  }
  return {cplx{}, cplx{}};
}

void ModalWave::add_term(const ModalTerm& t) {
  for (auto& existing : terms_) {
    if (existing.ordinal == t.ordinal) {
      if (existing.regime != t.regime || std::abs(existing.s - t.s) > kThresholdTol) {
        throw DomainError("cannot combine waves of one mode at different spectral parameters");
      }
      existing.a += t.a;
      existing.b += t.b;
      return;
    }
  }
  terms_.push_back(t);
}

ModalWave& ModalWave::operator+=(const ModalWave& other) {
  if (!terms_.empty() && !other.terms_.empty()) {
    if (variant_ != other.variant_) throw DomainError("cannot combine waves of different variants");
    if (std::abs(lambda_ - other.lambda_) > kThresholdTol) {
      throw DomainError("cannot combine waves at different spectral parameters");
    }
  }
  if (terms_.empty()) {
    variant_ = other.variant_;
    lambda_ = other.lambda_;
  }
  for (const auto& t : other.terms_) add_term(t);
  return *this;
}

ModalWave& ModalWave::operator*=(cplx c) {
  for (auto& t : terms_) {
    t.a *= c;
    t.b *= c;
  }
  return *this;
}

ModalWave operator+(ModalWave lhs, const ModalWave& rhs) {
  lhs += rhs;
  return lhs;
}

ModalWave operator*(cplx c, ModalWave w) {
  w *= c;
  return w;
}

std::array<cplx, 2> ModalWave::longitudinal(int ordinal, double x1) const {
  for (const auto& t : terms_) {
    if (t.ordinal == ordinal) return t.longitudinal(x1);
  }
  return {cplx{}, cplx{}};
}

WaveValue ModalWave::eval(double x1, double x2) const {
  require_strip(x2);
  WaveValue out{cplx{}, {cplx{}, cplx{}}};
  for (const auto& t : terms_) {
    const auto mode = transverse_mode(variant_, t.ordinal);
    const auto [X, dX] = t.longitudinal(x1);
    const double phi = mode.value(x2);
    out.value += X * phi;
    out.gradient[0] += dX * phi;
    out.gradient[1] += X * mode.derivative(x2);
  }
  return out;
}

ModalWave to_modal(const WaveSpec& w) {
  const Variant v = w.variant;
  ModalWave out(v, w.lambda);
  const double sg = sign_factor(w.sign);
  ModalTerm t;
  switch (w.family) {
    case WaveFamily::Oscillatory:
    case WaveFamily::ThresholdOscillatory: {
      if (!is_neumann(v)) throw DomainError("oscillatory waves exist only in the Neumann strip");
      if (!(w.lambda > 0.0)) throw DomainError("oscillatory waves need a positive spectral parameter");
      if (w.family == WaveFamily::ThresholdOscillatory && std::abs(w.lambda - kPi2) > kThresholdTol) {
        throw DomainError("threshold oscillatory wave requested off the threshold π²");
      }
      const double k = std::sqrt(w.lambda);
      const double n = 1.0 / std::sqrt(2.0 * k);
      t.ordinal = 0;
      t.s = -w.lambda;
      t.regime = Regime::Propagating;
      t.a = w.sign == Sign::Plus ? n : 0.0;
      t.b = w.sign == Sign::Plus ? 0.0 : n;
      break;
    }
    case WaveFamily::ExponentialRaw:
    case WaveFamily::ExponentialCombo: {
      const auto mode = transverse_mode(v, exponential_channel_ordinal(v));
      const double s = mode.eigenvalue - w.lambda;
      if (!(s > kThresholdTol)) {
        throw DomainError("exponential waves need λ strictly below the threshold " +
                          std::to_string(mode.eigenvalue));
      }
      const double k = std::sqrt(s);
      const double n = 1.0 / std::sqrt(k);
      t.ordinal = mode.ordinal;
      t.s = s;
      t.regime = Regime::Evanescent;
      if (w.family == WaveFamily::ExponentialRaw) {
        t.a = w.sign == Sign::Plus ? n : 0.0;
        t.b = w.sign == Sign::Plus ? 0.0 : n;
      } else {
        t.a = n / std::sqrt(2.0);
        t.b = -sg * kI * n / std::sqrt(2.0);
      }
      break;
    }
    case WaveFamily::ThresholdLinear:
    case WaveFamily::Stabilized: {
      const auto mode = transverse_mode(v, exponential_channel_ordinal(v));
      const double s = mode.eigenvalue - w.lambda;
      t.ordinal = mode.ordinal;
      t.s = s;
      if (std::abs(s) <= kThresholdTol) {
        t.regime = Regime::Threshold;
        t.a = -sg * kI;
        t.b = 1.0;
      } else if (w.family == WaveFamily::ThresholdLinear) {
        throw DomainError("threshold linear wave requested off the threshold " +
                          std::to_string(mode.eigenvalue));
      } else if (s < 0.0) {
        throw DomainError("stabilized waves need λ at or below the threshold");
      } else {
        const double k = std::sqrt(s);
        t.regime = Regime::Evanescent;
        // sinh(kx)/k ∓ i cosh(kx)
        t.a = 0.5 / k - sg * kI * 0.5;
        t.b = -0.5 / k - sg * kI * 0.5;
      }
      break;
    }
  }
  out.add_term(t);
  return out;
}

WaveValue eval_wave(const WaveSpec& w, double x1, double x2) {
  require_strip(x2);
  const Variant v = w.variant;
  const double sg = sign_factor(w.sign);
  switch (w.family) {
    case WaveFamily::Oscillatory:
    case WaveFamily::ThresholdOscillatory: {
      // Validation lives in to_modal.
      (void)to_modal(w);
      const double k = w.family == WaveFamily::ThresholdOscillatory ? kPi : std::sqrt(w.lambda);
      const cplx val = std::exp(sg * kI * k * x1) / std::sqrt(2.0 * k);
      return {val, {sg * kI * k * val, cplx{}}};
    }
    case WaveFamily::ExponentialRaw:
    case WaveFamily::ExponentialCombo:
    case WaveFamily::ThresholdLinear:
    case WaveFamily::Stabilized: {
      const ModalWave m = to_modal(w);
      const ModalTerm& t = m.terms().front();
      const auto mode = transverse_mode(v, t.ordinal);
      const double phi = mode.value(x2);
      const double dphi = mode.derivative(x2);
      cplx X, dX;
      if (w.family == WaveFamily::Stabilized && t.regime == Regime::Evanescent) {
        const double k = t.k();
        const double sh = std::sinh(k * x1);
        const double ch = std::cosh(k * x1);
        X = sh / k - sg * kI * ch;
        dX = ch - sg * kI * k * sh;
      } else if (t.regime == Regime::Threshold) {
        X = x1 - sg * kI;
        dX = 1.0;
      } else {
        const double k = t.k();
        const double ep = std::exp(k * x1) / std::sqrt(k);
        const double em = std::exp(-k * x1) / std::sqrt(k);
        if (w.family == WaveFamily::ExponentialRaw) {
          X = w.sign == Sign::Plus ? ep : em;
          dX = w.sign == Sign::Plus ? k * ep : -k * em;
        } else {
          X = (ep - sg * kI * em) / std::sqrt(2.0);
          dX = k * (ep + sg * kI * em) / std::sqrt(2.0);
        }
      }
      return {X * phi, {dX * phi, X * dphi}};
    }
  }
  return {cplx{}, {cplx{}, cplx{}}};
}

cplx symplectic_form(const ModalWave& w, const ModalWave& v, double R) {
  if (!(R > 0.0)) throw DomainError("cross-section abscissa must be positive");
  if (w.terms().empty() || v.terms().empty()) return cplx{};
  if (w.variant() != v.variant()) throw DomainError("symplectic form of waves from different variants");
  if (std::abs(w.lambda() - v.lambda()) > kThresholdTol) {
    throw DomainError("symplectic form of waves at different spectral parameters");
  }
  cplx q{};
  for (const auto& tw : w.terms()) {
    for (const auto& tv : v.terms()) {
      if (tw.ordinal != tv.ordinal) continue;
      const double norm = transverse_mode(w.variant(), tw.ordinal).norm_squared();
      const double k = tw.k();
      const cplx c = std::conj(tv.a);
      const cplx d = std::conj(tv.b);
      switch (tw.regime) {
        case Regime::Propagating:
          q += norm * 2.0 * kI * k * (tw.a * c - tw.b * d);
          break;
        case Regime::Evanescent:
          q += norm * 2.0 * k * (tw.a * d - tw.b * c);
          break;
        case Regime::Threshold:
          q += norm * (tw.b * c - tw.a * d);
          break;
      }
    }
  }
  return q;
}

cplx symplectic_form(const WaveSpec& w, const WaveSpec& v, double R) {
  return symplectic_form(to_modal(w), to_modal(v), R);
}

}  // namespace boxguide
