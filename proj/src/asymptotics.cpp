#include "boxguide/asymptotics.hpp"

#include <cmath>
#include <string>

#include "boxguide/errors.hpp"

namespace boxguide {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_positive(double mu, double l) {
  if (!(mu > 0.0)) throw DomainError("μ must be positive");
  if (!(l > 0.0)) throw DomainError("l must be positive");
}

}  // namespace

// With r = √μ and c = 2π²l the closed forms factor as
//   S11⁰ = -i (c - ir)/(c + ir),   S10⁰ = -2 √(πr) (1+i) sin(πl)/(c + ir).
cplx s11_leading(double mu, double l) {
  require_positive(mu, l);
  return scalar_leading(mu, 2.0 * kPi2 * l);
}

cplx scalar_leading(double mu, double c) {
  if (!(mu > 0.0) || !(c > 0.0)) throw DomainError("μ and c must be positive");
  const double r = std::sqrt(mu);
  return -(2.0 * c * r + kI * (c * c - mu)) / (c * c + mu);
}

cplx s10_leading(double mu, double l) {
  require_positive(mu, l);
  const double r = std::sqrt(mu);
  const double c = 2.0 * kPi2 * l;
  return -std::pow(4.0 * mu, 0.25) * std::sqrt(2.0 * kPi) *
         (r * (1.0 - kI) + c * (1.0 + kI)) / (c * c + mu) * std::sin(kPi * l);
}

cplx s01_leading(double mu, double l) {
  const cplx s11 = s11_leading(mu, l);
  return -std::pow(4.0 * mu, -0.25) * std::sqrt(2.0 * kPi) * (1.0 - kI - s11 * (1.0 + kI)) *
         std::sin(kPi * l);
}

cplx s00_expansion(double l, double eps) {
  if (!(eps >= 0.0)) throw DomainError("ε must be nonnegative");
  return 1.0 + eps * kI * std::sin(2.0 * kPi * l);
}

LeadingOrderS leading_order(double mu, double l) {
  LeadingOrderS out;
  out.mu = mu;
  out.l = l;
  out.s11 = s11_leading(mu, l);
  out.s01 = s01_leading(mu, l);
  out.s10 = s10_leading(mu, l);
  out.s00 = 1.0;
  out.s00_prime = kI * std::sin(2.0 * kPi * l);
  return out;
}

std::array<cplx, 2> s11_leading_gradient(double mu, double l) {
  require_positive(mu, l);
  const double r = std::sqrt(mu);
  const double c = 2.0 * kPi2 * l;
  const cplx d = (c + kI * r) * (c + kI * r);
  const cplx dr = -2.0 * c / d;
  const cplx dc = 2.0 * r / d;
  return {dr / (2.0 * r), dc * 2.0 * kPi2};
}

std::array<cplx, 2> s10_leading_gradient(double mu, double l) {
  require_positive(mu, l);
  const double r = std::sqrt(mu);
  const double c = 2.0 * kPi2 * l;
  const cplx den = c + kI * r;
  const double sn = std::sin(kPi * l);
  const cplx pre = -2.0 * std::sqrt(kPi) * (1.0 + kI);
  const cplx dr = pre * sn * (c - kI * r) / (2.0 * std::sqrt(r) * den * den);
  const cplx dl =
      pre * std::sqrt(r) * (kPi * std::cos(kPi * l) / den - sn * 2.0 * kPi2 / (den * den));
  return {dr / (2.0 * r), dl};
}

double ledge_coupling(Variant v, double l) {
  if (!(l > 0.0)) throw DomainError("l must be positive");
  if (odd_at_truncation(v)) {
    throw DomainError("leading-order coefficients are available for even truncation only");
  }
  return 2.0 * trapping_threshold(v) * l;
}

double eigenvalue_leading(double eps, double l, Variant v) {
  if (!(eps >= 0.0)) throw DomainError("ε must be nonnegative");
  const double c = ledge_coupling(v, l);
  const double lambda = trapping_threshold(v) - eps * eps * c * c;
  if (!(lambda > 0.0)) {
    throw DomainError("leading eigenvalue " + std::to_string(lambda) + " leaves the window");
  }
  return lambda;
}

double remainder_scale(double eps) {
  const double g = 1.0 + std::abs(std::log(eps));
  return eps * g * g;
}

}  // namespace boxguide
