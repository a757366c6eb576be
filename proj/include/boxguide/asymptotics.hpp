#pragma once

#include <array>

#include "boxguide/waves.hpp"

namespace boxguide {

// Leading terms of the augmented scattering matrix for λ = π² - ε²μ (Neumann,
// even truncation):
//   S11 = S11⁰ + O(ε(1+|ln ε|)²),   S01 = S10 = ε^{1/2} S10⁰ + O(ε^{3/2}(1+|ln ε|)²),
//   S00 = 1 + ε S00' + ...
struct LeadingOrderS {
  double mu = 0.0;
  double l = 0.0;
  cplx s11;
  cplx s01;  // from the S11⁰ relation
  cplx s10;  // direct closed form
  cplx s00 = 1.0;
  cplx s00_prime;
};

LeadingOrderS leading_order(double mu, double l);

// -(4π² l √μ + i(4π⁴l² - μ)) / (4π⁴l² + μ); unimodular, equal to -1 at μ = 4π⁴l².
cplx s11_leading(double mu, double l);
// -(4μ)^{1/4} (2π)^{1/2} (√μ(1-i) + 2π²l(1+i)) / (4π⁴l² + μ) · sin(πl)
cplx s10_leading(double mu, double l);
// -(4μ)^{-1/4} (2π)^{1/2} (1 - i - S11⁰(1+i)) sin(πl); coincides with s10_leading.
cplx s01_leading(double mu, double l);
// 1 + iε sin(2πl)
cplx s00_expansion(double l, double eps);

// Partial derivatives with respect to (μ, l) at fixed other argument.
std::array<cplx, 2> s11_leading_gradient(double mu, double l);
std::array<cplx, 2> s10_leading_gradient(double mu, double l);

// Ledge coupling c with μ* = c² the unperturbed root of S⁰ = -1: c = 2 Λ_c l
// where Λ_c is the trapping threshold of the variant. Even truncation only.
double ledge_coupling(Variant v, double l);

// Leading scalar coefficient -(2c√μ + i(c² - μ)) / (c² + μ) of the one-channel
// variants; with c = 2π²l it is s11_leading.
cplx scalar_leading(double mu, double c);

// λ = Λ_c - ε² c², the leading eigenvalue law of the variant.
double eigenvalue_leading(double eps, double l, Variant v);

// ε(1+|ln ε|)², the remainder scale of the expansions.
double remainder_scale(double eps);

}  // namespace boxguide
