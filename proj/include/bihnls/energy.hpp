#ifndef BIHNLS_ENERGY_HPP
#define BIHNLS_ENERGY_HPP

// Quadratic form, energy and quotient of a field under a dispersion symbol.
//
//     q(u)   = sum_n g(|xi_n|) |u_hat_n|^2 dxi^N          (frequency view)
//     E(u)   = q(u)/2 - ||u||_p^p / p
//     Q(u)   = q(u) / ||u||_p^2
//
// Since g >= b - a^2 pointwise on the lattice, q(u) >= (b - a^2) ||u||_2^2
// holds exactly, and q splits over real and imaginary parts, q(u) =
// q(Re u) + q(Im u), because the symbol only sees |u_hat|^2 and the lattice
// pairs +xi with -xi (the Nyquist column is its own mirror).

#include <cmath>

#include "bihnls/field.hpp"
#include "bihnls/spectral.hpp"
#include "bihnls/summation.hpp"
#include "bihnls/symbol.hpp"

namespace bihnls {

inline double quadratic_form(const SpectralGrid& g, const cvec& four, const SymbolParams& s) {
  const double w = detail::pow_n(g.freq_spacing(), g.dim());
  KahanSum acc;
  for (std::size_t i = 0; i < four.size(); ++i)
    acc.add(symbol_value_r2(s, g.freq_r2(i)) * std::norm(four[i]) * w);
  return acc.value();
}

inline double quadratic_form(const Field& u, const SymbolParams& s) {
  return quadratic_form(u.grid(), u.fourier(), s);
}

inline double energy(const Field& u, const SymbolParams& s, double p) {
  ExponentSet exps(u.grid().dim(), p);  // validates 2 < p < 2*
  (void)exps;
  return 0.5 * quadratic_form(u, s) - lp_power_sum(u.grid(), u.physical(), p) / p;
}

inline double quotient(const Field& u, const SymbolParams& s, double p) {
  const double np = lp_norm(u, p);
  if (!(np > 0.0)) throw std::domain_error("quotient: zero field");
  return quadratic_form(u, s) / (np * np);
}

}  // namespace bihnls

#endif
