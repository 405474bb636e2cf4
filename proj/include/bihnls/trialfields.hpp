#ifndef BIHNLS_TRIALFIELDS_HPP
#define BIHNLS_TRIALFIELDS_HPP

// The two explicit competitor families that pin the quotient from above, the
// spherical-cap geometry behind them, and the predicted decay rates.
//
// Knapp field: the frequency indicator of a cap-limited annulus,
//     u_hat = 1  on  { ||xi| - 1| <= sqrt(eps),  1 - xi_N/|xi| <= sqrt(eps) },
// whose inverse transform concentrates on a dual box of extents
// ~ eps^{-1/2} along the distinguished axis and ~ eps^{-1/4} across it.
//
// Annulus field: the resolvent-weighted indicator
//     u_hat(xi) = w(xi/|xi|) / g_eps(|xi|)  on  ||xi| - 1| <= eps^s,
// s in (0, 1/2).  For constant weight its quadratic form collapses to the
// one-dimensional resolvent integral
//     rho_eps = integral_{1-eps^s}^{1+eps^s} r^{N-1} / g_eps(r) dr
// times the squared surface norm of the weight, and sqrt(eps) rho_eps tends
// to pi/2.  The distinguished cap axis is the last grid axis.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bihnls/bessel.hpp"
#include "bihnls/energy.hpp"
#include "bihnls/field.hpp"
#include "bihnls/grid.hpp"
#include "bihnls/quadrature.hpp"
#include "bihnls/symbol.hpp"

namespace bihnls {

struct KnappParams {
  double epsilon;

  double annulus_half_width() const { return std::sqrt(epsilon); }
  // the cap C_eps = { theta : 1 - theta_N <= sqrt(eps) } has chordal radius
  // |theta - e_N| <= sqrt(2) eps^{1/4}
  double cap_chordal_radius() const { return std::sqrt(2.0) * std::pow(epsilon, 0.25); }
  static double delta0(int N) { return kPi / (8.0 * N); }
  static double delta(int N) { return 0.5 * delta0(N); }
};

struct AnnulusParams {
  double epsilon;
  double s = 0.1;  // annulus half width eps^s
};

// Weight on the unit sphere, sampled at lattice directions; an empty function
// means the constant weight w = 1.
using SphereWeight = std::function<double(const std::array<double, 3>&)>;

namespace detail {

inline void require_annulus_resolved(const SpectralGrid& g, double eps, const char* who) {
  const double shells = g.shells_across(std::sqrt(eps));
  if (shells < 4.0) {
    const double pi = 3.14159265358979323846;
    const double need_half = 2.0 * pi / std::sqrt(eps);
    int need_pts = 16;
    const double target = 8.0 * need_half / pi;
    while (need_pts < target || !GridPolicy::smooth5_even(need_pts)) ++need_pts;
    throw resolution_error(std::string(who) + ": only " + std::to_string(shells) +
                           " lattice shells across the annulus of width 2 sqrt(eps); need >= 4 "
                           "(half width >= " + std::to_string(need_half) +
                           ", minimum points per axis " + std::to_string(need_pts) + ")");
  }
}

}  // namespace detail

// Membership test for the cap-limited annulus in frequency space.
inline bool knapp_member(const SpectralGrid& g, std::size_t idx, double eps) {
  const auto n = g.unravel(idx);
  double r2 = 0.0;
  std::array<double, 3> xi{0.0, 0.0, 0.0};
  for (int d = 0; d < g.dim(); ++d) {
    xi[d] = g.freq(n[d]);
    r2 += xi[d] * xi[d];
  }
  if (!(r2 > 0.0)) return false;
  const double r = std::sqrt(r2);
  const double rt = std::sqrt(eps);
  if (std::abs(r - 1.0) > rt) return false;
  return 1.0 - xi[g.dim() - 1] / r <= rt;
}

inline Field knapp_field(const SpectralGrid& g, const KnappParams& kp) {
  if (!(kp.epsilon > 0.0) || !(kp.epsilon < 1.0))
    throw std::invalid_argument("knapp_field: eps must lie in (0, 1)");
  detail::require_annulus_resolved(g, kp.epsilon, "knapp_field");
  cvec four(g.size(), 0.0);
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < four.size(); ++i)
    if (knapp_member(g, i, kp.epsilon)) {
      four[i] = 1.0;
      ++nonzero;
    }
  if (nonzero == 0) throw resolution_error("knapp_field: no lattice point falls in the cap");
  return Field::from_fourier(g, std::move(four));
}

inline Field annulus_field(const SpectralGrid& g, const AnnulusParams& ap,
                           const SphereWeight& weight = {}) {
  if (!(ap.epsilon > 0.0) || !(ap.epsilon < 1.0))
    throw std::invalid_argument("annulus_field: eps must lie in (0, 1)");
  if (!(ap.s > 0.0) || !(ap.s < 0.5))
    throw std::invalid_argument("annulus_field: s must lie in (0, 1/2)");
  detail::require_annulus_resolved(g, ap.epsilon, "annulus_field");
  const SymbolParams sp = SymbolParams::normalized(ap.epsilon);
  const double tau = std::pow(ap.epsilon, ap.s);
  cvec four(g.size(), 0.0);
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < four.size(); ++i) {
    const auto n = g.unravel(i);
    double r2 = 0.0;
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    for (int d = 0; d < g.dim(); ++d) {
      xi[d] = g.freq(n[d]);
      r2 += xi[d] * xi[d];
    }
    if (!(r2 > 0.0)) continue;
    const double r = std::sqrt(r2);
    if (std::abs(r - 1.0) > tau) continue;
    double w = 1.0;
    if (weight) {
      std::array<double, 3> theta{xi[0] / r, xi[1] / r, xi[2] / r};
      w = weight(theta);
    }
    if (w != 0.0) {
      four[i] = w / symbol_value(sp, r);
      ++nonzero;
    }
  }
  if (nonzero == 0)
    throw std::invalid_argument("annulus_field: weight vanishes on every annulus lattice point");
  return Field::from_fourier(g, std::move(four));
}

// ── continuum geometry ──

// Surface measure of the cap { theta in S^{N-1} : 1 - theta_N <= sqrt(eps) }.
inline double cap_measure(int N, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("cap_measure: eps must be positive");
  if (N == 1) return 1.0;  // the single direction theta = +1
  const double c = 1.0 - std::sqrt(eps);
  const double phi = c <= -1.0 ? kPi : std::acos(c);
  const double omega = sphere_surface_measure(N - 1);  // |S^{N-2}|
  if (N == 2) return omega * phi;
  return omega * integrate([N](double t) { return std::pow(std::sin(t), N - 2.0); }, 0.0, phi, 1e-12).value;
}

// integral_a^b r^rpow / g_eps(r) dr with subdivision seeded at the resolvent
// peak r = 1 on dyadic multiples of sqrt(eps).
inline double resolvent_integral(double eps, double a, double b, int rpow) {
  const SymbolParams sp = SymbolParams::normalized(eps);
  std::vector<double> pts{a};
  const double w = std::sqrt(eps);
  std::vector<double> offs{0.0};
  for (double o = w; o < (b - a); o *= 2.0) {
    offs.push_back(o);
    offs.push_back(-o);
  }
  std::sort(offs.begin(), offs.end());
  for (double o : offs) {
    const double r = 1.0 + o;
    if (r > a && r < b) pts.push_back(r);
  }
  pts.push_back(b);
  return integrate_segments(
             [&](double r) { return std::pow(r, rpow) / symbol_value(sp, r); }, pts, 1e-12, 0.0, 8000)
      .value;
}

inline double rho_eps(double eps, double s, int N) {
  if (!(s > 0.0) || !(s < 0.5)) throw std::invalid_argument("rho_eps: s must lie in (0, 1/2)");
  const double tau = std::pow(eps, s);
  return resolvent_integral(eps, 1.0 - tau, 1.0 + tau, N - 1);
}

// Continuum value of the quadratic form of the constant-weight annulus field,
// evaluated as a black-box quadrature of g |u_hat|^2 (no peak seeding) so the
// identity q = rho_eps * ||w||^2_{L^2(S)} is checked through two genuinely
// different quadrature paths.
inline double annulus_q_continuum(int N, double eps, double s) {
  const SymbolParams sp = SymbolParams::normalized(eps);
  const double tau = std::pow(eps, s);
  auto f = [&](double r) {
    const double gg = symbol_value(sp, r);
    return gg * (1.0 / (gg * gg)) * std::pow(r, N - 1.0);
  };
  return sphere_surface_measure(N) *
         integrate([&](double r) { return f(r); }, 1.0 - tau, 1.0 + tau, 1e-9, 0.0, 20000).value;
}

// Continuum quadratic form and squared mass of the Knapp field.
inline double knapp_q_continuum(int N, double eps) {
  const SymbolParams sp = SymbolParams::normalized(eps);
  const double rt = std::sqrt(eps);
  return cap_measure(N, eps) *
         integrate([&](double r) { return symbol_value(sp, r) * std::pow(r, N - 1.0); }, 1.0 - rt,
                   1.0 + rt, 1e-12)
             .value;
}

inline double knapp_mass_continuum(int N, double eps) {
  const double rt = std::sqrt(eps);
  return cap_measure(N, eps) *
         integrate([&](double r) { return std::pow(r, N - 1.0); }, 1.0 - rt, 1.0 + rt, 1e-13).value;
}

// Dual concentration box: |x_N| <= delta eps^{-1/2}, |x_i| <= delta eps^{-1/4}
// for i < N; the working aperture is delta = KnappParams::delta(N).
inline std::array<double, 3> knapp_box_halfwidths(int N, double eps, double delta) {
  std::array<double, 3> h{0.0, 0.0, 0.0};
  for (int d = 0; d < N - 1; ++d) h[d] = delta * std::pow(eps, -0.25);
  h[N - 1] = delta * std::pow(eps, -0.5);
  return h;
}

// Pointwise floor for |u| of the Knapp field on the concentration box:
//     (sqrt(3) - 1) (1 - sqrt(eps))^{N-1} sqrt(eps) |C_eps| / (sqrt(2) (2 pi)^{N/2}).
inline double knapp_pointwise_bound(int N, double eps) {
  const double rt = std::sqrt(eps);
  return (std::sqrt(3.0) - 1.0) * std::pow(1.0 - rt, N - 1.0) * rt * cap_measure(N, eps) /
         (std::sqrt(2.0) * std::pow(2.0 * kPi, 0.5 * N));
}

// ── predicted decay rates ──

// Rate of the cap trial in eps, valid at every admissible p; below the
// Stein-Tomas exponent it is also the rate of the full minimal quotient.
inline double knapp_rate(double p, int N) {
  ExponentSet e(N, p);
  (void)e;
  return 0.75 + 1.0 / (2.0 * p) - 0.5 * N * (0.5 - 1.0 / p);
}

// Decay exponent of the minimal quotient: sqrt(eps) at and above the
// Stein-Tomas exponent, the cap rate below it.  (N = 1 has no Stein-Tomas
// threshold and always takes the cap rate.)
inline double theory_exponent(double p, int N) {
  ExponentSet e(N, p);
  if (N >= 2 && p >= e.stein_tomas()) return 0.5;
  return knapp_rate(p, N);
}

}  // namespace bihnls

#endif
