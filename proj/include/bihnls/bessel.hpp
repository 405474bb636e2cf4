#ifndef BIHNLS_BESSEL_HPP
#define BIHNLS_BESSEL_HPP

// Bessel functions of the first kind and the radial profile of the unit
// sphere's inverse Fourier transform.
//
// J_nu is evaluated from the ascending power series below the crossover
// radius 12 and from the Hankel asymptotic expansion (P, Q cosine/sine
// series) beyond it; the crossover is validated against an independent
// angular quadrature in the tests to 1e-10.  Orders are real and
// nonnegative; the library only ever needs nu = (N - 2)/2 for N up to 3 but
// nothing below assumes half-integers.
//
// The sphere profile is the radial function
//     e_N(r) = (2 pi)^{-N/2} integral_{S^{N-1}} e^{i r theta_1} dsigma(theta)
//            = (2 pi)^{-N/2} omega_{N-1} Gamma(N/2) (2/r)^{(N-2)/2} J_{(N-2)/2}(r),
// with e_N(0) = (2 pi)^{-N/2} omega_{N-1}.  In two dimensions e_2 = J_0, in
// three e_3(r) = sqrt(2/pi) sin(r)/r.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "bihnls/quadrature.hpp"

namespace bihnls {

inline constexpr double kPi = 3.14159265358979323846;

// omega_{N-1} = |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)
inline double sphere_surface_measure(int N) {
  if (N < 1) throw std::invalid_argument("sphere_surface_measure: N must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * N) / std::tgamma(0.5 * N);
}

namespace detail {

inline double bessel_j_series(double nu, double x) {
  // t_0 = (x/2)^nu / Gamma(nu + 1), t_{m+1} = -t_m (x/2)^2 / ((m+1)(nu+m+1))
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const double q = 0.25 * x * x;
  double t = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
  KahanSum s;
  s.add(t);
  for (int m = 0; m < 400; ++m) {
    t *= -q / ((m + 1.0) * (nu + m + 1.0));
    s.add(t);
    if (std::abs(t) < 1e-18 * (std::abs(s.value()) + 1e-300)) break;
  }
  return s.value();
}

inline double bessel_j_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! (8x)^k), split into the even
  // (P, alternating) and odd (Q, alternating) cosine/sine series.
  double p = 1.0, qq = 0.0;
  double term = 1.0;
  double prev = 1e300;
  for (int k = 1; k <= 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::abs(term);
    if (mag > prev) break;  // past the optimal truncation point
    prev = mag;
    if (k % 2 == 1)
      qq += (((k - 1) / 2) % 2 == 0 ? term : -term);
    else
      p += ((k / 2) % 2 == 0 ? term : -term);
    if (mag < 1e-18) break;
  }
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - qq * std::sin(chi));
}

}  // namespace detail

inline double bessel_j(double nu, double x) {
  if (nu < 0.0) throw std::domain_error("bessel_j: order must be nonnegative");
  if (x < 0.0) throw std::domain_error("bessel_j: argument must be nonnegative");
  return x < 12.0 ? detail::bessel_j_series(nu, x) : detail::bessel_j_asymptotic(nu, x);
}

inline double sphere_profile(int N, double r) {
  if (N < 2) throw std::invalid_argument("sphere_profile: N must be >= 2");
  if (r < 0.0) throw std::domain_error("sphere_profile: radius must be nonnegative");
  const double nu = 0.5 * (N - 2);
  const double amp = std::pow(2.0 * kPi, -0.5 * N) * sphere_surface_measure(N);
  if (r < 12.0) {
    // series of Gamma(nu+1) (2/r)^nu J_nu(r) = sum_m (-1)^m (r/2)^{2m} Gamma(nu+1)/(m! Gamma(m+nu+1)),
    // which is regular through r = 0
    const double q = 0.25 * r * r;
    double t = 1.0;
    KahanSum s;
    s.add(t);
    for (int m = 0; m < 400; ++m) {
      t *= -q / ((m + 1.0) * (nu + m + 1.0));
      s.add(t);
      if (std::abs(t) < 1e-18 * (std::abs(s.value()) + 1e-300)) break;
    }
    return amp * s.value();
  }
  const double scale = std::exp(std::lgamma(nu + 1.0) + nu * std::log(2.0 / r));
  return amp * scale * detail::bessel_j_asymptotic(nu, r);
}

// The same profile under its role name: the radial Fourier extension of the
// constant density on the unit sphere, scalar or sampled on a radius list.
inline double sphere_extension_radial(int N, double r) { return sphere_profile(N, r); }

inline std::vector<double> sphere_extension_radial(int N, const std::vector<double>& radii) {
  std::vector<double> out(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) out[i] = sphere_profile(N, radii[i]);
  return out;
}

// Envelope constant of the profile's decay, |e_N(r)| <= C_N (1+r)^{-(N-1)/2}:
// the Hankel amplitude transfers to amp * 2^nu Gamma(nu+1) sqrt(2/pi) r^{-(N-1)/2}.
inline double sphere_profile_envelope(int N) {
  const double nu = 0.5 * (N - 2);
  const double amp = std::pow(2.0 * kPi, -0.5 * N) * sphere_surface_measure(N);
  return amp * std::exp(std::lgamma(nu + 1.0) + nu * std::log(2.0)) * std::sqrt(2.0 / kPi);
}

// ── radial extension constant ──
//
// For p above the radial threshold 2N/(N-1) the profile lies in L^p(R^N) and
//     cst = omega_{N-1} / ||e_N||_p^2
// is finite.  The norm integral is split at a multiple of pi: a Gauss-Kronrod
// pass over oscillation blocks up to R0, then the closed-form tail of the
// asymptotic envelope with |cos|^p replaced by its period mean
// Gamma((p+1)/2) / (sqrt(pi) Gamma(p/2 + 1)).

struct CstRadInfo {
  double value = 0.0;
  double rel_error = 0.0;   // quadrature + envelope model estimate
  double cutoff = 0.0;      // where the tail model takes over
};

inline CstRadInfo cst_rad_info(double p, int N) {
  if (N < 2) throw std::invalid_argument("cst_rad: N must be >= 2");
  const double threshold = 2.0 * N / (N - 1.0);
  if (!(p > threshold))
    throw std::domain_error("cst_rad: the norm diverges for p <= " + std::to_string(threshold) +
                            " (N = " + std::to_string(N) + ")");
  const double gamma_exp = (N - 1.0) - 0.5 * p * (N - 1.0);  // integrand power at infinity
  const double mean_cos_p = std::tgamma(0.5 * (p + 1.0)) / (std::sqrt(kPi) * std::tgamma(0.5 * p + 1.0));
  const double cN = sphere_profile_envelope(N);
  auto tail = [&](double R) {
    // integral_R^inf (c r^{-(N-1)/2})^p <|cos|^p> r^{N-1} dr
    return std::pow(cN, p) * mean_cos_p * std::pow(R, gamma_exp + 1.0) / (-gamma_exp - 1.0);
  };
  auto f = [&](double r) { return std::pow(std::abs(sphere_profile(N, r)), p) * std::pow(r, N - 1.0); };

  double R0 = 64.0 * kPi;
  QuadratureResult main;
  for (;;) {
    std::vector<double> pts;
    for (int k = 0; k * 4.0 * kPi < R0; ++k) pts.push_back(k * 4.0 * kPi);
    pts.push_back(R0);
    main = integrate_segments(f, pts, 1e-11, 0.0, 20000);
    const double t = tail(R0);
    // the envelope model is good to O(1/R0) of the tail itself
    if (t * (4.0 / R0) < 2e-7 * (main.value + t) || R0 > 2.0e4) break;
    R0 *= 2.0;
  }
  const double t = tail(R0);
  const double norm_pow_p = sphere_surface_measure(N) * (main.value + t);
  CstRadInfo info;
  info.cutoff = R0;
  info.value = sphere_surface_measure(N) / std::pow(norm_pow_p, 2.0 / p);
  info.rel_error = (main.error_estimate + t * (4.0 / R0)) / (main.value + t) * (2.0 / p);
  return info;
}

inline double cst_rad(double p, int N) { return cst_rad_info(p, N).value; }

}  // namespace bihnls

#endif
