#ifndef BIHNLS_FFT_HPP
#define BIHNLS_FFT_HPP

// Unitary transform between the two lattice views, built on FFTW's bin-order
// c2c transform.
//
// The analysis pair used throughout the library is the continuum-normalized
//     u_hat(xi) = (2 pi)^{-N/2} integral u(x) e^{-i xi . x} dx,
//     u(x)      = (2 pi)^{-N/2} integral u_hat(xi) e^{+i xi . x} dxi,
// discretized by the trapezoidal rule on the lattice of grid.hpp:
//     u_hat[n] = (2 pi)^{-N/2} h^N      sum_m u[m]     e^{-i xi_n . x_m},
//     u[m]     = (2 pi)^{-N/2} (pi/L)^N sum_n u_hat[n] e^{+i xi_n . x_m}.
// Since xi_n . x_m = -pi k + 2 pi m k / M per axis (k = n - M/2), the kernel
// splits into an FFTW phase e^{-2 pi i m k / M} times a sign (-1)^k, so each
// direction is one FFTW execute plus an index permutation with sign flips.
// The composition is the exact identity up to rounding, and the weighted sums
//     sum |u|^2 h^N = sum |u_hat|^2 (pi/L)^N
// agree to machine precision (discrete Plancherel).
//
// Plans are created lazily with FFTW_ESTIMATE | FFTW_UNALIGNED (deterministic,
// alignment-agnostic) and cached behind a mutex; plan *execution* through
// fftw_execute_dft on distinct buffers is safe concurrently, so fields may be
// transformed from several threads at once.

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "bihnls/grid.hpp"

namespace bihnls {

using cvec = std::vector<std::complex<double>>;

namespace detail {

inline fftw_plan plan_for(const SpectralGrid& g, int sign, std::complex<double>* buf) {
  static std::mutex mu;
  static std::map<std::pair<std::pair<int, int>, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(std::make_pair(g.dim(), g.points_per_axis()), sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  int n[3] = {g.points_per_axis(), g.points_per_axis(), g.points_per_axis()};
  fftw_complex* fb = reinterpret_cast<fftw_complex*>(buf);
  fftw_plan p = fftw_plan_dft(g.dim(), n, fb, fb, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw std::runtime_error("fft: plan creation failed");
  cache.emplace(key, p);
  return p;
}

inline void run_plan(const SpectralGrid& g, int sign, std::complex<double>* buf) {
  fftw_plan p = plan_for(g, sign, buf);
  fftw_complex* fb = reinterpret_cast<fftw_complex*>(buf);
  fftw_execute_dft(p, fb, fb);
}

// Per-axis tables: natural index n <-> FFTW bin (n + M/2) mod M, and the sign
// (-1)^{n + M/2} carried by the half-box offset of the physical coordinates.
struct AxisMaps {
  std::vector<int> bin;
  std::vector<double> sgn;
  explicit AxisMaps(int M) : bin(M), sgn(M) {
    for (int n = 0; n < M; ++n) {
      bin[n] = (n + M / 2) % M;
      sgn[n] = ((n + M / 2) % 2 == 0) ? 1.0 : -1.0;
    }
  }
};

template <class Fn>
inline void for_each_bin(const SpectralGrid& g, Fn&& fn) {
  const int M = g.points_per_axis();
  static std::mutex mu;
  static std::map<int, AxisMaps> maps;
  const AxisMaps* ax;
  {
    std::lock_guard<std::mutex> lock(mu);
    ax = &maps.try_emplace(M, M).first->second;
  }
  const std::size_t total = g.size();
  const int dim = g.dim();
  if (dim == 1) {
    for (int n0 = 0; n0 < M; ++n0) fn(static_cast<std::size_t>(n0), static_cast<std::size_t>(ax->bin[n0]), ax->sgn[n0]);
  } else if (dim == 2) {
    std::size_t idx = 0;
    for (int n0 = 0; n0 < M; ++n0) {
      const std::size_t b0 = static_cast<std::size_t>(ax->bin[n0]) * M;
      const double s0 = ax->sgn[n0];
      for (int n1 = 0; n1 < M; ++n1, ++idx) fn(idx, b0 + ax->bin[n1], s0 * ax->sgn[n1]);
    }
  } else {
    std::size_t idx = 0;
    for (int n0 = 0; n0 < M; ++n0)
      for (int n1 = 0; n1 < M; ++n1) {
        const std::size_t b01 = (static_cast<std::size_t>(ax->bin[n0]) * M + ax->bin[n1]) * M;
        const double s01 = ax->sgn[n0] * ax->sgn[n1];
        for (int n2 = 0; n2 < M; ++n2, ++idx) fn(idx, b01 + ax->bin[n2], s01 * ax->sgn[n2]);
      }
  }
  (void)total;
}

inline double pow_n(double base, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

}  // namespace detail

// Physical samples -> frequency samples (natural frequency order).
// `work` is scratch of the same size; `four` may alias `phys`.
inline void fft_forward(const SpectralGrid& g, const cvec& phys, cvec& four, cvec& work) {
  const double two_pi = 6.28318530717958647692;
  const double scale = detail::pow_n(g.spacing() / std::sqrt(two_pi), g.dim());
  work.assign(phys.begin(), phys.end());
  detail::run_plan(g, FFTW_FORWARD, work.data());
  four.resize(g.size());
  detail::for_each_bin(g, [&](std::size_t n, std::size_t bin, double s) { four[n] = scale * s * work[bin]; });
}

// Frequency samples (natural order) -> physical samples.
inline void fft_inverse(const SpectralGrid& g, const cvec& four, cvec& phys, cvec& work) {
  const double two_pi = 6.28318530717958647692;
  const double scale = detail::pow_n(g.freq_spacing() / std::sqrt(two_pi), g.dim());
  work.resize(g.size());
  detail::for_each_bin(g, [&](std::size_t n, std::size_t bin, double s) { work[bin] = s * four[n]; });
  detail::run_plan(g, FFTW_BACKWARD, work.data());
  phys.resize(g.size());
  for (std::size_t i = 0; i < phys.size(); ++i) phys[i] = scale * work[i];
}

inline void fft_forward(const SpectralGrid& g, const cvec& phys, cvec& four) {
  cvec work;
  fft_forward(g, phys, four, work);
}

inline void fft_inverse(const SpectralGrid& g, const cvec& four, cvec& phys) {
  cvec work;
  fft_inverse(g, four, phys, work);
}

}  // namespace bihnls

#endif
