#ifndef BIHNLS_GRID_HPP
#define BIHNLS_GRID_HPP

// Periodic sampling lattice shared by every field in the library.
//
// Physical space is the box [-L, L)^N sampled at M points per axis,
//     x_m = -L + m h,          h = 2L / M,        m = 0 .. M-1,
// and the frequency lattice is
//     xi_n = (n - M/2) pi / L,  dxi = pi / L,      n = 0 .. M-1,
// i.e. frequencies run over [-pi M / (2L), pi M / (2L)) in natural (ascending)
// order.  With these conventions the trapezoidal quadratures
//     sum_m |u_m|^2 h^N  and  sum_n |u_hat_n|^2 dxi^N
// agree exactly (discrete Plancherel), see fft.hpp.
//
// The constructor enforces the resolution floor used throughout: M even and
// at least 16, and a Nyquist frequency pi M / (2L) of at least 4, so the
// quartic growth of the dispersion symbol is always represented on the grid.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bihnls {

// Thrown when a requested feature (an annulus of width ~ sqrt(eps), say)
// cannot be represented on the lattice; the message names the extents that
// would suffice.
struct resolution_error : std::runtime_error {
  explicit resolution_error(const std::string& what) : std::runtime_error(what) {}
};

class SpectralGrid {
 public:
  SpectralGrid(int dim, double half_width, int points_per_axis)
      : dim_(dim), half_width_(half_width), points_(points_per_axis) {
    if (dim < 1 || dim > 3)
      throw std::invalid_argument("SpectralGrid: dim must be 1, 2 or 3, got " + std::to_string(dim));
    if (!(half_width > 0.0))
      throw std::invalid_argument("SpectralGrid: half width must be positive");
    if (points_ < 16 || points_ % 2 != 0)
      throw std::invalid_argument("SpectralGrid: points per axis must be even and >= 16, got " +
                                  std::to_string(points_));
    if (nyquist() < 4.0)
      throw std::invalid_argument("SpectralGrid: Nyquist frequency " + std::to_string(nyquist()) +
                                  " < 4; increase points per axis or shrink the box");
  }

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  int points_per_axis() const { return points_; }

  double spacing() const { return 2.0 * half_width_ / points_; }          // h
  double freq_spacing() const { return 3.14159265358979323846 / half_width_; }  // dxi
  double nyquist() const { return freq_spacing() * (points_ / 2); }

  std::size_t size() const {
    std::size_t s = 1;
    for (int d = 0; d < dim_; ++d) s *= static_cast<std::size_t>(points_);
    return s;
  }

  double coord(int m) const { return -half_width_ + m * spacing(); }
  double freq(int n) const { return (n - points_ / 2) * freq_spacing(); }

  // Row-major decomposition of a linear index (axis 0 slowest).
  std::array<int, 3> unravel(std::size_t idx) const {
    std::array<int, 3> m{0, 0, 0};
    for (int d = dim_ - 1; d >= 0; --d) {
      m[d] = static_cast<int>(idx % points_);
      idx /= points_;
    }
    return m;
  }

  // Squared frequency radius |xi|^2 for a linear index without sqrt.
  double freq_r2(std::size_t idx) const {
    const auto n = unravel(idx);
    double r2 = 0.0;
    for (int d = 0; d < dim_; ++d) {
      const double xi = freq(n[d]);
      r2 += xi * xi;
    }
    return r2;
  }

  // Lattice shells across a frequency band of width 2w centered on |xi| = 1.
  double shells_across(double w) const { return 2.0 * w / freq_spacing(); }

  bool same_extents(const SpectralGrid& o) const {
    return dim_ == o.dim_ && half_width_ == o.half_width_ && points_ == o.points_;
  }

 private:
  int dim_;
  double half_width_;
  int points_;
};

// Default extents as a function of the spectral gap eps.  The box grows like
// eps^{-1/2} so that both the concentration sets in physical space and the
// annulus ||xi| - 1| <= sqrt(eps) stay resolved: the frequency spacing pi/L
// must place at least `min_shells` lattice shells across the annulus, and the
// point count then follows from the Nyquist floor.  Axis counts are rounded up
// to even 5-smooth numbers so the transforms stay fast.
struct GridPolicy {
  double min_half_width = 20.0;
  double half_width_factor = 8.0;   // L >= factor / sqrt(eps)
  double min_shells = 8.0;          // across the width-2 sqrt(eps) annulus
  double min_nyquist = 4.0;
  int min_points = 16;
  int max_points = 1024;

  static bool smooth5_even(int n) {
    if (n % 2 != 0) return false;
    for (int f : {2, 3, 5})
      while (n % f == 0) n /= f;
    return n == 1;
  }

  SpectralGrid realize(int dim, double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("GridPolicy: eps must be positive");
    const double pi = 3.14159265358979323846;
    const double rt = std::sqrt(eps);
    double half = min_half_width;
    if (half_width_factor / rt > half) half = half_width_factor / rt;
    if (min_shells * pi / (2.0 * rt) > half) half = min_shells * pi / (2.0 * rt);
    int pts = min_points;
    const double need = 2.0 * min_nyquist * half / pi;
    while (pts < need || !smooth5_even(pts)) ++pts;
    if (pts > max_points)
      throw resolution_error("GridPolicy: eps = " + std::to_string(eps) + " needs half width " +
                             std::to_string(half) + " and at least " + std::to_string(pts) +
                             " points per axis, above the configured cap of " +
                             std::to_string(max_points));
    return SpectralGrid(dim, half, pts);
  }
};

}  // namespace bihnls

#endif
