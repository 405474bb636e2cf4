#ifndef BIHNLS_QUADRATURE_HPP
#define BIHNLS_QUADRATURE_HPP

// Globally adaptive Gauss-Kronrod 15(7) quadrature.  Segments live in a
// priority queue keyed by their error estimate |K15 - G7|; the worst one is
// bisected until the summed estimate meets the tolerance or the interval
// budget runs out.  Callers pass explicit breakpoints when they know where
// the integrand is sharp (the resolvent peak at r = 1, Bessel oscillation
// blocks), which keeps the subdivision honest and cheap.

#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <vector>

#include "bihnls/summation.hpp"

namespace bihnls {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss (positive abscissae).
inline constexpr double kGK15X[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr double kGK15WK[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679,  0.1903505780647854,  0.2044329400752989, 0.2094821410847278};
inline constexpr double kGK15WG[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

template <class F>
inline void gk15(F&& f, double a, double b, double& val, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kGK15X[i]);
    fv[14 - i] = f(c + h * kGK15X[i]);
  }
  fv[7] = f(c);
  double k = kGK15WK[7] * fv[7];
  double g = kGK15WG[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    k += kGK15WK[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) g += kGK15WG[i / 2] * (fv[i] + fv[14 - i]);
  }
  val = k * h;
  err = std::abs((k - g) * h);
}

struct Segment {
  double a, b, val, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

}  // namespace detail

template <class F>
QuadratureResult integrate_segments(F&& f, const std::vector<double>& breakpoints,
                                    double rel_tol = 1e-10, double abs_tol = 0.0,
                                    int max_intervals = 4000) {
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate_segments: need >= 2 breakpoints");
  std::priority_queue<detail::Segment> q;
  int n = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    detail::Segment s{breakpoints[i], breakpoints[i + 1], 0.0, 0.0};
    if (!(s.b > s.a)) throw std::invalid_argument("integrate_segments: breakpoints must increase");
    detail::gk15(f, s.a, s.b, s.val, s.err);
    q.push(s);
    ++n;
  }
  double value = 0.0, error = 0.0;
  auto recompute = [&]() {
    std::priority_queue<detail::Segment> copy = q;
    KahanSum v, e;
    while (!copy.empty()) {
      v.add(copy.top().val);
      e.add(copy.top().err);
      copy.pop();
    }
    value = v.value();
    error = e.value();
  };
  recompute();
  while (n < max_intervals) {
    if (error <= std::max(abs_tol, rel_tol * std::abs(value))) break;
    detail::Segment worst = q.top();
    q.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    detail::Segment left{worst.a, mid, 0.0, 0.0}, right{mid, worst.b, 0.0, 0.0};
    detail::gk15(f, left.a, left.b, left.val, left.err);
    detail::gk15(f, right.a, right.b, right.val, right.err);
    value += left.val + right.val - worst.val;
    error += left.err + right.err - worst.err;
    q.push(left);
    q.push(right);
    ++n;
    if (n % 64 == 0) recompute();  // shed accumulated cancellation
  }
  recompute();
  QuadratureResult r;
  r.value = value;
  r.error_estimate = error;
  r.intervals = n;
  return r;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 0.0,
                           int max_intervals = 4000) {
  return integrate_segments(std::forward<F>(f), {a, b}, rel_tol, abs_tol, max_intervals);
}

}  // namespace bihnls

#endif
