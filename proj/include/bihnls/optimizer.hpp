#ifndef BIHNLS_OPTIMIZER_HPP
#define BIHNLS_OPTIMIZER_HPP

// Projected-gradient minimization of the quotient q(u)/||u||_p^2 on the L^p
// sphere, its radially constrained variant, and the mass-constrained descent
// of the companion energy on the L^2 sphere.
//
// One quotient step, written on the frequency view at ||u||_p = 1:
//     w = |u|^{p-2} u,   grad = 2 (g u_hat - lambda w_hat),   lambda = q(u),
//     u_hat <- normalize( u_hat - t * grad / (g + (p-1) lambda) ),
// i.e. steepest descent in the metric of the diagonal operator g + sigma.
// The plain Euclidean direction stalls once the spectral gap is small: the
// symbol spans [gap, g_max], a condition number of order g_max/gap, and a
// step sized for the top of the spectrum makes no progress on the annulus
// where the minimizer lives.  Dividing by g + sigma equalizes the spectrum
// without moving stationary points (the metric is positive definite).  With
// preconditioning the natural first trial step is 1; without it the first
// trial is the curvature bound 1/(2 g_max).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bihnls/energy.hpp"
#include "bihnls/fft.hpp"
#include "bihnls/field.hpp"
#include "bihnls/grid.hpp"
#include "bihnls/spectral.hpp"
#include "bihnls/summation.hpp"
#include "bihnls/symbol.hpp"
#include "bihnls/trialfields.hpp"

namespace bihnls {

// NaN/overflow or a broken descent invariant; the message carries the tail of
// the iteration history.
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

enum class StepRule { backtracking, fixed };

struct MinimizeOptions {
  double tolerance = 1e-7;  // relative stationarity residual at which to stop
  int max_iterations = 4000;
  int restarts = 1;  // independent seeded starts; best quotient wins
  bool radial_constraint = false;
  std::uint64_t seed = 0x42D;
  StepRule step_rule = StepRule::backtracking;
  double fixed_step = 0.0;  // for StepRule::fixed; 0 means 1/(2 max g)
  double backtrack_shrink = 0.5;
  double sufficient_decrease = 1e-4;
  bool precondition = true;
  double init_annulus_s = 0.25;    // support exponent of the first iterate
  double init_cap_fraction = 0.3;  // cap admixture that breaks radial symmetry

  void validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("MinimizeOptions: tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("MinimizeOptions: maxIterations must be >= 1");
    if (restarts < 1) throw std::invalid_argument("MinimizeOptions: restarts must be >= 1");
    if (!(backtrack_shrink > 0.0) || !(backtrack_shrink < 1.0))
      throw std::invalid_argument("MinimizeOptions: shrink factor must lie in (0, 1)");
    if (!(sufficient_decrease > 0.0) || !(sufficient_decrease < 1.0))
      throw std::invalid_argument("MinimizeOptions: sufficient-decrease constant must lie in (0, 1)");
  }
};

struct GroundStateResult {
  explicit GroundStateResult(Field f) : field(std::move(f)) {}

  Field field;  // normalized, ||u||_p = 1
  double quotient = 0.0;
  int iterations = 0;
  double residual = 0.0;  // relative stationarity residual at exit
  bool converged = false;
  double restart_spread = 0.0;  // max - min quotient across restarts
  SymmetryReport symmetry;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

inline std::vector<double> symbol_table(const SpectralGrid& g, const SymbolParams& s) {
  std::vector<double> t(g.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = symbol_value_r2(s, g.freq_r2(i));
  return t;
}

struct IterSample {
  int iter;
  double value;
  double residual;
};

[[noreturn]] inline void throw_numerical(const char* who, const std::vector<IterSample>& trace) {
  std::string msg = std::string(who) + ": non-finite value during descent; recent iterations:";
  for (const auto& t : trace)
    msg += " [" + std::to_string(t.iter) + "] value " + std::to_string(t.value) + " residual " +
           std::to_string(t.residual) + ";";
  throw numerical_error(msg);
}

inline void push_trace(std::vector<IterSample>& trace, IterSample s) {
  if (trace.size() >= 8) trace.erase(trace.begin());
  trace.push_back(s);
}

// Re-weighted inner products over the frequency lattice.
inline double dot_re(const cvec& a, const cvec& b, double w) {
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i)
    s.add((a[i].real() * b[i].real() + a[i].imag() * b[i].imag()) * w);
  return s.value();
}

inline double norm2_sq(const cvec& a, double w) {
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(std::norm(a[i]) * w);
  return s.value();
}

// First iterate: the resolvent-weighted annulus profile (the constant-weight
// annulus trial field when a = 1), optionally with a cap-localized admixture
// so descent is free to leave the radial subspace.  Restarts keep the same
// envelope and scramble the phases.
inline cvec quotient_initial(const SpectralGrid& g, const SymbolParams& sp, const std::vector<double>& sym,
                             const MinimizeOptions& opts, int restart, std::mt19937_64& rng) {
  const double gap = sp.gap();
  const double center = sp.a > 0.0 ? std::sqrt(sp.a) : 0.0;
  const double tau = std::min(std::pow(gap, opts.init_annulus_s), 0.9 * std::max(center, 1.0));
  const double rt = std::sqrt(gap);
  const double peak = 1.0 / gap;
  cvec uh(g.size(), 0.0);
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < uh.size(); ++i) {
    const double r = std::sqrt(g.freq_r2(i));
    const bool on_support = center > 0.0 ? std::abs(r - center) <= tau : r <= 1.0 + tau;
    if (!on_support) continue;
    double v = 1.0 / sym[i];
    if (!opts.radial_constraint && opts.init_cap_fraction > 0.0 && center > 0.0 && r > 0.0) {
      const auto n = g.unravel(i);
      const double up = g.freq(n[g.dim() - 1]);
      if (std::abs(r - center) <= rt && 1.0 - up / r <= rt) v += opts.init_cap_fraction * peak;
    }
    uh[i] = v;
    ++nonzero;
  }
  if (nonzero == 0)
    throw resolution_error("minimize_quotient: initial annulus is empty on this grid; refine it");
  if (restart > 0) {
    if (opts.radial_constraint) {
      // random but exactly radial: one amplitude factor per lattice shell
      const auto idx = shell_index(g);
      std::vector<double> amp(idx->shells);
      for (auto& a : amp) a = 0.5 + uniform01(rng);
      for (std::size_t i = 0; i < uh.size(); ++i) uh[i] *= amp[idx->id[i]];
    } else {
      const double two_pi = 6.28318530717958647692;
      for (auto& v : uh)
        if (v != 0.0) {
          const double th = two_pi * uniform01(rng);
          v *= std::complex<double>(std::cos(th), std::sin(th));
        }
    }
  }
  return uh;
}

struct DescentOutcome {
  cvec u, uh;
  double value = 0.0;  // quotient at exit
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<std::string> warnings;
};

// Shared quotient engine.  `uh` is consumed as the initial iterate.
inline DescentOutcome descend_quotient(const SpectralGrid& g, double p, const std::vector<double>& sym,
                                       const MinimizeOptions& opts, cvec uh) {
  const double wf = pow_n(g.freq_spacing(), g.dim());
  const double g_max = *std::max_element(sym.begin(), sym.end());
  const double t0 = opts.step_rule == StepRule::fixed
                        ? (opts.fixed_step > 0.0 ? opts.fixed_step : 0.5 / g_max)
                        : (opts.precondition ? 1.0 : 0.5 / g_max);

  DescentOutcome out;
  std::vector<IterSample> trace;
  cvec u, w, wh, grad, sd, dir, tu, tuh, work, pv, pw, prev_uh, prev_sd, prev_dir;
  double prev_gs = 0.0;
  bool have_prev = false;

  // Projection of a frequency-side vector onto the constraint subspace that
  // settle() enforces: average over physical lattice shells.  Without it the
  // stopping residual keeps the normal gradient component, which does not
  // vanish at the constrained minimizer.
  auto project_radial = [&](cvec& vh) {
    fft_inverse(g, vh, pv, work);
    radialize_samples(g, pv, pw);
    fft_forward(g, pw, vh, work);
  };

  // normalize (and project) the iterate; refreshes u from uh or vice versa
  auto settle = [&](bool from_fourier) {
    if (from_fourier) fft_inverse(g, uh, u, work);
    if (opts.radial_constraint) {
      radialize_samples(g, u, w);  // w as scratch
      u.swap(w);
      fft_forward(g, u, uh, work);
    }
    const double np = lp_norm(g, u, p);
    if (!(np > 0.0) || !std::isfinite(np)) throw_numerical("minimize_quotient", trace);
    const double inv = 1.0 / np;
    for (auto& v : u) v *= inv;
    for (auto& v : uh) v *= inv;
  };

  settle(true);

  // Warm start by the stabilized fixed-point map of the stationarity system,
  //     u_hat <- gamma^theta (1/g) T(|u|^{p-2} u),   theta = (p-1)/(p-2),
  // which inverts the stiff diagonal exactly and contracts at a rate that
  // does not degrade with the gap, unlike any descent step.  The quotient is
  // not monotone here, so the phase ends before the certified loop begins;
  // gamma -> 1 at a solution and serves as the stopping monitor.  Under the
  // radial constraint the map is skipped: composing the pointwise division
  // with the shell projection is not the inverse of the projected operator,
  // and the iteration settles on a spurious fixed point.
  if (opts.step_rule == StepRule::backtracking && !opts.radial_constraint) {
    const double theta = (p - 1.0) / (p - 2.0);
    const int warm = std::min(400, opts.max_iterations);
    int settled = 0;
    for (int k = 0; k < warm; ++k) {
      w.resize(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = std::abs(u[i]);
        w[i] = a > 0.0 ? std::pow(a, p - 2.0) * u[i] : 0.0;
      }
      fft_forward(g, w, wh, work);
      KahanSum qn, qd;
      for (std::size_t i = 0; i < uh.size(); ++i) {
        qn.add(sym[i] * std::norm(uh[i]) * wf);
        qd.add((uh[i].real() * wh[i].real() + uh[i].imag() * wh[i].imag()) * wf);
      }
      if (!(qd.value() > 0.0) || !std::isfinite(qn.value())) break;
      const double gamma = qn.value() / qd.value();
      const double scale = std::pow(gamma, theta);
      if (!std::isfinite(scale)) break;
      for (std::size_t i = 0; i < uh.size(); ++i) uh[i] = scale * wh[i] / sym[i];
      fft_inverse(g, uh, u, work);
      if (std::abs(gamma - 1.0) < 1e-12 && ++settled >= 2) break;
    }
    settle(false);
  }

  double q = 0.0;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    out.iterations = iter;
    {
      KahanSum s;
      for (std::size_t i = 0; i < uh.size(); ++i) s.add(sym[i] * std::norm(uh[i]) * wf);
      q = s.value();
    }
    if (!std::isfinite(q)) throw_numerical("minimize_quotient", trace);

    // gradient of the quotient at ||u||_p = 1 (up to the constant factor 2)
    w.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double a = std::abs(u[i]);
      w[i] = a > 0.0 ? std::pow(a, p - 2.0) * u[i] : 0.0;
    }
    fft_forward(g, w, wh, work);
    grad.resize(uh.size());
    KahanSum den2;
    for (std::size_t i = 0; i < uh.size(); ++i) {
      grad[i] = sym[i] * uh[i] - q * wh[i];
      den2.add(sym[i] * sym[i] * std::norm(uh[i]) * wf);
    }
    if (opts.radial_constraint) project_radial(grad);
    KahanSum num2;
    for (const auto& v : grad) num2.add(std::norm(v) * wf);
    out.residual = std::sqrt(num2.value() / den2.value());
    push_trace(trace, {iter, q, out.residual});
    if (out.residual <= opts.tolerance) {
      out.converged = true;
      break;
    }

    sd.resize(grad.size());
    {
      const double sigma = (p - 1.0) * q;
      for (std::size_t i = 0; i < grad.size(); ++i) {
        const double pre = opts.precondition ? 1.0 / (sym[i] + sigma) : 1.0;
        sd[i] = -pre * grad[i];
      }
    }
    // the preconditioner mixes shells, so the direction needs its own
    // projection to stay tangent to the constraint
    if (opts.radial_constraint) project_radial(sd);
    const double gs = dot_re(grad, sd, wf);

    // conjugate mixing of successive preconditioned gradients; the positive
    // part of the Polak-Ribiere weight restarts the recursion whenever the
    // iterates leave the regime where conjugacy holds, and the slope check
    // falls back to the plain direction if the mix ever points uphill
    double slope = 2.0 * gs;
    bool mixed = false;
    if (opts.step_rule != StepRule::fixed && have_prev && prev_gs < 0.0) {
      KahanSum nu;
      for (std::size_t i = 0; i < grad.size(); ++i) {
        const std::complex<double> d = prev_sd[i] - sd[i];
        nu.add((grad[i].real() * d.real() + grad[i].imag() * d.imag()) * wf);
      }
      const double beta = nu.value() / (-prev_gs);
      if (std::isfinite(beta) && beta > 0.0) {
        dir.resize(sd.size());
        for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = sd[i] + beta * prev_dir[i];
        const double sl = 2.0 * dot_re(grad, dir, wf);
        if (sl < 0.0) {
          slope = sl;
          mixed = true;
        }
      }
    }
    if (!mixed) dir = sd;

    // Barzilai-Borwein initial step: inverse curvature along the latest
    // displacement, clamped, with overshoot vetted by the decrease test.
    // The soft modes near the symbol minimum make the fixed unit step crawl.
    double t_init = t0;
    if (opts.step_rule != StepRule::fixed) {
      if (have_prev) {
        KahanSum ss, sy;
        for (std::size_t i = 0; i < uh.size(); ++i) {
          const std::complex<double> s = uh[i] - prev_uh[i];
          const std::complex<double> y = prev_sd[i] - sd[i];
          ss.add(std::norm(s) * wf);
          sy.add((s.real() * y.real() + s.imag() * y.imag()) * wf);
        }
        if (sy.value() > 0.0 && std::isfinite(ss.value())) {
          const double bb = ss.value() / sy.value();
          if (std::isfinite(bb) && bb > 0.0) t_init = std::clamp(bb, 1e-2 * t0, 1e4 * t0);
        }
      }
      prev_uh = uh;
      prev_sd = sd;
      prev_dir = dir;
      have_prev = true;
    }

    // evaluates the quotient on the search ray, leaving the trial in tuh/tu
    auto eval_ray = [&](double step) {
      tuh.resize(uh.size());
      for (std::size_t i = 0; i < uh.size(); ++i) tuh[i] = uh[i] + step * dir[i];
      fft_inverse(g, tuh, tu, work);
      const double np = lp_norm(g, tu, p);
      KahanSum qs;
      for (std::size_t i = 0; i < tuh.size(); ++i) qs.add(sym[i] * std::norm(tuh[i]) * wf);
      return qs.value() / (np * np);
    };

    double t = t_init;
    bool accepted = false;
    while (t > 1e-18 * t0) {
      double qt = eval_ray(t);
      if (!std::isfinite(qt)) throw_numerical("minimize_quotient", trace);
      if (opts.step_rule == StepRule::fixed || qt <= q + opts.sufficient_decrease * t * slope) {
        // one parabolic refinement before committing: the mixed directions
        // only retain conjugacy when the ray minimum is located well, and
        // the first acceptable point can sit far up the valley wall
        if (opts.step_rule == StepRule::backtracking) {
          const double curv = 2.0 * (qt - q - slope * t);
          if (curv > 0.0 && std::isfinite(curv)) {
            const double ts = std::clamp(-slope * t * t / curv, 0.125 * t, 8.0 * t);
            if (std::abs(ts - t) > 0.05 * t) {
              rv.swap(tuh);
              rw.swap(tu);
              const double qr = eval_ray(ts);
              if (std::isfinite(qr) && qr < qt &&
                  qr <= q + opts.sufficient_decrease * ts * slope) {
                qt = qr;
                t = ts;
              } else {
                rv.swap(tuh);
                rw.swap(tu);
              }
            }
          }
        }
        if (opts.step_rule == StepRule::fixed && qt > q + 1e-12 * std::abs(q)) {
          out.warnings.push_back("fixed step increased the quotient at iteration " +
                                 std::to_string(iter));
        } else if (opts.step_rule != StepRule::fixed && qt > q) {
          throw numerical_error("minimize_quotient: backtracking accepted an increase at iteration " +
                                std::to_string(iter));
        }
        u.swap(tu);
        uh.swap(tuh);
        settle(false);
        accepted = true;
        break;
      }
      t *= opts.backtrack_shrink;
    }
    if (!accepted) {
      out.warnings.push_back("line search stalled at iteration " + std::to_string(iter) +
                             " with residual " + std::to_string(out.residual));
      break;
    }
  }
  if (!out.converged && out.iterations + 1 >= opts.max_iterations)
    out.warnings.push_back("iteration budget exhausted at residual " + std::to_string(out.residual));
  out.value = q;
  out.u = std::move(u);
  out.uh = std::move(uh);
  return out;
}

}  // namespace detail

inline GroundStateResult minimize_quotient(const SymbolParams& sp, double p, const SpectralGrid& grid,
                                           const MinimizeOptions& opts) {
  ExponentSet exps(grid.dim(), p);
  (void)exps;
  opts.validate();
  const auto sym = detail::symbol_table(grid, sp);

  std::vector<detail::DescentOutcome> runs;
  runs.reserve(opts.restarts);
  for (int r = 0; r < opts.restarts; ++r) {
    std::mt19937_64 rng(opts.seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(r));
    cvec uh0 = detail::quotient_initial(grid, sp, sym, opts, r, rng);
    runs.push_back(detail::descend_quotient(grid, p, sym, opts, std::move(uh0)));
  }

  // smallest quotient wins; ties within tolerance go to the smaller residual
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].value < runs[best].value) best = i;
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (std::abs(runs[i].value - runs[best].value) <=
            opts.tolerance * std::max(1.0, std::abs(runs[best].value)) &&
        runs[i].residual < runs[best].residual)
      best = i;

  double lo = runs[0].value, hi = runs[0].value;
  for (const auto& r : runs) {
    lo = std::min(lo, r.value);
    hi = std::max(hi, r.value);
  }

  auto& win = runs[best];
  auto gp = std::make_shared<const SpectralGrid>(grid);
  GroundStateResult res{Field::from_physical(gp, std::move(win.u))};
  res.quotient = win.value;
  res.iterations = win.iterations;
  res.residual = win.residual;
  res.converged = win.converged;
  res.restart_spread = hi - lo;
  res.seed = opts.seed;
  res.warnings = std::move(win.warnings);

  const double check = quotient(res.field, sp, p);
  if (std::abs(check - res.quotient) > 1e-10 * std::max(1.0, std::abs(check)))
    res.warnings.push_back("independent quotient recomputation drifted by " +
                           std::to_string(check - res.quotient));
  res.quotient = check;
  res.symmetry = symmetry_report(res.field);
  if (opts.radial_constraint && res.symmetry.nonradiality_index >= 1e-8)
    res.warnings.push_back("radial constraint left nonradiality " +
                           std::to_string(res.symmetry.nonradiality_index));
  return res;
}

inline GroundStateResult minimize_quotient_radial(const SymbolParams& sp, double p,
                                                  const SpectralGrid& grid, MinimizeOptions opts) {
  opts.radial_constraint = true;
  return minimize_quotient(sp, p, grid, opts);
}

// ── stationarity diagnostics ──

// Relative Euler-Lagrange residual || g u_hat - lambda w_hat || / || g u_hat ||
// of the normalized representative u / ||u||_p, with lambda the quotient.
inline double el_residual(const Field& f, const SymbolParams& sp, double p) {
  const SpectralGrid& g = f.grid();
  const double np = lp_norm(f, p);
  if (!(np > 0.0)) throw std::domain_error("el_residual: zero field");
  const double wf = detail::pow_n(g.freq_spacing(), g.dim());
  const double inv = 1.0 / np;
  cvec u(f.physical()), uh(f.fourier());
  for (auto& v : u) v *= inv;
  for (auto& v : uh) v *= inv;
  KahanSum qs;
  const auto sym = detail::symbol_table(g, sp);
  for (std::size_t i = 0; i < uh.size(); ++i) qs.add(sym[i] * std::norm(uh[i]) * wf);
  const double lambda = qs.value();
  cvec w(u.size()), wh, work;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    w[i] = a > 0.0 ? std::pow(a, p - 2.0) * u[i] : 0.0;
  }
  fft_forward(g, w, wh, work);
  KahanSum num2, den2;
  for (std::size_t i = 0; i < uh.size(); ++i) {
    num2.add(std::norm(sym[i] * uh[i] - lambda * wh[i]) * wf);
    den2.add(std::norm(sym[i] * uh[i]) * wf);
  }
  return std::sqrt(num2.value() / den2.value());
}

// d/dt of quotient(u + t v) at t = 0, for finite-difference validation.
inline double quotient_directional_derivative(const Field& u, const SymbolParams& sp, double p,
                                              const Field& v) {
  require_same_grid(u, v, "quotient_directional_derivative");
  const SpectralGrid& g = u.grid();
  const double np = lp_norm(u, p);
  if (!(np > 0.0)) throw std::domain_error("quotient_directional_derivative: zero field");
  const double wf = detail::pow_n(g.freq_spacing(), g.dim());
  const double wp = detail::pow_n(g.spacing(), g.dim());
  const double q = quadratic_form(u, sp);
  KahanSum a, b;
  const cvec& uh = u.fourier();
  const cvec& vh = v.fourier();
  for (std::size_t i = 0; i < uh.size(); ++i) {
    const double s = symbol_value_r2(sp, g.freq_r2(i));
    a.add(s * (uh[i].real() * vh[i].real() + uh[i].imag() * vh[i].imag()) * wf);
  }
  const cvec& up = u.physical();
  const cvec& vp = v.physical();
  for (std::size_t i = 0; i < up.size(); ++i) {
    const double m = std::abs(up[i]);
    if (m == 0.0) continue;
    const std::complex<double> w = std::pow(m, p - 2.0) * up[i];
    b.add((w.real() * vp[i].real() + w.imag() * vp[i].imag()) * wp);
  }
  return 2.0 * a.value() / (np * np) - 2.0 * q * std::pow(np, -2.0 - p) * b.value();
}

// Global phase that minimizes the imaginary part in least squares, and how
// large the residual imaginary part is relative to the sup norm.  Minimizers
// should be real up to such a phase.
struct PhaseAlignment {
  double theta = 0.0;
  double max_imag_ratio = 0.0;
};

inline PhaseAlignment phase_alignment(const Field& f) {
  // sum Im(e^{i theta} u)^2 = (||u||^2 - Re e^{2 i theta} sum u^2) / 2
  std::complex<double> ssq(0.0, 0.0);
  double amax = 0.0;
  for (const auto& v : f.physical()) {
    ssq += v * v;
    amax = std::max(amax, std::abs(v));
  }
  PhaseAlignment pa;
  pa.theta = -0.5 * std::arg(ssq);
  if (!(amax > 0.0)) return pa;
  const std::complex<double> rot(std::cos(pa.theta), std::sin(pa.theta));
  double imax = 0.0;
  for (const auto& v : f.physical()) imax = std::max(imax, std::abs((rot * v).imag()));
  pa.max_imag_ratio = imax / amax;
  return pa;
}

// ── mass-constrained minimization ──
//
// Minimizes E~(u) = sum (r^4 - 2 r^2) |u_hat|^2 - (2/p) ||u||_p^p subject to
// ||u||_2^2 = m, by gradient descent projected onto the mass sphere.  A
// minimizer satisfies (r^4 - 2 r^2 - lambda) u_hat = w_hat, which is the
// ground-state equation with symbol parameters (1, 1 + eps) for
// eps = -1 - lambda; that multiplier is the quantity of interest.

struct MassResult {
  explicit MassResult(Field f) : field(std::move(f)) {}

  Field field;  // ||u||_2^2 = m
  double mass = 0.0;
  double energy_value = 0.0;
  double multiplier = 0.0;    // lambda(m)
  double epsilon_of_m = 0.0;  // -1 - lambda(m)
  double lp_power = 0.0;      // ||u||_p^p at the minimizer
  int iterations = 0;
  double residual = 0.0;  // relative tangential gradient norm at exit
  bool converged = false;
  SymmetryReport symmetry;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

// Upper end of the mass-subcritical window in which minimizers are known to
// exist: p < max(4, 2(N+5)/(N+1)) and p < 2 + 8/N.
inline double mass_window_sup(int N) {
  return std::min(std::max(4.0, 2.0 * (N + 5.0) / (N + 1.0)), 2.0 + 8.0 / N);
}

inline MassResult minimize_mass_constrained(double m, double p, const SpectralGrid& grid,
                                            const MinimizeOptions& opts) {
  if (!(m > 0.0)) throw std::invalid_argument("minimize_mass_constrained: mass must be positive");
  ExponentSet exps(grid.dim(), p);
  (void)exps;
  opts.validate();
  const int N = grid.dim();

  std::vector<std::string> warnings;
  if (p >= mass_window_sup(N))
    warnings.push_back("p = " + std::to_string(p) + " is at or above the mass-subcritical window sup " +
                       std::to_string(mass_window_sup(N)) + " for N = " + std::to_string(N) +
                       "; minimizers may not exist");

  const double wf = detail::pow_n(grid.freq_spacing(), N);
  std::vector<double> ak(grid.size());
  for (std::size_t i = 0; i < ak.size(); ++i) {
    const double r2 = grid.freq_r2(i);
    ak[i] = r2 * r2 - 2.0 * r2;  // = (r^2-1)^2 - 1, bounded below by -1
  }

  // Gaussian bump of the frequency annulus, cap admixture as for the quotient
  std::mt19937_64 rng(opts.seed);
  cvec uh(grid.size(), 0.0);
  const double width = 0.25;
  for (std::size_t i = 0; i < uh.size(); ++i) {
    const double r = std::sqrt(grid.freq_r2(i));
    const double t = (r - 1.0) / width;
    double v = std::exp(-0.5 * t * t);
    if (opts.init_cap_fraction > 0.0 && r > 0.0) {
      const auto n = grid.unravel(i);
      if (1.0 - grid.freq(n[N - 1]) / r <= 0.25 && std::abs(r - 1.0) <= 0.25)
        v += opts.init_cap_fraction;
    }
    uh[i] = v;
  }

  std::vector<detail::IterSample> trace;
  cvec u, w, wh, grad, gt, dir, tuh, tu, work;
  auto renorm = [&](cvec& vh) {
    const double nn = std::sqrt(detail::norm2_sq(vh, wf));
    if (!(nn > 0.0) || !std::isfinite(nn)) detail::throw_numerical("minimize_mass_constrained", trace);
    const double sc = std::sqrt(m) / nn;
    for (auto& v : vh) v *= sc;
  };
  renorm(uh);
  fft_inverse(grid, uh, u, work);

  auto energy_at = [&](const cvec& vh, const cvec& v) {
    KahanSum s;
    for (std::size_t i = 0; i < vh.size(); ++i) s.add(ak[i] * std::norm(vh[i]) * wf);
    return s.value() - 2.0 / p * lp_power_sum(grid, v, p);
  };

  MassResult res{Field::from_physical(grid, u)};  // placeholder field, rebuilt at exit
  res.mass = m;
  res.seed = opts.seed;
  res.warnings = std::move(warnings);

  double energy = energy_at(uh, u);
  double lambda = 0.0;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    res.iterations = iter;
    if (!std::isfinite(energy)) detail::throw_numerical("minimize_mass_constrained", trace);

    w.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double a = std::abs(u[i]);
      w[i] = a > 0.0 ? std::pow(a, p - 2.0) * u[i] : 0.0;
    }
    fft_forward(grid, w, wh, work);
    grad.resize(uh.size());
    for (std::size_t i = 0; i < uh.size(); ++i) grad[i] = 2.0 * (ak[i] * uh[i] - wh[i]);
    lambda = 0.5 * detail::dot_re(grad, uh, wf) / m;
    gt.resize(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) gt[i] = grad[i] - 2.0 * lambda * uh[i];

    const double gnorm = std::sqrt(detail::norm2_sq(grad, wf));
    const double tnorm = std::sqrt(detail::norm2_sq(gt, wf));
    res.residual = gnorm > 0.0 ? tnorm / gnorm : 0.0;
    detail::push_trace(trace, {iter, energy, res.residual});
    if (res.residual <= opts.tolerance) {
      res.converged = true;
      break;
    }

    const double sigma = std::max(2.0, 1.0 + 2.0 * std::abs(lambda));
    dir.resize(gt.size());
    for (std::size_t i = 0; i < gt.size(); ++i)
      dir[i] = -(opts.precondition ? 1.0 / (ak[i] + sigma) : 1.0) * gt[i];
    const double along = detail::dot_re(dir, uh, wf) / m;  // re-project into the tangent space
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] -= along * uh[i];
    const double slope = detail::dot_re(grad, dir, wf);
    if (!(slope < 0.0)) {
      res.warnings.push_back("descent direction degenerated at iteration " + std::to_string(iter));
      break;
    }

    const double t0 = opts.step_rule == StepRule::fixed && opts.fixed_step > 0.0 ? opts.fixed_step : 1.0;
    double t = t0;
    bool accepted = false;
    while (t > 1e-18 * t0) {
      tuh.resize(uh.size());
      for (std::size_t i = 0; i < uh.size(); ++i) tuh[i] = uh[i] + t * dir[i];
      renorm(tuh);
      fft_inverse(grid, tuh, tu, work);
      const double et = energy_at(tuh, tu);
      if (!std::isfinite(et)) detail::throw_numerical("minimize_mass_constrained", trace);
      if (opts.step_rule == StepRule::fixed || et <= energy + opts.sufficient_decrease * t * slope) {
        uh.swap(tuh);
        u.swap(tu);
        energy = et;
        accepted = true;
        break;
      }
      t *= opts.backtrack_shrink;
    }
    if (!accepted) {
      res.warnings.push_back("line search stalled at iteration " + std::to_string(iter) +
                             " with residual " + std::to_string(res.residual));
      break;
    }
  }
  if (!res.converged && res.iterations + 1 >= opts.max_iterations)
    res.warnings.push_back("iteration budget exhausted at residual " + std::to_string(res.residual));

  res.field = Field::from_physical(grid, std::move(u));
  res.energy_value = energy;
  res.multiplier = lambda;
  res.epsilon_of_m = -1.0 - lambda;
  res.lp_power = lp_power_sum(grid, res.field.physical(), p);
  res.symmetry = symmetry_report(res.field);
  if (!(res.epsilon_of_m > 0.0))
    res.warnings.push_back("multiplier eps(m) = " + std::to_string(res.epsilon_of_m) +
                           " is not positive; outside the ground-state regime");
  else if (grid.shells_across(std::sqrt(res.epsilon_of_m)) < 4.0)
    res.warnings.push_back("effective gap eps(m) = " + std::to_string(res.epsilon_of_m) +
                           " leaves fewer than 4 lattice shells across its annulus; " +
                           "the minimizer is under-resolved on this grid");
  return res;
}

}  // namespace bihnls

#endif
