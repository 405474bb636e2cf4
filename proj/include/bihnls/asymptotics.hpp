#ifndef BIHNLS_ASYMPTOTICS_HPP
#define BIHNLS_ASYMPTOTICS_HPP

// Sweep campaigns over the spectral gap, log-log exponent extraction against
// the predicted rates, the resolvent-peak limit checker, and the norm
// interpolation cross-checks used to sanity-test minimizers.
//
// A sweep runs the four quotient estimates (full minimum, radial minimum,
// cap trial, annulus trial) on a ladder of gaps and writes one CSV row per
// gap.  Failures are recorded in the row's flags column, never dropped; the
// sweep as a whole fails only if every point does.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bihnls/energy.hpp"
#include "bihnls/field.hpp"
#include "bihnls/grid.hpp"
#include "bihnls/optimizer.hpp"
#include "bihnls/symbol.hpp"
#include "bihnls/trialfields.hpp"

namespace bihnls {

// ── sweep records ──

namespace sweep_col {
constexpr unsigned r = 1;
constexpr unsigned r_rad = 2;
constexpr unsigned knapp = 4;
constexpr unsigned annulus = 8;
constexpr unsigned all = 15;
}  // namespace sweep_col

struct SweepRecord {
  double epsilon = 0.0;
  double p = 0.0;
  int N = 0;
  double r_estimate = std::numeric_limits<double>::quiet_NaN();
  double r_radial = std::numeric_limits<double>::quiet_NaN();
  double knapp_upper = std::numeric_limits<double>::quiet_NaN();
  double annulus_upper = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;      // summed over the minimizer runs of the row
  double residual = 0.0;   // worst optimizer residual of the row
  std::string flags;       // ';'-separated notes: partial, failed:...
  // not serialized: grid extents and, on request, the minimizer itself
  double half_width = 0.0;
  int points = 0;
  std::shared_ptr<const Field> minimizer;
  std::shared_ptr<const Field> radial_minimizer;

  bool failed() const { return flags.rfind("failed", 0) == 0 || flags.find(";failed") != std::string::npos; }
};

struct SweepOptions {
  MinimizeOptions minimize;
  double annulus_s = 0.1;
  unsigned columns = sweep_col::all;
  int jobs = 1;
  bool keep_fields = false;  // retain minimizer fields on the records
};

inline std::vector<double> default_epsilon_ladder() {
  return {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3};
}

namespace detail {

inline void sweep_point(SweepRecord& rec, const GridPolicy& policy, const SweepOptions& opts,
                        std::size_t index) {
  auto note = [&rec](const std::string& s) {
    if (!rec.flags.empty()) rec.flags += ';';
    rec.flags += s;
  };
  try {
    const SpectralGrid grid = policy.realize(rec.N, rec.epsilon);
    rec.half_width = grid.half_width();
    rec.points = grid.points_per_axis();
    const SymbolParams sp = SymbolParams::normalized(rec.epsilon);
    if (opts.columns & sweep_col::knapp)
      rec.knapp_upper = quotient(knapp_field(grid, {rec.epsilon}), sp, rec.p);
    if (opts.columns & sweep_col::annulus)
      rec.annulus_upper = quotient(annulus_field(grid, {rec.epsilon, opts.annulus_s}), sp, rec.p);
    MinimizeOptions mo = opts.minimize;
    mo.seed = opts.minimize.seed + 0x51ED5EEDull * static_cast<std::uint64_t>(index);
    if (opts.columns & sweep_col::r) {
      GroundStateResult res = minimize_quotient(sp, rec.p, grid, mo);
      rec.r_estimate = res.quotient;
      rec.iterations += res.iterations;
      rec.residual = std::max(rec.residual, res.residual);
      if (!res.converged) note("partial");
      if (opts.keep_fields) rec.minimizer = std::make_shared<Field>(std::move(res.field));
    }
    if (opts.columns & sweep_col::r_rad) {
      GroundStateResult res = minimize_quotient_radial(sp, rec.p, grid, mo);
      rec.r_radial = res.quotient;
      rec.iterations += res.iterations;
      rec.residual = std::max(rec.residual, res.residual);
      if (!res.converged) note("partial-radial");
      if (opts.keep_fields) rec.radial_minimizer = std::make_shared<Field>(std::move(res.field));
    }
  } catch (const std::exception& e) {
    std::string what = e.what();
    for (auto& c : what)
      if (c == ',' || c == '\n' || c == '\r' || c == '"' || c == ';') c = ' ';
    note("failed: " + what);
  }
}

}  // namespace detail

inline std::vector<SweepRecord> run_sweep(const std::vector<double>& epsilons, double p, int N,
                                          const GridPolicy& policy, const SweepOptions& opts) {
  if (epsilons.empty()) throw std::invalid_argument("run_sweep: empty gap ladder");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || !(epsilons[i] < 1.0))
      throw std::invalid_argument("run_sweep: gaps must lie in (0, 1)");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw std::invalid_argument("run_sweep: gap ladder must be strictly decreasing");
  }
  ExponentSet exps(N, p);
  (void)exps;

  std::vector<SweepRecord> recs(epsilons.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].epsilon = epsilons[i];
    recs[i].p = p;
    recs[i].N = N;
  }

  const int workers = std::max(1, std::min<int>(opts.jobs, static_cast<int>(recs.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < recs.size(); ++i) detail::sweep_point(recs[i], policy, opts, i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= recs.size()) return;
          detail::sweep_point(recs[i], policy, opts, i);
        }
      });
    for (auto& th : pool) th.join();
  }

  bool any_ok = false;
  for (const auto& r : recs)
    if (!r.failed()) any_ok = true;
  if (!any_ok) throw std::runtime_error("run_sweep: every point failed; first flag: " + recs[0].flags);
  return recs;
}

// ── CSV serialization ──

namespace detail {

inline std::string csv_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline const char* sweep_csv_header() {
  return "epsilon,p,N,r,r_rad,knapp_upper,annulus_upper,iters,residual,flags";
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& recs) {
  os << sweep_csv_header() << "\r\n";
  for (const auto& r : recs) {
    os << detail::csv_double(r.epsilon) << ',' << detail::csv_double(r.p) << ',' << r.N << ','
       << detail::csv_double(r.r_estimate) << ',' << detail::csv_double(r.r_radial) << ','
       << detail::csv_double(r.knapp_upper) << ',' << detail::csv_double(r.annulus_upper) << ','
       << r.iterations << ',' << detail::csv_double(r.residual) << ',' << detail::csv_quote(r.flags)
       << "\r\n";
  }
}

inline std::vector<SweepRecord> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("sweep CSV: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != sweep_csv_header())
    throw std::runtime_error("sweep CSV: unexpected header '" + line + "'");
  std::vector<SweepRecord> recs;
  auto num = [](const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::runtime_error("sweep CSV: malformed number '" + s + "'");
    return v;
  };
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::csv_split(line);
    if (f.size() != 10)
      throw std::runtime_error("sweep CSV: expected 10 fields, got " + std::to_string(f.size()));
    SweepRecord r;
    r.epsilon = num(f[0]);
    r.p = num(f[1]);
    r.N = static_cast<int>(num(f[2]));
    r.r_estimate = num(f[3]);
    r.r_radial = num(f[4]);
    r.knapp_upper = num(f[5]);
    r.annulus_upper = num(f[6]);
    r.iterations = static_cast<int>(num(f[7]));
    r.residual = num(f[8]);
    r.flags = f[9];
    recs.push_back(std::move(r));
  }
  return recs;
}

// ── exponent fits ──

enum class FitColumn { r_estimate, r_radial, knapp_upper, annulus_upper };

inline const char* to_string(FitColumn c) {
  switch (c) {
    case FitColumn::r_estimate: return "r";
    case FitColumn::r_radial: return "r_rad";
    case FitColumn::knapp_upper: return "knapp_upper";
    default: return "annulus_upper";
  }
}

struct FitReport {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
  int points_used = 0;
  bool dropped_largest = false;
  double theory_slope = std::numeric_limits<double>::quiet_NaN();
  // for the radial column below its threshold the prediction is a band
  bool has_band = false;
  double band_low = 0.0;
  double band_high = 0.0;
  double discrepancy = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct OlsOut {
  double slope, intercept, r2, stderr_slope;
};

inline OlsOut ols(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  OlsOut o{};
  o.slope = sxy / sxx;
  o.intercept = my - o.slope * mx;
  double ssres = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (o.intercept + o.slope * x[i]);
    ssres += e * e;
  }
  o.r2 = syy > 0.0 ? 1.0 - ssres / syy : 1.0;
  o.stderr_slope = n > 2 ? std::sqrt(ssres / (n - 2.0) / sxx) : 0.0;
  return o;
}

}  // namespace detail

inline double fit_column_value(const SweepRecord& r, FitColumn c) {
  switch (c) {
    case FitColumn::r_estimate: return r.r_estimate;
    case FitColumn::r_radial: return r.r_radial;
    case FitColumn::knapp_upper: return r.knapp_upper;
    default: return r.annulus_upper;
  }
}

inline FitReport fit_exponent(const std::vector<SweepRecord>& recs, FitColumn column) {
  std::vector<std::pair<double, double>> pts;  // (eps, value)
  for (const auto& r : recs) {
    const double v = fit_column_value(r, column);
    if (r.failed() || !std::isfinite(v) || !(v > 0.0) || !(r.epsilon > 0.0)) continue;
    pts.emplace_back(r.epsilon, v);
  }
  if (pts.size() < 4)
    throw std::invalid_argument("fit_exponent: need at least 4 valid points, have " +
                                std::to_string(pts.size()));
  std::sort(pts.begin(), pts.end());  // ascending gap; largest gap last

  auto fit_over = [&](std::size_t count) {
    std::vector<double> x(count), y(count);
    for (std::size_t i = 0; i < count; ++i) {
      x[i] = std::log(pts[i].first);
      y[i] = std::log(pts[i].second);
    }
    return detail::ols(x, y);
  };

  FitReport rep;
  auto o = fit_over(pts.size());
  rep.points_used = static_cast<int>(pts.size());
  // a poor fit usually means the largest gap is pre-asymptotic; retry without it
  if (o.r2 < 0.995 && pts.size() >= 5) {
    o = fit_over(pts.size() - 1);
    rep.points_used = static_cast<int>(pts.size()) - 1;
    rep.dropped_largest = true;
  }
  rep.slope = o.slope;
  rep.intercept = o.intercept;
  rep.r2 = o.r2;
  rep.slope_stderr = o.stderr_slope;

  const double p = recs.front().p;
  const int N = recs.front().N;
  switch (column) {
    case FitColumn::r_estimate:
      rep.theory_slope = theory_exponent(p, N);
      break;
    case FitColumn::knapp_upper:
      rep.theory_slope = knapp_rate(p, N);
      break;
    case FitColumn::annulus_upper:
      if (N >= 2 && p > ExponentSet::stein_tomas_radial(N)) rep.theory_slope = 0.5;
      break;
    case FitColumn::r_radial:
      if (N == 1) {
        rep.theory_slope = theory_exponent(p, N);
      } else if (p > ExponentSet::stein_tomas_radial(N)) {
        rep.theory_slope = 0.5;
      } else {
        rep.has_band = true;
        rep.band_low = 1.0 - N * (0.5 - 1.0 / p);
        rep.band_high = 1.0;
      }
      break;
  }
  if (rep.has_band) {
    rep.discrepancy = rep.slope < rep.band_low   ? rep.band_low - rep.slope
                      : rep.slope > rep.band_high ? rep.slope - rep.band_high
                                                  : 0.0;
  } else if (std::isfinite(rep.theory_slope)) {
    rep.discrepancy = std::abs(rep.slope - rep.theory_slope);
  }
  return rep;
}

// ── resolvent-peak limit ──

// sqrt(eps) * integral_{1-tau}^{1+tau} dr / g_eps(r); as eps -> 0 this tends
// to pi / sqrt(g0''(1)/2) = pi/2 for any fixed window, and also along
// tau = eps^s for s in (0, 1/2).
inline double lemma_integral(double eps, double delta, double tau) {
  if (!(eps > 0.0)) throw std::domain_error("lemma_integral: eps must be positive");
  if (!(tau > 0.0) || !(tau <= delta) || !(delta <= 0.9))
    throw std::domain_error("lemma_integral: need 0 < tau <= delta <= 0.9");
  return std::sqrt(eps) * resolvent_integral(eps, 1.0 - tau, 1.0 + tau, 0);
}

inline double lemma_limit() {
  // pi / sqrt(g0''(1)/2) with g0(r) = (r^2-1)^2, g0''(1) = 8
  return kPi / 2.0;
}

// The same quantity after substituting r = 1 + sqrt(eps) t, an exact change
// of variables: integral over |t| <= tau/sqrt(eps) of dt / ((2t + sqrt(eps) t^2)^2 + 1).
inline double lemma_integral_substituted(double eps, double tau) {
  if (!(eps > 0.0) || !(tau > 0.0)) throw std::domain_error("lemma_integral_substituted: bad arguments");
  const double T = tau / std::sqrt(eps);
  std::vector<double> offs{0.0};
  for (double o = 1.0; o < T; o *= 2.0) {
    offs.push_back(o);
    offs.push_back(-o);
  }
  offs.push_back(T);
  offs.push_back(-T);
  std::sort(offs.begin(), offs.end());
  const double rt = std::sqrt(eps);
  return integrate_segments(
             [rt](double t) {
               const double s = 2.0 * t + rt * t * t;
               return 1.0 / (s * s + 1.0);
             },
             offs, 1e-12, 0.0, 8000)
      .value;
}

// ── interpolation cross-checks ──

struct InterpolationReport {
  double alpha = 0.0;
  double p = 0.0;
  double two_star = 0.0;
  double lp = 0.0;             // ||u||_p
  double interpolated = 0.0;   // ||u||_2^{1-alpha} ||u||_{2_*}^alpha
  bool norm_holds = false;
  double quotient_value = 0.0;
  double chain_lower = 0.0;  // eps^{1-alpha} (q/||u||_{2_*}^2)^alpha
  bool chain_holds = false;
};

inline InterpolationReport interpolation_crosscheck(const Field& u, double eps, double p) {
  const int N = u.grid().dim();
  if (N < 2) throw std::domain_error("interpolation_crosscheck: needs N >= 2");
  InterpolationReport rep;
  rep.p = p;
  rep.two_star = ExponentSet::stein_tomas(N);
  if (!(p > 2.0) || !(p <= rep.two_star))
    throw std::domain_error("interpolation_crosscheck: p must lie in (2, 2_*]");
  rep.alpha = (N + 1.0) * (0.5 - 1.0 / p);
  const SymbolParams sp = SymbolParams::normalized(eps);
  const double q = quadratic_form(u, sp);
  const double n2 = lp_norm(u, 2.0);
  const double nst = lp_norm(u, rep.two_star);
  rep.lp = lp_norm(u, p);
  if (!(n2 > 0.0)) throw std::domain_error("interpolation_crosscheck: zero field");
  rep.interpolated = std::pow(n2, 1.0 - rep.alpha) * std::pow(nst, rep.alpha);
  rep.norm_holds = rep.lp <= rep.interpolated * (1.0 + 1e-10);
  rep.quotient_value = q / (rep.lp * rep.lp);
  rep.chain_lower = std::pow(eps, 1.0 - rep.alpha) * std::pow(q / (nst * nst), rep.alpha);
  rep.chain_holds = rep.quotient_value >= rep.chain_lower * (1.0 - 1e-10);
  return rep;
}

// Exponent family q_beta = 4(1-beta) / (1 + 2/p - 2 beta) and the
// interpolation weight alpha_{p,q} = (1/2 - 1/p) / (1/2 - 1/q); along the
// family, alpha_{p, q_beta} = 2 - 2 beta identically.
inline double q_of_beta(double p, double beta) {
  return 4.0 * (1.0 - beta) / (1.0 + 2.0 / p - 2.0 * beta);
}

inline double interp_alpha(double p, double q) { return (0.5 - 1.0 / p) / (0.5 - 1.0 / q); }

}  // namespace bihnls

#endif
