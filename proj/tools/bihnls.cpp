// bihnls: batch front door for the quotient laboratory.
//
// Subcommands cover the minimizers (minimize, minimize-radial, mass), the
// explicit trial-field bounds (knapp, annulus), the radial extension constant
// (cst-rad), the resolvent-peak limit checker (lemma), sweep campaigns over
// the spectral gap (sweep) and log-log fits of existing sweep files (fit).
//
// Outputs are written under --out-dir: JSON reports, RFC-4180 CSV sweeps and
// BFLD1 field dumps, all listed in a manifest.json that records the FNV-1a
// hash of the effective configuration.  Reports embed the same hash so any
// file can be traced back to the run that produced it.  All floating-point
// values are printed with 17 significant digits; runs with identical
// configuration and seed produce byte-identical data files.
//
// Exit codes: 0 success, 2 configuration or validation error, 3 numerical
// failure, 4 partial results (non-converged minimization or flagged sweep
// rows).

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bihnls/bihnls.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e308" : "-1e308";
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

std::string jescape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char u[8];
          std::snprintf(u, sizeof u, "\\u%04x", c);
          out += u;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

// Hand-rolled JSON emitter: keys stay in insertion order and doubles go
// through fmt17, which the report format requires.
struct JsonObj {
  std::string body = "{";
  bool first = true;

  JsonObj& raw(const std::string& key, const std::string& value) {
    if (!first) body += ',';
    first = false;
    body += '"' + key + "\":" + value;
    return *this;
  }
  JsonObj& num(const std::string& key, double v) { return raw(key, fmt17(v)); }
  JsonObj& integer(const std::string& key, long long v) { return raw(key, std::to_string(v)); }
  JsonObj& str(const std::string& key, const std::string& v) { return raw(key, jescape(v)); }
  JsonObj& boolean(const std::string& key, bool v) { return raw(key, v ? "true" : "false"); }
  std::string close() const { return body + "}"; }
};

std::string jarray(const std::vector<std::string>& items, bool escape) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += escape ? jescape(items[i]) : items[i];
  }
  return out + "]";
}

std::string symmetry_json(const bihnls::SymmetryReport& s, int dim) {
  std::vector<std::string> c;
  for (int d = 0; d < dim; ++d) c.push_back(fmt17(s.centroid[d]));
  JsonObj o;
  o.num("nonradialityIndex", s.nonradiality_index)
      .num("evennessDefect", s.evenness_defect)
      .raw("centroid", jarray(c, false));
  return o.close();
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char b[20];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(v));
  return b;
}

// Accepts either TOML (delegated to CLI11's own reader) or a JSON object,
// recognized by the leading '{'.
class AutoConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override {
    return toml_.to_config(app, default_also, write_description, prefix);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::stringstream buf;
    buf << input.rdbuf();
    const std::string text = buf.str();
    const std::size_t i = text.find_first_not_of(" \t\r\n");
    if (i != std::string::npos && text[i] == '{') {
      try {
        return from_json(json::parse(text));
      } catch (const json::exception& e) {
        throw CLI::FileError(std::string("JSON config: ") + e.what());
      }
    }
    std::stringstream again(text);
    return toml_.from_config(again);
  }

 private:
  CLI::ConfigTOML toml_;

  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void walk(const json& j, const std::vector<std::string>& parents,
                   std::vector<CLI::ConfigItem>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const json& v = it.value();
      if (v.is_object()) {
        auto deeper = parents;
        deeper.push_back(it.key());
        walk(v, deeper, out);
      } else {
        CLI::ConfigItem item;
        item.parents = parents;
        item.name = it.key();
        if (v.is_array())
          for (const auto& e : v) item.inputs.push_back(scalar(e));
        else
          item.inputs.push_back(scalar(v));
        out.push_back(std::move(item));
      }
    }
  }

  static std::vector<CLI::ConfigItem> from_json(const json& j) {
    if (!j.is_object()) throw CLI::FileError("JSON config: top level must be an object");
    std::vector<CLI::ConfigItem> out;
    walk(j, {}, out);
    return out;
  }
};

struct RunContext {
  std::filesystem::path out_dir;
  std::string config_hash;
  std::string task;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(out_dir);
    const auto path = out_dir / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    os << content;
    if (!os) throw std::runtime_error("failed writing '" + path.string() + "'");
    outputs.push_back(name);
  }

  std::string path_for(const std::string& name) {
    std::filesystem::create_directories(out_dir);
    outputs.push_back(name);
    return (out_dir / name).string();
  }

  void finish() {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    JsonObj m;
    m.str("configHash", config_hash)
        .str("version", BIHNLS_VERSION_STRING)
        .str("task", task)
        .integer("seed", static_cast<long long>(seed))
        .num("wallTimeSeconds", wall)
        .raw("outputs", jarray(outputs, true));
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir / "manifest.json", std::ios::binary);
    os << m.close() << "\n";
  }
};

json field_params(const RunContext& ctx, double epsilon, double p) {
  json j;
  j["configHash"] = ctx.config_hash;
  j["task"] = ctx.task;
  if (!std::isnan(epsilon)) j["epsilon"] = epsilon;
  if (!std::isnan(p)) j["p"] = p;
  return j;
}

bihnls::SpectralGrid make_grid(int N, double eps, const CLI::Option* l_opt, const CLI::Option* m_opt,
                               double L, int M) {
  const bool has_l = l_opt->count() > 0, has_m = m_opt->count() > 0;
  if (has_l != has_m)
    throw std::invalid_argument("grid overrides need both --L and --M (or neither)");
  if (has_l) return bihnls::SpectralGrid(N, L, M);
  return bihnls::GridPolicy{}.realize(N, eps);
}

std::string ground_state_json(const RunContext& ctx, const char* task, int N, double p, double eps,
                              const bihnls::SpectralGrid& g, const bihnls::GroundStateResult& r) {
  JsonObj o;
  o.str("task", task)
      .str("configHash", ctx.config_hash)
      .str("version", BIHNLS_VERSION_STRING)
      .integer("N", N)
      .num("p", p)
      .num("epsilon", eps)
      .num("halfWidth", g.half_width())
      .integer("pointsPerAxis", g.points_per_axis())
      .num("quotient", r.quotient)
      .num("leastEnergyLevel", bihnls::least_energy_level(r.quotient, p))
      .integer("iterations", r.iterations)
      .num("residual", r.residual)
      .boolean("converged", r.converged)
      .num("restartSpread", r.restart_spread)
      .raw("symmetry", symmetry_json(r.symmetry, N))
      .integer("seed", static_cast<long long>(r.seed))
      .raw("warnings", jarray(r.warnings, true));
  return o.close() + "\n";
}

std::string fit_json(const RunContext& ctx, bihnls::FitColumn col, const bihnls::FitReport& f) {
  JsonObj o;
  o.str("task", "fit")
      .str("configHash", ctx.config_hash)
      .str("column", bihnls::to_string(col))
      .num("slope", f.slope)
      .num("intercept", f.intercept)
      .num("r2", f.r2)
      .num("slopeStderr", f.slope_stderr)
      .integer("pointsUsed", f.points_used)
      .boolean("droppedLargest", f.dropped_largest)
      .num("theorySlope", f.theory_slope);
  if (f.has_band) o.num("bandLow", f.band_low).num("bandHigh", f.band_high);
  o.num("discrepancy", f.discrepancy);
  return o.close() + "\n";
}

bihnls::FitColumn parse_fit_column(const std::string& name) {
  if (name == "r") return bihnls::FitColumn::r_estimate;
  if (name == "r_rad") return bihnls::FitColumn::r_radial;
  if (name == "knapp_upper") return bihnls::FitColumn::knapp_upper;
  if (name == "annulus_upper") return bihnls::FitColumn::annulus_upper;
  throw std::invalid_argument("unknown fit column '" + name +
                              "' (expected r, r_rad, knapp_upper or annulus_upper)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational laboratory for the fourth-order dispersion quotient"};
  app.set_version_flag("--version", BIHNLS_VERSION_STRING);
  app.set_config("--config", "", "configuration file, TOML or JSON");
  app.config_formatter(std::make_shared<AutoConfig>());
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  std::string out_dir = "out";
  std::uint64_t seed = 1;
  app.add_option("--out-dir", out_dir, "directory for reports and data files");
  app.add_option("--seed", seed, "base seed for randomized restarts");

  // knobs shared by the minimizing subcommands
  struct MinKnobs {
    double tolerance = 1e-7;
    int max_iterations = 4000;
    int restarts = 1;
    bool dump_field = false;
    double L = 0.0;
    int M = 0;
    CLI::Option* l_opt = nullptr;
    CLI::Option* m_opt = nullptr;

    void attach(CLI::App* sub, bool with_grid = true) {
      sub->add_option("--tolerance", tolerance, "stationarity residual target")
          ->check(CLI::PositiveNumber);
      sub->add_option("--max-iterations", max_iterations)->check(CLI::PositiveNumber);
      sub->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
      sub->add_flag("--dump-field", dump_field, "write the minimizer as a BFLD1 file");
      if (with_grid) {
        l_opt = sub->add_option("--L", L, "box half width (overrides the grid policy)");
        m_opt = sub->add_option("--M", M, "points per axis (overrides the grid policy)");
      }
    }
    bihnls::MinimizeOptions options(std::uint64_t sd) const {
      bihnls::MinimizeOptions o;
      o.tolerance = tolerance;
      o.max_iterations = max_iterations;
      o.restarts = restarts;
      o.seed = sd;
      return o;
    }
  };

  int N = 2;
  double p = 4.0, epsilon = 1e-2;

  auto* sub_min = app.add_subcommand("minimize", "minimize the quotient over all fields");
  auto* sub_rad = app.add_subcommand("minimize-radial", "minimize over radial fields");
  MinKnobs knobs_min, knobs_rad;
  for (auto [sub, knobs] : {std::pair{sub_min, &knobs_min}, std::pair{sub_rad, &knobs_rad}}) {
    sub->configurable();
    sub->add_option("--N", N, "dimension")->check(CLI::IsMember({1, 2, 3}));
    sub->add_option("--p", p, "Lebesgue exponent")->required();
    sub->add_option("--epsilon", epsilon, "spectral gap")->required()->check(CLI::PositiveNumber);
    knobs->attach(sub);
  }

  auto* sub_mass = app.add_subcommand("mass", "minimize the companion energy at fixed L2 mass");
  double mass_m = 1.0, mass_L = 20.0;
  int mass_M = 96;
  MinKnobs knobs_mass;
  sub_mass->configurable();
  sub_mass->add_option("--N", N, "dimension")->check(CLI::IsMember({1, 2, 3}));
  sub_mass->add_option("--p", p, "Lebesgue exponent")->required();
  sub_mass->add_option("--m", mass_m, "constrained squared L2 mass")
      ->required()
      ->check(CLI::PositiveNumber);
  sub_mass->add_option("--L", mass_L, "box half width");
  sub_mass->add_option("--M", mass_M, "points per axis");
  knobs_mass.attach(sub_mass, false);

  auto* sub_sweep = app.add_subcommand("sweep", "run the quotient estimates over a gap ladder");
  std::vector<double> sweep_eps;
  std::vector<std::string> sweep_fits;
  std::string sweep_csv = "sweep.csv";
  double sweep_s = 0.1;
  int jobs = 1;
  bool sweep_dump = false;
  MinKnobs knobs_sweep;
  sub_sweep->configurable();
  sub_sweep->add_option("--N", N, "dimension")->check(CLI::IsMember({1, 2, 3}));
  sub_sweep->add_option("--p", p, "Lebesgue exponent")->required();
  sub_sweep->add_option("--epsilons", sweep_eps, "strictly decreasing gap ladder")->delimiter(',');
  sub_sweep->add_option("--fit", sweep_fits, "columns to fit (r, r_rad, knapp_upper, annulus_upper)")
      ->delimiter(',');
  sub_sweep->add_option("--csv", sweep_csv, "sweep output file name");
  sub_sweep->add_option("--annulus-s", sweep_s, "annulus support exponent")
      ->check(CLI::Range(1e-6, 0.499999));
  sub_sweep->add_option("--jobs", jobs, "worker threads across sweep points")
      ->envname("BIHNLS_JOBS")
      ->check(CLI::PositiveNumber);
  sub_sweep->add_flag("--dump-fields", sweep_dump, "write BFLD1 minimizers per row");
  knobs_sweep.attach(sub_sweep, false);

  auto* sub_knapp = app.add_subcommand("knapp", "evaluate the cap trial field");
  auto* sub_ann = app.add_subcommand("annulus", "evaluate the resolvent-weighted annulus trial field");
  double ann_s = 0.1;
  bool trial_dump = false;
  MinKnobs knobs_trial;  // reuse only the grid overrides
  for (CLI::App* sub : {sub_knapp, sub_ann}) {
    sub->configurable();
    sub->add_option("--N", N, "dimension")->check(CLI::IsMember({1, 2, 3}));
    sub->add_option("--p", p, "Lebesgue exponent")->required();
    sub->add_option("--epsilon", epsilon, "spectral gap")->required()->check(CLI::PositiveNumber);
    sub->add_flag("--dump-field", trial_dump, "write the trial field as a BFLD1 file");
  }
  knobs_trial.l_opt = sub_knapp->add_option("--L", knobs_trial.L, "box half width");
  knobs_trial.m_opt = sub_knapp->add_option("--M", knobs_trial.M, "points per axis");
  auto* ann_l = sub_ann->add_option("--L", knobs_trial.L, "box half width");
  auto* ann_m = sub_ann->add_option("--M", knobs_trial.M, "points per axis");
  sub_ann->add_option("--s", ann_s, "annulus support exponent")->check(CLI::Range(1e-6, 0.499999));

  auto* sub_cst = app.add_subcommand("cst-rad", "radial extension constant");
  sub_cst->configurable();
  sub_cst->add_option("--N", N, "dimension")->check(CLI::IsMember({2, 3}));
  sub_cst->add_option("--p", p, "Lebesgue exponent")->required();

  auto* sub_lemma = app.add_subcommand("lemma", "resolvent-peak integral against its limit");
  double lemma_eps = 1e-6, lemma_delta = 0.5, lemma_tau = 0.0, lemma_power = 0.0;
  sub_lemma->configurable();
  sub_lemma->add_option("--epsilon", lemma_eps)->required()->check(CLI::PositiveNumber);
  sub_lemma->add_option("--delta", lemma_delta, "window bound, at most 0.9");
  auto* tau_opt = sub_lemma->add_option("--tau", lemma_tau, "integration half width (default: delta)");
  auto* tau_pow =
      sub_lemma->add_option("--tau-eps-power", lemma_power, "use tau = epsilon^s for this s");
  tau_opt->excludes(tau_pow);

  auto* sub_fit = app.add_subcommand("fit", "fit a decay exponent from an existing sweep CSV");
  std::string fit_input, fit_column = "r";
  sub_fit->configurable();
  sub_fit->add_option("--input", fit_input, "sweep CSV file")->required()->check(CLI::ExistingFile);
  sub_fit->add_option("--column", fit_column, "column to fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.seed = seed;
  ctx.config_hash = hex64(fnv1a64(app.config_to_str(true, false)));

  try {
    int exit_code = 0;

    auto run_ground_state = [&](const char* task, bool radial, const MinKnobs& knobs) {
      ctx.task = task;
      const bihnls::SymbolParams sp = bihnls::SymbolParams::normalized(epsilon);
      const bihnls::SpectralGrid grid = make_grid(N, epsilon, knobs.l_opt, knobs.m_opt, knobs.L, knobs.M);
      const auto opts = knobs.options(seed);
      const auto res = radial ? bihnls::minimize_quotient_radial(sp, p, grid, opts)
                              : bihnls::minimize_quotient(sp, p, grid, opts);
      std::string report = ground_state_json(ctx, task, N, p, epsilon, grid, res);
      ctx.write(std::string(task) + ".json", report);
      if (knobs.dump_field)
        bihnls::write_field(ctx.path_for("field.bfld"), res.field, field_params(ctx, epsilon, p));
      std::cout << "quotient " << fmt17(res.quotient) << " iterations " << res.iterations
                << " residual " << fmt17(res.residual) << (res.converged ? "" : " (not converged)")
                << "\n";
      if (!res.converged) exit_code = 4;
    };

    if (sub_min->parsed()) {
      run_ground_state("minimize", false, knobs_min);
    } else if (sub_rad->parsed()) {
      run_ground_state("minimize-radial", true, knobs_rad);
    } else if (sub_mass->parsed()) {
      ctx.task = "mass";
      const bihnls::SpectralGrid grid(N, mass_L, mass_M);
      const auto res = bihnls::minimize_mass_constrained(mass_m, p, grid, knobs_mass.options(seed));
      JsonObj o;
      o.str("task", "mass")
          .str("configHash", ctx.config_hash)
          .str("version", BIHNLS_VERSION_STRING)
          .integer("N", N)
          .num("p", p)
          .num("m", mass_m)
          .num("halfWidth", grid.half_width())
          .integer("pointsPerAxis", grid.points_per_axis())
          .num("energy", res.energy_value)
          .num("multiplier", res.multiplier)
          .num("epsilonOfM", res.epsilon_of_m)
          .num("lpPower", res.lp_power)
          .integer("iterations", res.iterations)
          .num("residual", res.residual)
          .boolean("converged", res.converged)
          .raw("symmetry", symmetry_json(res.symmetry, N))
          .integer("seed", static_cast<long long>(res.seed))
          .raw("warnings", jarray(res.warnings, true));
      ctx.write("mass.json", o.close() + "\n");
      if (knobs_mass.dump_field)
        bihnls::write_field(ctx.path_for("field.bfld"), res.field,
                            field_params(ctx, std::nan(""), p));
      std::cout << "epsilon(m) " << fmt17(res.epsilon_of_m) << " energy " << fmt17(res.energy_value)
                << (res.converged ? "" : " (not converged)") << "\n";
      if (!res.converged) exit_code = 4;
    } else if (sub_sweep->parsed()) {
      ctx.task = "sweep";
      std::vector<double> ladder = sweep_eps.empty() ? bihnls::default_epsilon_ladder() : sweep_eps;
      bihnls::SweepOptions so;
      so.minimize = knobs_sweep.options(seed);
      so.annulus_s = sweep_s;
      so.jobs = jobs;
      so.keep_fields = sweep_dump;
      const auto recs = bihnls::run_sweep(ladder, p, N, bihnls::GridPolicy{}, so);
      std::ostringstream csv;
      bihnls::write_sweep_csv(csv, recs);
      ctx.write(sweep_csv, csv.str());
      std::cout << "wrote " << sweep_csv << " (" << recs.size() << " rows)\n";
      for (const auto& name : sweep_fits) {
        const auto col = parse_fit_column(name);
        const auto rep = bihnls::fit_exponent(recs, col);
        ctx.write("fit_" + name + ".json", fit_json(ctx, col, rep));
        std::cout << "fit " << name << ": slope " << fmt17(rep.slope) << " theory "
                  << fmt17(rep.theory_slope) << "\n";
      }
      if (sweep_dump) {
        for (std::size_t i = 0; i < recs.size(); ++i) {
          char tag[16];
          std::snprintf(tag, sizeof tag, "%03zu", i);
          if (recs[i].minimizer)
            bihnls::write_field(ctx.path_for(std::string("field_") + tag + ".bfld"),
                                *recs[i].minimizer, field_params(ctx, recs[i].epsilon, p));
          if (recs[i].radial_minimizer)
            bihnls::write_field(ctx.path_for(std::string("field_rad_") + tag + ".bfld"),
                                *recs[i].radial_minimizer, field_params(ctx, recs[i].epsilon, p));
        }
      }
      for (const auto& r : recs)
        if (!r.flags.empty()) exit_code = 4;
    } else if (sub_knapp->parsed() || sub_ann->parsed()) {
      const bool is_knapp = sub_knapp->parsed();
      ctx.task = is_knapp ? "knapp" : "annulus";
      const bihnls::SymbolParams sp = bihnls::SymbolParams::normalized(epsilon);
      const auto* l_opt = is_knapp ? knobs_trial.l_opt : ann_l;
      const auto* m_opt = is_knapp ? knobs_trial.m_opt : ann_m;
      const bihnls::SpectralGrid grid = make_grid(N, epsilon, l_opt, m_opt, knobs_trial.L, knobs_trial.M);
      const bihnls::Field field = is_knapp
                                      ? bihnls::knapp_field(grid, {epsilon})
                                      : bihnls::annulus_field(grid, {epsilon, ann_s});
      const double q = bihnls::quadratic_form(field, sp);
      const double quot = bihnls::quotient(field, sp, p);
      JsonObj o;
      o.str("task", ctx.task)
          .str("configHash", ctx.config_hash)
          .str("version", BIHNLS_VERSION_STRING)
          .integer("N", N)
          .num("p", p)
          .num("epsilon", epsilon)
          .num("halfWidth", grid.half_width())
          .integer("pointsPerAxis", grid.points_per_axis())
          .num("quotient", quot)
          .num("quadraticForm", q)
          .num("mass", field.mass());
      if (is_knapp) {
        o.num("capMeasure", bihnls::cap_measure(N, epsilon))
            .num("decayRate", bihnls::knapp_rate(p, N))
            .num("pointwiseBound", bihnls::knapp_pointwise_bound(N, epsilon));
      } else {
        o.num("s", ann_s).num("rhoEps", bihnls::rho_eps(epsilon, ann_s, N));
        const double over = quot / std::sqrt(epsilon);
        o.num("quotientOverSqrtEps", over);
        double limit = std::numeric_limits<double>::quiet_NaN();
        if (N >= 2 && p > bihnls::ExponentSet::stein_tomas_radial(N))
          limit = 2.0 / bihnls::kPi * bihnls::cst_rad(p, N);
        o.num("predictedLimit", limit);
      }
      ctx.write(ctx.task + ".json", o.close() + "\n");
      if (trial_dump)
        bihnls::write_field(ctx.path_for("field.bfld"), field, field_params(ctx, epsilon, p));
      std::cout << ctx.task << " quotient " << fmt17(quot) << "\n";
    } else if (sub_cst->parsed()) {
      ctx.task = "cst-rad";
      const auto info = bihnls::cst_rad_info(p, N);
      JsonObj o;
      o.str("task", "cst-rad")
          .str("configHash", ctx.config_hash)
          .str("version", BIHNLS_VERSION_STRING)
          .integer("N", N)
          .num("p", p)
          .num("value", info.value)
          .num("quadError", info.rel_error)
          .num("tailCutoff", info.cutoff);
      ctx.write("cst-rad.json", o.close() + "\n");
      std::cout << "cst_rad(" << fmt17(p) << ", " << N << ") = " << fmt17(info.value) << "\n";
    } else if (sub_lemma->parsed()) {
      ctx.task = "lemma";
      double tau = lemma_delta;
      if (tau_pow->count() > 0) tau = std::pow(lemma_eps, lemma_power);
      if (tau_opt->count() > 0) tau = lemma_tau;
      const double value = bihnls::lemma_integral(lemma_eps, lemma_delta, tau);
      const double limit = bihnls::lemma_limit();
      const double dev = (value - limit) / limit;
      JsonObj o;
      o.str("task", "lemma")
          .str("configHash", ctx.config_hash)
          .str("version", BIHNLS_VERSION_STRING)
          .num("epsilon", lemma_eps)
          .num("delta", lemma_delta)
          .num("tau", tau)
          .num("value", value)
          .num("limit", limit)
          .num("relativeDeviation", dev);
      ctx.write("lemma.json", o.close() + "\n");
      std::cout << "value " << fmt17(value) << " limit " << fmt17(limit) << " relative deviation "
                << fmt17(dev) << "\n";
    } else if (sub_fit->parsed()) {
      ctx.task = "fit";
      const auto col = parse_fit_column(fit_column);
      std::ifstream is(fit_input, std::ios::binary);
      const auto recs = bihnls::read_sweep_csv(is);
      const auto rep = bihnls::fit_exponent(recs, col);
      ctx.write("fit_" + fit_column + ".json", fit_json(ctx, col, rep));
      std::cout << "fit " << fit_column << ": slope " << fmt17(rep.slope) << " theory "
                << fmt17(rep.theory_slope) << "\n";
    }

    ctx.finish();
    return exit_code;
  } catch (const bihnls::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const bihnls::resolution_error& e) {
    std::cerr << "resolution: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
