#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "bihnls/bihnls.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int status = -1;
  std::string output;
};

RunResult run_cli(const std::string& args, const std::string& workdir = "") {
  std::string cmd;
  if (!workdir.empty()) cmd += "cd '" + workdir + "' && ";
  cmd += std::string("'") + BIHNLS_BIN + "' " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -2;
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("cli_scratch") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json load_json(const fs::path& p) {
  std::ifstream is(p);
  REQUIRE(is.good());
  return json::parse(is);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool hex16(const std::string& s) {
  if (s.size() != 16) return false;
  for (char c : s)
    if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

TEST_CASE("version flag and argument errors") {
  const RunResult v = run_cli("--version");
  CHECK(v.status == 0);
  CHECK(v.output.find("0.3.0") != std::string::npos);

  CHECK(run_cli("").status == 2);                       // a subcommand is required
  CHECK(run_cli("--no-such-flag lemma --epsilon 1e-6").status == 2);
  CHECK(run_cli("minimize --N 1 --p 4").status == 2);   // missing required --epsilon
  CHECK(run_cli("minimize --N 5 --p 4 --epsilon 0.1").status == 2);
  CHECK(run_cli("minimize --N 1 --p 4 --epsilon -0.1").status == 2);
  CHECK(run_cli("lemma --epsilon 1e-6 --tau 0.2 --tau-eps-power 0.25").status == 2);
  CHECK(run_cli("lemma --epsilon 1e-4 --delta 0.95").status == 2);  // rejected window
  CHECK(run_cli("fit --input no_such_file.csv").status == 2);
  CHECK(run_cli("sweep --N 1 --p 4 --epsilons 0.1,0.2").status == 2);  // increasing ladder
  CHECK(run_cli("cst-rad --N 2 --p 3").status == 2);    // divergent norm
}

TEST_CASE("lemma reports the frozen resolvent-peak values") {
  const fs::path dir = fresh_dir("lemma");
  const RunResult r = run_cli("--out-dir '" + dir.string() + "' --seed 5 lemma --epsilon 1e-6");
  REQUIRE(r.status == 0);

  const json lemma = load_json(dir / "lemma.json");
  CHECK(lemma["task"] == "lemma");
  CHECK(hex16(lemma["configHash"].get<std::string>()));
  CHECK(lemma["epsilon"].get<double>() == 1e-6);
  CHECK(lemma["delta"].get<double>() == 0.5);
  CHECK(lemma["tau"].get<double>() == 0.5);
  // the peaked direct quadrature is good to a few parts in 1e11
  CHECK(lemma["value"].get<double>() ==
        Catch::Approx(1.56999011163354361903).epsilon(1e-9));
  CHECK(lemma["limit"].get<double>() == Catch::Approx(0.5 * bihnls::kPi).epsilon(1e-15));
  CHECK(lemma["relativeDeviation"].get<double>() ==
        Catch::Approx(-5.13252512e-4).margin(1e-9));

  const json manifest = load_json(dir / "manifest.json");
  CHECK(manifest["task"] == "lemma");
  CHECK(manifest["seed"].get<int>() == 5);
  CHECK(manifest["version"] == "0.3.0");
  CHECK(manifest["configHash"] == lemma["configHash"]);
  CHECK(manifest["wallTimeSeconds"].get<double>() >= 0.0);
  REQUIRE(manifest["outputs"].size() == 1);
  CHECK(manifest["outputs"][0] == "lemma.json");

  // identical configuration reproduces identical bytes; the out dir is part
  // of the hashed configuration, so vary the working directory instead
  const fs::path wa = fresh_dir("lemma_rep_a"), wb = fresh_dir("lemma_rep_b");
  REQUIRE(run_cli("--seed 5 lemma --epsilon 1e-6", wa.string()).status == 0);
  REQUIRE(run_cli("--seed 5 lemma --epsilon 1e-6", wb.string()).status == 0);
  CHECK(slurp(wa / "out" / "lemma.json") == slurp(wb / "out" / "lemma.json"));

  const fs::path dir3 = fresh_dir("lemma_narrow");
  const RunResult r3 =
      run_cli("--out-dir '" + dir3.string() + "' lemma --epsilon 1e-6 --tau-eps-power 0.25");
  REQUIRE(r3.status == 0);
  const json narrow = load_json(dir3 / "lemma.json");
  CHECK(narrow["tau"].get<double>() == Catch::Approx(std::pow(1e-6, 0.25)).epsilon(1e-15));
  CHECK(narrow["value"].get<double>() ==
        Catch::Approx(1.55499753692426996369).epsilon(1e-9));
}

TEST_CASE("minimize writes a traceable report and field dump") {
  const fs::path dir = fresh_dir("minimize");
  const std::string args = "--out-dir '" + dir.string() +
                           "' minimize --N 1 --p 4 --epsilon 0.25 --L 12 --M 64"
                           " --tolerance 1e-7 --max-iterations 4000 --dump-field";
  const RunResult r = run_cli(args);
  REQUIRE(r.status == 0);

  const json rep = load_json(dir / "minimize.json");
  CHECK(rep["task"] == "minimize");
  CHECK(rep["N"].get<int>() == 1);
  CHECK(rep["p"].get<double>() == 4.0);
  CHECK(rep["epsilon"].get<double>() == 0.25);
  CHECK(rep["halfWidth"].get<double>() == 12.0);
  CHECK(rep["pointsPerAxis"].get<int>() == 64);
  CHECK(rep["converged"].get<bool>());
  CHECK(rep["seed"].get<int>() == 1);
  const double q = rep["quotient"].get<double>();
  CHECK(q > 0.0);
  CHECK(rep["leastEnergyLevel"].get<double>() == Catch::Approx(q * q).epsilon(1e-14));
  CHECK(rep["residual"].get<double>() <= 1e-7);
  CHECK(rep["symmetry"]["nonradialityIndex"].get<double>() >= 0.0);
  CHECK(rep["symmetry"]["centroid"].size() == 1);

  json params;
  const bihnls::Field u = bihnls::read_field((dir / "field.bfld").string(), &params);
  CHECK(params["configHash"] == rep["configHash"]);
  CHECK(params["epsilon"].get<double>() == 0.25);
  CHECK(params["p"].get<double>() == 4.0);
  CHECK(bihnls::lp_norm(u, 4.0) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(bihnls::quotient(u, bihnls::SymbolParams::normalized(0.25), 4.0) ==
        Catch::Approx(q).epsilon(1e-12));

  const json manifest = load_json(dir / "manifest.json");
  REQUIRE(manifest["outputs"].size() == 2);
  CHECK(manifest["outputs"][0] == "minimize.json");
  CHECK(manifest["outputs"][1] == "field.bfld");

  // reading an arbitrary file as a field dump must fail loudly
  CHECK_THROWS(bihnls::read_field((dir / "manifest.json").string()));

  // grid overrides must come in pairs
  CHECK(run_cli("--out-dir '" + dir.string() + "' minimize --N 1 --p 4 --epsilon 0.25 --L 12")
            .status == 2);
}

TEST_CASE("an exhausted minimize run exits with the partial-result code") {
  const fs::path dir = fresh_dir("partial");
  const RunResult r = run_cli("--out-dir '" + dir.string() +
                              "' minimize --N 1 --p 4 --epsilon 0.25 --L 12 --M 64"
                              " --max-iterations 2 --tolerance 1e-12");
  CHECK(r.status == 4);
  const json rep = load_json(dir / "minimize.json");
  CHECK_FALSE(rep["converged"].get<bool>());
  CHECK(rep["warnings"].size() >= 1);
}

TEST_CASE("equivalent TOML, JSON and flag configurations hash identically") {
  const fs::path base = fresh_dir("config");
  const fs::path cfg_toml = base / "run.toml";
  const fs::path cfg_json = base / "run.json";
  {
    std::ofstream os(cfg_toml);
    os << "[minimize]\nN = 1\np = 4.0\nepsilon = 0.25\nL = 12.0\nM = 64\n";
    std::ofstream oj(cfg_json);
    oj << "{\"minimize\":{\"N\":1,\"p\":4.0,\"epsilon\":0.25,\"L\":12.0,\"M\":64}}";
  }
  const fs::path wd_a = fresh_dir("config/a");
  const fs::path wd_b = fresh_dir("config/b");
  const fs::path wd_c = fresh_dir("config/c");
  const std::string cfg_toml_abs = fs::absolute(cfg_toml).string();
  const std::string cfg_json_abs = fs::absolute(cfg_json).string();

  const RunResult ra = run_cli("--config '" + cfg_toml_abs + "' minimize", wd_a.string());
  REQUIRE(ra.status == 0);
  const RunResult rb = run_cli("--config '" + cfg_json_abs + "' minimize", wd_b.string());
  REQUIRE(rb.status == 0);
  // the hash covers option values as written, so the literals must match the configs
  const RunResult rc =
      run_cli("minimize --N 1 --p 4.0 --epsilon 0.25 --L 12.0 --M 64", wd_c.string());
  REQUIRE(rc.status == 0);

  const std::string rep_a = slurp(wd_a / "out" / "minimize.json");
  CHECK(rep_a == slurp(wd_b / "out" / "minimize.json"));
  CHECK(rep_a == slurp(wd_c / "out" / "minimize.json"));

  // a config key that matches no option is a hard error
  const fs::path bad = base / "bad.toml";
  {
    std::ofstream os(bad);
    os << "[minimize]\nN = 1\np = 4.0\nepsilon = 0.25\nwibble = 3\n";
  }
  CHECK(run_cli("--config '" + fs::absolute(bad).string() + "' minimize", wd_a.string()).status ==
        2);
}

TEST_CASE("mass subcommand reports the multiplier gap") {
  const fs::path dir = fresh_dir("mass");
  const RunResult r = run_cli("--out-dir '" + dir.string() +
                              "' mass --N 1 --p 4 --m 1 --L 20 --M 96 --tolerance 1e-8");
  REQUIRE(r.status == 0);
  const json rep = load_json(dir / "mass.json");
  CHECK(rep["task"] == "mass");
  CHECK(rep["m"].get<double>() == 1.0);
  CHECK(rep["converged"].get<bool>());
  const double eps_m = rep["epsilonOfM"].get<double>();
  CHECK(eps_m > 0.0);
  CHECK(rep["multiplier"].get<double>() == Catch::Approx(-1.0 - eps_m).epsilon(1e-14));
  CHECK(rep["lpPower"].get<double>() > 0.0);
}

TEST_CASE("trial-field subcommands expose the continuum geometry") {
  const fs::path kd = fresh_dir("knapp");
  const RunResult kr = run_cli("--out-dir '" + kd.string() +
                               "' knapp --N 2 --p 3 --epsilon 0.04 --L 32 --M 96");
  REQUIRE(kr.status == 0);
  const json knapp = load_json(kd / "knapp.json");
  CHECK(knapp["task"] == "knapp");
  CHECK(knapp["quotient"].get<double>() > 0.0);
  CHECK(knapp["capMeasure"].get<double>() ==
        Catch::Approx(2.0 * std::acos(1.0 - 0.2)).epsilon(1e-13));
  CHECK(knapp["decayRate"].get<double>() == Catch::Approx(0.75).epsilon(1e-15));
  CHECK(knapp["pointwiseBound"].get<double>() > 0.0);
  CHECK(knapp["quadraticForm"].get<double>() >= 0.04 * knapp["mass"].get<double>());

  const fs::path ad = fresh_dir("annulus");
  const RunResult ar = run_cli("--out-dir '" + ad.string() +
                               "' annulus --N 2 --p 6 --epsilon 0.04 --L 32 --M 96 --s 0.3");
  REQUIRE(ar.status == 0);
  const json ann = load_json(ad / "annulus.json");
  CHECK(ann["s"].get<double>() == 0.3);
  CHECK(ann["rhoEps"].get<double>() > 0.0);
  CHECK(ann["quotientOverSqrtEps"].get<double>() ==
        Catch::Approx(ann["quotient"].get<double>() / 0.2).epsilon(1e-14));
  CHECK(ann["predictedLimit"].get<double>() == Catch::Approx(3.11552080759270).epsilon(1e-6));

  // below the radial threshold there is no limit to predict
  const fs::path ad2 = fresh_dir("annulus_low");
  const RunResult ar2 = run_cli("--out-dir '" + ad2.string() +
                                "' annulus --N 2 --p 3.5 --epsilon 0.04 --L 32 --M 96 --s 0.3");
  REQUIRE(ar2.status == 0);
  CHECK(load_json(ad2 / "annulus.json")["predictedLimit"].is_null());
}

TEST_CASE("cst-rad subcommand freezes the radial extension constant") {
  const fs::path dir = fresh_dir("cstrad");
  const RunResult r = run_cli("--out-dir '" + dir.string() + "' cst-rad --N 2 --p 6");
  REQUIRE(r.status == 0);
  const json rep = load_json(dir / "cst-rad.json");
  CHECK(rep["value"].get<double>() == Catch::Approx(4.89384864061968).epsilon(5e-7));
  CHECK(rep["quadError"].get<double>() < 1e-5);
  CHECK(rep["tailCutoff"].get<double>() >= 64.0 * bihnls::kPi);
}

TEST_CASE("sweep produces a fit that the standalone fit reproduces") {
  const fs::path dir = fresh_dir("sweep");
  const RunResult r = run_cli("--out-dir '" + dir.string() +
                              "' sweep --N 1 --p 4 --fit knapp_upper --csv ladder.csv"
                              " --jobs 2 --tolerance 1e-6 --max-iterations 8000");
  REQUIRE(r.status == 0);

  const std::string csv = slurp(dir / "ladder.csv");
  CHECK(csv.rfind(bihnls::sweep_csv_header(), 0) == 0);
  CHECK(csv.find("\r\n") != std::string::npos);
  {
    std::stringstream ss(csv);
    const auto recs = bihnls::read_sweep_csv(ss);
    REQUIRE(recs.size() == 5);
    for (const auto& rec : recs) {
      CHECK_FALSE(rec.failed());
      CHECK(rec.flags.empty());
      const double slack = 10.0 * rec.residual * rec.r_estimate + 1e-12;
      CHECK(rec.r_estimate <= rec.knapp_upper + slack);
      CHECK(rec.r_estimate <= rec.annulus_upper + slack);
      CHECK(rec.r_estimate <= rec.r_radial + slack);
    }
  }

  const json fit_sweep = load_json(dir / "fit_knapp_upper.json");
  CHECK(fit_sweep["column"] == "knapp_upper");
  CHECK(fit_sweep["theorySlope"].get<double>() == Catch::Approx(0.75).epsilon(1e-15));
  CHECK(fit_sweep["slope"].get<double>() == Catch::Approx(0.75).margin(0.1));
  CHECK(fit_sweep["r2"].get<double>() > 0.99);

  const fs::path dir2 = fresh_dir("refit");
  const RunResult rf = run_cli("--out-dir '" + dir2.string() + "' fit --input '" +
                               (dir / "ladder.csv").string() + "' --column knapp_upper");
  REQUIRE(rf.status == 0);
  const json fit_again = load_json(dir2 / "fit_knapp_upper.json");
  CHECK(fit_again["slope"].get<double>() == fit_sweep["slope"].get<double>());
  CHECK(fit_again["intercept"].get<double>() == fit_sweep["intercept"].get<double>());
  CHECK(fit_again["pointsUsed"] == fit_sweep["pointsUsed"]);
}
