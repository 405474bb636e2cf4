#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "bihnls/optimizer.hpp"
#include "support/oracles.hpp"

using namespace bihnls;

namespace {

bool has_warning(const std::vector<std::string>& ws, const std::string& needle) {
  for (const auto& w : ws)
    if (w.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("mass-subcritical window boundaries") {
  CHECK(mass_window_sup(1) == Catch::Approx(6.0).epsilon(1e-15));
  CHECK(mass_window_sup(2) == Catch::Approx(14.0 / 3.0).epsilon(1e-15));
  CHECK(mass_window_sup(3) == Catch::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("mass-constrained descent validates its inputs") {
  SpectralGrid g(1, 20.0, 96);
  CHECK_THROWS_AS(minimize_mass_constrained(0.0, 4.0, g, MinimizeOptions{}), std::invalid_argument);
  CHECK_THROWS_AS(minimize_mass_constrained(-1.0, 4.0, g, MinimizeOptions{}), std::invalid_argument);
  CHECK_THROWS_AS(minimize_mass_constrained(1.0, 2.0, g, MinimizeOptions{}), std::invalid_argument);
  MinimizeOptions bad;
  bad.tolerance = -1.0;
  CHECK_THROWS_AS(minimize_mass_constrained(1.0, 4.0, g, bad), std::invalid_argument);
}

TEST_CASE("mass minimizer satisfies the constrained stationarity system") {
  const double m = 1.0, p = 4.0;
  SpectralGrid g(1, 20.0, 96);
  MinimizeOptions opts;
  opts.tolerance = 1e-9;
  opts.max_iterations = 8000;

  const MassResult res = minimize_mass_constrained(m, p, g, opts);
  CHECK(res.converged);
  CHECK(res.residual <= opts.tolerance);
  CHECK(res.seed == opts.seed);
  CHECK(res.mass == m);

  // the constraint is enforced exactly by the projection
  const double n2 = lp_norm(res.field, 2.0);
  CHECK(n2 * n2 == Catch::Approx(m).epsilon(1e-12));

  // recompute the energy from scratch: sum (r^4 - 2 r^2)|u_hat|^2 dxi
  // equals the gap-2 quadratic form minus twice the mass
  const double kinetic = quadratic_form(res.field, SymbolParams(1.0, 2.0)) - 2.0 * m;
  const double want = kinetic - 2.0 / p * res.lp_power;
  CHECK(res.energy_value == Catch::Approx(want).epsilon(1e-10));
  CHECK(res.lp_power ==
        Catch::Approx(lp_power_sum(g, res.field.physical(), p)).epsilon(1e-13));

  // the multiplier is reported through eps(m) = -1 - lambda
  CHECK(res.epsilon_of_m == -1.0 - res.multiplier);
  REQUIRE(res.epsilon_of_m > 0.0);

  // the minimizer solves the ground-state equation at gap eps(m): the
  // Euler-Lagrange residual under that symbol vanishes with the tangential
  // gradient, and the quadratic form collapses onto the L^p power
  const SymbolParams sp = SymbolParams::normalized(res.epsilon_of_m);
  CHECK(el_residual(res.field, sp, p) <= 1e-5);
  CHECK(quadratic_form(res.field, sp) == Catch::Approx(res.lp_power).epsilon(1e-6));
}

TEST_CASE("the multiplier gap grows with the prescribed mass") {
  SpectralGrid g(1, 20.0, 96);
  MinimizeOptions opts;
  opts.tolerance = 1e-8;
  opts.max_iterations = 8000;
  double prev = 0.0;
  for (double m : {0.5, 1.0, 2.0}) {
    const MassResult res = minimize_mass_constrained(m, 4.0, g, opts);
    CHECK(res.converged);
    CHECK(res.epsilon_of_m > prev);
    prev = res.epsilon_of_m;
  }
}

TEST_CASE("exponents at or above the window are flagged") {
  SpectralGrid g(1, 20.0, 96);
  MinimizeOptions opts;
  opts.max_iterations = 5;
  const MassResult res = minimize_mass_constrained(1.0, 6.0, g, opts);
  CHECK(has_warning(res.warnings, "mass-subcritical window"));
}

TEST_CASE("the two-dimensional multiplier gap shrinks with the mass") {
  const double p = 4.0;
  SpectralGrid g(2, 60.0, 192);
  MinimizeOptions opts;
  opts.tolerance = 1e-6;
  opts.max_iterations = 4000;

  // at m = 3 the effective gap sits well inside what this grid resolves
  const MassResult a = minimize_mass_constrained(3.0, p, g, opts);
  CHECK(a.converged);
  REQUIRE(a.epsilon_of_m > 0.0);
  CHECK(a.epsilon_of_m > 5e-3);
  CHECK(a.epsilon_of_m < 5e-2);
  CHECK(a.symmetry.evenness_defect < 1e-3);
  CHECK(!has_warning(a.warnings, "under-resolved"));

  const MassResult b = minimize_mass_constrained(4.0, p, g, opts);
  CHECK(b.converged);
  CHECK(b.epsilon_of_m > a.epsilon_of_m);
}

TEST_CASE("a mass too small for the grid is reported as under-resolved") {
  // small mass drives eps(m) toward zero, and the concentration annulus of
  // width sqrt(eps(m)) falls between lattice shells; the result must say so
  SpectralGrid g(2, 20.0, 64);
  MinimizeOptions opts;
  opts.tolerance = 1e-6;
  opts.max_iterations = 4000;

  const MassResult res = minimize_mass_constrained(0.5, 4.0, g, opts);
  REQUIRE(res.epsilon_of_m > 0.0);
  CHECK(g.shells_across(std::sqrt(res.epsilon_of_m)) < 4.0);
  CHECK(has_warning(res.warnings, "under-resolved"));
}
