#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "bihnls/bessel.hpp"
#include "bihnls/quadrature.hpp"
#include "bihnls/summation.hpp"
#include "support/oracles.hpp"

using namespace bihnls;

TEST_CASE("Kahan summation keeps tiny addends") {
  KahanSum s;
  s.add(1.0);
  for (int i = 0; i < 100000; ++i) s.add(1e-16);
  CHECK(s.value() == Catch::Approx(1.0 + 1e-11).epsilon(1e-14));
}

TEST_CASE("sphere surface measures") {
  CHECK(sphere_surface_measure(1) == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(sphere_surface_measure(2) == Catch::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(sphere_surface_measure(3) == Catch::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK_THROWS_AS(sphere_surface_measure(0), std::invalid_argument);
}

TEST_CASE("Bessel J matches the angular quadrature across the crossover") {
  // nu = 0: J_0(x) = (1/pi) integral_0^pi cos(x sin t) dt
  for (double x = 0.0; x <= 100.0; x += 0.37) {
    const double expect = oracle::sphere_profile(2, x);
    INFO("x = " << x);
    CHECK(std::abs(bessel_j(0.0, x) - expect) <= 1e-10);
  }
  // nu = 1/2: J_{1/2}(x) = sqrt(2/(pi x)) sin x
  for (double x : {0.1, 1.0, 7.0, 11.9, 12.1, 40.0, 95.0}) {
    const double expect = std::sqrt(2.0 / (kPi * x)) * std::sin(x);
    CHECK(bessel_j(0.5, x) == Catch::Approx(expect).margin(1e-12));
  }
  CHECK(bessel_j(0.0, 0.0) == 1.0);
  CHECK(bessel_j(1.0, 0.0) == 0.0);
  CHECK_THROWS_AS(bessel_j(-1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(bessel_j(0.0, -1.0), std::domain_error);
}

TEST_CASE("sphere extension profile in two and three dimensions") {
  for (double r = 0.0; r <= 100.0; r += 0.61) {
    CHECK(std::abs(sphere_profile(2, r) - oracle::sphere_profile(2, r)) <= 1e-10);
    CHECK(std::abs(sphere_profile(3, r) - oracle::sphere_profile(3, r)) <= 1e-10);
  }
  // value at the origin is (2 pi)^{-N/2} omega_{N-1}
  CHECK(sphere_profile(2, 0.0) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(sphere_profile(3, 0.0) == Catch::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-14));
  CHECK_THROWS_AS(sphere_profile(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sphere_profile(2, -1.0), std::domain_error);

  // the role-named alias and its sampled overload
  CHECK(sphere_extension_radial(2, 3.7) == sphere_profile(2, 3.7));
  const std::vector<double> radii{0.0, 1.0, 15.5};
  const auto vals = sphere_extension_radial(3, radii);
  REQUIRE(vals.size() == 3);
  for (std::size_t i = 0; i < radii.size(); ++i) CHECK(vals[i] == sphere_profile(3, radii[i]));
}

TEST_CASE("profile decay envelope") {
  for (int N : {2, 3}) {
    const double c = sphere_profile_envelope(N);
    for (double r = 12.0; r < 400.0; r += 1.7) {
      CHECK(std::abs(sphere_profile(N, r)) <= c * std::pow(r, -0.5 * (N - 1)) * (1.0 + 1e-9));
    }
  }
  // for N = 3 the envelope is attained at the peaks of |sin r| / r
  const double c3 = sphere_profile_envelope(3);
  CHECK(c3 == Catch::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-12));
}

TEST_CASE("adaptive quadrature basics") {
  const auto poly = integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-13);
  CHECK(poly.value == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(poly.error_estimate <= 1e-12);

  // a sharp resolvent peak, seeded vs oracle Simpson on split segments
  const double eps = 1e-4;
  auto f = [&](double r) { return 1.0 / ((r * r - 1.0) * (r * r - 1.0) + eps); };
  const auto lib = integrate_segments(f, {0.5, 1.0 - std::sqrt(eps), 1.0 + std::sqrt(eps), 1.5}, 1e-12);
  const double simp = oracle::simpson_richardson(f, 0.5, 1.0 - std::sqrt(eps), 4096) +
                      oracle::simpson_richardson(f, 1.0 - std::sqrt(eps), 1.0 + std::sqrt(eps), 4096) +
                      oracle::simpson_richardson(f, 1.0 + std::sqrt(eps), 1.5, 4096);
  CHECK(lib.value == Catch::Approx(simp).epsilon(1e-9));

  CHECK_THROWS_AS(integrate_segments(f, {1.0}, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(integrate_segments(f, {1.0, 0.5}, 1e-10), std::invalid_argument);
}

TEST_CASE("radial extension constant against the quadrature oracle") {
  const auto info = cst_rad_info(6.0, 2);
  CHECK(info.value > 0.0);
  CHECK(info.rel_error < 1e-5);
  CHECK(info.cutoff >= 64.0 * kPi);

  // Richardson-extrapolated block quadrature of the same norm integral
  const double ref = oracle::cst_rad(6.0, 2);
  CHECK(info.value == Catch::Approx(ref).epsilon(1e-6));

  // frozen high-precision value of omega_1 / ||J_0||_6^2
  CHECK(info.value == Catch::Approx(4.89384864061968).epsilon(5e-7));
  CHECK(cst_rad(6.0, 2) == info.value);
}

TEST_CASE("radial extension constant with the closed-form check in 3d") {
  // ||e_3||_4^4 = omega_2 (2/pi)^2 integral sin^4 r / r^2 dr = 4 exactly,
  // so cst_rad(4, 3) = omega_2 / 2 = 2 pi.
  CHECK(cst_rad(4.0, 3) == Catch::Approx(2.0 * kPi).epsilon(5e-7));
  CHECK(cst_rad(4.0, 3) == Catch::Approx(oracle::cst_rad(4.0, 3)).epsilon(1e-6));
}

TEST_CASE("radial extension constant rejects divergent exponents") {
  CHECK_THROWS_AS(cst_rad(4.0, 2), std::domain_error);   // threshold is 4 for N = 2
  CHECK_THROWS_AS(cst_rad(3.0, 3), std::domain_error);   // threshold is 3 for N = 3
  CHECK_THROWS_AS(cst_rad(6.0, 1), std::invalid_argument);
  CHECK_NOTHROW(cst_rad(4.000001, 2));
}
