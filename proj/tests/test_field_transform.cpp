#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <random>

#include "bihnls/field.hpp"
#include "bihnls/field_io.hpp"
#include "bihnls/grid.hpp"
#include "support/oracles.hpp"

using namespace bihnls;

TEST_CASE("grid validation and geometry") {
  CHECK_THROWS_AS(SpectralGrid(0, 10.0, 32), std::invalid_argument);
  CHECK_THROWS_AS(SpectralGrid(4, 10.0, 32), std::invalid_argument);
  CHECK_THROWS_AS(SpectralGrid(2, -1.0, 32), std::invalid_argument);
  CHECK_THROWS_AS(SpectralGrid(2, 10.0, 31), std::invalid_argument);
  CHECK_THROWS_AS(SpectralGrid(2, 10.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(SpectralGrid(2, 100.0, 64), std::invalid_argument);  // Nyquist ~ 1

  const SpectralGrid g(2, 5.0, 20);
  CHECK(g.size() == 400);
  CHECK(g.spacing() == Catch::Approx(0.5));
  CHECK(g.freq_spacing() == Catch::Approx(oracle::pi / 5.0));
  CHECK(g.nyquist() == Catch::Approx(10.0 * oracle::pi / 5.0));
  CHECK(g.coord(0) == Catch::Approx(-5.0));
  CHECK(g.coord(10) == Catch::Approx(0.0).margin(1e-15));
  CHECK(g.freq(10) == Catch::Approx(0.0).margin(1e-15));
  CHECK(g.freq(0) == Catch::Approx(-10.0 * oracle::pi / 5.0));

  const auto m = g.unravel(3 * 20 + 7);
  CHECK(m[0] == 3);
  CHECK(m[1] == 7);
  CHECK(g.freq_r2(3 * 20 + 7) ==
        Catch::Approx(g.freq(3) * g.freq(3) + g.freq(7) * g.freq(7)).epsilon(1e-14));
  CHECK(g.same_extents(SpectralGrid(2, 5.0, 20)));
  CHECK_FALSE(g.same_extents(SpectralGrid(2, 5.0, 40)));
}

TEST_CASE("grid policy realizes resolved lattices") {
  const GridPolicy pol;
  for (double eps : {0.5, 1e-1, 1e-2, 1e-3}) {
    const SpectralGrid g = pol.realize(2, eps);
    CHECK(g.half_width() >= pol.min_half_width);
    CHECK(g.half_width() * std::sqrt(eps) >= pol.half_width_factor * (1.0 - 1e-12));
    CHECK(g.shells_across(std::sqrt(eps)) >= pol.min_shells * (1.0 - 1e-12));
    CHECK(g.nyquist() >= pol.min_nyquist * (1.0 - 1e-12));
    CHECK(g.points_per_axis() <= pol.max_points);
    CHECK(GridPolicy::smooth5_even(g.points_per_axis()));
  }
  CHECK_THROWS_AS(pol.realize(2, 1e-6), resolution_error);
  CHECK_THROWS_AS(pol.realize(2, 0.0), std::invalid_argument);
  CHECK(GridPolicy::smooth5_even(480));
  CHECK_FALSE(GridPolicy::smooth5_even(481));
  CHECK_FALSE(GridPolicy::smooth5_even(14));  // contains the factor 7
}

TEST_CASE("transform matches the naive DFT in every dimension") {
  std::mt19937_64 rng(1234);
  struct Case {
    int dim;
    double L;
    int M;
  };
  for (const auto& c : {Case{1, 7.0, 32}, Case{2, 4.0, 16}, Case{3, 4.0, 16}}) {
    const SpectralGrid g(c.dim, c.L, c.M);
    const cvec phys = oracle::random_field(rng, g.size());
    const Field u = Field::from_physical(g, phys);
    const cvec expect = oracle::dft_forward(c.dim, c.L, c.M, phys);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < expect.size(); ++i) {
      worst = std::max(worst, std::abs(u.fourier()[i] - expect[i]));
      scale = std::max(scale, std::abs(expect[i]));
    }
    INFO("dim " << c.dim);
    CHECK(worst <= 1e-12 * scale);

    // and the inverse reproduces the samples
    const Field v = Field::from_fourier(g, cvec(u.fourier()));
    double round = 0.0;
    for (std::size_t i = 0; i < phys.size(); ++i)
      round = std::max(round, std::abs(v.physical()[i] - phys[i]));
    CHECK(round <= 1e-13);
  }
}

TEST_CASE("discrete Plancherel holds to machine precision") {
  std::mt19937_64 rng(99);
  for (int dim : {1, 2, 3}) {
    const SpectralGrid g(dim, 6.0, 16);
    const Field u = Field::from_physical(g, oracle::random_field(rng, g.size()));
    const double wf = oracle::pow_dim(g.freq_spacing(), dim);
    long double fsum = 0.0;
    for (const auto& v : u.fourier()) fsum += std::norm(v);
    const double fourier_mass = static_cast<double>(fsum) * wf;
    CHECK(u.mass() == Catch::Approx(fourier_mass).epsilon(1e-13));
  }
}

TEST_CASE("fields are immutable views over a shared grid") {
  const auto gp = std::make_shared<const SpectralGrid>(2, 5.0, 16);
  std::mt19937_64 rng(7);
  const Field u = Field::from_physical(gp, oracle::random_field(rng, gp->size()));
  CHECK(u.grid_ptr().get() == gp.get());
  CHECK(u.origin() == SyncState::physical);
  const Field v = Field::from_fourier(gp, cvec(u.fourier()));
  CHECK(v.origin() == SyncState::fourier);
  CHECK(std::string(to_string(u.origin())) == "physical");
  CHECK_THROWS_AS(Field::from_physical(gp, cvec(3, 0.0)), std::invalid_argument);
}

TEST_CASE("BFLD1 files round-trip bit-exactly") {
  const SpectralGrid g(2, 5.0, 16);
  std::mt19937_64 rng(2024);
  const Field u = Field::from_physical(g, oracle::random_field(rng, g.size()));
  nlohmann::json params;
  params["configHash"] = "deadbeef01234567";
  params["epsilon"] = 0.015625;

  const std::string path = "bfld_roundtrip.tmp";
  write_field(path, u, params);
  nlohmann::json back;
  const Field v = read_field(path, &back);

  REQUIRE(v.grid().same_extents(g));
  for (std::size_t i = 0; i < u.physical().size(); ++i) {
    CHECK(v.physical()[i].real() == u.physical()[i].real());
    CHECK(v.physical()[i].imag() == u.physical()[i].imag());
  }
  CHECK(back["configHash"] == "deadbeef01234567");
  CHECK(back["epsilon"].get<double>() == 0.015625);
  std::remove(path.c_str());
}

TEST_CASE("BFLD1 rejects foreign and truncated files") {
  const std::string path = "bfld_bad.tmp";
  {
    std::ofstream os(path, std::ios::binary);
    os << "{\"format\":\"other\"}\n";
  }
  CHECK_THROWS_AS(read_field(path), std::runtime_error);
  {
    std::ofstream os(path, std::ios::binary);
    os << "{\"format\":\"BFLD1\",\"dim\":1,\"halfWidth\":4.0,\"pointsPerAxis\":16}\n";
    os << "short";
  }
  CHECK_THROWS_AS(read_field(path), std::runtime_error);
  CHECK_THROWS_AS(read_field("no_such_file.tmp"), std::runtime_error);
  std::remove(path.c_str());
}
