#include <doctest.h>

#include <cmath>
#include <vector>

#include "biphoton/envelope.hpp"
#include "biphoton/error.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/phase_mask.hpp"

using namespace biphoton;

TEST_CASE("wrap_phase lands in (-pi, pi]") {
  CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(3.0 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_phase(0.0) == 0.0);
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = wrap_phase(a);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(std::remainder(w - a, kTwoPi) == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(wrap_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
}

TEST_CASE("grid row 0 is the top edge") {
  const Grid g(8, 2.0);
  CHECK(g.dx() == doctest::Approx(0.5));
  CHECK(g.center(0, 0).x == doctest::Approx(-1.75));
  CHECK(g.center(0, 0).y == doctest::Approx(1.75));
  CHECK(g.center(7, 7).y == doctest::Approx(-1.75));
  std::size_t r = 0, c = 0;
  REQUIRE(g.locate({0.1, 1.9}, r, c));
  CHECK(r == 0);
  CHECK(c == 4);
  CHECK_FALSE(g.locate({2.1, 0.0}, r, c));
  CHECK(g.inscribed_radius() == doctest::Approx(2.0));
  CHECK_THROWS_AS(Grid(4, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid(8, 0.0), ConfigError);
}

TEST_CASE("ring envelope peaks where a 1-D search finds it") {
  for (int m = 1; m <= 4; ++m) {
    const auto env = AmplitudeEnvelope::ring_gaussian(1.3, m);
    double best_r = 0.0, best = -1.0;
    for (double r = 0.0; r < 5.0; r += 1e-4) {
      const double d = env.density({r, 0.0});
      if (d > best) best = d, best_r = r;
    }
    CHECK(env.peak_radius() == doctest::Approx(best_r).epsilon(1e-3));
    CHECK(env.density({0.0, 0.0}) == 0.0);
  }
  // m = 2 with unit waist peaks at r = w
  CHECK(AmplitudeEnvelope::ring_gaussian(1.0, 2).peak_radius() == doctest::Approx(1.0));
  CHECK(AmplitudeEnvelope::gaussian(1.0).peak_radius() == 0.0);
}

TEST_CASE("envelope densities integrate to one") {
  const Grid g(400, 5.0);
  for (const auto& env : {AmplitudeEnvelope::gaussian(1.0), AmplitudeEnvelope::ring_gaussian(1.0, 1),
                          AmplitudeEnvelope::ring_gaussian(0.8, 3)}) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sum += env.density(g.center(i));
    CHECK(sum * g.pixel_area() == doctest::Approx(1.0).epsilon(1e-6));
  }
  const Field2D f = envelope_density(AmplitudeEnvelope::ring_gaussian(1.0, 2), Grid(32, 2.0));
  CHECK(f.sum() * Grid(32, 2.0).pixel_area() == doctest::Approx(1.0));
  CHECK_THROWS_AS(AmplitudeEnvelope::gaussian(0.0), ConfigError);
}

TEST_CASE("helical phase winds 2 pi m around the axis") {
  for (int m : {-3, -1, 1, 2, 5}) {
    const PhaseMask mask = helical_phase(m);
    double winding = 0.0;
    constexpr int n = 360;
    double prev = mask.evaluate_polar(1.0, 0.0);
    for (int i = 1; i <= n; ++i) {
      const double cur = mask.evaluate_polar(1.0, kTwoPi * i / n);
      winding += wrap_phase(cur - prev);
      prev = cur;
    }
    CHECK(winding == doctest::Approx(kTwoPi * m).epsilon(1e-9));
    CHECK(mask.helical_charge() == m);
    CHECK(conjugate(mask).helical_charge() == -m);
  }
}

TEST_CASE("conjugation negates exactly") {
  const std::vector<double> phases{kPi, kPi / 2, -kPi / 3};
  Raster r{2, 2, {0.0, 1.0, 0.6, 0.2}};
  for (const PhaseMask& mask : {helical_phase(3), equal_sector_phase(phases), bitmap_phase(r, kPi, 0.0)}) {
    const PhaseMask c = conjugate(mask);
    for (double x = -2.0; x <= 2.0; x += 0.173)
      for (double y = -2.0; y <= 2.0; y += 0.191) CHECK(c.evaluate({x, y}) == -mask.evaluate({x, y}));
    CHECK(conjugate(c).evaluate({0.3, 0.4}) == mask.evaluate({0.3, 0.4}));
  }
}

TEST_CASE("sector masks validate their partition") {
  const PhaseMask m = sector_phase({{0.0, kPi, 0.0}, {kPi, kTwoPi, kPi / 2}});
  CHECK(m.evaluate_polar(1.0, 0.5) == 0.0);
  CHECK(m.evaluate_polar(1.0, kPi + 0.5) == doctest::Approx(kPi / 2));
  CHECK(m.phase_levels().size() == 2);
  CHECK_THROWS_WITH_AS(sector_phase({{0.0, 3.0, 0.0}, {3.1, kTwoPi, 1.0}}), doctest::Contains("gap"), ConfigError);
  CHECK_THROWS_WITH_AS(sector_phase({{0.0, 3.2, 0.0}, {3.1, kTwoPi, 1.0}}), doctest::Contains("overlap"), ConfigError);
  CHECK_THROWS_AS(sector_phase({{0.5, kTwoPi, 0.0}}), ConfigError);
  CHECK_THROWS_AS(sector_phase({}), ConfigError);
}

TEST_CASE("bitmap lookup is nearest pixel with phase_lo outside") {
  // 2x2 raster over [-1, 1]^2; row 0 at the top
  Raster r{2, 2, {1.0, 0.0, 0.0, 0.5}};
  const PhaseMask m = bitmap_phase(r, 1.5, 0.25, 1.0);
  CHECK(m.evaluate({-0.5, 0.5}) == 1.5);
  CHECK(m.evaluate({0.5, 0.5}) == 0.25);
  CHECK(m.evaluate({0.5, -0.5}) == 1.5);  // 0.5 counts as set
  CHECK(m.evaluate({3.0, 0.0}) == 0.25);
  CHECK_THROWS_AS(bitmap_phase(Raster{}, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(bitmap_phase(Raster{1, 1, {1.5}}, 1.0, 0.0), ConfigError);
}

TEST_CASE("rasterize follows grid orientation") {
  const PhaseMask m = sector_phase({{0.0, kPi, 1.0}, {kPi, kTwoPi, -1.0}});
  const Field2D f = rasterize(m, Grid(8, 1.0));
  CHECK(f(0, 4) == 1.0);   // top half: angles in (0, pi)
  CHECK(f(7, 4) == -1.0);  // bottom half
}
