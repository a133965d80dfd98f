#include <doctest.h>

#include "biphoton/designer.hpp"
#include "biphoton/error.hpp"

using namespace biphoton;

TEST_CASE("binary mask puts the pattern on phase_hi") {
  const Raster n = letter_n_raster();
  CHECK(n.rows == 16);
  CHECK(n.cols == 16);
  const MaskPair pair = design_binary_mask(n, kPi / 2, 0.0, 1.0, "builtin:N");
  // left stroke of the N sits at columns 2-3, rows 2-12
  const Grid g(16, 1.0);
  CHECK(pair.mask.evaluate(g.center(6, 2)) == doctest::Approx(kPi / 2));
  CHECK(pair.mask.evaluate(g.center(0, 0)) == 0.0);
  CHECK(pair.companion.evaluate(g.center(6, 2)) == doctest::Approx(-kPi / 2));
  CHECK(pair.companion.conjugated());
}

TEST_CASE("predicted levels follow 1 + sV cos(2 Phi_A - 2 Phi_B)") {
  const std::vector<double> a{0.0, kPi / 2};
  const auto zero = predict_levels(a, 0.0, Sign::plus, 1.0);
  CHECK(zero[0].level == doctest::Approx(2.0));
  CHECK(zero[1].level == doctest::Approx(0.0));
  const auto quarter = predict_levels(a, kPi / 4, Sign::plus, 1.0);
  CHECK(quarter[0].level == doctest::Approx(1.0));
  CHECK(quarter[1].level == doctest::Approx(1.0));
  const auto flipped = predict_levels(a, 0.0, Sign::minus, 0.5);
  CHECK(flipped[0].level == doctest::Approx(0.5));
}

TEST_CASE("schedule covers every idler phase of a ternary mask") {
  const std::vector<double> phases{kPi / 4, kPi / 2, 0.0};
  const ScanSchedule s = scanning_schedule(equal_sector_phase(phases));
  REQUIRE(s.entries.size() == 3);
  CHECK(s.entries[0].phase_b == doctest::Approx(0.0));
  CHECK(s.entries[1].phase_b == doctest::Approx(kPi / 4));
  CHECK(s.entries[2].phase_b == doctest::Approx(kPi / 2));
  CHECK(s.entries[0].orientation == doctest::Approx(5 * kPi / 3));
  CHECK(s.entries[1].orientation == doctest::Approx(kPi / 3));
  CHECK(s.entries[2].orientation == doctest::Approx(kPi));
  for (const auto& e : s.entries) {
    CHECK_FALSE(e.narrow_sector);
    CHECK(e.mixing_fraction == 0.0);
    for (std::size_t k = 0; k < e.levels.size(); ++k)
      CHECK(e.effective[k].level == doctest::Approx(e.levels[k].level).epsilon(1e-12));
  }
  CHECK(s.entries[0].label == "phase_b=0.0000");
}

TEST_CASE("narrow sectors mix neighbouring phases") {
  // eight sectors of width pi/4 alternating 0 and pi/2; herald pi/2 wide
  std::vector<double> phases;
  for (int i = 0; i < 8; ++i) phases.push_back(i % 2 ? kPi / 2 : 0.0);
  ScheduleOptions opt;
  opt.herald_width = kPi / 2;
  const ScanSchedule s = scanning_schedule(equal_sector_phase(phases), opt);
  REQUIRE(s.entries.size() == 2);
  for (const auto& e : s.entries) {
    CHECK(e.narrow_sector);
    CHECK(e.mixing_fraction == doctest::Approx(0.5));
    CHECK(e.effective[0].level == doctest::Approx(1.0).epsilon(1e-2));
  }
}

TEST_CASE("schedule rejects non-sector idler masks") {
  CHECK_THROWS_AS(scanning_schedule(helical_phase(2)), ConfigError);
  ScheduleOptions bad;
  bad.herald_width = 0.0;
  const std::vector<double> phases{0.0, 1.0};
  CHECK_THROWS_AS(scanning_schedule(equal_sector_phase(phases), bad), ConfigError);
}
