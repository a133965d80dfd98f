#include <doctest.h>

#include <cmath>
#include <numeric>

#include "biphoton/analysis.hpp"
#include "biphoton/error.hpp"
#include "biphoton/measurement.hpp"

using namespace biphoton;

namespace {

DetectorConfig small_detector(std::uint64_t seed, unsigned threads = 1) {
  DetectorConfig d;
  d.grid = Grid(64, 4.0);
  d.rng_seed = seed;
  d.threads = threads;
  return d;
}

// Mean of cos(2 m phi) over a sector of the given width, by midpoint quadrature.
double contrast_quadrature(int m, double width) {
  constexpr int n = 100000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::cos(2.0 * m * (-0.5 * width + (i + 0.5) * width / n));
  return acc / n;
}

}  // namespace

TEST_CASE("mask contrast agrees with quadrature") {
  CHECK(mask_average_contrast(2, kPi / 4) == doctest::Approx(2.0 / kPi).epsilon(1e-9));
  CHECK(mask_average_contrast(2, kPi / 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mask_average_contrast(0, 1.0) == 1.0);
  for (int m = -3; m <= 3; ++m)
    for (double w : {0.05, kPi / 4, 1.0, kPi, kTwoPi})
      CHECK(mask_average_contrast(m, w) == doctest::Approx(contrast_quadrature(m, w)).epsilon(1e-6));
  CHECK_THROWS_AS(mask_average_contrast(1, 0.0), ConfigError);
}

TEST_CASE("sector mask geometry") {
  const SectorMask m(kPi / 2, kPi / 4);
  CHECK(m.passes(Point2::polar(1.0, kPi / 2 + 0.3)));
  CHECK_FALSE(m.passes(Point2::polar(1.0, kPi / 2 + 0.5)));
  const SectorMask wrap(0.0, 0.4);
  CHECK(wrap.passes(Point2::polar(1.0, -0.1)));
  CHECK(wrap.passes(Point2::polar(1.0, kTwoPi - 0.1)));
  CHECK_FALSE(wrap.may_intersect({1.0, 0.5}, 0.2, 0.2));
  CHECK(wrap.may_intersect({1.0, 0.15}, 0.2, 0.2));
  CHECK_THROWS_AS(SectorMask(0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(SectorMask(0.0, 7.0), ConfigError);
  CHECK_THROWS_AS(SectorMask(0.0, 1.0, 2.0, 1.0), ConfigError);
}

TEST_CASE("herald fraction is width / 2 pi in pair mode") {
  const auto st = oam_state(2, 2, Sign::plus);
  const double width = kPi / 4;
  const auto img = run_heralded_imaging(st, SectorMask(0.3, width), 400'000, small_detector(11), HeraldMode::pairs);
  const double p = width / kTwoPi;
  const double n = static_cast<double>(img.n_pairs);
  const double se = std::sqrt(p * (1 - p) / n);
  CHECK(img.n_pairs == 400'000);
  CHECK(std::abs(img.n_heralds / n - p) < 3 * se);
}

TEST_CASE("herald mode and pair mode sample the same conditional image") {
  const auto st = oam_state(1, 2, Sign::minus);
  const SectorMask mask(1.0, kPi / 6);
  const auto a = run_heralded_imaging(st, mask, 60'000, small_detector(21), HeraldMode::heralds);
  const auto b = run_heralded_imaging(st, mask, 720'000, small_detector(22), HeraldMode::pairs);
  CHECK(a.n_heralds == 60'000);
  const auto bins = azimuthal_binning(a.grid, Annulus(0.2, 2.0), 36);
  const auto ta = binned_totals(a.as_field(), bins);
  const auto tb = binned_totals(b.as_field(), bins);
  const ChiSquare chi = chi_square_homogeneity(ta, tb);
  CHECK(chi.p_value > 0.001);
}

TEST_CASE("imaging is deterministic and independent of thread count") {
  const auto st = oam_state(2, 1, Sign::plus);
  const SectorMask mask(0.5, kPi / 4);
  const auto a = run_heralded_imaging(st, mask, 100'000, small_detector(5, 1));
  const auto b = run_heralded_imaging(st, mask, 100'000, small_detector(5, 4));
  const auto c = run_heralded_imaging(st, mask, 100'000, small_detector(6, 1));
  CHECK(a.counts == b.counts);
  CHECK(a.n_heralds == b.n_heralds);
  CHECK(a.counts != c.counts);
  const auto s1 = run_singles_imaging(st, 70'000, small_detector(5, 1));
  const auto s2 = run_singles_imaging(st, 70'000, small_detector(5, 3));
  CHECK(s1.counts == s2.counts);
}

TEST_CASE("efficiency thins and background adds counts") {
  const auto st = oam_state(1, 1, Sign::plus);
  auto det = small_detector(8);
  const auto full = run_singles_imaging(st, 100'000, det);
  det.efficiency = 0.5;
  const auto half = run_singles_imaging(st, 100'000, det);
  CHECK(std::abs(static_cast<double>(half.n_recorded) / full.n_recorded - 0.5) < 0.01);
  det.efficiency = 1.0;
  det.background_rate = 5000.0;
  const auto bg = run_singles_imaging(st, 100'000, det);
  CHECK(bg.n_background > 4500);
  CHECK(bg.n_recorded == std::accumulate(bg.counts.begin(), bg.counts.end(), std::uint64_t{0}));
  det.efficiency = 0.0;
  CHECK_THROWS_AS(run_singles_imaging(st, 10, det), ConfigError);
}

TEST_CASE("imaging rejects empty budgets and masks that pass nothing") {
  const auto st = oam_state(1, 1, Sign::plus);
  CHECK_THROWS_AS(run_heralded_imaging(st, SectorMask(0.0, 1.0), 0, small_detector(1)), ConfigError);
  CHECK_THROWS_AS(run_heralded_imaging(st, SectorMask(0.0, 1.0, 10.0, 11.0), 100, small_detector(1)), ConfigError);
  CHECK_THROWS_AS(run_singles_imaging(st, 0, small_detector(1)), ConfigError);
}

TEST_CASE("expected singles image matches Monte Carlo") {
  const auto st = oam_state(2, 2, Sign::plus);
  const auto det = small_detector(31);
  const Field2D expected = expected_singles_image(st, det.grid);
  CHECK(expected.sum() == doctest::Approx(1.0).epsilon(1e-6));
  const auto img = run_singles_imaging(st, 300'000, det);
  const auto bins = azimuthal_binning(det.grid, Annulus(0.3, 2.0), 30);
  const auto obs = binned_totals(img.as_field(), bins);
  auto exp = binned_totals(expected, bins);
  const double so = std::accumulate(obs.begin(), obs.end(), 0.0);
  const double se = std::accumulate(exp.begin(), exp.end(), 0.0);
  for (double& e : exp) e *= so / se;
  CHECK(chi_square(obs, exp).p_value > 0.001);
}

TEST_CASE("image merge adds counts") {
  const auto st = oam_state(1, 1, Sign::plus);
  auto a = run_singles_imaging(st, 1000, small_detector(1));
  const auto b = run_singles_imaging(st, 1000, small_detector(2));
  const auto total = a.n_recorded + b.n_recorded;
  a += b;
  CHECK(a.n_recorded == total);
  CoincidenceImage other;
  CHECK_THROWS_AS(a += other, ConfigError);
}
