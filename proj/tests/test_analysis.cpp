#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>

#include "biphoton/analysis.hpp"
#include "biphoton/error.hpp"

using namespace biphoton;

namespace {

// Closed-form mean of 1 + c cos(k phi - theta) over [a, b].
double bin_mean(double c, int k, double theta, double a, double b) {
  return 1.0 + c * (std::sin(k * b - theta) - std::sin(k * a - theta)) / (k * (b - a));
}

CoherenceMap synthetic_map(std::size_t n_phi, std::size_t k, const std::function<double(double, double)>& f) {
  CoherenceMap m;
  m.kind = MapKind::g2;
  for (std::size_t i = 0; i < n_phi; ++i) m.phi.push_back((i + 0.5) * kTwoPi / n_phi);
  for (std::size_t j = 0; j < k; ++j) m.phi_prime.push_back(kTwoPi * j / k);
  m.values = Field2D(n_phi, k);
  m.counts = Field2D(n_phi, k, 1.0);
  m.column_valid.assign(k, true);
  m.column_heralds.assign(k, 1);
  for (std::size_t i = 0; i < n_phi; ++i)
    for (std::size_t j = 0; j < k; ++j) m.values(i, j) = f(m.phi[i], m.phi_prime[j]);
  return m;
}

}  // namespace

TEST_CASE("annulus and binning validation") {
  CHECK_THROWS_AS(Annulus(1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(Annulus(-0.1, 0.5), ConfigError);
  const Grid g(64, 4.0);
  CHECK_THROWS_AS(azimuthal_binning(g, Annulus(0.5, 1.0), 4), ConfigError);
  CHECK_THROWS_AS(azimuthal_binning(g, Annulus(0.0, 0.01), 16), RangeError);
  CHECK_THROWS_AS(unfold(Field2D(64, 64), g, Annulus(1.0, 4.5), 90, 8), RangeError);
  const auto a = auto_annulus(AmplitudeEnvelope::ring_gaussian(1.0, 2));
  CHECK(a.r_in == doctest::Approx(0.5));
  CHECK(a.r_out == doctest::Approx(2.0));
  const auto gauss = auto_annulus(AmplitudeEnvelope::gaussian(1.0));
  CHECK(gauss.r_in == doctest::Approx(0.25));
  CHECK(gauss.r_out == doctest::Approx(1.0));
}

TEST_CASE("extract_g2 reproduces closed-form bin means from polar quadrature") {
  constexpr std::size_t n = 360;
  const double theta = 0.7;
  std::vector<double> p_ab(n, 0.0), p_a(n, 0.0);
  constexpr int radial = 200, sub = 16;
  for (std::size_t b = 0; b < n; ++b)
    for (int s = 0; s < sub; ++s) {
      const double phi = (b + (s + 0.5) / sub) * kTwoPi / n;
      for (int q = 0; q < radial; ++q) {
        const double r = 0.5 + (q + 0.5) * 1.5 / radial;
        const double w = r * r * r * r * std::exp(-2 * r * r) * r;  // rho(r) r dr
        p_a[b] += w;
        p_ab[b] += w * (1.0 + std::cos(4 * phi - theta));
      }
    }
  const auto g = extract_g2(p_ab, p_a);
  double worst = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    const double a = b * kTwoPi / n, e = (b + 1) * kTwoPi / n;
    worst = std::max(worst, std::abs(g.values[b] - bin_mean(1.0, 4, theta, a, e)));
    CHECK(g.status[b] == BinStatus::ok);
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("extract_g2 flags empty bins") {
  const std::vector<double> ab{1, 0, 2, 3}, a{1, 0, 0, 4};
  const auto g = extract_g2(ab, a, 2.0);
  CHECK(g.status[0] == BinStatus::ok);
  CHECK(g.status[1] == BinStatus::no_data);
  CHECK(g.status[2] == BinStatus::undefined_ratio);
  CHECK(std::isnan(g.values[2]));
  CHECK(g.values[0] == doctest::Approx(2.0 * (1.0 / 6.0) / (1.0 / 5.0)));
  CHECK_THROWS_AS(extract_g2(AzimuthalProfile{{1, 2}, false}, AzimuthalProfile{{1, 2}, true}), ConfigError);
}

TEST_CASE("unfold then refold recovers the annulus") {
  const Grid g(256, 4.0);
  Field2D img(256, 256);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point2 p = g.center(i);
    const double r = p.radius();
    img.data[i] = r * r * std::exp(-r * r) * (1.0 + 0.8 * std::cos(4 * p.angle()));
  }
  const Annulus ann(0.5, 2.0);
  const Field2D unf = unfold(img, g, ann, 360, 32);
  CHECK(unf.rows == 32);
  CHECK(unf.cols == 360);
  const Field2D back = refold(unf, g, ann);
  double err = 0.0, total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.center(i).radius();
    if (!ann.contains(r)) {
      CHECK(back.data[i] == 0.0);
      continue;
    }
    err += std::abs(back.data[i] - img.data[i]);
    total += img.data[i];
  }
  CHECK(err / total < 0.02);
}

TEST_CASE("fringe count finds the dominant harmonic") {
  Rng rng = substream(12, 0, 0);
  for (int k = 1; k <= 12; ++k) {
    std::vector<double> p(90);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double phi = (i + 0.5) * kTwoPi / 90;
      p[i] = 1.0 + 0.6 * std::cos(k * phi + 0.4) + 0.1 * (uniform01(rng) - 0.5);
    }
    const auto c = fringe_count(p);
    REQUIRE(c.has_value());
    CHECK(*c == k);
  }
  std::vector<double> flat(90, 1.0);
  CHECK_FALSE(fringe_count(flat).has_value());
  CHECK_THROWS_AS(fringe_count(std::vector<double>(8, 1.0)), ConfigError);
}

TEST_CASE("pure noise rarely yields a map fringe count") {
  Rng rng = substream(13, 0, 0);
  int found = 0;
  for (int t = 0; t < 20; ++t) {
    const auto m = synthetic_map(90, 24, [&](double, double) { return 1.0 + 0.1 * (uniform01(rng) - 0.5); });
    found += fringe_count(m).has_value();
  }
  CHECK(found <= 1);
}

TEST_CASE("slope sign of synthetic maps") {
  for (int ma = 1; ma <= 3; ++ma)
    for (int mb = 1; mb <= 3; ++mb) {
      const auto up = synthetic_map(90, 24, [&](double p, double q) { return 1 + std::cos(2 * ma * p - 2 * mb * q); });
      const auto down = synthetic_map(90, 24, [&](double p, double q) { return 1 + std::cos(2 * ma * p + 2 * mb * q); });
      CHECK(fringe_slope_sign(up) == 1);
      CHECK(fringe_slope_sign(down) == -1);
      CHECK(*fringe_count(up) == 2 * ma);
    }
  const auto flat = synthetic_map(90, 24, [](double, double) { return 1.0; });
  CHECK(fringe_slope_sign(flat) == 0);
}

TEST_CASE("sign flip shifts a map without changing its slope") {
  // the - map is the + map shifted by pi / (2 m_A) along phi
  const int ma = 2, mb = 3;
  const auto plus = synthetic_map(90, 24, [&](double p, double q) { return 1 + std::cos(2 * ma * p - 2 * mb * q); });
  const auto minus = synthetic_map(90, 24, [&](double p, double q) { return 1 - std::cos(2 * ma * p - 2 * mb * q); });
  const auto shifted = synthetic_map(90, 24, [&](double p, double q) {
    return 1 + std::cos(2 * ma * (p + kPi / (2 * ma)) - 2 * mb * q);
  });
  for (std::size_t i = 0; i < minus.values.data.size(); ++i)
    CHECK(minus.values.data[i] == doctest::Approx(shifted.values.data[i]));
  CHECK(fringe_slope_sign(plus) == fringe_slope_sign(minus));
}

TEST_CASE("compare_to_analytic recovers contrast from an ideal map") {
  const auto st = oam_state(2, 1, Sign::minus, 0.6);
  const double width = kPi / 8;
  const double c = 0.6 * mask_average_contrast(1, width);
  const double w = kTwoPi / 90;
  const auto map = synthetic_map(90, 24, [&](double p, double q) {
    const double a = p - 0.5 * w, b = p + 0.5 * w;
    return 1.0 - c * (std::sin(4 * b - 2 * q) - std::sin(4 * a - 2 * q)) / (4 * w);
  });
  const auto cmp = compare_to_analytic(map, st, width);
  CHECK(cmp.rmse < 1e-12);
  CHECK(cmp.fitted_contrast == doctest::Approx(c).epsilon(1e-9));
  CHECK(std::abs(cmp.fitted_quadrature) < 1e-9);
  CHECK(cmp.harmonic == 4);
  CHECK(cmp.cells == 90 * 24);
}

TEST_CASE("end-to-end scan recovers the fringe law") {
  const auto st = oam_state(2, 1, Sign::plus);
  DetectorConfig det;
  det.grid = Grid(128, 4.0);
  det.rng_seed = 77;
  det.threads = 1;
  ScanOptions opt;
  opt.n_bins = 60;
  opt.singles_events = 200'000;
  const auto scan = scan_g2_matrix(st, kPi / 30, 8, 20'000, det, opt);
  CHECK(scan.g2.n_columns() == 8);
  CHECK(*fringe_count(scan.g2) == 4);
  CHECK(fringe_slope_sign(scan.g2) == 1);
  CHECK(scan.G2.values.max() == doctest::Approx(1.0));
  for (std::size_t j = 0; j < 8; ++j) CHECK(scan.g2.column_valid[j]);
  CHECK(compare_to_analytic(scan.g2, st, kPi / 30).rmse < 0.2);
  CHECK_THROWS_AS(scan_g2_matrix(st, kPi / 30, 3, 100, det), ConfigError);
}

TEST_CASE("classify_by_phase keeps only pure pixels") {
  const PhaseMask halves = sector_phase({{0.0, kPi, 0.0}, {kPi, kTwoPi, 1.0}});
  const Grid g(32, 2.0);
  const auto b = classify_by_phase(g, halves, 1.5);
  CHECK(b.n_bins == 2);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point2 c = g.center(i);
    if (b.labels[i] < 0) continue;
    ++kept;
    CHECK(c.radius() <= 1.5);
    CHECK(std::abs(c.y) > 0.5 * g.dy() - 1e-12);
    CHECK(halves.evaluate(c) == halves.phase_levels()[static_cast<std::size_t>(b.labels[i])]);
  }
  CHECK(kept > 100);
  CHECK_THROWS_AS(classify_by_phase(g, helical_phase(1), 1.0), ConfigError);
}

TEST_CASE("statistics helpers") {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{4, 3, 2, 1}, k{5, 5, 5, 5};
  CHECK(pearson(a, b) == doctest::Approx(1.0));
  CHECK(pearson(a, c) == doctest::Approx(-1.0));
  CHECK(pearson(a, k) == 0.0);
  const std::vector<double> o{100, 110, 95, 105}, e{102.5, 102.5, 102.5, 102.5};
  const auto chi = chi_square(o, e);
  CHECK(chi.dof == 3);
  CHECK(chi.statistic == doctest::Approx((6.25 + 56.25 + 56.25 + 6.25) / 102.5));
  CHECK(chi.p_value > 0.5);
  const std::vector<double> x{1000, 2000, 3000}, y{500, 1000, 1500}, z{1500, 1000, 500};
  CHECK(chi_square_homogeneity(x, y).p_value > 0.99);
  CHECK(chi_square_homogeneity(x, z).p_value < 1e-6);
}
