#include <doctest.h>

#include <cmath>
#include <set>

#include "biphoton/error.hpp"
#include "biphoton/state.hpp"

using namespace biphoton;

namespace {

Point2 random_point(Rng& rng, double half = 2.5) {
  return {(uniform01(rng) - 0.5) * 2 * half, (uniform01(rng) - 0.5) * 2 * half};
}

}  // namespace

TEST_CASE("joint density normalizes by brute-force double sum") {
  const Grid ga(24, 3.0), gb(20, 3.0);
  const std::vector<double> pb{kPi / 4, kPi / 2, 0.0};
  for (Sign s : {Sign::plus, Sign::minus})
    for (double v : {1.0, 0.4}) {
      const auto st = make_state(AmplitudeEnvelope::ring_gaussian(1.0, 1), AmplitudeEnvelope::gaussian(1.0),
                                 sector_phase({{0.0, kPi, 0.0}, {kPi, kTwoPi, kPi / 2}}), equal_sector_phase(pb),
                                 s, v, ga, gb);
      double sum = 0.0;
      for (std::size_t i = 0; i < ga.size(); ++i)
        for (std::size_t j = 0; j < gb.size(); ++j) sum += joint_density(st, ga.center(i), gb.center(j));
      CHECK(sum * ga.pixel_area() * gb.pixel_area() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("zero-norm state and bad visibility are rejected") {
  const auto env = AmplitudeEnvelope::gaussian(1.0);
  // uniform phases with sign - and V = 1 cancel everywhere
  CHECK_THROWS_AS(make_state(env, env, PhaseMask{}, PhaseMask{}, Sign::minus, 1.0), ConfigError);
  CHECK_THROWS_AS(make_state(env, env, PhaseMask{}, PhaseMask{}, Sign::plus, 1.5), ConfigError);
  CHECK_THROWS_AS(make_state(env, env, PhaseMask{}, PhaseMask{}, Sign::plus, -0.1), ConfigError);
}

TEST_CASE("amplitude squared matches joint density for pure states") {
  const auto st = oam_state(2, 1, Sign::minus);
  Rng rng = substream(1, 2, 3);
  for (int i = 0; i < 200; ++i) {
    const Point2 a = random_point(rng), b = random_point(rng);
    CHECK(std::norm(wpf_amplitude(st, a, b)) / st.norm() == doctest::Approx(joint_density(st, a, b)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(wpf_amplitude(oam_state(1, 1, Sign::plus, 0.5), {1, 0}, {0, 1}), UnsupportedError);
}

TEST_CASE("state identities hold exactly") {
  Rng rng = substream(9, 0, 0);
  for (int ma = 1; ma <= 3; ++ma)
    for (int mb = 1; mb <= 3; ++mb) {
      const auto plus = oam_state(ma, mb, Sign::plus);
      const auto minus = oam_state(ma, mb, Sign::minus);
      const auto swapped = make_state(plus.envelope(Photon::idler), plus.envelope(Photon::signal),
                                      plus.mask(Photon::idler), plus.mask(Photon::signal), Sign::plus, 1.0);
      const double rot = kPi / (2.0 * ma);
      for (int i = 0; i < 100; ++i) {
        const Point2 a = random_point(rng), b = random_point(rng);
        const Point2 ar{a.x * std::cos(rot) - a.y * std::sin(rot), a.x * std::sin(rot) + a.y * std::cos(rot)};
        CHECK(std::abs(joint_density(minus, a, b) - joint_density(plus, ar, b)) < 1e-12);
        CHECK(std::abs(joint_density(plus, a, b) - joint_density(swapped, b, a)) < 1e-12);
        CHECK(analytic_g2(plus, a, b) + analytic_g2(minus, a, b) == doctest::Approx(2.0));
      }
    }
}

TEST_CASE("common mask offset is a global phase") {
  const auto env = AmplitudeEnvelope::ring_gaussian(1.0, 1);
  const std::vector<double> pa{0.0, 1.0, 2.0}, pb{0.5, -1.0};
  std::vector<double> qa, qb;
  for (double p : pa) qa.push_back(p + 2.2);
  for (double p : pb) qb.push_back(p + 2.2);
  const auto s1 = make_state(env, env, equal_sector_phase(pa), equal_sector_phase(pb), Sign::plus, 0.8);
  const auto s2 = make_state(env, env, equal_sector_phase(qa), equal_sector_phase(qb), Sign::plus, 0.8);
  Rng rng = substream(4, 4, 4);
  for (int i = 0; i < 300; ++i) {
    const Point2 a = random_point(rng), b = random_point(rng);
    CHECK(std::abs(joint_density(s1, a, b) - joint_density(s2, a, b)) < 1e-12);
  }
}

TEST_CASE("marginal equals the envelope for helical partners") {
  for (int mb : {1, 2, 3}) {
    const auto st = oam_state(2, mb, Sign::minus, 0.7);
    const auto m = marginal_density(st, Photon::signal);
    CHECK(m.total == doctest::Approx(1.0).epsilon(1e-9));
    const Field2D eta = envelope_density(st.envelope(Photon::signal), m.grid);
    for (std::size_t i = 0; i < eta.data.size(); ++i) CHECK(std::abs(m.values.data[i] - eta.data[i]) < 1e-9);
  }
}

TEST_CASE("substreams are reproducible and distinct") {
  Rng a = substream(5, 1, 7), b = substream(5, 1, 7), c = substream(5, 1, 8), d = substream(5, 2, 7);
  const auto x = a();
  CHECK(x == b());
  std::set<std::uint64_t> seen{x, c(), d()};
  CHECK(seen.size() == 3);
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("sampled pairs follow the interference factor") {
  // sign +, V = 1, m = 1: coincidences vanish where 2(phi - phi') = pi
  const auto st = oam_state(1, 1, Sign::plus);
  Rng rng = substream(3, 0, 0);
  double near_dark = 0.0, near_bright = 0.0;
  for (int i = 0; i < 200'000; ++i) {
    const auto [a, b] = sample_pair(st, rng);
    const double d = std::abs(wrap_phase(2.0 * (a.angle() - b.angle())));
    if (d > kPi - 0.2) near_dark += 1;
    if (d < 0.2) near_bright += 1;
  }
  CHECK(near_dark < 0.01 * near_bright);
}
