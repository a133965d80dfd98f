#include "biphoton/state.hpp"

#include <algorithm>
#include <cmath>

#include "biphoton/error.hpp"

namespace biphoton {

struct BiphotonState::Data {
  AmplitudeEnvelope env_a;
  AmplitudeEnvelope env_b;
  PhaseMask mask_a;
  PhaseMask mask_b;
  Tables table_a;
  Tables table_b;
  double norm = 1.0;
};

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

BiphotonState::Tables build_tables(const AmplitudeEnvelope& env, const PhaseMask& mask,
                                   const Grid& grid) {
  BiphotonState::Tables t{grid, {}, {}, {}, {}, 0.0, 0.0, 0.0};
  const std::size_t n = grid.size();
  const double area = grid.pixel_area();
  t.density.resize(n);
  t.cdf.resize(n);
  t.cos2.resize(n);
  t.sin2.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = grid.center(i);
    const double d = env.density(p);
    const double phase = 2.0 * mask.evaluate(p);
    t.density[i] = d;
    t.cos2[i] = std::cos(phase);
    t.sin2[i] = std::sin(phase);
    acc += d * area;
    t.cdf[i] = acc;
    t.c2 += d * area * t.cos2[i];
    t.s2 += d * area * t.sin2[i];
  }
  t.mass = acc;
  if (!(t.mass > 0.0)) throw ConfigError("state: envelope has no support on the working grid");
  return t;
}

}  // namespace

Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t x = seed;
  std::uint64_t a = splitmix64(x);
  x ^= stream * 0xD1B54A32D192ED03ULL;
  std::uint64_t b = splitmix64(x);
  x ^= index * 0x8CB92BA72F3D8DD7ULL;
  std::uint64_t c = splitmix64(x);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return Rng(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t x = seed ^ (tag * 0xA0761D6478BD642FULL);
  splitmix64(x);
  return splitmix64(x);
}

const AmplitudeEnvelope& BiphotonState::envelope(Photon p) const {
  return p == Photon::signal ? data_->env_a : data_->env_b;
}
const PhaseMask& BiphotonState::mask(Photon p) const {
  return p == Photon::signal ? data_->mask_a : data_->mask_b;
}
const Grid& BiphotonState::grid(Photon p) const { return tables(p).grid; }
const BiphotonState::Tables& BiphotonState::tables(Photon p) const {
  return p == Photon::signal ? data_->table_a : data_->table_b;
}
double BiphotonState::norm() const { return data_->norm; }

double BiphotonState::interference(Point2 r, Point2 r_prime) const {
  const double delta = 2.0 * data_->mask_a.evaluate(r) - 2.0 * data_->mask_b.evaluate(r_prime);
  return 1.0 + as_double(sign_) * visibility_ * std::cos(delta);
}

Grid default_state_grid() { return Grid(128, 4.0); }

BiphotonState make_state(AmplitudeEnvelope env_a, AmplitudeEnvelope env_b, PhaseMask mask_a,
                         PhaseMask mask_b, Sign sign, double visibility, const Grid& grid_a,
                         const Grid& grid_b) {
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw ConfigError("state: visibility must lie in [0, 1]");
  auto table_a = build_tables(env_a, mask_a, grid_a);
  auto table_b = build_tables(env_b, mask_b, grid_b);
  // sum_p sum_q rho_A rho_B (1 + sV cos(2a - 2b)) via cos(a-b) = cos a cos b + sin a sin b
  const double norm = table_a.mass * table_b.mass +
                      as_double(sign) * visibility *
                          (table_a.c2 * table_b.c2 + table_a.s2 * table_b.s2);
  if (!(norm > 1e-12)) throw ConfigError("state: joint density vanishes everywhere (zero norm)");
  auto data = std::make_shared<BiphotonState::Data>(BiphotonState::Data{
      std::move(env_a), std::move(env_b), std::move(mask_a), std::move(mask_b),
      std::move(table_a), std::move(table_b), norm});
  return BiphotonState(std::move(data), sign, visibility);
}

BiphotonState oam_state(int m_a, int m_b, Sign sign, double visibility, const Grid& grid,
                        double waist) {
  return make_state(AmplitudeEnvelope::ring_gaussian(waist, m_a),
                    AmplitudeEnvelope::ring_gaussian(waist, m_b), helical_phase(m_a),
                    helical_phase(m_b), sign, visibility, grid, grid);
}

std::complex<double> wpf_amplitude(const BiphotonState& state, Point2 r, Point2 r_prime) {
  if (state.visibility() < 1.0)
    throw UnsupportedError("wpf_amplitude: a state with visibility < 1 has no single amplitude");
  const double delta =
      state.mask(Photon::signal).evaluate(r) - state.mask(Photon::idler).evaluate(r_prime);
  const double eta = state.envelope(Photon::signal).amplitude(r) *
                     state.envelope(Photon::idler).amplitude(r_prime);
  const std::complex<double> braces =
      std::polar(1.0, delta) + as_double(state.sign()) * std::polar(1.0, -delta);
  return eta / std::sqrt(2.0) * braces;
}

double joint_density(const BiphotonState& state, Point2 r, Point2 r_prime) {
  const double rho = state.envelope(Photon::signal).density(r) *
                     state.envelope(Photon::idler).density(r_prime);
  return std::max(0.0, rho * state.interference(r, r_prime) / state.norm());
}

double analytic_g2(const BiphotonState& state, Point2 r, Point2 r_prime) {
  return state.interference(r, r_prime);
}

DensityMap marginal_density(const BiphotonState& state, Photon which) {
  const auto& own = state.tables(which);
  const auto& other = state.tables(which == Photon::signal ? Photon::idler : Photon::signal);
  const double sv = as_double(state.sign()) * state.visibility();
  DensityMap out{own.grid, Field2D(own.grid.n_y(), own.grid.n_x()), 0.0};
  for (std::size_t i = 0; i < own.density.size(); ++i) {
    // cos(2a - 2b) and cos(2b - 2a) agree, so the formula is symmetric in A/B
    const double mixed = own.cos2[i] * other.c2 + own.sin2[i] * other.s2;
    out.values.data[i] = std::max(0.0, own.density[i] * (other.mass + sv * mixed) / state.norm());
  }
  out.total = out.values.sum() * own.grid.pixel_area();
  return out;
}

Point2 sample_envelope(const BiphotonState::Tables& t, Rng& rng) {
  const double u = uniform01(rng) * t.mass;
  auto it = std::upper_bound(t.cdf.begin(), t.cdf.end(), u);
  if (it == t.cdf.end()) --it;
  const auto index = static_cast<std::size_t>(it - t.cdf.begin());
  const Point2 c = t.grid.center(index);
  return {c.x + (uniform01(rng) - 0.5) * t.grid.dx(), c.y + (uniform01(rng) - 0.5) * t.grid.dy()};
}

std::pair<Point2, Point2> sample_pair(const BiphotonState& state, Rng& rng) {
  const auto& ta = state.tables(Photon::signal);
  const auto& tb = state.tables(Photon::idler);
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const Point2 r = sample_envelope(ta, rng);
    const Point2 rp = sample_envelope(tb, rng);
    if (2.0 * uniform01(rng) < state.interference(r, rp)) return {r, rp};
  }
  throw InternalError("sample_pair: rejection sampler exceeded the retry cap");
}

}  // namespace biphoton
