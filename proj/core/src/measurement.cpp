#include "biphoton/measurement.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "biphoton/error.hpp"

namespace biphoton {
namespace {

enum Stream : std::uint64_t { kHeraldStream = 1, kPairStream = 2, kSinglesStream = 3, kBackgroundStream = 4 };

// Restricted idler proposal table: pixels that can intersect the mask.
struct HeraldTable {
  const BiphotonState::Tables* idler = nullptr;
  std::vector<std::size_t> pixels;
  std::vector<double> cdf;
};

HeraldTable build_herald_table(const BiphotonState& state, const SectorMask& mask) {
  HeraldTable h;
  h.idler = &state.tables(Photon::idler);
  const Grid& g = h.idler->grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = h.idler->density[i];
    if (w <= 0.0 || !mask.may_intersect(g.center(i), g.dx(), g.dy())) continue;
    acc += w;
    h.pixels.push_back(i);
    h.cdf.push_back(acc);
  }
  return h;
}

Point2 sample_restricted(const HeraldTable& h, const SectorMask& mask, Rng& rng) {
  const Grid& g = h.idler->grid;
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    const double u = uniform01(rng) * h.cdf.back();
    auto it = std::upper_bound(h.cdf.begin(), h.cdf.end(), u);
    if (it == h.cdf.end()) --it;
    const Point2 c = g.center(h.pixels[static_cast<std::size_t>(it - h.cdf.begin())]);
    const Point2 p{c.x + (uniform01(rng) - 0.5) * g.dx(), c.y + (uniform01(rng) - 0.5) * g.dy()};
    if (mask.passes(p)) return p;
  }
  throw InternalError("heralded imaging: idler proposal never passed the mask");
}

unsigned worker_count(const DetectorConfig& det, std::uint64_t blocks) {
  unsigned n = det.threads != 0 ? det.threads : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(n, blocks));
}

// Runs `body(rng, block_events, counts, tally)` over fixed-size event blocks.
// Each block owns a substream keyed by its index, so the summed image does not
// depend on how blocks are spread over threads.
struct Tally {
  std::uint64_t heralds = 0;
  std::uint64_t recorded = 0;
  std::uint64_t pairs = 0;
};

template <class Body>
void run_blocks(std::uint64_t n_events, std::uint64_t stream, const DetectorConfig& det,
                std::vector<std::uint32_t>& counts, Tally& total, Body body) {
  const std::uint64_t blocks = (n_events + kEventBlock - 1) / kEventBlock;
  const unsigned workers = worker_count(det, blocks);
  std::atomic<std::uint64_t> next{0};
  std::vector<std::vector<std::uint32_t>> local(workers, std::vector<std::uint32_t>(counts.size(), 0));
  std::vector<Tally> tallies(workers);
  std::vector<std::exception_ptr> errors(workers);

  auto work = [&](unsigned w) {
    try {
      for (std::uint64_t b = next++; b < blocks; b = next++) {
        Rng rng = substream(det.rng_seed, stream, b);
        const std::uint64_t begin = b * kEventBlock;
        const std::uint64_t len = std::min(kEventBlock, n_events - begin);
        body(rng, len, local[w], tallies[w]);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (unsigned w = 0; w < workers; ++w) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[w][i];
    total.heralds += tallies[w].heralds;
    total.recorded += tallies[w].recorded;
    total.pairs += tallies[w].pairs;
  }
}

bool record(const Grid& camera, Point2 p, std::vector<std::uint32_t>& counts) {
  std::size_t row = 0, col = 0;
  if (!camera.locate(p, row, col)) return false;
  ++counts[camera.index(row, col)];
  return true;
}

void add_background(CoincidenceImage& img, const DetectorConfig& det) {
  if (det.background_rate <= 0.0) return;
  Rng rng = substream(det.rng_seed, kBackgroundStream, 0);
  std::poisson_distribution<std::uint64_t> poisson(det.background_rate);
  const std::uint64_t n = poisson(rng);
  const auto pixels = static_cast<double>(img.counts.size());
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto idx = std::min(img.counts.size() - 1, static_cast<std::size_t>(uniform01(rng) * pixels));
    ++img.counts[idx];
  }
  img.n_background = n;
  img.n_recorded += n;
}

}  // namespace

SectorMask::SectorMask(double center_angle, double width, double r_min, double r_max)
    : center_(wrap_angle(center_angle)), width_(width), r_min_(r_min), r_max_(r_max) {
  if (!(width > 0.0 && width <= kTwoPi)) throw ConfigError("sector mask: width must lie in (0, 2pi]");
  if (!std::isfinite(center_angle)) throw ConfigError("sector mask: center angle must be finite");
  if (!(r_min >= 0.0) || !(r_max > r_min)) throw ConfigError("sector mask: need 0 <= r_min < r_max");
}

bool SectorMask::passes(Point2 p) const {
  const double r = p.radius();
  if (r < r_min_ || r > r_max_) return false;
  if (width_ >= kTwoPi) return true;
  return std::abs(wrap_phase(p.angle() - center_)) <= 0.5 * width_;
}

bool SectorMask::may_intersect(Point2 c, double dx, double dy) const {
  const double half_diag = 0.5 * std::hypot(dx, dy);
  const double r = c.radius();
  if (r - half_diag > r_max_ || r + half_diag < r_min_) return false;
  if (width_ >= kTwoPi || r <= half_diag) return true;
  const double spread = std::asin(std::min(1.0, half_diag / r));
  return std::abs(wrap_phase(c.angle() - center_)) <= 0.5 * width_ + spread;
}

void DetectorConfig::validate() const {
  if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ConfigError("detector: efficiency must lie in (0, 1]");
  if (!(background_rate >= 0.0) || !std::isfinite(background_rate))
    throw ConfigError("detector: background_rate must be >= 0");
}

Field2D CoincidenceImage::as_field() const {
  Field2D f(grid.n_y(), grid.n_x());
  for (std::size_t i = 0; i < counts.size(); ++i) f.data[i] = counts[i];
  return f;
}

CoincidenceImage& CoincidenceImage::operator+=(const CoincidenceImage& other) {
  if (!(grid == other.grid)) throw ConfigError("image merge: grids differ");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  n_heralds += other.n_heralds;
  n_recorded += other.n_recorded;
  n_background += other.n_background;
  n_pairs += other.n_pairs;
  return *this;
}

CoincidenceImage run_heralded_imaging(const BiphotonState& state, const SectorMask& mask,
                                      std::uint64_t n_events, const DetectorConfig& det,
                                      HeraldMode mode) {
  if (n_events == 0) throw ConfigError("heralded imaging: n_events must be >= 1");
  det.validate();
  const HeraldTable table = build_herald_table(state, mask);
  if (table.pixels.empty()) throw ConfigError("heralded imaging: sector mask passes zero grid area");

  CoincidenceImage img;
  img.grid = det.grid;
  img.counts.assign(det.grid.size(), 0);
  img.mask = mask;
  img.seed = det.rng_seed;
  const auto& signal = state.tables(Photon::signal);
  const double eff = det.efficiency;
  Tally tally;

  if (mode == HeraldMode::heralds) {
    run_blocks(n_events, kHeraldStream, det, img.counts, tally,
               [&](Rng& rng, std::uint64_t len, std::vector<std::uint32_t>& counts, Tally& t) {
                 for (std::uint64_t e = 0; e < len; ++e) {
                   Point2 r, rp;
                   int attempt = 0;
                   do {
                     if (++attempt > kMaxRejections)
                       throw InternalError("heralded imaging: rejection sampler exceeded the retry cap");
                     rp = sample_restricted(table, mask, rng);
                     r = sample_envelope(signal, rng);
                   } while (!(2.0 * uniform01(rng) < state.interference(r, rp)));
                   ++t.heralds;
                   if (eff >= 1.0 || uniform01(rng) < eff)
                     if (record(det.grid, r, counts)) ++t.recorded;
                 }
               });
  } else {
    run_blocks(n_events, kPairStream, det, img.counts, tally,
               [&](Rng& rng, std::uint64_t len, std::vector<std::uint32_t>& counts, Tally& t) {
                 for (std::uint64_t e = 0; e < len; ++e) {
                   const auto [r, rp] = sample_pair(state, rng);
                   ++t.pairs;
                   if (!mask.passes(rp)) continue;
                   ++t.heralds;
                   if (eff >= 1.0 || uniform01(rng) < eff)
                     if (record(det.grid, r, counts)) ++t.recorded;
                 }
               });
  }
  img.n_heralds = tally.heralds;
  img.n_recorded = tally.recorded;
  img.n_pairs = tally.pairs;
  add_background(img, det);
  return img;
}

CoincidenceImage run_singles_imaging(const BiphotonState& state, std::uint64_t n_events,
                                     const DetectorConfig& det) {
  if (n_events == 0) throw ConfigError("singles imaging: n_events must be >= 1");
  det.validate();
  CoincidenceImage img;
  img.grid = det.grid;
  img.counts.assign(det.grid.size(), 0);
  img.seed = det.rng_seed;
  const double eff = det.efficiency;
  Tally tally;
  run_blocks(n_events, kSinglesStream, det, img.counts, tally,
             [&](Rng& rng, std::uint64_t len, std::vector<std::uint32_t>& counts, Tally& t) {
               for (std::uint64_t e = 0; e < len; ++e) {
                 const Point2 r = sample_pair(state, rng).first;
                 ++t.pairs;
                 ++t.heralds;
                 if (eff >= 1.0 || uniform01(rng) < eff)
                   if (record(det.grid, r, counts)) ++t.recorded;
               }
             });
  img.n_heralds = tally.heralds;
  img.n_recorded = tally.recorded;
  img.n_pairs = tally.pairs;
  add_background(img, det);
  return img;
}

Field2D expected_singles_image(const BiphotonState& state, const Grid& camera) {
  const DensityMap marginal = marginal_density(state, Photon::signal);
  const Grid& g = marginal.grid;
  const double area = g.pixel_area();
  Field2D out(camera.n_y(), camera.n_x());
  const double cam_left = camera.origin().x - camera.extent_x();
  const double cam_top = camera.origin().y + camera.extent_y();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double mass = marginal.values.data[i] * area;
    if (mass <= 0.0) continue;
    const Point2 c = g.center(i);
    const double x0 = c.x - 0.5 * g.dx(), x1 = c.x + 0.5 * g.dx();
    const double y0 = c.y - 0.5 * g.dy(), y1 = c.y + 0.5 * g.dy();
    // camera columns/rows overlapping [x0, x1] x [y0, y1]
    const double fc0 = (x0 - cam_left) / camera.dx(), fc1 = (x1 - cam_left) / camera.dx();
    const double fr0 = (cam_top - y1) / camera.dy(), fr1 = (cam_top - y0) / camera.dy();
    const auto lo = [](double f) { return static_cast<long>(std::floor(f)); };
    for (long row = std::max(0L, lo(fr0)); row <= std::min<long>(camera.n_y() - 1, lo(fr1)); ++row) {
      const double oy = std::min(fr1, row + 1.0) - std::max(fr0, static_cast<double>(row));
      if (oy <= 0.0) continue;
      for (long col = std::max(0L, lo(fc0)); col <= std::min<long>(camera.n_x() - 1, lo(fc1)); ++col) {
        const double ox = std::min(fc1, col + 1.0) - std::max(fc0, static_cast<double>(col));
        if (ox <= 0.0) continue;
        out(static_cast<std::size_t>(row), static_cast<std::size_t>(col)) +=
            mass * (ox * camera.dx()) * (oy * camera.dy()) / area;
      }
    }
  }
  const double total = marginal.total;
  if (total > 0.0)
    for (double& v : out.data) v /= total;
  return out;
}

double mask_average_contrast(int m_b, double width) {
  if (!(width > 0.0 && width <= kTwoPi)) throw ConfigError("mask_average_contrast: width must lie in (0, 2pi]");
  if (m_b == 0) return 1.0;
  const double x = static_cast<double>(m_b) * width;
  return std::sin(x) / x;
}

}  // namespace biphoton
