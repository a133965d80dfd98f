#include "biphoton/phase_mask.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biphoton/error.hpp"

namespace biphoton {
namespace {

constexpr double kEdgeTolerance = 1e-9;

double evaluate_kind(const PhaseMask::Helical& h, Point2 p) {
  return wrap_phase(static_cast<double>(h.m) * p.angle());
}

double evaluate_kind(const PhaseMask::Sector& s, Point2 p) {
  const double phi = p.angle();
  auto it = std::upper_bound(s.levels.begin(), s.levels.end(), phi,
                             [](double a, const SectorLevel& l) { return a < l.start; });
  // levels[0].start == 0 and phi >= 0, so `it` is never begin()
  return wrap_phase(std::prev(it)->phase);
}

double evaluate_kind(const PhaseMask::Bitmap& b, Point2 p) {
  const Raster& r = *b.raster;
  const double u = (p.x + b.half_width) / (2.0 * b.half_width);
  const double v = (b.half_width - p.y) / (2.0 * b.half_width);
  if (!(u >= 0.0 && u < 1.0 && v >= 0.0 && v < 1.0)) return wrap_phase(b.phase_lo);
  const auto col = std::min(r.cols - 1, static_cast<std::size_t>(u * static_cast<double>(r.cols)));
  const auto row = std::min(r.rows - 1, static_cast<std::size_t>(v * static_cast<double>(r.rows)));
  return wrap_phase(r.at(row, col) >= 0.5 ? b.phase_hi : b.phase_lo);
}

}  // namespace

double PhaseMask::evaluate(Point2 p) const {
  const double v = std::visit([p](const auto& k) { return evaluate_kind(k, p); }, kind_);
  return conjugated_ ? -v : v;
}

int PhaseMask::helical_charge() const {
  if (const auto* h = std::get_if<Helical>(&kind_)) return conjugated_ ? -h->m : h->m;
  return 0;
}

std::vector<double> PhaseMask::phase_levels() const {
  std::vector<double> out;
  auto push = [&](double raw) {
    double v = wrap_phase(raw);
    if (conjugated_) v = -v;
    for (double e : out)
      if (std::abs(wrap_phase(e - v)) < kEdgeTolerance) return;
    out.push_back(v);
  };
  if (const auto* s = std::get_if<Sector>(&kind_)) {
    for (const auto& l : s->levels) push(l.phase);
  } else if (const auto* b = std::get_if<Bitmap>(&kind_)) {
    push(b->phase_lo);
    push(b->phase_hi);
  }
  return out;
}

PhaseMask helical_phase(int m) { return PhaseMask(PhaseMask::Helical{m}); }

PhaseMask sector_phase(std::vector<SectorLevel> levels) {
  if (levels.empty()) throw ConfigError("sector mask: no levels given");
  std::sort(levels.begin(), levels.end(),
            [](const SectorLevel& a, const SectorLevel& b) { return a.start < b.start; });
  for (const auto& l : levels) {
    if (!std::isfinite(l.start) || !std::isfinite(l.end) || !std::isfinite(l.phase))
      throw ConfigError("sector mask: non-finite interval or phase");
    if (!(l.end > l.start)) throw ConfigError("sector mask: empty or reversed interval");
  }
  if (std::abs(levels.front().start) > kEdgeTolerance)
    throw ConfigError("sector mask: intervals do not cover [0, 2pi) (gap at 0)");
  if (std::abs(levels.back().end - kTwoPi) > kEdgeTolerance)
    throw ConfigError("sector mask: intervals do not cover [0, 2pi) (gap before 2pi)");
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const double gap = levels[i + 1].start - levels[i].end;
    if (gap > kEdgeTolerance) {
      std::ostringstream os;
      os << "sector mask: gap between " << levels[i].end << " and " << levels[i + 1].start;
      throw ConfigError(os.str());
    }
    if (gap < -kEdgeTolerance) {
      std::ostringstream os;
      os << "sector mask: intervals overlap near " << levels[i + 1].start;
      throw ConfigError(os.str());
    }
  }
  levels.front().start = 0.0;
  levels.back().end = kTwoPi;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) levels[i].end = levels[i + 1].start;
  return PhaseMask(PhaseMask::Sector{std::move(levels)});
}

PhaseMask equal_sector_phase(std::span<const double> phases) {
  if (phases.empty()) throw ConfigError("sector mask: no levels given");
  const double width = kTwoPi / static_cast<double>(phases.size());
  std::vector<SectorLevel> levels;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double start = static_cast<double>(i) * width;
    const double end = i + 1 == phases.size() ? kTwoPi : static_cast<double>(i + 1) * width;
    levels.push_back({start, end, phases[i]});
  }
  return sector_phase(std::move(levels));
}

PhaseMask bitmap_phase(Raster raster, double phase_hi, double phase_lo, double half_width,
                       std::string source) {
  if (raster.rows == 0 || raster.cols == 0 || raster.values.empty())
    throw ConfigError("bitmap mask: empty raster");
  if (raster.values.size() != raster.rows * raster.cols)
    throw ConfigError("bitmap mask: raster size does not match its dimensions");
  for (double v : raster.values)
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("bitmap mask: raster values must lie in [0, 1]");
  if (!(half_width > 0.0)) throw ConfigError("bitmap mask: footprint half-width must be positive");
  if (!std::isfinite(phase_hi) || !std::isfinite(phase_lo))
    throw ConfigError("bitmap mask: phases must be finite");
  PhaseMask::Bitmap b;
  b.raster = std::make_shared<const Raster>(std::move(raster));
  b.phase_hi = phase_hi;
  b.phase_lo = phase_lo;
  b.half_width = half_width;
  b.source = std::move(source);
  return PhaseMask(std::move(b));
}

PhaseMask conjugate(const PhaseMask& mask) {
  PhaseMask out = mask;
  out.conjugated_ = !mask.conjugated_;
  return out;
}

Field2D rasterize(const PhaseMask& mask, const Grid& grid) {
  Field2D f(grid.n_y(), grid.n_x());
  for (std::size_t r = 0; r < grid.n_y(); ++r)
    for (std::size_t c = 0; c < grid.n_x(); ++c) f(r, c) = mask.evaluate(grid.center(r, c));
  return f;
}

}  // namespace biphoton
