#include "biphoton/designer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "biphoton/error.hpp"

namespace biphoton {

Raster letter_n_raster() {
  static constexpr const char* kRows[16] = {
      "................", "................", "..###.......##..", "..####......##..",
      "..##.##.....##..", "..##..##....##..", "..##...##...##..", "..##....##..##..",
      "..##.....##.##..", "..##......####..", "..##.......###..", "..##........##..",
      "..##........##..", "................", "................", "................",
  };
  Raster r{16, 16, std::vector<double>(256, 0.0)};
  for (std::size_t row = 0; row < 16; ++row)
    for (std::size_t col = 0; col < 16; ++col) r.values[row * 16 + col] = kRows[row][col] == '#' ? 1.0 : 0.0;
  return r;
}

MaskPair design_binary_mask(const Raster& target, double phase_hi, double phase_lo,
                            double half_width, std::string source) {
  PhaseMask m = bitmap_phase(target, phase_hi, phase_lo, half_width, std::move(source));
  return {m, conjugate(m)};
}

std::vector<LevelPrediction> predict_levels(std::span<const double> phases_a, double phase_b,
                                            Sign sign, double visibility) {
  std::vector<LevelPrediction> out;
  out.reserve(phases_a.size());
  for (double a : phases_a)
    out.push_back({a, 1.0 + as_double(sign) * visibility * std::cos(2.0 * a - 2.0 * phase_b)});
  return out;
}

ScanSchedule scanning_schedule(const PhaseMask& idler_mask, const ScheduleOptions& opt) {
  const auto* sector = std::get_if<PhaseMask::Sector>(&idler_mask.kind());
  if (sector == nullptr) throw ConfigError("scanning_schedule: idler mask must be a sector mask");
  if (!(opt.herald_width > 0.0 && opt.herald_width <= kTwoPi))
    throw ConfigError("scanning_schedule: herald width must lie in (0, 2pi]");
  const double sgn = idler_mask.conjugated() ? -1.0 : 1.0;

  ScanSchedule schedule;
  for (const double level : idler_mask.phase_levels()) {
    const SectorLevel* widest = nullptr;
    for (const auto& l : sector->levels) {
      if (std::abs(wrap_phase(sgn * wrap_phase(l.phase) - level)) > 1e-9) continue;
      if (widest == nullptr || l.end - l.start > widest->end - widest->start) widest = &l;
    }
    ScheduleEntry e;
    e.phase_b = level;
    e.orientation = 0.5 * (widest->start + widest->end);
    e.sector_width = widest->end - widest->start;
    e.narrow_sector = e.sector_width < opt.herald_width;
    e.mixing_fraction = std::max(0.0, (opt.herald_width - e.sector_width) / opt.herald_width);
    e.levels = predict_levels(opt.phases_a, level, opt.sign, opt.visibility);

    // average over the window assuming an azimuthally uniform idler
    constexpr int kSamples = 720;
    e.effective = e.levels;
    for (auto& p : e.effective) p.level = 0.0;
    for (int s = 0; s < kSamples; ++s) {
      const double phi = e.orientation + ((s + 0.5) / kSamples - 0.5) * opt.herald_width;
      const double phase_b = idler_mask.evaluate_polar(1.0, phi);
      const auto here = predict_levels(opt.phases_a, phase_b, opt.sign, opt.visibility);
      for (std::size_t k = 0; k < here.size(); ++k) e.effective[k].level += here[k].level / kSamples;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "phase_b=%.4f", level);
    e.label = buf;
    schedule.entries.push_back(std::move(e));
  }
  std::sort(schedule.entries.begin(), schedule.entries.end(),
            [](const ScheduleEntry& a, const ScheduleEntry& b) { return a.phase_b < b.phase_b; });
  return schedule;
}

}  // namespace biphoton
