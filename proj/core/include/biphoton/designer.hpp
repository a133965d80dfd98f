#pragma once

#include <span>
#include <string>
#include <vector>

#include "biphoton/phase_mask.hpp"
#include "biphoton/state.hpp"

namespace biphoton {

/// Signal-arm mask (H polarization) and its conjugate companion (V polarization).
struct MaskPair {
  PhaseMask mask;
  PhaseMask companion;
};

/// Binary phase pattern for the signal arm: pattern pixels get phase_hi.
/// With Phi_B = 0 and sign +, g2 is 0 on the pattern and 2 off it.
MaskPair design_binary_mask(const Raster& target, double phase_hi = kPi / 2, double phase_lo = 0.0,
                            double half_width = 1.0, std::string source = {});

/// Built-in 16 x 16 raster of the capital letter N (strokes = 1).
Raster letter_n_raster();

struct LevelPrediction {
  double phase_a = 0.0;
  double level = 0.0;  // 1 + sign V cos(2 Phi_A - 2 Phi_B)
};

std::vector<LevelPrediction> predict_levels(std::span<const double> phases_a, double phase_b,
                                            Sign sign, double visibility);

struct ScheduleEntry {
  std::string label;
  double phase_b = 0.0;
  double orientation = 0.0;   // mask bisector selecting this phase
  double sector_width = 0.0;  // width of the selected sector
  bool narrow_sector = false; // sector narrower than the heralding mask
  double mixing_fraction = 0.0;  // share of the mask window outside the sector
  std::vector<LevelPrediction> levels;     // ideal analytic levels
  std::vector<LevelPrediction> effective;  // averaged over the mask window
};

struct ScanSchedule {
  std::vector<ScheduleEntry> entries;
};

struct ScheduleOptions {
  std::vector<double> phases_a{0.0, kPi / 2};
  Sign sign = Sign::plus;
  double visibility = 1.0;
  double herald_width = kPi / 4;
};

/// One entry per distinct idler phase of a sector mask, each selected by
/// pointing the heralding mask at the middle of the widest sector carrying it.
/// Throws ConfigError if `idler_mask` is not a sector mask.
ScanSchedule scanning_schedule(const PhaseMask& idler_mask, const ScheduleOptions& options = {});

}  // namespace biphoton
