#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/state.hpp"

namespace biphoton {

/// Angular passband on the idler arm, centered on the bisector angle.
class SectorMask {
public:
  SectorMask(double center_angle, double width, double r_min = 0.0,
             double r_max = std::numeric_limits<double>::infinity());

  double center_angle() const { return center_; }
  double width() const { return width_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }

  bool passes(Point2 p) const;
  /// Conservative test: true whenever any part of the pixel may pass.
  bool may_intersect(Point2 pixel_center, double dx, double dy) const;

private:
  double center_;
  double width_;
  double r_min_;
  double r_max_;
};

struct DetectorConfig {
  Grid grid = Grid(256, 4.0);     // camera pixels
  double efficiency = 1.0;        // Bernoulli thinning of the signal arm
  double background_rate = 0.0;   // mean uniform accidental counts per run
  std::uint64_t rng_seed = 1;
  unsigned threads = 0;           // 0: hardware concurrency

  void validate() const;
};

/// Accumulated camera counts from one imaging run.
struct CoincidenceImage {
  Grid grid = Grid(8, 1.0);
  std::vector<std::uint32_t> counts;  // row-major, grid.n_y() x grid.n_x()
  std::uint64_t n_heralds = 0;        // events whose trigger condition fired
  std::uint64_t n_recorded = 0;       // == sum(counts)
  std::uint64_t n_background = 0;     // accidental counts included in n_recorded
  std::uint64_t n_pairs = 0;          // pairs drawn (pair mode and singles only)
  std::optional<SectorMask> mask;     // empty for singles
  std::uint64_t seed = 0;
  std::string state_descriptor;

  Field2D as_field() const;
  /// Count-wise sum of two images on the same grid.
  CoincidenceImage& operator+=(const CoincidenceImage& other);
};

/// How run_heralded_imaging spends its event budget.
enum class HeraldMode {
  /// n_events is the number of heralds; idler proposals are drawn only where
  /// the sector mask can pass. Same conditional distribution as `pairs`.
  heralds,
  /// n_events is the number of generated pairs; most are not heralded.
  pairs,
};

/// Idler filtered by the sector mask triggers recording of the signal photon.
/// Throws ConfigError when n_events == 0 or the mask passes no grid area.
CoincidenceImage run_heralded_imaging(const BiphotonState& state, const SectorMask& mask,
                                      std::uint64_t n_events, const DetectorConfig& det,
                                      HeraldMode mode = HeraldMode::heralds);

/// Signal photons recorded without any heralding condition.
CoincidenceImage run_singles_imaging(const BiphotonState& state, std::uint64_t n_events,
                                     const DetectorConfig& det);

/// Expected camera image of the singles, in probability per camera pixel.
/// Transfers the exact marginal pixel masses of the working grid by overlap area.
Field2D expected_singles_image(const BiphotonState& state, const Grid& camera);

/// Fringe contrast left after integrating a helical idler phase over a sector
/// of width `width`: sin(m_B width)/(m_B width), or 1 for m_B == 0.
double mask_average_contrast(int m_b, double width);

inline constexpr std::uint64_t kEventBlock = 1u << 15;

}  // namespace biphoton
