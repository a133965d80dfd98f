#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "biphoton/grid.hpp"

namespace biphoton {

/// One piece of a sector phase mask: angles in [start, end) carry `phase`.
struct SectorLevel {
  double start = 0.0;
  double end = 0.0;
  double phase = 0.0;
};

/// Real-valued raster with values in [0, 1], row 0 at the top.
struct Raster {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Scalar phase field over the transverse plane.
///
/// Three kinds exist: a helical phase m*phi, a piecewise-constant sector phase,
/// and a thresholded bitmap. Evaluation returns radians in (-pi, pi]; a
/// conjugated mask returns the exact negation of its parent, so values of
/// exactly pi come back as -pi.
class PhaseMask {
public:
  struct Helical {
    int m = 0;
  };
  struct Sector {
    std::vector<SectorLevel> levels;  // sorted, partitions [0, 2pi)
  };
  struct Bitmap {
    std::shared_ptr<const Raster> raster;
    double phase_hi = 0.0;
    double phase_lo = 0.0;
    double half_width = 1.0;  // raster covers [-half_width, half_width]^2
    std::string source;       // where the raster came from, for manifests
  };
  using Kind = std::variant<Helical, Sector, Bitmap>;

  /// Zero phase everywhere.
  PhaseMask() : kind_(Helical{0}) {}

  double evaluate(Point2 p) const;
  /// Value along the ray at polar angle phi and radius r.
  double evaluate_polar(double r, double phi) const { return evaluate(Point2::polar(r, phi)); }

  const Kind& kind() const { return kind_; }
  bool conjugated() const { return conjugated_; }
  bool is_helical() const { return std::holds_alternative<Helical>(kind_); }
  /// Topological charge for helical masks (sign includes conjugation), else 0.
  int helical_charge() const;
  /// Distinct phase values the mask can take (empty for helical masks).
  std::vector<double> phase_levels() const;

  friend PhaseMask helical_phase(int m);
  friend PhaseMask sector_phase(std::vector<SectorLevel> levels);
  friend PhaseMask bitmap_phase(Raster raster, double phase_hi, double phase_lo,
                                double half_width, std::string source);
  friend PhaseMask conjugate(const PhaseMask& mask);

private:
  explicit PhaseMask(Kind k) : kind_(std::move(k)) {}

  Kind kind_;
  bool conjugated_ = false;
};

PhaseMask helical_phase(int m);

/// Throws ConfigError unless the levels partition [0, 2pi) without overlap.
PhaseMask sector_phase(std::vector<SectorLevel> levels);

/// `n` equal sectors starting at angle 0 carrying the given phases in order.
PhaseMask equal_sector_phase(std::span<const double> phases);

/// Nearest-pixel bitmap lookup: raster >= 0.5 maps to phase_hi, otherwise and
/// outside the footprint to phase_lo. Throws ConfigError on an empty raster or
/// values outside [0, 1].
PhaseMask bitmap_phase(Raster raster, double phase_hi, double phase_lo,
                       double half_width = 1.0, std::string source = {});

PhaseMask conjugate(const PhaseMask& mask);

/// Evaluate a mask at every pixel center.
Field2D rasterize(const PhaseMask& mask, const Grid& grid);

}  // namespace biphoton
