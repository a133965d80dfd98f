#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace biphoton {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle to the canonical phase range (-pi, pi].
double wrap_phase(double phase);

/// Reduce an angle to [0, 2pi).
double wrap_angle(double angle);

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  double radius() const { return std::hypot(x, y); }
  /// Polar angle in [0, 2pi). The origin maps to 0.
  double angle() const { return wrap_angle(std::atan2(y, x)); }

  static Point2 polar(double r, double phi) { return {r * std::cos(phi), r * std::sin(phi)}; }
  bool operator==(const Point2&) const = default;
};

/// Uniform pixel grid over the transverse plane. Lengths are in units of the
/// beam waist. Row 0 is the top edge (largest y), column 0 the left edge, so
/// rasters, images and PGM files share one orientation.
class Grid {
public:
  Grid(std::size_t n_x, std::size_t n_y, double extent_x, double extent_y,
       Point2 origin = {});
  /// Square grid of n x n pixels covering [-extent, extent]^2.
  Grid(std::size_t n, double extent) : Grid(n, n, extent, extent) {}

  std::size_t n_x() const { return n_x_; }
  std::size_t n_y() const { return n_y_; }
  std::size_t size() const { return n_x_ * n_y_; }
  double extent_x() const { return extent_x_; }
  double extent_y() const { return extent_y_; }
  Point2 origin() const { return origin_; }
  double dx() const { return 2.0 * extent_x_ / static_cast<double>(n_x_); }
  double dy() const { return 2.0 * extent_y_ / static_cast<double>(n_y_); }
  double pixel_area() const { return dx() * dy(); }
  /// Largest radius (about the optical axis) fully inside the grid.
  double inscribed_radius() const;

  double x_center(std::size_t col) const {
    return origin_.x - extent_x_ + (static_cast<double>(col) + 0.5) * dx();
  }
  double y_center(std::size_t row) const {
    return origin_.y + extent_y_ - (static_cast<double>(row) + 0.5) * dy();
  }
  Point2 center(std::size_t row, std::size_t col) const { return {x_center(col), y_center(row)}; }
  Point2 center(std::size_t index) const { return center(index / n_x_, index % n_x_); }
  std::size_t index(std::size_t row, std::size_t col) const { return row * n_x_ + col; }

  /// Pixel containing a point, or false when the point lies outside the grid.
  bool locate(Point2 p, std::size_t& row, std::size_t& col) const;

  bool operator==(const Grid&) const = default;

private:
  std::size_t n_x_;
  std::size_t n_y_;
  double extent_x_;
  double extent_y_;
  Point2 origin_;
};

/// Dense row-major real field.
struct Field2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Field2D() = default;
  Field2D(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double sum() const;
  double max() const;
};

}  // namespace biphoton
