#include "biphoton/grid.hpp"

#include <algorithm>
#include <numeric>

#include "biphoton/error.hpp"

namespace biphoton {

double wrap_phase(double phase) {
  double r = std::remainder(phase, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double wrap_angle(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2pi
  if (r >= kTwoPi) r = 0.0;
  return r;
}

Grid::Grid(std::size_t n_x, std::size_t n_y, double extent_x, double extent_y, Point2 origin)
    : n_x_(n_x), n_y_(n_y), extent_x_(extent_x), extent_y_(extent_y), origin_(origin) {
  if (n_x < 8 || n_y < 8) throw ConfigError("grid: pixel counts must be >= 8");
  if (!(extent_x > 0.0) || !(extent_y > 0.0) || !std::isfinite(extent_x) ||
      !std::isfinite(extent_y))
    throw ConfigError("grid: extent must be positive and finite");
}

double Grid::inscribed_radius() const {
  const double left = origin_.x - extent_x_;
  const double right = origin_.x + extent_x_;
  const double bottom = origin_.y - extent_y_;
  const double top = origin_.y + extent_y_;
  if (left > 0.0 || right < 0.0 || bottom > 0.0 || top < 0.0) return 0.0;
  return std::min({-left, right, -bottom, top});
}

bool Grid::locate(Point2 p, std::size_t& row, std::size_t& col) const {
  const double fx = (p.x - (origin_.x - extent_x_)) / dx();
  const double fy = ((origin_.y + extent_y_) - p.y) / dy();
  if (!(fx >= 0.0) || !(fy >= 0.0)) return false;
  if (fx >= static_cast<double>(n_x_) || fy >= static_cast<double>(n_y_)) return false;
  col = static_cast<std::size_t>(fx);
  row = static_cast<std::size_t>(fy);
  return true;
}

double Field2D::sum() const { return std::accumulate(data.begin(), data.end(), 0.0); }

double Field2D::max() const {
  return data.empty() ? 0.0 : *std::max_element(data.begin(), data.end());
}

}  // namespace biphoton
