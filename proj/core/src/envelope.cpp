#include "biphoton/envelope.hpp"

#include <cmath>

#include "biphoton/error.hpp"

namespace biphoton {

AmplitudeEnvelope::AmplitudeEnvelope(Kind k, double w, int order)
    : kind_(k), waist_(w), order_(order) {
  if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("envelope: waist must be positive");
  // integral of (r/w)^{2m} exp(-2r^2/w^2) over the plane = pi m! w^2 / 2^{m+1}
  norm_ = kPi * std::tgamma(order_ + 1.0) * w * w / std::ldexp(1.0, order_ + 1);
}

AmplitudeEnvelope AmplitudeEnvelope::gaussian(double waist) {
  return AmplitudeEnvelope(Kind::gaussian, waist, 0);
}

AmplitudeEnvelope AmplitudeEnvelope::ring_gaussian(double waist, int m) {
  return AmplitudeEnvelope(Kind::ring_gaussian, waist, std::abs(m));
}

double AmplitudeEnvelope::density(Point2 p) const {
  const double s = (p.x * p.x + p.y * p.y) / (waist_ * waist_);
  const double radial = order_ == 0 ? 1.0 : std::pow(s, order_);
  return radial * std::exp(-2.0 * s) / norm_;
}

double AmplitudeEnvelope::amplitude(Point2 p) const { return std::sqrt(density(p)); }

double AmplitudeEnvelope::peak_radius() const {
  return waist_ * std::sqrt(static_cast<double>(order_) / 2.0);
}

double AmplitudeEnvelope::radial_peak() const {
  return waist_ * std::sqrt((2.0 * order_ + 1.0) / 4.0);
}

Field2D envelope_density(const AmplitudeEnvelope& env, const Grid& grid) {
  Field2D f(grid.n_y(), grid.n_x());
  for (std::size_t r = 0; r < grid.n_y(); ++r)
    for (std::size_t c = 0; c < grid.n_x(); ++c) f(r, c) = env.density(grid.center(r, c));
  const double mass = f.sum() * grid.pixel_area();
  if (mass > 0.0)
    for (double& v : f.data) v /= mass;
  return f;
}

}  // namespace biphoton
