#pragma once

#include "biphoton/grid.hpp"

namespace biphoton {

/// Normalized transverse amplitude magnitude eta(r).
///
/// gaussian:       eta ~ exp(-r^2/w^2)
/// ring_gaussian:  eta ~ (r/w)^|m| exp(-r^2/w^2), the doughnut of an OAM mode
class AmplitudeEnvelope {
public:
  enum class Kind { gaussian, ring_gaussian };

  static AmplitudeEnvelope gaussian(double waist = 1.0);
  static AmplitudeEnvelope ring_gaussian(double waist, int m);

  Kind kind() const { return kind_; }
  double waist() const { return waist_; }
  /// Radial index |m| (0 for a plain Gaussian).
  int order() const { return order_; }
  /// Analytic normalization: integral of the unnormalized |eta|^2 over the plane.
  double norm() const { return norm_; }

  double amplitude(Point2 p) const;
  /// |eta(p)|^2, integrating to 1 over the infinite plane.
  double density(Point2 p) const;
  /// Radius of maximum |eta|^2 (0 for a plain Gaussian).
  double peak_radius() const;
  /// Radius of maximum radial probability r*|eta|^2.
  double radial_peak() const;

private:
  AmplitudeEnvelope(Kind k, double w, int order);

  Kind kind_;
  double waist_;
  int order_;
  double norm_;
};

/// |eta|^2 at each pixel center, renormalized so that sum * pixel_area == 1.
Field2D envelope_density(const AmplitudeEnvelope& env, const Grid& grid);

}  // namespace biphoton
