#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "biphoton/envelope.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/measurement.hpp"
#include "biphoton/state.hpp"

namespace biphoton {

/// Ring r_in <= r < r_out used for azimuthal analysis.
struct Annulus {
  double r_in = 0.0;
  double r_out = 1.0;

  Annulus() = default;
  Annulus(double in, double out);
  bool contains(double r) const { return r >= r_in && r < r_out; }
};

/// [r_peak/2, 2 r_peak] around the envelope's density peak. Plain Gaussians
/// peak on axis, so their radial-probability peak w/2 is used instead.
Annulus auto_annulus(const AmplitudeEnvelope& env);

/// Per-bin totals over [0, 2pi).
struct AzimuthalProfile {
  std::vector<double> values;
  bool normalized = false;

  std::size_t n_bins() const { return values.size(); }
  double bin_width() const { return kTwoPi / static_cast<double>(values.size()); }
  double bin_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * bin_width(); }
};

/// Label image: label[i] is the bin of camera pixel i, or -1 when excluded.
struct PixelBinning {
  std::vector<int> labels;
  std::size_t n_bins = 0;
};

/// Pixels whose centers fall inside the annulus, binned by polar angle.
PixelBinning azimuthal_binning(const Grid& grid, const Annulus& annulus, std::size_t n_bins);

/// Sum of an image over each bin.
std::vector<double> binned_totals(const Field2D& image, const PixelBinning& binning);

/// Throws RangeError when no pixel center lies in the annulus; ConfigError when n_bins < 8.
AzimuthalProfile azimuthal_profile(const Field2D& image, const Grid& grid, const Annulus& annulus,
                                   std::size_t n_bins, bool normalize);
AzimuthalProfile azimuthal_profile(const CoincidenceImage& image, const Annulus& annulus,
                                   std::size_t n_bins, bool normalize);

/// Bilinear interpolation at a physical point (pixel centers as nodes, clamped).
double bilinear(const Field2D& image, const Grid& grid, Point2 p);

/// Polar-to-rectangular resampling. Row i is radius r_i, column j angle phi_j,
/// both at cell centers. Throws RangeError if the annulus leaves the grid.
Field2D unfold(const Field2D& image, const Grid& grid, const Annulus& annulus, std::size_t n_phi,
               std::size_t n_r);

/// Inverse of unfold: pixels inside the annulus are interpolated back from the
/// unfolded field, everything else is zero.
Field2D refold(const Field2D& unfolded, const Grid& grid, const Annulus& annulus);

enum class BinStatus { ok, undefined_ratio, no_data };

struct G2Values {
  std::vector<double> values;  // NaN where status != ok
  std::vector<BinStatus> status;
};

/// g2 = P_AB / P_A bin by bin, with both inputs normalized to unit sum, then
/// scaled by `target_mean` (the P_A-weighted analytic mean of g2 over the
/// analysed bins; 1 for helical signal masks).
G2Values extract_g2(std::span<const double> p_ab, std::span<const double> p_a,
                    double target_mean = 1.0);
/// Throws ConfigError unless both profiles are normalized with equal binning.
G2Values extract_g2(const AzimuthalProfile& p_ab, const AzimuthalProfile& p_a,
                    double target_mean = 1.0);

/// Idler-side averages over a heralding mask, by supersampled quadrature of the
/// idler envelope: weight W, and density-weighted cos/sin of 2 Phi_B.
struct HeraldMoments {
  double weight = 0.0;
  double cos2 = 0.0;
  double sin2 = 0.0;
};
HeraldMoments herald_moments(const BiphotonState& state, const SectorMask& mask,
                             int supersample = 8);

/// Analytic coherence 1 + sV cos(2 Phi_A - 2 Phi_B) at signal point r, averaged
/// over the heralding region.
double expected_g2(const BiphotonState& state, const HeraldMoments& moments, Point2 r);

/// P_A-weighted mean of expected_g2 over the labelled camera pixels.
double analytic_mean_g2(const BiphotonState& state, const HeraldMoments& moments,
                        const Grid& camera, const PixelBinning& binning);

enum class MapKind { G2, g2 };

/// G2 or g2 over (phi bins) x (mask orientations phi'). values(i, j): bin i, column j.
struct CoherenceMap {
  MapKind kind = MapKind::g2;
  std::vector<double> phi;        // bin centers
  std::vector<double> phi_prime;  // mask orientations
  Field2D values;
  Field2D counts;                 // coincidence counts per cell
  std::vector<bool> column_valid;
  std::vector<std::uint64_t> column_heralds;

  std::size_t n_phi() const { return phi.size(); }
  std::size_t n_columns() const { return phi_prime.size(); }
  std::vector<double> column(std::size_t j) const;
};

struct ScanOptions {
  std::size_t n_bins = 90;
  std::optional<Annulus> annulus;        // auto_annulus(signal envelope) when empty
  std::uint64_t singles_events = 0;      // 0: max(10^6, k * heralds_per_angle)
  HeraldMode mode = HeraldMode::heralds;
};

struct ScanResult {
  CoherenceMap G2;
  CoherenceMap g2;
  AzimuthalProfile singles;  // normalized P_A
  Annulus annulus;
  std::vector<double> targets;  // per-column analytic mean used to scale g2
};

/// Heralded imaging at k equally spaced mask orientations plus one singles run;
/// each column's g2 follows the ratio P_AB / P_A. G2 columns are divided by
/// their herald counts and the matrix by its maximum. Columns without heralds
/// are marked invalid. Throws ConfigError when k_angles < 4.
ScanResult scan_g2_matrix(const BiphotonState& state, double mask_width, std::size_t k_angles,
                          std::uint64_t heralds_per_angle, const DetectorConfig& det,
                          const ScanOptions& options = {});

/// Dominant nonzero harmonic of the mean-subtracted profile, or nullopt when
/// no harmonic exceeds 3x the median spectral magnitude. Needs >= 16 samples.
std::optional<int> fringe_count(std::span<const double> profile);
/// Most frequent fringe count over the valid columns of a map.
std::optional<int> fringe_count(const CoherenceMap& map);

/// Sign of d(phi_peak)/d(phi') from circular cross-correlation of adjacent
/// columns, with lags limited to half a fringe period; 0 for a map without
/// fringes.
int fringe_slope_sign(const CoherenceMap& map);

struct AnalyticComparison {
  double rmse = 0.0;
  double fitted_contrast = 0.0;   // signed so that the ideal state gives V * mask contrast
  double fitted_quadrature = 0.0; // out-of-phase component, ideally 0
  double fitted_offset = 0.0;
  int harmonic = 0;               // 2 m_A
  std::size_t cells = 0;
};

/// RMSE against the analytic coherence with the mask-averaged contrast and exact bin averaging,
/// plus a least-squares fit of the cosine at the known harmonic. For non-helical
/// masks the target comes from quadrature and the fit fields are NaN.
AnalyticComparison compare_to_analytic(const CoherenceMap& map, const BiphotonState& state,
                                       double mask_width);

/// Labels camera pixels by which phase level of `mask` they carry. Pixels are
/// kept only when all supersample points agree and the center lies within
/// `radius` of the axis. Returned labels index mask.phase_levels().
PixelBinning classify_by_phase(const Grid& grid, const PhaseMask& mask, double radius,
                               int supersample = 3);

/// Pearson correlation coefficient (0 when either input is constant).
double pearson(std::span<const double> a, std::span<const double> b);

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};
/// Goodness of fit of observed counts to expected counts (same total).
ChiSquare chi_square(std::span<const double> observed, std::span<const double> expected);
/// Two-sample homogeneity test for binned counts.
ChiSquare chi_square_homogeneity(std::span<const double> a, std::span<const double> b);

}  // namespace biphoton
