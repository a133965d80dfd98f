#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biphoton/analysis.hpp"
#include "biphoton/envelope.hpp"
#include "biphoton/measurement.hpp"
#include "biphoton/phase_mask.hpp"
#include "biphoton/state.hpp"

namespace biphoton {

struct GridSpec {
  std::size_t n = 128;
  double extent = 4.0;

  Grid build() const { return Grid(n, extent); }
};

struct EnvelopeSpec {
  AmplitudeEnvelope::Kind kind = AmplitudeEnvelope::Kind::ring_gaussian;
  double waist = 1.0;
  int m = 0;

  AmplitudeEnvelope build() const;
};

struct MaskSpec {
  enum class Kind { helical, sector, bitmap };
  Kind kind = Kind::helical;
  int m = 0;
  std::vector<SectorLevel> levels;
  std::string bitmap;  // "builtin:N" or a PGM path
  double phase_hi = kPi / 2;
  double phase_lo = 0.0;
  double half_width = 1.0;
  bool conjugate = false;

  /// Relative bitmap paths resolve against `base_dir`.
  PhaseMask build(const std::filesystem::path& base_dir = {}) const;
};

struct PhotonSpec {
  EnvelopeSpec envelope;
  MaskSpec mask;
};

struct StateSpec {
  GridSpec grid;
  PhotonSpec signal;
  PhotonSpec idler;
  Sign sign = Sign::plus;
  double visibility = 1.0;

  BiphotonState build(const std::filesystem::path& base_dir = {}) const;
};

/// Everything one run needs. One file fully determines a run.
struct ExperimentConfig {
  std::string preset = "fig3";  // fig3 | fig4 | fig5 | scan
  std::uint64_t seed = 20240601;
  std::filesystem::path output = "out";
  unsigned threads = 0;
  std::filesystem::path base_dir;  // directory of the config file

  StateSpec state;

  struct Detector {
    GridSpec grid{256, 4.0};
    double efficiency = 1.0;
    double background_rate = 0.0;
  } detector;

  struct Heralding {
    double width = kPi / 4;
    std::size_t k_angles = 24;
    std::vector<double> orientations{kPi / 4, kPi / 6, kPi / 12, 0.0};
  } heralding;

  struct Analysis {
    std::optional<Annulus> annulus;  // auto when empty
    std::size_t n_bins = 90;
    std::size_t unfold_phi = 360;
    std::size_t unfold_r = 32;
  } analysis;

  struct Events {
    std::uint64_t heralds_per_angle = 100'000;
    std::uint64_t singles = 1'000'000;
    std::uint64_t image_heralds = 100'000;
  } events;

  struct Fig4 {
    std::vector<int> m_values{1, 2, 3};
    std::uint64_t heralds_per_angle = 50'000;
    double width = kPi / 90;
  } fig4;

  struct Fig5 {
    std::vector<double> signal_phases{0.0, kPi / 2};
    std::vector<double> idler_phases{kPi / 4, kPi / 2, 0.0};  // three equal sectors
    std::string bitmap = "builtin:N";
    double bitmap_half_width = 1.2;
    double analysis_radius = 1.5;
    std::uint64_t events = 1'000'000;
    std::uint64_t singles = 1'000'000;
  } fig5;

  DetectorConfig detector_config() const;
  /// Builds every component once; throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a JSON config document. Angles may be numbers (radians) or strings
/// such as "pi/4" or "11pi/6". Throws ConfigError with a `field.path: reason`
/// message.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
/// Reads a config file, or the `config` block of a run manifest.
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON text (pretty-printed) that parses back to the same config.
std::string to_json_text(const ExperimentConfig& config);

/// "pi/4" -> 0.785..., "-3pi/2", "2*pi", "0.5". Throws ConfigError.
double parse_angle(std::string_view text);

}  // namespace biphoton
