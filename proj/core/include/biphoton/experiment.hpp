#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "biphoton/analysis.hpp"
#include "biphoton/config.hpp"
#include "biphoton/io.hpp"

namespace biphoton {

struct RunSummary {
  std::filesystem::path directory;
  std::vector<std::string> files;  // written artifacts, relative to directory
  io::Metrics metrics;
};

/// Runs the configured preset and writes its artifact bundle, including a
/// manifest.json that re-runs to identical outputs.
RunSummary run_experiment(const ExperimentConfig& config);

/// Region-averaged g2 of a heralded image against singles on the same camera,
/// one value per phase level of the signal mask. Pixels are pooled over the
/// pure regions of classify_by_phase and rescaled by the analytic weighted mean.
struct RegionG2 {
  std::vector<double> phase_levels;
  std::vector<double> g2;
  std::vector<double> predicted;  // expected_g2 averaged over each region
  std::vector<double> pixels;     // camera pixels per region
  double target = 1.0;            // analytic mean applied to the pooled ratio
};
RegionG2 region_g2(const BiphotonState& state, const SectorMask& herald, const CoincidenceImage& heralded,
                   const CoincidenceImage& singles, double radius);

/// Block-binned g2 image, NaN where a singles block holds fewer than
/// `min_singles` counts (ratios there are dominated by shot noise).
Field2D g2_image(const CoincidenceImage& heralded, const CoincidenceImage& singles, std::size_t block,
                 double target_mean = 1.0, double min_singles = 25.0);

/// Library version string.
std::string version();

}  // namespace biphoton
