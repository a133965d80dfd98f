#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/analysis.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/phase_mask.hpp"

namespace biphoton::io {

/// Binary portable graymap (P5), 8- or 16-bit.
struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint32_t maxval = 255;
  std::vector<std::uint16_t> pixels;  // row-major, row 0 at the top
};

/// Throws ParseError with a description of what is malformed.
PgmImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const PgmImage& image);

/// Raster in [0, 1] from an 8- or 16-bit PGM (value / maxval).
Raster raster_from_pgm(const PgmImage& image);

/// Counts as 16-bit PGM. Returns the divisor applied (1 unless the counts
/// exceed 65535, in which case they are scaled down to fit).
std::uint32_t write_counts_pgm(const std::filesystem::path& path, const std::vector<std::uint32_t>& counts,
                               std::size_t width, std::size_t height);
/// Real field linearly mapped from [lo, hi] to 0..65535.
void write_field_pgm(const std::filesystem::path& path, const Field2D& field, double lo, double hi);
/// Phase raster mapped linearly from [-pi, pi] to 0..255.
void write_phase_pgm(const std::filesystem::path& path, const Field2D& phases);

/// 8-bit PNG preview scaled to the field maximum. Returns false when no PNG
/// codec was compiled in.
bool write_png_preview(const std::filesystem::path& path, const Field2D& field);
/// Same, mapping [lo, hi] to 0..255; NaN renders black.
bool write_png_preview(const std::filesystem::path& path, const Field2D& field, double lo, double hi);

/// Image CSV: header `row,col,count`, one line per pixel.
void write_image_csv(const std::filesystem::path& path, const std::vector<std::uint32_t>& counts,
                     std::size_t width, std::size_t height);
struct CsvImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint32_t> counts;
};
CsvImage read_image_csv(const std::filesystem::path& path);

/// Coherence map CSV: header row `phi,<phi'_0>,...`, then one row per phi bin.
void write_map_csv(const std::filesystem::path& path, const CoherenceMap& map);
CoherenceMap read_map_csv(const std::filesystem::path& path, MapKind kind = MapKind::g2);

/// Generic real field as CSV with a header row `row,col,value`.
void write_field_csv(const std::filesystem::path& path, const Field2D& field);

/// Plain table with a mandatory header row.
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

using Metrics = std::vector<std::pair<std::string, std::string>>;
/// `key = value` lines.
void write_metrics(const std::filesystem::path& path, const Metrics& metrics);

/// Shortest round-trippable decimal representation.
std::string format_double(double v);

}  // namespace biphoton::io
