#include "biphoton/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "biphoton/error.hpp"

#ifdef BIPHOTON_HAVE_PNG
#include <png.h>
#endif

namespace biphoton::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  return in;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in, const std::string& where) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw ParseError(where + ": truncated PGM header");
  return tok;
}

std::size_t parse_header_number(const std::string& tok, const std::string& where, const char* field) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(where + ": PGM header field '" + field + "' is not a number: " + tok);
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_cell(const std::string& cell, const std::filesystem::path& path, std::size_t line,
             std::size_t column, const std::string& name) {
  T v{};
  const char* b = cell.data();
  const char* e = cell.data() + cell.size();
  while (b < e && *b == ' ') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || b == e) {
    std::ostringstream os;
    os << path.string() << ": row " << line << ", column " << column << " (" << name
       << "): cannot parse '" << cell << "'";
    throw ParseError(os.str());
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

PgmImage read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  const std::string where = path.string();
  if (pgm_token(in, where) != "P5") throw ParseError(where + ": not a binary PGM (P5) file");
  PgmImage img;
  img.width = parse_header_number(pgm_token(in, where), where, "width");
  img.height = parse_header_number(pgm_token(in, where), where, "height");
  const std::size_t maxval = parse_header_number(pgm_token(in, where), where, "maxval");
  if (img.width == 0 || img.height == 0) throw ParseError(where + ": PGM has zero size");
  if (maxval == 0 || maxval > 65535) throw ParseError(where + ": PGM maxval out of range");
  img.maxval = static_cast<std::uint32_t>(maxval);
  const std::size_t n = img.width * img.height;
  const std::size_t bytes = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(n * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw ParseError(where + ": PGM pixel data truncated");
  img.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint16_t v =
        bytes == 1 ? raw[i] : static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    if (v > maxval) throw ParseError(where + ": PGM pixel exceeds maxval");
    img.pixels[i] = v;
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const PgmImage& image) {
  if (image.pixels.size() != image.width * image.height) throw ConfigError("write_pgm: size mismatch");
  auto out = open_out(path, std::ios::binary);
  out << "P5\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
  if (image.maxval < 256) {
    for (auto v : image.pixels) out.put(static_cast<char>(v));
  } else {
    for (auto v : image.pixels) {
      out.put(static_cast<char>(v >> 8));
      out.put(static_cast<char>(v & 0xFF));
    }
  }
}

Raster raster_from_pgm(const PgmImage& image) {
  Raster r{image.height, image.width, std::vector<double>(image.pixels.size())};
  for (std::size_t i = 0; i < image.pixels.size(); ++i)
    r.values[i] = static_cast<double>(image.pixels[i]) / static_cast<double>(image.maxval);
  return r;
}

std::uint32_t write_counts_pgm(const std::filesystem::path& path, const std::vector<std::uint32_t>& counts,
                               std::size_t width, std::size_t height) {
  const std::uint32_t peak = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
  const std::uint32_t divisor = peak <= 65535 ? 1 : (peak + 65534) / 65535;
  PgmImage img{width, height, 65535, std::vector<std::uint16_t>(counts.size())};
  for (std::size_t i = 0; i < counts.size(); ++i) img.pixels[i] = static_cast<std::uint16_t>(counts[i] / divisor);
  write_pgm(path, img);
  return divisor;
}

void write_field_pgm(const std::filesystem::path& path, const Field2D& field, double lo, double hi) {
  PgmImage img{field.cols, field.rows, 65535, std::vector<std::uint16_t>(field.data.size())};
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t i = 0; i < field.data.size(); ++i) {
    const double v = field.data[i];
    const double t = std::isfinite(v) ? std::clamp((v - lo) / span, 0.0, 1.0) : 0.0;
    img.pixels[i] = static_cast<std::uint16_t>(std::lround(t * 65535.0));
  }
  write_pgm(path, img);
}

void write_phase_pgm(const std::filesystem::path& path, const Field2D& phases) {
  PgmImage img{phases.cols, phases.rows, 255, std::vector<std::uint16_t>(phases.data.size())};
  for (std::size_t i = 0; i < phases.data.size(); ++i) {
    const double t = std::clamp((phases.data[i] + kPi) / kTwoPi, 0.0, 1.0);
    img.pixels[i] = static_cast<std::uint16_t>(std::lround(t * 255.0));
  }
  write_pgm(path, img);
}

bool write_png_preview(const std::filesystem::path& path, const Field2D& field) {
  double peak = 0.0;
  for (double v : field.data)
    if (std::isfinite(v)) peak = std::max(peak, v);
  return write_png_preview(path, field, 0.0, peak > 0.0 ? peak : 1.0);
}

bool write_png_preview(const std::filesystem::path& path, const Field2D& field, double lo, double hi) {
#ifdef BIPHOTON_HAVE_PNG
  if (!(hi > lo)) throw ConfigError("write_png_preview: need lo < hi");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::vector<unsigned char> bytes(field.data.size());
  for (std::size_t i = 0; i < field.data.size(); ++i) {
    const double v = field.data[i];
    const double t = std::isfinite(v) ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    bytes[i] = static_cast<unsigned char>(std::lround(t * 255.0));
  }
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(field.cols);
  img.height = static_cast<png_uint_32>(field.rows);
  img.format = PNG_FORMAT_GRAY;
  const bool ok = png_image_write_to_file(&img, path.c_str(), 0, bytes.data(),
                                          static_cast<png_int_32>(field.cols), nullptr) != 0;
  png_image_free(&img);
  return ok;
#else
  (void)path;
  (void)field;
  (void)lo;
  (void)hi;
  return false;
#endif
}

void write_image_csv(const std::filesystem::path& path, const std::vector<std::uint32_t>& counts,
                     std::size_t width, std::size_t height) {
  if (counts.size() != width * height) throw ConfigError("write_image_csv: size mismatch");
  auto out = open_out(path);
  out << "row,col,count\n";
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) out << r << ',' << c << ',' << counts[r * width + c] << '\n';
}

CsvImage read_image_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file, header row missing");
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"row", "col", "count"})
    throw ParseError(path.string() + ": row 1: expected header 'row,col,count'");
  struct Entry {
    std::size_t r, c;
    std::uint32_t v;
  };
  std::vector<Entry> entries;
  std::size_t line_no = 1;
  CsvImage img;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) {
      std::ostringstream os;
      os << path.string() << ": row " << line_no << ": expected 3 columns, found " << cells.size();
      throw ParseError(os.str());
    }
    Entry e{parse_cell<std::size_t>(cells[0], path, line_no, 1, "row"),
            parse_cell<std::size_t>(cells[1], path, line_no, 2, "col"),
            parse_cell<std::uint32_t>(cells[2], path, line_no, 3, "count")};
    img.height = std::max(img.height, e.r + 1);
    img.width = std::max(img.width, e.c + 1);
    entries.push_back(e);
  }
  if (entries.empty()) throw ParseError(path.string() + ": no data rows");
  img.counts.assign(img.width * img.height, 0);
  for (const auto& e : entries) img.counts[e.r * img.width + e.c] = e.v;
  return img;
}

void write_map_csv(const std::filesystem::path& path, const CoherenceMap& map) {
  auto out = open_out(path);
  out << "phi";
  for (double pp : map.phi_prime) out << ',' << format_double(pp);
  out << '\n';
  for (std::size_t i = 0; i < map.n_phi(); ++i) {
    out << format_double(map.phi[i]);
    for (std::size_t j = 0; j < map.n_columns(); ++j) out << ',' << format_double(map.values(i, j));
    out << '\n';
  }
}

CoherenceMap read_map_csv(const std::filesystem::path& path, MapKind kind) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file, header row missing");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "phi")
    throw ParseError(path.string() + ": row 1, column 1: expected 'phi'");
  CoherenceMap map;
  map.kind = kind;
  for (std::size_t j = 1; j < header.size(); ++j)
    map.phi_prime.push_back(parse_cell<double>(header[j], path, 1, j + 1, "phi'"));
  if (map.phi_prime.empty()) throw ParseError(path.string() + ": row 1: no phi' columns");
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << path.string() << ": row " << line_no << ": expected " << header.size() << " columns, found "
         << cells.size();
      throw ParseError(os.str());
    }
    map.phi.push_back(parse_cell<double>(cells[0], path, line_no, 1, "phi"));
    std::vector<double> row;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      if (cells[j] == "nan") {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      row.push_back(parse_cell<double>(cells[j], path, line_no, j + 1, "value"));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path.string() + ": no data rows");
  map.values = Field2D(rows.size(), map.phi_prime.size());
  map.counts = Field2D(rows.size(), map.phi_prime.size(), 0.0);
  map.column_valid.assign(map.phi_prime.size(), false);
  map.column_heralds.assign(map.phi_prime.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      map.values(i, j) = rows[i][j];
      if (std::isfinite(rows[i][j])) map.column_valid[j] = true;
    }
  return map;
}

void write_field_csv(const std::filesystem::path& path, const Field2D& field) {
  auto out = open_out(path);
  out << "row,col,value\n";
  for (std::size_t r = 0; r < field.rows; ++r)
    for (std::size_t c = 0; c < field.cols; ++c) out << r << ',' << c << ',' << format_double(field(r, c)) << '\n';
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(path);
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
}

void write_metrics(const std::filesystem::path& path, const Metrics& metrics) {
  auto out = open_out(path);
  for (const auto& [k, v] : metrics) out << k << " = " << v << '\n';
}

}  // namespace biphoton::io
