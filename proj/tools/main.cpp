// biphoton: simulate and analyse heralded images of patterned-phase photon pairs.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "biphoton/acceptance.hpp"
#include "biphoton/config.hpp"
#include "biphoton/designer.hpp"
#include "biphoton/error.hpp"
#include "biphoton/experiment.hpp"
#include "biphoton/io.hpp"

using namespace biphoton;

namespace {

CoincidenceImage load_image(const std::string& path, double extent) {
  std::size_t w = 0, h = 0;
  std::vector<std::uint32_t> counts;
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
    auto csv = io::read_image_csv(path);
    w = csv.width;
    h = csv.height;
    counts = std::move(csv.counts);
  } else {
    const auto pgm = io::read_pgm(path);
    w = pgm.width;
    h = pgm.height;
    counts.assign(pgm.pixels.begin(), pgm.pixels.end());
  }
  CoincidenceImage img;
  img.grid = Grid(w, h, extent, extent * static_cast<double>(h) / static_cast<double>(w));
  img.counts = std::move(counts);
  for (auto c : img.counts) img.n_recorded += c;
  return img;
}

Annulus parse_annulus(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("--annulus: expected r_in,r_out");
  try {
    return Annulus(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(std::string("--annulus: ") + e.what());
    throw ConfigError("--annulus: cannot parse '" + text + "'");
  }
}

void print_metrics(const io::Metrics& m) {
  for (const auto& [k, v] : m) std::cout << k << " = " << v << '\n';
}

int analyze_map(const std::string& path) {
  const CoherenceMap map = io::read_map_csv(path);
  io::Metrics m;
  const auto count = fringe_count(map);
  m.emplace_back("columns", std::to_string(map.n_columns()));
  m.emplace_back("bins", std::to_string(map.n_phi()));
  m.emplace_back("fringe_count", count ? std::to_string(*count) : "none");
  m.emplace_back("slope_sign", std::to_string(fringe_slope_sign(map)));
  print_metrics(m);
  return 0;
}

int analyze_images(const std::string& image, const std::string& singles, const std::string& annulus,
                   std::size_t bins, double extent, const std::string& out) {
  const auto heralded = load_image(image, extent);
  const auto single = load_image(singles, extent);
  if (!(heralded.grid == single.grid)) throw ConfigError("--singles: image size differs from --image");
  const Annulus ann = parse_annulus(annulus);
  const auto p_ab = azimuthal_profile(heralded, ann, bins, true);
  const auto p_a = azimuthal_profile(single, ann, bins, true);
  const auto g2 = extract_g2(p_ab, p_a);
  const auto count = fringe_count(g2.values);

  io::Metrics m;
  m.emplace_back("recorded", std::to_string(heralded.n_recorded));
  m.emplace_back("singles", std::to_string(single.n_recorded));
  m.emplace_back("fringe_count", count ? std::to_string(*count) : "none");
  double lo = 1e300, hi = -1e300;
  for (double v : g2.values)
    if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  if (hi >= lo) {
    m.emplace_back("g2_min", io::format_double(lo));
    m.emplace_back("g2_max", io::format_double(hi));
  }
  print_metrics(m);

  if (!out.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < bins; ++i)
      rows.push_back({std::to_string(i), io::format_double(p_ab.bin_center(i)), io::format_double(p_ab.values[i]),
                      io::format_double(p_a.values[i]),
                      std::isfinite(g2.values[i]) ? io::format_double(g2.values[i]) : "nan"});
    io::write_table_csv(out, {"bin", "phi", "p_ab", "p_a", "g2"}, rows);
  }
  return 0;
}

int design(const std::string& bitmap, const std::string& out, double half_width) {
  const auto raster = io::raster_from_pgm(io::read_pgm(bitmap));
  const MaskPair pair = design_binary_mask(raster, kPi / 2, 0.0, half_width, bitmap);
  std::filesystem::create_directories(out);
  const Grid grid(256, half_width * 1.25);
  io::write_phase_pgm(std::filesystem::path(out) / "signal_mask.pgm", rasterize(pair.mask, grid));
  io::write_phase_pgm(std::filesystem::path(out) / "companion_mask.pgm", rasterize(pair.companion, grid));
  const std::vector<double> phases_a{0.0, kPi / 2};
  std::vector<std::vector<std::string>> rows;
  for (double b : {0.0, kPi / 4, kPi / 2})
    for (const auto& l : predict_levels(phases_a, b, Sign::plus, 1.0))
      rows.push_back({io::format_double(b), io::format_double(l.phase_a), io::format_double(l.level)});
  io::write_table_csv(std::filesystem::path(out) / "predicted_levels.csv", {"phase_b", "phase_a", "g2"}, rows);
  std::cout << "wrote signal_mask.pgm, companion_mask.pgm, predicted_levels.csv to " << out << '\n';
  return 0;
}

std::vector<int> parse_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patterned-phase biphoton imaging simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  std::string config_path, out_dir, only;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Run a configured experiment and write its artifacts");
  run->add_option("--config", config_path, "Config file or a previous run's manifest.json")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the RNG seed");
  auto* out_opt = run->add_option("--out", out_dir, "Override the output directory");
  auto* threads_opt = run->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--config", config_path, "Config supplying seed, threads and visibility")->required();
  auto* vseed_opt = verify->add_option("--seed", seed, "Override the RNG seed");
  verify->add_option("--only", only, "Comma-separated criterion numbers");

  std::string bitmap;
  double half_width = 1.0;
  auto* dm = app.add_subcommand("design-mask", "Turn a PGM bitmap into a binary phase mask pair");
  dm->add_option("--bitmap", bitmap, "Target bitmap (PGM)")->required()->check(CLI::ExistingFile);
  dm->add_option("--out", out_dir, "Output directory")->required();
  dm->add_option("--half-width", half_width, "Half width of the mask footprint in beam waists");

  std::string image, singles, annulus, map;
  std::size_t bins = 90;
  double extent = 4.0;
  auto* an = app.add_subcommand("analyze", "Re-analyse existing images or a coherence map CSV");
  an->add_option("--image", image, "Heralded image (PGM or CSV)");
  an->add_option("--singles", singles, "Singles image (PGM or CSV)");
  an->add_option("--annulus", annulus, "r_in,r_out in beam waists");
  an->add_option("--bins", bins, "Azimuthal bins");
  an->add_option("--extent", extent, "Half width of the camera in beam waists");
  an->add_option("--map", map, "Coherence map CSV written by run");
  an->add_option("--out", out_dir, "Write the profile table to this CSV file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig c = load_config(config_path);
      if (*seed_opt) c.seed = seed;
      if (*out_opt) c.output = out_dir;
      if (*threads_opt) c.threads = threads;
      const RunSummary s = run_experiment(c);
      print_metrics(s.metrics);
      std::cout << "wrote " << s.files.size() << " files to " << s.directory.string() << '\n';
      return 0;
    }
    if (*verify) {
      const ExperimentConfig c = load_config(config_path);
      AcceptanceOptions opt;
      opt.seed = *vseed_opt ? seed : c.seed;
      opt.threads = c.threads;
      if (c.state.visibility != 1.0) opt.visibility = c.state.visibility;
      opt.only = parse_list(only);
      bool ok = true;
      for (const auto& r : run_acceptance(opt)) {
        std::cout << format_result(r) << std::endl;
        ok = ok && r.pass;
      }
      return ok ? 0 : 1;
    }
    if (*dm) return design(bitmap, out_dir, half_width);
    if (*an) {
      if (!map.empty()) return analyze_map(map);
      if (image.empty() || singles.empty() || annulus.empty())
        throw ConfigError("analyze: need --map, or --image, --singles and --annulus");
      return analyze_images(image, singles, annulus, bins, extent, out_dir);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
