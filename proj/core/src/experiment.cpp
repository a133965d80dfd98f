#include "biphoton/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "biphoton/designer.hpp"
#include "biphoton/error.hpp"

namespace biphoton {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Tags that keep every sub-run on its own random stream.
constexpr std::uint64_t kTagSingles = 0x100;
constexpr std::uint64_t kTagImage = 0x200;
constexpr std::uint64_t kTagScan = 0x300;
constexpr std::uint64_t kTagSweep = 0x400;
constexpr std::uint64_t kTagFig5 = 0x500;

std::string fmt(double v) { return io::format_double(v); }

std::string fixed(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

class Bundle {
public:
  explicit Bundle(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("output: cannot create " + dir_.string() + ": " + ec.message());
  }

  std::filesystem::path path(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }

  void image(const std::string& stem, const CoincidenceImage& img) {
    const auto w = img.grid.n_x(), h = img.grid.n_y();
    io::write_counts_pgm(path(stem + ".pgm"), img.counts, w, h);
    io::write_image_csv(path(stem + ".csv"), img.counts, w, h);
    preview(stem, img.as_field());
  }

  void field(const std::string& stem, const Field2D& f, double lo, double hi) {
    io::write_field_pgm(path(stem + ".pgm"), f, lo, hi);
    io::write_field_csv(path(stem + ".csv"), f);
    if (io::write_png_preview(dir_ / (stem + ".png"), f, lo, hi)) files_.push_back(stem + ".png");
  }

  void map(const std::string& stem, const CoherenceMap& m, double lo, double hi) {
    io::write_map_csv(path(stem + ".csv"), m);
    io::write_field_pgm(path(stem + ".pgm"), m.values, lo, hi);
  }

  void preview(const std::string& stem, const Field2D& f) {
    if (io::write_png_preview(dir_ / (stem + ".png"), f)) files_.push_back(stem + ".png");
  }

  const std::filesystem::path& dir() const { return dir_; }
  std::vector<std::string>& files() { return files_; }

private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

DetectorConfig with_seed(DetectorConfig det, std::uint64_t tag) {
  det.rng_seed = derive_seed(det.rng_seed, tag);
  return det;
}

std::string describe(const BiphotonState& s) {
  const auto charge = [](const PhaseMask& m) -> std::string {
    if (m.is_helical()) return "helical(" + std::to_string(m.helical_charge()) + ")";
    if (std::holds_alternative<PhaseMask::Sector>(m.kind())) return "sector";
    return "bitmap";
  };
  return charge(s.mask(Photon::signal)) + " x " + charge(s.mask(Photon::idler)) +
         (s.sign() == Sign::plus ? " +" : " -") + " V=" + fmt(s.visibility());
}

Annulus analysis_annulus(const ExperimentConfig& c, const BiphotonState& s) {
  return c.analysis.annulus.value_or(auto_annulus(s.envelope(Photon::signal)));
}

void scan_metrics(io::Metrics& m, const std::string& prefix, const ScanResult& scan,
                  const BiphotonState& state, double width) {
  const auto cmp = compare_to_analytic(scan.g2, state, width);
  const auto count = fringe_count(scan.g2);
  m.emplace_back(prefix + "annulus", fmt(scan.annulus.r_in) + "," + fmt(scan.annulus.r_out));
  m.emplace_back(prefix + "rmse", fmt(cmp.rmse));
  m.emplace_back(prefix + "fitted_contrast", fmt(cmp.fitted_contrast));
  m.emplace_back(prefix + "fitted_quadrature", fmt(cmp.fitted_quadrature));
  if (state.mask(Photon::idler).is_helical())
    m.emplace_back(prefix + "expected_contrast",
                   fmt(state.visibility() * mask_average_contrast(state.mask(Photon::idler).helical_charge(), width)));
  m.emplace_back(prefix + "fringe_count", count ? std::to_string(*count) : "none");
  m.emplace_back(prefix + "slope_sign", std::to_string(fringe_slope_sign(scan.g2)));
}

ScanResult run_scan(const ExperimentConfig& c, const BiphotonState& state, Bundle& out, io::Metrics& m) {
  ScanOptions opt;
  opt.n_bins = c.analysis.n_bins;
  opt.annulus = analysis_annulus(c, state);
  const auto det = with_seed(c.detector_config(), kTagScan);
  ScanResult scan = scan_g2_matrix(state, c.heralding.width, c.heralding.k_angles, c.events.heralds_per_angle,
                                   det, opt);
  out.map("G2_map", scan.G2, 0.0, 1.0);
  out.map("g2_map", scan.g2, 0.0, 2.0);
  scan_metrics(m, "scan.", scan, state, c.heralding.width);
  return scan;
}

void run_fig3(const ExperimentConfig& c, Bundle& out, io::Metrics& m) {
  const BiphotonState state = c.state.build(c.base_dir);
  m.emplace_back("state", describe(state));
  const auto det = c.detector_config();
  const Annulus ann = analysis_annulus(c, state);

  const auto singles = run_singles_imaging(state, c.events.singles, with_seed(det, kTagSingles));
  out.image("singles", singles);
  const Field2D singles_unf = unfold(singles.as_field(), singles.grid, ann, c.analysis.unfold_phi, c.analysis.unfold_r);
  out.field("singles_unfolded", singles_unf, 0.0, std::max(1.0, singles_unf.max()));
  m.emplace_back("singles.recorded", std::to_string(singles.n_recorded));

  for (std::size_t i = 0; i < c.heralding.orientations.size(); ++i) {
    const double o = c.heralding.orientations[i];
    const SectorMask mask(o, c.heralding.width);
    const auto img = run_heralded_imaging(state, mask, c.events.image_heralds, with_seed(det, kTagImage + i));
    char stem[32];
    std::snprintf(stem, sizeof stem, "heralded_%02zu", i);
    out.image(stem, img);
    const Field2D unf = unfold(img.as_field(), img.grid, ann, c.analysis.unfold_phi, c.analysis.unfold_r);
    out.field(std::string(stem) + "_unfolded", unf, 0.0, std::max(1.0, unf.max()));
    const auto prof = azimuthal_profile(img, ann, c.analysis.n_bins, true);
    const auto fc = fringe_count(prof.values);
    const std::string key = std::string(stem) + ".";
    m.emplace_back(key + "orientation", fmt(o));
    m.emplace_back(key + "heralds", std::to_string(img.n_heralds));
    m.emplace_back(key + "recorded", std::to_string(img.n_recorded));
    m.emplace_back(key + "fringe_count", fc ? std::to_string(*fc) : "none");
  }
  run_scan(c, state, out, m);
}

void run_fig4(const ExperimentConfig& c, Bundle& out, io::Metrics& m) {
  const double waist = c.state.signal.envelope.waist;
  const Grid grid = c.state.grid.build();
  std::vector<std::vector<std::string>> rows;
  std::size_t count_ok = 0, slope_pos = 0, total = 0;
  std::uint64_t tag = kTagSweep;
  for (int ma : c.fig4.m_values)
    for (int mb : c.fig4.m_values)
      for (Sign sign : {Sign::plus, Sign::minus}) {
        const BiphotonState state = oam_state(ma, mb, sign, c.state.visibility, grid, waist);
        ScanOptions opt;
        opt.n_bins = c.analysis.n_bins;
        opt.annulus = analysis_annulus(c, state);
        const auto scan = scan_g2_matrix(state, c.fig4.width, c.heralding.k_angles, c.fig4.heralds_per_angle,
                                         with_seed(c.detector_config(), tag++), opt);
        const auto cmp = compare_to_analytic(scan.g2, state, c.fig4.width);
        const auto count = fringe_count(scan.g2);
        const int slope = fringe_slope_sign(scan.g2);
        const std::string s = sign == Sign::plus ? "+" : "-";
        const std::string stem = "fig4_g2_a" + std::to_string(ma) + "_b" + std::to_string(mb) +
                                 (sign == Sign::plus ? "_plus" : "_minus");
        out.map(stem, scan.g2, 0.0, 2.0);
        ++total;
        count_ok += count && *count == 2 * std::abs(ma);
        slope_pos += slope > 0;
        rows.push_back({std::to_string(ma), std::to_string(mb), s, count ? std::to_string(*count) : "none",
                        std::to_string(2 * std::abs(ma)), std::to_string(slope), fmt(cmp.fitted_contrast),
                        fmt(cmp.rmse)});
      }
  io::write_table_csv(out.path("fig4_sweep.csv"),
                      {"m_a", "m_b", "sign", "fringe_count", "expected_count", "slope_sign", "fitted_contrast", "rmse"},
                      rows);
  m.emplace_back("fig4.configurations", std::to_string(total));
  m.emplace_back("fig4.fringe_count_matches", std::to_string(count_ok));
  m.emplace_back("fig4.positive_slopes", std::to_string(slope_pos));
}

void fig5_case(const ExperimentConfig& c, const std::string& name, const BiphotonState& state, Bundle& out,
               io::Metrics& m, std::uint64_t tag) {
  const auto det = c.detector_config();
  const auto singles = run_singles_imaging(state, c.fig5.singles, with_seed(det, tag));
  out.image(name + "_singles", singles);
  out.field(name + "_signal_phase", rasterize(state.mask(Photon::signal), singles.grid), -kPi, kPi);

  ScheduleOptions so;
  so.phases_a = c.fig5.signal_phases;
  so.sign = state.sign();
  so.visibility = state.visibility();
  so.herald_width = c.heralding.width;
  const ScanSchedule schedule = scanning_schedule(state.mask(Photon::idler), so);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < schedule.entries.size(); ++k) {
    const ScheduleEntry& e = schedule.entries[k];
    const SectorMask herald(e.orientation, c.heralding.width);
    const auto img = run_heralded_imaging(state, herald, c.fig5.events, with_seed(det, tag + 1 + k));
    const std::string stem = name + "_b" + std::to_string(k);
    out.image(stem + "_heralded", img);
    const RegionG2 reg = region_g2(state, herald, img, singles, c.fig5.analysis_radius);
    const Field2D g = g2_image(img, singles, 4, reg.target);
    out.field(stem + "_g2", g, 0.0, 2.5);
    m.emplace_back(name + ".b" + std::to_string(k) + ".phase_b", fmt(e.phase_b));
    for (std::size_t l = 0; l < reg.phase_levels.size(); ++l) {
      const std::string key = name + ".b" + std::to_string(k) + ".a" + fixed("%.4f", reg.phase_levels[l]);
      m.emplace_back(key + ".g2", fmt(reg.g2[l]));
      m.emplace_back(key + ".predicted", fmt(reg.predicted[l]));
      rows.push_back({fmt(e.phase_b), fmt(e.orientation), fmt(reg.phase_levels[l]), fmt(reg.g2[l]),
                      fmt(reg.predicted[l]), fmt(reg.pixels[l])});
    }
  }
  io::write_table_csv(out.path(name + "_levels.csv"),
                      {"phase_b", "orientation", "phase_a", "g2", "predicted", "pixels"}, rows);

  std::vector<std::vector<std::string>> sched;
  for (const auto& e : schedule.entries)
    sched.push_back({e.label, fmt(e.phase_b), fmt(e.orientation), fmt(e.sector_width),
                     e.narrow_sector ? "1" : "0", fmt(e.mixing_fraction)});
  io::write_table_csv(out.path(name + "_schedule.csv"),
                      {"label", "phase_b", "orientation", "sector_width", "narrow_sector", "mixing_fraction"}, sched);
}

void run_fig5(const ExperimentConfig& c, Bundle& out, io::Metrics& m) {
  const Grid grid = c.state.grid.build();
  const auto env_a = c.state.signal.envelope.build();
  const auto env_b = c.state.idler.envelope.build();
  const PhaseMask idler = equal_sector_phase(c.fig5.idler_phases);

  if (c.fig5.signal_phases.size() != 2)
    throw ConfigError("fig5.signal_phases: the binary signal masks need exactly two phases");
  const PhaseMask halves = sector_phase({{0.0, kPi, c.fig5.signal_phases[0]}, {kPi, kTwoPi, c.fig5.signal_phases[1]}});
  const auto sector_state = make_state(env_a, env_b, halves, idler, c.state.sign, c.state.visibility, grid, grid);
  m.emplace_back("sector.state", describe(sector_state));
  fig5_case(c, "sector", sector_state, out, m, kTagFig5);

  MaskSpec spec;
  spec.kind = MaskSpec::Kind::bitmap;
  spec.bitmap = c.fig5.bitmap;
  spec.half_width = c.fig5.bitmap_half_width;
  spec.phase_hi = c.fig5.signal_phases[1];
  spec.phase_lo = c.fig5.signal_phases[0];
  const PhaseMask letter = spec.build(c.base_dir);
  const auto letter_state = make_state(env_a, env_b, letter, idler, c.state.sign, c.state.visibility, grid, grid);
  m.emplace_back("bitmap.state", describe(letter_state));
  fig5_case(c, "bitmap", letter_state, out, m, kTagFig5 + 0x40);
}

// Bitmap paths relative to the config file become absolute so that the
// manifest re-runs from any directory.
ExperimentConfig resolved(ExperimentConfig c) {
  auto fix = [&](std::string& path) {
    if (path.empty() || path.rfind("builtin:", 0) == 0) return;
    std::filesystem::path p = path;
    if (p.is_relative() && !c.base_dir.empty()) path = std::filesystem::absolute(c.base_dir / p).lexically_normal().string();
  };
  fix(c.state.signal.mask.bitmap);
  fix(c.state.idler.mask.bitmap);
  fix(c.fig5.bitmap);
  return c;
}

}  // namespace

std::string version() { return BIPHOTON_VERSION; }

RegionG2 region_g2(const BiphotonState& state, const SectorMask& herald, const CoincidenceImage& heralded,
                   const CoincidenceImage& singles, double radius) {
  if (!(heralded.grid == singles.grid)) throw ConfigError("region_g2: images use different grids");
  const PhaseMask& mask = state.mask(Photon::signal);
  const PixelBinning bins = classify_by_phase(heralded.grid, mask, radius);
  const auto h = binned_totals(heralded.as_field(), bins);
  const auto s = binned_totals(singles.as_field(), bins);
  const HeraldMoments mom = herald_moments(state, herald);

  RegionG2 out;
  out.phase_levels = mask.phase_levels();
  out.target = analytic_mean_g2(state, mom, heralded.grid, bins);
  const G2Values g = extract_g2(h, s, out.target);
  out.g2 = g.values;

  const Field2D expected = expected_singles_image(state, heralded.grid);
  std::vector<double> num(bins.n_bins, 0.0), den(bins.n_bins, 0.0);
  out.pixels.assign(bins.n_bins, 0.0);
  for (std::size_t i = 0; i < bins.labels.size(); ++i) {
    const int l = bins.labels[i];
    if (l < 0) continue;
    const auto k = static_cast<std::size_t>(l);
    out.pixels[k] += 1.0;
    num[k] += expected.data[i] * expected_g2(state, mom, heralded.grid.center(i));
    den[k] += expected.data[i];
  }
  out.predicted.resize(bins.n_bins);
  for (std::size_t k = 0; k < bins.n_bins; ++k) out.predicted[k] = den[k] > 0.0 ? num[k] / den[k] : kNaN;
  return out;
}

Field2D g2_image(const CoincidenceImage& heralded, const CoincidenceImage& singles, std::size_t block,
                 double target_mean, double min_singles) {
  if (!(heralded.grid == singles.grid)) throw ConfigError("g2_image: images use different grids");
  if (block == 0) throw ConfigError("g2_image: block must be >= 1");
  const std::size_t w = heralded.grid.n_x(), h = heralded.grid.n_y();
  const std::size_t bw = w / block, bh = h / block;
  Field2D hs(bh, bw), ss(bh, bw);
  for (std::size_t r = 0; r < bh * block; ++r)
    for (std::size_t c = 0; c < bw * block; ++c) {
      hs(r / block, c / block) += heralded.counts[r * w + c];
      ss(r / block, c / block) += singles.counts[r * w + c];
    }
  const double ht = hs.sum(), st = ss.sum();
  Field2D g(bh, bw, kNaN);
  if (ht <= 0.0 || st <= 0.0) return g;
  for (std::size_t i = 0; i < g.data.size(); ++i)
    if (ss.data[i] >= min_singles && ss.data[i] > 0.0) g.data[i] = target_mean * (hs.data[i] / ht) / (ss.data[i] / st);
  return g;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  Bundle out(config.output);
  io::Metrics m;
  m.emplace_back("preset", config.preset);
  m.emplace_back("seed", std::to_string(config.seed));
  m.emplace_back("version", version());

  if (config.preset == "fig3") {
    run_fig3(config, out, m);
  } else if (config.preset == "fig4") {
    run_fig4(config, out, m);
  } else if (config.preset == "fig5") {
    run_fig5(config, out, m);
  } else {
    const BiphotonState state = config.state.build(config.base_dir);
    m.emplace_back("state", describe(state));
    run_scan(config, state, out, m);
  }
  io::write_metrics(out.path("metrics.txt"), m);

  json manifest;
  manifest["tool"] = "biphoton";
  manifest["version"] = version();
  manifest["seed"] = config.seed;
  manifest["config"] = json::parse(to_json_text(resolved(config)));
  manifest["outputs"] = out.files();
  out.files().push_back("manifest.json");
  std::ofstream f(out.dir() / "manifest.json", std::ios::binary);
  f << manifest.dump(2) << '\n';
  if (!f) throw InternalError("cannot write manifest to " + out.dir().string());
  return {out.dir(), out.files(), m};
}

}  // namespace biphoton
