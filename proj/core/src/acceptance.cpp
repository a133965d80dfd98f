#include "biphoton/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <sstream>

#include "biphoton/analysis.hpp"
#include "biphoton/config.hpp"
#include "biphoton/designer.hpp"
#include "biphoton/experiment.hpp"
#include "biphoton/measurement.hpp"
#include "biphoton/state.hpp"

namespace biphoton {
namespace {

constexpr double kNarrow = kPi / 90;
constexpr std::size_t kAngles = 24;

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct Context {
  AcceptanceOptions opt;
  double visibility() const { return opt.visibility.value_or(1.0); }
  bool no_fringes() const { return visibility() == 0.0; }

  DetectorConfig detector(std::uint64_t tag, Grid grid = Grid(256, 4.0)) const {
    DetectorConfig d;
    d.grid = grid;
    d.rng_seed = derive_seed(opt.seed, tag);
    d.threads = opt.threads;
    return d;
  }
};

// Average of cos(2 m phi') over a sector of width `width`, by midpoint quadrature.
double sector_contrast_quadrature(int m, double width) {
  constexpr int n = 20000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double phi = -0.5 * width + (i + 0.5) * width / n;
    acc += std::cos(2.0 * m * phi);
  }
  return acc / n;
}

ScanResult helical_scan(const Context& ctx, int ma, int mb, Sign sign, double v, double width,
                        std::uint64_t heralds, std::uint64_t tag) {
  const BiphotonState s = oam_state(ma, mb, sign, v);
  return scan_g2_matrix(s, width, kAngles, heralds, ctx.detector(tag));
}

CriterionResult coherence_map(const Context& ctx) {
  CriterionResult r{1, "g2 map reproduces 1+cos[4(phi-phi')]", false, ctx.no_fringes(), {}};
  const double v = ctx.visibility();
  const BiphotonState s = oam_state(2, 2, Sign::plus, v);
  const auto scan = scan_g2_matrix(s, kNarrow, kAngles, 100'000, ctx.detector(1));
  const auto cmp = compare_to_analytic(scan.g2, s, kNarrow);
  const auto count = fringe_count(scan.g2);
  r.pass = cmp.rmse < 0.1 && (!ctx.no_fringes() || !count);
  r.measured = "rmse=" + num(cmp.rmse) + " (< 0.1) over " + std::to_string(cmp.cells) + " cells";
  if (ctx.no_fringes()) r.measured += count ? ", unexpected fringes" : ", no fringes (expected for V=0)";
  return r;
}

CriterionResult finite_mask(const Context& ctx) {
  CriterionResult r{2, "finite-mask contrast of a pi/4 sector", false, ctx.no_fringes(), {}};
  const double v = ctx.visibility();
  const BiphotonState s = oam_state(2, 2, Sign::plus, v);
  const auto scan = scan_g2_matrix(s, kPi / 4, kAngles, 100'000, ctx.detector(2));
  const auto cmp = compare_to_analytic(scan.g2, s, kPi / 4);
  const double expected = v * sector_contrast_quadrature(2, kPi / 4);
  r.pass = std::abs(cmp.fitted_contrast - expected) <= 0.05;
  r.measured = "fitted contrast=" + num(cmp.fitted_contrast) + " expected=" + num(expected) + " (+-0.05)";
  if (ctx.no_fringes()) r.measured += ", no fringes (expected for V=0)";
  return r;
}

struct Sweep {
  struct Entry {
    int ma, mb;
    Sign sign;
    std::optional<int> count;
    int slope;
  };
  std::vector<Entry> entries;
};

const Sweep& sweep(const Context& ctx) {
  static std::optional<Sweep> cache;
  static std::uint64_t cached_seed = 0;
  static double cached_v = -1.0;
  if (cache && cached_seed == ctx.opt.seed && cached_v == ctx.visibility()) return *cache;
  Sweep s;
  std::uint64_t tag = 100;
  for (int ma = 1; ma <= 3; ++ma)
    for (int mb = 1; mb <= 3; ++mb)
      for (Sign sign : {Sign::plus, Sign::minus}) {
        const auto scan = helical_scan(ctx, ma, mb, sign, ctx.visibility(), kNarrow, 50'000, tag++);
        s.entries.push_back({ma, mb, sign, fringe_count(scan.g2), fringe_slope_sign(scan.g2)});
      }
  cache = std::move(s);
  cached_seed = ctx.opt.seed;
  cached_v = ctx.visibility();
  return *cache;
}

std::string config_name(const Sweep::Entry& e) {
  return "(" + std::to_string(e.ma) + "," + std::to_string(e.mb) + (e.sign == Sign::plus ? ",+)" : ",-)");
}

CriterionResult fringe_law(const Context& ctx) {
  CriterionResult r{3, "fringe count equals 2 m_A", false, ctx.no_fringes(), {}};
  std::size_t ok = 0;
  std::string misses;
  for (const auto& e : sweep(ctx).entries) {
    const bool hit = ctx.no_fringes() ? !e.count : (e.count && *e.count == 2 * e.ma);
    ok += hit;
    if (!hit) misses += " " + config_name(e) + "->" + (e.count ? std::to_string(*e.count) : "none");
  }
  r.pass = ok == sweep(ctx).entries.size();
  r.measured = std::to_string(ok) + "/" + std::to_string(sweep(ctx).entries.size()) + " matches";
  if (!misses.empty()) r.measured += ", misses:" + misses;
  if (ctx.no_fringes()) r.measured += ", no fringes (expected for V=0)";
  return r;
}

CriterionResult slope_law(const Context& ctx) {
  CriterionResult r{4, "fringe slope sign follows the state sign", false, ctx.no_fringes(), {}};
  std::size_t ok = 0;
  std::string misses;
  for (const auto& e : sweep(ctx).entries) {
    const int expected = ctx.no_fringes() ? 0 : (e.sign == Sign::plus ? 1 : -1);
    const bool hit = e.slope == expected;
    ok += hit;
    if (!hit) misses += " " + config_name(e) + "->" + std::to_string(e.slope);
  }
  r.pass = ok == sweep(ctx).entries.size();
  r.measured = std::to_string(ok) + "/" + std::to_string(sweep(ctx).entries.size()) + " matches";
  if (!misses.empty()) r.measured += ", misses:" + misses;
  if (ctx.no_fringes()) r.measured += ", no fringes (expected for V=0)";
  return r;
}

// Levels for a binary signal mask {0, pi/2} heralded on Phi_B in {0, pi/4, pi/2}.
CriterionResult binary_levels(const Context& ctx) {
  CriterionResult r{5, "binary-mask g2 levels 2/1/0", false, ctx.no_fringes(), {}};
  const double v = ctx.visibility();
  const Grid grid = default_state_grid();
  const auto env = AmplitudeEnvelope::gaussian(1.0);
  const std::vector<double> idler_phases{kPi / 4, kPi / 2, 0.0};
  const PhaseMask idler = equal_sector_phase(idler_phases);
  const double herald_width = kPi / 4;

  struct Case {
    std::string name;
    PhaseMask mask;
  };
  const std::vector<Case> cases{
      {"sector", sector_phase({{0.0, kPi, 0.0}, {kPi, kTwoPi, kPi / 2}})},
      {"letter-N", design_binary_mask(letter_n_raster(), kPi / 2, 0.0, 1.2, "builtin:N").mask},
  };
  double worst = 0.0;
  std::ostringstream os;
  std::uint64_t tag = 500;
  bool all = true;
  for (const auto& c : cases) {
    const BiphotonState s = make_state(env, env, c.mask, idler, Sign::plus, v, grid, grid);
    const auto singles = run_singles_imaging(s, 1'000'000, ctx.detector(tag++));
    const auto levels = c.mask.phase_levels();
    os << c.name << ":";
    for (double phase_b : {0.0, kPi / 4, kPi / 2}) {
      // middle of the idler sector carrying phase_b
      double orientation = 0.0;
      for (std::size_t k = 0; k < idler_phases.size(); ++k)
        if (std::abs(idler_phases[k] - phase_b) < 1e-12) orientation = (k + 0.5) * kTwoPi / 3.0;
      const SectorMask herald(orientation, herald_width);
      const auto img = run_heralded_imaging(s, herald, 1'000'000, ctx.detector(tag++));
      const RegionG2 reg = region_g2(s, herald, img, singles, 1.5);
      for (std::size_t l = 0; l < levels.size(); ++l) {
        // oracle: 1 + V cos(2 Phi_A - 2 Phi_B) for a pure region
        const double expected = 1.0 + v * std::cos(2.0 * reg.phase_levels[l] - 2.0 * phase_b);
        const double dev = std::abs(reg.g2[l] - expected);
        if (!(dev <= 0.1)) all = false;
        worst = std::max(worst, std::isfinite(dev) ? dev : 1e9);
        os << " [B=" << num(phase_b, 3) << ",A=" << num(reg.phase_levels[l], 3) << "] " << num(reg.g2[l], 3)
           << "/" << num(expected, 2);
      }
    }
    os << "; ";
  }
  r.pass = all;
  r.measured = "worst deviation=" + num(worst) + " (<= 0.1); " + os.str();
  if (ctx.no_fringes()) r.measured += "no fringes (expected for V=0)";
  return r;
}

// Profile expected if the singles carried no pattern: the envelope alone.
std::vector<double> envelope_profile(const AmplitudeEnvelope& env, const Grid& g, const PixelBinning& b) {
  std::vector<double> p(b.n_bins, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (b.labels[i] >= 0) p[static_cast<std::size_t>(b.labels[i])] += env.density(g.center(i));
  return p;
}

double max_level_correlation(std::span<const double> residual, const std::vector<Point2>& points,
                             const PhaseMask& mask) {
  double worst = 0.0;
  for (double level : mask.phase_levels()) {
    std::vector<double> ind(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
      ind[i] = std::abs(wrap_phase(mask.evaluate(points[i]) - level)) < 1e-9 ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(pearson(residual, ind)));
  }
  return worst;
}

CriterionResult singles_invisible(const Context& ctx) {
  CriterionResult r{6, "singles show no pattern", false, false, {}};
  const Grid grid = default_state_grid();
  const auto env = AmplitudeEnvelope::gaussian(1.0);
  const PhaseMask halves = sector_phase({{0.0, kPi, 0.0}, {kPi, kTwoPi, kPi / 2}});
  const std::vector<double> idler_phases{kPi / 4, kPi / 2, 0.0};
  const PhaseMask thirds = equal_sector_phase(idler_phases);
  const PhaseMask letter = design_binary_mask(letter_n_raster(), kPi / 2, 0.0, 1.2, "builtin:N").mask;
  std::ostringstream os;
  bool all = true;

  // Sector masks: fine azimuthal profile against the envelope-only expectation.
  const Grid fine(512, 2.5);
  const Annulus ring(0.25, 1.0);
  const PixelBinning bins = azimuthal_binning(fine, ring, 1800);
  std::vector<Point2> centers(bins.n_bins);
  for (std::size_t k = 0; k < bins.n_bins; ++k) centers[k] = Point2::polar(0.6, (k + 0.5) * kTwoPi / 1800.0);
  std::uint64_t tag = 600;
  const struct {
    const char* name;
    PhaseMask a, b;
  } sector_cases[] = {{"signal", halves, thirds}, {"idler", thirds, halves}};
  for (const auto& c : sector_cases) {
    // imaging the idler = imaging the signal of the exchanged state
    const BiphotonState s = make_state(env, env, c.a, c.b, Sign::plus, 1.0, grid, grid);
    const auto img = run_singles_imaging(s, 1'000'000, ctx.detector(tag++, fine));
    auto obs = binned_totals(img.as_field(), bins);
    auto exp = envelope_profile(env, fine, bins);
    const double so = std::accumulate(obs.begin(), obs.end(), 0.0);
    const double se = std::accumulate(exp.begin(), exp.end(), 0.0);
    std::vector<double> residual(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) residual[k] = (obs[k] / so) / (exp[k] / se) - 1.0;
    const double rho = max_level_correlation(residual, centers, c.a);
    all = all && rho < 0.05;
    os << "sector " << c.name << " |r|=" << num(rho) << "; ";
  }

  // Letter bitmap: pixel-wise residual against the pattern indicator.
  {
    const BiphotonState s = make_state(env, env, letter, thirds, Sign::plus, 1.0, grid, grid);
    const auto img = run_singles_imaging(s, 1'000'000, ctx.detector(tag++, fine));
    std::vector<double> residual;
    std::vector<Point2> pts;
    double se = 0.0;
    const double so = static_cast<double>(img.n_recorded);
    for (std::size_t i = 0; i < fine.size(); ++i) se += env.density(fine.center(i));
    for (std::size_t i = 0; i < fine.size(); ++i) {
      const Point2 p = fine.center(i);
      if (p.radius() > 1.5) continue;
      const double e = env.density(p) / se * so;
      residual.push_back(img.counts[i] / e - 1.0);
      pts.push_back(p);
    }
    const double rho = max_level_correlation(residual, pts, letter);
    all = all && rho < 0.05;
    os << "letter-N |r|=" << num(rho) << "; ";
  }

  // Helical states: chi-square of the singles profile against the pixel-geometry expectation.
  for (const auto& [ma, mb] : {std::pair{2, 2}, std::pair{1, 3}}) {
    const BiphotonState s = oam_state(ma, mb, Sign::plus);
    const auto det = ctx.detector(tag++);
    const auto img = run_singles_imaging(s, 1'000'000, det);
    const Annulus ann = auto_annulus(s.envelope(Photon::signal));
    const PixelBinning b = azimuthal_binning(det.grid, ann, 90);
    const auto obs = binned_totals(img.as_field(), b);
    auto exp = binned_totals(expected_singles_image(s, det.grid), b);
    const double so = std::accumulate(obs.begin(), obs.end(), 0.0);
    const double se = std::accumulate(exp.begin(), exp.end(), 0.0);
    for (double& e : exp) e *= so / se;
    const ChiSquare chi = chi_square(obs, exp);
    all = all && chi.p_value > 0.01;
    os << "helical(" << ma << "," << mb << ") chi2=" << num(chi.statistic, 1) << "/" << chi.dof
       << " p=" << num(chi.p_value, 3) << "; ";
  }
  r.pass = all;
  r.measured = os.str() + "(|r| < 0.05, p > 0.01)";
  return r;
}

// Joint histogram oracle: supersampled quadrature of the analytic density.
CriterionResult sampler_oracle(const Context& ctx) {
  CriterionResult r{7, "sampler matches grid quadrature", false, false, {}};
  const BiphotonState s = oam_state(1, 2, Sign::minus, 1.0);
  constexpr std::size_t ns = 64, ni = 16;
  const double extent = 4.0;
  const double cell = 2.0 * extent / ns;
  const auto& ea = s.envelope(Photon::signal);
  const auto& eb = s.envelope(Photon::idler);
  const double sv = as_double(s.sign()) * s.visibility();

  // idler side: per angular bin, integral of rho_B, rho_B cos(2 Phi_B), rho_B sin(2 Phi_B)
  std::vector<double> wb(ni, 0.0), cb(ni, 0.0), sb(ni, 0.0);
  {
    constexpr std::size_t n = 1024;
    const double h = 2.0 * extent / n;
    for (std::size_t iy = 0; iy < n; ++iy)
      for (std::size_t ix = 0; ix < n; ++ix) {
        const Point2 p{-extent + (ix + 0.5) * h, -extent + (iy + 0.5) * h};
        const auto bin = std::min(ni - 1, static_cast<std::size_t>(p.angle() / (kTwoPi / ni)));
        const double rho = eb.density(p) * h * h;
        const double ph = 2.0 * s.mask(Photon::idler).evaluate(p);
        wb[bin] += rho;
        cb[bin] += rho * std::cos(ph);
        sb[bin] += rho * std::sin(ph);
      }
  }
  std::vector<double> oracle(ns * ns * ni, 0.0);
  constexpr int sub = 6;
  for (std::size_t row = 0; row < ns; ++row)
    for (std::size_t col = 0; col < ns; ++col)
      for (int sy = 0; sy < sub; ++sy)
        for (int sx = 0; sx < sub; ++sx) {
          const Point2 p{-extent + (col + (sx + 0.5) / sub) * cell, extent - (row + (sy + 0.5) / sub) * cell};
          const double rho = ea.density(p);
          const double ph = 2.0 * s.mask(Photon::signal).evaluate(p);
          for (std::size_t k = 0; k < ni; ++k)
            oracle[(row * ns + col) * ni + k] += rho * (wb[k] + sv * (std::cos(ph) * cb[k] + std::sin(ph) * sb[k]));
        }
  const double z = std::accumulate(oracle.begin(), oracle.end(), 0.0);
  for (double& o : oracle) o /= z;

  std::vector<double> hist(oracle.size(), 0.0);
  constexpr std::uint64_t pairs = 1'000'000;
  const std::uint64_t blocks = (pairs + kEventBlock - 1) / kEventBlock;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    Rng rng = substream(derive_seed(ctx.opt.seed, 7), 0, b);
    const std::uint64_t len = std::min(kEventBlock, pairs - b * kEventBlock);
    for (std::uint64_t i = 0; i < len; ++i) {
      const auto [a, bp] = sample_pair(s, rng);
      const auto col = std::min(ns - 1, static_cast<std::size_t>((a.x + extent) / cell));
      const auto row = std::min(ns - 1, static_cast<std::size_t>((extent - a.y) / cell));
      const auto k = std::min(ni - 1, static_cast<std::size_t>(bp.angle() / (kTwoPi / ni)));
      hist[(row * ns + col) * ni + k] += 1.0;
    }
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < hist.size(); ++i) tv += std::abs(hist[i] / pairs - oracle[i]);
  tv *= 0.5;
  r.pass = tv < 0.05;
  r.measured = "total variation=" + num(tv) + " (< 0.05) over " + std::to_string(hist.size()) + " cells";
  return r;
}

CriterionResult identities(const Context& ctx) {
  CriterionResult r{8, "exact identities", false, false, {}};
  Rng rng = substream(derive_seed(ctx.opt.seed, 8), 0, 0);
  auto point = [&] { return Point2{(uniform01(rng) - 0.5) * 5.0, (uniform01(rng) - 0.5) * 5.0}; };
  double global = 0.0, shift = 0.0, exchange = 0.0, conj = 0.0, marginal = 0.0;

  const Grid grid = default_state_grid();
  const auto env = AmplitudeEnvelope::ring_gaussian(1.0, 1);
  // global phase: a common offset on both masks leaves |Psi|^2 unchanged
  {
    const std::vector<double> pa{0.0, kPi / 2, kPi / 3}, pb{kPi / 4, 0.0, kPi / 2};
    std::vector<double> qa, qb;
    for (double p : pa) qa.push_back(p + 0.7);
    for (double p : pb) qb.push_back(p + 0.7);
    const auto s1 = make_state(env, env, equal_sector_phase(pa), equal_sector_phase(pb), Sign::plus, 1.0, grid, grid);
    const auto s2 = make_state(env, env, equal_sector_phase(qa), equal_sector_phase(qb), Sign::plus, 1.0, grid, grid);
    for (int i = 0; i < 2000; ++i) {
      const Point2 a = point(), b = point();
      global = std::max(global, std::abs(joint_density(s1, a, b) - joint_density(s2, a, b)));
    }
  }
  for (int ma = 1; ma <= 3; ++ma)
    for (int mb = 1; mb <= 3; ++mb) {
      const auto plus = oam_state(ma, mb, Sign::plus);
      const auto minus = oam_state(ma, mb, Sign::minus);
      const auto swapped = make_state(plus.envelope(Photon::idler), plus.envelope(Photon::signal),
                                      plus.mask(Photon::idler), plus.mask(Photon::signal), Sign::plus, 1.0);
      for (int i = 0; i < 500; ++i) {
        const Point2 a = point(), b = point();
        const double rot = kPi / (2.0 * ma);
        const Point2 ar{a.x * std::cos(rot) - a.y * std::sin(rot), a.x * std::sin(rot) + a.y * std::cos(rot)};
        shift = std::max(shift, std::abs(joint_density(minus, a, b) - joint_density(plus, ar, b)));
        exchange = std::max(exchange, std::abs(joint_density(plus, a, b) - joint_density(swapped, b, a)));
      }
      const auto m = marginal_density(plus, Photon::signal);
      const Field2D eta = envelope_density(plus.envelope(Photon::signal), m.grid);
      const double tm = m.values.sum(), te = eta.sum();
      for (std::size_t k = 0; k < eta.data.size(); ++k)
        marginal = std::max(marginal, std::abs(m.values.data[k] / tm - eta.data[k] / te) / m.grid.pixel_area());
    }
  for (const PhaseMask& mask : {helical_phase(3), equal_sector_phase(std::vector<double>{kPi, kPi / 2, -kPi / 3}),
                                design_binary_mask(letter_n_raster()).mask}) {
    const PhaseMask c = conjugate(mask);
    for (int i = 0; i < 2000; ++i) {
      const Point2 p = point();
      conj = std::max(conj, std::abs(c.evaluate(p) + mask.evaluate(p)));
    }
  }
  const double worst = std::max({global, shift, exchange, conj, marginal});
  r.pass = worst <= 1e-6;
  r.measured = "max deviations: global=" + io::format_double(global) + " shift=" + io::format_double(shift) +
               " exchange=" + io::format_double(exchange) + " conjugate=" + io::format_double(conj) +
               " marginal=" + io::format_double(marginal) + " (<= 1e-6)";
  return r;
}

CriterionResult visibility_linearity(const Context& ctx) {
  CriterionResult r{9, "fitted contrast scales with visibility", false, false, {}};
  const double c = sector_contrast_quadrature(2, kNarrow);
  bool all = true;
  std::ostringstream os;
  std::uint64_t tag = 900;
  for (double v : {0.25, 0.5, 0.9}) {
    const BiphotonState s = oam_state(2, 2, Sign::plus, v);
    const auto scan = scan_g2_matrix(s, kNarrow, kAngles, 100'000, ctx.detector(tag++));
    const auto cmp = compare_to_analytic(scan.g2, s, kNarrow);
    all = all && std::abs(cmp.fitted_contrast - v * c) <= 0.02;
    os << "V=" << v << " fit=" << num(cmp.fitted_contrast) << " expected=" << num(v * c) << "; ";
  }
  r.pass = all;
  r.measured = os.str() + "(+-0.02)";
  return r;
}

std::vector<char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

CriterionResult determinism(const Context& ctx) {
  CriterionResult r{10, "identical seeds give identical artifacts", false, false, {}};
  const auto root = std::filesystem::temp_directory_path() /
                    ("biphoton-determinism-" + std::to_string(ctx.opt.seed) + "-" +
                     std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  ExperimentConfig c;
  c.preset = "fig3";
  c.seed = ctx.opt.seed;
  c.state.signal.envelope.m = 2;
  c.state.idler.envelope.m = 2;
  c.state.signal.mask.m = 2;
  c.state.idler.mask.m = 2;
  c.heralding.k_angles = 8;
  c.heralding.orientations = {kPi / 4, 0.0};
  c.events = {20'000, 100'000, 50'000};
  std::size_t compared = 0, differing = 0;
  try {
    c.output = root / "a";
    c.threads = 1;
    const auto a = run_experiment(c);
    c.output = root / "b";
    c.threads = 3;
    const auto b = run_experiment(c);
    for (const auto& f : a.files) {
      const auto ext = std::filesystem::path(f).extension();
      if (ext != ".pgm" && ext != ".csv") continue;
      ++compared;
      if (slurp(a.directory / f) != slurp(b.directory / f)) ++differing;
    }
  } catch (...) {
    std::filesystem::remove_all(root);
    throw;
  }
  std::filesystem::remove_all(root);
  r.pass = compared > 0 && differing == 0;
  r.measured = std::to_string(compared - differing) + "/" + std::to_string(compared) +
               " PGM/CSV files bit-identical (1 vs 3 threads)";
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  const Context ctx{options};
  const std::vector<std::function<CriterionResult(const Context&)>> all{
      coherence_map, finite_mask,  fringe_law,    slope_law,           binary_levels,
      singles_invisible, sampler_oracle, identities, visibility_linearity, determinism};
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end())
      continue;
    try {
      out.push_back(all[i](ctx));
    } catch (const std::exception& e) {
      out.push_back({id, "criterion " + std::to_string(id), false, false, std::string("error: ") + e.what()});
    }
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return std::string(r.pass ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name + ": " + r.measured;
}

}  // namespace biphoton
