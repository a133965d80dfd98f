#include "biphoton/analysis.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include "biphoton/error.hpp"

namespace biphoton {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> normalized(std::span<const double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  std::vector<double> out(v.begin(), v.end());
  if (total > 0.0)
    for (double& x : out) x /= total;
  return out;
}

// Average of cos(k phi - theta) (or sin) over [a, b].
double bin_average_cos(int k, double theta, double a, double b) {
  if (k == 0) return std::cos(-theta);
  const double kd = static_cast<double>(k);
  return (std::sin(kd * b - theta) - std::sin(kd * a - theta)) / (kd * (b - a));
}
double bin_average_sin(int k, double theta, double a, double b) {
  if (k == 0) return std::sin(-theta);
  const double kd = static_cast<double>(k);
  return (std::cos(kd * a - theta) - std::cos(kd * b - theta)) / (kd * (b - a));
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Magnitudes of harmonics 0..n/2 of a real sequence.
std::vector<double> spectrum_magnitudes(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> in(x.begin(), x.end());
  fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::vector<double> mag(static_cast<std::size_t>(n / 2 + 1));
  for (int k = 0; k <= n / 2; ++k) mag[static_cast<std::size_t>(k)] = std::hypot(out[k][0], out[k][1]);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(out);
  return mag;
}

std::vector<double> finite_or_mean(std::vector<double> v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : v)
    if (std::isfinite(x)) {
      sum += x;
      ++n;
    }
  const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
  for (double& x : v)
    if (!std::isfinite(x)) x = mean;
  return v;
}

}  // namespace

Annulus::Annulus(double in, double out) : r_in(in), r_out(out) {
  if (!(in >= 0.0) || !(out > in) || !std::isfinite(out))
    throw ConfigError("annulus: need 0 <= r_in < r_out");
}

Annulus auto_annulus(const AmplitudeEnvelope& env) {
  const double peak = env.order() > 0 ? env.peak_radius() : env.radial_peak();
  return Annulus(0.5 * peak, 2.0 * peak);
}

PixelBinning azimuthal_binning(const Grid& grid, const Annulus& annulus, std::size_t n_bins) {
  if (n_bins < 8) throw ConfigError("azimuthal profile: n_bins must be >= 8");
  PixelBinning b{std::vector<int>(grid.size(), -1), n_bins};
  bool any = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point2 c = grid.center(i);
    if (!annulus.contains(c.radius())) continue;
    auto bin = static_cast<std::size_t>(c.angle() / kTwoPi * static_cast<double>(n_bins));
    b.labels[i] = static_cast<int>(std::min(bin, n_bins - 1));
    any = true;
  }
  if (!any) throw RangeError("azimuthal profile: annulus contains no pixel centers");
  return b;
}

std::vector<double> binned_totals(const Field2D& image, const PixelBinning& binning) {
  if (image.data.size() != binning.labels.size())
    throw ConfigError("binned totals: image and binning sizes differ");
  std::vector<double> out(binning.n_bins, 0.0);
  for (std::size_t i = 0; i < image.data.size(); ++i)
    if (binning.labels[i] >= 0) out[static_cast<std::size_t>(binning.labels[i])] += image.data[i];
  return out;
}

AzimuthalProfile azimuthal_profile(const Field2D& image, const Grid& grid, const Annulus& annulus,
                                   std::size_t n_bins, bool normalize) {
  const PixelBinning b = azimuthal_binning(grid, annulus, n_bins);
  AzimuthalProfile p{binned_totals(image, b), false};
  if (normalize) {
    p.values = normalized(p.values);
    p.normalized = true;
  }
  return p;
}

AzimuthalProfile azimuthal_profile(const CoincidenceImage& image, const Annulus& annulus,
                                   std::size_t n_bins, bool normalize) {
  return azimuthal_profile(image.as_field(), image.grid, annulus, n_bins, normalize);
}

double bilinear(const Field2D& image, const Grid& grid, Point2 p) {
  const Point2 o = grid.origin();
  double fc = (p.x - (o.x - grid.extent_x())) / grid.dx() - 0.5;
  double fr = ((o.y + grid.extent_y()) - p.y) / grid.dy() - 0.5;
  fc = std::clamp(fc, 0.0, static_cast<double>(image.cols - 1));
  fr = std::clamp(fr, 0.0, static_cast<double>(image.rows - 1));
  const auto c0 = std::min(static_cast<std::size_t>(fc), image.cols - 2);
  const auto r0 = std::min(static_cast<std::size_t>(fr), image.rows - 2);
  const double tx = fc - static_cast<double>(c0);
  const double ty = fr - static_cast<double>(r0);
  return (1 - ty) * ((1 - tx) * image(r0, c0) + tx * image(r0, c0 + 1)) +
         ty * ((1 - tx) * image(r0 + 1, c0) + tx * image(r0 + 1, c0 + 1));
}

Field2D unfold(const Field2D& image, const Grid& grid, const Annulus& annulus, std::size_t n_phi,
               std::size_t n_r) {
  if (annulus.r_out > grid.inscribed_radius())
    throw RangeError("unfold: annulus extends beyond the grid");
  if (n_phi == 0 || n_r == 0) throw ConfigError("unfold: output size must be positive");
  Field2D out(n_r, n_phi);
  const double dr = (annulus.r_out - annulus.r_in) / static_cast<double>(n_r);
  const double dphi = kTwoPi / static_cast<double>(n_phi);
  for (std::size_t i = 0; i < n_r; ++i) {
    const double r = annulus.r_in + (static_cast<double>(i) + 0.5) * dr;
    for (std::size_t j = 0; j < n_phi; ++j)
      out(i, j) = bilinear(image, grid, Point2::polar(r, (static_cast<double>(j) + 0.5) * dphi));
  }
  return out;
}

Field2D refold(const Field2D& unfolded, const Grid& grid, const Annulus& annulus) {
  Field2D out(grid.n_y(), grid.n_x());
  const auto n_r = unfolded.rows;
  const auto n_phi = unfolded.cols;
  const double dr = (annulus.r_out - annulus.r_in) / static_cast<double>(n_r);
  const double dphi = kTwoPi / static_cast<double>(n_phi);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const Point2 c = grid.center(idx);
    const double r = c.radius();
    if (r < annulus.r_in || r > annulus.r_out) continue;
    double fr = std::clamp((r - annulus.r_in) / dr - 0.5, 0.0, static_cast<double>(n_r - 1));
    const auto r0 = std::min(static_cast<std::size_t>(fr), n_r > 1 ? n_r - 2 : 0);
    const double ty = n_r > 1 ? fr - static_cast<double>(r0) : 0.0;
    const double fp = c.angle() / dphi - 0.5;
    const double fl = std::floor(fp);
    const double tx = fp - fl;
    const auto p0 = static_cast<std::size_t>((static_cast<long>(fl) + static_cast<long>(n_phi)) %
                                             static_cast<long>(n_phi));
    const auto p1 = (p0 + 1) % n_phi;
    const auto r1 = n_r > 1 ? r0 + 1 : r0;
    out.data[idx] = (1 - ty) * ((1 - tx) * unfolded(r0, p0) + tx * unfolded(r0, p1)) +
                    ty * ((1 - tx) * unfolded(r1, p0) + tx * unfolded(r1, p1));
  }
  return out;
}

G2Values extract_g2(std::span<const double> p_ab, std::span<const double> p_a, double target_mean) {
  if (p_ab.size() != p_a.size()) throw ConfigError("extract_g2: profiles have different binning");
  G2Values out{std::vector<double>(p_ab.size(), kNaN),
               std::vector<BinStatus>(p_ab.size(), BinStatus::no_data)};
  const auto ab = normalized(p_ab);
  const auto a = normalized(p_a);
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (a[i] > 0.0) {
      out.values[i] = target_mean * ab[i] / a[i];
      out.status[i] = BinStatus::ok;
    } else if (ab[i] > 0.0) {
      out.status[i] = BinStatus::undefined_ratio;
    }
  }
  return out;
}

G2Values extract_g2(const AzimuthalProfile& p_ab, const AzimuthalProfile& p_a, double target_mean) {
  if (!p_ab.normalized || !p_a.normalized)
    throw ConfigError("extract_g2: both profiles must be normalized");
  return extract_g2(std::span<const double>(p_ab.values), std::span<const double>(p_a.values),
                    target_mean);
}

HeraldMoments herald_moments(const BiphotonState& state, const SectorMask& mask, int supersample) {
  if (supersample < 1) throw ConfigError("herald_moments: supersample must be >= 1");
  const auto& t = state.tables(Photon::idler);
  const PhaseMask& phase = state.mask(Photon::idler);
  const Grid& g = t.grid;
  const double sub_area = g.pixel_area() / (supersample * supersample);
  HeraldMoments m;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rho = t.density[i];
    if (rho <= 0.0) continue;
    const Point2 c = g.center(i);
    if (!mask.may_intersect(c, g.dx(), g.dy())) continue;
    for (int sy = 0; sy < supersample; ++sy)
      for (int sx = 0; sx < supersample; ++sx) {
        const Point2 q{c.x + ((sx + 0.5) / supersample - 0.5) * g.dx(),
                       c.y + ((sy + 0.5) / supersample - 0.5) * g.dy()};
        if (!mask.passes(q)) continue;
        const double w = rho * sub_area;
        const double ph = 2.0 * phase.evaluate(q);
        m.weight += w;
        m.cos2 += w * std::cos(ph);
        m.sin2 += w * std::sin(ph);
      }
  }
  return m;
}

double expected_g2(const BiphotonState& state, const HeraldMoments& m, Point2 r) {
  if (!(m.weight > 0.0)) return kNaN;
  const double ph = 2.0 * state.mask(Photon::signal).evaluate(r);
  return 1.0 + as_double(state.sign()) * state.visibility() *
                   (std::cos(ph) * m.cos2 + std::sin(ph) * m.sin2) / m.weight;
}

double analytic_mean_g2(const BiphotonState& state, const HeraldMoments& m, const Grid& camera,
                        const PixelBinning& binning) {
  const Field2D singles = expected_singles_image(state, camera);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < camera.size(); ++i) {
    if (binning.labels[i] < 0 || singles.data[i] <= 0.0) continue;
    num += singles.data[i] * expected_g2(state, m, camera.center(i));
    den += singles.data[i];
  }
  return den > 0.0 ? num / den : kNaN;
}

std::vector<double> CoherenceMap::column(std::size_t j) const {
  std::vector<double> c(values.rows);
  for (std::size_t i = 0; i < values.rows; ++i) c[i] = values(i, j);
  return c;
}

ScanResult scan_g2_matrix(const BiphotonState& state, double mask_width, std::size_t k_angles,
                          std::uint64_t heralds_per_angle, const DetectorConfig& det,
                          const ScanOptions& options) {
  if (k_angles < 4) throw ConfigError("scan: k_angles must be >= 4");
  if (heralds_per_angle == 0) throw ConfigError("scan: heralds_per_angle must be >= 1");
  det.validate();
  ScanResult res;
  res.annulus = options.annulus.value_or(auto_annulus(state.envelope(Photon::signal)));
  const PixelBinning binning = azimuthal_binning(det.grid, res.annulus, options.n_bins);
  const std::size_t n = options.n_bins;

  DetectorConfig singles_det = det;
  singles_det.rng_seed = derive_seed(det.rng_seed, 0x51'6E'67'6C'65'73ULL);
  const std::uint64_t singles_events =
      options.singles_events != 0 ? options.singles_events
                                  : std::max<std::uint64_t>(1'000'000, k_angles * heralds_per_angle);
  const CoincidenceImage singles = run_singles_imaging(state, singles_events, singles_det);
  const auto singles_totals = binned_totals(singles.as_field(), binning);
  res.singles = AzimuthalProfile{normalized(singles_totals), true};

  const PhaseMask& signal_mask = state.mask(Photon::signal);
  const bool unit_mean = signal_mask.is_helical() && signal_mask.helical_charge() != 0;

  auto init = [&](CoherenceMap& m, MapKind kind) {
    m.kind = kind;
    m.phi.resize(n);
    for (std::size_t i = 0; i < n; ++i) m.phi[i] = (static_cast<double>(i) + 0.5) * kTwoPi / static_cast<double>(n);
    m.phi_prime.resize(k_angles);
    for (std::size_t j = 0; j < k_angles; ++j)
      m.phi_prime[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(k_angles);
    m.values = Field2D(n, k_angles, kNaN);
    m.counts = Field2D(n, k_angles, 0.0);
    m.column_valid.assign(k_angles, false);
    m.column_heralds.assign(k_angles, 0);
  };
  init(res.G2, MapKind::G2);
  init(res.g2, MapKind::g2);
  res.targets.assign(k_angles, kNaN);

  for (std::size_t j = 0; j < k_angles; ++j) {
    const SectorMask mask(res.g2.phi_prime[j], mask_width);
    DetectorConfig col_det = det;
    col_det.rng_seed = derive_seed(det.rng_seed, j + 1);
    const CoincidenceImage img = run_heralded_imaging(state, mask, heralds_per_angle, col_det, options.mode);
    const auto totals = binned_totals(img.as_field(), binning);
    const double recorded = std::accumulate(totals.begin(), totals.end(), 0.0);
    for (auto* m : {&res.G2, &res.g2}) {
      m->column_heralds[j] = img.n_heralds;
      for (std::size_t i = 0; i < n; ++i) m->counts(i, j) = totals[i];
    }
    if (!(recorded > 0.0) || img.n_heralds == 0) continue;

    const double target =
        unit_mean ? 1.0 : analytic_mean_g2(state, herald_moments(state, mask), det.grid, binning);
    res.targets[j] = target;
    const G2Values g = extract_g2(totals, singles_totals, target);
    for (std::size_t i = 0; i < n; ++i) {
      res.g2.values(i, j) = g.values[i];
      res.G2.values(i, j) = totals[i] / static_cast<double>(img.n_heralds);
    }
    res.g2.column_valid[j] = true;
    res.G2.column_valid[j] = true;
  }

  double peak = 0.0;
  for (double v : res.G2.values.data)
    if (std::isfinite(v)) peak = std::max(peak, v);
  if (peak > 0.0)
    for (double& v : res.G2.values.data) v /= peak;
  return res;
}

std::optional<int> fringe_count(std::span<const double> profile) {
  if (profile.size() < 16) throw ConfigError("fringe_count: need at least 16 bins");
  std::vector<double> x = finite_or_mean(std::vector<double>(profile.begin(), profile.end()));
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double& v : x) v -= mean;
  const auto mag = spectrum_magnitudes(x);
  std::vector<double> harmonics(mag.begin() + 1, mag.end());
  if (harmonics.empty()) return std::nullopt;
  const auto peak = std::max_element(harmonics.begin(), harmonics.end());
  std::vector<double> sorted = harmonics;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];
  if (!(*peak > 3.0 * median)) return std::nullopt;
  return static_cast<int>(peak - harmonics.begin()) + 1;
}

std::optional<int> fringe_count(const CoherenceMap& map) {
  std::map<int, std::size_t> votes;
  std::size_t columns = 0;
  for (std::size_t j = 0; j < map.n_columns(); ++j) {
    if (!map.column_valid[j]) continue;
    ++columns;
    if (auto c = fringe_count(map.column(j))) ++votes[*c];
  }
  if (votes.empty()) return std::nullopt;
  const auto best = std::max_element(votes.begin(), votes.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
  // a minority of fringe detections is what pure noise produces
  if (2 * best->second <= columns) return std::nullopt;
  return best->first;
}

int fringe_slope_sign(const CoherenceMap& map) {
  const std::size_t k = map.n_columns();
  if (k < 4) throw ConfigError("fringe_slope_sign: need at least 4 columns");
  const auto fringes = fringe_count(map);
  if (!fringes) return 0;
  const auto n = static_cast<long>(map.n_phi());
  // a profile with c fringes repeats every n/c bins, so only lags within half
  // a fringe period are distinguishable
  const long half_period = std::max<long>(1, n / (2L * *fringes));
  std::vector<std::vector<double>> cols(k);
  std::vector<bool> usable(k, false);
  for (std::size_t j = 0; j < k; ++j) {
    if (!map.column_valid[j]) continue;
    cols[j] = finite_or_mean(map.column(j));
    const double mean = std::accumulate(cols[j].begin(), cols[j].end(), 0.0) / static_cast<double>(n);
    for (double& v : cols[j]) v -= mean;
    usable[j] = fringe_count(map.column(j)).has_value();
  }
  long total = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t next = (j + 1) % k;
    if (!usable[j] || !usable[next]) continue;
    long best_lag = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (long lag = -half_period + 1; lag <= half_period; ++lag) {
      double xc = 0.0;
      for (long i = 0; i < n; ++i)
        xc += cols[j][static_cast<std::size_t>(i)] * cols[next][static_cast<std::size_t>(((i + lag) % n + n) % n)];
      if (xc > best) {
        best = xc;
        best_lag = lag;
      }
    }
    total += best_lag;
  }
  return (total > 0) - (total < 0);
}

AnalyticComparison compare_to_analytic(const CoherenceMap& map, const BiphotonState& state,
                                       double mask_width) {
  if (map.kind != MapKind::g2) throw ConfigError("compare_to_analytic: map must hold g2 values");
  AnalyticComparison out;
  const PhaseMask& ma = state.mask(Photon::signal);
  const PhaseMask& mb = state.mask(Photon::idler);
  const double sv = as_double(state.sign()) * state.visibility();
  const double w = kTwoPi / static_cast<double>(map.n_phi());
  const bool helical = ma.is_helical() && mb.is_helical();
  const int m_a = ma.helical_charge();
  const int m_b = mb.helical_charge();
  out.harmonic = 2 * m_a;

  double sq = 0.0;
  std::vector<std::array<double, 3>> rows;
  std::vector<double> rhs;
  for (std::size_t j = 0; j < map.n_columns(); ++j) {
    if (!map.column_valid[j]) continue;
    std::vector<double> target(map.n_phi(), kNaN);
    if (helical) {
      const double contrast = mask_average_contrast(m_b, mask_width);
      const double theta = 2.0 * m_b * map.phi_prime[j];
      for (std::size_t i = 0; i < map.n_phi(); ++i) {
        const double a = map.phi[i] - 0.5 * w, b = map.phi[i] + 0.5 * w;
        const double c = bin_average_cos(2 * m_a, theta, a, b);
        const double s = bin_average_sin(2 * m_a, theta, a, b);
        target[i] = 1.0 + sv * contrast * c;
        rows.push_back({1.0, c, s});
        rhs.push_back(map.values(i, j));
      }
    } else {
      const SectorMask mask(map.phi_prime[j], mask_width);
      const HeraldMoments mom = herald_moments(state, mask);
      const auto& t = state.tables(Photon::signal);
      std::vector<double> num(map.n_phi(), 0.0), den(map.n_phi(), 0.0);
      for (std::size_t p = 0; p < t.grid.size(); ++p) {
        const Point2 c = t.grid.center(p);
        const auto bin = std::min(map.n_phi() - 1, static_cast<std::size_t>(c.angle() / w));
        num[bin] += t.density[p] * expected_g2(state, mom, c);
        den[bin] += t.density[p];
      }
      for (std::size_t i = 0; i < map.n_phi(); ++i)
        if (den[i] > 0.0) target[i] = num[i] / den[i];
    }
    for (std::size_t i = 0; i < map.n_phi(); ++i) {
      const double v = map.values(i, j);
      if (!std::isfinite(v) || !std::isfinite(target[i])) continue;
      sq += (v - target[i]) * (v - target[i]);
      ++out.cells;
    }
  }
  out.rmse = out.cells > 0 ? std::sqrt(sq / static_cast<double>(out.cells)) : kNaN;

  out.fitted_contrast = out.fitted_quadrature = out.fitted_offset = kNaN;
  if (helical && (m_a != 0 || m_b != 0)) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
    Eigen::Index used = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!std::isfinite(rhs[r])) continue;
      a.row(used) << rows[r][0], rows[r][1], rows[r][2];
      b(used) = rhs[r];
      ++used;
    }
    if (used >= 3) {
      const Eigen::Vector3d x = a.topRows(used).colPivHouseholderQr().solve(b.head(used));
      const double s = as_double(state.sign());
      out.fitted_offset = x(0);
      out.fitted_contrast = s * x(1);
      out.fitted_quadrature = s * x(2);
    }
  }
  return out;
}

PixelBinning classify_by_phase(const Grid& grid, const PhaseMask& mask, double radius, int supersample) {
  const auto levels = mask.phase_levels();
  if (levels.empty()) throw ConfigError("classify_by_phase: mask has no discrete phase levels");
  PixelBinning b{std::vector<int>(grid.size(), -1), levels.size()};
  auto level_of = [&](double v) {
    for (std::size_t k = 0; k < levels.size(); ++k)
      if (std::abs(wrap_phase(levels[k] - v)) < 1e-9) return static_cast<int>(k);
    return -1;
  };
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point2 c = grid.center(i);
    if (c.radius() > radius) continue;
    int label = -2;
    for (int sy = 0; sy < supersample && label != -1; ++sy)
      for (int sx = 0; sx < supersample; ++sx) {
        const double fx = supersample == 1 ? 0.0 : static_cast<double>(sx) / (supersample - 1) - 0.5;
        const double fy = supersample == 1 ? 0.0 : static_cast<double>(sy) / (supersample - 1) - 0.5;
        const int l = level_of(mask.evaluate({c.x + fx * grid.dx(), c.y + fy * grid.dy()}));
        if (label == -2) label = l;
        if (l != label) {
          label = -1;
          break;
        }
      }
    b.labels[i] = label < 0 ? -1 : label;
  }
  return b;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw ConfigError("pearson: size mismatch");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

ChiSquare chi_square(std::span<const double> observed, std::span<const double> expected) {
  if (observed.size() != expected.size()) throw ConfigError("chi_square: size mismatch");
  ChiSquare out;
  std::size_t bins = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) continue;
    out.statistic += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    ++bins;
  }
  out.dof = bins > 0 ? bins - 1 : 0;
  out.p_value = out.dof > 0 ? boost::math::gamma_q(0.5 * static_cast<double>(out.dof), 0.5 * out.statistic) : 1.0;
  return out;
}

ChiSquare chi_square_homogeneity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ConfigError("chi_square_homogeneity: size mismatch");
  const double ta = std::accumulate(a.begin(), a.end(), 0.0);
  const double tb = std::accumulate(b.begin(), b.end(), 0.0);
  ChiSquare out;
  if (!(ta > 0.0) || !(tb > 0.0)) return out;
  std::size_t bins = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double pooled = a[i] + b[i];
    if (pooled <= 0.0) continue;
    const double ea = pooled * ta / (ta + tb);
    const double eb = pooled * tb / (ta + tb);
    out.statistic += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    ++bins;
  }
  out.dof = bins > 0 ? bins - 1 : 0;
  out.p_value = out.dof > 0 ? boost::math::gamma_q(0.5 * static_cast<double>(out.dof), 0.5 * out.statistic) : 1.0;
  return out;
}

}  // namespace biphoton
