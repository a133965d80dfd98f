#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "biphoton/envelope.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/phase_mask.hpp"

namespace biphoton {

enum class Sign : int { plus = 1, minus = -1 };

inline double as_double(Sign s) { return static_cast<double>(static_cast<int>(s)); }

enum class Photon { signal, idler };  // path A, path B

/// Engine used for all Monte Carlo draws.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Independent engine for (seed, stream, index), e.g. one per event block.
Rng substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Child seed for a named sub-run (scan column, singles run, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Photon-number density of one photon on its grid.
struct DensityMap {
  Grid grid;
  Field2D values;
  double total = 0.0;  // sum(values) * pixel_area
};

/// Patterned-phase entangled photon pair
///   Psi(r, r') = eta_A(r) eta_B(r') {e^{i[Phi_A(r) - Phi_B(r')]} +- c.c.} / sqrt(2)
/// with a visibility V that scales the interference term of |Psi|^2.
///
/// The two photons live on independent working grids. The joint normalization
/// is computed numerically on those grids, so patterned masks whose interference
/// term has nonzero mean are still normalized exactly. Immutable; copies share
/// the precomputed tables.
class BiphotonState {
public:
  const AmplitudeEnvelope& envelope(Photon p) const;
  const PhaseMask& mask(Photon p) const;
  const Grid& grid(Photon p) const;
  Sign sign() const { return sign_; }
  double visibility() const { return visibility_; }
  /// Joint normalization constant on the working grids.
  double norm() const;

  /// Pixel-center tables used by samplers and quadratures.
  struct Tables {
    Grid grid;
    std::vector<double> density;  // |eta|^2 at pixel centers (analytic normalization)
    std::vector<double> cdf;      // cumulative pixel mass, last entry == mass
    std::vector<double> cos2;     // cos(2 Phi) at pixel centers
    std::vector<double> sin2;
    double mass = 0.0;  // sum density * area
    double c2 = 0.0;    // sum density * cos(2 Phi) * area
    double s2 = 0.0;
  };
  const Tables& tables(Photon p) const;

  /// Interference factor 1 + sign * V * cos(2 Phi_A(r) - 2 Phi_B(r')).
  double interference(Point2 r, Point2 r_prime) const;

  friend BiphotonState make_state(AmplitudeEnvelope, AmplitudeEnvelope, PhaseMask, PhaseMask,
                                  Sign, double, const Grid&, const Grid&);

private:
  struct Data;
  explicit BiphotonState(std::shared_ptr<const Data> d, Sign s, double v)
      : data_(std::move(d)), sign_(s), visibility_(v) {}

  std::shared_ptr<const Data> data_;
  Sign sign_;
  double visibility_;
};

/// Default working grid: 128 x 128 pixels over [-4w, 4w]^2.
Grid default_state_grid();

/// Throws ConfigError if visibility is outside [0, 1] or the state has zero norm.
BiphotonState make_state(AmplitudeEnvelope env_a, AmplitudeEnvelope env_b, PhaseMask mask_a,
                         PhaseMask mask_b, Sign sign, double visibility,
                         const Grid& grid_a = default_state_grid(),
                         const Grid& grid_b = default_state_grid());

/// (|m_A, -m_B> +- |-m_A, m_B>)/sqrt(2): ring-Gaussian envelopes and helical masks.
BiphotonState oam_state(int m_a, int m_b, Sign sign, double visibility = 1.0,
                        const Grid& grid = default_state_grid(), double waist = 1.0);

/// Pure-state amplitude. Throws UnsupportedError when V < 1.
std::complex<double> wpf_amplitude(const BiphotonState& state, Point2 r, Point2 r_prime);

/// Normalized |Psi(r, r')|^2 including the visibility factor.
double joint_density(const BiphotonState& state, Point2 r, Point2 r_prime);

/// 1 + sign * V * cos(2 Phi_A(r) - 2 Phi_B(r')).
double analytic_g2(const BiphotonState& state, Point2 r, Point2 r_prime);

/// Exact marginal of one photon, integrated over the partner's working grid.
DensityMap marginal_density(const BiphotonState& state, Photon which);

/// Draw one detected pair (r, r') distributed as the joint density.
///
/// Proposals come from the product of the two envelope densities (pixel
/// inverse-CDF with uniform jitter inside the pixel) and are accepted with
/// probability (1 + sign V cos[2 Phi_A - 2 Phi_B]) / 2.
std::pair<Point2, Point2> sample_pair(const BiphotonState& state, Rng& rng);

/// Draw a point from one photon's envelope table.
Point2 sample_envelope(const BiphotonState::Tables& t, Rng& rng);

inline constexpr int kMaxRejections = 1'000'000;

}  // namespace biphoton
