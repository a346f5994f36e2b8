// Planar lowest-Landau-level trial wavefunctions: log-domain amplitudes,
// Metropolis sampling of |psi|^2, radial density estimation, quasihole
// geometric phases, and the fractional effective charge.
#pragma once

#include "holonomy/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace holonomy {

// Positions live on the complex plane as z = x - i y, the holomorphic
// coordinate of the lowest Landau level for a magnetic field along +z.
// Loop orientation is counterclockwise-positive throughout.
using ElectronConfiguration = std::vector<Complex>;

struct LaughlinConfig {
  int n_electrons = 2;           // >= 2
  int exponent = 1;              // m >= 1 (odd for fermions)
  double magnetic_length = 1.0;  // l0 > 0
  void validate() const;         // InvalidInput on violation
};

// Unnormalized amplitude kept as log|psi| + i arg(psi). A vanishing amplitude
// (coincident points) is flagged, never thrown.
struct LogAmplitude {
  double log_modulus = 0.0;
  double phase = 0.0;  // principal value
  bool is_zero = false;
};

// m * sum_{j<k} log(z_j - z_k) - sum_i |z_i|^2 / (4 l0^2), evaluated in the
// log domain so large systems neither overflow nor underflow.
LogAmplitude log_amplitude(const LaughlinConfig& cfg, const ElectronConfiguration& z);

// Ground-state amplitude plus the quasihole factor sum_i log(z_i - hole).
// Normalization constants are never included.
LogAmplitude log_amplitude_quasihole(const LaughlinConfig& cfg, const ElectronConfiguration& z,
                                     Complex hole);

struct SampleOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 0;      // recorded configurations (one per sweep); >= 1
  std::size_t burn_in = 0;      // discarded leading sweeps
  double proposal_step = 0.0;   // stddev of the circular Gaussian move; 0 -> 1.5 * l0
  std::optional<Complex> hole;  // sample the quasihole state instead of the ground state
};

struct SampleStats {
  std::vector<ElectronConfiguration> configurations;
  double acceptance = 0.0;  // accepted / proposed over the recorded sweeps
  std::string tuning_hint;  // non-empty when acceptance leaves [0.05, 0.95]
};

// Metropolis chain on |psi|^2 with single-electron circular Gaussian moves
// (one sweep = one attempted move per electron, one snapshot per recorded
// sweep). Deterministic for a given seed.
SampleStats metropolis_sample(const LaughlinConfig& cfg, const SampleOptions& opts);

struct DensityOptions {
  double r_max = 0.0;   // histogram support [0, r_max); required > 0
  std::size_t bins = 0; // >= 1
  Complex center = Complex(0.0, 0.0);
  double bulk_lo = 0.0;  // annulus for the far-field average; both 0 -> [0.5, 0.75] * r_max
  double bulk_hi = 0.0;
  std::size_t blocks = 32;  // consecutive-sweep blocks for standard errors
};

struct DensityEstimate {
  double bin_width = 0.0;
  double magnetic_length = 1.0;     // carried through for unit-aware output
  std::vector<double> radius;       // bin centers, ascending
  std::vector<double> density;      // electrons per unit area
  std::vector<double> density_err;  // blocked standard error per bin
  std::vector<bool> bin_empty;      // flag: bin received no samples
  double bulk_density = 0.0;        // average over the far-field annulus
  double bulk_density_err = 0.0;
  double total_count = 0.0;         // integrated density over the grid (<= N_e)
};

// Radial histogram of the one-particle density around `center`, per-area
// normalized, with blocked Monte Carlo standard errors. Requires at least
// 10^3 configurations.
DensityEstimate density_profile(const LaughlinConfig& cfg, const SampleStats& samples,
                                const DensityOptions& opts);

// gamma = -2*pi * <n>_R, the expected electron count enclosed by the loop.
// Uniform-density mode: <n>_R = nu * R^2 / (2 l0^2) = nu * Phi/Phi0.
double quasihole_berry_phase(double filling, double loop_radius, double l0);
// Estimated-density mode: <n>_R integrates the histogram over the disk of
// radius R (partial bins pro-rated by area). R must lie within the grid.
double quasihole_berry_phase(const DensityEstimate& density, double loop_radius);

// e*/e = gamma / (2*pi * flux_ratio); the uniform-mode phase gives -nu.
double effective_charge(double gamma, double flux_ratio);

// Flux through a disk of radius R in flux quanta: R^2 / (2 l0^2).
double flux_ratio_disk(double loop_radius, double l0);

struct LandauRelations {
  double orbital_count = 0.0;     // N(s) = S / (2 pi l0^2)
  double filling = 0.0;           // nu = N / N(s)
  double charge_unit = 0.0;       // e = 1 / (B l0^2) in hbar = c = 1 units
  double flux_ratio = 0.0;        // Phi/Phi0 = B S e / (2 pi), direct route
  double flux_ratio_chain = 0.0;  // [nu S / (2 pi l0^2)] / nu, identity route
  double enclosed_count = 0.0;    // <n>_R = nu * Phi/Phi0
  std::string summary;
};

// Landau-level bookkeeping for a droplet of area S: degeneracy, filling, and
// the flux ratio computed along two algebraic routes that must agree.
LandauRelations landau_relations(double area, double l0, double n_electrons, double b_field);

// Area of the droplet whose orbital count satisfies m (N_e - 1) = N(s) - 1.
double droplet_area(int exponent, int n_electrons, double l0);

}  // namespace holonomy
