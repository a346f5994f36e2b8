#include "holonomy/anyons.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace holonomy {

namespace {

constexpr double kPi = std::numbers::pi;

void check_positions(const ElectronConfiguration& z, int expected) {
  if (static_cast<int>(z.size()) != expected) {
    std::ostringstream msg;
    msg << "expected " << expected << " electron positions, got " << z.size();
    throw InvalidInput(msg.str());
  }
  for (const Complex& zi : z) {
    if (!std::isfinite(zi.real()) || !std::isfinite(zi.imag())) {
      throw InvalidInput("electron positions must be finite");
    }
  }
}

double wrap_phase(double x) {
  double w = std::remainder(x, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

}  // namespace

void LaughlinConfig::validate() const {
  if (n_electrons < 2) throw InvalidInput("LaughlinConfig: need at least 2 electrons");
  if (exponent < 1) throw InvalidInput("LaughlinConfig: exponent must be >= 1");
  if (!(magnetic_length > 0.0)) throw InvalidInput("LaughlinConfig: magnetic length must be > 0");
}

LogAmplitude log_amplitude(const LaughlinConfig& cfg, const ElectronConfiguration& z) {
  cfg.validate();
  check_positions(z, cfg.n_electrons);
  const double l2 = cfg.magnetic_length * cfg.magnetic_length;
  LogAmplitude out;
  double log_mod = 0.0;
  double phase = 0.0;
  for (std::size_t j = 0; j + 1 < z.size(); ++j) {
    for (std::size_t k = j + 1; k < z.size(); ++k) {
      const Complex d = z[j] - z[k];
      if (d == Complex(0.0, 0.0)) {
        out.is_zero = true;
        out.log_modulus = -std::numeric_limits<double>::infinity();
        out.phase = 0.0;
        return out;
      }
      log_mod += cfg.exponent * std::log(std::abs(d));
      phase += cfg.exponent * std::arg(d);
    }
  }
  for (const Complex& zi : z) log_mod -= std::norm(zi) / (4.0 * l2);
  out.log_modulus = log_mod;
  out.phase = wrap_phase(phase);
  return out;
}

LogAmplitude log_amplitude_quasihole(const LaughlinConfig& cfg, const ElectronConfiguration& z,
                                     Complex hole) {
  LogAmplitude out = log_amplitude(cfg, z);
  if (out.is_zero) return out;
  if (!std::isfinite(hole.real()) || !std::isfinite(hole.imag())) {
    throw InvalidInput("quasihole position must be finite");
  }
  double phase = out.phase;
  for (const Complex& zi : z) {
    const Complex d = zi - hole;
    if (d == Complex(0.0, 0.0)) {
      out.is_zero = true;
      out.log_modulus = -std::numeric_limits<double>::infinity();
      out.phase = 0.0;
      return out;
    }
    out.log_modulus += std::log(std::abs(d));
    phase += std::arg(d);
  }
  out.phase = wrap_phase(phase);
  return out;
}

SampleStats metropolis_sample(const LaughlinConfig& cfg, const SampleOptions& opts) {
  cfg.validate();
  if (opts.samples == 0) throw InvalidInput("metropolis_sample: need at least one sample");
  const double l0 = cfg.magnetic_length;
  const double step = opts.proposal_step > 0.0 ? opts.proposal_step : 1.5 * l0;
  if (!(step > 0.0)) throw InvalidInput("metropolis_sample: proposal step must be > 0");
  if (opts.hole) {
    const Complex h = *opts.hole;
    if (!std::isfinite(h.real()) || !std::isfinite(h.imag())) {
      throw InvalidInput("metropolis_sample: quasihole position must be finite");
    }
  }

  const int n = cfg.n_electrons;
  const int m = cfg.exponent;
  const double l2 = l0 * l0;

  // Deterministic spread-out start: a golden-angle spiral at droplet scale.
  ElectronConfiguration z(n);
  for (int i = 0; i < n; ++i) {
    const double r = l0 * std::sqrt(2.0 * m * (i + 1.0));
    const double a = 2.399963229728653 * i;
    z[i] = Complex(r * std::cos(a), -r * std::sin(a));
  }

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, step);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // log |psi|^2 change for moving electron i to zp; -inf on coincidence.
  auto move_log_ratio = [&](int i, const Complex& zp) {
    double d = (std::norm(z[i]) - std::norm(zp)) / (2.0 * l2);
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      const double dn = std::abs(zp - z[k]);
      const double dd = std::abs(z[i] - z[k]);
      if (dn == 0.0) return -std::numeric_limits<double>::infinity();
      d += 2.0 * m * (std::log(dn) - std::log(dd));
    }
    if (opts.hole) {
      const double dn = std::abs(zp - *opts.hole);
      const double dd = std::abs(z[i] - *opts.hole);
      if (dn == 0.0) return -std::numeric_limits<double>::infinity();
      d += 2.0 * (std::log(dn) - std::log(dd));
    }
    return d;
  };

  SampleStats out;
  out.configurations.reserve(opts.samples);
  std::uint64_t accepted = 0, proposed = 0;
  const std::size_t total_sweeps = opts.burn_in + opts.samples;
  for (std::size_t sweep = 0; sweep < total_sweeps; ++sweep) {
    const bool recording = sweep >= opts.burn_in;
    for (int i = 0; i < n; ++i) {
      const Complex zp = z[i] + Complex(gauss(rng), gauss(rng));
      const double log_ratio = move_log_ratio(i, zp);
      const double u = unif(rng);
      if (recording) ++proposed;
      if (std::log(u) < log_ratio) {
        z[i] = zp;
        if (recording) ++accepted;
      }
    }
    if (recording) out.configurations.push_back(z);
  }
  out.acceptance = proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed)
                                : 0.0;
  if (out.acceptance < 0.05) {
    out.tuning_hint = "acceptance below 5%: decrease proposal_step";
  } else if (out.acceptance > 0.95) {
    out.tuning_hint = "acceptance above 95%: increase proposal_step";
  }
  return out;
}

DensityEstimate density_profile(const LaughlinConfig& cfg, const SampleStats& samples,
                                const DensityOptions& opts) {
  cfg.validate();
  const std::size_t n_cfg = samples.configurations.size();
  if (n_cfg < 1000) {
    throw InvalidInput("density_profile: need at least 1000 configurations for a stable estimate");
  }
  if (!(opts.r_max > 0.0)) throw InvalidInput("density_profile: r_max must be > 0");
  if (opts.bins == 0) throw InvalidInput("density_profile: need at least one bin");
  std::size_t blocks = std::max<std::size_t>(opts.blocks, 2);
  blocks = std::min(blocks, n_cfg);
  double bulk_lo = opts.bulk_lo, bulk_hi = opts.bulk_hi;
  if (bulk_lo == 0.0 && bulk_hi == 0.0) {
    bulk_lo = 0.5 * opts.r_max;
    bulk_hi = 0.75 * opts.r_max;
  }
  if (!(bulk_hi > bulk_lo) || bulk_lo < 0.0) {
    throw InvalidInput("density_profile: bulk annulus must satisfy 0 <= lo < hi");
  }

  const std::size_t nb = opts.bins;
  const double dr = opts.r_max / static_cast<double>(nb);
  std::vector<double> counts(nb, 0.0);
  std::vector<std::vector<double>> block_counts(blocks, std::vector<double>(nb, 0.0));
  std::vector<double> annulus_block(blocks, 0.0);
  double annulus_total = 0.0;

  for (std::size_t s = 0; s < n_cfg; ++s) {
    const std::size_t b = std::min(s * blocks / n_cfg, blocks - 1);
    const auto& config = samples.configurations[s];
    for (const Complex& zi : config) {
      const double r = std::abs(zi - opts.center);
      if (r < opts.r_max) {
        const std::size_t bin = std::min(static_cast<std::size_t>(r / dr), nb - 1);
        counts[bin] += 1.0;
        block_counts[b][bin] += 1.0;
      }
      if (r >= bulk_lo && r < bulk_hi) {
        annulus_total += 1.0;
        annulus_block[b] += 1.0;
      }
    }
  }

  DensityEstimate out;
  out.bin_width = dr;
  out.magnetic_length = cfg.magnetic_length;
  out.radius.resize(nb);
  out.density.resize(nb);
  out.density_err.resize(nb);
  out.bin_empty.resize(nb);
  double integrated = 0.0;
  for (std::size_t bin = 0; bin < nb; ++bin) {
    const double r0 = static_cast<double>(bin) * dr;
    const double r1 = r0 + dr;
    const double area = kPi * (r1 * r1 - r0 * r0);
    out.radius[bin] = 0.5 * (r0 + r1);
    out.density[bin] = counts[bin] / (static_cast<double>(n_cfg) * area);
    out.bin_empty[bin] = counts[bin] == 0.0;
    integrated += out.density[bin] * area;

    // Blocked standard error: block means are nearly independent once the
    // block length exceeds the chain's autocorrelation time.
    double var = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t lo = b * n_cfg / blocks;
      const std::size_t hi = (b + 1) * n_cfg / blocks;
      const double len = static_cast<double>(hi - lo);
      const double mean_b = block_counts[b][bin] / (len * area);
      const double d = mean_b - out.density[bin];
      var += d * d;
    }
    out.density_err[bin] =
        std::sqrt(var / (static_cast<double>(blocks) * static_cast<double>(blocks - 1)));
  }
  out.total_count = integrated;

  const double annulus_area = kPi * (bulk_hi * bulk_hi - bulk_lo * bulk_lo);
  out.bulk_density = annulus_total / (static_cast<double>(n_cfg) * annulus_area);
  double var = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * n_cfg / blocks;
    const std::size_t hi = (b + 1) * n_cfg / blocks;
    const double len = static_cast<double>(hi - lo);
    const double mean_b = annulus_block[b] / (len * annulus_area);
    const double d = mean_b - out.bulk_density;
    var += d * d;
  }
  out.bulk_density_err =
      std::sqrt(var / (static_cast<double>(blocks) * static_cast<double>(blocks - 1)));
  return out;
}

double quasihole_berry_phase(double filling, double loop_radius, double l0) {
  if (!(filling > 0.0) || filling > 1.0) {
    throw InvalidInput("quasihole_berry_phase: filling must lie in (0, 1]");
  }
  if (loop_radius < 0.0) throw InvalidInput("quasihole_berry_phase: loop radius must be >= 0");
  if (!(l0 > 0.0)) throw InvalidInput("quasihole_berry_phase: magnetic length must be > 0");
  return -2.0 * kPi * filling * flux_ratio_disk(loop_radius, l0);
}

double quasihole_berry_phase(const DensityEstimate& density, double loop_radius) {
  const std::size_t nb = density.density.size();
  if (nb == 0 || density.bin_width <= 0.0) {
    throw InvalidInput("quasihole_berry_phase: empty density estimate");
  }
  if (loop_radius < 0.0) throw InvalidInput("quasihole_berry_phase: loop radius must be >= 0");
  const double support = density.bin_width * static_cast<double>(nb);
  if (loop_radius > support * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "quasihole_berry_phase: loop radius " << loop_radius
        << " exceeds the density support [0, " << support << "]";
    throw InvalidInput(msg.str());
  }
  double enclosed = 0.0;
  for (std::size_t bin = 0; bin < nb; ++bin) {
    const double r0 = static_cast<double>(bin) * density.bin_width;
    if (r0 >= loop_radius) break;
    const double r1 = std::min(r0 + density.bin_width, loop_radius);
    enclosed += density.density[bin] * kPi * (r1 * r1 - r0 * r0);
  }
  return -2.0 * kPi * enclosed;
}

double effective_charge(double gamma, double flux_ratio) {
  if (!(flux_ratio > 0.0)) {
    throw InvalidInput("effective_charge: flux ratio must be > 0");
  }
  return gamma / (2.0 * kPi * flux_ratio);
}

double flux_ratio_disk(double loop_radius, double l0) {
  if (!(l0 > 0.0)) throw InvalidInput("flux_ratio_disk: magnetic length must be > 0");
  return loop_radius * loop_radius / (2.0 * l0 * l0);
}

LandauRelations landau_relations(double area, double l0, double n_electrons, double b_field) {
  if (!(area > 0.0) || !(l0 > 0.0) || !(n_electrons > 0.0) || !(b_field > 0.0)) {
    throw InvalidInput("landau_relations: all inputs must be positive");
  }
  LandauRelations out;
  out.orbital_count = area / (2.0 * kPi * l0 * l0);
  out.filling = n_electrons / out.orbital_count;
  out.charge_unit = 1.0 / (b_field * l0 * l0);
  out.flux_ratio = b_field * area * out.charge_unit / (2.0 * kPi);
  out.flux_ratio_chain = (out.filling * area / (2.0 * kPi * l0 * l0)) / out.filling;
  out.enclosed_count = out.filling * out.flux_ratio;
  std::ostringstream msg;
  msg << "orbitals " << out.orbital_count << ", filling " << out.filling << ", flux ratio "
      << out.flux_ratio << " (chain route " << out.flux_ratio_chain << ", mismatch "
      << std::abs(out.flux_ratio - out.flux_ratio_chain) << "), enclosed count "
      << out.enclosed_count;
  out.summary = msg.str();
  return out;
}

double droplet_area(int exponent, int n_electrons, double l0) {
  if (exponent < 1 || n_electrons < 2 || !(l0 > 0.0)) {
    throw InvalidInput("droplet_area: need exponent >= 1, n_electrons >= 2, l0 > 0");
  }
  const double orbitals = static_cast<double>(exponent) * (n_electrons - 1.0) + 1.0;
  return orbitals * 2.0 * kPi * l0 * l0;
}

}  // namespace holonomy
