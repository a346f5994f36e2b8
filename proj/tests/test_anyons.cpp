// Lowest-Landau-level trial states: log-domain amplitudes, Metropolis
// sampling, radial densities, quasihole phases, and the fractional charge.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "holonomy/anyons.hpp"

using namespace holonomy;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double wrap(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  if (r > kPi) r -= kTwoPi;
  return r;
}

// exact one-particle density of the m = 1 droplet: the first N orbitals
// filled, rho(r) = (1 / 2 pi l0^2) e^{-r^2/2 l0^2} sum_{k<N} (r^2/2 l0^2)^k / k!
double exact_m1_density(double r, int n, double l0) {
  const double u = r * r / (2.0 * l0 * l0);
  double term = 1.0, sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += term;
    term *= u / (k + 1);
  }
  return std::exp(-u) * sum / (2.0 * kPi * l0 * l0);
}

ElectronConfiguration spread_positions(int n, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  ElectronConfiguration z(static_cast<std::size_t>(n));
  for (auto& zi : z) zi = Complex(g(rng), g(rng));
  return z;
}

}  // namespace

TEST_CASE("log_amplitude: two-electron closed form") {
  LaughlinConfig cfg;
  cfg.n_electrons = 2;
  cfg.exponent = 1;
  cfg.magnetic_length = 1.0;
  ElectronConfiguration z{Complex(0.0, 0.0), Complex(2.0, 0.0)};
  LogAmplitude a = log_amplitude(cfg, z);
  // log|z0 - z1| - (0 + 4)/4 = ln 2 - 1; phase = arg(-2) = pi
  CHECK(a.log_modulus == doctest::Approx(std::log(2.0) - 1.0).epsilon(1e-14));
  CHECK(std::abs(wrap(a.phase - kPi)) < 1e-12);
  CHECK(!a.is_zero);

  // the exponent multiplies the pair term only
  cfg.exponent = 3;
  LogAmplitude a3 = log_amplitude(cfg, z);
  CHECK(a3.log_modulus == doctest::Approx(3.0 * std::log(2.0) - 1.0).epsilon(1e-14));
  // magnetic length rescales the confining exponent
  cfg.exponent = 1;
  cfg.magnetic_length = 2.0;
  CHECK(log_amplitude(cfg, z).log_modulus ==
        doctest::Approx(std::log(2.0) - 4.0 / 16.0).epsilon(1e-14));
}

TEST_CASE("log_amplitude: antisymmetry gives the odd-m exchange phase") {
  LaughlinConfig cfg;
  cfg.n_electrons = 4;
  for (int m : {1, 3, 5}) {
    cfg.exponent = m;
    ElectronConfiguration z{Complex(0.3, -0.4), Complex(-1.1, 0.2), Complex(0.9, 1.3),
                            Complex(-0.2, -1.7)};
    LogAmplitude before = log_amplitude(cfg, z);
    std::swap(z[1], z[3]);  // exchange two identical particles
    LogAmplitude after = log_amplitude(cfg, z);
    CHECK(after.log_modulus == doctest::Approx(before.log_modulus).epsilon(1e-12));
    // odd m: the swapped amplitude differs by exactly (-1)^m = -1
    CHECK(std::abs(wrap(after.phase - before.phase - kPi * m)) < 1e-10);
  }
}

TEST_CASE("log_amplitude_quasihole: ratio to the ground state is the hole factor") {
  LaughlinConfig cfg;
  cfg.n_electrons = 5;
  cfg.exponent = 3;
  ElectronConfiguration z = spread_positions(5, 2.0, 77);
  const Complex hole(0.6, -1.1);
  LogAmplitude g = log_amplitude(cfg, z);
  LogAmplitude q = log_amplitude_quasihole(cfg, z, hole);
  double dlog = 0.0, dphase = 0.0;
  for (const Complex& zi : z) {
    dlog += std::log(std::abs(zi - hole));
    dphase += std::arg(zi - hole);
  }
  CHECK(q.log_modulus - g.log_modulus == doctest::Approx(dlog).epsilon(1e-12));
  CHECK(std::abs(wrap(q.phase - g.phase - dphase)) < 1e-10);
}

TEST_CASE("log_amplitude: large systems stay finite; coincidences flag zero") {
  LaughlinConfig cfg;
  cfg.n_electrons = 30;
  cfg.exponent = 3;
  ElectronConfiguration z = spread_positions(30, 5.0, 1234);
  LogAmplitude a = log_amplitude(cfg, z);
  CHECK(std::isfinite(a.log_modulus));
  CHECK(std::isfinite(a.phase));
  CHECK(!a.is_zero);

  z[7] = z[19];  // coincident electrons annihilate the wavefunction
  CHECK(log_amplitude(cfg, z).is_zero);

  // a hole sitting on an electron kills the quasihole state, not the ground one
  ElectronConfiguration w = spread_positions(4, 2.0, 5);
  LaughlinConfig small;
  small.n_electrons = 4;
  CHECK(log_amplitude_quasihole(small, w, w[2]).is_zero);
  CHECK(!log_amplitude(small, w).is_zero);
}

TEST_CASE("config and amplitude input validation") {
  LaughlinConfig bad;
  bad.n_electrons = 1;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad.n_electrons = 2;
  bad.exponent = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad.exponent = 1;
  bad.magnetic_length = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);

  LaughlinConfig cfg;
  cfg.n_electrons = 3;
  ElectronConfiguration wrong_count{Complex(0, 0), Complex(1, 0)};
  CHECK_THROWS_AS(log_amplitude(cfg, wrong_count), InvalidInput);
  ElectronConfiguration with_nan{Complex(0, 0), Complex(1, 0),
                                 Complex(std::nan(""), 0.0)};
  CHECK_THROWS_AS(log_amplitude(cfg, with_nan), InvalidInput);
}

TEST_CASE("metropolis_sample: deterministic per seed, sensitive to the seed") {
  LaughlinConfig cfg;
  cfg.n_electrons = 4;
  cfg.exponent = 1;
  SampleOptions opts;
  opts.seed = 42;
  opts.samples = 200;
  opts.burn_in = 50;
  SampleStats first = metropolis_sample(cfg, opts);
  SampleStats second = metropolis_sample(cfg, opts);
  REQUIRE(first.configurations.size() == 200);
  REQUIRE(second.configurations.size() == 200);
  bool identical = true;
  for (std::size_t s = 0; s < first.configurations.size(); ++s)
    for (std::size_t i = 0; i < first.configurations[s].size(); ++i)
      identical = identical && first.configurations[s][i] == second.configurations[s][i];
  CHECK(identical);

  opts.seed = 43;
  SampleStats third = metropolis_sample(cfg, opts);
  bool same_as_first = true;
  for (std::size_t i = 0; i < first.configurations[0].size(); ++i)
    same_as_first = same_as_first && first.configurations[0][i] == third.configurations[0][i];
  CHECK(!same_as_first);

  CHECK(first.acceptance > 0.05);
  CHECK(first.acceptance < 0.95);
  CHECK(first.tuning_hint.empty());
  // an absurd proposal step drives the acceptance to the floor and warns
  opts.proposal_step = 200.0;
  SampleStats wild = metropolis_sample(cfg, opts);
  CHECK(wild.acceptance < 0.05);
  CHECK(!wild.tuning_hint.empty());

  opts.samples = 0;
  CHECK_THROWS_AS(metropolis_sample(cfg, opts), InvalidInput);
}

TEST_CASE("density_profile: integrable-droplet density matches the exact filled-orbital curve") {
  LaughlinConfig cfg;
  cfg.n_electrons = 4;
  cfg.exponent = 1;
  SampleOptions opts;
  opts.seed = 2026;
  opts.samples = 20000;
  opts.burn_in = 500;
  SampleStats stats = metropolis_sample(cfg, opts);

  DensityOptions d;
  d.r_max = 5.0;
  d.bins = 25;
  DensityEstimate est = density_profile(cfg, stats, d);
  REQUIRE(est.radius.size() == 25);
  REQUIRE(est.density.size() == 25);

  // every populated bin within 5 blocked sigma (plus a bin-curvature slack)
  std::size_t checked = 0;
  for (std::size_t b = 0; b < est.radius.size(); ++b) {
    if (est.bin_empty[b]) continue;
    const double truth = exact_m1_density(est.radius[b], 4, 1.0);
    const double slack = 5.0 * est.density_err[b] + 0.02 * truth + 1e-4;
    CHECK(std::abs(est.density[b] - truth) <= slack);
    ++checked;
  }
  CHECK(checked >= 20);
  // the histogram captures (nearly) all four electrons
  CHECK(est.total_count == doctest::Approx(4.0).epsilon(0.02));
  CHECK(est.bin_width == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("density_profile: quasihole at the origin digs a hole in the droplet") {
  LaughlinConfig cfg;
  cfg.n_electrons = 6;
  cfg.exponent = 3;
  SampleOptions opts;
  opts.seed = 911;
  opts.samples = 15000;
  opts.burn_in = 500;
  opts.hole = Complex(0.0, 0.0);
  SampleStats stats = metropolis_sample(cfg, opts);
  DensityOptions d;
  d.r_max = 8.0;
  d.bins = 32;
  DensityEstimate est = density_profile(cfg, stats, d);
  const double bulk = 1.0 / (3.0 * kTwoPi);  // nu / (2 pi l0^2) at nu = 1/3
  REQUIRE(!est.bin_empty[0]);
  CHECK(est.density[0] < 0.5 * bulk);  // depleted core
  CHECK(est.total_count == doctest::Approx(6.0).epsilon(0.02));
}

TEST_CASE("density_profile: input validation") {
  LaughlinConfig cfg;
  cfg.n_electrons = 2;
  SampleOptions opts;
  opts.samples = 1200;
  SampleStats stats = metropolis_sample(cfg, opts);
  DensityOptions d;
  d.r_max = 0.0;
  d.bins = 10;
  CHECK_THROWS_AS(density_profile(cfg, stats, d), InvalidInput);
  d.r_max = 4.0;
  d.bins = 0;
  CHECK_THROWS_AS(density_profile(cfg, stats, d), InvalidInput);
  d.bins = 10;
  d.bulk_lo = 3.0;
  d.bulk_hi = 2.0;
  CHECK_THROWS_AS(density_profile(cfg, stats, d), InvalidInput);
  SampleStats thin;
  thin.configurations.assign(100, stats.configurations.front());
  d.bulk_lo = 0.0;
  d.bulk_hi = 0.0;
  CHECK_THROWS_WITH_AS(density_profile(cfg, thin, d), doctest::Contains("1000"), InvalidInput);
}

TEST_CASE("quasihole_berry_phase: uniform-density closed forms") {
  // nu = 1/3 with three flux quanta enclosed: gamma = -2 pi
  const double l0 = 1.0;
  const double r_three_quanta = std::sqrt(6.0) * l0;  // R^2 / (2 l0^2) = 3
  CHECK(flux_ratio_disk(r_three_quanta, l0) == doctest::Approx(3.0).epsilon(1e-14));
  const double gamma = quasihole_berry_phase(1.0 / 3.0, r_three_quanta, l0);
  CHECK(gamma == doctest::Approx(-kTwoPi).epsilon(1e-14));
  // shrinking loop encloses nothing
  CHECK(quasihole_berry_phase(1.0 / 3.0, 0.0, l0) == doctest::Approx(0.0));
  // the phase-to-flux ratio recovers the fractional charge at any radius
  for (double r : {0.5, 1.0, 2.7}) {
    const double g = quasihole_berry_phase(1.0 / 3.0, r, l0);
    CHECK(effective_charge(g, flux_ratio_disk(r, l0)) ==
          doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
  }
  CHECK(effective_charge(-kTwoPi, 3.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));

  CHECK_THROWS_AS(quasihole_berry_phase(0.0, 1.0, l0), InvalidInput);
  CHECK_THROWS_AS(quasihole_berry_phase(1.5, 1.0, l0), InvalidInput);
  CHECK_THROWS_AS(quasihole_berry_phase(0.5, -1.0, l0), InvalidInput);
  CHECK_THROWS_AS(effective_charge(1.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(flux_ratio_disk(1.0, 0.0), InvalidInput);
}

TEST_CASE("quasihole_berry_phase: estimated density integrates the histogram") {
  LaughlinConfig cfg;
  cfg.n_electrons = 6;
  cfg.exponent = 1;
  SampleOptions opts;
  opts.seed = 314;
  opts.samples = 20000;
  opts.burn_in = 500;
  SampleStats stats = metropolis_sample(cfg, opts);
  DensityOptions d;
  d.r_max = 6.0;
  d.bins = 60;
  DensityEstimate est = density_profile(cfg, stats, d);

  // deep in the nu = 1 droplet the uniform form is a good approximation
  const double r = 1.5;
  const double measured = quasihole_berry_phase(est, r);
  const double uniform = quasihole_berry_phase(1.0, r, 1.0);
  CHECK(std::abs(measured - uniform) < 0.1 * std::abs(uniform));
  // monotone in the radius (more enclosed electrons, more negative phase)
  CHECK(quasihole_berry_phase(est, 2.5) < measured);

  CHECK_THROWS_AS(quasihole_berry_phase(est, 100.0), InvalidInput);
  CHECK_THROWS_AS(quasihole_berry_phase(DensityEstimate{}, 1.0), InvalidInput);
}

TEST_CASE("landau_relations: two flux routes agree and the filled droplet has nu = 1") {
  const double l0 = 0.8;
  const double n = 12.0;
  const double area = kTwoPi * l0 * l0 * n;  // exactly n orbitals
  LandauRelations rel = landau_relations(area, l0, n, 2.5);
  CHECK(rel.orbital_count == doctest::Approx(n).epsilon(1e-12));
  CHECK(rel.filling == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rel.flux_ratio == doctest::Approx(rel.flux_ratio_chain).epsilon(1e-12));
  CHECK(rel.flux_ratio == doctest::Approx(n).epsilon(1e-12));
  CHECK(rel.enclosed_count == doctest::Approx(n).epsilon(1e-12));
  CHECK(rel.charge_unit == doctest::Approx(1.0 / (2.5 * l0 * l0)).epsilon(1e-12));
  CHECK(!rel.summary.empty());
  CHECK_THROWS_AS(landau_relations(-1.0, l0, n, 1.0), InvalidInput);
}

TEST_CASE("droplet_area: orbital count satisfies the edge-exponent relation") {
  // m (N_e - 1) = N(s) - 1, so S = 2 pi l0^2 [m (N_e - 1) + 1]
  const double l0 = 1.0;
  CHECK(droplet_area(3, 6, l0) == doctest::Approx(kTwoPi * 16.0).epsilon(1e-12));
  CHECK(droplet_area(1, 2, l0) == doctest::Approx(kTwoPi * 2.0).epsilon(1e-12));
  const double s = droplet_area(3, 6, l0);
  LandauRelations rel = landau_relations(s, l0, 6.0, 1.0);
  CHECK(rel.orbital_count == doctest::Approx(16.0).epsilon(1e-12));
  // six electrons on sixteen orbitals: filling close to (but above) 1/3
  CHECK(rel.filling == doctest::Approx(6.0 / 16.0).epsilon(1e-12));
  CHECK_THROWS_AS(droplet_area(0, 6, l0), InvalidInput);
  CHECK_THROWS_AS(droplet_area(3, 1, l0), InvalidInput);
}
