#include "holonomy/acceptance.hpp"

#include "holonomy/anyons.hpp"
#include "holonomy/connection.hpp"
#include "holonomy/spectral.hpp"
#include "holonomy/transport.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace holonomy {
namespace {

constexpr double kPi = std::numbers::pi;

// --- pinned tolerances and runtime budgets -----------------------------------
constexpr double kTolTwoLevelSign = 1e-6;          // |closure - (-1)|, 2000 steps
constexpr double kBudgetTwoLevelSign = 1.0;        // seconds
constexpr double kTolConnectionAnalytic = 1e-8;    // |A_phi - 1/2|, analytic gradient
constexpr double kTolConnectionFd = 1e-5;          // same, finite differences
constexpr double kTolFrameVanishing = 1e-10;       // four identically-zero entries
constexpr double kTolFrameEntry = 1e-8;            // off-diagonal entries vs -/+ sin(theta3)
constexpr int kFrameGridSide = 20;
constexpr double kTolControlledGate = 1e-4;        // entrywise, both methods, and agreement
constexpr std::size_t kControlledGateSteps = 10000;
constexpr double kBudgetControlledGate = 10.0;
constexpr double kTolStokes = 1e-6;                // line integral vs surface integral
constexpr double kTolSolenoid = 1e-9;              // loop integral vs enclosed flux
constexpr double kTolCovariance = 1e-5;            // curvature covariance residual
constexpr double kTolLinearizedGauge = 1e-5;       // first-order gauge formula at t = 1e-3
constexpr double kTolCommutingCurvature = 1e-8;    // non-Abelian vs Abelian curvature
constexpr double kTolPhaseIdentity = 1e-6;         // |total - (dynamical - geometric)|
constexpr double kTolRemovedDynamical = 1e-6;      // overlap phase after energy rephasing
constexpr double kTolAdiabaticGeometric = 0.05;    // |geometric - pi| at splitting*T = 200
constexpr double kBudgetDecomposition = 30.0;
constexpr double kTolClosedFormRel = 1e-14;        // uniform-density closed forms
constexpr double kMcBulkSigmas = 3.0;              // bulk density band
constexpr double kTolMcChargeRel = 0.20;           // |e*/e| within 20% of 1/3
constexpr double kBudgetMc = 300.0;
constexpr double kTolPhaseGateProduct = 1e-15;     // PHASE(phi) PHASE(-phi) roundoff

// Monte Carlo protocol constants (criterion 9)
constexpr int kMcElectrons = 6;
constexpr int kMcExponent = 3;
constexpr std::uint64_t kMcSeed = 20260819;
constexpr std::size_t kMcSamples = 100000;
constexpr std::size_t kMcBurnIn = 20000;
constexpr std::size_t kMcBins = 64;
constexpr double kMcRMax = 9.5;          // droplet edge sqrt(30) ~ 5.48, plus tail
// Bulk window: the deep interior r <= 1.25 l0 of the 5.5 l0 droplet. A
// six-electron droplet has no extended flat plateau (the profile dips to
// ~0.90 of the target around r = 2 l0 and overshoots to ~1.4 near the edge);
// the disk about the center is the region whose mean density genuinely tracks
// the infinite-droplet value, with the Monte Carlo error bar as the honest
// yardstick.
constexpr double kMcBulkLo = 0.0;
constexpr double kMcBulkHi = 1.25;
constexpr double kMcLoopRadius = 3.0;    // charge-counting disk

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
    if (!cond) {
      ok = false;
      detail += " [FAILED]";
    }
  }
  void info(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

Matrix unitary_from_hermitian_exponent(const Matrix& herm) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  Matrix phases = Matrix::Zero(herm.rows(), herm.cols());
  for (Eigen::Index i = 0; i < herm.rows(); ++i)
    phases(i, i) = std::exp(Complex(0.0, es.eigenvalues()(i)));
  return es.eigenvectors() * phases * es.eigenvectors().adjoint();
}

// 1. A single nondegenerate state carried around the closed two-level loop
// flips sign: transported closure = -1.
Check two_level_sign_change(double elapsed_limit, double* seconds) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  HamiltonianFamily family = two_level_family();
  ParameterPoint base{{"r", 1.0}, {"phi", 0.0}};
  ParamPath loop = ParamPath::sweep(base, "phi", 0.0, 2.0 * kPi, 2000, true, 2.0 * kPi);
  HolonomyResult res = holonomy_by_transport(family, loop, SubspaceSelector::lowest());
  *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double dev = std::abs(res.loop_unitary(0, 0) - Complex(-1.0, 0.0));
  c.require(dev <= kTolTwoLevelSign,
            "closure deviation from -1 = " + num(dev) + " <= " + num(kTolTwoLevelSign) +
                " at 2000 steps");
  c.require(*seconds < elapsed_limit,
            "runtime " + num(*seconds) + " s < " + num(elapsed_limit) + " s");
  return c;
}

// 2. The periodic gauge of the lower state has constant connection 1/2.
Check periodic_gauge_connection() {
  Check c;
  StateSection section = two_level_lower_single_valued();
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  double worst_analytic = 0.0, worst_fd = 0.0;
  for (int i = 0; i < 10; ++i) {
    ParameterPoint p{{"phi", angle(rng)}};
    worst_analytic = std::max(
        worst_analytic,
        std::abs(berry_connection(section, p, "phi", GradientMethod::analytic) - 0.5));
    worst_fd = std::max(
        worst_fd,
        std::abs(berry_connection(section, p, "phi", GradientMethod::finite_difference, 1e-6) -
                 0.5));
  }
  c.require(worst_analytic <= kTolConnectionAnalytic,
            "analytic |A - 1/2| max " + num(worst_analytic) + " <= " +
                num(kTolConnectionAnalytic) + " over 10 random angles");
  c.require(worst_fd <= kTolConnectionFd,
            "finite-difference max " + num(worst_fd) + " <= " + num(kTolConnectionFd));
  return c;
}

// 3. Frame connection of the degenerate manifold: the four identically-zero
// entries stay below 1e-10 and the two live entries equal -/+ sin(theta3).
Check frame_connection_entries() {
  Check c;
  BasisSection frame = dark_section();
  double worst_zero = 0.0, worst_entry = 0.0;
  for (int i = 0; i < kFrameGridSide; ++i) {
    for (int j = 0; j < kFrameGridSide; ++j) {
      const double t3 = 0.5 * kPi * i / (kFrameGridSide - 1);
      const double t4 = 0.5 * kPi * j / (kFrameGridSide - 1);
      ParameterPoint p{{"theta3", t3}, {"theta4", t4}};
      Matrix a3 = wz_connection(frame, p, "theta3");
      Matrix a4 = wz_connection(frame, p, "theta4");
      worst_zero = std::max({worst_zero, std::abs(a3(2, 2)), std::abs(a4(2, 2)),
                             std::abs(a4(3, 3)), std::abs(a3(3, 2))});
      worst_entry = std::max({worst_entry, std::abs(a4(2, 3) - Complex(-std::sin(t3), 0.0)),
                              std::abs(a4(3, 2) - Complex(std::sin(t3), 0.0))});
    }
  }
  c.require(worst_zero <= kTolFrameVanishing,
            "four vanishing entries max " + num(worst_zero) + " <= " + num(kTolFrameVanishing) +
                " on a " + std::to_string(kFrameGridSide) + "x" +
                std::to_string(kFrameGridSide) + " grid");
  c.require(worst_entry <= kTolFrameEntry,
            "entries (3,4)/(4,3) vs -/+ sin(theta3) max dev " + num(worst_entry) + " <= " +
                num(kTolFrameEntry));
  return c;
}

// 4. The rectangle loop with circulation pi/2 synthesizes the controlled gate
// diag-block(I2, i*sigma1) by both the ordered exponential and transport.
Check controlled_gate_synthesis(double elapsed_limit, double* seconds) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  ParameterPoint base{{"theta3", 0.0}, {"theta4", 0.0}};
  ParamPath loop =
      ParamPath::rectangle(base, "theta3", 0.0, 0.5 * kPi, "theta4", 0.0, 0.5 * kPi,
                           kControlledGateSteps / 4);
  BasisSection frame = dark_gate_section();

  HolonomyResult ordered = path_ordered_exp(wz_field(frame), loop, 1.0, SignConvention::minus_i);

  HamiltonianFamily family = dark_family_restricted(0.7, 1.3);
  TransportOptions opts;
  std::vector<Vector> start = frame.eval(base);
  Matrix init(frame.dim, static_cast<Eigen::Index>(start.size()));
  for (std::size_t i = 0; i < start.size(); ++i) init.col(static_cast<Eigen::Index>(i)) = start[i];
  opts.initial_frame = init;
  HolonomyResult transported =
      holonomy_by_transport(family, loop, SubspaceSelector::kernel(), opts);
  *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const Matrix target = cnot_i();
  const double dev_ordered = max_abs(Matrix(ordered.loop_unitary - target));
  const double dev_transport = max_abs(Matrix(transported.loop_unitary - target));
  const double agreement = max_abs(Matrix(ordered.loop_unitary - transported.loop_unitary));
  c.require(dev_ordered <= kTolControlledGate,
            "ordered exponential vs target " + num(dev_ordered) + " <= " +
                num(kTolControlledGate) + " at " + std::to_string(kControlledGateSteps) +
                " steps");
  c.require(dev_transport <= kTolControlledGate,
            "transported frame vs target " + num(dev_transport) + " <= " +
                num(kTolControlledGate));
  c.require(agreement <= kTolControlledGate,
            "methods agree to " + num(agreement) + " <= " + num(kTolControlledGate));

  const Matrix pattern = cnot();
  double worst_pattern = 0.0;
  for (Eigen::Index r = 0; r < 4; ++r)
    for (Eigen::Index col = 0; col < 4; ++col)
      worst_pattern = std::max(
          worst_pattern, std::abs(std::abs(ordered.loop_unitary(r, col)) -
                                  std::abs(pattern(r, col))));
  c.require(worst_pattern <= kTolControlledGate,
            "|entries| match the controlled-NOT pattern to " + num(worst_pattern));
  c.require(*seconds < elapsed_limit,
            "runtime " + num(*seconds) + " s < " + num(elapsed_limit) + " s");
  return c;
}

// 5. Stokes: circulation of sin(theta3) d(theta4) equals the surface integral
// of cos(theta3); the flux-line field integrates to the enclosed flux and is
// unchanged by a smooth gauge shift.
Check stokes_and_flux_line() {
  Check c;
  AbelianField angular;
  angular.component = [](const ParameterPoint& p, std::string_view dir) {
    return dir == "theta4" ? std::sin(p.value("theta3")) : 0.0;
  };
  ParameterPoint corner{{"theta3", 0.0}, {"theta4", 0.0}};
  ParamPath boundary =
      ParamPath::rectangle(corner, "theta3", 0.0, 0.5 * kPi, "theta4", 0.0, 0.5 * kPi, 2000);
  const double line = line_integral_abelian(angular, boundary);
  SurfacePatch patch(corner, "theta3", 0.0, 0.5 * kPi, 2000, "theta4", 0.0, 0.5 * kPi, 2);
  const double surface = surface_integral_abelian(
      [](const ParameterPoint& p) { return std::cos(p.value("theta3")); }, patch);
  c.require(std::abs(line - surface) <= kTolStokes,
            "line " + num(line) + " vs surface " + num(surface) + ", |diff| = " +
                num(std::abs(line - surface)) + " <= " + num(kTolStokes));
  c.info("circulation target pi/2, measured " + num(line));

  const double flux = 2.5;
  AbelianField plain = ab_solenoid_field(flux);
  ParameterPoint origin{{"x", 0.0}, {"y", 0.0}};
  ParamPath around = ParamPath::circle(origin, "x", "y", 0.2, -0.1, 1.3, 200000);
  const double enclosing = line_integral_abelian(plain, around);
  c.require(std::abs(enclosing - flux) <= kTolSolenoid,
            "enclosing loop = " + num(enclosing) + ", |dev from flux| = " +
                num(std::abs(enclosing - flux)) + " <= " + num(kTolSolenoid));

  ParamPath outside = ParamPath::circle(origin, "x", "y", 1.5, 0.8, 0.4, 200000);
  const double excluded = line_integral_abelian(plain, outside);
  c.require(std::abs(excluded) <= kTolSolenoid,
            "non-enclosing loop = " + num(excluded) + " <= " + num(kTolSolenoid));

  AbelianField shifted = ab_solenoid_field(
      flux,
      [](const ParameterPoint& p) {
        return 0.3 * std::sin(p.value("x")) * std::cos(p.value("y")) + 0.1 * p.value("x");
      },
      1e-5);
  const double shifted_loop = line_integral_abelian(shifted, around);
  c.require(std::abs(shifted_loop - enclosing) <= kTolSolenoid,
            "gauge-shifted loop differs by " + num(std::abs(shifted_loop - enclosing)) +
                " <= " + num(kTolSolenoid));
  return c;
}

// 6. The curvature transforms covariantly, the linearized gauge formula holds
// to second order, and commuting fields reduce to the scalar curvature.
Check gauge_structure() {
  Check c;
  const Matrix s1 = sigma1(), s2 = sigma2(), s3 = sigma3();

  MatrixField field;
  field.dim = 2;
  field.component = [&s1, &s2, &s3](const ParameterPoint& p, std::string_view dir) {
    const double x = p.value("x"), y = p.value("y");
    if (dir == "x") return Matrix(0.3 * (1.0 + 0.2 * y) * s1 + 0.1 * s3);
    return Matrix(0.4 * (1.0 + 0.1 * x * x) * s3 + 0.05 * s2);
  };
  ParameterPoint at{{"x", 0.3}, {"y", -0.4}};
  const double g = 0.7;
  auto gauge = [&s1, &s2, &s3](const ParameterPoint& p) {
    const double x = p.value("x"), y = p.value("y");
    return unitary_from_hermitian_exponent(
        Matrix(0.3 * x * s3 + 0.2 * y * s1 + 0.1 * x * y * s2));
  };
  const double residual = curvature_covariance_residual(field, gauge, g, at, "x", "y");
  c.require(residual <= kTolCovariance,
            "curvature covariance residual " + num(residual) + " <= " + num(kTolCovariance));

  // linearized transformation: A' = A + t*(d lambda) + i g t [lambda, A] + O(t^2)
  auto lambda_at = [&s1, &s2, &s3](const ParameterPoint& p) {
    return Matrix(0.4 * p.value("x") * s1 + 0.3 * p.value("y") * s3 + 0.2 * s2);
  };
  auto lambda_grad = [&s1, &s3](std::string_view dir) {
    return dir == "x" ? Matrix(0.4 * s1) : Matrix(0.3 * s3);
  };
  auto first_order_residual = [&](double t) {
    double worst = 0.0;
    MatrixField transformed = gauge_transform_nonabelian(
        field,
        [&, t](const ParameterPoint& p) {
          return unitary_from_hermitian_exponent(Matrix(g * t * lambda_at(p)));
        },
        g);
    for (std::string_view dir : {"x", "y"}) {
      Matrix a = field.component(at, dir);
      Matrix predicted = a + t * lambda_grad(dir) +
                         Complex(0.0, g * t) * (lambda_at(at) * a - a * lambda_at(at));
      worst = std::max(worst, max_abs(Matrix(transformed.component(at, dir) - predicted)));
    }
    return worst;
  };
  const double res_t = first_order_residual(1e-3);
  const double res_half = first_order_residual(5e-4);
  c.require(res_t <= kTolLinearizedGauge,
            "linearized gauge residual " + num(res_t) + " <= " + num(kTolLinearizedGauge) +
                " at t = 1e-3");
  c.require(res_half <= res_t / 3.0 + 1e-12,
            "residual shrinks quadratically: " + num(res_half) + " <= " + num(res_t) + "/3");

  MatrixField commuting;
  commuting.dim = 2;
  const Matrix m = 0.6 * s1 + 0.3 * s3;
  commuting.component = [m](const ParameterPoint& p, std::string_view dir) {
    const double x = p.value("x"), y = p.value("y");
    return Matrix((dir == "x" ? std::sin(x + 0.3 * y) : y * std::cos(0.4 * x)) * m);
  };
  AbelianField scalar;
  scalar.component = [](const ParameterPoint& p, std::string_view dir) {
    const double x = p.value("x"), y = p.value("y");
    return dir == "x" ? std::sin(x + 0.3 * y) : y * std::cos(0.4 * x);
  };
  ParameterPoint at2{{"x", 0.7}, {"y", -0.3}};
  Matrix full = curvature_nonabelian(commuting, at2, "x", "y", 0.9);
  double f = curvature_abelian(scalar, at2, "x", "y");
  const double commuting_dev = max_abs(Matrix(full - f * m));
  c.require(commuting_dev <= kTolCommutingCurvature,
            "commuting-field curvature vs scalar " + num(commuting_dev) + " <= " +
                num(kTolCommutingCurvature));
  return c;
}

// 7. Discrete phase decomposition: total = dynamical - geometric on every
// trajectory, for both the evolved-state-energy and the level-energy
// conventions; rephasing by the running energy kills the overlap phase; the
// slow two-level loop's level-route geometric phase lands near pi. (The
// evolved-state pair's geometric part is the trajectory ray-curve phase,
// which at this drive speed sits a further 2 pi^2 / (splitting * T) below pi
// — a physical finite-speed effect, so the near-pi claim is made on the
// level route that converges to the connection's loop integral.)
Check phase_decomposition_checks(double elapsed_limit, double* seconds) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  HamiltonianFamily family = two_level_family();
  StateSection section = two_level_lower_single_valued();

  auto run_case = [&](double t_final, std::size_t steps, const char* label,
                      double* geometric_out) {
    ParameterPoint base{{"r", 1.0}, {"phi", 0.0}};
    const double omega = 2.0 * kPi / t_final;
    auto h_of_t = [&family, base, omega](double t) {
      return family.eval(base.with("phi", omega * t));
    };
    Vector psi0 = section.eval(base);
    EvolveResult evolved = schrodinger_evolve(h_of_t, psi0, t_final, steps);
    std::vector<Vector> reference(evolved.times.size());
    for (std::size_t k = 0; k < evolved.times.size(); ++k)
      reference[k] = section.eval(base.with("phi", omega * evolved.times[k]));
    PhaseDecomposition pd = phase_decomposition(evolved, h_of_t, reference);
    const double identity = std::abs(pd.total - (pd.dynamical - pd.geometric));
    c.require(identity <= kTolPhaseIdentity,
              std::string(label) + ": |total - (dynamical - geometric)| = " + num(identity) +
                  " <= " + num(kTolPhaseIdentity));
    const double identity_level =
        std::abs(pd.total - (pd.dynamical_adiabatic - pd.geometric_adiabatic));
    c.require(identity_level <= kTolPhaseIdentity,
              std::string(label) + ": level-route identity residual " + num(identity_level) +
                  " <= " + num(kTolPhaseIdentity));
    c.require(std::abs(pd.removed_dynamical) <= kTolRemovedDynamical,
              std::string(label) + ": rephased trajectory overlap phase " +
                  num(std::abs(pd.removed_dynamical)) + " <= " + num(kTolRemovedDynamical));
    if (geometric_out) *geometric_out = pd.geometric_adiabatic;
  };

  double geometric = 0.0;
  run_case(100.0, 50000, "slow loop (splitting*T = 200)", &geometric);
  c.require(std::abs(geometric - kPi) <= kTolAdiabaticGeometric,
            "slow-loop level-route geometric phase " + num(geometric) + " within " +
                num(kTolAdiabaticGeometric) + " of pi");
  run_case(5.0, 20000, "fast loop", nullptr);
  *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(*seconds < elapsed_limit,
            "runtime " + num(*seconds) + " s < " + num(elapsed_limit) + " s");
  return c;
}

// 8. Uniform-density closed forms: gamma = -2 pi nu Phi/Phi0 and e*/e = -nu.
Check closed_form_charge() {
  Check c;
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> filling_draw(0.02, 1.0);
  std::uniform_real_distribution<double> radius_draw(0.1, 10.0);
  double worst_gamma = 0.0, worst_charge = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double nu = filling_draw(rng);
    const double radius = radius_draw(rng);
    const double flux = radius * radius / 2.0;  // l0 = 1
    const double gamma = quasihole_berry_phase(nu, radius, 1.0);
    const double expected = -2.0 * kPi * nu * flux;
    worst_gamma = std::max(worst_gamma,
                           std::abs(gamma - expected) / std::max(1.0, std::abs(expected)));
    worst_charge = std::max(worst_charge, std::abs(effective_charge(gamma, flux) + nu));
  }
  c.require(worst_gamma <= kTolClosedFormRel,
            "phase vs -2 pi nu Phi/Phi0, max rel dev " + num(worst_gamma) + " <= " +
                num(kTolClosedFormRel) + " over 50 draws");
  c.require(worst_charge <= kTolClosedFormRel,
            "charge ratio vs -nu, max dev " + num(worst_charge) + " <= " +
                num(kTolClosedFormRel));
  return c;
}

// 9. Monte Carlo at desk scale: flat bulk within 3 sigma of 1/(6 pi l0^2),
// counted charge within 20% of 1/3, bitwise deterministic per seed.
Check monte_carlo_charge(double elapsed_limit, double* seconds) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  LaughlinConfig lc;
  lc.n_electrons = kMcElectrons;
  lc.exponent = kMcExponent;
  lc.magnetic_length = 1.0;
  SampleOptions sopts;
  sopts.seed = kMcSeed;
  sopts.samples = kMcSamples;
  sopts.burn_in = kMcBurnIn;

  SampleStats stats = metropolis_sample(lc, sopts);
  DensityOptions dopts;
  dopts.r_max = kMcRMax;
  dopts.bins = kMcBins;
  dopts.bulk_lo = kMcBulkLo;
  dopts.bulk_hi = kMcBulkHi;
  DensityEstimate density = density_profile(lc, stats, dopts);

  const double expected_bulk = 1.0 / (6.0 * kPi);
  const double dev = std::abs(density.bulk_density - expected_bulk);
  const double band = kMcBulkSigmas * density.bulk_density_err;
  c.require(dev <= band, "bulk density " + num(density.bulk_density) + " vs " +
                             num(expected_bulk) + ", |dev| = " + num(dev) + " <= " +
                             num(kMcBulkSigmas) + " sigma = " + num(band));

  const double gamma = quasihole_berry_phase(density, kMcLoopRadius);
  const double charge = effective_charge(gamma, flux_ratio_disk(kMcLoopRadius, 1.0));
  const double target = 1.0 / 3.0;
  c.require(std::abs(std::abs(charge) - target) <= kTolMcChargeRel * target,
            "counted charge ratio " + num(charge) + ", | |e*/e| - 1/3 | = " +
                num(std::abs(std::abs(charge) - target)) + " <= " +
                num(kTolMcChargeRel * target));

  SampleStats rerun = metropolis_sample(lc, sopts);
  DensityEstimate density2 = density_profile(lc, rerun, dopts);
  const bool same = density2.bulk_density == density.bulk_density &&
                    quasihole_berry_phase(density2, kMcLoopRadius) == gamma &&
                    rerun.acceptance == stats.acceptance;
  c.require(same, "same seed reproduces the run bit for bit");
  *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(*seconds < elapsed_limit,
            "runtime " + num(*seconds) + " s < " + num(elapsed_limit) + " s");
  return c;
}

// 10. Gate library: exact matrices, involution identities, exact basis.
Check gate_library() {
  Check c;
  auto exact = [](const Matrix& m, std::initializer_list<Complex> entries) {
    Eigen::Index i = 0;
    for (Complex e : entries) {
      Eigen::Index r = i / m.cols(), col = i % m.cols();
      if (m(r, col) != e) return false;
      ++i;
    }
    return i == m.rows() * m.cols();
  };
  const Complex one(1.0, 0.0), zero(0.0, 0.0), im(0.0, 1.0);
  bool gates_exact =
      exact(sigma1(), {zero, one, one, zero}) &&
      exact(sigma2(), {zero, -im, im, zero}) &&
      exact(sigma3(), {one, zero, zero, -one}) &&
      exact(identity_gate(2), {one, zero, zero, one}) &&
      exact(cnot(), {one, zero, zero, zero, zero, one, zero, zero, zero, zero, zero, one, zero,
                     zero, one, zero}) &&
      exact(swap_gate(), {one, zero, zero, zero, zero, zero, one, zero, zero, one, zero, zero,
                          zero, zero, zero, one}) &&
      exact(cnot_i(), {one, zero, zero, zero, zero, one, zero, zero, zero, zero, zero, im, zero,
                       zero, im, zero});
  c.require(gates_exact, "fixed gate matrices are exact");

  const double phi = kPi / 3.0;
  Matrix pg = phase_gate(phi);
  bool phase_exact = exact(Matrix(pg.topLeftCorner(2, 2)), {one, zero, zero, one}) &&
                     pg(2, 2) == one && pg(3, 3) == std::exp(Complex(0.0, phi));
  c.require(phase_exact, "phase gate is diag(1, 1, 1, e^{i phi}) exactly");

  c.require(max_abs(Matrix(cnot() * cnot() - identity_gate(4))) == 0.0,
            "controlled-NOT squares to the identity exactly");
  c.require(max_abs(Matrix(swap_gate() * swap_gate() - identity_gate(4))) == 0.0,
            "swap squares to the identity exactly");
  const double phase_prod =
      max_abs(Matrix(phase_gate(phi) * phase_gate(-phi) - identity_gate(4)));
  c.require(phase_prod <= kTolPhaseGateProduct,
            "PHASE(phi) PHASE(-phi) deviates from identity by " + num(phase_prod) + " <= " +
                num(kTolPhaseGateProduct));

  bool basis_exact = true;
  const std::array<Vector, 4> basis = two_qubit_basis();
  auto vec_exact = [](const Vector& a, const Vector& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
  };
  for (int b1 = 0; b1 < 2; ++b1) {
    for (int b2 = 0; b2 < 2; ++b2) {
      Vector expected = Vector::Zero(4);
      expected(2 * b1 + b2) = 1.0;
      basis_exact = basis_exact &&
                    vec_exact(basis[static_cast<std::size_t>(2 * b1 + b2)], expected) &&
                    vec_exact(tensor_product(qubit_basis_state(b1), qubit_basis_state(b2)),
                              expected);
    }
  }
  c.require(basis_exact, "tensor-product basis |q1 q2> matches the standard ordering exactly");
  return c;
}

}  // namespace

bool AcceptanceReport::all_passed() const {
  for (const CriterionResult& c : criteria)
    if (!c.passed) return false;
  return !criteria.empty();
}

std::string format_criterion(const CriterionResult& c) {
  char head[32];
  std::snprintf(head, sizeof head, "[%2d/10] %s  ", c.index, c.passed ? "PASS" : "FAIL");
  char tail[32];
  std::snprintf(tail, sizeof tail, "; %.2f s)", c.seconds);
  return std::string(head) + c.name + " (" + c.detail + tail;
}

AcceptanceReport run_acceptance(std::ostream* progress) {
  AcceptanceReport report;
  struct Item {
    const char* name;
    std::function<Check(double*)> run;
  };
  const std::vector<Item> items = {
      {"two-level loop sign change",
       [](double* s) { return two_level_sign_change(kBudgetTwoLevelSign, s); }},
      {"periodic-gauge connection is 1/2", [](double*) { return periodic_gauge_connection(); }},
      {"degenerate-frame connection entries",
       [](double*) { return frame_connection_entries(); }},
      {"controlled-gate synthesis by two routes",
       [](double* s) { return controlled_gate_synthesis(kBudgetControlledGate, s); }},
      {"circulation equals enclosed curvature / flux",
       [](double*) { return stokes_and_flux_line(); }},
      {"gauge covariance of the curvature", [](double*) { return gauge_structure(); }},
      {"phase decomposition identities",
       [](double* s) { return phase_decomposition_checks(kBudgetDecomposition, s); }},
      {"uniform-density charge closed forms", [](double*) { return closed_form_charge(); }},
      {"sampled droplet density and counted charge",
       [](double* s) { return monte_carlo_charge(kBudgetMc, s); }},
      {"gate library identities", [](double*) { return gate_library(); }},
  };
  for (std::size_t i = 0; i < items.size(); ++i) {
    CriterionResult r;
    r.index = static_cast<int>(i) + 1;
    r.name = items[i].name;
    const auto t0 = std::chrono::steady_clock::now();
    double measured = -1.0;
    try {
      Check c = items[i].run(&measured);
      r.passed = c.ok;
      r.detail = c.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("threw: ") + e.what();
    }
    r.seconds = measured >= 0.0
                    ? measured
                    : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (progress) (*progress) << format_criterion(r) << std::endl;
    report.criteria.push_back(std::move(r));
  }
  return report;
}

}  // namespace holonomy
