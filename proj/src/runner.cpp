#include "holonomy/runner.hpp"

#include "holonomy/anyons.hpp"
#include "holonomy/connection.hpp"
#include "holonomy/spectral.hpp"
#include "holonomy/transport.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

namespace holonomy {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kDefaultSweepSegments = 2000;
constexpr std::size_t kDefaultRectangleSegmentsPerLeg = 500;
constexpr std::size_t kDefaultCircleSegments = 2000;
constexpr std::size_t kDefaultEvolveSteps = 50000;
constexpr std::size_t kDefaultDensityBins = 64;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(Complex z) { return "(" + fmt(z.real()) + "," + fmt(z.imag()) + ")"; }

class Report {
 public:
  explicit Report(const JobConfig& cfg) : cfg_(cfg) {
    out_.name = cfg.name;
    out_.kind = cfg.kind;
    out_.lines.push_back("config:");
    std::istringstream echo(emit_config(cfg));
    std::string line;
    while (std::getline(echo, line)) out_.lines.push_back("  " + line);
  }

  void kv(std::string_view key, const std::string& value) {
    out_.lines.push_back(std::string(key) + ": " + value);
  }
  void kv(std::string_view key, double value) { kv(key, fmt(value)); }
  void note(const std::string& text) { out_.lines.push_back(text); }

  // A phase in radians plus its pi-multiple reading.
  void phase(std::string_view key, double radians) {
    kv(std::string(key) + "_rad", radians);
    kv(std::string(key) + "_over_pi", radians / kPi);
  }

  // Entrywise matrix dump; declared_unitary adds the residual check line.
  void matrix(std::string_view key, const Matrix& m, bool declared_unitary) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      std::string row;
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) row += " ";
        row += fmt(m(r, c));
      }
      out_.lines.push_back(std::string(key) + "[" + std::to_string(r) + "]: " + row);
    }
    if (declared_unitary) {
      Matrix gram = m.adjoint() * m;
      gram -= Matrix::Identity(m.cols(), m.cols());
      kv(std::string(key) + ".unitary_residual", max_abs(gram));
    }
  }

  void table(std::string id, std::string csv) {
    out_.tables.emplace_back(std::move(id), std::move(csv));
  }

  JobReport finish(double seconds) && {
    out_.seconds = seconds;
    return std::move(out_);
  }

  const JobConfig& cfg() const { return cfg_; }

 private:
  const JobConfig& cfg_;
  JobReport out_;
};

GradientMethod gradient_of(const JobConfig& cfg) {
  if (cfg.gradient == "analytic") return GradientMethod::analytic;
  if (cfg.gradient == "finite_difference") return GradientMethod::finite_difference;
  return GradientMethod::automatic;
}

SignConvention sign_of(const JobConfig& cfg) {
  return cfg.sign == "plus_i" ? SignConvention::plus_i : SignConvention::minus_i;
}

ParamPath build_path(const JobConfig& cfg) {
  const LoopSpec& loop = cfg.loop;
  if (loop.kind == "sweep") {
    std::size_t segs = loop.segments ? loop.segments : kDefaultSweepSegments;
    bool closes = loop.period > 0.0 &&
                  std::abs(std::remainder(loop.to - loop.from, loop.period)) <=
                      1e-9 * std::max(1.0, std::abs(loop.to - loop.from));
    return ParamPath::sweep(cfg.base, loop.param, loop.from, loop.to, segs, closes, loop.period);
  }
  if (loop.kind == "rectangle") {
    std::size_t segs = loop.segments ? loop.segments : kDefaultRectangleSegmentsPerLeg;
    return ParamPath::rectangle(cfg.base, loop.param1, loop.a1, loop.b1, loop.param2, loop.a2,
                                loop.b2, segs);
  }
  if (loop.kind == "circle") {
    std::size_t segs = loop.segments ? loop.segments : kDefaultCircleSegments;
    return ParamPath::circle(cfg.base, loop.param1, loop.param2, loop.center1, loop.center2,
                             loop.radius, segs);
  }
  if (loop.kind == "waypoints") {
    ParamPath p = ParamPath::from_waypoints(loop.waypoints, loop.closed, loop.periods);
    return loop.segments ? p.resampled(loop.segments) : p;
  }
  throw InvalidInput("job has no path");
}

std::string describe_loop(const LoopSpec& loop) {
  if (loop.kind == "sweep")
    return "sweep " + loop.param + " from " + fmt(loop.from) + " to " + fmt(loop.to);
  if (loop.kind == "rectangle")
    return "rectangle " + loop.param1 + " in [" + fmt(loop.a1) + ", " + fmt(loop.b1) + "], " +
           loop.param2 + " in [" + fmt(loop.a2) + ", " + fmt(loop.b2) + "]";
  if (loop.kind == "circle")
    return "circle in (" + loop.param1 + ", " + loop.param2 + ") around (" + fmt(loop.center1) +
           ", " + fmt(loop.center2) + "), radius " + fmt(loop.radius);
  if (loop.kind == "waypoints")
    return "polyline through " + std::to_string(loop.waypoints.size()) + " waypoints";
  return "none";
}

// Column matrix of a frame/section evaluated at a point.
Matrix frame_matrix(const JobConfig& cfg, const ParameterPoint& at) {
  if (!cfg.frame.empty()) {
    BasisSection basis = find_frame(cfg.frame).make();
    std::vector<Vector> vecs = basis.eval(at);
    Matrix m(basis.dim, static_cast<Eigen::Index>(vecs.size()));
    for (std::size_t i = 0; i < vecs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vecs[i];
    return m;
  }
  StateSection section = find_section(cfg.section).make();
  Vector v = section.eval(at);
  Matrix m(v.size(), 1);
  m.col(0) = v;
  return m;
}

MatrixField connection_field(const JobConfig& cfg) {
  GradientMethod gm = gradient_of(cfg);
  if (!cfg.frame.empty()) return wz_field(find_frame(cfg.frame).make(), gm, cfg.h);
  StateSection section = find_section(cfg.section).make();
  MatrixField field;
  field.dim = 1;
  field.component = [section, gm, h = cfg.h](const ParameterPoint& p, std::string_view dir) {
    Matrix m(1, 1);
    m(0, 0) = berry_connection(section, p, dir, gm, h);
    return m;
  };
  return field;
}

void run_connection(Report& rep) {
  const JobConfig& cfg = rep.cfg();
  GradientMethod gm = gradient_of(cfg);
  std::vector<std::string> dirs = cfg.directions;
  if (!cfg.section.empty()) {
    const SectionCatalogEntry& entry = find_section(cfg.section);
    if (dirs.empty()) dirs = entry.params;
    StateSection section = entry.make();
    for (const std::string& d : dirs) {
      rep.kv("connection." + d, berry_connection(section, cfg.base, d, gm, cfg.h));
      rep.kv("connection." + d + "_raw",
             fmt(berry_connection_raw(section, cfg.base, d, gm, cfg.h)));
    }
    if (!cfg.curvature_mu.empty()) {
      AbelianField field = berry_field(section, gm, cfg.h);
      rep.kv("curvature." + cfg.curvature_mu + "_" + cfg.curvature_nu,
             curvature_abelian(field, cfg.base, cfg.curvature_mu, cfg.curvature_nu, cfg.h));
    }
    return;
  }
  const FrameCatalogEntry& entry = find_frame(cfg.frame);
  if (dirs.empty()) dirs = entry.params;
  BasisSection basis = entry.make();
  std::optional<HamiltonianFamily> family;
  if (!cfg.system.empty()) family = make_family(cfg.system, cfg.constants);
  for (const std::string& d : dirs) {
    Matrix raw = family ? wz_connection(*family, basis, cfg.base, d, gm, cfg.h)
                        : wz_connection(basis, cfg.base, d, gm, cfg.h);
    rep.matrix("connection." + d + "_raw", raw, /*declared_unitary=*/false);
    rep.matrix("connection." + d + "_hermitian", Matrix(raw / Complex(0.0, 1.0)),
               /*declared_unitary=*/false);
  }
  if (!cfg.curvature_mu.empty()) {
    MatrixField field = wz_field(basis, gm, cfg.h);
    rep.matrix("curvature." + cfg.curvature_mu + "_" + cfg.curvature_nu,
               curvature_nonabelian(field, cfg.base, cfg.curvature_mu, cfg.curvature_nu, cfg.g,
                                    cfg.h),
               /*declared_unitary=*/false);
  }
}

void run_holonomy(Report& rep) {
  const JobConfig& cfg = rep.cfg();
  ParamPath path = build_path(cfg);
  rep.kv("loop", describe_loop(cfg.loop) + ", " + std::to_string(path.segment_count()) +
                     " segments");
  std::optional<Matrix> start_frame;
  if (!cfg.frame.empty() || !cfg.section.empty())
    start_frame = frame_matrix(cfg, path.waypoints().front());

  std::optional<Matrix> transported, ordered;
  if (cfg.method != "ordered_exp") {
    HamiltonianFamily family = make_family(cfg.system, cfg.constants);
    SubspaceSelector selector = parse_selector(cfg.selector);
    TransportOptions opts;
    opts.tau_deg = cfg.tau_deg;
    opts.tau_overlap = cfg.tau_overlap;
    opts.initial_frame = start_frame;
    HolonomyResult res = holonomy_by_transport(family, path, selector, opts);
    transported = res.loop_unitary;
    rep.kv("subspace", selector.describe());
    rep.matrix("transport.matrix", res.loop_unitary, /*declared_unitary=*/true);
    if (res.loop_unitary.rows() == 1) rep.phase("transport.phase", res.phase);
    if (res.error_estimate) rep.kv("transport.error_estimate", *res.error_estimate);
    rep.kv("transport.steps", static_cast<double>(res.steps));

    // For a one-dimensional subspace carried around a whole number of turns
    // of a periodic parameter, report the constant connection of the gauge
    // that makes the transported frame single-valued.
    if (res.loop_unitary.rows() == 1 && cfg.loop.kind == "sweep" && cfg.loop.period > 0.0) {
      FramePathOptions fopts;
      fopts.tau_deg = cfg.tau_deg;
      fopts.tau_overlap = cfg.tau_overlap;
      fopts.initial_frame = start_frame;
      FramePathResult walked = frame_path(family, path, selector, fopts);
      SingleValuedCorrection corr = single_valued_correction(walked, cfg.loop.param);
      rep.kv("single_valued_gauge.connection_" + cfg.loop.param,
             corr.induced_connection(0, 0).real());
      double rot = 0.0;
      for (const Matrix& g : walked.gauge_log)
        rot = std::max(rot, max_abs(Matrix(g - Matrix::Identity(g.rows(), g.cols()))));
      rep.kv("transport.gauge_rotation_max", rot);
    }
  }
  if (cfg.method != "transport") {
    MatrixField field = connection_field(cfg);
    HolonomyResult res = path_ordered_exp(field, path, cfg.g, sign_of(cfg));
    ordered = res.loop_unitary;
    rep.matrix("ordered_exp.matrix", res.loop_unitary, /*declared_unitary=*/true);
    if (res.loop_unitary.rows() == 1) {
      rep.phase("ordered_exp.phase", res.phase);
      if (res.phase_unwrapped) rep.phase("ordered_exp.phase_unwrapped", *res.phase_unwrapped);
    }
    if (res.error_estimate) rep.kv("ordered_exp.error_estimate", *res.error_estimate);
  }
  if (transported && ordered)
    rep.kv("method_agreement", max_abs(Matrix(*transported - *ordered)));
}

void run_evolve(Report& rep) {
  const JobConfig& cfg = rep.cfg();
  HamiltonianFamily family = make_family(cfg.system, cfg.constants);
  const double phi0 = cfg.base.value("phi");
  const double omega = 2.0 * kPi * cfg.turns / cfg.t_final;
  const std::size_t steps = cfg.steps ? cfg.steps : kDefaultEvolveSteps;
  auto h_of_t = [family, base = cfg.base, phi0, omega](double t) {
    return family.eval(base.with("phi", phi0 + omega * t));
  };
  StateSection section = two_level_lower_single_valued();
  Vector psi0 = section.eval(cfg.base);
  EvolveResult evolved = schrodinger_evolve(h_of_t, psi0, cfg.t_final, steps);
  std::vector<Vector> reference(evolved.times.size());
  for (std::size_t k = 0; k < evolved.times.size(); ++k)
    reference[k] = section.eval(cfg.base.with("phi", phi0 + omega * evolved.times[k]));
  PhaseDecomposition pd = phase_decomposition(evolved, h_of_t, reference);

  rep.kv("drive", "phi winds " + fmt(cfg.turns) + " turn(s) in t_final = " + fmt(cfg.t_final) +
                      " (rate " + fmt(omega) + ")");
  rep.kv("steps", static_cast<double>(steps));
  rep.kv("norm_drift", evolved.norm_drift);
  rep.kv("leakage_max", pd.leakage);
  rep.phase("total_phase", pd.total);
  rep.phase("dynamical_phase", pd.dynamical);
  rep.phase("geometric_phase", pd.geometric);
  rep.phase("dynamical_phase_level", pd.dynamical_adiabatic);
  rep.phase("geometric_phase_level", pd.geometric_adiabatic);
  rep.kv("dynamical_overlap_route_rad", pd.dynamical_overlap_route);
  rep.kv("removed_dynamical_rad", pd.removed_dynamical);
  rep.kv("identity_residual_exact",
         std::abs(pd.total - (pd.dynamical_overlap_route - pd.geometric)));
  rep.kv("identity_residual_energy_route",
         std::abs(pd.total - (pd.dynamical - pd.geometric)));
  rep.kv("identity_residual_level_route",
         std::abs(pd.total - (pd.dynamical_adiabatic - pd.geometric_adiabatic)));
}

void run_anyon(Report& rep) {
  const JobConfig& cfg = rep.cfg();
  if (cfg.mode == "uniform") {
    const double radius =
        cfg.loop_radius > 0.0 ? cfg.loop_radius : cfg.l0 * std::sqrt(2.0 * cfg.flux_ratio);
    const double flux = cfg.flux_ratio > 0.0 ? cfg.flux_ratio : flux_ratio_disk(radius, cfg.l0);
    const double gamma = quasihole_berry_phase(cfg.filling, radius, cfg.l0);
    rep.kv("filling", cfg.filling);
    rep.kv("loop_radius_over_l0", radius / cfg.l0);
    rep.kv("flux_ratio", flux);
    rep.phase("berry_phase", gamma);
    rep.kv("effective_charge_ratio", effective_charge(gamma, flux));
    return;
  }
  LaughlinConfig lc;
  lc.n_electrons = cfg.n_electrons;
  lc.exponent = cfg.exponent;
  lc.magnetic_length = cfg.l0;
  SampleOptions sopts;
  sopts.seed = cfg.seed;
  sopts.samples = cfg.samples;
  sopts.burn_in = cfg.burn_in;
  sopts.proposal_step = cfg.proposal_step;
  if (cfg.hole) sopts.hole = Complex(cfg.hole->first, -cfg.hole->second);
  SampleStats stats = metropolis_sample(lc, sopts);
  rep.kv("samples", static_cast<double>(cfg.samples));
  rep.kv("acceptance", stats.acceptance);
  if (!stats.tuning_hint.empty()) rep.kv("tuning_hint", stats.tuning_hint);

  const double droplet_radius = std::sqrt(2.0 * cfg.exponent * (cfg.n_electrons - 1)) * cfg.l0;
  DensityOptions dopts;
  dopts.r_max = cfg.r_max > 0.0 ? cfg.r_max : droplet_radius + 4.0 * cfg.l0;
  dopts.bins = cfg.bins ? cfg.bins : kDefaultDensityBins;
  dopts.center = Complex(0.0, 0.0);
  dopts.bulk_lo = cfg.bulk_lo;
  dopts.bulk_hi = cfg.bulk_hi;
  dopts.blocks = cfg.blocks;
  DensityEstimate density = density_profile(lc, stats, dopts);

  const double expected_bulk =
      1.0 / (2.0 * kPi * cfg.exponent * cfg.l0 * cfg.l0);
  rep.kv("droplet_radius_over_l0", droplet_radius / cfg.l0);
  rep.kv("bulk_density", density.bulk_density);
  rep.kv("bulk_density_stderr", density.bulk_density_err);
  rep.kv("bulk_density_expected", expected_bulk);
  if (density.bulk_density_err > 0.0)
    rep.kv("bulk_density_deviation_sigma",
           (density.bulk_density - expected_bulk) / density.bulk_density_err);
  rep.kv("integrated_count", density.total_count);

  const double gamma = quasihole_berry_phase(density, cfg.loop_radius);
  const double flux = flux_ratio_disk(cfg.loop_radius, cfg.l0);
  rep.kv("loop_radius_over_l0", cfg.loop_radius / cfg.l0);
  rep.kv("flux_ratio", flux);
  rep.phase("berry_phase", gamma);
  rep.kv("effective_charge_ratio", effective_charge(gamma, flux));

  std::string csv = "bin_center_over_l0,density,stderr\n";
  for (std::size_t b = 0; b < density.radius.size(); ++b) {
    csv += fmt(density.radius[b] / cfg.l0);
    csv += ",";
    csv += fmt(density.density[b]);
    csv += ",";
    csv += fmt(density.density_err[b]);
    csv += "\n";
  }
  rep.table("density", std::move(csv));
}

void run_gates(Report& rep) {
  const JobConfig& cfg = rep.cfg();
  for (const auto& [name, gate] : standard_gates(cfg.phi))
    rep.matrix("gate." + name, gate, /*declared_unitary=*/true);
  rep.matrix("gate.CNOT_I", cnot_i(), /*declared_unitary=*/true);

  Matrix c2 = cnot() * cnot() - identity_gate(4);
  Matrix s2 = swap_gate() * swap_gate() - identity_gate(4);
  Matrix p2 = phase_gate(cfg.phi) * phase_gate(-cfg.phi) - identity_gate(4);
  rep.kv("check.cnot_squared_minus_identity", max_abs(c2));
  rep.kv("check.swap_squared_minus_identity", max_abs(s2));
  rep.kv("check.phase_times_inverse_minus_identity", max_abs(p2));

  const std::array<Vector, 4> basis = two_qubit_basis();
  for (int i = 0; i < 4; ++i) {
    std::string row;
    for (Eigen::Index r = 0; r < basis[static_cast<std::size_t>(i)].size(); ++r) {
      if (r) row += " ";
      row += fmt(basis[static_cast<std::size_t>(i)](r));
    }
    rep.kv("basis.q" + std::to_string(i / 2) + std::to_string(i % 2), row);
  }
}

void run_landau(Report& rep) {
  const JobConfig& cfg = rep.cfg();
  const bool droplet = cfg.area == 0.0;
  const double area =
      droplet ? droplet_area(cfg.exponent, cfg.n_electrons, cfg.l0) : cfg.area;
  LandauRelations rel = landau_relations(area, cfg.l0, cfg.n_electrons, cfg.b_field);
  if (droplet) rep.kv("droplet_area", area);
  rep.kv("orbital_count", rel.orbital_count);
  rep.kv("filling", rel.filling);
  rep.kv("charge_unit", rel.charge_unit);
  rep.kv("flux_ratio", rel.flux_ratio);
  rep.kv("flux_ratio_chain", rel.flux_ratio_chain);
  rep.kv("enclosed_count", rel.enclosed_count);
  if (droplet)
    rep.kv("droplet_orbital_residual",
           rel.orbital_count - (cfg.exponent * (cfg.n_electrons - 1) + 1));
  rep.note("summary: " + rel.summary);
}

}  // namespace

JobReport run_job(const JobConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const std::string context =
      "[job " + cfg.name + " (" + std::string(job_kind_name(cfg.kind)) + ")] ";
  try {
    Report rep(cfg);
    switch (cfg.kind) {
      case JobKind::connection: run_connection(rep); break;
      case JobKind::holonomy: run_holonomy(rep); break;
      case JobKind::evolve: run_evolve(rep); break;
      case JobKind::anyon: run_anyon(rep); break;
      case JobKind::gates: run_gates(rep); break;
      case JobKind::landau: run_landau(rep); break;
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::move(rep).finish(seconds);
  } catch (const InvalidInput& e) {
    throw InvalidInput(context + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + e.what());
  }
}

std::vector<JobReport> run_jobs(const std::vector<JobConfig>& configs) {
  std::vector<JobReport> reports(configs.size());
  std::vector<std::exception_ptr> failures(configs.size());
  const unsigned workers =
      std::min<unsigned>(worker_thread_count(), static_cast<unsigned>(configs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) reports[i] = run_job(configs[i]);
    return reports;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        reports[i] = run_job(configs[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (std::exception_ptr& p : failures)
    if (p) std::rethrow_exception(p);
  return reports;
}

std::string render_report(const JobReport& report, bool include_timing) {
  std::string out =
      "== job " + report.name + " (" + std::string(job_kind_name(report.kind)) + ") ==\n";
  for (const std::string& line : report.lines) out += line + "\n";
  for (const auto& [id, csv] : report.tables) {
    std::size_t rows = 0;
    for (char c : csv)
      if (c == '\n') ++rows;
    out += "table " + id + ": " + std::to_string(rows ? rows - 1 : 0) + " rows\n";
  }
  if (include_timing) out += "wall_time_s: " + fmt(report.seconds) + "\n";
  return out;
}

std::string render_reports(const std::vector<JobReport>& reports, bool include_timing) {
  std::string out;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i) out += "\n";
    out += render_report(reports[i], include_timing);
  }
  return out;
}

}  // namespace holonomy
