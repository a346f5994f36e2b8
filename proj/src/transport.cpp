#include "holonomy/transport.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>
#include <utility>

namespace holonomy {

namespace {

constexpr double kPi = std::numbers::pi;

// Principal branch (-pi, pi].
double wrap_pi(double x) {
  double w = std::remainder(x, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

void check_singular_margin(const AbelianField& a, const ParameterPoint& p, double margin,
                           const char* where) {
  if (!a.singular_distance) return;
  const double d = a.singular_distance(p);
  if (!(d > margin)) {
    std::ostringstream msg;
    msg << "line_integral_abelian: " << where << " lies within " << margin
        << " of a field singularity (distance " << d << ")";
    throw NumericalError(msg.str());
  }
}

// Midpoint of segment k written into `mid` (schemas are uniform along a path).
void segment_midpoint(const ParameterPoint& a, const ParameterPoint& b, ParameterPoint& mid) {
  const auto& ca = a.coords();
  const auto& cb = b.coords();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    mid.assign(ca[i].first, 0.5 * (ca[i].second + cb[i].second));
  }
}

// Sum_m A_m(mid) dx^m for one segment of a matrix field.
Matrix segment_sample(const MatrixField& a, const ParameterPoint& from, const ParameterPoint& to,
                      ParameterPoint& mid, std::size_t step) {
  segment_midpoint(from, to, mid);
  Matrix m = Matrix::Zero(a.dim, a.dim);
  const auto& ca = from.coords();
  const auto& cb = to.coords();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const double dx = cb[i].second - ca[i].second;
    if (dx == 0.0) continue;
    Matrix comp = a.component(mid, ca[i].first);
    if (comp.rows() != a.dim || comp.cols() != a.dim) {
      std::ostringstream msg;
      msg << "path_ordered_exp: field component '" << ca[i].first << "' has shape " << comp.rows()
          << "x" << comp.cols() << ", expected " << a.dim << "x" << a.dim;
      throw InvalidInput(msg.str());
    }
    m += comp * dx;
  }
  const double scale = std::max(1.0, max_abs(m));
  if (max_abs(Matrix(m - m.adjoint())) > 1e-8 * scale) {
    std::ostringstream msg;
    msg << "path_ordered_exp: connection sample at segment " << step
        << " is not Hermitian; the ordered exponential consumes the Hermitian convention "
           "(1/i)<a|d b> (see wz_connection_hermitian / wz_field)";
    throw NumericalError(msg.str());
  }
  return m;
}

// exp(i * factor * M) for Hermitian M, exactly unitary by construction.
Matrix unitary_exponential(const Matrix& m, double factor) {
  if (m.rows() == 1) {
    Matrix u(1, 1);
    u(0, 0) = std::polar(1.0, factor * m(0, 0).real());
    return u;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (m + m.adjoint())));
  if (es.info() != Eigen::Success) {
    throw NumericalError("path_ordered_exp: eigendecomposition of a connection sample failed");
  }
  const auto phases =
      (es.eigenvalues().cast<Complex>().array() * Complex(0.0, factor)).exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

struct OrderedChunk {
  Matrix product;           // later segments composed on the left
  long double phase = 0.0;  // accumulated 1x1 exponent (dim 1 only)
};

OrderedChunk ordered_chunk(const MatrixField& a, const std::vector<ParameterPoint>& pts,
                           std::size_t lo, std::size_t hi, double factor) {
  OrderedChunk out;
  out.product = Matrix::Identity(a.dim, a.dim);
  ParameterPoint mid = pts.front();
  for (std::size_t k = lo; k < hi; ++k) {
    const Matrix m = segment_sample(a, pts[k], pts[k + 1], mid, k);
    out.product = unitary_exponential(m, factor) * out.product;
    if (a.dim == 1) out.phase += static_cast<long double>(factor) * m(0, 0).real();
  }
  return out;
}

HolonomyResult ordered_exp_once(const MatrixField& a, const ParamPath& path, double factor) {
  const auto& pts = path.waypoints();
  const std::size_t n = path.segment_count();
  const std::size_t threads =
      std::min<std::size_t>(worker_thread_count(), n >= 1024 ? n / 256 : 1);

  OrderedChunk total;
  if (threads <= 1) {
    total = ordered_chunk(a, pts, 0, n, factor);
  } else {
    std::vector<OrderedChunk> chunks(threads);
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          const std::size_t lo = n * t / threads;
          const std::size_t hi = n * (t + 1) / threads;
          chunks[t] = ordered_chunk(a, pts, lo, hi, factor);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    total.product = Matrix::Identity(a.dim, a.dim);
    for (const auto& c : chunks) {
      total.product = c.product * total.product;  // later chunks on the left
      total.phase += c.phase;
    }
  }

  HolonomyResult out;
  out.loop_unitary = std::move(total.product);
  out.steps = n;
  if (a.dim == 1) {
    out.phase = std::arg(out.loop_unitary(0, 0));
    out.phase_unwrapped = static_cast<double>(total.phase);
  }
  return out;
}

// Every other waypoint of a path with an even segment count: the nested
// coarse grid used for discretization-error estimates.
ParamPath stride_two(const ParamPath& path) {
  const auto& w = path.waypoints();
  std::vector<ParameterPoint> half;
  half.reserve(w.size() / 2 + 1);
  for (std::size_t i = 0; i < w.size(); i += 2) half.push_back(w[i]);
  return ParamPath::from_waypoints(std::move(half), path.closed(), path.periods());
}

}  // namespace

double line_integral_abelian(const AbelianField& a, const ParamPath& path, double charge,
                             double singular_margin) {
  if (!a.component) throw InvalidInput("line_integral_abelian: field has no component sampler");
  const auto& pts = path.waypoints();
  check_singular_margin(a, pts.front(), singular_margin, "a waypoint");

  long double acc = 0.0L;
  ParameterPoint mid = pts.front();
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    check_singular_margin(a, pts[k + 1], singular_margin, "a waypoint");
    segment_midpoint(pts[k], pts[k + 1], mid);
    check_singular_margin(a, mid, singular_margin, "a segment midpoint");
    const auto& ca = pts[k].coords();
    const auto& cb = pts[k + 1].coords();
    for (std::size_t i = 0; i < ca.size(); ++i) {
      const double dx = cb[i].second - ca[i].second;
      if (dx == 0.0) continue;
      acc += static_cast<long double>(a.component(mid, ca[i].first)) * dx;
    }
  }
  return charge * static_cast<double>(acc);
}

double surface_integral_abelian(const std::function<double(const ParameterPoint&)>& curvature,
                                const SurfacePatch& patch) {
  if (!curvature) throw InvalidInput("surface_integral_abelian: null integrand");
  const double d1 = (patch.b1 - patch.a1) / static_cast<double>(patch.n1);
  const double d2 = (patch.b2 - patch.a2) / static_cast<double>(patch.n2);
  ParameterPoint p = patch.base;
  long double acc = 0.0L;
  for (std::size_t i = 0; i < patch.n1; ++i) {
    p.assign(patch.param1, patch.a1 + (static_cast<double>(i) + 0.5) * d1);
    for (std::size_t j = 0; j < patch.n2; ++j) {
      p.assign(patch.param2, patch.a2 + (static_cast<double>(j) + 0.5) * d2);
      acc += curvature(p);
    }
  }
  return static_cast<double>(acc * patch.cell_area());
}

AbelianField ab_solenoid_field(double flux, std::function<double(const ParameterPoint&)> gauge_alpha,
                               double h) {
  AbelianField a;
  a.component = [flux](const ParameterPoint& p, std::string_view dir) {
    const double x = p.value("x");
    const double y = p.value("y");
    const double r2 = x * x + y * y;
    if (r2 <= 0.0) {
      throw NumericalError("ab_solenoid_field: sampled on the flux line (x = y = 0)");
    }
    const double c = flux / (2.0 * kPi * r2);
    if (dir == "x") return -c * y;
    if (dir == "y") return c * x;
    throw InvalidInput("ab_solenoid_field: unknown direction '" + std::string(dir) +
                       "' (components exist for x, y)");
  };
  a.singular_distance = [](const ParameterPoint& p) {
    return std::hypot(p.value("x"), p.value("y"));
  };
  if (gauge_alpha) a = gauge_transform_abelian(std::move(a), std::move(gauge_alpha), h);
  return a;
}

HolonomyResult path_ordered_exp(const MatrixField& a, const ParamPath& loop, double g,
                                SignConvention sign, std::size_t steps) {
  if (!a.component) throw InvalidInput("path_ordered_exp: field has no component sampler");
  if (a.dim <= 0) throw InvalidInput("path_ordered_exp: field dimension must be positive");
  if (!loop.closed()) {
    throw InvalidInput(
        "path_ordered_exp: the path must be closed; an open ordered exponential is "
        "gauge-dependent");
  }
  const ParamPath path = steps > 0 ? loop.resampled(steps) : loop;
  const double factor = sign_value(sign) * g;

  HolonomyResult out = ordered_exp_once(a, path, factor);
  const std::size_t n = path.segment_count();
  if (n >= 4 && n % 2 == 0) {
    const HolonomyResult coarse = ordered_exp_once(a, stride_two(path), factor);
    out.error_estimate = max_abs(Matrix(out.loop_unitary - coarse.loop_unitary));
  }
  return out;
}

HolonomyResult holonomy_by_transport(const HamiltonianFamily& family, const ParamPath& loop,
                                     const SubspaceSelector& selector,
                                     const TransportOptions& opts) {
  if (!loop.closed()) throw InvalidInput("holonomy_by_transport: the path must be closed");
  const ParamPath path = opts.steps > 0 ? loop.resampled(opts.steps) : loop;
  FramePathOptions fopts;
  fopts.tau_deg = opts.tau_deg;
  fopts.tau_overlap = opts.tau_overlap;
  fopts.initial_frame = opts.initial_frame;
  const FramePathResult walk = frame_path(family, path, selector, fopts);

  HolonomyResult out;
  out.loop_unitary = walk.closure;
  out.steps = path.segment_count();
  if (walk.closure.rows() == 1) out.phase = std::arg(walk.closure(0, 0));
  if (opts.estimate_error && out.steps >= 4 && out.steps % 2 == 0) {
    const FramePathResult coarse = frame_path(family, stride_two(path), selector, fopts);
    out.error_estimate = max_abs(Matrix(walk.closure - coarse.closure));
  }
  return out;
}

EvolveResult schrodinger_evolve(const std::function<Matrix(double)>& h_of_t, const Vector& psi0,
                                double t_final, std::size_t steps, double norm_tol) {
  if (!h_of_t) throw InvalidInput("schrodinger_evolve: null Hamiltonian sampler");
  if (steps == 0) throw InvalidInput("schrodinger_evolve: steps must be positive");
  if (psi0.size() == 0) throw InvalidInput("schrodinger_evolve: empty initial state");
  if (!std::isfinite(t_final)) throw InvalidInput("schrodinger_evolve: t_final must be finite");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) {
    throw InvalidInput("schrodinger_evolve: initial state must be normalized to 1 within 1e-10");
  }

  const Eigen::Index dim = psi0.size();
  auto sample = [&](double t) -> Matrix {
    Matrix h = h_of_t(t);
    if (h.rows() != dim || h.cols() != dim) {
      std::ostringstream msg;
      msg << "schrodinger_evolve: Hamiltonian at t = " << t << " has shape " << h.rows() << "x"
          << h.cols() << ", expected " << dim << "x" << dim;
      throw InvalidInput(msg.str());
    }
    const double scale = std::max(1.0, max_abs(h));
    if (max_abs(Matrix(h - h.adjoint())) > 1e-8 * scale) {
      std::ostringstream msg;
      msg << "schrodinger_evolve: Hamiltonian sample at t = " << t << " is not Hermitian";
      throw NumericalError(msg.str());
    }
    return h;
  };

  EvolveResult out;
  out.times.reserve(steps + 1);
  out.states.reserve(steps + 1);
  Vector psi = psi0;
  out.times.push_back(0.0);
  out.states.push_back(psi);

  const Complex mi(0.0, -1.0);
  const double dt = t_final / static_cast<double>(steps);
  double drift = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = t_final * static_cast<double>(k) / static_cast<double>(steps);
    const double t1 = t_final * static_cast<double>(k + 1) / static_cast<double>(steps);
    const Matrix ha = sample(t0);
    const Matrix hm = sample(0.5 * (t0 + t1));
    const Matrix hb = sample(t1);
    const Vector k1 = mi * (ha * psi);
    const Vector k2 = mi * (hm * Vector(psi + (0.5 * dt) * k1));
    const Vector k3 = mi * (hm * Vector(psi + (0.5 * dt) * k2));
    const Vector k4 = mi * (hb * Vector(psi + dt * k3));
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    drift = std::max(drift, std::abs(psi.norm() - 1.0));
    out.times.push_back(t1);
    out.states.push_back(psi);
  }
  if (drift > norm_tol) {
    std::ostringstream msg;
    msg << "schrodinger_evolve: state norm drifted by " << drift << " over " << steps
        << " steps (tolerance " << norm_tol << "); increase steps";
    throw NumericalError(msg.str());
  }
  out.norm_drift = drift;
  return out;
}

PhaseDecomposition phase_decomposition(const EvolveResult& trajectory,
                                       const std::function<Matrix(double)>& h_of_t,
                                       const std::vector<Vector>& reference,
                                       double closure_tol) {
  const auto& psi = trajectory.states;
  const auto& ts = trajectory.times;
  if (psi.size() < 2 || psi.size() != ts.size()) {
    throw InvalidInput("phase_decomposition: trajectory needs at least two matched samples");
  }
  if (reference.size() != psi.size()) {
    std::ostringstream msg;
    msg << "phase_decomposition: need one reference state per trajectory sample (got "
        << reference.size() << " for " << psi.size() << " samples)";
    throw InvalidInput(msg.str());
  }
  if (!h_of_t) throw InvalidInput("phase_decomposition: null Hamiltonian sampler");
  const double closure = (reference.front() - reference.back()).norm();
  if (closure > closure_tol) {
    std::ostringstream msg;
    msg << "phase_decomposition: reference section must be single-valued; first and last "
           "samples differ by "
        << closure << " (tolerance " << closure_tol << ")";
    throw InvalidInput(msg.str());
  }

  const std::size_t n = psi.size();
  std::vector<double> lambda(n);
  std::vector<Vector> aligned(n);  // the state rephased onto the reference ray's gauge
  PhaseDecomposition out;
  for (std::size_t k = 0; k < n; ++k) {
    if (reference[k].size() != psi[k].size()) {
      throw InvalidInput("phase_decomposition: reference and state dimensions differ");
    }
    if (std::abs(reference[k].norm() - 1.0) > 1e-8) {
      throw InvalidInput("phase_decomposition: reference states must be normalized");
    }
    const Complex o = reference[k].dot(psi[k]);
    if (std::abs(o) <= 1e-8) {
      std::ostringstream msg;
      msg << "phase_decomposition: reference is orthogonal to the state at sample " << k
          << "; the ray projection is undefined";
      throw NumericalError(msg.str());
    }
    lambda[k] = std::arg(o);
    aligned[k] = psi[k] * std::polar(1.0, -lambda[k]);
    out.leakage = std::max(out.leakage, 1.0 - std::norm(o) / psi[k].squaredNorm());
  }

  long double total = 0.0L, overlap_sum = 0.0L, geometric = 0.0L;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Complex step = psi[k].dot(psi[k + 1]);
    if (std::abs(step) <= 1e-8) {
      std::ostringstream msg;
      msg << "phase_decomposition: consecutive states at sample " << k
          << " are orthogonal; the trajectory is sampled too coarsely";
      throw NumericalError(msg.str());
    }
    overlap_sum += std::arg(step);
    geometric += std::arg(aligned[k].dot(aligned[k + 1]));
    total += wrap_pi(lambda[k + 1] - lambda[k]);
  }
  out.total = static_cast<double>(total);
  out.dynamical_overlap_route = static_cast<double>(overlap_sum);
  out.geometric = static_cast<double>(geometric);

  // Energy route: theta_k = cumulative trapezoid of <H>, removed trajectory
  // psi_k * exp(+i theta_k). The reference level's own energy is sampled in
  // the same pass for the second decomposition convention.
  std::vector<double> energy(n), level(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix h = h_of_t(ts[k]);
    if (h.rows() != psi[k].size() || h.cols() != psi[k].size()) {
      throw InvalidInput("phase_decomposition: Hamiltonian dimension does not match the states");
    }
    const double scale = std::max(1.0, max_abs(h));
    if (max_abs(Matrix(h - h.adjoint())) > 1e-8 * scale) {
      std::ostringstream msg;
      msg << "phase_decomposition: Hamiltonian sample at t = " << ts[k] << " is not Hermitian";
      throw NumericalError(msg.str());
    }
    energy[k] = psi[k].dot(h * psi[k]).real() / psi[k].squaredNorm();
    level[k] = reference[k].dot(h * reference[k]).real();
  }
  long double theta = 0.0L;
  out.dynamical_removed.resize(n);
  out.dynamical_removed[0] = psi[0];
  for (std::size_t k = 0; k + 1 < n; ++k) {
    theta += 0.5L * (energy[k] + energy[k + 1]) * (ts[k + 1] - ts[k]);
    out.dynamical_removed[k + 1] = psi[k + 1] * std::polar(1.0, static_cast<double>(theta));
  }
  out.dynamical = static_cast<double>(-theta);

  long double removed = 0.0L;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    removed += std::arg(out.dynamical_removed[k].dot(out.dynamical_removed[k + 1]));
  }
  out.removed_dynamical = static_cast<double>(removed);

  // Level route: subtract the reference level's accumulated phase from the
  // reference overlap and read the remainder's increments. Increment-wise
  // wrapping keeps the 2 pi bookkeeping identical to `total`.
  long double theta_level = 0.0L, remainder = 0.0L;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const long double step = 0.5L * (level[k] + level[k + 1]) * (ts[k + 1] - ts[k]);
    theta_level += step;
    remainder += wrap_pi(lambda[k + 1] - lambda[k] + static_cast<double>(step));
  }
  out.dynamical_adiabatic = static_cast<double>(-theta_level);
  out.geometric_adiabatic = static_cast<double>(-remainder);
  return out;
}

}  // namespace holonomy
