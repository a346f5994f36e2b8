// Line and surface integrals of connection fields, Wilson-loop holonomies by
// path-ordered exponentials and by spectral transport, time evolution, and
// the decomposition of an evolved phase into dynamical and geometric parts.
#pragma once

#include "holonomy/connection.hpp"
#include "holonomy/spectral.hpp"

namespace holonomy {

// Sum_k sum_m charge * a_m(midpoint_k) * dx^m_k (midpoint rule). When the
// field declares a singular locus, every waypoint and midpoint must stay
// farther than `singular_margin` from it.
double line_integral_abelian(const AbelianField& a, const ParamPath& path, double charge = 1.0,
                             double singular_margin = 1e-6);

// Midpoint-rule integral of a scalar curvature sample over a rectangular
// patch (signed by the patch orientation).
double surface_integral_abelian(const std::function<double(const ParameterPoint&)>& curvature,
                                const SurfacePatch& patch);

// Planar field of an infinitely thin flux line through the origin, in
// coordinates "x","y": azimuthal component flux/(2*pi*r), i.e. a =
// flux/(2*pi*r^2) * (-y, x). Any loop encircling the origin once
// (counterclockwise) integrates to `flux`; curvature vanishes away from the
// origin, which is the declared singular locus. A non-null `gauge_alpha`
// adds the pure-gauge term d_m alpha (finite differences, step h), which
// changes nothing on closed loops.
AbelianField ab_solenoid_field(double flux,
                               std::function<double(const ParameterPoint&)> gauge_alpha = nullptr,
                               double h = 1e-4);

// Which sign multiplies i in the holonomy exponent. Hermitian-convention
// fields with minus_i reproduce spectral transport; the engine exposes both
// because both appear in the literature.
enum class SignConvention { plus_i, minus_i };

inline double sign_value(SignConvention s) { return s == SignConvention::plus_i ? 1.0 : -1.0; }

struct HolonomyResult {
  Matrix loop_unitary;                    // k x k, unitary by construction
  double phase = 0.0;                     // arg of the 1x1 unitary (mod 2*pi); 0 for k > 1
  std::optional<double> phase_unwrapped;  // accumulated 1x1 phase with winding (ordered exp only)
  std::size_t steps = 0;
  std::optional<double> error_estimate;   // max-entry deviation from a half-resolution run
};

// Ordered product over loop segments of exp(sign * i * g * A_m(mid) dx^m),
// later segments composing on the LEFT. The field samples must be Hermitian
// (the Hermitian connection convention) — that is what makes every factor,
// and hence the result, exactly unitary at any step count. `steps` > 0
// resamples the loop to at least that many segments. Segment exponentials
// may be computed concurrently; composition preserves path order.
HolonomyResult path_ordered_exp(const MatrixField& a, const ParamPath& loop, double g,
                                SignConvention sign, std::size_t steps = 0);

struct TransportOptions {
  std::size_t steps = 0;  // resample the loop to at least this many segments
  double tau_deg = kDefaultDegeneracyTol;
  double tau_overlap = kDefaultOverlapTol;
  std::optional<Matrix> initial_frame;  // gauge in which the closure is expressed
  bool estimate_error = true;           // extra half-resolution run
};

// Holonomy measured directly from eigenvector transport: walks the loop with
// frame_path and returns the closure <first frame|transported frame>. This is
// the algorithm-independent oracle the ordered exponential is checked against.
HolonomyResult holonomy_by_transport(const HamiltonianFamily& family, const ParamPath& loop,
                                     const SubspaceSelector& selector,
                                     const TransportOptions& opts = {});

struct EvolveResult {
  std::vector<double> times;
  std::vector<Vector> states;
  double norm_drift = 0.0;  // max deviation of the state norm from 1
};

// Fixed-step 4th-order Runge-Kutta integration of i d/dt psi = H(t) psi from
// t = 0 to t_final. H samples are checked Hermitian; the initial state must
// be normalized. Errors when the norm drifts beyond norm_tol.
EvolveResult schrodinger_evolve(const std::function<Matrix(double)>& h_of_t, const Vector& psi0,
                                double t_final, std::size_t steps, double norm_tol = 1e-6);

struct PhaseDecomposition {
  double total = 0.0;      // accumulated phase of the state against the reference ray
  double dynamical = 0.0;  // f = -integral <psi|H|psi> dt (trapezoid)
  double geometric = 0.0;  // F = (1/i) sum <chi|d chi> on the single-valued representative
  double dynamical_overlap_route = 0.0;  // (1/i) sum <psi|d psi>: same f via overlaps
  double dynamical_adiabatic = 0.0;  // -integral <ref|H|ref> dt: the tracked level's own phase
  double geometric_adiabatic = 0.0;  // remainder once the level phase is removed from the state
  double leakage = 0.0;              // max over samples of 1 - |<reference|psi>|^2
  std::vector<Vector> dynamical_removed;  // psi * exp(+i integral <H> dt)
  double removed_dynamical = 0.0;  // overlap-route phase sum of the removed trajectory
};

// Splits the phase accumulated along a trajectory into dynamical and
// geometric parts against a single-valued reference section (one reference
// state per sample; first and last must agree within closure_tol). The
// reference fixes only the ray gauge: total = dynamical - geometric within
// integrator tolerance, where dynamical is the energy-expectation integral
// and geometric the overlap-argument sum over the reference-aligned ray
// representative. The overlap route for the dynamical part — exact for the
// discrete identity — is reported alongside as a cross-check, and the
// returned trajectory with the dynamical phase removed makes the residual
// overlap-route dynamical part vanish.
//
// Two conventions for the dynamical part are reported. `dynamical` integrates
// the expectation on the evolved state; its partner `geometric` is the phase
// of the trajectory's own closed ray curve, which at finite drive speed picks
// up a deviation three times larger than the slow-drive limit's. The
// `_adiabatic` pair instead integrates the energy on the reference level and
// leaves as `geometric_adiabatic` exactly the remainder the slow-drive
// decomposition assigns to the loop: it converges to the connection's loop
// integral as the drive slows and is the quantity to compare against that
// limit. Both pairs satisfy total = dynamical - geometric to roundoff.
PhaseDecomposition phase_decomposition(const EvolveResult& trajectory,
                                       const std::function<Matrix(double)>& h_of_t,
                                       const std::vector<Vector>& reference,
                                       double closure_tol = 1e-8);

}  // namespace holonomy
