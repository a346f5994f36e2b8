// Abelian and non-Abelian connections, field curvatures, and gauge
// transformations.
//
// Sign conventions used throughout (kept consistent with the transport
// module; they differ from the common electromagnetic convention):
//   curvature          f_mn = d_n a_m - d_m a_n
//   non-Abelian        F_mn = d_n A_m - d_m A_n + i g [A_m, A_n]
//   gauge transform    A'_m = S A_m S^-1 - (i/g) (d_m S) S^-1
// Two connection conventions coexist in the literature and both are exposed:
// the raw overlap <psi_a|d_m psi_b> (anti-Hermitian) and the Hermitian form
// (1/i)<psi|d psi>. Holonomy exponentials consume the Hermitian form.
#pragma once

#include "holonomy/model.hpp"
#include "holonomy/path.hpp"

namespace holonomy {

// Real covector field a_m(x), sampled one named direction at a time. The
// optional singular_distance reports the distance to the nearest field
// singularity so integrators can keep a safety margin.
struct AbelianField {
  std::function<double(const ParameterPoint&, std::string_view)> component;
  std::function<double(const ParameterPoint&)> singular_distance;  // may be null
};

// Matrix-valued covector field A_m(x) of fixed dimension.
struct MatrixField {
  Eigen::Index dim = 0;
  std::function<Matrix(const ParameterPoint&, std::string_view)> component;
};

// --- connections from gauge sections -----------------------------------------

// Berry connection of a single-state section in the section's own gauge:
// (1/i)<psi|d_m psi> = Im<psi|d_m psi> for normalized sections. `automatic`
// uses the section's analytic derivative when present, otherwise a central
// difference with step h.
double berry_connection(const StateSection& section, const ParameterPoint& point,
                        std::string_view direction,
                        GradientMethod method = GradientMethod::automatic, double h = 1e-6);

// The raw overlap <psi|d_m psi> itself (purely imaginary for exact sections).
Complex berry_connection_raw(const StateSection& section, const ParameterPoint& point,
                             std::string_view direction,
                             GradientMethod method = GradientMethod::automatic, double h = 1e-6);

// Transport-gauge Berry connection of a nondegenerate family eigenstate:
// neighbors at +-h are phase-aligned to the center eigenvector before
// differencing. The alignment makes the tangential phase vanish, so this is
// zero by construction of the gauge — the physical content sits in loop
// holonomies, not in the pointwise transport-gauge connection. Errors when
// the selected eigenvalue is degenerate (use wz_connection on a frame).
double berry_connection_transport_gauge(const HamiltonianFamily& family,
                                        const ParameterPoint& point, int eigenstate_index,
                                        std::string_view direction,
                                        double tau_deg = 1e-8, double h = 1e-6);

// Non-Abelian connection matrix of an orthonormal frame section:
// entry (a,b) = <psi_a|d_m psi_b> (raw, anti-Hermitian convention).
// Checks orthonormality of the frame at the point.
Matrix wz_connection(const BasisSection& basis, const ParameterPoint& point,
                     std::string_view direction,
                     GradientMethod method = GradientMethod::automatic, double h = 1e-6);

// Same, after verifying the frame spans a degenerate invariant subspace of
// the family's Hamiltonian at the point.
Matrix wz_connection(const HamiltonianFamily& family, const BasisSection& basis,
                     const ParameterPoint& point, std::string_view direction,
                     GradientMethod method = GradientMethod::automatic, double h = 1e-6);

// Hermitian convention: (1/i) * wz_connection.
Matrix wz_connection_hermitian(const BasisSection& basis, const ParameterPoint& point,
                               std::string_view direction,
                               GradientMethod method = GradientMethod::automatic, double h = 1e-6);

// Whole-field views, ready for line integrals and ordered exponentials.
// berry_field samples Im<psi|d psi>; wz_field samples the Hermitian-convention
// matrix connection (1/i)<psi_a|d psi_b>.
AbelianField berry_field(StateSection section, GradientMethod method = GradientMethod::automatic,
                         double h = 1e-6);
MatrixField wz_field(BasisSection basis, GradientMethod method = GradientMethod::automatic,
                     double h = 1e-6);

// --- curvatures ---------------------------------------------------------------

// f_mn = d_n a_m - d_m a_n by central differences with step h.
double curvature_abelian(const AbelianField& a, const ParameterPoint& point, std::string_view mu,
                         std::string_view nu, double h = 1e-4);

// F_mn = d_n A_m - d_m A_n + i g [A_m, A_n].
Matrix curvature_nonabelian(const MatrixField& a, const ParameterPoint& point,
                            std::string_view mu, std::string_view nu, double g, double h = 1e-4);

// --- gauge transformations ------------------------------------------------------

// a'_m = a_m + d_m alpha. Closed-loop integrals are unchanged.
AbelianField gauge_transform_abelian(AbelianField a, std::function<double(const ParameterPoint&)> alpha,
                                     double h = 1e-4);

// A'_m = S A_m S^-1 - (i/g)(d_m S) S^-1 with S(x) unitary (checked on every
// sample within 1e-6) and g nonzero.
MatrixField gauge_transform_nonabelian(MatrixField a,
                                       std::function<Matrix(const ParameterPoint&)> s, double g,
                                       double h = 1e-4);

/// Frobenius norm of F'_mn(A') - S F_mn S^-1 at a point: zero (to finite-
// difference accuracy) because the curvature transforms covariantly.
double curvature_covariance_residual(const MatrixField& a,
                                     std::function<Matrix(const ParameterPoint&)> s, double g,
                                     const ParameterPoint& point, std::string_view mu,
                                     std::string_view nu, double h = 1e-4);

}  // namespace holonomy
