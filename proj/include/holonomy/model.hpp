// Physical content: parametrized Hamiltonian families, analytic eigenstate
// sections (including the degenerate dark manifold of the five-level lambda
// system), the standard gate set, and Kronecker products.
#pragma once

#include "holonomy/types.hpp"

#include <array>
#include <functional>
#include <optional>

namespace holonomy {

// One named coordinate of a family's schema. period > 0 declares the
// coordinate periodic (angles), which path closure checks honor.
struct ParamSpec {
  std::string name;
  double period = 0.0;  // 0 = not periodic
};

// A smooth map point -> Hermitian matrix, with schema and fixed constants.
// The optional analytic gradient returns dH/d(param) at a point.
struct HamiltonianFamily {
  std::string id;
  std::string description;
  Eigen::Index dim = 0;
  std::vector<ParamSpec> schema;
  std::vector<std::pair<std::string, double>> constants;
  std::function<Matrix(const ParameterPoint&)> eval;
  std::function<Matrix(const ParameterPoint&, std::string_view)> analytic_gradient;  // may be null

  bool has_param(std::string_view name) const;
  double period_of(std::string_view name) const;  // 0 when not periodic/unknown
};

// A smooth single-state gauge section ψ(point). The gauge is the caller's
// choice and is part of the section's meaning; connections computed from a
// section are connections *in that gauge*.
struct StateSection {
  Eigen::Index dim = 0;
  std::function<Vector(const ParameterPoint&)> eval;
  std::function<Vector(const ParameterPoint&, std::string_view)> analytic_derivative;  // may be null
};

// A smooth orthonormal k-frame section spanning a (degenerate) subspace.
struct BasisSection {
  Eigen::Index dim = 0;  // ambient dimension
  Eigen::Index k = 0;    // number of frame vectors
  std::function<std::vector<Vector>(const ParameterPoint&)> eval;
  std::function<std::vector<Vector>(const ParameterPoint&, std::string_view)>
      analytic_derivative;  // may be null
};

enum class GradientMethod { automatic, analytic, finite_difference };

// Evaluates the family at a point after checking the coordinate names match
// the schema exactly (order-insensitive) and all values are finite.
HermitianOperator eval_hamiltonian(const HamiltonianFamily& family, const ParameterPoint& point);

// dH/d(param). `automatic` prefers the analytic form and falls back to a
// central difference with step h (default 1e-6).
HermitianOperator eval_gradient(const HamiltonianFamily& family, const ParameterPoint& point,
                                std::string_view param,
                                GradientMethod method = GradientMethod::automatic, double h = 1e-6);

// --- built-in families ------------------------------------------------------

// 2x2 H = r [[cos phi, sin phi], [sin phi, -cos phi]]; eigenvalues are -r, +r.
HamiltonianFamily two_level_family();

// Lambda system of five ground states coupled to one excited state through
// complex Rabi amplitudes on a unit sphere: basis index 0 is the excited
// state |e> (detuning epsilon on the diagonal), indices 1..5 are |g1..g5>;
// H(0,k) = conj(Omega_k), H(k,0) = Omega_k. The kernel is four-dimensional
// for every parameter value (the "dark" manifold).
//
// Restricted slice (two angles): Omega1 = Omega2 = 0,
//   Omega3 = |Omega| sin(theta3), Omega4 = |Omega| cos(theta3) sin(theta4),
//   Omega5 = |Omega| cos(theta3) cos(theta4).
HamiltonianFamily dark_family_restricted(double epsilon, double omega_mag);

// Full spherical parametrization: angles theta1..theta4 and phases
// phi2..phi5, with sum_k |Omega_k|^2 = |Omega|^2 identically.
HamiltonianFamily dark_family_full(double epsilon, double omega_mag);

// Registry used by the CLI: names, one-line descriptions, construction from
// (name, constants). Unknown names raise InvalidInput listing what exists.
std::vector<std::pair<std::string, std::string>> family_catalog();
HamiltonianFamily make_family(std::string_view name,
                              const std::vector<std::pair<std::string, double>>& constants);

// --- dark states of the restricted family -----------------------------------

// The four exact zero-energy states at (theta3, theta4), orthonormal for all
// angles and independent of epsilon and |Omega|:
//   D1 = |g1>,  D2 = |g2>,
//   D3 = cos(t3)|g3> - sin(t3) sin(t4)|g4> - sin(t3) cos(t4)|g5>,
//   D4 = -cos(t4)|g4> + sin(t4)|g5>.
std::array<Vector, 4> dark_states(double theta3, double theta4);

// Closed-form d(dark state i)/d(param), i in 0..3, param "theta3"/"theta4".
Vector dark_state_derivative(int i, std::string_view param, double theta3, double theta4);

// Frame section for {D1, D2, D3, D4} with analytic derivatives. In this real
// frame the nonzero connection entries are <D3|d4 D4> = -sin(theta3) and
// <D4|d4 D3> = +sin(theta3), and loop transport closes on a real rotation.
BasisSection dark_section();

// Same manifold with the fourth state rephased to i*D4. In this frame the
// theta4-connection is -i*sin(theta3)*sigma1 on the (D3,D4) block, and the
// rectangle loop with circulation integral pi/2 transports to the two-qubit
// gate cnot_i() below. Use this frame for gate-synthesis jobs.
BasisSection dark_gate_section();

// --- two-level gauge sections -----------------------------------------------

// Lower eigenstate chi-(phi) = (-sin phi/2, cos phi/2): real, parallel
// (zero connection), changes sign after phi -> phi + 2*pi.
StateSection two_level_lower_real();

// Single-valued gauge X-(phi) = e^{i phi/2} chi-(phi): periodic in phi with
// Berry connection A_phi = 1/2.
StateSection two_level_lower_single_valued();

// Upper eigenstate chi+(phi) = (cos phi/2, sin phi/2).
StateSection two_level_upper_real();

// --- gates and tensor algebra -----------------------------------------------

Matrix identity_gate(Eigen::Index dim);
Matrix sigma1();  // [[0,1],[1,0]]
Matrix sigma2();  // [[0,-i],[i,0]]
Matrix sigma3();  // [[1,0],[0,-1]]
Matrix cnot();
Matrix swap_gate();
Matrix phase_gate(double phi);  // diag(1,1,1,e^{i phi})
// CNOT with the swapped block multiplied by i: diag-block(I2, i*sigma1).
// This is the gate the dark-manifold rectangle loop synthesizes.
Matrix cnot_i();

// Named standard set {I, sigma1, sigma2, sigma3, CNOT, SWAP, PHASE(phi)}.
std::vector<std::pair<std::string, Matrix>> standard_gates(double phase_phi);

// Kronecker products, qubit basis |0> = (1,0), |1> = (0,1), and the induced
// two-qubit basis |00>, |01>, |10>, |11> (first factor = slow index).
Matrix tensor_product(const Matrix& a, const Matrix& b);
Vector tensor_product(const Vector& a, const Vector& b);
Vector qubit_basis_state(int bit);
std::array<Vector, 4> two_qubit_basis();

}  // namespace holonomy
