// Eigendecomposition with explicit degeneracy bookkeeping, gauge alignment of
// states and subspace frames, and frame transport along parameter paths.
#pragma once

#include "holonomy/model.hpp"
#include "holonomy/path.hpp"

namespace holonomy {

inline constexpr double kDefaultDegeneracyTol = 1e-8;
inline constexpr double kDefaultOverlapTol = 1e-8;

// Spectrum of one Hermitian matrix: ascending eigenvalues, orthonormal
// eigenvector columns, and maximal clusters of eigenvalues closer than
// tau_deg * max(1, max|E|) (chained over consecutive gaps).
struct EigenFrame {
  Eigen::VectorXd eigenvalues;
  Matrix eigenvectors;
  std::vector<std::vector<int>> groups;
};

EigenFrame decompose(const HermitianOperator& h, double tau_deg = kDefaultDegeneracyTol);

// Orthonormal basis (as matrix columns) of the eigenspace with
// |E| < tau_deg * max(1, max|E|). Zero columns when the kernel is trivial.
Matrix kernel_basis(const HermitianOperator& h, double tau_deg = kDefaultDegeneracyTol);

// Rephases v so that <reference|v> is real and positive. Errors when the
// overlap modulus is at or below tau_overlap. Exactly idempotent.
Vector align_phase(const Vector& reference, const Vector& v,
                   double tau_overlap = kDefaultOverlapTol);

// Rotates the columns of `basis` by the unitary factor W of the polar
// decomposition of M^dag (M_ij = <ref_i|basis_j>), making the new overlap
// matrix Hermitian positive-definite. Errors when the smallest singular
// value of M is at or below tau_overlap.
Matrix align_subspace(const Matrix& reference, const Matrix& basis,
                      double tau_overlap = kDefaultOverlapTol);

// Which eigenvalue group to transport.
class SubspaceSelector {
 public:
  static SubspaceSelector lowest();                        // index 0
  static SubspaceSelector index_range(int lo, int hi);     // inclusive
  static SubspaceSelector energy_window(double lo, double hi);
  static SubspaceSelector kernel();                        // |E| below tolerance

  // Ascending eigenvalue indices selected in this frame.
  std::vector<int> resolve(const EigenFrame& frame, double tau_deg) const;
  std::string describe() const;

 private:
  enum class Kind { index_range, energy_window, kernel } kind_ = Kind::kernel;
  int lo_i_ = 0, hi_i_ = 0;
  double lo_e_ = 0.0, hi_e_ = 0.0;
};

struct FramePathOptions {
  double tau_deg = kDefaultDegeneracyTol;
  double tau_overlap = kDefaultOverlapTol;
  // Optional replacement for the first frame: columns must span the selected
  // subspace at the first waypoint (checked). The transported gauge — and
  // hence the basis the closure matrix is expressed in — follows this frame.
  std::optional<Matrix> initial_frame;
};

struct FramePathResult {
  std::vector<Matrix> bases;                  // aligned frame at each waypoint
  std::vector<Eigen::VectorXd> eigenvalues;   // selected eigenvalues per waypoint
  std::vector<Matrix> gauge_log;              // per-step rotation applied (k x k)
  bool closed = false;
  Matrix closure;                             // <first|last> (k x k), closed paths only
  std::optional<ParamPath> path;              // copy of the walked path

  Complex closure_phase() const;              // k = 1 convenience
};

// Walks the path, eigendecomposing at every waypoint, keeping the selected
// group and aligning each frame to its predecessor (phase alignment for one
// state, polar alignment for subspaces). Hard NumericalError, identifying the
// step, when the selected group changes dimension or splits a degeneracy
// cluster. For closed paths the closure matrix is the transported holonomy.
FramePathResult frame_path(const HamiltonianFamily& family, const ParamPath& path,
                           const SubspaceSelector& selector, const FramePathOptions& opts = {});

struct SingleValuedCorrection {
  std::vector<Matrix> bases;   // corrected, exactly periodic frames
  Matrix induced_connection;   // constant Hermitian connection of the new gauge
  Matrix loop_integral;        // induced_connection * (winding span)
};

// Multiplies the transported frames by exp(i * s * L), s the normalized value
// of the winding parameter, so the corrected frame returns exactly to its
// start. L is the principal Hermitian logarithm of the inverse closure, with
// the boundary branch arg = -pi mapped to +pi (so a closure of -1 induces
// A = +1/2 on a 2*pi sweep, the periodic gauge of the two-level loop), and
// exp(-i * loop_integral) reproduces the closure.
SingleValuedCorrection single_valued_correction(const FramePathResult& result,
                                                std::string_view winding_param);

}  // namespace holonomy
