#include "holonomy/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace holonomy {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr Complex kI{0.0, 1.0};

double degeneracy_scale(const Eigen::VectorXd& evals) {
  return evals.size() == 0 ? 1.0 : std::max(1.0, evals.cwiseAbs().maxCoeff());
}

std::pair<Vector, Complex> phase_align_impl(const Vector& reference, const Vector& v,
                                            double tau_overlap) {
  const Complex o = reference.dot(v);  // conjugates the reference
  const double mag = std::abs(o);
  if (!(mag > tau_overlap)) {
    std::ostringstream os;
    os << "phase alignment failed: overlap modulus " << mag << " <= tolerance " << tau_overlap;
    throw NumericalError(os.str());
  }
  const Complex factor = std::conj(o) / mag;
  return {Vector(v * factor), factor};
}

std::pair<Matrix, Matrix> polar_align_impl(const Matrix& reference, const Matrix& basis,
                                           double tau_overlap) {
  if (reference.rows() != basis.rows() || reference.cols() != basis.cols())
    throw InvalidInput("subspace alignment needs frames of identical shape");
  const Matrix overlap = reference.adjoint() * basis;
  Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smallest = svd.singularValues().tail(1)(0);
  if (!(smallest > tau_overlap)) {
    std::ostringstream os;
    os << "subspace alignment failed: smallest overlap singular value " << smallest
       << " <= tolerance " << tau_overlap;
    throw NumericalError(os.str());
  }
  const Matrix w = svd.matrixV() * svd.matrixU().adjoint();
  return {Matrix(basis * w), w};
}

Matrix select_columns(const Matrix& vectors, const std::vector<int>& indices) {
  Matrix out(vectors.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) out.col(static_cast<Eigen::Index>(j)) =
      vectors.col(indices[j]);
  return out;
}

Eigen::VectorXd select_values(const Eigen::VectorXd& values, const std::vector<int>& indices) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) out(static_cast<Eigen::Index>(j)) =
      values(indices[j]);
  return out;
}

// The selection must consist of whole degeneracy clusters; a split cluster
// means the tracked subspace is not gauge-covariantly defined.
void check_whole_clusters(const EigenFrame& frame, const std::vector<int>& indices,
                          std::size_t step) {
  for (const auto& group : frame.groups) {
    std::size_t selected = 0;
    for (int g : group) {
      for (int i : indices) {
        if (i == g) ++selected;
      }
    }
    if (selected != 0 && selected != group.size()) {
      std::ostringstream os;
      os << "selection splits a degenerate cluster of size " << group.size() << " at step "
         << step;
      throw NumericalError(os.str());
    }
  }
}

}  // namespace

EigenFrame decompose(const HermitianOperator& h, double tau_deg) {
  if (!(tau_deg > 0.0)) throw InvalidInput("degeneracy tolerance must be positive");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigendecomposition did not converge");
  EigenFrame frame;
  frame.eigenvalues = solver.eigenvalues();
  frame.eigenvectors = solver.eigenvectors();
  const double tol = tau_deg * degeneracy_scale(frame.eigenvalues);
  for (Eigen::Index i = 0; i < frame.eigenvalues.size(); ++i) {
    if (i > 0 && frame.eigenvalues(i) - frame.eigenvalues(i - 1) < tol) {
      frame.groups.back().push_back(static_cast<int>(i));
    } else {
      frame.groups.push_back({static_cast<int>(i)});
    }
  }
  return frame;
}

Matrix kernel_basis(const HermitianOperator& h, double tau_deg) {
  const EigenFrame frame = decompose(h, tau_deg);
  const double tol = tau_deg * degeneracy_scale(frame.eigenvalues);
  std::vector<int> indices;
  for (Eigen::Index i = 0; i < frame.eigenvalues.size(); ++i) {
    if (std::abs(frame.eigenvalues(i)) < tol) indices.push_back(static_cast<int>(i));
  }
  return select_columns(frame.eigenvectors, indices);
}

Vector align_phase(const Vector& reference, const Vector& v, double tau_overlap) {
  if (reference.size() != v.size())
    throw InvalidInput("phase alignment needs vectors of identical dimension");
  return phase_align_impl(reference, v, tau_overlap).first;
}

Matrix align_subspace(const Matrix& reference, const Matrix& basis, double tau_overlap) {
  return polar_align_impl(reference, basis, tau_overlap).first;
}

SubspaceSelector SubspaceSelector::lowest() { return index_range(0, 0); }

SubspaceSelector SubspaceSelector::index_range(int lo, int hi) {
  if (lo < 0 || hi < lo) throw InvalidInput("index range must satisfy 0 <= lo <= hi");
  SubspaceSelector s;
  s.kind_ = Kind::index_range;
  s.lo_i_ = lo;
  s.hi_i_ = hi;
  return s;
}

SubspaceSelector SubspaceSelector::energy_window(double lo, double hi) {
  if (!(lo < hi)) throw InvalidInput("energy window must satisfy lo < hi");
  SubspaceSelector s;
  s.kind_ = Kind::energy_window;
  s.lo_e_ = lo;
  s.hi_e_ = hi;
  return s;
}

SubspaceSelector SubspaceSelector::kernel() { return SubspaceSelector{}; }

std::vector<int> SubspaceSelector::resolve(const EigenFrame& frame, double tau_deg) const {
  std::vector<int> out;
  const Eigen::Index n = frame.eigenvalues.size();
  switch (kind_) {
    case Kind::index_range:
      if (hi_i_ >= n) throw InvalidInput("selector index range exceeds spectrum size");
      for (int i = lo_i_; i <= hi_i_; ++i) out.push_back(i);
      break;
    case Kind::energy_window:
      for (Eigen::Index i = 0; i < n; ++i) {
        if (frame.eigenvalues(i) >= lo_e_ && frame.eigenvalues(i) <= hi_e_)
          out.push_back(static_cast<int>(i));
      }
      break;
    case Kind::kernel: {
      const double tol = tau_deg * degeneracy_scale(frame.eigenvalues);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(frame.eigenvalues(i)) < tol) out.push_back(static_cast<int>(i));
      }
      break;
    }
  }
  return out;
}

std::string SubspaceSelector::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::index_range:
      os << "indices " << lo_i_ << ".." << hi_i_;
      break;
    case Kind::energy_window:
      os << "energies in [" << lo_e_ << ", " << hi_e_ << "]";
      break;
    case Kind::kernel:
      os << "kernel";
      break;
  }
  return os.str();
}

Complex FramePathResult::closure_phase() const {
  if (closure.rows() != 1 || closure.cols() != 1)
    throw InvalidInput("closure phase is defined for one-dimensional transport only");
  return closure(0, 0);
}

FramePathResult frame_path(const HamiltonianFamily& family, const ParamPath& path,
                           const SubspaceSelector& selector, const FramePathOptions& opts) {
  const auto& wps = path.waypoints();
  FramePathResult result;
  result.closed = path.closed();
  result.path = path;
  result.bases.reserve(wps.size());
  result.eigenvalues.reserve(wps.size());
  result.gauge_log.reserve(wps.size() - 1);

  EigenFrame first = decompose(eval_hamiltonian(family, wps[0]), opts.tau_deg);
  std::vector<int> indices = selector.resolve(first, opts.tau_deg);
  if (indices.empty())
    throw InvalidInput("selector (" + selector.describe() + ") matched no eigenvalues");
  check_whole_clusters(first, indices, 0);
  const std::size_t k = indices.size();

  Matrix basis = select_columns(first.eigenvectors, indices);
  if (opts.initial_frame) {
    const Matrix& f = *opts.initial_frame;
    if (f.rows() != basis.rows() || f.cols() != basis.cols())
      throw InvalidInput("initial frame has the wrong shape for the selected subspace");
    if (max_abs(f.adjoint() * f - Matrix::Identity(f.cols(), f.cols())) > 1e-8)
      throw InvalidInput("initial frame is not orthonormal");
    const Matrix projected = basis * (basis.adjoint() * f);
    if (max_abs(projected - f) > 1e-8)
      throw InvalidInput("initial frame does not span the selected subspace");
    basis = f;
  }
  result.bases.push_back(basis);
  result.eigenvalues.push_back(select_values(first.eigenvalues, indices));

  for (std::size_t s = 1; s < wps.size(); ++s) {
    EigenFrame frame = decompose(eval_hamiltonian(family, wps[s]), opts.tau_deg);
    std::vector<int> sel = selector.resolve(frame, opts.tau_deg);
    if (sel.size() != k) {
      std::ostringstream os;
      os << "selected subspace dimension changed from " << k << " to " << sel.size()
         << " at step " << s << " of " << wps.size() - 1 << " (selector " << selector.describe()
         << ")";
      throw NumericalError(os.str());
    }
    check_whole_clusters(frame, sel, s);
    const Matrix raw = select_columns(frame.eigenvectors, sel);
    Matrix aligned;
    Matrix rotation;
    if (k == 1) {
      auto [vec, factor] = phase_align_impl(result.bases.back().col(0), raw.col(0),
                                            opts.tau_overlap);
      aligned = vec;
      rotation = Matrix::Constant(1, 1, factor);
    } else {
      std::tie(aligned, rotation) = polar_align_impl(result.bases.back(), raw, opts.tau_overlap);
    }
    result.bases.push_back(std::move(aligned));
    result.eigenvalues.push_back(select_values(frame.eigenvalues, sel));
    result.gauge_log.push_back(std::move(rotation));
  }

  if (result.closed) result.closure = result.bases.front().adjoint() * result.bases.back();
  return result;
}

SingleValuedCorrection single_valued_correction(const FramePathResult& result,
                                                std::string_view winding_param) {
  if (!result.closed) throw InvalidInput("single-valued correction requires a closed path");
  if (!result.path) throw InvalidInput("frame path result carries no path");
  const std::vector<double> values = result.path->param_values(winding_param);
  const double span = values.back() - values.front();
  if (std::abs(span) < 1e-12)
    throw InvalidInput("winding parameter '" + std::string(winding_param) +
                       "' does not advance along the path");

  const Matrix& u = result.closure;
  const Eigen::Index k = u.rows();
  if (max_abs(u.adjoint() * u - Matrix::Identity(k, k)) > 1e-8)
    throw NumericalError("closure matrix is not unitary");

  // A unitary matrix is normal, so its Schur form is diagonal: Q gives an
  // orthonormal eigenbasis and diag(T) the unit-modulus eigenvalues.
  Eigen::ComplexSchur<Matrix> schur(u);
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
  const Matrix q = schur.matrixU();
  Eigen::VectorXd delta(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double d = -std::arg(schur.matrixT()(j, j));
    if (d <= -kPi) d += 2.0 * kPi;  // branch (-pi, pi], so closure -1 maps to +pi
    delta(j) = d;
  }

  Matrix loop_integral = q * delta.cast<Complex>().asDiagonal() * q.adjoint();
  loop_integral = 0.5 * (loop_integral + loop_integral.adjoint().eval());  // exact Hermitian

  SingleValuedCorrection out;
  out.loop_integral = loop_integral;
  out.induced_connection = loop_integral / span;
  out.bases.reserve(result.bases.size());
  for (std::size_t t = 0; t < result.bases.size(); ++t) {
    const double s = (values[t] - values.front()) / span;
    Vector phases(k);
    for (Eigen::Index j = 0; j < k; ++j) phases(j) = std::exp(kI * (s * delta(j)));
    const Matrix w = q * phases.asDiagonal() * q.adjoint();
    out.bases.push_back(result.bases[t] * w);
  }
  return out;
}

}  // namespace holonomy
