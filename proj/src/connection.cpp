#include "holonomy/connection.hpp"

#include "holonomy/spectral.hpp"

#include <sstream>

namespace holonomy {
namespace {

constexpr Complex kI{0.0, 1.0};

Vector section_derivative(const StateSection& section, const ParameterPoint& point,
                          std::string_view direction, GradientMethod method, double h) {
  if (!section.eval) throw InvalidInput("state section has no evaluator");
  const bool analytic = static_cast<bool>(section.analytic_derivative);
  if (method == GradientMethod::analytic && !analytic)
    throw InvalidInput("state section provides no analytic derivative");
  if (method == GradientMethod::analytic || (method == GradientMethod::automatic && analytic))
    return section.analytic_derivative(point, direction);
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  const double x = point.value(direction);
  const Vector plus = section.eval(point.with(direction, x + h));
  const Vector minus = section.eval(point.with(direction, x - h));
  return (plus - minus) / (2.0 * h);
}

std::vector<Vector> basis_derivative(const BasisSection& basis, const ParameterPoint& point,
                                     std::string_view direction, GradientMethod method,
                                     double h) {
  if (!basis.eval) throw InvalidInput("basis section has no evaluator");
  const bool analytic = static_cast<bool>(basis.analytic_derivative);
  if (method == GradientMethod::analytic && !analytic)
    throw InvalidInput("basis section provides no analytic derivative");
  if (method == GradientMethod::analytic || (method == GradientMethod::automatic && analytic))
    return basis.analytic_derivative(point, direction);
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  const double x = point.value(direction);
  const auto plus = basis.eval(point.with(direction, x + h));
  const auto minus = basis.eval(point.with(direction, x - h));
  if (plus.size() != minus.size()) throw InvalidInput("basis section changed size under h-shift");
  std::vector<Vector> out(plus.size());
  for (std::size_t i = 0; i < plus.size(); ++i) out[i] = (plus[i] - minus[i]) / (2.0 * h);
  return out;
}

void check_orthonormal(const std::vector<Vector>& frame) {
  for (std::size_t i = 0; i < frame.size(); ++i) {
    for (std::size_t j = i; j < frame.size(); ++j) {
      const Complex o = frame[i].dot(frame[j]);
      const Complex want = (i == j) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
      if (std::abs(o - want) > 1e-8)
        throw InvalidInput("frame is not orthonormal at the requested point");
    }
  }
}

}  // namespace

Complex berry_connection_raw(const StateSection& section, const ParameterPoint& point,
                             std::string_view direction, GradientMethod method, double h) {
  const Vector psi = section.eval(point);
  const Vector dpsi = section_derivative(section, point, direction, method, h);
  return psi.dot(dpsi);
}

double berry_connection(const StateSection& section, const ParameterPoint& point,
                        std::string_view direction, GradientMethod method, double h) {
  return berry_connection_raw(section, point, direction, method, h).imag();
}

double berry_connection_transport_gauge(const HamiltonianFamily& family,
                                        const ParameterPoint& point, int eigenstate_index,
                                        std::string_view direction, double tau_deg, double h) {
  const EigenFrame frame = decompose(eval_hamiltonian(family, point), tau_deg);
  if (eigenstate_index < 0 || eigenstate_index >= frame.eigenvalues.size())
    throw InvalidInput("eigenstate index out of range");
  for (const auto& group : frame.groups) {
    for (int g : group) {
      if (g == eigenstate_index && group.size() > 1)
        throw InvalidInput(
            "selected eigenvalue is degenerate; the Abelian connection is undefined "
            "(use wz_connection on a frame section)");
    }
  }
  const Vector center = frame.eigenvectors.col(eigenstate_index);
  const double x = point.value(direction);
  auto neighbor = [&](double xs) {
    const EigenFrame f = decompose(eval_hamiltonian(family, point.with(direction, xs)), tau_deg);
    return align_phase(center, Vector(f.eigenvectors.col(eigenstate_index)));
  };
  const Vector plus = neighbor(x + h);
  const Vector minus = neighbor(x - h);
  return center.dot((plus - minus) / (2.0 * h)).imag();
}

Matrix wz_connection(const BasisSection& basis, const ParameterPoint& point,
                     std::string_view direction, GradientMethod method, double h) {
  const auto frame = basis.eval(point);
  if (frame.empty()) throw InvalidInput("basis section evaluated to an empty frame");
  check_orthonormal(frame);
  const auto dframe = basis_derivative(basis, point, direction, method, h);
  if (dframe.size() != frame.size())
    throw InvalidInput("basis derivative size does not match the frame");
  const auto k = static_cast<Eigen::Index>(frame.size());
  Matrix a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = frame[i].dot(dframe[j]);
  return a;
}

Matrix wz_connection(const HamiltonianFamily& family, const BasisSection& basis,
                     const ParameterPoint& point, std::string_view direction,
                     GradientMethod method, double h) {
  const auto frame = basis.eval(point);
  check_orthonormal(frame);
  const Matrix hmat = eval_hamiltonian(family, point).matrix();
  const double scale = std::max(1.0, max_abs(hmat));
  // The frame must span an invariant subspace with a single (degenerate)
  // eigenvalue: H B = B (lambda I).
  const auto k = static_cast<Eigen::Index>(frame.size());
  Matrix b(hmat.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) b.col(j) = frame[j];
  const Matrix hb = hmat * b;
  const Matrix block = b.adjoint() * hb;
  if (max_abs(hb - b * block) > 1e-8 * scale)
    throw InvalidInput("frame does not span an invariant subspace of the Hamiltonian");
  const Complex mean_energy = block.trace() / static_cast<double>(k);
  if (max_abs(block - mean_energy * Matrix::Identity(k, k)) > 1e-8 * scale)
    throw InvalidInput("frame spans a non-degenerate invariant subspace");
  return wz_connection(basis, point, direction, method, h);
}

Matrix wz_connection_hermitian(const BasisSection& basis, const ParameterPoint& point,
                               std::string_view direction, GradientMethod method, double h) {
  return Matrix(wz_connection(basis, point, direction, method, h) / kI);
}

AbelianField berry_field(StateSection section, GradientMethod method, double h) {
  AbelianField f;
  f.component = [section = std::move(section), method, h](const ParameterPoint& p,
                                                          std::string_view dir) {
    return berry_connection(section, p, dir, method, h);
  };
  return f;
}

MatrixField wz_field(BasisSection basis, GradientMethod method, double h) {
  MatrixField f;
  f.dim = basis.k;
  f.component = [basis = std::move(basis), method, h](const ParameterPoint& p,
                                                      std::string_view dir) {
    return wz_connection_hermitian(basis, p, dir, method, h);
  };
  return f;
}

double curvature_abelian(const AbelianField& a, const ParameterPoint& point, std::string_view mu,
                         std::string_view nu, double h) {
  if (!a.component) throw InvalidInput("abelian field has no component function");
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  const double x_mu = point.value(mu);
  const double x_nu = point.value(nu);
  const double da_mu_dnu = (a.component(point.with(nu, x_nu + h), mu) -
                            a.component(point.with(nu, x_nu - h), mu)) /
                           (2.0 * h);
  const double da_nu_dmu = (a.component(point.with(mu, x_mu + h), nu) -
                            a.component(point.with(mu, x_mu - h), nu)) /
                           (2.0 * h);
  return da_mu_dnu - da_nu_dmu;
}

Matrix curvature_nonabelian(const MatrixField& a, const ParameterPoint& point,
                            std::string_view mu, std::string_view nu, double g, double h) {
  if (!a.component) throw InvalidInput("matrix field has no component function");
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  const double x_mu = point.value(mu);
  const double x_nu = point.value(nu);
  const Matrix a_mu = a.component(point, mu);
  const Matrix a_nu = a.component(point, nu);
  if (a_mu.rows() != a_nu.rows() || a_mu.cols() != a_nu.cols())
    throw InvalidInput("field components have mismatched dimensions");
  const Matrix da_mu_dnu = (a.component(point.with(nu, x_nu + h), mu) -
                            a.component(point.with(nu, x_nu - h), mu)) /
                           (2.0 * h);
  const Matrix da_nu_dmu = (a.component(point.with(mu, x_mu + h), nu) -
                            a.component(point.with(mu, x_mu - h), nu)) /
                           (2.0 * h);
  return da_mu_dnu - da_nu_dmu + kI * g * (a_mu * a_nu - a_nu * a_mu);
}

AbelianField gauge_transform_abelian(AbelianField a,
                                     std::function<double(const ParameterPoint&)> alpha,
                                     double h) {
  if (!alpha) throw InvalidInput("gauge function is empty");
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  AbelianField out;
  out.singular_distance = a.singular_distance;
  out.component = [a = std::move(a), alpha = std::move(alpha), h](const ParameterPoint& p,
                                                                  std::string_view dir) {
    const double x = p.value(dir);
    const double dalpha = (alpha(p.with(dir, x + h)) - alpha(p.with(dir, x - h))) / (2.0 * h);
    return a.component(p, dir) + dalpha;
  };
  return out;
}

MatrixField gauge_transform_nonabelian(MatrixField a,
                                       std::function<Matrix(const ParameterPoint&)> s, double g,
                                       double h) {
  if (!s) throw InvalidInput("gauge transformation function is empty");
  if (g == 0.0) throw InvalidInput("coupling g must be nonzero");
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  MatrixField out;
  out.dim = a.dim;
  out.component = [a = std::move(a), s = std::move(s), g, h](const ParameterPoint& p,
                                                             std::string_view dir) {
    const Matrix sp = s(p);
    if (max_abs(sp.adjoint() * sp - Matrix::Identity(sp.rows(), sp.cols())) > 1e-6)
      throw InvalidInput("gauge transformation sample is not unitary");
    const double x = p.value(dir);
    const Matrix ds = (s(p.with(dir, x + h)) - s(p.with(dir, x - h))) / (2.0 * h);
    return Matrix(sp * a.component(p, dir) * sp.adjoint() - (kI / g) * ds * sp.adjoint());
  };
  return out;
}

double curvature_covariance_residual(const MatrixField& a,
                                     std::function<Matrix(const ParameterPoint&)> s, double g,
                                     const ParameterPoint& point, std::string_view mu,
                                     std::string_view nu, double h) {
  const Matrix sp = s(point);
  const Matrix f = curvature_nonabelian(a, point, mu, nu, g, h);
  const MatrixField transformed = gauge_transform_nonabelian(a, s, g, h);
  const Matrix f_prime = curvature_nonabelian(transformed, point, mu, nu, g, h);
  return (f_prime - sp * f * sp.adjoint()).norm();
}

}  // namespace holonomy
