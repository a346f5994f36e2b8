#include "holonomy/model.hpp"

#include <algorithm>
#include <sstream>

namespace holonomy {
namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kPi = 3.14159265358979323846;

void check_schema(const HamiltonianFamily& family, const ParameterPoint& point) {
  if (point.size() != family.schema.size()) {
    std::ostringstream os;
    os << "family '" << family.id << "' expects " << family.schema.size()
       << " parameter(s), point has " << point.size();
    throw InvalidInput(os.str());
  }
  for (const auto& spec : family.schema) {
    if (!point.has(spec.name))
      throw InvalidInput("family '" + family.id + "' requires parameter '" + spec.name + "'");
  }
}

// Rabi amplitudes of the restricted two-angle slice. All real.
std::array<double, 5> restricted_rabi(double omega_mag, double t3, double t4) {
  return {0.0, 0.0, omega_mag * std::sin(t3), omega_mag * std::cos(t3) * std::sin(t4),
          omega_mag * std::cos(t3) * std::cos(t4)};
}

Matrix lambda_hamiltonian(double epsilon, const std::array<Complex, 5>& rabi) {
  Matrix h = Matrix::Zero(6, 6);
  h(0, 0) = epsilon;
  for (int k = 0; k < 5; ++k) {
    h(0, k + 1) = std::conj(rabi[k]);
    h(k + 1, 0) = rabi[k];
  }
  return h;
}

}  // namespace

bool HamiltonianFamily::has_param(std::string_view name) const {
  return std::any_of(schema.begin(), schema.end(),
                     [&](const ParamSpec& s) { return s.name == name; });
}

double HamiltonianFamily::period_of(std::string_view name) const {
  for (const auto& s : schema) {
    if (s.name == name) return s.period;
  }
  return 0.0;
}

HermitianOperator eval_hamiltonian(const HamiltonianFamily& family, const ParameterPoint& point) {
  check_schema(family, point);
  return HermitianOperator(family.eval(point));
}

HermitianOperator eval_gradient(const HamiltonianFamily& family, const ParameterPoint& point,
                                std::string_view param, GradientMethod method, double h) {
  check_schema(family, point);
  if (!family.has_param(param))
    throw InvalidInput("family '" + family.id + "' has no parameter '" + std::string(param) + "'");
  const bool analytic_available = static_cast<bool>(family.analytic_gradient);
  if (method == GradientMethod::analytic && !analytic_available)
    throw InvalidInput("family '" + family.id + "' provides no analytic gradient");
  if (method == GradientMethod::analytic ||
      (method == GradientMethod::automatic && analytic_available)) {
    return HermitianOperator(family.analytic_gradient(point, param));
  }
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  const double x = point.value(param);
  const Matrix plus = family.eval(point.with(param, x + h));
  const Matrix minus = family.eval(point.with(param, x - h));
  return HermitianOperator((plus - minus) / (2.0 * h));
}

HamiltonianFamily two_level_family() {
  HamiltonianFamily f;
  f.id = "two_level";
  f.description = "2x2 real field at angle phi, strength r; levels at -r and +r";
  f.dim = 2;
  f.schema = {{"r", 0.0}, {"phi", 2.0 * kPi}};
  f.eval = [](const ParameterPoint& p) {
    const double r = p.value("r");
    const double phi = p.value("phi");
    Matrix h(2, 2);
    h << r * std::cos(phi), r * std::sin(phi), r * std::sin(phi), -r * std::cos(phi);
    return h;
  };
  f.analytic_gradient = [](const ParameterPoint& p, std::string_view param) {
    const double r = p.value("r");
    const double phi = p.value("phi");
    Matrix g(2, 2);
    if (param == "r") {
      g << std::cos(phi), std::sin(phi), std::sin(phi), -std::cos(phi);
    } else {
      g << -r * std::sin(phi), r * std::cos(phi), r * std::cos(phi), r * std::sin(phi);
    }
    return g;
  };
  return f;
}

HamiltonianFamily dark_family_restricted(double epsilon, double omega_mag) {
  if (!std::isfinite(epsilon) || !std::isfinite(omega_mag))
    throw InvalidInput("family constants must be finite");
  HamiltonianFamily f;
  f.id = "dark_5p1_restricted";
  f.description = "five ground levels + one excited, two-angle Rabi slice; 4-dim dark manifold";
  f.dim = 6;
  f.schema = {{"theta3", 2.0 * kPi}, {"theta4", 2.0 * kPi}};
  f.constants = {{"epsilon", epsilon}, {"omega", omega_mag}};
  f.eval = [epsilon, omega_mag](const ParameterPoint& p) {
    const auto rabi = restricted_rabi(omega_mag, p.value("theta3"), p.value("theta4"));
    std::array<Complex, 5> c;
    for (int k = 0; k < 5; ++k) c[k] = rabi[k];
    return lambda_hamiltonian(epsilon, c);
  };
  f.analytic_gradient = [omega_mag](const ParameterPoint& p, std::string_view param) {
    const double t3 = p.value("theta3");
    const double t4 = p.value("theta4");
    std::array<Complex, 5> d{};
    if (param == "theta3") {
      d[2] = omega_mag * std::cos(t3);
      d[3] = -omega_mag * std::sin(t3) * std::sin(t4);
      d[4] = -omega_mag * std::sin(t3) * std::cos(t4);
    } else {
      d[2] = 0.0;
      d[3] = omega_mag * std::cos(t3) * std::cos(t4);
      d[4] = -omega_mag * std::cos(t3) * std::sin(t4);
    }
    return lambda_hamiltonian(0.0, d);
  };
  return f;
}

HamiltonianFamily dark_family_full(double epsilon, double omega_mag) {
  if (!std::isfinite(epsilon) || !std::isfinite(omega_mag))
    throw InvalidInput("family constants must be finite");
  HamiltonianFamily f;
  f.id = "dark_5p1_full";
  f.description = "five ground levels + one excited, full spherical Rabi parametrization";
  f.dim = 6;
  f.schema = {{"theta1", 2.0 * kPi}, {"theta2", 2.0 * kPi}, {"theta3", 2.0 * kPi},
              {"theta4", 2.0 * kPi}, {"phi2", 2.0 * kPi},   {"phi3", 2.0 * kPi},
              {"phi4", 2.0 * kPi},   {"phi5", 2.0 * kPi}};
  f.constants = {{"epsilon", epsilon}, {"omega", omega_mag}};
  f.eval = [epsilon, omega_mag](const ParameterPoint& p) {
    const double t1 = p.value("theta1"), t2 = p.value("theta2");
    const double t3 = p.value("theta3"), t4 = p.value("theta4");
    const auto ephase = [&](const char* name) { return std::exp(-kI * p.value(name)); };
    std::array<Complex, 5> c;
    c[0] = omega_mag * std::sin(t1);
    c[1] = omega_mag * std::cos(t1) * std::sin(t2) * ephase("phi2");
    c[2] = omega_mag * std::cos(t1) * std::cos(t2) * std::sin(t3) * ephase("phi3");
    c[3] = omega_mag * std::cos(t1) * std::cos(t2) * std::cos(t3) * std::sin(t4) * ephase("phi4");
    c[4] = omega_mag * std::cos(t1) * std::cos(t2) * std::cos(t3) * std::cos(t4) * ephase("phi5");
    return lambda_hamiltonian(epsilon, c);
  };
  return f;
}

std::vector<std::pair<std::string, std::string>> family_catalog() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : {two_level_family(), dark_family_restricted(1.0, 1.0),
                        dark_family_full(1.0, 1.0)}) {
    out.emplace_back(f.id, f.description);
  }
  return out;
}

HamiltonianFamily make_family(std::string_view name,
                              const std::vector<std::pair<std::string, double>>& constants) {
  double epsilon = 1.0;
  double omega = 1.0;
  bool has_constants = false;
  for (const auto& [key, value] : constants) {
    if (key == "epsilon") {
      epsilon = value;
    } else if (key == "omega") {
      omega = value;
    } else {
      throw InvalidInput("unknown family constant '" + key + "' (known: epsilon, omega)");
    }
    has_constants = true;
  }
  if (name == "two_level") {
    if (has_constants) throw InvalidInput("family 'two_level' takes no constants");
    return two_level_family();
  }
  if (name == "dark_5p1_restricted") return dark_family_restricted(epsilon, omega);
  if (name == "dark_5p1_full") return dark_family_full(epsilon, omega);
  std::ostringstream os;
  os << "unknown family '" << name << "'; registered families:";
  for (const auto& [id, desc] : family_catalog()) os << " " << id;
  throw InvalidInput(os.str());
}

std::array<Vector, 4> dark_states(double theta3, double theta4) {
  const double s3 = std::sin(theta3), c3 = std::cos(theta3);
  const double s4 = std::sin(theta4), c4 = std::cos(theta4);
  std::array<Vector, 4> d;
  for (auto& v : d) v = Vector::Zero(6);
  d[0](1) = 1.0;
  d[1](2) = 1.0;
  d[2](3) = c3;
  d[2](4) = -s3 * s4;
  d[2](5) = -s3 * c4;
  d[3](4) = -c4;
  d[3](5) = s4;
  return d;
}

Vector dark_state_derivative(int i, std::string_view param, double theta3, double theta4) {
  if (i < 0 || i > 3) throw InvalidInput("dark state index must be in 0..3");
  if (param != "theta3" && param != "theta4")
    throw InvalidInput("dark states depend on theta3 and theta4 only");
  const double s3 = std::sin(theta3), c3 = std::cos(theta3);
  const double s4 = std::sin(theta4), c4 = std::cos(theta4);
  Vector v = Vector::Zero(6);
  if (i == 2 && param == "theta3") {
    v(3) = -s3;
    v(4) = -c3 * s4;
    v(5) = -c3 * c4;
  } else if (i == 2 && param == "theta4") {
    v(4) = -s3 * c4;
    v(5) = s3 * s4;
  } else if (i == 3 && param == "theta4") {
    v(4) = s4;
    v(5) = c4;
  }
  // D1, D2 are constant and D4 does not depend on theta3: derivative zero.
  return v;
}

BasisSection dark_section() {
  BasisSection s;
  s.dim = 6;
  s.k = 4;
  s.eval = [](const ParameterPoint& p) {
    const auto d = dark_states(p.value("theta3"), p.value("theta4"));
    return std::vector<Vector>(d.begin(), d.end());
  };
  s.analytic_derivative = [](const ParameterPoint& p, std::string_view param) {
    std::vector<Vector> out(4);
    for (int i = 0; i < 4; ++i)
      out[i] = dark_state_derivative(i, param, p.value("theta3"), p.value("theta4"));
    return out;
  };
  return s;
}

BasisSection dark_gate_section() {
  BasisSection s = dark_section();
  auto eval = s.eval;
  auto deriv = s.analytic_derivative;
  s.eval = [eval](const ParameterPoint& p) {
    auto v = eval(p);
    v[3] *= kI;
    return v;
  };
  s.analytic_derivative = [deriv](const ParameterPoint& p, std::string_view param) {
    auto v = deriv(p, param);
    v[3] *= kI;
    return v;
  };
  return s;
}

StateSection two_level_lower_real() {
  StateSection s;
  s.dim = 2;
  s.eval = [](const ParameterPoint& p) {
    const double half = 0.5 * p.value("phi");
    Vector v(2);
    v << -std::sin(half), std::cos(half);
    return v;
  };
  s.analytic_derivative = [](const ParameterPoint& p, std::string_view param) {
    Vector v = Vector::Zero(2);
    if (param == "phi") {
      const double half = 0.5 * p.value("phi");
      v << -0.5 * std::cos(half), -0.5 * std::sin(half);
    }
    return v;
  };
  return s;
}

StateSection two_level_lower_single_valued() {
  StateSection s;
  s.dim = 2;
  s.eval = [](const ParameterPoint& p) {
    const double phi = p.value("phi");
    const double half = 0.5 * phi;
    Vector v(2);
    v << -std::sin(half), std::cos(half);
    return Vector(std::exp(kI * half) * v);
  };
  s.analytic_derivative = [](const ParameterPoint& p, std::string_view param) {
    Vector v = Vector::Zero(2);
    if (param != "phi") return v;
    const double half = 0.5 * p.value("phi");
    Vector chi(2), dchi(2);
    chi << -std::sin(half), std::cos(half);
    dchi << -0.5 * std::cos(half), -0.5 * std::sin(half);
    return Vector(std::exp(kI * half) * (dchi + 0.5 * kI * chi));
  };
  return s;
}

StateSection two_level_upper_real() {
  StateSection s;
  s.dim = 2;
  s.eval = [](const ParameterPoint& p) {
    const double half = 0.5 * p.value("phi");
    Vector v(2);
    v << std::cos(half), std::sin(half);
    return v;
  };
  s.analytic_derivative = [](const ParameterPoint& p, std::string_view param) {
    Vector v = Vector::Zero(2);
    if (param == "phi") {
      const double half = 0.5 * p.value("phi");
      v << -0.5 * std::sin(half), 0.5 * std::cos(half);
    }
    return v;
  };
  return s;
}

Matrix identity_gate(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

Matrix sigma1() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix sigma2() {
  Matrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

Matrix sigma3() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix cnot() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

Matrix swap_gate() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 2) = 1;
  m(2, 1) = 1;
  m(3, 3) = 1;
  return m;
}

Matrix phase_gate(double phi) {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = std::exp(kI * phi);
  return m;
}

Matrix cnot_i() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = kI;
  m(3, 2) = kI;
  return m;
}

std::vector<std::pair<std::string, Matrix>> standard_gates(double phase_phi) {
  return {{"I", identity_gate(2)}, {"sigma1", sigma1()},   {"sigma2", sigma2()},
          {"sigma3", sigma3()},    {"CNOT", cnot()},       {"SWAP", swap_gate()},
          {"PHASE", phase_gate(phase_phi)}};
}

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector tensor_product(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Vector qubit_basis_state(int bit) {
  if (bit != 0 && bit != 1) throw InvalidInput("qubit basis index must be 0 or 1");
  Vector v = Vector::Zero(2);
  v(bit) = 1.0;
  return v;
}

std::array<Vector, 4> two_qubit_basis() {
  std::array<Vector, 4> basis;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      basis[2 * a + b] = tensor_product(qubit_basis_state(a), qubit_basis_state(b));
  return basis;
}

}  // namespace holonomy
