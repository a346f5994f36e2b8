// Hamiltonian families, eigenstate sections, and the gate library.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "holonomy/model.hpp"

#include <cmath>
#include <random>

using namespace holonomy;

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix fd_frame_derivative(const BasisSection& sec, const ParameterPoint& p,
                           std::string_view param, int column, double h = 1e-6) {
  std::vector<Vector> plus = sec.eval(p.with(param, p.value(param) + h));
  std::vector<Vector> minus = sec.eval(p.with(param, p.value(param) - h));
  return (plus[column] - minus[column]) / (2.0 * h);
}

}  // namespace

TEST_CASE("fixed gates have their exact entries") {
  CHECK(identity_gate(3) == Matrix::Identity(3, 3));

  Matrix s1 = sigma1(), s2 = sigma2(), s3 = sigma3();
  CHECK(s1(0, 1) == Complex(1, 0));
  CHECK(s1(1, 0) == Complex(1, 0));
  CHECK(s1(0, 0) == Complex(0, 0));
  CHECK(s2(0, 1) == Complex(0, -1));
  CHECK(s2(1, 0) == Complex(0, 1));
  CHECK(s3(0, 0) == Complex(1, 0));
  CHECK(s3(1, 1) == Complex(-1, 0));

  Matrix c = cnot();
  CHECK(c(0, 0) == Complex(1, 0));
  CHECK(c(1, 1) == Complex(1, 0));
  CHECK(c(2, 3) == Complex(1, 0));
  CHECK(c(3, 2) == Complex(1, 0));
  CHECK(c(2, 2) == Complex(0, 0));
  CHECK(max_abs(Matrix(c * c - Matrix::Identity(4, 4))) == 0.0);

  Matrix sw = swap_gate();
  CHECK(sw(1, 2) == Complex(1, 0));
  CHECK(sw(2, 1) == Complex(1, 0));
  CHECK(max_abs(Matrix(sw * sw - Matrix::Identity(4, 4))) == 0.0);

  const double phi = 0.37;
  Matrix pg = phase_gate(phi);
  CHECK(pg(3, 3) == std::exp(Complex(0, phi)));
  CHECK(pg(0, 0) == Complex(1, 0));
  CHECK(pg(2, 3) == Complex(0, 0));

  Matrix ci = cnot_i();
  CHECK(ci(0, 0) == Complex(1, 0));
  CHECK(ci(1, 1) == Complex(1, 0));
  CHECK(ci(2, 3) == Complex(0, 1));
  CHECK(ci(3, 2) == Complex(0, 1));
  // squares to diag(1, 1, -1, -1), not the identity
  Matrix ci2 = ci * ci;
  CHECK(ci2(2, 2) == Complex(-1, 0));
  CHECK(ci2(0, 0) == Complex(1, 0));
}

TEST_CASE("standard_gates returns unitary named matrices") {
  for (const auto& [name, gate] : standard_gates(1.1)) {
    CHECK(!name.empty());
    CHECK(max_abs(Matrix(gate.adjoint() * gate - Matrix::Identity(gate.rows(), gate.cols()))) <
          1e-15);
  }
}

TEST_CASE("tensor products follow the row-major qubit ordering") {
  Matrix a(2, 2), b(2, 2);
  a << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0);
  b << Complex(0, 1), Complex(0, 0), Complex(0, 0), Complex(5, 0);
  Matrix t = tensor_product(a, b);
  REQUIRE(t.rows() == 4);
  CHECK(t(0, 0) == Complex(0, 1));   // a00 * b00
  CHECK(t(1, 1) == Complex(5, 0));   // a00 * b11
  CHECK(t(2, 2) == Complex(0, 4));   // a11 * b00
  CHECK(t(3, 3) == Complex(20, 0));  // a11 * b11
  CHECK(t(0, 2) == Complex(0, 2));   // a01 * b00

  Vector v0 = qubit_basis_state(0), v1 = qubit_basis_state(1);
  CHECK(v0(0) == Complex(1, 0));
  CHECK(v1(1) == Complex(1, 0));
  Vector v10 = tensor_product(v1, v0);
  CHECK(v10(2) == Complex(1, 0));
  CHECK(v10.squaredNorm() == 1.0);

  auto basis = two_qubit_basis();
  for (int q1 = 0; q1 < 2; ++q1)
    for (int q2 = 0; q2 < 2; ++q2) {
      const Vector expected = tensor_product(qubit_basis_state(q1), qubit_basis_state(q2));
      CHECK((basis[2 * q1 + q2].array() == expected.array()).all());
    }
  CHECK_THROWS_AS(qubit_basis_state(2), InvalidInput);
}

TEST_CASE("two_level family: spectrum, schema, gradients") {
  HamiltonianFamily family = two_level_family();
  ParameterPoint p{{"r", 1.3}, {"phi", 0.8}};
  Matrix h = family.eval(p);
  REQUIRE(h.rows() == 2);
  // eigenvalues are -r and +r
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-1.3).epsilon(1e-14));
  CHECK(es.eigenvalues()(1) == doctest::Approx(1.3).epsilon(1e-14));

  // analytic gradient against a central difference
  for (const char* dir : {"r", "phi"}) {
    Matrix analytic = eval_gradient(family, p, dir, GradientMethod::analytic).matrix();
    Matrix fd = eval_gradient(family, p, dir, GradientMethod::finite_difference, 1e-6).matrix();
    CHECK(max_abs(Matrix(analytic - fd)) < 1e-9);
    Matrix auto_m = eval_gradient(family, p, dir, GradientMethod::automatic).matrix();
    CHECK(max_abs(Matrix(auto_m - analytic)) == 0.0);
  }

  CHECK(family.has_param("phi"));
  CHECK(!family.has_param("theta3"));
  CHECK(family.period_of("phi") == doctest::Approx(2 * kPi));
  CHECK(family.period_of("r") == 0.0);

  CHECK_THROWS_AS(eval_hamiltonian(family, ParameterPoint{{"r", 1.0}}), InvalidInput);
  CHECK_THROWS_AS(eval_hamiltonian(family, ParameterPoint{{"r", 1.0}, {"phi", 0.0}, {"x", 1.0}}),
                  InvalidInput);
  CHECK_THROWS_AS(eval_gradient(family, p, "nope"), InvalidInput);
  CHECK(max_abs(Matrix(eval_hamiltonian(family, p).matrix() - h)) == 0.0);
}

TEST_CASE("two_level sections are the eigenvectors they claim to be") {
  HamiltonianFamily family = two_level_family();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> draw(0.0, 2 * kPi);
  for (int i = 0; i < 8; ++i) {
    ParameterPoint p{{"r", 0.9}, {"phi", draw(rng)}};
    Matrix h = family.eval(p);
    for (auto [make, ev] : {std::pair{&two_level_lower_real, -0.9},
                            std::pair{&two_level_lower_single_valued, -0.9},
                            std::pair{&two_level_upper_real, +0.9}}) {
      StateSection sec = make();
      Vector v = sec.eval(p);
      CHECK(std::abs(v.norm() - 1.0) < 1e-14);
      CHECK((h * v - ev * v).norm() < 1e-13);
      // analytic derivative against finite differences
      Vector d = sec.analytic_derivative(p, "phi");
      Vector plus = sec.eval(p.with("phi", p.value("phi") + 1e-6));
      Vector minus = sec.eval(p.with("phi", p.value("phi") - 1e-6));
      CHECK((d - (plus - minus) / 2e-6).norm() < 1e-9);
    }
  }
  // the real gauge flips sign over one turn; the single-valued gauge closes
  StateSection real_gauge = two_level_lower_real();
  StateSection periodic = two_level_lower_single_valued();
  ParameterPoint a{{"r", 1.0}, {"phi", 0.0}}, b{{"r", 1.0}, {"phi", 2 * kPi}};
  CHECK((real_gauge.eval(a) + real_gauge.eval(b)).norm() < 1e-12);
  CHECK((periodic.eval(a) - periodic.eval(b)).norm() < 1e-12);
}

TEST_CASE("dark states: orthonormal zero modes of the coupled system") {
  HamiltonianFamily family = dark_family_restricted(0.7, 1.3);
  for (double t3 : {0.0, 0.3, 1.0, kPi / 2}) {
    for (double t4 : {0.1, 0.9, kPi / 2}) {
      ParameterPoint p{{"theta3", t3}, {"theta4", t4}};
      Matrix h = family.eval(p);
      REQUIRE(h.rows() == 6);
      auto states = dark_states(t3, t4);
      for (int i = 0; i < 4; ++i) {
        CHECK((h * states[i]).norm() < 1e-12);  // H D = 0
        for (int j = 0; j < 4; ++j) {
          const Complex o = states[i].dot(states[j]);
          CHECK(std::abs(o - (i == j ? Complex(1, 0) : Complex(0, 0))) < 1e-14);
        }
        // no component on the excited level (basis index 0)
        CHECK(std::abs(states[i](0)) == 0.0);
      }
    }
  }
}

TEST_CASE("dark-state derivatives match finite differences") {
  ParameterPoint p{{"theta3", 0.6}, {"theta4", 1.1}};
  for (const BasisSection& sec : {dark_section(), dark_gate_section()}) {
    for (const char* dir : {"theta3", "theta4"}) {
      std::vector<Vector> d = sec.analytic_derivative(p, dir);
      for (int col = 0; col < 4; ++col) {
        CHECK((d[col] - fd_frame_derivative(sec, p, dir, col)).norm() < 1e-9);
      }
    }
  }
  // dark_state_derivative agrees with the section's columns
  Vector d2 = dark_state_derivative(2, "theta3", 0.6, 1.1);
  CHECK((d2 - dark_section().analytic_derivative(p, "theta3")[2]).norm() < 1e-14);
  CHECK_THROWS_AS(dark_state_derivative(4, "theta3", 0.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(dark_state_derivative(0, "theta1", 0.0, 0.0), InvalidInput);
}

TEST_CASE("dark_gate_section differs from dark_section by i on the fourth state") {
  ParameterPoint p{{"theta3", 0.4}, {"theta4", 0.9}};
  auto plain = dark_section().eval(p);
  auto gate = dark_gate_section().eval(p);
  for (int i = 0; i < 3; ++i) CHECK((plain[i] - gate[i]).norm() == 0.0);
  CHECK((Complex(0, 1) * plain[3] - gate[3]).norm() == 0.0);
}

TEST_CASE("full dark family keeps a four-dimensional kernel off the slice") {
  HamiltonianFamily family = dark_family_full(1.0, 1.0);
  ParameterPoint p{{"theta1", 0.3}, {"theta2", 0.7}, {"theta3", 0.5}, {"theta4", 1.2},
                   {"phi2", 0.1},   {"phi3", 0.4},   {"phi4", 0.8},   {"phi5", 0.2}};
  Matrix h = family.eval(p);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  int zero_modes = 0;
  for (int i = 0; i < 6; ++i)
    if (std::abs(es.eigenvalues()(i)) < 1e-10) ++zero_modes;
  CHECK(zero_modes == 4);
  // gradients exist in every direction
  for (const auto& [name, _] : p.coords()) {
    Matrix g = eval_gradient(family, p, name).matrix();
    CHECK(std::isfinite(max_abs(g)));
  }
}

TEST_CASE("restricted dark family is the full family on its slice") {
  HamiltonianFamily restricted = dark_family_restricted(0.9, 1.4);
  HamiltonianFamily full = dark_family_full(0.9, 1.4);
  ParameterPoint slice{{"theta3", 0.8}, {"theta4", 0.3}};
  ParameterPoint lifted{{"theta1", 0.0}, {"theta2", 0.0}, {"theta3", 0.8}, {"theta4", 0.3},
                        {"phi2", 0.0},   {"phi3", 0.0},   {"phi4", 0.0},   {"phi5", 0.0}};
  CHECK(max_abs(Matrix(restricted.eval(slice) - full.eval(lifted))) < 1e-14);
}

TEST_CASE("family registry: catalog, construction, errors") {
  auto catalog = family_catalog();
  REQUIRE(catalog.size() == 3);
  CHECK(catalog[0].first == "two_level");

  HamiltonianFamily f = make_family("dark_5p1_restricted", {{"epsilon", 2.0}, {"omega", 0.5}});
  CHECK(f.has_param("theta3"));

  CHECK_THROWS_WITH_AS(make_family("three_level", {}),
                       doctest::Contains("two_level"), InvalidInput);
  CHECK_THROWS_AS(make_family("two_level", {{"epsilon", 1.0}}), InvalidInput);
  CHECK_THROWS_AS(make_family("dark_5p1_restricted", {{"epsilon", 1.0}, {"bogus", 1.0}}),
                  InvalidInput);
}

TEST_CASE("hermitian guard and parameter points reject bad input") {
  Matrix bad(2, 2);
  bad << Complex(0, 0), Complex(1, 0), Complex(0, 0), Complex(0, 0);
  CHECK_THROWS_AS(HermitianOperator{bad}, InvalidInput);

  ParameterPoint p{{"a", 1.0}};
  CHECK_THROWS_AS(p.set("a", 2.0), InvalidInput);
  CHECK_THROWS_AS(p.set("b", std::nan("")), InvalidInput);
  CHECK_THROWS_AS(p.value("missing"), InvalidInput);
  ParameterPoint q = p.with("a", 5.0);
  CHECK(q.value("a") == 5.0);
  CHECK(p.value("a") == 1.0);
  p.assign("a", 3.0);
  CHECK(p.value("a") == 3.0);
  CHECK_THROWS_AS(p.assign("zz", 1.0), InvalidInput);
}
