// Connection coefficients, curvatures, and gauge transformations: abelian
// single-state sections, the non-abelian dark-manifold frame, and covariance
// of the field strength.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "holonomy/connection.hpp"
#include "holonomy/model.hpp"
#include "holonomy/transport.hpp"

using namespace holonomy;

namespace {

constexpr double kPi = 3.14159265358979323846;

ParameterPoint tl_point(double r, double phi) { return ParameterPoint{{"r", r}, {"phi", phi}}; }

ParameterPoint dark_point(double t3, double t4) {
  return ParameterPoint{{"theta3", t3}, {"theta4", t4}};
}

}  // namespace

TEST_CASE("berry_connection: single-valued lower section carries A_phi = 1/2") {
  StateSection sec = two_level_lower_single_valued();
  for (double phi : {0.0, 0.7, 2.0, 4.5}) {
    const ParameterPoint p = tl_point(1.3, phi);
    CHECK(berry_connection(sec, p, "phi") == doctest::Approx(0.5).epsilon(1e-10));
    // analytic and finite-difference evaluations agree
    const double fd = berry_connection(sec, p, "phi", GradientMethod::finite_difference, 1e-6);
    CHECK(fd == doctest::Approx(0.5).epsilon(1e-7));
    // the section does not move with r
    CHECK(std::abs(berry_connection(sec, p, "r")) < 1e-10);
  }
}

TEST_CASE("berry_connection: real gauges have vanishing connection") {
  for (StateSection sec : {two_level_lower_real(), two_level_upper_real()}) {
    for (double phi : {0.1, 1.9, 5.2}) {
      const ParameterPoint p = tl_point(0.8, phi);
      CHECK(std::abs(berry_connection(sec, p, "phi")) < 1e-10);
      CHECK(std::abs(berry_connection(sec, p, "phi", GradientMethod::finite_difference, 1e-6)) <
            1e-7);
    }
  }
}

TEST_CASE("berry_connection_raw: purely imaginary overlap i/2 in the periodic gauge") {
  StateSection sec = two_level_lower_single_valued();
  const Complex raw = berry_connection_raw(sec, tl_point(1.0, 1.1), "phi");
  CHECK(std::abs(raw.real()) < 1e-10);
  CHECK(raw.imag() == doctest::Approx(0.5).epsilon(1e-10));
  // Hermitian value = raw / i
  const double a = berry_connection(sec, tl_point(1.0, 1.1), "phi");
  CHECK(a == doctest::Approx((raw / Complex(0, 1)).real()).epsilon(1e-12));
}

TEST_CASE("berry_connection_transport_gauge: vanishes pointwise; degenerate levels rejected") {
  HamiltonianFamily family = two_level_family();
  for (double phi : {0.3, 2.2}) {
    const double a =
        berry_connection_transport_gauge(family, tl_point(1.0, phi), 0, "phi");
    CHECK(std::abs(a) < 1e-6);  // alignment kills the tangential phase by construction
  }
  // the dark manifold is 4-fold degenerate: transport gauge needs a unique level
  HamiltonianFamily lambda = dark_family_restricted(1.0, 1.0);
  CHECK_THROWS_WITH_AS(berry_connection_transport_gauge(lambda, dark_point(0.4, 0.3), 1, "theta3"),
                       doctest::Contains("degenerate"), InvalidInput);
}

TEST_CASE("wz_connection: dark-frame entries match the closed-form pattern") {
  BasisSection dark = dark_section();
  const double t3 = 0.6, t4 = 0.9;
  const ParameterPoint p = dark_point(t3, t4);

  const Matrix a3 = wz_connection(dark, p, "theta3");
  const Matrix a4 = wz_connection(dark, p, "theta4");
  REQUIRE(a3.rows() == 4);
  REQUIRE(a4.rows() == 4);

  // only the (D3, D4) block of the theta4 component is nonzero
  CHECK(std::abs(a4(2, 3) - Complex(-std::sin(t3), 0.0)) < 1e-10);
  CHECK(std::abs(a4(3, 2) - Complex(std::sin(t3), 0.0)) < 1e-10);
  CHECK(std::abs(a3(2, 2)) < 1e-10);
  CHECK(std::abs(a3(3, 2)) < 1e-10);
  CHECK(std::abs(a4(2, 2)) < 1e-10);
  CHECK(std::abs(a4(3, 3)) < 1e-10);
  CHECK(max_abs(a3) < 1e-10);  // the theta3 component vanishes entirely

  // raw convention is anti-Hermitian
  CHECK(max_abs(Matrix(a4 + a4.adjoint())) < 1e-10);

  // finite differences reproduce the analytic derivative route
  const Matrix a4_fd = wz_connection(dark, p, "theta4", GradientMethod::finite_difference, 1e-6);
  CHECK(max_abs(Matrix(a4 - a4_fd)) < 1e-7);
}

TEST_CASE("wz_connection: family-checked overload accepts the dark frame") {
  HamiltonianFamily lambda = dark_family_restricted(1.0, 1.0);
  BasisSection dark = dark_section();
  const ParameterPoint p = dark_point(0.5, 0.8);
  const Matrix checked = wz_connection(lambda, dark, p, "theta4");
  const Matrix unchecked = wz_connection(dark, p, "theta4");
  CHECK(max_abs(Matrix(checked - unchecked)) < 1e-12);
}

TEST_CASE("wz_connection: frame outside an invariant subspace is rejected") {
  HamiltonianFamily lambda = dark_family_restricted(1.0, 1.0);
  // a frame mixing dark states with the (bright) excited direction
  BasisSection bad;
  bad.dim = 6;
  bad.k = 2;
  bad.eval = [](const ParameterPoint& p) {
    auto d = dark_states(p.value("theta3"), p.value("theta4"));
    Vector excited = Vector::Zero(6);
    excited(0) = 1.0;
    return std::vector<Vector>{d[0], excited};
  };
  CHECK_THROWS_AS(wz_connection(lambda, bad, dark_point(0.5, 0.8), "theta4"), InvalidInput);
}

TEST_CASE("wz_connection: non-orthonormal frame is rejected") {
  BasisSection bad;
  bad.dim = 6;
  bad.k = 2;
  bad.eval = [](const ParameterPoint& p) {
    auto d = dark_states(p.value("theta3"), p.value("theta4"));
    return std::vector<Vector>{d[0], Vector(0.5 * d[1])};  // second vector not unit
  };
  CHECK_THROWS_AS(wz_connection(bad, dark_point(0.4, 0.2), "theta4"), InvalidInput);
}

TEST_CASE("wz_connection_hermitian: equals raw divided by i") {
  BasisSection dark = dark_section();
  const ParameterPoint p = dark_point(0.7, 1.1);
  const Matrix raw = wz_connection(dark, p, "theta4");
  const Matrix herm = wz_connection_hermitian(dark, p, "theta4");
  CHECK(max_abs(Matrix(herm - raw / Complex(0, 1))) < 1e-12);
  CHECK(max_abs(Matrix(herm - herm.adjoint())) < 1e-10);  // Hermitian convention
}

TEST_CASE("berry_field / wz_field: field views sample the pointwise values") {
  StateSection sec = two_level_lower_single_valued();
  AbelianField af = berry_field(sec);
  const ParameterPoint p = tl_point(1.0, 0.9);
  CHECK(af.component(p, "phi") == doctest::Approx(berry_connection(sec, p, "phi")).epsilon(1e-14));
  CHECK(!af.singular_distance);  // sections declare no singular locus

  BasisSection dark = dark_section();
  MatrixField mf = wz_field(dark);
  REQUIRE(mf.dim == 4);
  const ParameterPoint q = dark_point(0.6, 0.9);
  CHECK(max_abs(Matrix(mf.component(q, "theta4") - wz_connection_hermitian(dark, q, "theta4"))) <
        1e-12);
}

TEST_CASE("curvature_abelian: flux-line field is flat away from the origin") {
  AbelianField a = ab_solenoid_field(2.5);
  for (auto [x, y] : {std::pair{1.0, 0.0}, std::pair{0.4, -0.7}, std::pair{-1.2, 0.5}}) {
    const ParameterPoint p{{"x", x}, {"y", y}};
    CHECK(std::abs(curvature_abelian(a, p, "x", "y", 1e-5)) < 1e-5);
  }
}

TEST_CASE("curvature_abelian: antisymmetric in its indices") {
  AbelianField a = ab_solenoid_field(1.0);
  const ParameterPoint p{{"x", 0.8}, {"y", 0.3}};
  const double fxy = curvature_abelian(a, p, "x", "y", 1e-5);
  const double fyx = curvature_abelian(a, p, "y", "x", 1e-5);
  CHECK(fxy == doctest::Approx(-fyx).epsilon(1e-10));
}

TEST_CASE("gauge_transform_abelian: closed-loop integral is gauge invariant") {
  AbelianField a = ab_solenoid_field(2.0);
  AbelianField shifted = gauge_transform_abelian(
      a, [](const ParameterPoint& p) { return 0.3 * p.value("x") * p.value("x") - 0.7 * p.value("y"); },
      1e-5);
  ParamPath loop =
      ParamPath::circle(ParameterPoint{{"x", 0.0}, {"y", 0.0}}, "x", "y", 0.0, 0.0, 1.0, 4000);
  const double before = line_integral_abelian(a, loop);
  const double after = line_integral_abelian(shifted, loop);
  CHECK(before == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(after == doctest::Approx(before).epsilon(1e-5));
  // pointwise the components differ: the shift is a genuine transformation
  const ParameterPoint p{{"x", 0.9}, {"y", 0.2}};
  CHECK(std::abs(shifted.component(p, "x") - a.component(p, "x")) > 1e-3);
}

TEST_CASE("curvature_nonabelian: commuting matrix field reduces to the abelian formula") {
  // A_m = a_m * I inherits the abelian curvature; the commutator term dies.
  AbelianField base = ab_solenoid_field(1.7);
  MatrixField mf;
  mf.dim = 2;
  mf.component = [base](const ParameterPoint& p, std::string_view dir) {
    return Matrix(base.component(p, dir) * Matrix::Identity(2, 2));
  };
  const ParameterPoint p{{"x", 0.7}, {"y", -0.4}};
  const Matrix f = curvature_nonabelian(mf, p, "x", "y", 2.0, 1e-5);
  const double f_ab = curvature_abelian(base, p, "x", "y", 1e-5);
  CHECK(max_abs(Matrix(f - f_ab * Matrix::Identity(2, 2))) < 1e-8);
}

TEST_CASE("curvature_nonabelian: commutator term present for a non-commuting field") {
  // constant field A_x = sigma1, A_y = sigma2: derivatives vanish and
  // F_xy = i g [A_x, A_y] = i g * 2i sigma3 = -2 g sigma3.
  MatrixField mf;
  mf.dim = 2;
  mf.component = [](const ParameterPoint&, std::string_view dir) {
    return dir == "x" ? sigma1() : sigma2();
  };
  const double g = 0.6;
  const ParameterPoint p{{"x", 0.0}, {"y", 0.0}};
  const Matrix f = curvature_nonabelian(mf, p, "x", "y", g, 1e-4);
  CHECK(max_abs(Matrix(f + 2.0 * g * sigma3())) < 1e-8);
}

TEST_CASE("gauge_transform_nonabelian: curvature transforms covariantly") {
  MatrixField mf;
  mf.dim = 2;
  mf.component = [](const ParameterPoint& p, std::string_view dir) {
    const double x = p.value("x"), y = p.value("y");
    return dir == "x" ? Matrix(y * sigma1() + 0.3 * sigma3()) : Matrix(x * sigma2());
  };
  auto s = [](const ParameterPoint& p) {
    const double t = 0.4 * p.value("x") - 0.2 * p.value("y");
    Matrix u(2, 2);
    u << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return u;
  };
  const ParameterPoint p{{"x", 0.5}, {"y", -0.3}};
  const double res = curvature_covariance_residual(mf, s, 1.3, p, "x", "y", 1e-4);
  CHECK(res < 1e-6);
}

TEST_CASE("gauge_transform_nonabelian: non-unitary transformation is rejected") {
  MatrixField mf;
  mf.dim = 2;
  mf.component = [](const ParameterPoint&, std::string_view) { return sigma3(); };
  MatrixField bad = gauge_transform_nonabelian(
      mf, [](const ParameterPoint&) { return Matrix(2.0 * Matrix::Identity(2, 2)); }, 1.0);
  CHECK_THROWS_AS(bad.component(ParameterPoint{{"x", 0.0}, {"y", 0.0}}, "x"), InvalidInput);
  CHECK_THROWS_AS(
      gauge_transform_nonabelian(mf, [](const ParameterPoint&) { return sigma3(); }, 0.0),
      InvalidInput);
}

TEST_CASE("dark gate frame: theta4 connection is -sin(theta3) * sigma1 on the gate block") {
  BasisSection gate = dark_gate_section();
  const double t3 = 0.75;
  const ParameterPoint p = dark_point(t3, 0.4);
  const Matrix a4 = wz_connection_hermitian(gate, p, "theta4");
  REQUIRE(a4.rows() == 4);
  // Hermitian convention: block entries (2,3) and (3,2) both -sin(theta3)
  CHECK(std::abs(a4(2, 3) - Complex(-std::sin(t3), 0.0)) < 1e-10);
  CHECK(std::abs(a4(3, 2) - Complex(-std::sin(t3), 0.0)) < 1e-10);
  CHECK(std::abs(a4(0, 0)) < 1e-10);
  CHECK(std::abs(a4(1, 1)) < 1e-10);
  CHECK(max_abs(wz_connection_hermitian(gate, p, "theta3")) < 1e-10);
}

TEST_CASE("connection loop integral around the two-level cone matches the holonomy phase") {
  // sanity closure: integrating A_phi = 1/2 over one turn gives pi, and the
  // transported loop unitary is exp(-i pi) = -1.
  StateSection sec = two_level_lower_single_valued();
  AbelianField a = berry_field(sec);
  ParamPath loop = ParamPath::sweep(tl_point(1.0, 0.0), "phi", 0.0, 2.0 * kPi, 256, true,
                                    2.0 * kPi);
  const double integral = line_integral_abelian(a, loop);
  CHECK(integral == doctest::Approx(kPi).epsilon(1e-9));
  HolonomyResult hol = holonomy_by_transport(two_level_family(), loop,
                                             SubspaceSelector::lowest());
  CHECK(std::abs(hol.loop_unitary(0, 0) - std::exp(Complex(0, -1) * integral)) < 1e-4);
}
