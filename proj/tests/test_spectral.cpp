// Eigendecomposition with degeneracy bookkeeping, gauge alignment, subspace
// selection, and frame transport along parameter paths.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "holonomy/spectral.hpp"

#include <cmath>

using namespace holonomy;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kTwoPi = 2.0 * kPi;

// Hermitian matrix with a prescribed spectrum via a fixed random-ish unitary.
Matrix with_spectrum(const std::vector<double>& evs) {
  const int n = static_cast<int>(evs.size());
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = Complex(std::sin(1.0 + 3.0 * i + j), std::cos(2.0 + i - 2.0 * j));
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Matrix d = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = evs[i];
  return q * d * q.adjoint();
}

Matrix projector(const Matrix& frame) { return frame * frame.adjoint(); }

}  // namespace

TEST_CASE("decompose: ascending spectrum, orthonormal frame, degeneracy groups") {
  HermitianOperator h(with_spectrum({-1.0, 2.0, 2.0, 5.0}));
  EigenFrame frame = decompose(h);
  REQUIRE(frame.eigenvalues.size() == 4);
  CHECK(frame.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(frame.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(frame.eigenvalues(2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(frame.eigenvalues(3) == doctest::Approx(5.0).epsilon(1e-12));
  for (std::size_t k = 0; k + 1 < 4; ++k)
    CHECK(frame.eigenvalues(k) <= frame.eigenvalues(k + 1));

  CHECK(max_abs(Matrix(frame.eigenvectors.adjoint() * frame.eigenvectors -
                       Matrix::Identity(4, 4))) < 1e-13);
  // reconstruct H from the frame
  Matrix d = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) d(i, i) = frame.eigenvalues(i);
  CHECK(max_abs(Matrix(frame.eigenvectors * d * frame.eigenvectors.adjoint() - h.matrix())) <
        1e-12);

  REQUIRE(frame.groups.size() == 3);
  CHECK(frame.groups[0] == std::vector<int>{0});
  CHECK(frame.groups[1] == std::vector<int>{1, 2});
  CHECK(frame.groups[2] == std::vector<int>{3});
}

TEST_CASE("decompose: tau_deg chains near-degenerate clusters") {
  HermitianOperator h(with_spectrum({0.0, 1.0, 1.0 + 5e-9, 3.0}));
  EigenFrame tight = decompose(h, 1e-12);
  CHECK(tight.groups.size() == 4);
  EigenFrame loose = decompose(h, 1e-6);
  REQUIRE(loose.groups.size() == 3);
  CHECK(loose.groups[1] == std::vector<int>{1, 2});
}

TEST_CASE("kernel_basis spans exactly the near-zero eigenspace") {
  HermitianOperator h(with_spectrum({-2.0, 0.0, 0.0, 1.0}));
  Matrix k = kernel_basis(h);
  REQUIRE(k.cols() == 2);
  CHECK(max_abs(Matrix(h.matrix() * k)) < 1e-12);
  CHECK(max_abs(Matrix(k.adjoint() * k - Matrix::Identity(2, 2))) < 1e-13);

  HermitianOperator gapped(with_spectrum({-2.0, 1.0, 3.0, 4.0}));
  CHECK(kernel_basis(gapped).cols() == 0);
}

TEST_CASE("kernel_basis projector matches the dark manifold") {
  HamiltonianFamily family = dark_family_restricted(1.0, 1.0);
  ParameterPoint p{{"theta3", 0.7}, {"theta4", 1.2}};
  Matrix k = kernel_basis(eval_hamiltonian(family, p));
  REQUIRE(k.cols() == 4);
  auto dark = dark_states(0.7, 1.2);
  Matrix d(6, 4);
  for (int i = 0; i < 4; ++i) d.col(i) = dark[i];
  CHECK(max_abs(Matrix(projector(k) - projector(d))) < 1e-12);
}

TEST_CASE("align_phase: positive real overlap, idempotent, orthogonal errors") {
  Vector ref(2), v(2);
  ref << Complex(1, 0), Complex(0, 0);
  v << std::polar(0.8, 2.1), std::polar(0.6, -0.4);
  Vector a = align_phase(ref, v);
  const Complex o = ref.dot(a);
  CHECK(o.imag() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(o.real() > 0.0);
  CHECK(std::abs(a.norm() - v.norm()) < 1e-15);
  Vector again = align_phase(ref, a);
  CHECK((again - a).norm() == 0.0);

  Vector orth(2);
  orth << Complex(0, 0), Complex(1, 0);
  CHECK_THROWS_AS(align_phase(ref, orth), NumericalError);
}

TEST_CASE("align_subspace: Hermitian positive overlap, rank-deficiency errors") {
  Matrix ref(4, 2), basis(4, 2);
  ref.setZero();
  ref(0, 0) = 1;
  ref(1, 1) = 1;
  // the same plane, rotated and rephased inside itself
  basis.setZero();
  basis(0, 0) = std::polar(1.0, 0.3) * std::cos(0.5);
  basis(1, 0) = std::polar(1.0, 0.3) * std::sin(0.5);
  basis(0, 1) = -std::polar(1.0, -1.1) * std::sin(0.5);
  basis(1, 1) = std::polar(1.0, -1.1) * std::cos(0.5);
  Matrix aligned = align_subspace(ref, basis);
  CHECK(max_abs(Matrix(projector(aligned) - projector(basis))) < 1e-13);
  Matrix overlap = ref.adjoint() * aligned;
  CHECK(max_abs(Matrix(overlap - overlap.adjoint())) < 1e-13);
  Eigen::SelfAdjointEigenSolver<Matrix> es(overlap);
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  Matrix bad(4, 2);  // second column orthogonal to the reference plane
  bad.setZero();
  bad(0, 0) = 1;
  bad(2, 1) = 1;
  CHECK_THROWS_AS(align_subspace(ref, bad), NumericalError);
}

TEST_CASE("selectors resolve against the grouped spectrum") {
  HermitianOperator h(with_spectrum({-1.0, 0.0, 0.0, 2.0}));
  EigenFrame frame = decompose(h);
  CHECK(SubspaceSelector::lowest().resolve(frame, 1e-8) == std::vector<int>{0});
  CHECK(SubspaceSelector::kernel().resolve(frame, 1e-8) == std::vector<int>{1, 2});
  CHECK(SubspaceSelector::index_range(1, 2).resolve(frame, 1e-8) == std::vector<int>{1, 2});
  CHECK(SubspaceSelector::energy_window(1.5, 2.5).resolve(frame, 1e-8) == std::vector<int>{3});
  CHECK(!SubspaceSelector::kernel().describe().empty());

  CHECK_THROWS_AS(SubspaceSelector::index_range(2, 5).resolve(frame, 1e-8), InvalidInput);
  // empty matches resolve to nothing; frame_path turns that into an error below
  CHECK(SubspaceSelector::energy_window(5.0, 6.0).resolve(frame, 1e-8).empty());
  HermitianOperator gapped(with_spectrum({-2.0, 1.0, 3.0, 4.0}));
  CHECK(SubspaceSelector::kernel().resolve(decompose(gapped), 1e-8).empty());

  HamiltonianFamily family = two_level_family();
  ParamPath path = ParamPath::sweep(ParameterPoint{{"r", 1.0}, {"phi", 0.0}}, "phi", 0.0, 1.0,
                                    10, false);
  CHECK_THROWS_WITH_AS(frame_path(family, path, SubspaceSelector::kernel()),
                       doctest::Contains("matched no eigenvalues"), InvalidInput);
}

TEST_CASE("frame_path: two-level real-gauge transport flips sign on one turn") {
  HamiltonianFamily family = two_level_family();
  ParamPath loop = ParamPath::sweep(ParameterPoint{{"r", 1.0}, {"phi", 0.0}}, "phi", 0.0, kTwoPi,
                                    2000, true, kTwoPi);
  FramePathResult res = frame_path(family, loop, SubspaceSelector::lowest());
  REQUIRE(res.closed);
  CHECK(std::abs(res.closure_phase() - Complex(-1.0, 0.0)) < 1e-6);
  CHECK(res.bases.size() == loop.waypoints().size());
  CHECK(res.eigenvalues.front()(0) == doctest::Approx(-1.0).epsilon(1e-12));
  // one alignment factor per step, each a unit-modulus phase (the raw solver
  // gauge is arbitrary, so individual factors may sit anywhere on the circle)
  REQUIRE(res.gauge_log.size() == res.bases.size() - 1);
  double worst = 0.0;
  for (const Matrix& g : res.gauge_log) {
    REQUIRE(g.rows() == 1);
    worst = std::max(worst, std::abs(std::abs(g(0, 0)) - 1.0));
  }
  CHECK(worst < 1e-12);
  // the aligned frame itself drifts smoothly: consecutive bases stay close
  double step_gap = 0.0;
  for (std::size_t i = 0; i + 1 < res.bases.size(); ++i)
    step_gap = std::max(step_gap, (res.bases[i + 1] - res.bases[i]).norm());
  CHECK(step_gap < 0.01);
}

TEST_CASE("single_valued_correction: periodic gauge carries connection 1/2") {
  HamiltonianFamily family = two_level_family();
  ParamPath loop = ParamPath::sweep(ParameterPoint{{"r", 1.0}, {"phi", 0.0}}, "phi", 0.0, kTwoPi,
                                    2000, true, kTwoPi);
  FramePathResult res = frame_path(family, loop, SubspaceSelector::lowest());
  SingleValuedCorrection corr = single_valued_correction(res, "phi");
  REQUIRE(corr.induced_connection.rows() == 1);
  CHECK(corr.induced_connection(0, 0).real() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(corr.induced_connection(0, 0).imag() == doctest::Approx(0.0).epsilon(1e-12));
  // corrected frame is exactly periodic
  CHECK((corr.bases.front() - corr.bases.back()).norm() < 1e-12);
  // exp(-i * loop integral) reproduces the transported closure (1 x 1 here)
  REQUIRE(corr.loop_integral.rows() == 1);
  const Complex expected = std::exp(Complex(0, -1) * corr.loop_integral(0, 0));
  CHECK(std::abs(expected - res.closure(0, 0)) < 1e-6);
}

TEST_CASE("frame_path: kernel transport around the gate rectangle is unitary") {
  HamiltonianFamily family = dark_family_restricted(1.0, 1.0);
  ParamPath loop = ParamPath::rectangle(ParameterPoint{{"theta3", 0.0}, {"theta4", 0.0}},
                                        "theta3", 0.0, kPi / 2, "theta4", 0.0, kPi / 2, 400);
  FramePathResult res = frame_path(family, loop, SubspaceSelector::kernel());
  REQUIRE(res.closed);
  REQUIRE(res.closure.rows() == 4);
  CHECK(max_abs(Matrix(res.closure.adjoint() * res.closure - Matrix::Identity(4, 4))) < 1e-8);
}

TEST_CASE("frame_path errors when the tracked group changes dimension") {
  // levels cross at x = 0.5: lowest eigenvalue group becomes degenerate
  HamiltonianFamily family;
  family.id = "crossing";
  family.dim = 2;
  family.schema = {{"x", 0.0}};
  family.eval = [](const ParameterPoint& p) {
    const double x = p.value("x");
    Matrix h(2, 2);
    h << x, 0.0, 0.0, 1.0 - x;
    return h;
  };
  ParamPath path = ParamPath::sweep(ParameterPoint{{"x", 0.0}}, "x", 0.0, 1.0, 100, false);
  CHECK_THROWS_WITH_AS(frame_path(family, path, SubspaceSelector::lowest()),
                       doctest::Contains("step"), NumericalError);
}

TEST_CASE("frame_path respects a caller-supplied initial frame") {
  HamiltonianFamily family = dark_family_restricted(1.0, 1.0);
  ParamPath loop = ParamPath::rectangle(ParameterPoint{{"theta3", 0.0}, {"theta4", 0.0}},
                                        "theta3", 0.0, kPi / 2, "theta4", 0.0, kPi / 2, 300);
  auto dark = dark_states(0.0, 0.0);
  Matrix init(6, 4);
  for (int i = 0; i < 4; ++i) init.col(i) = dark[i];

  FramePathOptions opts;
  opts.initial_frame = init;
  FramePathResult res = frame_path(family, loop, SubspaceSelector::kernel(), opts);
  CHECK(max_abs(Matrix(res.bases.front() - init)) < 1e-12);

  // a frame that does not span the selected subspace is rejected
  Matrix wrong = Matrix::Identity(6, 4);
  FramePathOptions bad;
  bad.initial_frame = wrong;
  CHECK_THROWS_AS(frame_path(family, loop, SubspaceSelector::kernel(), bad), InvalidInput);
}
