#include <doctest.h>

#include "oracles.hpp"
#include "qdent/quantum_core.hpp"

using namespace qdent;

namespace {

bool approx_vec(const JonesVector& v, Complex h, Complex vv, double tol = 1e-12) {
  return std::abs(v[0] - h) < tol && std::abs(v[1] - vv) < tol;
}

}  // namespace

TEST_CASE("basis states follow the fixed convention") {
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(approx_vec(basis_state(Polarization::H), 1.0, 0.0));
  CHECK(approx_vec(basis_state(Polarization::V), 0.0, 1.0));
  CHECK(approx_vec(basis_state(Polarization::D), r, r));
  CHECK(approx_vec(basis_state(Polarization::A), r, -r));
  CHECK(approx_vec(basis_state(Polarization::R), r, Complex(0, -r)));
  CHECK(approx_vec(basis_state(Polarization::L), r, Complex(0, r)));
  CHECK_THROWS_AS(basis_state('X'), InvalidInput);
}

TEST_CASE("basis pairs are orthonormal") {
  const char pairs[3][2] = {{'H', 'V'}, {'D', 'A'}, {'R', 'L'}};
  for (const auto& p : pairs) {
    const auto a = basis_state(p[0]);
    const auto b = basis_state(p[1]);
    CHECK(std::abs(a.inner(a) - 1.0) < 1e-12);
    CHECK(std::abs(b.inner(b) - 1.0) < 1e-12);
    CHECK(std::abs(a.inner(b)) < 1e-12);
  }
}

TEST_CASE("target state has no RR or LL coincidences") {
  const Vector4 psi = bell_phi_plus();
  for (char c : {'R', 'L'}) {
    const Vector4 cc = kron(basis_state(c), basis_state(c));
    CHECK(std::abs(cc.dot(psi)) < 1e-15);
  }
}

TEST_CASE("Jones vectors normalize on construction") {
  JonesVector v(Complex(3, 0), Complex(0, 4));
  CHECK(std::abs(v.vector().norm() - 1.0) < 1e-12);
  CHECK_THROWS_AS(JonesVector(0.0, 0.0), InvalidInput);
  CHECK(v.same_state(JonesVector(Complex(0, 3), Complex(-4, 0))));
}

TEST_CASE("waveplate examples") {
  CHECK((waveplate_operator(Degrees{0}, 0.0) - Operator2::Identity()).norm() < 1e-15);

  const Eigen::Vector2cd h(1.0, 0.0);
  const JonesVector out_hwp(waveplate_operator(Degrees{22.5}, 0.5) * h);
  CHECK(out_hwp.same_state(basis_state('D')));

  const JonesVector out_qwp(waveplate_operator(Degrees{45}, 0.25) * h);
  const double overlap = std::abs(basis_state('R').inner(out_qwp));
  CHECK((overlap < 1e-12 || std::abs(overlap - 1.0) < 1e-12));
  CHECK_THROWS_AS(waveplate_operator(Degrees{0}, -0.1), InvalidInput);
}

TEST_CASE("waveplate matches the rotated-retarder oracle and stays unitary") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-180.0, 180.0), delta(0.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double th = angle(rng), d = delta(rng);
    const Operator2 u = waveplate_operator(Degrees{th}, d);
    const auto ref = oracle::retarder(th, d);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(u(i, j) - ref[i][j]) < 1e-12);
    CHECK(is_unitary(u));
    CHECK(((u.adjoint() * u) - Operator2::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("eig_hermitian simple cases") {
  const auto mixed = eig_hermitian(0.25 * Operator4::Identity());
  for (int i = 0; i < 4; ++i) CHECK(mixed.values(i) == doctest::Approx(0.25).epsilon(1e-14));

  const Vector4 psi = bell_phi_plus();
  const auto bell = eig_hermitian(psi * psi.adjoint());
  CHECK(bell.values(0) == doctest::Approx(1.0));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(bell.values(i)) < 1e-14);

  Operator4 bad = Operator4::Zero();
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(eig_hermitian(bad), InvalidInput);
}

TEST_CASE("eig_hermitian agrees with the characteristic polynomial oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Operator4 m = oracle::random_hermitian(rng);
    const auto e = eig_hermitian(m);
    const auto roots = oracle::hermitian_eigenvalues_bisection(oracle::from_eigen(m));
    REQUIRE(roots.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(e.values(i) - roots[i]) < 1e-9);
    for (int i = 0; i < 3; ++i) CHECK(e.values(i) >= e.values(i + 1));
  }
}

TEST_CASE("eig_hermitian property: orthonormal vectors reconstruct the input") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const Operator4 m = oracle::random_hermitian(rng, 1.0 + trial % 7);
    const auto e = eig_hermitian(m);
    CHECK((e.vectors.adjoint() * e.vectors - Operator4::Identity()).norm() < 1e-10);
    Operator4 rebuilt = Operator4::Zero();
    for (int i = 0; i < 4; ++i) rebuilt += e.values(i) * e.vectors.col(i) * e.vectors.col(i).adjoint();
    CHECK((rebuilt - m).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("eig_hermitian is deterministic for degenerate spectra") {
  Operator4 m = Operator4::Identity();
  m(3, 3) = 2.0;
  const auto a = eig_hermitian(m);
  const auto b = eig_hermitian(m);
  CHECK((a.vectors - b.vectors).norm() == 0.0);
  // Phase convention: first non-negligible component real and positive.
  for (int i = 0; i < 4; ++i) {
    int j = 0;
    while (std::abs(a.vectors(j, i)) < 1e-12) ++j;
    CHECK(std::abs(a.vectors(j, i).imag()) < 1e-12);
    CHECK(a.vectors(j, i).real() > 0.0);
  }
}

TEST_CASE("matrix_sqrt_psd") {
  CHECK((matrix_sqrt_psd(Operator4::Identity()) - Operator4::Identity()).norm() < 1e-12);
  Operator4 d = Operator4::Zero();
  d(0, 0) = 4.0;
  d(1, 1) = 1.0;
  Operator4 expected = Operator4::Zero();
  expected(0, 0) = 2.0;
  expected(1, 1) = 1.0;
  CHECK((matrix_sqrt_psd(d) - expected).norm() < 1e-12);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Operator4 m = oracle::random_density(rng, 1 + trial % 4) * 3.0;
    const Operator4 r = matrix_sqrt_psd(m);
    CHECK((r * r - m).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(eig_hermitian(r).values(3) > -1e-9);
  }

  Operator4 neg = Operator4::Identity();
  neg(2, 2) = -1e-3;
  CHECK_THROWS_AS(matrix_sqrt_psd(neg), InvalidInput);
  neg(2, 2) = -1e-10;
  CHECK_NOTHROW(matrix_sqrt_psd(neg));
}

TEST_CASE("density matrix validation") {
  CHECK_THROWS_AS(DensityMatrix::from_operator(Operator4::Identity()), InvalidInput);
  Operator4 m = 0.25 * Operator4::Identity();
  m(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix::from_operator(m), InvalidInput);
  Operator4 neg = Operator4::Zero();
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  CHECK_THROWS_AS(DensityMatrix::from_operator(neg), InvalidInput);
  const DensityMatrix fixed = DensityMatrix::project_to_physical(neg);
  CHECK(fixed(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(fixed(1, 1)) < 1e-12);

  Tolerances loose;
  loose.psd = 0.2;
  CHECK_NOTHROW(DensityMatrix::from_operator(neg, loose));
}

TEST_CASE("kron and trace distance") {
  const Vector4 hv = kron(basis_state('H'), basis_state('V'));
  CHECK(std::abs(hv(1) - 1.0) < 1e-15);
  const DensityMatrix a = DensityMatrix::pure(hv);
  const DensityMatrix b = DensityMatrix::pure(kron(basis_state('V'), basis_state('H')));
  CHECK(trace_distance(a.matrix(), b.matrix()) == doctest::Approx(1.0));
  CHECK(trace_distance(a.matrix(), a.matrix()) == doctest::Approx(0.0));
}
