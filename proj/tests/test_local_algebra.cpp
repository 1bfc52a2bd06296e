#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <complex>

#include "rotor/local_algebra.hpp"

using namespace rotor;

TEST_CASE("charge operator is the ascending charge diagonal") {
  LocalOperator n1 = charge_operator(1);
  REQUIRE(n1.mat.rows() == 3);
  CHECK(n1.mat(0, 0) == cplx(-1, 0));
  CHECK(n1.mat(1, 1) == cplx(0, 0));
  CHECK(n1.mat(2, 2) == cplx(1, 0));
  CHECK(n1.mat.cwiseAbs().sum() == doctest::Approx(2.0));  // off-diagonals vanish

  for (int n_max : {1, 2, 3, 5, 8}) {
    LocalOperator n = charge_operator(n_max);
    CHECK(std::abs(n.mat.trace()) == doctest::Approx(0.0));
    CHECK(n.is_hermitian());
    // Spectrum of a diagonal matrix is its diagonal: -n_max..n_max.
    for (int i = 0; i < n.mat.rows(); ++i) {
      CHECK(n.mat(i, i).real() == doctest::Approx(i - n_max));
    }
  }
}

TEST_CASE("phase raise operator shifts charge by a") {
  LocalOperator e = phase_raise_operator(1, 1);
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(3, 3);
  expected(1, 0) = 1.0;
  expected(2, 1) = 1.0;
  CHECK((e.mat - expected).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("charge commutator [n, E_a] = a E_a holds exactly under truncation") {
  for (int n_max = 1; n_max <= 4; ++n_max) {
    LocalOperator n = charge_operator(n_max);
    for (int a = 1; a <= 2 * n_max; ++a) {
      LocalOperator e = phase_raise_operator(n_max, a);
      Eigen::MatrixXcd comm = n.mat * e.mat - e.mat * n.mat;
      // Integer matrix entries: the identity is exact, not approximate.
      CHECK((comm - double(a) * e.mat).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("two unit raises compose to a double raise") {
  for (int n_max : {1, 2, 4}) {
    LocalOperator e1 = phase_raise_operator(n_max, 1);
    LocalOperator sq = e1 * e1;
    if (2 <= 2 * n_max) {
      LocalOperator e2 = phase_raise_operator(n_max, 2);
      CHECK((sq.mat - e2.mat).cwiseAbs().maxCoeff() == 0.0);
    } else {
      CHECK(sq.mat.cwiseAbs().maxCoeff() == 0.0);  // raised out of the cut
    }
  }
}

TEST_CASE("cos(a phi) is the symmetrised half-sum") {
  LocalOperator c = cos_phase_operator(2, 1);
  CHECK(c.is_hermitian());
  for (int i = 0; i + 1 < 5; ++i) {
    CHECK(c.mat(i + 1, i) == cplx(0.5, 0));
    CHECK(c.mat(i, i + 1) == cplx(0.5, 0));
  }
  CHECK(c.mat.diagonal().cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("cos(phi) top eigenvalue approaches 1 as the cut grows") {
  double prev = -1.0;
  for (int n_max : {1, 2, 4, 8}) {
    LocalOperator c = cos_phase_operator(n_max, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c.mat);
    const double top = es.eigenvalues().maxCoeff();
    CHECK(top > prev);   // monotone approach from below
    CHECK(top < 1.0);
    prev = top;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(0.05));  // n_max = 8 close to 1
}

TEST_CASE("parity factor squares to identity and grades the raises") {
  LocalOperator p1 = parity_factor(1);
  CHECK(p1.mat(0, 0) == cplx(-1, 0));
  CHECK(p1.mat(1, 1) == cplx(1, 0));
  CHECK(p1.mat(2, 2) == cplx(-1, 0));

  for (int n_max : {1, 2, 3, 4}) {
    LocalOperator p = parity_factor(n_max);
    LocalOperator id = identity_operator(n_max);
    CHECK(((p * p).mat - id.mat).cwiseAbs().maxCoeff() == 0.0);
    // P E_a P = (-1)^a E_a: odd raises anticommute with parity.
    for (int a = 1; a <= std::min(2 * n_max, 3); ++a) {
      LocalOperator e = phase_raise_operator(n_max, a);
      const double sign = (a % 2 == 0) ? 1.0 : -1.0;
      CHECK(((p * e * p).mat - sign * e.mat).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("construction rejects bad arguments") {
  CHECK_THROWS_AS(LocalBasis(0), std::invalid_argument);
  CHECK_THROWS_AS(charge_operator(0), std::invalid_argument);
  CHECK_THROWS_AS(phase_raise_operator(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(phase_raise_operator(2, 5), std::invalid_argument);
  // Matrix size must match the basis dimension.
  CHECK_THROWS_AS(LocalOperator(LocalBasis(2), "bad", Eigen::MatrixXcd::Zero(3, 3)),
                  std::invalid_argument);
  // Operators from different truncations do not compose.
  CHECK_THROWS_AS(charge_operator(1) * charge_operator(2), std::invalid_argument);
}
