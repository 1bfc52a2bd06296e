#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <random>
#include <vector>

#include "rotor/ed.hpp"
#include "rotor/local_algebra.hpp"
#include "rotor/mpo.hpp"

using namespace rotor;

namespace {

// Ground state of one of the quasi-degenerate sG instances used below.
ModelParams sg_instance(int L, Boundary bc = Boundary::open) {
  ModelParams p;
  p.L = L;
  p.n_max = 1;
  p.ej = 1.0;
  p.ej2 = 0.3;
  p.bc = bc;
  return p;
}

}  // namespace

TEST_CASE("decoupled sites give analytic sums of the on-site spectrum") {
  ModelParams p;
  p.L = 2;
  p.n_max = 2;
  p.ej1 = 0.4;
  p.ej2 = 0.7;
  p.eg = 0.3;

  // On-site oracle: diagonalise the 5x5 single-site term directly.
  const Eigen::MatrixXcd h1 =
      (charge_operator(2) * charge_operator(2)).mat -
      p.eg * charge_operator(2).mat - p.ej1 * cos_phase_operator(2, 1).mat -
      p.ej2 * cos_phase_operator(2, 2).mat;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h1);

  std::vector<double> sums;
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      sums.push_back(es.eigenvalues()[a] + es.eigenvalues()[b]);
    }
  }
  std::sort(sums.begin(), sums.end());

  EdOptions opt;
  opt.k = 6;
  const EdResult res = lowest_k(p, opt);
  REQUIRE(res.method == "dense");
  REQUIRE(res.converged);
  for (int i = 0; i < opt.k; ++i) {
    CHECK(res.values[i] == doctest::Approx(sums[i]).epsilon(1e-11));
  }
}

TEST_CASE("pure charging limit reproduces the two-site spectrum") {
  ModelParams p;
  p.L = 2;
  p.n_max = 1;
  EdOptions opt;
  opt.k = 9;
  const EdResult res = lowest_k(p, opt);
  const std::vector<double> expected = {0, 1, 1, 1, 1, 2, 2, 2, 2};
  for (int i = 0; i < 9; ++i) {
    CHECK(res.values[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("matrix-free apply agrees with the dense build for both boundaries") {
  std::vector<ModelParams> cases(4);
  cases[0].L = 5; cases[0].n_max = 1;
  cases[1].L = 5; cases[1].n_max = 1; cases[1].bc = Boundary::periodic;
  cases[2].L = 3; cases[2].n_max = 2; cases[2].bc = Boundary::periodic;
  cases[3].L = 2; cases[3].n_max = 3;
  for (ModelParams& p : cases) {
    p.ej = 1.7;
    p.ej1 = 0.35;
    p.ej2 = 0.8;
    p.eg = 0.2;
    p.eps = 0.25;
  }

  std::mt19937 rng(7);
  std::normal_distribution<double> gauss(0, 1);
  for (const ModelParams& p : cases) {
    CAPTURE(p.describe());
    const Eigen::MatrixXd h = dense_hamiltonian(p);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    const HamiltonianApply apply(p);
    REQUIRE(apply.dim() == h.rows());
    Eigen::VectorXd x(h.rows()), y(h.rows());
    for (long i = 0; i < x.size(); ++i) x[i] = gauss(rng);
    apply(x.data(), y.data());
    CHECK((y - h * x).cwiseAbs().maxCoeff() / x.norm() < 1e-13);
  }
}

TEST_CASE("iterative and dense diagonalisation paths agree") {
  ModelParams p;
  p.L = 4;
  p.n_max = 1;
  p.ej = 1.2;
  p.ej1 = 0.3;  // breaks parity, makes the ground state unique
  p.ej2 = 0.5;
  p.eps = 0.1;

  EdOptions dense_opt;
  dense_opt.k = 3;
  const EdResult dense = lowest_k(p, dense_opt);
  REQUIRE(dense.method == "dense");

  EdOptions iter_opt = dense_opt;
  iter_opt.dense_cutoff = 1;  // force the Lanczos path on the same instance
  const EdResult iter = lowest_k(p, iter_opt);
  REQUIRE(iter.method == "lanczos");
  REQUIRE(iter.converged);

  for (int i = 0; i < 3; ++i) {
    CHECK(iter.values[i] == doctest::Approx(dense.values[i]).epsilon(1e-10));
  }
  // Unique ground state: the two vectors agree up to phase.
  CHECK(std::abs(dense.vectors[0].dot(iter.vectors[0])) ==
        doctest::Approx(1.0).epsilon(1e-8));

  // Residual contract on the iterative path.
  const HamiltonianApply apply(p);
  Eigen::VectorXd r(apply.dim());
  apply(iter.vectors[0].data(), r.data());
  CHECK((r - iter.values[0] * iter.vectors[0]).norm() < 1e-10);
}

TEST_CASE("parity doublet splitting shrinks with chain length") {
  // ej1 = 0 keeps charge parity conserved; the two lowest states form a
  // doublet whose splitting must decrease monotonically from L=4 to L=8.
  std::vector<double> splitting;
  for (int L : {4, 6, 8}) {
    EdOptions opt;
    opt.k = 2;
    const EdResult res = lowest_k(sg_instance(L), opt);
    REQUIRE(res.converged);
    splitting.push_back(res.values[1] - res.values[0]);
  }
  CHECK(splitting[0] > splitting[1]);
  CHECK(splitting[1] > splitting[2]);
  CHECK(splitting[2] > 0.0);
}

TEST_CASE("the lowest doublet diagonalises the parity string with ±1") {
  const ModelParams p = sg_instance(8);
  EdOptions opt;
  opt.k = 2;
  const EdResult res = lowest_k(p, opt);
  REQUIRE(res.converged);

  const ProductOperator parity = build_global_parity(p.L, p.n_max);
  Eigen::Matrix2cd m;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      m(a, b) = ed_matrix_element(p, res.vectors[a], res.vectors[b], parity);
    }
  }
  // Simultaneous diagonalisation inside the doublet: the restricted parity
  // matrix has eigenvalues +1 and -1 however the quasi-degenerate pair mixes.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
  CHECK(es.eigenvalues()[0] == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(es.eigenvalues()[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("product-operator expectations: identity, parity, correlators") {
  ModelParams p;
  p.L = 8;
  p.n_max = 1;
  p.ej = 2.0;  // free-boson chain: only the hopping term
  EdOptions opt;
  const EdResult res = lowest_k(p, opt);
  REQUIRE(res.converged);
  const Eigen::VectorXd& gs = res.vectors[0];

  // Identity product operator -> exactly 1 on a normalised state.
  ProductOperator id;
  id.L = p.L;
  id.n_max = p.n_max;
  CHECK(std::abs(ed_expectation(p, gs, id) - cplx(1, 0)) < 1e-12);

  // Parity expectation of a parity eigenstate is a clean sign.
  const cplx par = ed_expectation(p, gs, build_global_parity(p.L, p.n_max));
  CHECK(std::abs(std::abs(par.real()) - 1.0) < 1e-9);
  CHECK(std::abs(par.imag()) < 1e-12);

  // <e^{i phi_j} e^{-i phi_k}> decays with separation at fixed left end.
  std::vector<double> corr;
  for (int r = 1; r <= 5; ++r) {
    ProductOperator two;
    two.L = p.L;
    two.n_max = p.n_max;
    two.factors.emplace_back(1, phase_raise_operator(p.n_max, 1));
    two.factors.emplace_back(1 + r, phase_raise_operator(p.n_max, 1).dagger());
    const cplx c = ed_expectation(p, gs, two);
    CHECK(std::abs(c.imag()) < 1e-10);
    corr.push_back(c.real());
  }
  for (int r = 0; r + 1 < 5; ++r) {
    CHECK(corr[r] > corr[r + 1]);
    CHECK(corr[r + 1] > 0.0);
  }
}

TEST_CASE("periodic and open ground energies differ by a boundary term") {
  // The difference must stay O(1) as L grows, not O(L).
  std::vector<double> diff;
  for (int L : {4, 6, 8}) {
    EdOptions opt;
    const double open_e = lowest_k(sg_instance(L), opt).values[0];
    const double per_e =
        lowest_k(sg_instance(L, Boundary::periodic), opt).values[0];
    diff.push_back(open_e - per_e);
  }
  for (double d : diff) {
    CHECK(d > 0.0);         // the open chain is missing one bond
    CHECK(d < 2.0);         // bounded by the bond energy scale, not by L
  }
  // Convergence towards an L-independent boundary energy.
  CHECK(std::abs(diff[2] - diff[1]) < std::abs(diff[1] - diff[0]) + 1e-6);
}

TEST_CASE("string energy cost is flat in d on the periodic ring") {
  // Conjugating H by a bare parity string flips the sign of exactly the two
  // boundary hopping bonds, so with ej1 = 0 the cost on a translation-
  // invariant ring is independent of the separation to machine precision.
  const ModelParams p = sg_instance(10, Boundary::periodic);
  EdOptions opt;
  const EdResult res = lowest_k(p, opt);
  REQUIRE(res.converged);
  const double e0 = res.values[0];
  const Eigen::VectorXcd gs = res.vectors[0].cast<cplx>();

  std::vector<double> tension;
  for (int d : {1, 2, 3, 4}) {
    const ProductOperator pair = build_soliton_pair(p.L, 2, d, 0.0, +1, p.n_max);
    const Eigen::VectorXcd dressed = ed_apply(p, gs, pair);
    REQUIRE(std::abs(dressed.norm() - 1.0) < 1e-12);  // the string is unitary
    tension.push_back(ed_energy(p, dressed) - e0);
  }
  CHECK(tension[0] > 0.0);
  for (size_t i = 1; i < tension.size(); ++i) {
    CHECK(std::abs(tension[i] - tension[0]) < 1e-8);
  }
}

TEST_CASE("guards and input validation") {
  CHECK_THROWS_AS(ChargeSpace(30, 4, kEdDimGuard), std::invalid_argument);
  ModelParams big;
  big.L = 10;
  big.n_max = 4;
  CHECK_THROWS_AS(dense_hamiltonian(big), std::invalid_argument);
  EdOptions opt;
  opt.k = 0;
  CHECK_THROWS_AS(lowest_k(sg_instance(4), opt), std::invalid_argument);

  ModelParams p = sg_instance(4);
  ProductOperator wrong;
  wrong.L = 5;  // wrong chain length
  wrong.n_max = 1;
  Eigen::VectorXd state = Eigen::VectorXd::Zero(81);
  state[0] = 1.0;
  CHECK_THROWS_AS(ed_expectation(p, state, wrong), std::invalid_argument);
}
