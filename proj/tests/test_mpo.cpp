#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <random>
#include <vector>

#include "rotor/ed.hpp"
#include "rotor/local_algebra.hpp"
#include "rotor/model.hpp"
#include "rotor/mpo.hpp"

using namespace rotor;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Charge digit of basis index i at `site` (site 0 is the slowest digit).
int digit(long i, int site, int L, int n_max) {
  const int m = 2 * n_max + 1;
  long rem = i;
  int d = 0;
  for (int k = L - 1; k >= site; --k) {
    d = static_cast<int>(rem % m);
    rem /= m;
  }
  return d;
}

}  // namespace

TEST_CASE("two-site chain with all couplings off is pure charging") {
  ModelParams p;
  p.L = 2;
  p.n_max = 1;
  const Eigen::MatrixXcd h = mpo_to_dense(build_hamiltonian(p));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  // n_0^2 + n_1^2 over charges {-1, 0, 1}: one 0, four 1s, four 2s.
  const std::vector<double> expected = {0, 1, 1, 1, 1, 2, 2, 2, 2};
  REQUIRE(es.eigenvalues().size() == 9);
  for (int i = 0; i < 9; ++i) {
    CHECK(es.eigenvalues()[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("MPO expansion matches the direct Kronecker build term by term") {
  // Two fully independent constructions of the same Hamiltonian: the
  // bond-dimension-5 MPO contracted to a matrix, and the real Kronecker
  // placement used by the diagonalisation oracle.
  std::vector<ModelParams> cases(4);
  cases[0].L = 2; cases[0].n_max = 1;
  cases[0].ej = 1.3; cases[0].ej1 = 0.4; cases[0].ej2 = 0.7;
  cases[0].eg = 0.25; cases[0].eps = 0.15;
  cases[1].L = 3; cases[1].n_max = 2;
  cases[1].ej = 0.9; cases[1].ej2 = 0.5;
  cases[2].L = 4; cases[2].n_max = 1;
  cases[2].ej = 2.0; cases[2].ej1 = 0.1; cases[2].ej2 = 0.3;
  cases[2].eg = 0.5; cases[2].eps = 0.2;
  cases[3].L = 5; cases[3].n_max = 1;
  cases[3].ej = 1.0; cases[3].ej2 = 1.0;

  for (const ModelParams& p : cases) {
    CAPTURE(p.L);
    CAPTURE(p.n_max);
    const Eigen::MatrixXcd from_mpo = mpo_to_dense(build_hamiltonian(p));
    const Eigen::MatrixXd from_kron = dense_hamiltonian(p);
    CHECK(max_abs(from_mpo - from_mpo.adjoint()) < 1e-12);
    CHECK(max_abs(from_mpo.imag().cast<cplx>()) < 1e-12);
    CHECK(max_abs(from_mpo - from_kron.cast<cplx>()) < 1e-12);
  }
}

TEST_CASE("MPO and Kronecker builds agree over randomized parameter draws") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  int done = 0;
  while (done < 20) {
    ModelParams p;
    p.L = 2 + static_cast<int>(rng() % 5);      // 2..6
    p.n_max = 1 + static_cast<int>(rng() % 2);  // 1..2
    long dim = 1;
    for (int k = 0; k < p.L; ++k) dim *= 2 * p.n_max + 1;
    if (dim > 4096) continue;  // keep the dense expansion in memory
    p.ej = 2.0 * uni(rng);
    p.ej1 = 0.5 * uni(rng);
    p.ej2 = uni(rng);
    p.eg = uni(rng) - 0.5;
    p.eps = 0.6 * uni(rng) - 0.3;
    CAPTURE(p.describe());
    const Eigen::MatrixXcd from_mpo = mpo_to_dense(build_hamiltonian(p));
    const Eigen::MatrixXd from_kron = dense_hamiltonian(p);
    CHECK(max_abs(from_mpo - from_kron.cast<cplx>()) < 1e-12);
    ++done;
  }
}

TEST_CASE("Hamiltonian commutes with the parity string iff eg = ej1 = 0") {
  ModelParams sym;
  sym.L = 3;
  sym.n_max = 2;
  sym.ej = 1.1;
  sym.ej2 = 0.6;
  sym.eps = 0.2;
  REQUIRE(sym.parity_symmetric());

  const Eigen::MatrixXcd parity =
      product_to_dense(build_global_parity(sym.L, sym.n_max));
  const Eigen::MatrixXcd h_sym = mpo_to_dense(build_hamiltonian(sym));
  CHECK(max_abs(h_sym * parity - parity * h_sym) == 0.0);  // integer algebra

  ModelParams tilted = sym;
  tilted.ej1 = 0.3;
  REQUIRE(!tilted.parity_symmetric());
  const Eigen::MatrixXcd h_tilted = mpo_to_dense(build_hamiltonian(tilted));
  CHECK(max_abs(h_tilted * parity - parity * h_tilted) > 0.1);
}

TEST_CASE("MPO addition concatenates boundary bonds and adds operators") {
  ModelParams p;
  p.L = 3;
  p.n_max = 1;
  p.ej = 0.8;
  p.ej2 = 0.4;

  const Mpo h = build_hamiltonian(p);
  const cplx c(0.0, -2.5);
  const Mpo shift = scaled_parity_mpo(p.L, p.n_max, c);
  const Mpo sum = mpo_add(h, shift);

  CHECK(sum.bond_dim(0) == 6);  // 5 + 1 on the interior bonds
  CHECK(sum.bond_dim(p.L - 1) == 1);

  const Eigen::MatrixXcd parity =
      product_to_dense(build_global_parity(p.L, p.n_max));
  const Eigen::MatrixXcd lhs = mpo_to_dense(sum);
  const Eigen::MatrixXcd rhs = mpo_to_dense(h) + c * parity;
  CHECK(max_abs(lhs - rhs) < 1e-13);
}

TEST_CASE("string-pair operator moves charge between its endpoints only") {
  const int L = 3, n_max = 2, j = 0, d = 2;
  for (double s : {0.5, 1.0}) {
    const int a = static_cast<int>(2 * s);
    const Eigen::MatrixXcd op =
        product_to_dense(build_soliton_pair(L, j, d, s, +1, n_max));
    for (long c = 0; c < op.cols(); ++c) {
      for (long r = 0; r < op.rows(); ++r) {
        if (std::abs(op(r, c)) == 0.0) continue;
        // Annihilator endpoint loses `a` units of charge, creator gains
        // them; the string in between is diagonal.
        CHECK(digit(r, j, L, n_max) == digit(c, j, L, n_max) - a);
        CHECK(digit(r, j + d, L, n_max) == digit(c, j + d, L, n_max) + a);
        for (int k = j + 1; k < j + d; ++k) {
          CHECK(digit(r, k, L, n_max) == digit(c, k, L, n_max));
        }
      }
    }
  }
}

TEST_CASE("string-pair special cases: identity, projector, involution") {
  const int L = 4, n_max = 1;
  const long dim = 81;

  // d = 0, s = 0 is the identity (no factors at all).
  const ProductOperator id_op = build_soliton_pair(L, 1, 0, 0.0, +1, n_max);
  CHECK(id_op.factors.empty());
  CHECK(max_abs(product_to_dense(id_op) -
                Eigen::MatrixXcd::Identity(dim, dim)) == 0.0);

  // d = 0 with charge a at the same site collapses to the projector
  // E^dag E: diagonal, idempotent, and not the identity under truncation.
  const Eigen::MatrixXcd proj =
      product_to_dense(build_soliton_pair(L, 2, 0, 0.5, +1, n_max));
  CHECK(max_abs(proj - proj.adjoint()) == 0.0);
  CHECK(max_abs(proj * proj - proj) == 0.0);
  CHECK(proj.real().trace() < static_cast<double>(dim));

  // A bare string (s = 0, d > 0) is a product of parity factors and hence
  // squares to the identity.
  const Eigen::MatrixXcd str =
      product_to_dense(build_soliton_pair(L, 0, 3, 0.0, +1, n_max));
  CHECK(max_abs(str * str - Eigen::MatrixXcd::Identity(dim, dim)) == 0.0);

  // Both signs of q give the same operator on integer charges.
  const Eigen::MatrixXcd plus =
      product_to_dense(build_soliton_pair(L, 0, 2, 0.5, +1, n_max));
  const Eigen::MatrixXcd minus =
      product_to_dense(build_soliton_pair(L, 0, 2, 0.5, -1, n_max));
  CHECK(max_abs(plus - minus) == 0.0);

  // Endpoints carry opposite charge, so the pair commutes with the global
  // parity string exactly.
  const Eigen::MatrixXcd parity = product_to_dense(build_global_parity(L, n_max));
  CHECK(max_abs(plus * parity - parity * plus) == 0.0);
}

TEST_CASE("construction rejects malformed input") {
  ModelParams periodic;
  periodic.L = 4;
  periodic.n_max = 1;
  periodic.bc = Boundary::periodic;
  CHECK_THROWS_AS(build_hamiltonian(periodic), std::invalid_argument);

  CHECK_THROWS_AS(build_soliton_pair(6, 0, 2, 0.3, +1, 2),
                  std::invalid_argument);  // s not in {0, 1/2, 1}
  CHECK_THROWS_AS(build_soliton_pair(6, 0, 2, 0.5, 0, 2),
                  std::invalid_argument);  // q must be a sign
  CHECK_THROWS_AS(build_soliton_pair(6, 4, 2, 0.5, +1, 2),
                  std::invalid_argument);  // j + d runs off the chain
  CHECK_THROWS_AS(build_soliton_pair(6, -1, 2, 0.5, +1, 2),
                  std::invalid_argument);

  ModelParams p;
  p.L = 3;
  p.n_max = 1;
  Mpo broken = build_hamiltonian(p);
  broken.w[1] = DenseTensor({5, 4, 3, 3});  // bond mismatch with site 2
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

  ProductOperator unordered;
  unordered.L = 4;
  unordered.n_max = 1;
  unordered.factors.emplace_back(2, parity_factor(1));
  unordered.factors.emplace_back(1, parity_factor(1));
  CHECK_THROWS_AS(unordered.validate(), std::invalid_argument);
}
