#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rotor/model.hpp"
#include "rotor/mpo.hpp"

namespace rotor {

// Many-body charge basis bookkeeping: site 0 is the slowest (most
// significant) digit, matching the Kronecker order of the dense builders.
struct ChargeSpace {
  int L = 0;
  int n_max = 0;
  long dim = 0;

  ChargeSpace(int L_in, int n_max_in, long guard);
  int site_dim() const { return 2 * n_max + 1; }
  long stride(int site) const;  // linear-index stride of one charge step
};

// Hilbert-space guard for the iterative oracle path.
inline constexpr long kEdDimGuard = 1L << 20;
// Above this dimension the Hamiltonian is never materialised densely.
inline constexpr long kEdDenseGuard = 1L << 14;

// Dense Hermitian (real symmetric) Hamiltonian, built by Kronecker-placing
// each term. Guarded by kEdDenseGuard.
Eigen::MatrixXd dense_hamiltonian(const ModelParams& p);

// y = H x without materialising H: per-entry gather over all terms,
// OpenMP-parallel over output entries (race-free and thread-count
// independent by construction). Guarded by kEdDimGuard.
struct HamiltonianApply {
  explicit HamiltonianApply(const ModelParams& p);
  void operator()(const double* x, double* y) const;
  long dim() const { return space.dim; }

  ModelParams params;
  ChargeSpace space;
  std::vector<double> diag;          // all diagonal terms, precomputed
  std::vector<std::uint8_t> digits;  // dim x L charge digits
};

struct EdOptions {
  int k = 1;
  double tol = 1e-12;     // residual tolerance, relative to the Ritz scale
  int max_iter = 4000;    // matvec budget for the iterative path
  int restart = 80;
  std::uint64_t seed = 3;
  long dense_cutoff = 4096;  // use full dense diagonalisation up to here
};

struct EdResult {
  std::vector<double> values;            // ascending
  std::vector<Eigen::VectorXd> vectors;  // normalised eigenvectors
  bool converged = false;
  std::string method;  // "dense" or "lanczos"
};

// k lowest eigenpairs. Small dimensions take the full dense route; larger
// ones a real Lanczos with full reorthogonalisation and deflation on the
// matrix-free apply. The two routes are cross-checked in the tests.
EdResult lowest_k(const ModelParams& p, const EdOptions& opt);

// O |state> for a product operator.
Eigen::VectorXcd ed_apply(const ModelParams& p, const Eigen::VectorXcd& state,
                          const ProductOperator& op);

// Rayleigh quotient <state|H|state> / <state|state> through the matrix-free
// apply; the trial-state energy behind string-tension oracles.
double ed_energy(const ModelParams& p, const Eigen::VectorXcd& state);

// <state| O |state> for a product operator.
cplx ed_expectation(const ModelParams& p, const Eigen::VectorXd& state,
                    const ProductOperator& op);

// <bra| O |ket>, for sector bookkeeping in tests.
cplx ed_matrix_element(const ModelParams& p, const Eigen::VectorXd& bra,
                       const Eigen::VectorXd& ket, const ProductOperator& op);

}  // namespace rotor
