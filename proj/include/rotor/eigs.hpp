#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rotor/types.hpp"

namespace rotor {

// y = A x for a linear map of dimension dim; x and y are dense arrays of
// length dim and must not alias.
using ApplyFn = std::function<void(const cplx* x, cplx* y)>;

struct LanczosOptions {
  int max_iter = 600;        // total matvec budget
  int restart = 40;          // Krylov block size between restarts
  double tol = 1e-10;        // residual tolerance, relative to the Ritz scale
  std::uint64_t seed = 7;    // start vector when no warm start is given
};

struct LanczosResult {
  double value = 0;
  std::vector<cplx> vector;
  double residual = 0;       // ||A v - value v||
  bool converged = false;
  int iterations = 0;        // matvecs spent
};

// Lowest eigenpair of a Hermitian map: restarted Lanczos with full
// reorthogonalisation. Degenerate lowest levels are fine; any vector in the
// eigenspace is an acceptable answer. Non-convergence is reported through the
// flag, never by throwing.
LanczosResult lowest_eigenpair(const ApplyFn& apply, long dim,
                               const cplx* warm_start,
                               const LanczosOptions& opt);

struct ArnoldiOptions {
  int k = 2;                 // how many dominant eigenvalues
  int max_subspace = 240;    // Krylov cap
  int block = 24;            // growth step between convergence checks
  double tol = 1e-10;        // residual tolerance, relative to |lambda_1|
  std::uint64_t seed = 11;
};

struct ArnoldiResult {
  std::vector<cplx> values;               // descending |lambda|
  std::vector<std::vector<cplx>> vectors; // matching right eigenvectors
  std::vector<double> residuals;
  bool converged = false;
  int iterations = 0;
};

// k largest-magnitude eigenvalues of a general (non-Hermitian) map via
// Arnoldi with full Gram-Schmidt. Used for transfer matrices, whose dominant
// part of the spectrum converges quickly.
ArnoldiResult dominant_eigenvalues(const ApplyFn& apply, long dim,
                                   const ArnoldiOptions& opt);

}  // namespace rotor
