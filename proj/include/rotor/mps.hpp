#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rotor/mpo.hpp"
#include "rotor/svd.hpp"
#include "rotor/tensor.hpp"

namespace rotor {

// Matrix product state on an open chain. Site tensor a[k] has shape
// (left_bond, physical, right_bond); boundary bonds have extent 1. Tensors
// strictly left of `center` are left-isometric, tensors strictly right of it
// right-isometric, and the state norm lives in the center tensor.
struct Mps {
  int L = 0;
  int n_max = 0;
  std::vector<DenseTensor> a;
  int center = 0;
  // Discarded weight of the most recent truncation on each bond; exact
  // center shifts leave it untouched.
  std::vector<double> discarded;

  int site_dim() const { return 2 * n_max + 1; }
  long bond_dim(int k) const { return a.at(k).extent(2); }  // right of site k
  void validate() const;

  // Largest deviation from the isometry conditions away from the center.
  double isometry_residual() const;

  double norm() const;  // center tensor norm, assuming canonical form
};

// Uniform product state |local>^L, canonical with center 0, normalized.
Mps product_mps(int L, int n_max, const Eigen::VectorXcd& local);

// Random normalized MPS with bond dimensions <= chi, canonical with center 0.
Mps random_mps(int L, int n_max, long chi, std::uint64_t seed);

// Move the orthogonality center by successive exact SVD shifts.
void move_center(Mps& psi, int target);

// Rebuild canonical form from scratch after site tensors were edited; the
// center ends at `target` and the norm is preserved.
void recanonicalize(Mps& psi, int target = 0);

// Scale the state to norm 1; returns the previous norm.
double normalize(Mps& psi);

// <bra|ket>.
cplx overlap(const Mps& bra, const Mps& ket);

// <psi|H|psi> for a Hermitian MPO. The imaginary part is a numerical
// residual and must stay below 1e-10 (relative); larger values throw.
double energy_expectation(const Mps& psi, const Mpo& h);

// O|psi> for a product operator: exact local application (bond dimensions
// unchanged), canonical form restored, state re-normalized. Returns the new
// state and the pre-normalization norm — truncated phase operators are not
// exactly unitary, so the norm carries physical weight loss.
std::pair<Mps, double> apply_product_operator(const Mps& psi,
                                              const ProductOperator& op);

// Exact MPS of a dense state vector (site 0 slowest index); the bridge
// between the diagonalisation oracle and MPS-side observables in tests.
Mps dense_to_mps(const Eigen::VectorXcd& state, int L, int n_max);

// Dense vector of an MPS (same index convention), guarded to small sizes.
Eigen::VectorXcd mps_to_dense(const Mps& psi);

// Checkpoint round trip: versioned binary dump of all tensors and metadata
// in native byte order. Loading validates header, version, and shapes.
void save_mps(const Mps& psi, const std::string& path);
Mps load_mps(const std::string& path);

}  // namespace rotor
