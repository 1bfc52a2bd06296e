#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "rotor/local_algebra.hpp"
#include "rotor/model.hpp"
#include "rotor/tensor.hpp"

namespace rotor {

// Matrix product operator on an open chain. Site tensor w[k] has shape
// (left_bond, right_bond, bra, ket); the first and last tensors carry
// boundary bonds of extent 1.
struct Mpo {
  int L = 0;
  int n_max = 0;
  std::vector<DenseTensor> w;

  int site_dim() const { return 2 * n_max + 1; }
  long bond_dim(int k) const { return w.at(k).extent(1); }  // right bond of site k
  void validate() const;
};

// Rotor-chain Hamiltonian as a bond-dimension-5 MPO (open boundaries):
// on-site n^2 - eg n - ej1 cos(phi) - ej2 cos(2 phi), bond terms
// eps n.n - ej cos(phi_k - phi_{k+1}).
Mpo build_hamiltonian(const ModelParams& p);

// c * (parity string over the whole chain) as a bond-dimension-1 MPO.
Mpo scaled_parity_mpo(int L, int n_max, cplx c);

// Direct sum on the virtual bonds: represents a + b.
Mpo mpo_add(const Mpo& a, const Mpo& b);

// Expand to a dense matrix (site 0 slowest index). Test/oracle helper,
// guarded to small dimensions.
Eigen::MatrixXcd mpo_to_dense(const Mpo& m);

// Product of single-site operators with strictly ascending sites (0-based).
// Sites not listed carry the identity.
struct ProductOperator {
  int L = 0;
  int n_max = 0;
  std::vector<std::pair<int, LocalOperator>> factors;

  void validate() const;
};

// String-pair operator creating a soliton/antisoliton pair at separation d:
// parity-string factors e^{-i q pi n} on sites j..j+d-1 with endpoint
// vertex factors e^{-i 2 s phi} at j and e^{+i 2 s phi} at j+d.
// s in {0, 1/2, 1}, q in {-1, +1}; d = 0 with s = 0 gives the identity.
ProductOperator build_soliton_pair(int L, int j, int d, double s, int q,
                                   int n_max);

// Global parity string: product of e^{i pi n} over every site.
ProductOperator build_global_parity(int L, int n_max);

// Dense matrix of a product operator (same index convention as mpo_to_dense).
Eigen::MatrixXcd product_to_dense(const ProductOperator& op);

}  // namespace rotor
