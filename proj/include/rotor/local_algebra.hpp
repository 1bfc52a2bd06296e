#pragma once

#include <Eigen/Dense>
#include <string>

#include "rotor/types.hpp"

namespace rotor {

// Truncated charge basis of a single rotor site: states |n>, n = -n_max..n_max,
// stored charge-ascending (index 0 <-> n = -n_max). Truncation is a hard cut:
// raising operators simply annihilate the top states, which keeps the charge
// commutation relations exact (see phase_raise_operator).
struct LocalBasis {
  int n_max;

  explicit LocalBasis(int n_max_in);

  int dim() const { return 2 * n_max + 1; }
  int charge_of(int index) const { return index - n_max; }
  int index_of(int charge) const { return charge + n_max; }

  bool operator==(const LocalBasis& other) const { return n_max == other.n_max; }
  bool operator!=(const LocalBasis& other) const { return !(*this == other); }
};

// Single-site operator bound to its basis. Mixing operators from different
// truncations is a construction error, not a silent resize.
struct LocalOperator {
  LocalBasis basis;
  std::string label;
  Eigen::MatrixXcd mat;

  LocalOperator(LocalBasis basis_in, std::string label_in, Eigen::MatrixXcd mat_in);

  LocalOperator dagger() const;
  bool is_hermitian(double tol = 1e-12) const;
  bool is_identity(double tol = 1e-12) const;
};

LocalOperator operator*(const LocalOperator& a, const LocalOperator& b);
LocalOperator operator+(const LocalOperator& a, const LocalOperator& b);
LocalOperator operator*(cplx scale, const LocalOperator& a);

// n: diagonal charge operator, integer entries -n_max..n_max.
LocalOperator charge_operator(int n_max);

// e^{i a phi}: raises charge by a, i.e. ones on the a-th subdiagonal in
// charge-ascending ordering. Requires 1 <= a <= 2*n_max so the operator is
// not identically zero. The truncated matrix satisfies [n, e^{ia phi}] =
// a e^{ia phi} exactly (integer arithmetic), which the tests assert.
LocalOperator phase_raise_operator(int n_max, int a);

// cos(a phi) = (e^{ia phi} + h.c.)/2.
LocalOperator cos_phase_operator(int n_max, int a);

// e^{i pi n} = diag((-1)^n): the site factor of the global parity string.
LocalOperator parity_factor(int n_max);

// Identity on the site, convenience for product-operator assembly.
LocalOperator identity_operator(int n_max);

}  // namespace rotor
