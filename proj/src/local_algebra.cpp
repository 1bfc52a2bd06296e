#include "rotor/local_algebra.hpp"

#include <stdexcept>
#include <utility>

namespace rotor {

LocalBasis::LocalBasis(int n_max_in) : n_max(n_max_in) {
  if (n_max < 1) {
    throw std::invalid_argument("LocalBasis: n_max must be >= 1, got " +
                                std::to_string(n_max_in));
  }
}

LocalOperator::LocalOperator(LocalBasis basis_in, std::string label_in,
                             Eigen::MatrixXcd mat_in)
    : basis(basis_in), label(std::move(label_in)), mat(std::move(mat_in)) {
  const int d = basis.dim();
  if (mat.rows() != d || mat.cols() != d) {
    throw std::invalid_argument("LocalOperator '" + label + "': matrix is " +
                                std::to_string(mat.rows()) + "x" +
                                std::to_string(mat.cols()) + ", basis dim is " +
                                std::to_string(d));
  }
}

LocalOperator LocalOperator::dagger() const {
  return LocalOperator(basis, label + "^dag", mat.adjoint());
}

bool LocalOperator::is_hermitian(double tol) const {
  return (mat - mat.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool LocalOperator::is_identity(double tol) const {
  return (mat - Eigen::MatrixXcd::Identity(mat.rows(), mat.cols()))
             .cwiseAbs()
             .maxCoeff() <= tol;
}

namespace {

void check_same_basis(const LocalOperator& a, const LocalOperator& b) {
  if (a.basis != b.basis) {
    throw std::invalid_argument("LocalOperator: basis mismatch between '" +
                                a.label + "' (n_max=" +
                                std::to_string(a.basis.n_max) + ") and '" +
                                b.label + "' (n_max=" +
                                std::to_string(b.basis.n_max) + ")");
  }
}

}  // namespace

LocalOperator operator*(const LocalOperator& a, const LocalOperator& b) {
  check_same_basis(a, b);
  return LocalOperator(a.basis, a.label + "*" + b.label, a.mat * b.mat);
}

LocalOperator operator+(const LocalOperator& a, const LocalOperator& b) {
  check_same_basis(a, b);
  return LocalOperator(a.basis, a.label + "+" + b.label, a.mat + b.mat);
}

LocalOperator operator*(cplx scale, const LocalOperator& a) {
  return LocalOperator(a.basis, a.label, scale * a.mat);
}

LocalOperator charge_operator(int n_max) {
  LocalBasis basis(n_max);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim(); ++i) m(i, i) = basis.charge_of(i);
  return LocalOperator(basis, "n", std::move(m));
}

LocalOperator phase_raise_operator(int n_max, int a) {
  LocalBasis basis(n_max);
  if (a < 1 || a > 2 * n_max) {
    throw std::invalid_argument(
        "phase_raise_operator: need 1 <= a <= 2*n_max, got a=" +
        std::to_string(a) + ", n_max=" + std::to_string(n_max));
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
  // <n+a| e^{ia phi} |n> = 1; states raised past +n_max are dropped.
  for (int i = 0; i + a < basis.dim(); ++i) m(i + a, i) = 1.0;
  return LocalOperator(basis, "E" + std::to_string(a), std::move(m));
}

LocalOperator cos_phase_operator(int n_max, int a) {
  LocalOperator e = phase_raise_operator(n_max, a);
  Eigen::MatrixXcd m = 0.5 * (e.mat + e.mat.adjoint());
  return LocalOperator(e.basis, "cos" + std::to_string(a) + "phi", std::move(m));
}

LocalOperator parity_factor(int n_max) {
  LocalBasis basis(n_max);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    const int n = basis.charge_of(i);
    m(i, i) = (n % 2 == 0) ? 1.0 : -1.0;
  }
  return LocalOperator(basis, "parity", std::move(m));
}

LocalOperator identity_operator(int n_max) {
  LocalBasis basis(n_max);
  return LocalOperator(basis, "id",
                       Eigen::MatrixXcd::Identity(basis.dim(), basis.dim()));
}

}  // namespace rotor
