#pragma once

#include <utility>
#include <vector>

#include "rotor/types.hpp"

namespace rotor {

// Dense complex tensor, row-major (last index fastest). All operations are
// pure functions of their inputs; parallel kernels split work over disjoint
// output ranges only, so results are independent of the thread count.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<long> shape);  // zero-initialised
  DenseTensor(std::vector<long> shape, std::vector<cplx> data);

  const std::vector<long>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  long size() const { return static_cast<long>(data_.size()); }
  long extent(int axis) const { return shape_.at(axis); }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  cplx& operator[](long flat) { return data_[flat]; }
  const cplx& operator[](long flat) const { return data_[flat]; }

  // Bounds-checked element access; intended for tests and small assemblies.
  cplx& at(const std::vector<long>& idx);
  const cplx& at(const std::vector<long>& idx) const;

  // Shape change without touching data; total size must match.
  DenseTensor reshaped(std::vector<long> new_shape) const&;
  DenseTensor reshaped(std::vector<long> new_shape) &&;

  DenseTensor conjugate() const;
  DenseTensor scaled(cplx factor) const;
  double norm() const;  // Frobenius

  void operator+=(const DenseTensor& other);
  void operator-=(const DenseTensor& other);

 private:
  std::vector<long> shape_;
  std::vector<cplx> data_;
};

// result[k] = a[order[k]]: axis permutation. OpenMP-parallel gather.
DenseTensor permute(const DenseTensor& a, const std::vector<int>& order);

// Pairwise contraction over the listed (axis_in_a, axis_in_b) pairs.
// Result indices: free indices of a (original order), then free indices of b.
// Heavy path: permute + BLAS GEMM.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::pair<int, int>>& pairs);

// Reference implementation of the same contraction: plain nested loops,
// no BLAS, single-threaded. Kept for tests and the kernel benchmark.
DenseTensor contract_serial(const DenseTensor& a, const DenseTensor& b,
                            const std::vector<std::pair<int, int>>& pairs);

// Thread count used by the parallel kernels and the BLAS backend.
void set_thread_count(int n);
int thread_count();

}  // namespace rotor
