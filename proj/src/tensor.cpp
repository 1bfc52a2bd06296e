#include "rotor/tensor.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <string>

extern "C" {
// Fortran BLAS; OpenBLAS provides the threaded implementation.
void zgemm_(const char* transa, const char* transb, const int* m, const int* n,
            const int* k, const void* alpha, const void* a, const int* lda,
            const void* b, const int* ldb, const void* beta, void* c,
            const int* ldc);
void openblas_set_num_threads(int);
}

namespace rotor {

namespace {

long shape_size(const std::vector<long>& shape) {
  long total = 1;
  for (long s : shape) {
    if (s <= 0) throw std::invalid_argument("DenseTensor: nonpositive extent");
    total *= s;
  }
  return total;
}

std::vector<long> row_major_strides(const std::vector<long>& shape) {
  std::vector<long> strides(shape.size(), 1);
  for (int i = static_cast<int>(shape.size()) - 2; i >= 0; --i) {
    strides[i] = strides[i + 1] * shape[i + 1];
  }
  return strides;
}

int g_threads = 1;

}  // namespace

DenseTensor::DenseTensor(std::vector<long> shape)
    : shape_(std::move(shape)), data_(shape_size(shape_), cplx(0, 0)) {}

DenseTensor::DenseTensor(std::vector<long> shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != static_cast<long>(data_.size())) {
    throw std::invalid_argument("DenseTensor: data size does not match shape");
  }
}

cplx& DenseTensor::at(const std::vector<long>& idx) {
  return const_cast<cplx&>(static_cast<const DenseTensor*>(this)->at(idx));
}

const cplx& DenseTensor::at(const std::vector<long>& idx) const {
  if (idx.size() != shape_.size()) {
    throw std::invalid_argument("DenseTensor::at: rank mismatch");
  }
  long flat = 0;
  for (size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= shape_[k]) {
      throw std::out_of_range("DenseTensor::at: index out of range");
    }
    flat = flat * shape_[k] + idx[k];
  }
  return data_[flat];
}

DenseTensor DenseTensor::reshaped(std::vector<long> new_shape) const& {
  if (shape_size(new_shape) != size()) {
    throw std::invalid_argument("DenseTensor::reshaped: size mismatch");
  }
  return DenseTensor(std::move(new_shape), data_);
}

DenseTensor DenseTensor::reshaped(std::vector<long> new_shape) && {
  if (shape_size(new_shape) != size()) {
    throw std::invalid_argument("DenseTensor::reshaped: size mismatch");
  }
  return DenseTensor(std::move(new_shape), std::move(data_));
}

DenseTensor DenseTensor::conjugate() const {
  DenseTensor out(shape_, data_);
  cplx* p = out.data();
  const long n = out.size();
#pragma omp parallel for schedule(static) num_threads(g_threads)
  for (long i = 0; i < n; ++i) p[i] = std::conj(p[i]);
  return out;
}

DenseTensor DenseTensor::scaled(cplx factor) const {
  DenseTensor out(shape_, data_);
  cplx* p = out.data();
  const long n = out.size();
  for (long i = 0; i < n; ++i) p[i] *= factor;
  return out;
}

double DenseTensor::norm() const {
  double acc = 0;
  for (const cplx& v : data_) acc += std::norm(v);
  return std::sqrt(acc);
}

void DenseTensor::operator+=(const DenseTensor& other) {
  if (shape_ != other.shape_) {
    throw std::invalid_argument("DenseTensor::operator+=: shape mismatch");
  }
  for (long i = 0; i < size(); ++i) data_[i] += other.data_[i];
}

void DenseTensor::operator-=(const DenseTensor& other) {
  if (shape_ != other.shape_) {
    throw std::invalid_argument("DenseTensor::operator-=: shape mismatch");
  }
  for (long i = 0; i < size(); ++i) data_[i] -= other.data_[i];
}

void set_thread_count(int n) {
  if (n < 1) throw std::invalid_argument("set_thread_count: n must be >= 1");
  g_threads = n;
  omp_set_num_threads(n);
  openblas_set_num_threads(n);
}

int thread_count() { return g_threads; }

DenseTensor permute(const DenseTensor& a, const std::vector<int>& order) {
  const int r = a.rank();
  if (static_cast<int>(order.size()) != r) {
    throw std::invalid_argument("permute: order has wrong length");
  }
  std::vector<bool> seen(r, false);
  std::vector<long> new_shape(r);
  for (int k = 0; k < r; ++k) {
    if (order[k] < 0 || order[k] >= r || seen[order[k]]) {
      throw std::invalid_argument("permute: order is not a permutation");
    }
    seen[order[k]] = true;
    new_shape[k] = a.extent(order[k]);
  }

  bool identity = true;
  for (int k = 0; k < r; ++k) identity &= (order[k] == k);
  if (identity || r <= 1) return DenseTensor(new_shape, {a.data(), a.data() + a.size()});

  const std::vector<long> in_strides = row_major_strides(a.shape());
  // Stride in the input for a unit step of each output axis.
  std::vector<long> gather_strides(r);
  for (int k = 0; k < r; ++k) gather_strides[k] = in_strides[order[k]];

  DenseTensor out(new_shape);
  const long n = out.size();
  const cplx* src = a.data();
  cplx* dst = out.data();
  const long inner = new_shape[r - 1];
  const long inner_stride = gather_strides[r - 1];
  const long outer = n / inner;

#pragma omp parallel num_threads(g_threads)
  {
    const int nt = omp_get_num_threads();
    const int tid = omp_get_thread_num();
    const long chunk = (outer + nt - 1) / nt;
    const long begin = std::min(outer, tid * chunk);
    const long end = std::min(outer, begin + chunk);
    if (begin < end) {
      // Delinearise the first outer index of the chunk once, then carry.
      std::vector<long> counter(r - 1, 0);
      long rem = begin;
      for (int k = r - 2; k >= 0; --k) {
        counter[k] = rem % new_shape[k];
        rem /= new_shape[k];
      }
      long base = 0;
      for (int k = 0; k < r - 1; ++k) base += counter[k] * gather_strides[k];
      for (long o = begin; o < end; ++o) {
        cplx* d = dst + o * inner;
        const cplx* s = src + base;
        for (long i = 0; i < inner; ++i) d[i] = s[i * inner_stride];
        // Increment the outer counter (row-major order).
        for (int k = r - 2; k >= 0; --k) {
          base += gather_strides[k];
          if (++counter[k] < new_shape[k]) break;
          base -= new_shape[k] * gather_strides[k];
          counter[k] = 0;
        }
      }
    }
  }
  return out;
}

namespace {

struct ContractPlan {
  std::vector<int> a_free, b_free, a_contr, b_contr;
  long m = 1, n = 1, k = 1;
  std::vector<long> out_shape;
};

ContractPlan make_plan(const DenseTensor& a, const DenseTensor& b,
                       const std::vector<std::pair<int, int>>& pairs) {
  ContractPlan plan;
  std::vector<bool> a_used(a.rank(), false), b_used(b.rank(), false);
  for (const auto& [ia, ib] : pairs) {
    if (ia < 0 || ia >= a.rank() || ib < 0 || ib >= b.rank()) {
      throw std::invalid_argument("contract: axis out of range");
    }
    if (a_used[ia] || b_used[ib]) {
      throw std::invalid_argument("contract: axis contracted twice");
    }
    if (a.extent(ia) != b.extent(ib)) {
      throw std::invalid_argument(
          "contract: extent mismatch on pair (" + std::to_string(ia) + "," +
          std::to_string(ib) + "): " + std::to_string(a.extent(ia)) + " vs " +
          std::to_string(b.extent(ib)));
    }
    a_used[ia] = true;
    b_used[ib] = true;
    plan.a_contr.push_back(ia);
    plan.b_contr.push_back(ib);
    plan.k *= a.extent(ia);
  }
  for (int i = 0; i < a.rank(); ++i) {
    if (!a_used[i]) {
      plan.a_free.push_back(i);
      plan.m *= a.extent(i);
      plan.out_shape.push_back(a.extent(i));
    }
  }
  for (int i = 0; i < b.rank(); ++i) {
    if (!b_used[i]) {
      plan.b_free.push_back(i);
      plan.n *= b.extent(i);
      plan.out_shape.push_back(b.extent(i));
    }
  }
  if (plan.out_shape.empty()) plan.out_shape = {1};  // scalar as rank-1, size 1
  return plan;
}

// Row-major C(m,n) = A(m,k) * B(k,n) via Fortran zgemm on the transposed view.
void gemm_row_major(long m, long n, long k, const cplx* a, const cplx* b,
                    cplx* c) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    std::fill(c, c + m * n, cplx(0, 0));
    return;
  }
  const int mi = static_cast<int>(n), ni = static_cast<int>(m),
            ki = static_cast<int>(k);
  const int lda = static_cast<int>(n), ldb = static_cast<int>(k),
            ldc = static_cast<int>(n);
  const cplx one(1, 0), zero(0, 0);
  zgemm_("N", "N", &mi, &ni, &ki, &one, b, &lda, a, &ldb, &zero, c, &ldc);
}

}  // namespace

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::pair<int, int>>& pairs) {
  const ContractPlan plan = make_plan(a, b, pairs);

  std::vector<int> a_order = plan.a_free;
  a_order.insert(a_order.end(), plan.a_contr.begin(), plan.a_contr.end());
  std::vector<int> b_order = plan.b_contr;
  b_order.insert(b_order.end(), plan.b_free.begin(), plan.b_free.end());

  const DenseTensor ap = permute(a, a_order);
  const DenseTensor bp = permute(b, b_order);

  DenseTensor out(plan.out_shape);
  gemm_row_major(plan.m, plan.n, plan.k, ap.data(), bp.data(), out.data());
  return out;
}

DenseTensor contract_serial(const DenseTensor& a, const DenseTensor& b,
                            const std::vector<std::pair<int, int>>& pairs) {
  const ContractPlan plan = make_plan(a, b, pairs);
  const std::vector<long> a_strides = row_major_strides(a.shape());
  const std::vector<long> b_strides = row_major_strides(b.shape());

  // Flat offsets of every free/contracted configuration, in row-major order
  // of the fused (m, n, k) indices.
  auto offsets_for = [](const std::vector<int>& axes,
                        const std::vector<long>& shape,
                        const std::vector<long>& strides) {
    std::vector<long> offs{0};
    for (int axis : axes) {
      std::vector<long> next;
      next.reserve(offs.size() * shape[axis]);
      for (long base : offs) {
        for (long i = 0; i < shape[axis]; ++i) {
          next.push_back(base + i * strides[axis]);
        }
      }
      offs.swap(next);
    }
    return offs;
  };

  const std::vector<long> a_free_off =
      offsets_for(plan.a_free, a.shape(), a_strides);
  const std::vector<long> a_contr_off =
      offsets_for(plan.a_contr, a.shape(), a_strides);
  const std::vector<long> b_free_off =
      offsets_for(plan.b_free, b.shape(), b_strides);
  const std::vector<long> b_contr_off =
      offsets_for(plan.b_contr, b.shape(), b_strides);

  DenseTensor out(plan.out_shape);
  cplx* dst = out.data();
  const cplx* pa = a.data();
  const cplx* pb = b.data();
  for (long i = 0; i < plan.m; ++i) {
    for (long j = 0; j < plan.n; ++j) {
      cplx acc(0, 0);
      for (long l = 0; l < plan.k; ++l) {
        acc += pa[a_free_off[i] + a_contr_off[l]] *
               pb[b_contr_off[l] + b_free_off[j]];
      }
      dst[i * plan.n + j] = acc;
    }
  }
  return out;
}

}  // namespace rotor
