#pragma once

#include <vector>

#include "rotor/tensor.hpp"

namespace rotor {

// Bond truncation policy. `cutoff` drops singular values whose squared weight
// relative to the total squared weight falls below it; `chi_max` caps the kept
// count. At least one value is always kept.
struct TruncationSpec {
  long chi_max = 128;
  double cutoff = 1e-10;
};

struct TruncatedSvd {
  DenseTensor left;                      // (m, chi), isometric columns
  std::vector<double> singular_values;   // descending, length chi
  DenseTensor right;                     // (chi, n), isometric rows
  double discarded_weight = 0.0;         // sum of dropped sigma^2 (absolute)
  double total_weight = 0.0;             // sum of all sigma^2
};

// SVD of a rank-2 tensor with truncation. The squared Frobenius error of the
// truncated reconstruction equals discarded_weight (Eckart-Young), which the
// tests check against a full-SVD oracle.
TruncatedSvd truncated_svd(const DenseTensor& m, const TruncationSpec& spec);

}  // namespace rotor
