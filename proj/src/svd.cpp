#include "rotor/svd.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

namespace rotor {

TruncatedSvd truncated_svd(const DenseTensor& m, const TruncationSpec& spec) {
  if (m.rank() != 2) {
    throw std::invalid_argument("truncated_svd: tensor must have rank 2");
  }
  if (spec.chi_max < 1) {
    throw std::invalid_argument("truncated_svd: chi_max must be >= 1");
  }
  const long rows = m.extent(0), cols = m.extent(1);
  const long kfull = std::min(rows, cols);

  std::vector<cplx> a(m.data(), m.data() + m.size());
  std::vector<double> s(kfull);
  DenseTensor u({rows, kfull});
  DenseTensor vt({kfull, cols});

  lapack_int info = LAPACKE_zgesdd(
      LAPACK_ROW_MAJOR, 'S', static_cast<lapack_int>(rows),
      static_cast<lapack_int>(cols),
      reinterpret_cast<lapack_complex_double*>(a.data()),
      static_cast<lapack_int>(cols), s.data(),
      reinterpret_cast<lapack_complex_double*>(u.data()),
      static_cast<lapack_int>(kfull),
      reinterpret_cast<lapack_complex_double*>(vt.data()),
      static_cast<lapack_int>(cols));
  if (info != 0) {
    // Divide-and-conquer occasionally fails to converge; retry with the
    // slower but sturdier QR-based driver.
    std::copy(m.data(), m.data() + m.size(), a.begin());
    std::vector<double> superb(kfull);
    info = LAPACKE_zgesvd(
        LAPACK_ROW_MAJOR, 'S', 'S', static_cast<lapack_int>(rows),
        static_cast<lapack_int>(cols),
        reinterpret_cast<lapack_complex_double*>(a.data()),
        static_cast<lapack_int>(cols), s.data(),
        reinterpret_cast<lapack_complex_double*>(u.data()),
        static_cast<lapack_int>(kfull),
        reinterpret_cast<lapack_complex_double*>(vt.data()),
        static_cast<lapack_int>(cols), superb.data());
    if (info != 0) {
      throw std::runtime_error("truncated_svd: LAPACK SVD failed, info=" +
                               std::to_string(info));
    }
  }

  double total = 0;
  for (double sv : s) total += sv * sv;

  long keep = 1;  // the leading value is always kept
  for (long i = 1; i < kfull; ++i) {
    const double rel = total > 0 ? s[i] * s[i] / total : 0.0;
    if (rel < spec.cutoff) break;
    ++keep;
  }
  keep = std::min(keep, std::min(kfull, spec.chi_max));

  double discarded = 0;
  for (long i = keep; i < kfull; ++i) discarded += s[i] * s[i];

  TruncatedSvd out;
  out.singular_values.assign(s.begin(), s.begin() + keep);
  out.discarded_weight = discarded;
  out.total_weight = total;
  out.left = DenseTensor({rows, keep});
  out.right = DenseTensor({keep, cols});
  for (long r = 0; r < rows; ++r) {
    std::copy(u.data() + r * kfull, u.data() + r * kfull + keep,
              out.left.data() + r * keep);
  }
  std::copy(vt.data(), vt.data() + keep * cols, out.right.data());
  return out;
}

}  // namespace rotor
