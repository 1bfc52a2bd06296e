// Kernel benchmark: parallel/BLAS contraction path vs the serial nested-loop
// reference, on tensor shapes that dominate a DMRG sweep (environment x
// two-site wavefunction). Run with a thread count argument to compare
// scaling, e.g.  rotor-bench 4
#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "rotor/tensor.hpp"

using rotor::cplx;
using rotor::DenseTensor;

namespace {

DenseTensor random_tensor(std::vector<long> shape, std::uint64_t seed) {
  DenseTensor t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (long i = 0; i < t.size(); ++i) t[i] = cplx(u(rng), u(rng));
  return t;
}

double flops_of(long m, long n, long k) {
  return 8.0 * static_cast<double>(m) * static_cast<double>(n) *
         static_cast<double>(k);
}

}  // namespace

int main(int argc, char** argv) {
  const int threads = argc > 1 ? std::atoi(argv[1]) : 1;
  rotor::set_thread_count(threads);
  std::printf("threads: %d\n", threads);

  // Left-environment application L(a,b,a') theta(a,s1,s2,ar) -> X(b,a',s1,s2,ar)
  // at a few bond dimensions, d = 9 (charge cutoff 4), MPO bond 5.
  const long d = 9, w = 5;
  for (long D : {16L, 32L, 48L, 64L}) {
    DenseTensor env = random_tensor({D, w, D}, 1);
    DenseTensor theta = random_tensor({D, d, d, D}, 2);

    const int reps = D <= 32 ? 10 : 4;
    double t0 = omp_get_wtime();
    DenseTensor fast;
    for (int r = 0; r < reps; ++r) {
      fast = rotor::contract(env, theta, {{0, 0}});
    }
    double t_fast = (omp_get_wtime() - t0) / reps;

    t0 = omp_get_wtime();
    DenseTensor ref = rotor::contract_serial(env, theta, {{0, 0}});
    double t_ref = omp_get_wtime() - t0;

    double max_diff = 0;
    for (long i = 0; i < ref.size(); ++i) {
      max_diff = std::max(max_diff, std::abs(ref[i] - fast[i]));
    }

    const double gf = flops_of(w * D, d * d * D, D) * 1e-9;
    std::printf(
        "contract  D=%3ld  fast %8.4f s (%6.2f GF/s)  serial %8.4f s "
        "(%6.2f GF/s)  speedup %5.1fx  max|diff| %.2e\n",
        D, t_fast, gf / t_fast, t_ref, gf / t_ref, t_ref / t_fast, max_diff);
  }

  // Axis permutation (the memory-bound half of the contraction path).
  {
    DenseTensor t = random_tensor({64, 9, 9, 64}, 3);
    const int reps = 50;
    double t0 = omp_get_wtime();
    for (int r = 0; r < reps; ++r) {
      DenseTensor p = rotor::permute(t, {3, 1, 2, 0});
      t[0] += p[0].real();  // defeat dead-code elimination
    }
    double dt = (omp_get_wtime() - t0) / reps;
    std::printf("permute   (64,9,9,64) -> (3,1,2,0): %8.5f s  %6.2f GB/s\n",
                dt, 2.0 * 16e-9 * t.size() / dt);
  }
  return 0;
}
