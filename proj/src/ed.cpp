#include "rotor/ed.hpp"

#include <omp.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

#include "rotor/local_algebra.hpp"

namespace rotor {

ChargeSpace::ChargeSpace(int L_in, int n_max_in, long guard)
    : L(L_in), n_max(n_max_in) {
  dim = 1;
  const long d = 2L * n_max + 1;
  for (int k = 0; k < L; ++k) {
    dim *= d;
    if (dim > guard) {
      throw std::invalid_argument(
          "ChargeSpace: (2 n_max + 1)^L exceeds the guard " +
          std::to_string(guard));
    }
  }
}

long ChargeSpace::stride(int site) const {
  long s = 1;
  for (int k = site + 1; k < L; ++k) s *= site_dim();
  return s;
}

Eigen::MatrixXd dense_hamiltonian(const ModelParams& p) {
  p.validate();
  ChargeSpace space(p.L, p.n_max, kEdDenseGuard);
  const long dim = space.dim;
  const int m = space.site_dim();

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  const Eigen::MatrixXd n = charge_operator(p.n_max).mat.real();
  const Eigen::MatrixXd cos1 = cos_phase_operator(p.n_max, 1).mat.real();
  const Eigen::MatrixXd cos2 = cos_phase_operator(p.n_max, 2).mat.real();
  const Eigen::MatrixXd h_loc = n * n - p.eg * n - p.ej1 * cos1 - p.ej2 * cos2;
  const Eigen::MatrixXd e1 = phase_raise_operator(p.n_max, 1).mat.real();

  // One-site term X at site k: H += I x .. X .. x I.
  auto place1 = [&](int k, const Eigen::MatrixXd& X) {
    const long left = dim / space.stride(k) / m;
    const long right = space.stride(k);
    for (long l = 0; l < left; ++l) {
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
          if (X(r, c) == 0.0) continue;
          const long rb = (l * m + r) * right, cb = (l * m + c) * right;
          for (long q = 0; q < right; ++q) H(rb + q, cb + q) += X(r, c);
        }
      }
    }
  };
  // Two-site term X at site k1, Y at site k2 (k1 < k2, not necessarily
  // adjacent, so the periodic wrap bond reuses it).
  auto place2 = [&](int k1, int k2, const Eigen::MatrixXd& X,
                    const Eigen::MatrixXd& Y) {
    const long s1 = space.stride(k1), s2 = space.stride(k2);
    const long left = dim / s1 / m;
    const long mid = s1 / s2 / m;
    for (long l = 0; l < left; ++l) {
      for (int r1 = 0; r1 < m; ++r1) {
        for (int c1 = 0; c1 < m; ++c1) {
          if (X(r1, c1) == 0.0) continue;
          for (long md = 0; md < mid; ++md) {
            for (int r2 = 0; r2 < m; ++r2) {
              for (int c2 = 0; c2 < m; ++c2) {
                const double v = X(r1, c1) * Y(r2, c2);
                if (v == 0.0) continue;
                const long rb = ((l * m + r1) * mid + md) * m + r2;
                const long cb = ((l * m + c1) * mid + md) * m + c2;
                for (long q = 0; q < s2; ++q) {
                  H(rb * s2 + q, cb * s2 + q) += v;
                }
              }
            }
          }
        }
      }
    }
  };

  for (int k = 0; k < p.L; ++k) place1(k, h_loc);
  const Eigen::MatrixXd hop = (-0.5 * p.ej) * e1;
  for (int k = 0; k + 1 < p.L; ++k) {
    place2(k, k + 1, p.eps * n, n);
    place2(k, k + 1, hop, e1.transpose());
    place2(k, k + 1, hop.transpose(), e1);
  }
  if (p.bc == Boundary::periodic && p.L > 2) {
    place2(0, p.L - 1, p.eps * n, n);
    place2(0, p.L - 1, e1.transpose(), hop);  // E^dag_0 (-ej/2 E_{L-1})
    place2(0, p.L - 1, e1, hop.transpose());
  }
  return H;
}

HamiltonianApply::HamiltonianApply(const ModelParams& p)
    : params(p), space(p.L, p.n_max, kEdDimGuard) {
  p.validate();
  const long dim = space.dim;
  const int L = p.L, m = space.site_dim();

  digits.resize(static_cast<size_t>(dim) * L);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < dim; ++i) {
    long rem = i;
    for (int k = L - 1; k >= 0; --k) {
      digits[static_cast<size_t>(i) * L + k] = static_cast<std::uint8_t>(rem % m);
      rem /= m;
    }
  }

  diag.resize(dim);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < dim; ++i) {
    const std::uint8_t* dg = &digits[static_cast<size_t>(i) * L];
    double v = 0;
    for (int k = 0; k < L; ++k) {
      const double nk = dg[k] - p.n_max;
      v += nk * nk - p.eg * nk;
      if (k + 1 < L) v += p.eps * nk * (dg[k + 1] - p.n_max);
    }
    if (p.bc == Boundary::periodic && L > 2) {
      v += p.eps * (dg[0] - p.n_max) * (dg[L - 1] - p.n_max);
    }
    diag[i] = v;
  }
}

void HamiltonianApply::operator()(const double* x, double* y) const {
  const ModelParams& p = params;
  const long dim = space.dim;
  const int L = p.L;
  const int m = space.site_dim();
  const double half_ej = 0.5 * p.ej, half_ej1 = 0.5 * p.ej1,
               half_ej2 = 0.5 * p.ej2;
  std::vector<long> stride(L);
  for (int k = 0; k < L; ++k) stride[k] = space.stride(k);
  const bool wrap = (p.bc == Boundary::periodic && L > 2);

  // Gather form: each output entry is accumulated by exactly one thread in a
  // fixed order, so results are independent of the thread count.
#pragma omp parallel for schedule(static)
  for (long i = 0; i < dim; ++i) {
    const std::uint8_t* dg = &digits[static_cast<size_t>(i) * L];
    double acc = diag[i] * x[i];
    for (int k = 0; k < L; ++k) {
      const int d = dg[k];
      // -ej1 cos(phi_k): couples |n> and |n +- 1>.
      if (half_ej1 != 0.0) {
        if (d >= 1) acc -= half_ej1 * x[i - stride[k]];
        if (d + 1 < m) acc -= half_ej1 * x[i + stride[k]];
      }
      // -ej2 cos(2 phi_k)
      if (half_ej2 != 0.0) {
        if (d >= 2) acc -= half_ej2 * x[i - 2 * stride[k]];
        if (d + 2 < m) acc -= half_ej2 * x[i + 2 * stride[k]];
      }
      // -ej cos(phi_k - phi_{k+1})
      if (half_ej != 0.0) {
        const int k2 = (k + 1 < L) ? k + 1 : (wrap ? 0 : -1);
        if (k2 >= 0) {
          const int d2 = dg[k2];
          if (d >= 1 && d2 + 1 < m) {
            acc -= half_ej * x[i - stride[k] + stride[k2]];
          }
          if (d + 1 < m && d2 >= 1) {
            acc -= half_ej * x[i + stride[k] - stride[k2]];
          }
        }
      }
    }
    y[i] = acc;
  }
}

namespace {

// Real symmetric Lanczos with full reorthogonalisation and deflation by
// explicit orthogonalisation against locked eigenvectors. Kept separate from
// the complex solver in eigs.cpp so the oracle path stays independent.
struct RealLanczos {
  const HamiltonianApply& apply;
  const EdOptions& opt;

  bool lowest(const std::vector<Eigen::VectorXd>& locked, double& value,
              Eigen::VectorXd& vec) const {
    const long dim = apply.dim();
    std::mt19937_64 rng(opt.seed + locked.size());
    std::normal_distribution<double> gauss(0, 1);

    Eigen::VectorXd v(dim);
    for (long i = 0; i < dim; ++i) v[i] = gauss(rng);
    project_out(locked, v);
    v.normalize();

    const int m_max = static_cast<int>(
        std::min<long>(std::max(opt.restart, 2 * opt.k + 10), dim));
    std::vector<Eigen::VectorXd> basis(m_max + 1);
    Eigen::MatrixXd tmat(m_max, m_max);
    Eigen::VectorXd w(dim), ritz = v;
    double ritz_value = 0, scale = 1e-300;
    int matvecs = 0;
    bool converged = false;

    while (matvecs < opt.max_iter && !converged) {
      basis[0] = ritz;
      tmat.setZero();
      int m = 0;
      for (; m < m_max && matvecs < opt.max_iter; ++m) {
        apply(basis[m].data(), w.data());
        ++matvecs;
        project_out(locked, w);
        // The first orthogonalisation pass doubles as the projection row of
        // the subspace matrix; the second pass only polishes the remainder.
        for (int j = 0; j <= m; ++j) {
          const double h = basis[j].dot(w);
          tmat(m, j) = h;
          w -= h * basis[j];
        }
        for (int j = 0; j <= m; ++j) w -= basis[j].dot(w) * basis[j];
        const double b = w.norm();
        if (b < 1e-12 * std::max(1.0, scale)) {
          ++m;
          break;
        }
        if (m + 1 < m_max) tmat(m + 1, m) = b;
        basis[m + 1] = w / b;
      }

      // Rayleigh-Ritz on the full projected matrix (lower triangle), not an
      // assumed tridiagonal band: identical for clean Lanczos runs, but
      // immune to the garbage a near-invariant subspace feeds into the
      // three-term recurrence once the basis saturates.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
          tmat.topLeftCorner(m, m));
      ritz_value = es.eigenvalues()[0];
      scale = std::max(std::abs(es.eigenvalues()[0]),
                       std::abs(es.eigenvalues()[m - 1]));

      ritz.setZero(dim);
      for (int i = 0; i < m; ++i) ritz += es.eigenvectors()(i, 0) * basis[i];
      project_out(locked, ritz);
      ritz.normalize();

      apply(ritz.data(), w.data());
      ++matvecs;
      const double resid = (w - ritz_value * ritz).norm();
      converged = resid <= opt.tol * std::max(1.0, scale);
    }
    value = ritz_value;
    vec = ritz;
    return converged;
  }

  static void project_out(const std::vector<Eigen::VectorXd>& locked,
                          Eigen::VectorXd& w) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const Eigen::VectorXd& u : locked) w -= u.dot(w) * u;
    }
  }
};

}  // namespace

EdResult lowest_k(const ModelParams& p, const EdOptions& opt) {
  p.validate();
  if (opt.k < 1) throw std::invalid_argument("lowest_k: k must be >= 1");
  ChargeSpace space(p.L, p.n_max, kEdDimGuard);

  EdResult res;
  if (space.dim <= opt.dense_cutoff) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_hamiltonian(p));
    for (int i = 0; i < opt.k && i < space.dim; ++i) {
      res.values.push_back(es.eigenvalues()[i]);
      res.vectors.push_back(es.eigenvectors().col(i));
    }
    res.converged = true;
    res.method = "dense";
    return res;
  }

  HamiltonianApply apply(p);
  RealLanczos solver{apply, opt};
  res.converged = true;
  for (int i = 0; i < opt.k; ++i) {
    double value = 0;
    Eigen::VectorXd vec;
    res.converged &= solver.lowest(res.vectors, value, vec);
    res.values.push_back(value);
    res.vectors.push_back(vec);
  }
  // Deflation discovers the pairs bottom-up already; the sort only guards
  // against numerically swapped quasi-degenerate neighbours.
  for (size_t i = 1; i < res.values.size(); ++i) {
    size_t j = i;
    while (j > 0 && res.values[j] < res.values[j - 1]) {
      std::swap(res.values[j], res.values[j - 1]);
      std::swap(res.vectors[j], res.vectors[j - 1]);
      --j;
    }
  }
  res.method = "lanczos";
  return res;
}

Eigen::VectorXcd ed_apply(const ModelParams& p, const Eigen::VectorXcd& state,
                          const ProductOperator& op) {
  op.validate();
  if (op.L != p.L || op.n_max != p.n_max) {
    throw std::invalid_argument("ed_apply: operator/model mismatch");
  }
  ChargeSpace space(p.L, p.n_max, kEdDimGuard);
  if (state.size() != space.dim) {
    throw std::invalid_argument("ed_apply: state dimension mismatch");
  }
  const int m = space.site_dim();

  Eigen::VectorXcd work = state;
  Eigen::VectorXcd next(space.dim);
  for (const auto& [site, f] : op.factors) {
    const long s = space.stride(site);
    const long left = space.dim / s / m;
    next.setZero();
    for (long l = 0; l < left; ++l) {
      for (int r = 0; r < m; ++r) {
        const long rb = (l * m + r) * s;
        for (int c = 0; c < m; ++c) {
          const cplx v = f.mat(r, c);
          if (v == cplx(0, 0)) continue;
          const long cb = (l * m + c) * s;
          for (long q = 0; q < s; ++q) next[rb + q] += v * work[cb + q];
        }
      }
    }
    work.swap(next);
  }
  return work;
}

double ed_energy(const ModelParams& p, const Eigen::VectorXcd& state) {
  HamiltonianApply apply(p);
  if (state.size() != apply.dim()) {
    throw std::invalid_argument("ed_energy: state dimension mismatch");
  }
  const double den = state.squaredNorm();
  if (den == 0.0) throw std::invalid_argument("ed_energy: zero state");
  const Eigen::VectorXd re = state.real(), im = state.imag();
  Eigen::VectorXd hre(apply.dim()), him(apply.dim());
  apply(re.data(), hre.data());
  apply(im.data(), him.data());
  // Imaginary cross terms cancel for a symmetric H.
  return (re.dot(hre) + im.dot(him)) / den;
}

cplx ed_matrix_element(const ModelParams& p, const Eigen::VectorXd& bra,
                       const Eigen::VectorXd& ket, const ProductOperator& op) {
  if (bra.size() != ket.size()) {
    throw std::invalid_argument("ed_matrix_element: state dimension mismatch");
  }
  return bra.cast<cplx>().dot(ed_apply(p, ket.cast<cplx>(), op));
}

cplx ed_expectation(const ModelParams& p, const Eigen::VectorXd& state,
                    const ProductOperator& op) {
  return ed_matrix_element(p, state, state, op);
}

}  // namespace rotor
