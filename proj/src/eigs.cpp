#include "rotor/eigs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace rotor {

namespace {

using Vec = Eigen::VectorXcd;

Vec random_unit(long dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  for (long i = 0; i < dim; ++i) v[i] = cplx(gauss(rng), gauss(rng));
  v.normalize();
  return v;
}

}  // namespace

LanczosResult lowest_eigenpair(const ApplyFn& apply, long dim,
                               const cplx* warm_start,
                               const LanczosOptions& opt) {
  if (dim < 1) throw std::invalid_argument("lowest_eigenpair: dim must be >= 1");
  LanczosResult res;
  if (dim == 1) {
    cplx x(1, 0), y(0, 0);
    apply(&x, &y);
    res.value = y.real();
    res.vector = {cplx(1, 0)};
    res.residual = std::abs(y.imag());
    res.converged = true;
    res.iterations = 1;
    return res;
  }

  Vec v0;
  if (warm_start != nullptr) {
    v0 = Eigen::Map<const Vec>(warm_start, dim);
    const double n = v0.norm();
    if (n < 1e-14) v0 = random_unit(dim, opt.seed);
    else v0 /= n;
  } else {
    v0 = random_unit(dim, opt.seed);
  }

  const int m_max = static_cast<int>(std::min<long>(opt.restart, dim));
  std::vector<Vec> basis(m_max + 1);
  Eigen::MatrixXcd tmat(m_max, m_max);
  Vec w(dim), ritz = v0;
  double ritz_value = 0, scale = 1e-300;
  int matvecs = 0;

  while (matvecs < opt.max_iter) {
    // One restarted Lanczos block starting from the current best vector.
    basis[0] = ritz;
    tmat.setZero();
    int m = 0;
    for (; m < m_max && matvecs < opt.max_iter; ++m) {
      apply(basis[m].data(), w.data());
      ++matvecs;
      // The first orthogonalisation pass doubles as the projection row of
      // the subspace matrix; the second pass only polishes the remainder.
      for (int j = 0; j <= m; ++j) {
        const cplx h = basis[j].dot(w);
        tmat(m, j) = (j == m) ? cplx(h.real(), 0) : std::conj(h);
        w -= h * basis[j];
      }
      for (int j = 0; j <= m; ++j) w -= basis[j].dot(w) * basis[j];
      const double b = w.norm();
      if (b < 1e-13 * std::max(1.0, scale)) {
        ++m;
        break;  // invariant subspace found
      }
      if (m + 1 < m_max) tmat(m + 1, m) = b;
      basis[m + 1] = w / b;
    }

    // Rayleigh-Ritz on the full projected matrix (lower triangle), not an
    // assumed tridiagonal band: identical for clean Lanczos runs, but immune
    // to the garbage a near-invariant subspace feeds into the three-term
    // recurrence once the basis saturates.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        tmat.topLeftCorner(m, m));
    const Eigen::VectorXd& evals = es.eigenvalues();
    ritz_value = evals[0];
    scale = std::max(std::abs(evals[0]), std::abs(evals[m - 1]));

    ritz.setZero(dim);
    for (int i = 0; i < m; ++i) ritz += es.eigenvectors()(i, 0) * basis[i];
    ritz.normalize();

    apply(ritz.data(), w.data());
    ++matvecs;
    res.residual = (w - ritz_value * ritz).norm();
    if (res.residual <= opt.tol * std::max(1.0, scale)) {
      res.converged = true;
      break;
    }
  }

  res.value = ritz_value;
  res.vector.assign(ritz.data(), ritz.data() + dim);
  res.iterations = matvecs;
  return res;
}

ArnoldiResult dominant_eigenvalues(const ApplyFn& apply, long dim,
                                   const ArnoldiOptions& opt) {
  if (dim < 1) throw std::invalid_argument("dominant_eigenvalues: dim >= 1");
  if (opt.k < 1) throw std::invalid_argument("dominant_eigenvalues: k >= 1");
  const int k = static_cast<int>(std::min<long>(opt.k, dim));
  const int cap = static_cast<int>(std::min<long>(opt.max_subspace, dim));

  std::vector<Vec> basis;
  basis.reserve(cap + 1);
  basis.push_back(random_unit(dim, opt.seed));
  Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(cap + 1, cap);

  ArnoldiResult res;
  Vec w(dim);
  int m = 0;
  bool breakdown = false;

  while (m < cap && !breakdown) {
    const int target = std::min(cap, m + opt.block);
    for (; m < target; ++m) {
      apply(basis[m].data(), w.data());
      ++res.iterations;
      for (int j = 0; j <= m; ++j) {
        const cplx h = basis[j].dot(w);
        hess(j, m) = h;
        w -= h * basis[j];
      }
      // One reorthogonalisation pass keeps the basis clean.
      for (int j = 0; j <= m; ++j) {
        const cplx h = basis[j].dot(w);
        hess(j, m) += h;
        w -= h * basis[j];
      }
      const double b = w.norm();
      hess(m + 1, m) = b;
      if (b < 1e-13) {
        ++m;
        breakdown = true;  // exact invariant subspace
        break;
      }
      basis.push_back(w / b);
    }

    const int mm = m;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(hess.topLeftCorner(mm, mm));
    std::vector<int> order(mm);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
    });

    const int kk = std::min(k, mm);
    const double lead = std::abs(es.eigenvalues()[order[0]]);
    const double hlast = breakdown ? 0.0 : std::abs(hess(mm, mm - 1));
    std::vector<double> residuals(kk);
    bool all_ok = true;
    for (int i = 0; i < kk; ++i) {
      const auto& y = es.eigenvectors().col(order[i]);
      residuals[i] = hlast * std::abs(y[mm - 1]);
      all_ok &= residuals[i] <= opt.tol * std::max(lead, 1e-300);
    }

    if (all_ok || m >= cap || breakdown) {
      res.values.resize(kk);
      res.vectors.assign(kk, std::vector<cplx>());
      res.residuals = residuals;
      for (int i = 0; i < kk; ++i) {
        res.values[i] = es.eigenvalues()[order[i]];
        Vec x = Vec::Zero(dim);
        for (int j = 0; j < mm; ++j) {
          x += es.eigenvectors()(j, order[i]) * basis[j];
        }
        x.normalize();
        res.vectors[i].assign(x.data(), x.data() + dim);
      }
      res.converged = all_ok;
      break;
    }
  }
  return res;
}

}  // namespace rotor
