#include "rotor/idmrg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <utility>

#include "rotor/mpo.hpp"

namespace rotor {

namespace {

DenseTensor trivial_env3() {
  DenseTensor e({1, 1, 1});
  e.data()[0] = 1.0;
  return e;
}

DenseTensor grow_left(const DenseTensor& env, const DenseTensor& a,
                      const DenseTensor& w) {
  DenseTensor t = contract(env, a.conjugate(), {{0, 0}});
  t = contract(t, w, {{0, 0}, {2, 2}});
  return contract(t, a, {{0, 0}, {3, 1}});
}

DenseTensor grow_right(const DenseTensor& env, const DenseTensor& a,
                       const DenseTensor& w) {
  DenseTensor t = contract(env, a.conjugate(), {{0, 2}});
  t = contract(t, w, {{0, 1}, {3, 2}});
  return contract(t, a, {{0, 2}, {3, 1}});
}

// Multiply slices along one axis by real factors.
void scale_axis(DenseTensor& t, int axis, const std::vector<double>& f) {
  long after = 1;
  for (int k = axis + 1; k < t.rank(); ++k) after *= t.extent(k);
  const long block = t.extent(axis);
  const long before = t.size() / (after * block);
  cplx* d = t.data();
  for (long o = 0; o < before; ++o)
    for (long i = 0; i < block; ++i) {
      cplx* row = d + (o * block + i) * after;
      for (long j = 0; j < after; ++j) row[j] *= f[i];
    }
}

// Pseudo-inverse of a descending Schmidt spectrum; values below the relative
// cutoff are treated as exact zeros.
std::vector<double> pinv(const std::vector<double>& s) {
  std::vector<double> r(s.size(), 0.0);
  if (s.empty()) return r;
  const double cut = 1e-8 * s.front();
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] > cut) r[i] = 1.0 / s[i];
  return r;
}

double schmidt_distance(const std::vector<double>& a,
                        const std::vector<double>& b) {
  const std::size_t n = std::max(a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = i < a.size() ? a[i] : 0.0;
    const double db = i < b.size() ? b[i] : 0.0;
    acc += (da - db) * (da - db);
  }
  return std::sqrt(acc);
}

// Effective two-site Hamiltonian application, identical contraction order to
// the finite-chain engine.
DenseTensor two_site_apply(const DenseTensor& le, const DenseTensor& w1,
                           const DenseTensor& w2, const DenseTensor& re,
                           const DenseTensor& theta) {
  DenseTensor t = contract(le, theta, {{2, 0}});
  t = contract(t, w1, {{1, 0}, {2, 3}});
  t = contract(t, w2, {{3, 0}, {1, 3}});
  return contract(t, re, {{1, 2}, {3, 1}});
}

struct SplitCell {
  DenseTensor a, b;
  std::vector<double> lam;
};

// SVD of a normalized two-site tensor with the kept spectrum renormalized to
// unit weight.
SplitCell split_theta(DenseTensor theta, const TruncationSpec& spec) {
  const long l = theta.extent(0), d = theta.extent(1), r = theta.extent(3);
  TruncatedSvd sv = truncated_svd(std::move(theta).reshaped({l * d, d * r}), spec);
  const long chi = static_cast<long>(sv.singular_values.size());
  double kept = 0.0;
  for (double s : sv.singular_values) kept += s * s;
  const double inv = 1.0 / std::sqrt(kept);
  SplitCell out;
  out.lam = sv.singular_values;
  for (double& s : out.lam) s *= inv;
  out.a = std::move(sv.left).reshaped({l, d, chi});
  out.b = std::move(sv.right).reshaped({chi, d, r});
  return out;
}

}  // namespace

UniformMps idmrg_fixed_point(const ModelParams& params, const IdmrgOptions& opt) {
  // The fixed point only uses the bulk couplings; build the MPO on a short
  // open scratch chain and pick out the boundary and bulk tensors.
  ModelParams bulk = params;
  bulk.L = 4;
  bulk.bc = Boundary::open;
  bulk.validate();
  const Mpo m4 = build_hamiltonian(bulk);
  DenseTensor wl = m4.w[0];
  const DenseTensor& wb = m4.w[1];
  DenseTensor wr = m4.w[3];
  const long d = m4.site_dim();

  // Boundary vacuum selection: add the pinning field to the on-site blocks
  // of the two edge tensors (start-and-end slots of the boundary slices).
  if (opt.edge_pinning != 0.0) {
    const Eigen::MatrixXcd pin =
        -opt.edge_pinning * cos_phase_operator(params.n_max, 1).mat;
    const long wcols = wl.extent(1);
    for (long i = 0; i < d; ++i)
      for (long j = 0; j < d; ++j) {
        wl.data()[(0 * wcols + 0) * d * d + i * d + j] += pin(i, j);
        wr.data()[((wcols - 1) * 1 + 0) * d * d + i * d + j] += pin(i, j);
      }
  }

  UniformMps u;
  u.n_max = params.n_max;

  // First pair of sites: solve the L = 2 problem seeded with the polarized
  // phi = 0 product state (uniform in the charge basis).
  DenseTensor le = trivial_env3(), re = trivial_env3();
  DenseTensor theta({1, d, d, 1});
  for (long i = 0; i < theta.size(); ++i) theta.data()[i] = 1.0 / d;

  ApplyFn seed_apply = [&](const cplx* x, cplx* y) {
    DenseTensor tx({1, d, d, 1});
    std::copy(x, x + tx.size(), tx.data());
    DenseTensor t = two_site_apply(le, wl, wr, re, tx);
    std::copy(t.data(), t.data() + t.size(), y);
  };
  LanczosResult lr = lowest_eigenpair(seed_apply, d * d, theta.data(), opt.local);
  std::copy(lr.vector.begin(), lr.vector.end(), theta.data());
  double e_prev = lr.value;

  SplitCell cell = split_theta(std::move(theta), opt.trunc);
  le = grow_left(le, cell.a, wl);
  re = grow_right(re, cell.b, wr);
  std::vector<double> lam_edge{1.0};

  double density_prev = std::numeric_limits<double>::quiet_NaN();
  for (int step = 1; step <= opt.max_steps; ++step) {
    // Guess rotation: the previous wavefunction translated by one cell,
    // Λ b pinv(Λ_edge) a Λ.
    DenseTensor g = cell.b;
    scale_axis(g, 0, cell.lam);
    scale_axis(g, 2, pinv(lam_edge));
    DenseTensor guess = contract(g, cell.a, {{2, 0}});
    scale_axis(guess, 3, cell.lam);
    const double gn = guess.norm();
    if (gn > 0) guess = guess.scaled(1.0 / gn);

    const long chi = guess.extent(0);
    ApplyFn apply = [&](const cplx* x, cplx* y) {
      DenseTensor tx({chi, d, d, chi});
      std::copy(x, x + tx.size(), tx.data());
      DenseTensor t = two_site_apply(le, wb, wb, re, tx);
      std::copy(t.data(), t.data() + t.size(), y);
    };
    lr = lowest_eigenpair(apply, chi * d * d * chi, guess.data(), opt.local);
    DenseTensor solved({chi, d, d, chi});
    std::copy(lr.vector.begin(), lr.vector.end(), solved.data());

    const double density = 0.5 * (lr.value - e_prev);
    e_prev = lr.value;

    SplitCell next = split_theta(std::move(solved), opt.trunc);
    le = grow_left(le, next.a, wb);
    re = grow_right(re, next.b, wb);

    const double de = std::abs(density - density_prev);
    const double ds = schmidt_distance(next.lam, cell.lam);
    lam_edge = cell.lam;
    cell = std::move(next);
    u.energy_density = density;
    u.steps = step;
    density_prev = density;

    if (step >= opt.min_steps && de < opt.tol && ds < opt.schmidt_tol) {
      u.converged = true;
      break;
    }
  }

  u.a = std::move(cell.a);
  u.b = std::move(cell.b);
  u.schmidt_center = std::move(cell.lam);
  u.schmidt_edge = std::move(lam_edge);
  return u;
}

DenseTensor cell_tensor(const UniformMps& u) {
  if (!u.converged)
    throw std::invalid_argument("cell_tensor: fixed point is not converged");
  DenseTensor m = u.a;
  scale_axis(m, 2, u.schmidt_center);
  DenseTensor cell = contract(m, u.b, {{2, 0}});  // (chi_e, d, d, chi_e)
  scale_axis(cell, 3, pinv(u.schmidt_edge));
  return cell;
}

std::vector<cplx> transfer_eigenvalues(const UniformMps& u, Twist twist, int k) {
  if (!u.converged)
    throw std::invalid_argument(
        "transfer_eigenvalues: fixed point is not converged");
  if (k < 1) throw std::invalid_argument("transfer_eigenvalues: k must be >= 1");

  const DenseTensor bra = cell_tensor(u);

  // The parity string dresses exactly one layer; on both it would square
  // away since the phases are ±1.
  DenseTensor ket = bra;
  if (twist == Twist::parity_string) {
    std::vector<double> phase(u.site_dim());
    for (int q = 0; q < u.site_dim(); ++q)
      phase[q] = (std::abs(q - u.n_max) % 2 == 0) ? 1.0 : -1.0;
    scale_axis(ket, 1, phase);
    scale_axis(ket, 2, phase);
  }

  const long chi = bra.extent(0);
  const long dim = chi * chi;
  const DenseTensor brac = bra.conjugate();
  ApplyFn apply = [&](const cplx* x, cplx* y) {
    DenseTensor vx({chi, chi});
    std::copy(x, x + dim, vx.data());
    DenseTensor t = contract(brac, vx, {{0, 0}});        // (d, d, a', b)
    t = contract(t, ket, {{3, 0}, {0, 1}, {1, 2}});      // (a', b')
    std::copy(t.data(), t.data() + dim, y);
  };

  ArnoldiOptions ao;
  ao.k = static_cast<int>(std::min<long>(k, dim));
  ArnoldiResult ar = dominant_eigenvalues(apply, dim, ao);
  return ar.values;
}

double correlation_length(const UniformMps& u, Twist twist, std::string* note) {
  const std::vector<cplx> plain = transfer_eigenvalues(u, Twist::none, 2);
  const double l1 = std::abs(plain.front());

  double rate = 0.0;
  if (twist == Twist::none) {
    if (plain.size() < 2 || std::abs(plain[1]) <= 1e-14 * l1) {
      if (note) *note = "transfer map is numerically rank-one";
      return 0.0;
    }
    rate = std::abs(plain[1]) / l1;
  } else {
    const std::vector<cplx> tw = transfer_eigenvalues(u, twist, 1);
    rate = std::abs(tw.front()) / l1;
    if (rate <= 1e-14) {
      if (note) *note = "string-dressed transfer map is numerically rank-zero";
      return 0.0;
    }
  }
  if (rate >= 1.0 - 1e-12) {
    if (note) *note = "correlations do not decay at this bond dimension";
    return std::numeric_limits<double>::infinity();
  }
  return -2.0 / std::log(rate);
}

}  // namespace rotor
