#include "rotor/dmrg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "rotor/tensor.hpp"

namespace rotor {

namespace {

DenseTensor trivial_env3() {
  DenseTensor e({1, 1, 1});
  e.data()[0] = 1.0;
  return e;
}

DenseTensor trivial_env2() {
  DenseTensor e({1, 1});
  e.data()[0] = 1.0;
  return e;
}

// Hamiltonian environments carry (bra_bond, mpo_bond, ket_bond).

DenseTensor grow_left(const DenseTensor& env, const DenseTensor& a,
                      const DenseTensor& w) {
  DenseTensor t = contract(env, a.conjugate(), {{0, 0}});  // (w, k, p', r')
  t = contract(t, w, {{0, 0}, {2, 2}});                    // (k, r', wr, p)
  return contract(t, a, {{0, 0}, {3, 1}});                 // (r', wr, r)
}

DenseTensor grow_right(const DenseTensor& env, const DenseTensor& a,
                       const DenseTensor& w) {
  DenseTensor t = contract(env, a.conjugate(), {{0, 2}});  // (w, k, l', p')
  t = contract(t, w, {{0, 1}, {3, 2}});                    // (k, l', wl, p)
  return contract(t, a, {{0, 2}, {3, 1}});                 // (l', wl, l)
}

// Overlap environments for an orthogonality constraint <v|psi> carry
// (v_bond, psi_bond).

DenseTensor ogrow_left(const DenseTensor& env, const DenseTensor& va,
                       const DenseTensor& pa) {
  DenseTensor t = contract(env, va.conjugate(), {{0, 0}});  // (pb, p, vr)
  return contract(t, pa, {{0, 0}, {1, 1}});                 // (vr, pr)
}

DenseTensor ogrow_right(const DenseTensor& env, const DenseTensor& va,
                        const DenseTensor& pa) {
  DenseTensor t = contract(va.conjugate(), env, {{2, 0}});  // (vl, p, pb)
  return contract(t, pa, {{1, 1}, {2, 2}});                 // (vl, pl)
}

// Projection of |v> onto the two-site frame of psi at bond k, laid out like
// theta (l, p1, p2, r). The overlap is then <v|psi> = sum g .* theta without
// further conjugation, and the penalty operator is w0 |conj(g)><conj(g)|.
DenseTensor penalty_vector(const DenseTensor& ml, const Mps& v, int k,
                           const DenseTensor& mr) {
  DenseTensor t = contract(ml, v.a[k].conjugate(), {{0, 0}});      // (l, p1, vm)
  t = contract(t, v.a[k + 1].conjugate(), {{2, 0}});               // (l, p1, p2, vr)
  return contract(t, mr, {{3, 0}});                                // (l, p1, p2, r)
}

void scale_rows_inplace(DenseTensor& m, const std::vector<double>& f) {
  const long rows = m.extent(0), cols = m.extent(1);
  cplx* d = m.data();
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) d[i * cols + j] *= f[i];
}

void scale_cols_inplace(DenseTensor& m, const std::vector<double>& f) {
  const long rows = m.extent(0), cols = m.extent(1);
  cplx* d = m.data();
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) d[i * cols + j] *= f[j];
}

}  // namespace

GroundStateResult ground_state(const Mpo& h, const DmrgOptions& opt,
                               const std::vector<Mps>& orthogonal_to,
                               const Mps* initial) {
  h.validate();
  const int L = h.L;
  const long d = h.site_dim();
  if (L < 2) throw std::invalid_argument("ground_state: need at least two sites");
  for (const Mps& v : orthogonal_to) {
    v.validate();
    if (v.L != L || v.n_max != h.n_max)
      throw std::invalid_argument(
          "ground_state: orthogonality constraint lives on a different lattice");
  }

  // Bond-dimension ramp: small early sweeps cost little and give the full-chi
  // sweeps a good starting point. The last entry repeats until convergence.
  std::vector<long> schedule = opt.chi_schedule;
  if (schedule.empty()) {
    for (long c = 16; c < opt.trunc.chi_max; c *= 2) schedule.push_back(c);
    schedule.push_back(opt.trunc.chi_max);
  }

  Mps psi;
  if (initial != nullptr) {
    psi = *initial;
    psi.validate();
    if (psi.L != L || psi.n_max != h.n_max)
      throw std::invalid_argument("ground_state: initial state does not match the MPO");
    recanonicalize(psi, 0);
    normalize(psi);
  } else {
    // A random start has weight in every symmetry sector, so sector-resolved
    // searches cannot get stuck on the wrong side of a conserved quantity.
    psi = random_mps(L, h.n_max, std::min<long>(8, opt.trunc.chi_max), opt.seed);
  }

  const double e_tol = opt.e_tol >= 0 ? opt.e_tol : 1e-9 * L;
  const int nv = static_cast<int>(orthogonal_to.size());

  // lenv[k] covers sites [0, k), renv[k] covers [k, L); the two-site problem
  // at bond k uses lenv[k] and renv[k + 2]. Only the environments a sweep is
  // about to consume are kept fresh.
  std::vector<DenseTensor> lenv(L + 1), renv(L + 1);
  lenv[0] = trivial_env3();
  renv[L] = trivial_env3();
  for (int k = L - 1; k >= 2; --k)
    renv[k] = grow_right(renv[k + 1], psi.a[k], h.w[k]);

  std::vector<std::vector<DenseTensor>> ol(nv), orr(nv);
  for (int i = 0; i < nv; ++i) {
    ol[i].resize(L + 1);
    orr[i].resize(L + 1);
    ol[i][0] = trivial_env2();
    orr[i][L] = trivial_env2();
    for (int k = L - 1; k >= 2; --k)
      orr[i][k] = ogrow_right(orr[i][k + 1], orthogonal_to[i].a[k], psi.a[k]);
  }

  auto update_bond = [&](int k, bool to_right, const TruncationSpec& spec) {
    DenseTensor theta = contract(psi.a[k], psi.a[k + 1], {{2, 0}});
    const long l = theta.extent(0), r = theta.extent(3);
    const long n = theta.size();

    std::vector<DenseTensor> gbar;
    gbar.reserve(nv);
    for (int i = 0; i < nv; ++i)
      gbar.push_back(penalty_vector(ol[i][k], orthogonal_to[i], k, orr[i][k + 2]));

    const DenseTensor& le = lenv[k];
    const DenseTensor& re = renv[k + 2];
    const DenseTensor& w1 = h.w[k];
    const DenseTensor& w2 = h.w[k + 1];
    ApplyFn apply = [&](const cplx* x, cplx* y) {
      DenseTensor tx({l, d, d, r});
      std::copy(x, x + n, tx.data());
      DenseTensor t = contract(le, tx, {{2, 0}});    // (l', wl, p1, p2, r)
      t = contract(t, w1, {{1, 0}, {2, 3}});         // (l', p2, r, wm, q1)
      t = contract(t, w2, {{3, 0}, {1, 3}});         // (l', r, q1, wr, q2)
      t = contract(t, re, {{1, 2}, {3, 1}});         // (l', q1, q2, r')
      std::copy(t.data(), t.data() + n, y);
      for (const DenseTensor& g : gbar) {
        const cplx* gd = g.data();
        cplx s = 0.0;
        for (long i = 0; i < n; ++i) s += gd[i] * x[i];
        s *= opt.penalty_weight;
        for (long i = 0; i < n; ++i) y[i] += std::conj(gd[i]) * s;
      }
    };

    LanczosResult lr = lowest_eigenpair(apply, n, theta.data(), opt.local);
    std::copy(lr.vector.begin(), lr.vector.end(), theta.data());

    TruncatedSvd sv = truncated_svd(std::move(theta).reshaped({l * d, d * r}), spec);
    const long chi = static_cast<long>(sv.singular_values.size());
    double kept = 0.0;
    for (double s : sv.singular_values) kept += s * s;
    const double inv = 1.0 / std::sqrt(kept);
    std::vector<double> f(chi);
    for (long i = 0; i < chi; ++i) f[i] = sv.singular_values[i] * inv;

    if (to_right) {
      psi.a[k] = std::move(sv.left).reshaped({l, d, chi});
      DenseTensor carry = std::move(sv.right);
      scale_rows_inplace(carry, f);
      psi.a[k + 1] = std::move(carry).reshaped({chi, d, r});
      psi.center = k + 1;
      lenv[k + 1] = grow_left(lenv[k], psi.a[k], w1);
      for (int i = 0; i < nv; ++i)
        ol[i][k + 1] = ogrow_left(ol[i][k], orthogonal_to[i].a[k], psi.a[k]);
    } else {
      psi.a[k + 1] = std::move(sv.right).reshaped({chi, d, r});
      DenseTensor carry = std::move(sv.left);
      scale_cols_inplace(carry, f);
      psi.a[k] = std::move(carry).reshaped({l, d, chi});
      psi.center = k;
      renv[k + 1] = grow_right(renv[k + 2], psi.a[k + 1], w2);
      for (int i = 0; i < nv; ++i)
        orr[i][k + 1] =
            ogrow_right(orr[i][k + 2], orthogonal_to[i].a[k + 1], psi.a[k + 1]);
    }
    psi.discarded[k] = sv.discarded_weight;
  };

  GroundStateResult out;
  ConvergenceReport& rep = out.report;
  double prev_e = std::numeric_limits<double>::quiet_NaN();

  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    TruncationSpec spec = opt.trunc;
    spec.chi_max = schedule[std::min<std::size_t>(sweep, schedule.size() - 1)];

    for (int k = 0; k <= L - 2; ++k) update_bond(k, true, spec);
    for (int k = L - 2; k >= 0; --k) update_bond(k, false, spec);

    const double e = energy_expectation(psi, h);
    rep.sweep_energies.push_back(e);
    rep.sweeps = sweep + 1;

    // Stationarity only counts once the ramp is over and at least one full
    // sweep ran at the final bond dimension.
    const bool settled = sweep + 1 > static_cast<int>(schedule.size());
    if (settled && sweep + 1 >= opt.min_sweeps && std::isfinite(prev_e) &&
        std::abs(e - prev_e) < e_tol) {
      rep.converged = true;
      break;
    }
    prev_e = e;
  }

  move_center(psi, 0);
  normalize(psi);
  out.energy = energy_expectation(psi, h);
  rep.max_discarded = 0.0;
  for (double w : psi.discarded) rep.max_discarded = std::max(rep.max_discarded, w);
  if (opt.compute_variance) rep.energy_variance = energy_variance(psi, h);
  out.psi = std::move(psi);
  return out;
}

GroundStateResult excited_in_sector(const ModelParams& params, int parity,
                                    const DmrgOptions& opt) {
  params.validate();
  if (parity != 1 && parity != -1)
    throw std::invalid_argument("excited_in_sector: parity must be +1 or -1");
  if (!params.parity_symmetric())
    throw std::invalid_argument(
        "excited_in_sector: charge parity is not conserved (eg or ej1 nonzero)");

  Mpo h = build_hamiltonian(params);
  // Level splitter: small against every coupling, huge against the energy
  // stationarity target, so the favoured sector wins without biasing it.
  const double w = opt.sector_splitter;
  if (!(w > 0))
    throw std::invalid_argument("excited_in_sector: sector_splitter must be positive");
  Mpo biased = mpo_add(
      h, scaled_parity_mpo(params.L, params.n_max, cplx(-w * parity, 0.0)));

  GroundStateResult res = ground_state(biased, opt);
  res.energy = energy_expectation(res.psi, h);
  res.parity =
      energy_expectation(res.psi, scaled_parity_mpo(params.L, params.n_max, 1.0));
  if (std::abs(res.parity - parity) > 1e-3)
    throw std::runtime_error(
        "excited_in_sector: converged into the wrong parity sector, <P> = " +
        std::to_string(res.parity));
  return res;
}

double energy_variance(const Mps& psi, const Mpo& h) {
  psi.validate();
  h.validate();
  if (psi.L != h.L || psi.n_max != h.n_max)
    throw std::invalid_argument("energy_variance: state and MPO do not match");

  // <H^2> through a two-layer sandwich (bra, mpo, mpo, ket).
  DenseTensor env({1, 1, 1, 1});
  env.data()[0] = 1.0;
  for (int k = 0; k < psi.L; ++k) {
    const DenseTensor& a = psi.a[k];
    const DenseTensor& w = h.w[k];
    DenseTensor t = contract(env, a.conjugate(), {{0, 0}});  // (w1, w2, k, p', r')
    t = contract(t, w, {{0, 0}, {3, 2}});                    // (w2, k, r', w1r, q)
    t = contract(t, w, {{0, 0}, {4, 2}});                    // (k, r', w1r, w2r, q2)
    env = contract(t, a, {{0, 0}, {4, 1}});                  // (r', w1r, w2r, r)
  }
  const double h2 = env.data()[0].real();
  const double e = energy_expectation(psi, h);
  return h2 - e * e;
}

}  // namespace rotor
