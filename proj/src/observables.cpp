#include "rotor/observables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rotor/local_algebra.hpp"

namespace rotor {

namespace {

DenseTensor op_tensor(const Eigen::MatrixXcd& m) {
  const long d = m.rows();
  DenseTensor t({d, d});
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) t.data()[i * d + j] = m(i, j);
  return t;
}

// Site tensor with a one-body operator applied to the physical leg.
DenseTensor apply_onsite(const DenseTensor& op, const DenseTensor& site,
                         int axis) {
  DenseTensor t = contract(op, site, {{1, axis}});
  // contract puts the operator's output leg first; rotate it back in place.
  std::vector<int> order(t.rank());
  int src = 1;
  for (int i = 0; i < t.rank(); ++i) order[i] = (i == axis) ? 0 : src++;
  return permute(t, order);
}

}  // namespace

void CorrelatorSeries::validate() const {
  if (values.size() != r.size())
    throw std::invalid_argument(
        "CorrelatorSeries: separations and values differ in length");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i]) || !std::isfinite(values[i].real()) ||
        !std::isfinite(values[i].imag()))
      throw std::invalid_argument("CorrelatorSeries: non-finite entry");
    if (i > 0 && r[i] <= r[i - 1])
      throw std::invalid_argument(
          "CorrelatorSeries: separations must be strictly increasing");
  }
}

cplx two_point(const Mps& psi, int a, int j, int k) {
  psi.validate();
  if (j < 0 || k <= j || k >= psi.L)
    throw std::invalid_argument("two_point: need 0 <= j < k < L");
  const LocalOperator ea = phase_raise_operator(psi.n_max, a);
  const DenseTensor oj = op_tensor(ea.mat);
  const DenseTensor ok = op_tensor(ea.dagger().mat);

  DenseTensor env({1, 1});
  env.data()[0] = 1.0;
  DenseTensor nrm = env;
  for (int i = 0; i < psi.L; ++i) {
    const DenseTensor bra = psi.a[i].conjugate();
    DenseTensor ket = psi.a[i];
    if (i == j) ket = apply_onsite(oj, ket, 1);
    if (i == k) ket = apply_onsite(ok, ket, 1);
    DenseTensor t = contract(env, bra, {{0, 0}});  // (r_ket, p, r_bra)
    env = contract(t, ket, {{0, 0}, {1, 1}});
    t = contract(nrm, psi.a[i].conjugate(), {{0, 0}});
    nrm = contract(t, psi.a[i], {{0, 0}, {1, 1}});
  }
  return env.data()[0] / nrm.data()[0];
}

CorrelatorSeries centered_two_point(const Mps& psi, int a,
                                    const std::vector<int>& rs) {
  CorrelatorSeries out;
  out.label = "exp(i a phi) pair, a = " + std::to_string(a);
  out.source = "finite chain, L = " + std::to_string(psi.L);
  for (int r : rs) {
    const int j = (psi.L - r) / 2;
    out.r.push_back(static_cast<double>(r));
    out.values.push_back(two_point(psi, a, j, j + r));
  }
  out.validate();
  return out;
}

CorrelatorSeries uniform_two_point(const UniformMps& u, int a, int max_cells) {
  if (max_cells < 1)
    throw std::invalid_argument("uniform_two_point: max_cells must be >= 1");
  const DenseTensor cell = cell_tensor(u);  // rejects unconverged states
  const DenseTensor bra = cell.conjugate();
  const long chi = cell.extent(0);

  const LocalOperator ea = phase_raise_operator(u.n_max, a);
  const DenseTensor cell_o = apply_onsite(op_tensor(ea.mat), cell, 1);
  const DenseTensor cell_od =
      apply_onsite(op_tensor(ea.dagger().mat), cell, 1);

  // X carries the contracted (bra, ket) environment left of the current cell.
  auto step = [&](const DenseTensor& x, const DenseTensor& ket) {
    DenseTensor t = contract(bra, x, {{0, 0}});      // (d, d, a', b)
    return contract(t, ket, {{3, 0}, {0, 1}, {1, 2}});  // (a', b')
  };
  auto close = [&](const DenseTensor& x) {  // trace against diag(Λe^2)
    cplx s = 0.0;
    for (long i = 0; i < chi; ++i)
      s += x.data()[i * chi + i] * u.schmidt_edge[i] * u.schmidt_edge[i];
    return s;
  };

  DenseTensor eye({chi, chi});
  for (long i = 0; i < chi; ++i) eye.data()[i * chi + i] = 1.0;

  CorrelatorSeries out;
  out.label = "exp(i a phi) pair, a = " + std::to_string(a);
  out.source = "uniform cell, chi = " + std::to_string(chi);
  DenseTensor xo = step(eye, cell_o);  // operator chain
  DenseTensor xn = step(eye, cell);    // bare chain of equal length
  for (int c = 1; c <= max_cells; ++c) {
    out.r.push_back(2.0 * c);
    out.values.push_back(close(step(xo, cell_od)) / close(step(xn, cell)));
    if (c < max_cells) {
      xo = step(xo, cell);
      xn = step(xn, cell);
    }
  }
  out.validate();
  return out;
}

double vertex_expectation(const UniformMps& u, int max_cells) {
  const CorrelatorSeries c = uniform_two_point(u, 1, max_cells);

  // Disordered: the correlator has died off by the far end. The threshold
  // sits above the ~1e-12 floor a boundary-pinned but symmetric state keeps
  // as a convergence residual, so order parameters below ~1e-5 read as zero.
  if (std::abs(c.values.back()) < 1e-10) return 0.0;

  // Otherwise scan the last decade of separations for a plateau.
  const double r_lo = c.r.back() / 10.0;
  double mx = 0.0, mn = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.r.size(); ++i) {
    if (c.r[i] < r_lo) continue;
    const double v = std::abs(c.values[i]);
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  if ((mx - mn) / mx >= 1e-3) {
    std::ostringstream msg;
    msg << "vertex_expectation: no plateau up to r = " << c.r.back()
        << " (drift " << (mx - mn) / mx
        << "); the state is likely critical (ej1 = ej2 = 0) or the plateau "
           "lies beyond this window";
    throw std::runtime_error(msg.str());
  }
  return std::sqrt(std::max(0.0, c.values.back().real()));
}

CorrelatorSeries connected_normalized(const UniformMps& u, int max_cells) {
  const double v = vertex_expectation(u, max_cells);
  if (v <= 0.0)
    throw std::invalid_argument(
        "connected_normalized: order parameter vanishes, nothing to "
        "normalize against");
  CorrelatorSeries out = uniform_two_point(u, 1, max_cells);
  for (cplx& val : out.values) val = (val.real() - v * v) / (v * v);
  out.label = "normalized connected " + out.label;
  return out;
}

CorrelatorSeries string_tension_curve(const Mps& ground, const Mpo& h,
                                      double ground_energy, int j,
                                      const std::vector<int>& ds) {
  ground.validate();
  h.validate();
  if (ds.empty())
    throw std::invalid_argument("string_tension_curve: no separations");
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (ds[i] < 0 || (i > 0 && ds[i] <= ds[i - 1]))
      throw std::invalid_argument(
          "string_tension_curve: separations must be non-negative and "
          "strictly increasing");
  const int L = ground.L;
  const int margin = L / 4;
  if (j < margin || L - 1 - (j + ds.back()) < margin)
    throw std::invalid_argument(
        "string_tension_curve: defects must stay at least L/4 sites from "
        "the edges");

  CorrelatorSeries out;
  out.label = "bare soliton pair energy";
  out.source = "finite chain, L = " + std::to_string(L);
  for (int d : ds) {
    const ProductOperator pair =
        build_soliton_pair(L, j, d, 0.0, 1, ground.n_max);
    const auto [twisted, pre_norm] = apply_product_operator(ground, pair);
    (void)pre_norm;  // the bare string is unitary
    out.r.push_back(static_cast<double>(d));
    out.values.push_back(energy_expectation(twisted, h) - ground_energy);
  }
  out.validate();
  return out;
}

CorrelatorSeries string_tension_curve(const ModelParams& params, int j,
                                      const std::vector<int>& ds,
                                      const DmrgOptions& opt) {
  params.validate();
  if (params.ej2 <= 0.0)
    throw std::invalid_argument(
        "string_tension_curve: needs ej2 > 0, otherwise the pair is "
        "deconfined and the curve is flat");
  const Mpo h = build_hamiltonian(params);
  const GroundStateResult gs = ground_state(h, opt);
  return string_tension_curve(gs.psi, h, gs.energy, j, ds);
}

}  // namespace rotor
