#pragma once

#include <string>
#include <vector>

#include "rotor/dmrg.hpp"
#include "rotor/idmrg.hpp"
#include "rotor/model.hpp"
#include "rotor/mpo.hpp"
#include "rotor/mps.hpp"
#include "rotor/tensor.hpp"

namespace rotor {

// A measured series C(r) over strictly increasing separations, together with
// enough metadata to label plots and output files.
struct CorrelatorSeries {
  std::vector<double> r;
  std::vector<cplx> values;
  std::string label;   // operator content, e.g. "exp(i phi) pair"
  std::string source;  // state the series was measured on

  // Throws std::invalid_argument unless r is strictly increasing, values has
  // the same length and every entry is finite.
  void validate() const;
};

// <exp(i a phi_j) exp(-i a phi_k)> on a finite chain, 0 <= j < k < L.  The
// state need not be normalized; the result is divided by <psi|psi>.
cplx two_point(const Mps& psi, int a, int j, int k);

// two_point at the requested separations, with each pair placed symmetrically
// about the middle of the chain to push boundary effects to higher order.
CorrelatorSeries centered_two_point(const Mps& psi, int a,
                                    const std::vector<int>& rs);

// <exp(i a phi_0) exp(-i a phi_r)> on a uniform state at separations
// r = 2, 4, ..., 2*max_cells (operators on matching sublattice sites).  The
// chain of transfer maps is closed with the identity on the left and the
// edge Schmidt weights on the right, and normalized against an op-free chain
// of the same length so fixed-point imperfections cancel.
CorrelatorSeries uniform_two_point(const UniformMps& u, int a, int max_cells);

// Long-distance order parameter |<exp(i phi)>|: the square root of the
// plateau of uniform_two_point(a = 1).  A correlator that has died below
// 1e-10 by the far end means zero (order below ~1e-5 is beneath the
// resolution of the pipeline); otherwise a plateau means a relative drift
// below 1e-3 over the last decade of r.  Throws std::runtime_error when the
// correlator keeps drifting, which signals a critical state (e.g. ej1 =
// ej2 = 0) or a plateau beyond max_cells.
double vertex_expectation(const UniformMps& u, int max_cells = 60);

// (C(r) - V^2) / V^2 with V = vertex_expectation: the normalized connected
// correlator, whose decay rate per site equals 1/correlation_length.
// Requires a strictly positive order parameter.
CorrelatorSeries connected_normalized(const UniformMps& u, int max_cells = 60);

// Energy cost T(d) of a bare soliton pair stretched over d sites, measured
// as the energy of the twisted state minus ground_energy.  Both defect
// positions must stay at least L/4 sites away from the chain edges.
CorrelatorSeries string_tension_curve(const Mps& ground, const Mpo& h,
                                      double ground_energy, int j,
                                      const std::vector<int>& ds);

// Convenience wrapper: run DMRG for the ground state first.  Requires
// ej2 > 0, since without the pair-breaking term the string does not bind.
CorrelatorSeries string_tension_curve(const ModelParams& params, int j,
                                      const std::vector<int>& ds,
                                      const DmrgOptions& opt = {});

}  // namespace rotor
