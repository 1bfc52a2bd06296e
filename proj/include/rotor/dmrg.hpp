#pragma once

#include <cstdint>
#include <vector>

#include "rotor/eigs.hpp"
#include "rotor/model.hpp"
#include "rotor/mpo.hpp"
#include "rotor/mps.hpp"
#include "rotor/svd.hpp"

namespace rotor {

struct DmrgOptions {
  TruncationSpec trunc;            // final bond-dimension policy
  std::vector<long> chi_schedule;  // per-sweep ramp; empty = automatic
  int max_sweeps = 24;
  int min_sweeps = 3;
  double e_tol = -1.0;             // energy stationarity; < 0 = 1e-9 * L
  std::uint64_t seed = 5;          // random initial state
  LanczosOptions local;            // local two-site eigensolver budget
  double penalty_weight = 25.0;    // level shift for orthogonality penalties
  double sector_splitter = 1e-3;   // w in the -w*P sector-targeting bias
  bool compute_variance = true;    // <H^2>-<H>^2 in the final report
};

struct ConvergenceReport {
  std::vector<double> sweep_energies;  // measured after each full sweep
  double energy_variance = 0.0;        // <H^2> - <H>^2 of the final state
  double max_discarded = 0.0;          // worst bond truncation, final sweep
  bool converged = false;
  int sweeps = 0;
};

struct GroundStateResult {
  Mps psi;
  double energy = 0.0;                 // measured on the returned state
  double parity = 0.0;                 // <P>, filled by excited_in_sector
  ConvergenceReport report;
};

// Two-site DMRG ground-state search. States in `orthogonal_to` are penalised
// with +penalty_weight inside every local problem, which targets the lowest
// state orthogonal to all of them. Non-convergence is flagged in the report,
// never thrown; the best state found is always returned in canonical form.
GroundStateResult ground_state(const Mpo& h, const DmrgOptions& opt = {},
                               const std::vector<Mps>& orthogonal_to = {},
                               const Mps* initial = nullptr);

// Lowest state in a charge-parity sector (parity = +1 or -1): runs DMRG on
// H - w * parity * P with the small level splitter w = sector_splitter, then
// re-measures energy and <P> with the bare Hamiltonian. The bias can only
// overturn a sector ordering smaller than 2w, so the working domain is the
// quasi-degenerate doublet regime; within the doublet the result is exact in
// w because H and P commute. Requires a parity-symmetric model; a final
// sector mismatch beyond 1e-3 throws.
GroundStateResult excited_in_sector(const ModelParams& params, int parity,
                                    const DmrgOptions& opt = {});

// <H^2> - <H>^2 through a double MPO sandwich; the convergence figure of
// merit reported by ground_state.
double energy_variance(const Mps& psi, const Mpo& h);

}  // namespace rotor
