#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rotor/eigs.hpp"
#include "rotor/model.hpp"
#include "rotor/svd.hpp"
#include "rotor/tensor.hpp"

namespace rotor {

// Translation-invariant state from infinite DMRG with a two-site unit cell:
// ... a Λc b Λe a Λc b Λe ... with `a` left-isometric, `b` right-isometric,
// Λc the central-bond and Λe the cell-edge Schmidt values. The model is
// invariant under single-site shifts, so both spectra agree at the fixed
// point; correlation lengths are reported in single-site units.
struct UniformMps {
  int n_max = 0;
  DenseTensor a;                      // (chi_e, d, chi_c)
  DenseTensor b;                      // (chi_c, d, chi_e)
  std::vector<double> schmidt_center;
  std::vector<double> schmidt_edge;
  double energy_density = 0.0;
  bool converged = false;
  int steps = 0;

  int site_dim() const { return 2 * n_max + 1; }
};

struct IdmrgOptions {
  TruncationSpec trunc;
  double tol = 1e-9;          // energy-density stationarity between steps
  double schmidt_tol = 1e-6;  // L2 drift of the Schmidt spectrum
  int max_steps = 600;
  int min_steps = 8;
  // -edge_pinning * cos(phi) on the two receding boundary sites. In a
  // phase-ordered regime every intermediate finite chain then has a unique
  // polarized ground state, so the iteration tracks one injective vacuum
  // instead of the symmetric two-vacua superposition (whose transfer map
  // would be degenerate and yield no correlation lengths). Bulk couplings,
  // and with them the fixed-point cell, are untouched. 0 disables.
  double edge_pinning = 0.2;
  LanczosOptions local;
};

// Grow the chain from the middle two sites outward until the energy density
// and the Schmidt spectrum are stationary. params.L and params.bc are
// ignored (thermodynamic limit). The first solve is seeded with a polarized
// phi = 0 product state so that in an ordered phase the iteration settles on
// one vacuum instead of a fragile superposition of both. Non-convergence
// (e.g. at a critical point) is flagged, never thrown.
UniformMps idmrg_fixed_point(const ModelParams& params,
                             const IdmrgOptions& opt = {});

enum class Twist { none, parity_string };

// Plain MPS tensor of one repeating cell, a Λc b pinv(Λe), shaped
// (chi_e, physical, physical, chi_e). Left-isometric at the fixed point, so
// the left transfer fixed point is the identity and the right one is
// diag(Λe^2). Requires a converged fixed point.
DenseTensor cell_tensor(const UniformMps& u);

// Dominant eigenvalues of the two-site cell transfer map. With
// Twist::parity_string the ket layer carries e^{i pi n} on every physical
// leg, the transfer operator of the global parity string. Requires a
// converged fixed point. At convergence the leading undressed eigenvalue is
// 1 up to truncation-level error.
std::vector<cplx> transfer_eigenvalues(const UniformMps& u, Twist twist,
                                       int k);

// Correlation length in lattice sites. Twist::none reads the neutral
// (breather/meson) length from the subleading undressed eigenvalue,
// xi = -2 / ln|lambda_2 / lambda_1|. Twist::parity_string reads the
// topological (soliton) length from the decay rate of the parity-string
// correlator, xi = -2 / ln(|lambda_1^string| / |lambda_1|). A numerically
// rank-one map yields 0, non-decaying correlations yield infinity; both are
// explained through `note` when given.
double correlation_length(const UniformMps& u, Twist twist,
                          std::string* note = nullptr);

}  // namespace rotor
