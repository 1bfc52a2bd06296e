#pragma once

#include <string>

namespace rotor {

enum class Boundary { open, periodic };

// Couplings of the rotor chain, all in units of the charging energy E_c:
//
//   H/E_c = sum_k [ n_k^2 - eg n_k - ej1 cos(phi_k) - ej2 cos(2 phi_k) ]
//         + sum_k [ eps n_k n_{k+1} - ej cos(phi_k - phi_{k+1}) ]
//
// ej is the inter-site Josephson coupling, ej1/ej2 the one- and two-charge
// on-site Josephson terms, eg a charge offset, eps a nearest-neighbour
// charging cross-term. Defaults eps = eg = 0 keep charge-parity symmetry.
struct ModelParams {
  int L = 0;
  int n_max = 4;
  double ej = 0.0;
  double ej1 = 0.0;
  double ej2 = 0.0;
  double eg = 0.0;
  double eps = 0.0;
  Boundary bc = Boundary::open;

  // True iff the global parity string commutes with H.
  bool parity_symmetric() const { return eg == 0.0 && ej1 == 0.0; }

  void validate() const;
  std::string describe() const;
};

}  // namespace rotor
