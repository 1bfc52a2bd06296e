#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotor/model.hpp"
#include "rotor/observables.hpp"

namespace rotor {

// Inclusive window on the abscissa of a fit, in the same units as the data.
struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  Eigen::MatrixXd covariance;  // of the fitted model parameters, PSD
  double r_squared = 0.0;
  double window_lo = 0.0;  // range of the points actually used
  double window_hi = 0.0;
  double value = 0.0;  // the derived physical parameter of the fit
  bool flagged = false;
  std::string note;
};

// log C vs log r over the window; value = K = -2 * slope, the Luttinger
// parameter of a half-integer-charge correlator.  Needs >= 4 points with
// strictly positive real parts inside the window.
FitResult fit_power_law(const CorrelatorSeries& c, FitWindow w);

// log V vs log ej2 over >= 4 positive points; the slope p fixes the vertex
// dimension through value = beta^2 = 4p / (1 + 4p).
FitResult fit_vertex_scaling(const std::vector<double>& ej2,
                             const std::vector<double>& vertex);

// Ground-state energies against chain length at a critical point:
//   open:      E0(L) = e0 L + b - pi u / (24 L)
//   periodic:  E0(L) = e0 L     - pi u / (6 L)
// for central charge 1.  slope = e0, intercept = b, value = u; a negative
// velocity is flagged.  Needs >= 4 sizes.
FitResult fit_casimir(const std::vector<int>& sizes,
                      const std::vector<double>& energies, Boundary bc);

// T(d) against d; slope = value = string tension, the intercept absorbs the
// d-independent pair-creation cost.  Poor linearity is flagged but the
// tension is still returned.  Needs >= 4 separations in the window.
FitResult fit_string_tension(const CorrelatorSeries& tension,
                             FitWindow w = {4.0, 12.0});

// log((m - 2M)/M) vs log eta for meson masses m just above the two-soliton
// threshold 2M; value = the scaling exponent.  Masses at or below threshold
// are rejected.
FitResult fit_meson_scaling(const std::vector<double>& eta,
                            const std::vector<double>& masses,
                            double soliton_mass);

}  // namespace rotor
