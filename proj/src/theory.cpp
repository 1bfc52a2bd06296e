#include "rotor/theory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rotor {

namespace {

void check_beta_sq(double beta_sq, const char* who) {
  if (!(beta_sq > 0.0 && beta_sq < 1.0))
    throw std::invalid_argument(std::string(who) +
                                ": beta_sq must lie in (0,1)");
}

// Ai through its two Maclaurin solutions; accurate on the zero range we
// bracket (|x| up to ~25, where the alternating series still leaves well
// over eight significant digits).
double airy_ai(double x) {
  constexpr double c1 = 0.3550280538878172;  // Ai(0)
  constexpr double c2 = 0.2588194037928068;  // -Ai'(0)
  const double x3 = x * x * x;
  double f = 1.0, g = x;
  double tf = 1.0, tg = x;
  for (int k = 0; k < 400; ++k) {
    tf *= x3 / ((3 * k + 2) * (3 * k + 3));
    tg *= x3 / ((3 * k + 3) * (3 * k + 4));
    f += tf;
    g += tg;
    if (std::abs(tf) < 1e-300 && std::abs(tg) < 1e-300) break;
  }
  return c1 * f - c2 * g;
}

}  // namespace

SGParameters SGParameters::from_beta_sq(double beta_sq) {
  check_beta_sq(beta_sq, "SGParameters");
  SGParameters p;
  p.beta_sq = beta_sq;
  p.xi = beta_sq / (1.0 - beta_sq);
  p.nu = (1.0 - beta_sq / 4.0) / (1.0 - beta_sq);
  return p;
}

double beta_sq_from_K(double K) {
  if (!(K > 0.0 && K < 2.0))
    throw std::invalid_argument("beta_sq_from_K: K must lie in (0,2)");
  return K / 2.0;
}

double nu_exponent(double beta_sq) {
  check_beta_sq(beta_sq, "nu_exponent");
  return (1.0 - beta_sq / 4.0) / (1.0 - beta_sq);
}

double eta_parameter(double ej1, double ej2, double beta_sq) {
  if (ej2 <= 0.0)
    throw std::invalid_argument("eta_parameter: ej2 must be > 0");
  if (ej1 < 0.0)
    throw std::invalid_argument("eta_parameter: ej1 must be >= 0");
  return ej1 / std::pow(ej2, nu_exponent(beta_sq));
}

double string_tension_lo(double vertex, double ej1) {
  if (!(vertex >= 0.0 && vertex <= 1.0))
    throw std::invalid_argument("string_tension_lo: vertex must be in [0,1]");
  if (ej1 < 0.0)
    throw std::invalid_argument("string_tension_lo: ej1 must be >= 0");
  return 2.0 * vertex * ej1;
}

double breather_mass_ratio(double beta_sq, int n) {
  check_beta_sq(beta_sq, "breather_mass_ratio");
  if (n < 1)
    throw std::invalid_argument("breather_mass_ratio: index must be >= 1");
  const double xi = beta_sq / (1.0 - beta_sq);
  if (n * xi > 1.0 + 1e-12)
    throw std::invalid_argument(
        "breather_mass_ratio: breather " + std::to_string(n) +
        " does not exist at this coupling (n * xi > 1)");
  return 2.0 * std::sin(std::numbers::pi * n * xi / 2.0);
}

double airy_zero(int k) {
  // The Maclaurin evaluation of Ai cancels catastrophically past |x| ~ 13,
  // so only the first ten zeros (z_10 = 12.83) are exposed.
  if (k < 1 || k > 10)
    throw std::invalid_argument("airy_zero: index must be in [1,10]");
  // Asymptotic location of the k-th zero, then bisection on Ai(-z).
  const double t = 3.0 * std::numbers::pi * (4 * k - 1) / 8.0;
  const double guess = std::pow(t, 2.0 / 3.0) * (1.0 + 5.0 / (48.0 * t * t));
  double lo = guess - 0.25, hi = guess + 0.25;
  double flo = airy_ai(-lo), fhi = airy_ai(-hi);
  if (flo * fhi > 0.0) {  // widen once; the asymptotic is never this far off
    lo = guess - 0.5;
    hi = guess + 0.5;
    flo = airy_ai(-lo);
    fhi = airy_ai(-hi);
    if (flo * fhi > 0.0)
      throw std::runtime_error("airy_zero: failed to bracket the zero");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = airy_ai(-mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
    if (hi - lo < 1e-15 * guess) break;
  }
  return 0.5 * (lo + hi);
}

double meson_mass_ni2p(double soliton_mass, double sigma, int k) {
  if (soliton_mass <= 0.0)
    throw std::invalid_argument("meson_mass_ni2p: soliton mass must be > 0");
  if (sigma <= 0.0)
    throw std::invalid_argument("meson_mass_ni2p: tension must be > 0");
  return 2.0 * soliton_mass + std::pow(sigma, 2.0 / 3.0) *
                                  std::pow(soliton_mass, -1.0 / 3.0) *
                                  airy_zero(k);
}

}  // namespace rotor
