#pragma once

namespace rotor {

// The three equivalent parametrizations of the sine-Gordon coupling.
//   xi = beta_sq / (1 - beta_sq)   and   nu = (1 - beta_sq/4) / (1 - beta_sq)
struct SGParameters {
  double beta_sq = 0.0;
  double xi = 0.0;
  double nu = 0.0;

  // beta_sq must lie in (0,1); the other two fields follow from it.
  static SGParameters from_beta_sq(double beta_sq);
};

// beta^2 = K/2 for Luttinger parameter K in (0,2).
double beta_sq_from_K(double K);

// Scaling dimension exponent nu = (1 - beta_sq/4)/(1 - beta_sq), >= 1 on
// (0,1) with equality only in the free limit.
double nu_exponent(double beta_sq);

// Dimensionless ratio of the two cosine couplings, eta = ej1 / ej2^nu.
// Homogeneous of degree one in ej1; requires ej2 > 0 and ej1 >= 0.
double eta_parameter(double ej1, double ej2, double beta_sq);

// Leading-order string tension 2 * vertex * ej1, with `vertex` the order
// parameter <e^{i phi}> measured at ej1 = 0.  Units: energy per site.
double string_tension_lo(double vertex, double ej1);

// Breather-to-soliton mass ratio m_n / M = 2 sin(pi n xi / 2).  The n-th
// breather exists only while n * xi <= 1 (at equality it sits exactly at
// the two-soliton threshold, ratio 2).
double breather_mass_ratio(double beta_sq, int n);

// Magnitude of the k-th zero of the Airy function Ai, found by bracketed
// bisection on the Maclaurin series (k up to 10; z_1 = 2.33811...).
double airy_zero(int k);

// Non-interacting two-particle meson mass: two mass-M solitons bound by a
// linear potential of tension sigma occupy the odd Airy levels,
//   m_k = 2 M + sigma^{2/3} M^{-1/3} z_k.
double meson_mass_ni2p(double soliton_mass, double sigma, int k);

}  // namespace rotor
