#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rotor/theory.hpp"

using namespace rotor;

TEST_CASE("coupling maps") {
  CHECK(beta_sq_from_K(1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(beta_sq_from_K(1.472) == doctest::Approx(0.736).epsilon(1e-14));
  CHECK(beta_sq_from_K(1e-9) == doctest::Approx(5e-10).epsilon(1e-14));
  CHECK_THROWS_AS(beta_sq_from_K(0.0), std::invalid_argument);
  CHECK_THROWS_AS(beta_sq_from_K(2.0), std::invalid_argument);
  CHECK_THROWS_AS(beta_sq_from_K(-1.0), std::invalid_argument);

  CHECK(nu_exponent(0.5) == doctest::Approx(1.75).epsilon(1e-14));
  CHECK(nu_exponent(0.4) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(nu_exponent(1e-8) == doctest::Approx(1.0).epsilon(1e-7));
  // nu >= 1 across the whole domain, approaching 1 only at the free end.
  for (double b = 0.01; b < 1.0; b += 0.01) CHECK(nu_exponent(b) >= 1.0);
  CHECK(nu_exponent(0.01) > 1.0);
  CHECK_THROWS_AS(nu_exponent(0.0), std::invalid_argument);
  CHECK_THROWS_AS(nu_exponent(1.0), std::invalid_argument);
}

TEST_CASE("sine-Gordon parameter bundle is self-consistent") {
  const SGParameters p = SGParameters::from_beta_sq(0.736);
  CHECK(p.xi == doctest::Approx(0.736 / 0.264).epsilon(1e-14));
  CHECK(p.nu == doctest::Approx((1.0 - 0.184) / 0.264).epsilon(1e-14));
  CHECK(p.nu == doctest::Approx(nu_exponent(p.beta_sq)).epsilon(1e-14));
  CHECK(p.xi / (1.0 + p.xi) == doctest::Approx(p.beta_sq).epsilon(1e-14));
  CHECK_THROWS_AS(SGParameters::from_beta_sq(1.2), std::invalid_argument);
}

TEST_CASE("eta parameter") {
  CHECK(eta_parameter(0.0, 0.1, 0.4) == 0.0);
  // ej1 = ej2 = 0.1 at nu = 1.5: 0.1 / 0.1^1.5 = 0.1^{-1/2}.
  CHECK(eta_parameter(0.1, 0.1, 0.4) ==
        doctest::Approx(std::pow(0.1, -0.5)).epsilon(1e-14));
  // Homogeneous of degree one in ej1.
  const double base = eta_parameter(0.05, 0.2, 0.5);
  CHECK(eta_parameter(3.0 * 0.05, 0.2, 0.5) ==
        doctest::Approx(3.0 * base).epsilon(1e-14));
  CHECK_THROWS_AS(eta_parameter(0.1, 0.0, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(eta_parameter(-0.1, 0.1, 0.4), std::invalid_argument);
}

TEST_CASE("leading-order string tension") {
  CHECK(string_tension_lo(0.5, 0.0) == 0.0);
  CHECK(string_tension_lo(0.5, 0.1) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(string_tension_lo(0.0, 0.3) == 0.0);
  CHECK_THROWS_AS(string_tension_lo(1.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(string_tension_lo(-0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(string_tension_lo(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("breather mass ratios") {
  // beta^2 = 0.4: xi = 2/3, first breather at 2 sin(pi/3) = sqrt(3).
  CHECK(breather_mass_ratio(0.4, 1) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  // Threshold: at beta^2 = 1/2 the first breather merges with 2M.
  CHECK(breather_mass_ratio(0.5, 1) == doctest::Approx(2.0).epsilon(1e-12));
  // Semiclassical limit: ratio -> pi * xi.
  const double b = 1e-4;
  const double xi = b / (1.0 - b);
  CHECK(breather_mass_ratio(b, 1) ==
        doctest::Approx(std::numbers::pi * xi).epsilon(1e-6));
  // Strictly below threshold anywhere inside the existence window.
  for (int i = 1; i <= 9; ++i)
    CHECK(breather_mass_ratio(0.05 * i, 1) < 2.0);
  // The tower cuts off at n * xi = 1: beta^2 = 0.2 gives xi = 1/4, so
  // n = 4 sits exactly at threshold and n = 5 does not exist.
  CHECK(breather_mass_ratio(0.2, 4) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(breather_mass_ratio(0.2, 5), std::invalid_argument);
  CHECK_THROWS_AS(breather_mass_ratio(0.4, 2), std::invalid_argument);
  CHECK_THROWS_AS(breather_mass_ratio(0.4, 0), std::invalid_argument);
}

TEST_CASE("airy zeros from the root finder") {
  // Reference magnitudes of the first zeros of Ai.
  CHECK(airy_zero(1) == doctest::Approx(2.338107410459767).epsilon(1e-10));
  CHECK(airy_zero(2) == doctest::Approx(4.087949444130971).epsilon(1e-9));
  CHECK(airy_zero(3) == doctest::Approx(5.520559828095551).epsilon(1e-9));
  CHECK(airy_zero(4) == doctest::Approx(6.786708090071759).epsilon(1e-8));
  CHECK(airy_zero(5) == doctest::Approx(7.944133587120853).epsilon(1e-8));
  for (int k = 1; k < 10; ++k) CHECK(airy_zero(k) < airy_zero(k + 1));
  CHECK(airy_zero(10) == doctest::Approx(12.828776752865757).epsilon(1e-7));
  CHECK_THROWS_AS(airy_zero(0), std::invalid_argument);
  CHECK_THROWS_AS(airy_zero(11), std::invalid_argument);
}

TEST_CASE("meson masses in the two-particle approximation") {
  const double m = 0.7, sigma = 0.04;
  const double m1 = meson_mass_ni2p(m, sigma, 1);
  CHECK(m1 == doctest::Approx(2.0 * m + std::pow(sigma, 2.0 / 3.0) *
                                            std::pow(m, -1.0 / 3.0) *
                                            airy_zero(1))
                  .epsilon(1e-14));
  // Binding energy scales as sigma^{2/3}.
  const double bind1 = meson_mass_ni2p(m, sigma, 1) - 2.0 * m;
  const double bind2 = meson_mass_ni2p(m, 2.0 * sigma, 1) - 2.0 * m;
  CHECK(bind2 / bind1 == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-12));
  // Deconfined limit.
  CHECK(meson_mass_ni2p(m, 1e-12, 1) == doctest::Approx(2.0 * m).epsilon(1e-7));
  // Monotone in level and tension.
  CHECK(meson_mass_ni2p(m, sigma, 2) > m1);
  CHECK(meson_mass_ni2p(m, sigma, 3) > meson_mass_ni2p(m, sigma, 2));
  CHECK(meson_mass_ni2p(m, 2.0 * sigma, 1) > m1);
  CHECK_THROWS_AS(meson_mass_ni2p(0.0, sigma, 1), std::invalid_argument);
  CHECK_THROWS_AS(meson_mass_ni2p(m, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(meson_mass_ni2p(m, sigma, 0), std::invalid_argument);
}
