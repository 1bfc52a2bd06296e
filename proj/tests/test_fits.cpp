#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rotor/ed.hpp"
#include "rotor/fits.hpp"

using namespace rotor;

namespace {

CorrelatorSeries series_from(const std::vector<double>& r,
                             const std::vector<double>& v) {
  CorrelatorSeries c;
  c.r = r;
  for (double x : v) c.values.push_back(cplx(x));
  c.label = "synthetic";
  c.source = "synthetic";
  return c;
}

bool psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  return eig.eigenvalues().minCoeff() >= -1e-12;
}

}  // namespace

TEST_CASE("power law fit is exact on synthetic data") {
  std::vector<double> r, inv, frac;
  for (int i = 2; i <= 20; ++i) {
    r.push_back(i);
    inv.push_back(1.0 / i);
    frac.push_back(3.0 * std::pow(i, -0.35));
  }

  const FitResult ka = fit_power_law(series_from(r, inv), {2.0, 20.0});
  CHECK(std::abs(ka.value - 2.0) <= 1e-10);
  CHECK(std::abs(ka.intercept) <= 1e-10);
  CHECK(ka.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(psd(ka.covariance));

  const FitResult kb = fit_power_law(series_from(r, frac), {2.0, 20.0});
  CHECK(std::abs(kb.value - 0.7) <= 1e-10);
  CHECK(std::abs(kb.intercept - std::log(3.0)) <= 1e-10);

  // Points outside the window must not contribute: poison them.
  std::vector<double> spiked = inv;
  spiked.front() = 1e6;
  spiked.back() = -5.0;
  const FitResult kc = fit_power_law(series_from(r, spiked), {4.0, 12.0});
  CHECK(std::abs(kc.value - 2.0) <= 1e-10);
  CHECK(kc.window_lo == doctest::Approx(4.0));
  CHECK(kc.window_hi == doctest::Approx(12.0));

  CHECK_THROWS_AS(fit_power_law(series_from(r, inv), {2.0, 4.5}),
                  std::invalid_argument);  // 3 points only
  std::vector<double> touched = inv;
  touched[5] = 0.0;
  CHECK_THROWS_AS(fit_power_law(series_from(r, touched), {2.0, 20.0}),
                  std::invalid_argument);
}

TEST_CASE("vertex scaling fit inverts the exponent") {
  std::vector<double> ej2, v;
  for (double x : {0.01, 0.02, 0.04, 0.08, 0.16}) {
    ej2.push_back(x);
    v.push_back(2.0 * std::pow(x, 0.25));
  }
  const FitResult f = fit_vertex_scaling(ej2, v);
  CHECK(std::abs(f.slope - 0.25) <= 1e-10);
  CHECK(std::abs(f.value - 0.5) <= 1e-10);  // beta^2 = 4p/(1+4p)
  CHECK_FALSE(f.flagged);
  CHECK(psd(f.covariance));

  // A decreasing trend has no vertex-scaling reading; it is flagged.
  std::vector<double> down = {1.0, 0.8, 0.6, 0.4, 0.2};
  CHECK(fit_vertex_scaling(ej2, down).flagged);

  CHECK_THROWS_AS(fit_vertex_scaling({0.1, 0.2, 0.3}, {1.0, 1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_vertex_scaling(ej2, {1.0, 1.0}), std::invalid_argument);
  std::vector<double> neg = v;
  neg[2] = -1.0;
  CHECK_THROWS_AS(fit_vertex_scaling(ej2, neg), std::invalid_argument);
}

TEST_CASE("casimir fit recovers the velocity exactly") {
  const double pi = std::numbers::pi;
  std::vector<int> sizes = {8, 12, 16, 20, 24, 32};
  std::vector<double> open_e, per_e;
  for (int l : sizes) {
    open_e.push_back(0.7 * l + 0.3 - pi * 1.0 / (24.0 * l));
    per_e.push_back(-0.2 * l - pi * 0.8 / (6.0 * l));
  }

  const FitResult fo = fit_casimir(sizes, open_e, Boundary::open);
  CHECK(std::abs(fo.value - 1.0) <= 1e-10);
  CHECK(std::abs(fo.slope - 0.7) <= 1e-10);
  CHECK(std::abs(fo.intercept - 0.3) <= 1e-10);
  CHECK_FALSE(fo.flagged);
  CHECK(psd(fo.covariance));

  const FitResult fp = fit_casimir(sizes, per_e, Boundary::periodic);
  CHECK(std::abs(fp.value - 0.8) <= 1e-10);
  CHECK(std::abs(fp.slope + 0.2) <= 1e-10);
  CHECK(fp.intercept == 0.0);

  // A positive 1/L coefficient means negative velocity: flagged.
  std::vector<double> wrong;
  for (int l : sizes) wrong.push_back(0.1 * l + pi * 0.5 / (24.0 * l));
  const FitResult fw = fit_casimir(sizes, wrong, Boundary::open);
  CHECK(fw.flagged);
  CHECK(fw.value == doctest::Approx(-0.5).epsilon(1e-10));

  CHECK_THROWS_AS(fit_casimir({4, 6, 8}, {1.0, 2.0, 3.0}, Boundary::open),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_casimir(sizes, {1.0, 2.0}, Boundary::open),
                  std::invalid_argument);
}

TEST_CASE("casimir velocity is stable against exact periodic spectra") {
  // Free critical point; the 1/L coefficient must give the same velocity
  // whichever block of sizes feeds the fit.
  std::vector<int> sizes = {4, 6, 8, 10, 12};
  std::vector<double> e0;
  for (int l : sizes) {
    ModelParams p;
    p.L = l;
    p.n_max = 1;
    p.ej = 2.0;
    p.bc = Boundary::periodic;
    const EdResult r = lowest_k(p, EdOptions{});
    REQUIRE(r.converged);
    e0.push_back(r.values[0]);
  }
  const FitResult lo = fit_casimir({sizes.begin(), sizes.end() - 1},
                                   {e0.begin(), e0.end() - 1},
                                   Boundary::periodic);
  const FitResult hi = fit_casimir({sizes.begin() + 1, sizes.end()},
                                   {e0.begin() + 1, e0.end()},
                                   Boundary::periodic);
  CHECK(lo.value > 0.0);
  CHECK(hi.value > 0.0);
  CHECK(std::abs(lo.value / hi.value - 1.0) <= 0.1);
}

TEST_CASE("string tension fit slope is exact") {
  std::vector<double> d, lin, curved;
  for (int i = 0; i <= 14; ++i) {
    d.push_back(i);
    lin.push_back(0.04 * i + 0.3);
    curved.push_back(0.01 * i * i);
  }

  const FitResult f = fit_string_tension(series_from(d, lin));
  CHECK(std::abs(f.value - 0.04) <= 1e-12);
  CHECK(std::abs(f.intercept - 0.3) <= 1e-12);
  CHECK(f.window_lo == doctest::Approx(4.0));
  CHECK(f.window_hi == doctest::Approx(12.0));
  CHECK_FALSE(f.flagged);

  const FitResult fc = fit_string_tension(series_from(d, curved));
  CHECK(fc.flagged);  // visibly bent, but the slope is still reported
  CHECK(fc.value > 0.0);

  CHECK_THROWS_AS(fit_string_tension(series_from(d, lin), {4.0, 6.0}),
                  std::invalid_argument);
}

TEST_CASE("meson scaling fit recovers the exponent") {
  const double m_sol = 0.7;
  std::vector<double> eta, masses;
  for (double x : {0.01, 0.02, 0.04, 0.08}) {
    eta.push_back(x);
    masses.push_back(2.0 * m_sol + 1.3 * m_sol * std::pow(x, 2.0 / 3.0));
  }
  const FitResult f = fit_meson_scaling(eta, masses, m_sol);
  CHECK(std::abs(f.value - 2.0 / 3.0) <= 1e-10);
  CHECK(std::abs(f.intercept - std::log(1.3)) <= 1e-10);
  CHECK(psd(f.covariance));

  std::vector<double> below = masses;
  below[1] = 2.0 * m_sol;  // exactly at threshold: no binding energy left
  CHECK_THROWS_AS(fit_meson_scaling(eta, below, m_sol),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_meson_scaling(eta, masses, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_meson_scaling({0.1, 0.2}, {1.5, 1.6}, m_sol),
                  std::invalid_argument);
  std::vector<double> bad_eta = eta;
  bad_eta[0] = -0.1;
  CHECK_THROWS_AS(fit_meson_scaling(bad_eta, masses, m_sol),
                  std::invalid_argument);
}
