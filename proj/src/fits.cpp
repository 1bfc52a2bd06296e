#include "rotor/fits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rotor {

namespace {

// Ordinary least squares y = X beta with the usual residual-variance
// covariance estimate (zero residual -> zero covariance).
struct Ols {
  Eigen::VectorXd beta;
  Eigen::MatrixXd cov;
  double r_squared;
};

Ols least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd gram = x.transpose() * x;
  const Eigen::MatrixXd gram_inv = gram.ldlt().solve(
      Eigen::MatrixXd::Identity(x.cols(), x.cols()));
  Ols out;
  out.beta = gram_inv * (x.transpose() * y);
  const Eigen::VectorXd res = y - x * out.beta;
  const long dof = x.rows() - x.cols();
  const double s2 = dof > 0 ? res.squaredNorm() / dof : 0.0;
  out.cov = s2 * gram_inv;
  const double tss = (y.array() - y.mean()).matrix().squaredNorm();
  out.r_squared = tss > 0.0 ? 1.0 - res.squaredNorm() / tss : 1.0;
  return out;
}

// Straight line through (x, y); slope and intercept land in the FitResult.
FitResult line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  Eigen::MatrixXd a(x.size(), 2);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    a(i, 0) = x[i];
    a(i, 1) = 1.0;
    b(i) = y[i];
  }
  const Ols ols = least_squares(a, b);
  FitResult out;
  out.slope = ols.beta(0);
  out.intercept = ols.beta(1);
  out.covariance = ols.cov;
  out.r_squared = ols.r_squared;
  out.window_lo = *std::min_element(x.begin(), x.end());
  out.window_hi = *std::max_element(x.begin(), x.end());
  return out;
}

}  // namespace

FitResult fit_power_law(const CorrelatorSeries& c, FitWindow w) {
  c.validate();
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < c.r.size(); ++i) {
    if (c.r[i] < w.lo || c.r[i] > w.hi) continue;
    if (c.values[i].real() <= 0.0)
      throw std::invalid_argument(
          "fit_power_law: non-positive correlator value inside the window");
    lx.push_back(std::log(c.r[i]));
    ly.push_back(std::log(c.values[i].real()));
  }
  if (lx.size() < 4)
    throw std::invalid_argument(
        "fit_power_law: fewer than 4 points in the window");
  FitResult out = line_fit(lx, ly);
  out.window_lo = std::exp(out.window_lo);
  out.window_hi = std::exp(out.window_hi);
  out.value = -2.0 * out.slope;
  out.note = "K from log-log slope";
  return out;
}

FitResult fit_vertex_scaling(const std::vector<double>& ej2,
                             const std::vector<double>& vertex) {
  if (ej2.size() != vertex.size())
    throw std::invalid_argument("fit_vertex_scaling: length mismatch");
  if (ej2.size() < 4)
    throw std::invalid_argument("fit_vertex_scaling: fewer than 4 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ej2.size(); ++i) {
    if (ej2[i] <= 0.0 || vertex[i] <= 0.0)
      throw std::invalid_argument(
          "fit_vertex_scaling: points must be strictly positive");
    lx.push_back(std::log(ej2[i]));
    ly.push_back(std::log(vertex[i]));
  }
  FitResult out = line_fit(lx, ly);
  out.window_lo = std::exp(out.window_lo);
  out.window_hi = std::exp(out.window_hi);
  const double p = out.slope;
  out.value = 4.0 * p / (1.0 + 4.0 * p);
  if (p <= 0.0) {
    out.flagged = true;
    out.note = "non-positive scaling slope; outside the ordered regime?";
  } else {
    out.note = "beta^2 from vertex scaling";
  }
  return out;
}

FitResult fit_casimir(const std::vector<int>& sizes,
                      const std::vector<double>& energies, Boundary bc) {
  if (sizes.size() != energies.size())
    throw std::invalid_argument("fit_casimir: length mismatch");
  if (sizes.size() < 4)
    throw std::invalid_argument("fit_casimir: fewer than 4 sizes");
  const bool open = bc == Boundary::open;
  const int ncol = open ? 3 : 2;
  Eigen::MatrixXd a(sizes.size(), ncol);
  Eigen::VectorXd b(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] <= 0) throw std::invalid_argument("fit_casimir: L <= 0");
    const double l = sizes[i];
    a(i, 0) = l;
    if (open) a(i, 1) = 1.0;
    a(i, ncol - 1) = 1.0 / l;
    b(i) = energies[i];
  }
  const Ols ols = least_squares(a, b);
  FitResult out;
  out.slope = ols.beta(0);
  out.intercept = open ? ols.beta(1) : 0.0;
  out.covariance = ols.cov;
  out.r_squared = ols.r_squared;
  out.window_lo = *std::min_element(sizes.begin(), sizes.end());
  out.window_hi = *std::max_element(sizes.begin(), sizes.end());
  const double geom = open ? 24.0 : 6.0;
  out.value = -geom * ols.beta(ncol - 1) / std::numbers::pi;
  if (out.value < 0.0) {
    out.flagged = true;
    out.note = "negative velocity; the data are not in the critical regime";
  } else {
    out.note = "velocity u from the 1/L Casimir term, c = 1";
  }
  return out;
}

FitResult fit_string_tension(const CorrelatorSeries& tension, FitWindow w) {
  tension.validate();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < tension.r.size(); ++i) {
    if (tension.r[i] < w.lo || tension.r[i] > w.hi) continue;
    x.push_back(tension.r[i]);
    y.push_back(tension.values[i].real());
  }
  if (x.size() < 4)
    throw std::invalid_argument(
        "fit_string_tension: fewer than 4 separations in the window");
  FitResult out = line_fit(x, y);
  out.value = out.slope;
  if (out.r_squared < 0.999) {
    out.flagged = true;
    out.note = "tension curve deviates from a straight line";
  } else {
    out.note = "string tension from linear T(d)";
  }
  return out;
}

FitResult fit_meson_scaling(const std::vector<double>& eta,
                            const std::vector<double>& masses,
                            double soliton_mass) {
  if (eta.size() != masses.size())
    throw std::invalid_argument("fit_meson_scaling: length mismatch");
  if (eta.size() < 3)
    throw std::invalid_argument("fit_meson_scaling: fewer than 3 points");
  if (soliton_mass <= 0.0)
    throw std::invalid_argument("fit_meson_scaling: soliton mass must be > 0");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (eta[i] <= 0.0)
      throw std::invalid_argument("fit_meson_scaling: eta must be > 0");
    if (masses[i] <= 2.0 * soliton_mass)
      throw std::invalid_argument(
          "fit_meson_scaling: meson mass at or below the two-soliton "
          "threshold");
    lx.push_back(std::log(eta[i]));
    ly.push_back(std::log((masses[i] - 2.0 * soliton_mass) / soliton_mass));
  }
  FitResult out = line_fit(lx, ly);
  out.window_lo = std::exp(out.window_lo);
  out.window_hi = std::exp(out.window_hi);
  out.value = out.slope;
  out.note = "binding-energy scaling exponent";
  return out;
}

}  // namespace rotor
