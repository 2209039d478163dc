#pragma once

// Newtonian potential machinery: the fundamental solution and its gradient in
// dimensions two and three, the twice-corrected kernel G that kills both the
// value and the gradient of the potential at the base point, midpoint-cell
// quadrature of the potential of a derivative over the unit disk, and the
// modulus-weighted bound check used by the quadratic-growth experiments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cmap/fields.hpp"

namespace cmap {

inline constexpr double pi64 = 3.14159265358979323846;

/// Fundamental solution of the Laplacian at distance `r` from the pole.
inline double fundamental(int n, double r) {
  if (n != 2 && n != 3) fail(errc::invalid_argument, "dimension must be 2 or 3");
  if (!(r > 0.0)) fail(errc::degenerate_point, "fundamental solution at the pole");
  return n == 2 ? std::log(r) / (2.0 * pi64) : -1.0 / (4.0 * pi64 * r);
}

/// Gradient of the fundamental solution: y / (n alpha_n |y|^n).
inline Eigen::VectorXd fundamental_grad(const Eigen::VectorXd& y) {
  const int n = static_cast<int>(y.size());
  if (n != 2 && n != 3) fail(errc::invalid_argument, "dimension must be 2 or 3");
  double r = y.norm();
  if (!(r > 0.0)) fail(errc::degenerate_point, "fundamental gradient at the pole");
  double n_alpha_n = n == 2 ? 2.0 * pi64 : 4.0 * pi64;
  return y / (n_alpha_n * std::pow(r, n));
}

/// Corrected kernel G(x,y) = Gamma(x-y) - Gamma(y) + DGamma(y).x. The two
/// subtractions make G(0,y) and D_x G(0,y) vanish identically in y, so a
/// potential built from G is pinned to zero value and zero gradient at the
/// origin without any cancellation between cells.
inline double kernel_G(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.size());
  if (y.size() != x.size()) fail(errc::invalid_argument, "kernel arguments disagree");
  return fundamental(n, (x - y).norm()) - fundamental(n, y.norm()) +
         fundamental_grad(y).dot(x);
}

/// x-gradient of the corrected kernel: DGamma(x-y) + DGamma(y).
inline Eigen::VectorXd kernel_G_grad(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return fundamental_grad((x - y).eval()) + fundamental_grad(y);
}

namespace detail {

/// Midpoint-cell quadrature core shared by the value and gradient routes.
/// Cells at the two kernel singularities (y = 0 and y = x) are subdivided 4x4;
/// sub-points that land exactly on a pole are skipped (their cell measure is
/// already refined away around them).
template <typename Accum>
inline void integrate_over_disk(const ScalarField& rho, const Point& x, double cut,
                                Accum&& add) {
  const Grid& g = rho.grid;
  if (g.dims != 2) fail(errc::invalid_argument, "potential quadrature runs on 2-d grids");
  if (g.h > cut) fail(errc::quadrature_too_coarse, "cell size exceeds the quadrature bound");
  const double h = g.h, cell = h * h;
  for (int i = 0; i < g.num_nodes(); ++i) {
    Point y = g.point(i);
    double ry = std::sqrt(y[0] * y[0] + y[1] * y[1]);
    if (ry > 1.0) continue;
    if (std::isnan(rho[i])) fail(errc::invalid_argument, "NaN density inside the unit disk");
    bool hot = ry < 0.75 * h || (std::abs(y[0] - x[0]) < 0.75 * h &&
                                 std::abs(y[1] - x[1]) < 0.75 * h);
    if (!hot) {
      add(y, rho[i], cell);
      continue;
    }
    for (int sy = 0; sy < 4; ++sy)
      for (int sx = 0; sx < 4; ++sx) {
        Point ys{y[0] + h * (sx - 1.5) / 4.0, y[1] + h * (sy - 1.5) / 4.0};
        double r2 = ys[0] * ys[0] + ys[1] * ys[1];
        double d2 = sqr(ys[0] - x[0]) + sqr(ys[1] - x[1]);
        if (r2 < 1e-28 || d2 < 1e-28) continue;  // exact pole hit
        add(ys, rho[i], cell / 16.0);
      }
  }
}

/// Potential of a plain density: integral of G(x,.) rho over the unit disk.
inline double phi_of_density(const ScalarField& rho, const Point& x, double cut) {
  double acc = 0.0;
  Eigen::VectorXd xv(2), yv(2);
  xv << x[0], x[1];
  integrate_over_disk(rho, x, cut, [&](const Point& y, double fy, double wgt) {
    yv << y[0], y[1];
    acc += wgt * fy * kernel_G(xv, yv);
  });
  return acc;
}

inline Point grad_of_density(const ScalarField& rho, const Point& x, double cut) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(2), xv(2), yv(2);
  xv << x[0], x[1];
  integrate_over_disk(rho, x, cut, [&](const Point& y, double fy, double wgt) {
    yv << y[0], y[1];
    acc += wgt * fy * kernel_G_grad(xv, yv);
  });
  return {acc(0), acc(1)};
}

/// The density behind Phi: the `axis` component of the O(h^2) gradient of f.
inline ScalarField axis_derivative(const ScalarField& f, int axis) {
  VectorField df = gradient(f);
  ScalarField rho(f.grid);
  for (int i = 0; i < f.grid.num_nodes(); ++i) rho[i] = df.at(i, axis);
  return rho;
}

}  // namespace detail

/// Potential Phi(x) = integral over the unit disk of G(x,y) D_i f(y) dy by
/// node-centered midpoint cells. By construction Phi(0) sums exact zeros.
inline double potential_phi(const ScalarField& f, int axis, const Point& x,
                            double cut = 0.2) {
  if (axis < 0 || axis >= f.grid.dims) fail(errc::invalid_argument, "axis out of range");
  if (std::hypot(x[0], x[1]) >= 1.0)
    fail(errc::invalid_argument, "potential is evaluated inside the unit disk");
  return detail::phi_of_density(detail::axis_derivative(f, axis), x, cut);
}

/// Gradient of the potential by the differentiated kernel, not by differencing
/// potential_phi: D_x G(0,y) vanishes pointwise, so the gradient at the base
/// point is a sum of exact zeros rather than a difference of large terms.
inline Point potential_phi_gradient(const ScalarField& f, int axis, const Point& x,
                                    double cut = 0.2) {
  if (axis < 0 || axis >= f.grid.dims) fail(errc::invalid_argument, "axis out of range");
  if (std::hypot(x[0], x[1]) >= 1.0)
    fail(errc::invalid_argument, "potential is evaluated inside the unit disk");
  return detail::grad_of_density(detail::axis_derivative(f, axis), x, cut);
}

// ---------------------------------------------------------------------------
// Growth moduli and the quadratic-bound check.
// ---------------------------------------------------------------------------

struct GrowthModulus {
  enum class Form { Power, LogConstant } form = Form::Power;
  double alpha = 0.5;  // omega(t) = t^(1-alpha) (Power)
  double delta = 0.1;  // hypothesis scale; also sets the LogConstant level

  double operator()(double t) const {
    if (form == Form::Power) return std::pow(t, 1.0 - alpha);
    return 1.0 / std::abs(std::log(delta));
  }
};

/// A usable modulus is nondecreasing with omega(1) <= 1: the power form needs
/// alpha in [0,1], and the log-constant level 1/|log delta| stays below one
/// only for delta <= 1/e.
inline void validate_modulus(const GrowthModulus& om) {
  if (!(om.delta > 0.0) || om.delta >= 1.0)
    fail(errc::hypothesis_violated, "modulus scale delta must lie in (0,1)");
  if (om.form == GrowthModulus::Form::Power) {
    if (!(om.alpha >= 0.0) || om.alpha > 1.0)
      fail(errc::hypothesis_violated, "power modulus needs alpha in [0,1]");
    return;
  }
  if (om.delta > std::exp(-1.0))
    fail(errc::hypothesis_violated, "log-constant modulus needs delta <= 1/e");
}

/// Integral of omega(tau)/tau over [a, b] by log-spaced midpoints.
inline double modulus_tail_integral(const GrowthModulus& om, double a, double b,
                                    int points = 1000) {
  if (!(a > 0.0) || b < a) fail(errc::invalid_argument, "bad tail integral bounds");
  if (b == a) return 0.0;
  const double L = std::log(b / a);
  double acc = 0.0;
  for (int k = 0; k < points; ++k) acc += om(a * std::exp(L * (k + 0.5) / points));
  return acc * L / points;
}

/// The sharpest grid field that satisfies the bound hypotheses for `om`:
/// f(y) = y_axis * min(1, omega(delta/|y|)), with the power form's kink at
/// |y| = delta smoothed by a soft min that stays below both branches. Its
/// axis derivative is m + (y_axis^2/|y|) m' with m' <= 0, so |D_i f| <= 1.
inline ScalarField canonical_bound_source(const Grid& g, const GrowthModulus& om,
                                          int axis = 0) {
  validate_modulus(om);
  ScalarField f(g);
  for (int i = 0; i < g.num_nodes(); ++i) {
    Point y = g.point(i);
    double r = std::hypot(y[0], y[1]);
    double m;
    if (om.form == GrowthModulus::Form::Power) {
      double s4 = sqr(sqr(r / om.delta));
      m = std::pow(1.0 + s4, -(1.0 - om.alpha) / 4.0);
    } else {
      m = om(1.0);  // constant level, already <= 1
    }
    f[i] = y[axis] * m;
  }
  return f;
}

struct QuadBoundProfile {
  std::vector<double> radii, ratios;
  double worst = 0.0;
};

/// Compares sup |Phi| over B_r(0) against the modulus-weighted bound
/// r * (delta + r omega(delta/r) + r * int_delta^{delta/r} omega(tau)/tau dtau)
/// for each requested radius. The lemma's hypotheses are asserted on the data
/// first: sup_{B_r} |f| <= r omega(delta/r) at every requested radius, and
/// |D_axis f| <= 1 on the unit disk.
inline QuadBoundProfile verify_quad_bound(const GrowthModulus& om, const ScalarField& f,
                                          const std::vector<double>& radii, int axis = 0,
                                          int samples_per_radius = 8, double cut = 0.2) {
  validate_modulus(om);
  const double delta = om.delta;
  ScalarField rho = detail::axis_derivative(f, axis);
  for (int i = 0; i < f.grid.num_nodes(); ++i) {
    Point y = f.grid.point(i);
    double r = std::hypot(y[0], y[1]);
    if (r > 1.0) continue;
    if (std::abs(rho[i]) > 1.0 + 1e-6)
      fail(errc::hypothesis_violated, "derivative bound |D_i f| <= 1 fails");
  }
  QuadBoundProfile out;
  out.radii = radii;
  const double golden = 2.39996322972865332;
  for (double r : radii) {
    if (!(r > delta) || r > 1.0)
      fail(errc::hypothesis_violated, "radii must lie in (delta, 1]");
    double bound = r * om(delta / r);
    for (int i = 0; i < f.grid.num_nodes(); ++i) {
      Point y = f.grid.point(i);
      if (std::hypot(y[0], y[1]) > r) continue;
      if (std::abs(f[i]) > bound * (1.0 + 1e-9))
        fail(errc::hypothesis_violated, "growth bound sup|f| <= r omega(delta/r) fails");
    }
    double sup = 0.0;
    for (int k = 0; k < samples_per_radius; ++k) {
      double rad = r * std::sqrt((k + 0.5) / samples_per_radius);
      Point x{rad * std::cos(golden * k), rad * std::sin(golden * k)};
      sup = std::max(sup, std::abs(detail::phi_of_density(rho, x, cut)));
    }
    double den =
        r * (delta + r * om(delta / r) + r * modulus_tail_integral(om, delta, delta / r));
    out.ratios.push_back(sup / den);
    out.worst = std::max(out.worst, out.ratios.back());
  }
  return out;
}

}  // namespace cmap
