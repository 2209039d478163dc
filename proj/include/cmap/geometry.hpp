#pragma once

// Target geometry for constraint maps. Two analytic targets are supported:
//   - complement of the open unit ball in R^m  ("sphere" target),
//   - upper half space { y_m > 0 }.
// Both admit global closed forms for the signed distance rho, the nearest-point
// projection Pi, the inward unit normal nu, and Hess rho; no general-manifold
// machinery is needed or attempted.

#include <Eigen/Dense>

#include "cmap/common.hpp"

namespace cmap {

enum class TargetKind { SphereExteriorComplement, HalfSpace };

struct TargetManifold {
  TargetKind kind = TargetKind::SphereExteriorComplement;
  int ambient_dim = 2;          // m >= 2
  double tubular_halfwidth = 0.5;  // radius of validity handed to project()
};

inline TargetManifold make_sphere_complement(int ambient_dim, double tubular_halfwidth = 0.5) {
  if (ambient_dim < 2) fail(errc::invalid_argument, "ambient dimension must be >= 2");
  if (!(tubular_halfwidth > 0) || tubular_halfwidth >= 1.0)
    fail(errc::invalid_argument, "sphere target needs tubular halfwidth in (0,1)");
  return TargetManifold{TargetKind::SphereExteriorComplement, ambient_dim, tubular_halfwidth};
}

inline TargetManifold make_half_space(int ambient_dim, double tubular_halfwidth = inf64) {
  if (ambient_dim < 2) fail(errc::invalid_argument, "ambient dimension must be >= 2");
  if (!(tubular_halfwidth > 0)) fail(errc::invalid_argument, "tubular halfwidth must be positive");
  return TargetManifold{TargetKind::HalfSpace, ambient_dim, tubular_halfwidth};
}

/// Signed distance to the boundary, positive inside the target.
/// Sphere target: rho(p) = |p| - 1 (global). Half space: rho(p) = p_m.
inline double signed_distance(const TargetManifold& t, const Eigen::VectorXd& p) {
  if (p.size() != t.ambient_dim) fail(errc::invalid_argument, "point dimension mismatch");
  if (t.kind == TargetKind::HalfSpace) return p(t.ambient_dim - 1);
  double n = p.norm();
  if (n == 0.0) fail(errc::degenerate_point, "signed distance undefined at the origin");
  return n - 1.0;
}

struct DecomposedPoint {
  Eigen::VectorXd projected;  // Pi(p), on the boundary
  double distance;            // rho(p)
  Eigen::VectorXd normal;     // inward unit normal nu at Pi(p); p = Pi(p) + rho nu
};

/// Nearest-point decomposition, valid inside the tubular neighborhood only.
inline DecomposedPoint project(const TargetManifold& t, const Eigen::VectorXd& p) {
  if (p.size() != t.ambient_dim) fail(errc::invalid_argument, "point dimension mismatch");
  DecomposedPoint d;
  if (t.kind == TargetKind::HalfSpace) {
    d.distance = p(t.ambient_dim - 1);
    if (std::abs(d.distance) >= t.tubular_halfwidth)
      fail(errc::outside_tubular_neighborhood, "point outside tubular neighborhood");
    d.projected = p;
    d.projected(t.ambient_dim - 1) = 0.0;
    d.normal = Eigen::VectorXd::Zero(t.ambient_dim);
    d.normal(t.ambient_dim - 1) = 1.0;
    return d;
  }
  double n = p.norm();
  if (n == 0.0) fail(errc::degenerate_point, "projection undefined at the origin");
  d.distance = n - 1.0;
  if (std::abs(d.distance) >= t.tubular_halfwidth)
    fail(errc::outside_tubular_neighborhood, "point outside tubular neighborhood");
  d.normal = p / n;       // nu points away from the unit ball, into the target
  d.projected = d.normal; // radial projection onto the unit sphere
  return d;
}

struct ShapeOperator {
  Eigen::MatrixXd hess_rho;  // Hessian of the signed distance at the boundary point
  Eigen::MatrixXd beta;      // symmetric PSD root, beta * beta = hess_rho
};

/// Hess rho at a boundary point q. Sphere: I - q q^T (a projection, so it is
/// its own square root). Half space: zero.
inline ShapeOperator shape_operator(const TargetManifold& t, const Eigen::VectorXd& q) {
  if (q.size() != t.ambient_dim) fail(errc::invalid_argument, "point dimension mismatch");
  ShapeOperator s;
  if (t.kind == TargetKind::HalfSpace) {
    if (std::abs(q(t.ambient_dim - 1)) > 1e-12)
      fail(errc::not_on_boundary, "point not on the boundary hyperplane");
    s.hess_rho = Eigen::MatrixXd::Zero(t.ambient_dim, t.ambient_dim);
    s.beta = s.hess_rho;
    return s;
  }
  if (std::abs(q.norm() - 1.0) > 1e-12) fail(errc::not_on_boundary, "point not on the unit sphere");
  s.hess_rho = Eigen::MatrixXd::Identity(t.ambient_dim, t.ambient_dim) - q * q.transpose();
  s.beta = s.hess_rho;  // rank m-1 orthogonal projection: beta^2 = beta
  return s;
}

/// Jacobian of the nearest-point projection at y (defined wherever Pi is).
/// Sphere: (I - yhat yhat^T)/|y|; half space: diag(1,...,1,0).
inline Eigen::MatrixXd projection_jacobian(const TargetManifold& t, const Eigen::VectorXd& y) {
  if (y.size() != t.ambient_dim) fail(errc::invalid_argument, "point dimension mismatch");
  if (t.kind == TargetKind::HalfSpace) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Identity(t.ambient_dim, t.ambient_dim);
    j(t.ambient_dim - 1, t.ambient_dim - 1) = 0.0;
    return j;
  }
  double n = y.norm();
  if (n == 0.0) fail(errc::degenerate_point, "projection jacobian undefined at the origin");
  Eigen::VectorXd yh = y / n;
  return (Eigen::MatrixXd::Identity(t.ambient_dim, t.ambient_dim) - yh * yh.transpose()) / n;
}

/// Second derivative of Pi contracted twice with xi, evaluated at y:
/// H^i(xi,xi) = sum_jk d_j d_k Pi^i xi_j xi_k. (Zero for the half space.)
inline Eigen::VectorXd projection_hessian_quad(const TargetManifold& t, const Eigen::VectorXd& y,
                                               const Eigen::VectorXd& xi) {
  if (y.size() != t.ambient_dim || xi.size() != t.ambient_dim)
    fail(errc::invalid_argument, "dimension mismatch");
  if (t.kind == TargetKind::HalfSpace) return Eigen::VectorXd::Zero(t.ambient_dim);
  double n = y.norm();
  if (n == 0.0) fail(errc::degenerate_point, "projection hessian undefined at the origin");
  double n3 = n * n * n, n5 = n3 * n * n;
  double ydotxi = y.dot(xi);
  return (-2.0 * ydotxi / n3) * xi + (3.0 * ydotxi * ydotxi / n5 - xi.squaredNorm() / n3) * y;
}

}  // namespace cmap
