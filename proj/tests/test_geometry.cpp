#include <catch2/catch_amalgamated.hpp>

#include "cmap/geometry.hpp"

using namespace cmap;

namespace {

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST_CASE("sphere target: signed distance is |p| - 1", "[geometry]") {
  TargetManifold t = make_sphere_complement(2);
  CHECK(signed_distance(t, vec2(2.0, 0.0)) == Catch::Approx(1.0));
  CHECK(signed_distance(t, vec2(0.0, 1.0)) == Catch::Approx(0.0).margin(1e-15));
  CHECK(signed_distance(t, vec2(0.3, 0.4)) == Catch::Approx(-0.5));
  CHECK_THROWS_AS(signed_distance(t, vec2(0.0, 0.0)), Error);
}

TEST_CASE("half-space target: signed distance is the last coordinate", "[geometry]") {
  TargetManifold t = make_half_space(2);
  CHECK(signed_distance(t, vec2(5.0, 0.25)) == Catch::Approx(0.25));
  CHECK(signed_distance(t, vec2(-1.0, -0.75)) == Catch::Approx(-0.75));
}

TEST_CASE("projection recombines as p = Pi(p) + rho nu", "[geometry]") {
  TargetManifold s = make_sphere_complement(3);
  Eigen::VectorXd p(3);
  p << 0.8, 0.5, -0.4;
  DecomposedPoint d = project(s, p);
  CHECK(d.projected.norm() == Catch::Approx(1.0));
  CHECK((d.projected + d.distance * d.normal - p).norm() < 1e-14);
  CHECK(d.normal.dot(p) > 0.0);  // nu points away from the ball

  TargetManifold hs = make_half_space(2, 0.5);
  DecomposedPoint e = project(hs, vec2(3.0, 0.2));
  CHECK(e.projected(1) == 0.0);
  CHECK(e.distance == Catch::Approx(0.2));
  CHECK((e.projected + e.distance * e.normal - vec2(3.0, 0.2)).norm() < 1e-15);
}

TEST_CASE("projection rejects points outside the tubular neighborhood", "[geometry]") {
  TargetManifold s = make_sphere_complement(2, 0.25);
  CHECK_THROWS_AS(project(s, vec2(2.0, 0.0)), Error);   // rho = 1 > 0.25
  CHECK_THROWS_AS(project(s, vec2(0.0, 0.0)), Error);   // center: undefined
  CHECK_NOTHROW(project(s, vec2(1.2, 0.0)));
  TargetManifold hs = make_half_space(2, 0.1);
  CHECK_THROWS_AS(project(hs, vec2(0.0, 0.5)), Error);
  try {
    project(s, vec2(2.0, 0.0));
    FAIL("expected a typed error");
  } catch (const Error& e) {
    CHECK(e.code == errc::outside_tubular_neighborhood);
  }
}

TEST_CASE("shape operator of the sphere is the tangential projection", "[geometry]") {
  TargetManifold s = make_sphere_complement(2);
  Eigen::VectorXd q = vec2(std::cos(0.7), std::sin(0.7));
  ShapeOperator op = shape_operator(s, q);
  // Hess rho kills the normal and fixes tangents; it is idempotent, so it is
  // its own square root.
  CHECK((op.hess_rho * q).norm() < 1e-14);
  Eigen::VectorXd tau = vec2(-std::sin(0.7), std::cos(0.7));
  CHECK((op.hess_rho * tau - tau).norm() < 1e-14);
  CHECK((op.beta * op.beta - op.hess_rho).norm() < 1e-14);
  CHECK_THROWS_AS(shape_operator(s, vec2(1.5, 0.0)), Error);

  TargetManifold hs = make_half_space(2);
  CHECK(shape_operator(hs, vec2(4.0, 0.0)).hess_rho.norm() == 0.0);
}

TEST_CASE("projection jacobian matches finite differences", "[geometry]") {
  TargetManifold s = make_sphere_complement(2);
  Eigen::VectorXd y = vec2(1.1, -0.4);
  Eigen::MatrixXd j = projection_jacobian(s, y);
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd dy = Eigen::VectorXd::Zero(2);
    dy(k) = h;
    Eigen::VectorXd fd =
        (project(s, (y + dy).eval()).projected - project(s, (y - dy).eval()).projected) /
        (2.0 * h);
    CHECK((j.col(k) - fd).norm() < 1e-8);
  }
}

TEST_CASE("projection hessian quadratic form matches finite differences", "[geometry]") {
  TargetManifold s = make_sphere_complement(2);
  Eigen::VectorXd y = vec2(0.9, 0.8);
  Eigen::VectorXd xi = vec2(0.3, -0.7);
  Eigen::VectorXd hq = projection_hessian_quad(s, y, xi);
  const double h = 1e-5;
  // Second directional difference of Pi along xi.
  Eigen::VectorXd fd = (project(s, (y + h * xi).eval()).projected -
                        2.0 * project(s, y).projected +
                        project(s, (y - h * xi).eval()).projected) /
                       (h * h);
  CHECK((hq - fd).norm() < 1e-4);
  TargetManifold hs = make_half_space(2);
  CHECK(projection_hessian_quad(hs, y, xi).norm() == 0.0);
}

TEST_CASE("target factories validate their inputs", "[geometry]") {
  CHECK_THROWS_AS(make_sphere_complement(1), Error);
  CHECK_THROWS_AS(make_sphere_complement(2, 1.5), Error);
  CHECK_THROWS_AS(make_half_space(2, 0.0), Error);
}
