#include <catch2/catch_amalgamated.hpp>

#include "cmap/constraint_map.hpp"

using namespace cmap;

namespace {

// Boundary data of the tilted contact example: flat piece glued to a circle
// arc along the line t = x cos(phi) + y sin(phi) - c.
VectorField tilted_data(const Grid& g, double phi = 0.35, double c = 0.1) {
  VectorField u(g, 2);
  for (int i = 0; i < g.num_nodes(); ++i) {
    Point p = g.point(i);
    double t = p[0] * std::cos(phi) + p[1] * std::sin(phi) - c;
    if (t < 0.0) {
      u.at(i, 0) = 1.0;
      u.at(i, 1) = -t;
    } else {
      u.at(i, 0) = std::cos(t);
      u.at(i, 1) = -std::sin(t);
    }
  }
  return u;
}

ConstraintMapSolution solve_tilted(int n) {
  Grid g = make_grid_2d(n, n, -1.0, 1.0, -1.0, 1.0);
  VectorField diri = tilted_data(g);
  return minimize_energy(make_sphere_complement(2), diri, 1e-8, 2000000,
                         optimal_relaxation(g));
}

}  // namespace

TEST_CASE("exact 1-d example is internally consistent", "[constraint_map]") {
  Grid g = make_grid_1d(2001, -1.0, 1.0);
  ExactExample ex = exact_example(g);
  for (int i = 0; i < g.num_nodes(); ++i) {
    double x = g.point(i)[0];
    double norm = std::hypot(ex.u.at(i, 0), ex.u.at(i, 1));
    // |u| = 1 + w everywhere, and the image part stays on the sphere.
    CHECK(norm == Catch::Approx(1.0 + ex.w[i]).margin(1e-13));
    CHECK(std::hypot(ex.V.at(i, 0), ex.V.at(i, 1)) == Catch::Approx(1.0).margin(1e-13));
    if (x >= 0.0) CHECK(ex.w[i] == 0.0);
    if (x < 0.0) CHECK(ex.w[i] == Catch::Approx(std::sqrt(1.0 + x * x) - 1.0).margin(1e-14));
  }
  CHECK(ex.theta_third_left == -2.0);
  CHECK(ex.theta_third_right == 0.0);
}

TEST_CASE("1-d constrained solve converges at second order", "[constraint_map]") {
  double errs[2];
  int idx = 0;
  for (int n : {1025, 2049}) {
    Grid g = make_grid_1d(n, -1.0, 1.0);
    ExactExample ex = exact_example(g);
    ConstraintMapSolution sol =
        minimize_energy(make_sphere_complement(2), ex.u, 1e-8, 2000000, optimal_relaxation(g));
    REQUIRE(sol.converged);
    double sup = 0.0;
    for (int i = 0; i < g.num_nodes(); ++i)
      for (int c = 0; c < 2; ++c)
        sup = std::max(sup, std::abs(sol.u.at(i, c) - ex.u.at(i, c)));
    errs[idx++] = sup;
  }
  double ratio = errs[0] / errs[1];
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 5.0);
}

TEST_CASE("decomposition splits u into distance part and unit image", "[constraint_map]") {
  ConstraintMapSolution sol = solve_tilted(65);
  REQUIRE(sol.converged);
  const Grid& g = sol.u.grid;
  for (int i = 0; i < g.num_nodes(); ++i) {
    if (!sol.in_tube[static_cast<std::size_t>(i)]) continue;
    double norm = std::hypot(sol.u.at(i, 0), sol.u.at(i, 1));
    CHECK(sol.w[i] >= 0.0);
    CHECK(norm == Catch::Approx(1.0 + sol.w[i]).margin(1e-12));
    CHECK(std::hypot(sol.V.at(i, 0), sol.V.at(i, 1)) == Catch::Approx(1.0).margin(1e-12));
  }
  CHECK(sol.energy_monotone);
  REQUIRE_FALSE(sol.fb_points.empty());
}

TEST_CASE("unconstrained half-space solve is discretely harmonic", "[constraint_map]") {
  Grid g = make_grid_2d(65, 65, -1.0, 1.0, -1.0, 1.0);
  VectorField diri(g, 2);
  for (int i = 0; i < g.num_nodes(); ++i) {
    Point p = g.point(i);
    diri.at(i, 0) = p[0] + 0.2 * p[1];
    diri.at(i, 1) = 2.0 + p[0] * p[1];  // stays far above the constraint
  }
  ConstraintMapSolution sol =
      minimize_energy(make_half_space(2), diri, 1e-8, 2000000, optimal_relaxation(g));
  REQUIRE(sol.converged);
  CHECK(sol.fb_points.empty());
  CHECK(euler_lagrange_residual(sol) <= 1e-5);
  // The data is harmonic, so the solution reproduces it.
  double sup = 0.0;
  for (int i = 0; i < g.num_nodes(); ++i)
    for (int c = 0; c < 2; ++c) sup = std::max(sup, std::abs(sol.u.at(i, c) - diri.at(i, c)));
  CHECK(sup <= 1e-6);
}

TEST_CASE("euler-lagrange residual is small off the interface band", "[constraint_map]") {
  ConstraintMapSolution sol = solve_tilted(129);
  CHECK(euler_lagrange_residual(sol) <= 1e-4);
}

TEST_CASE("reduced coefficients satisfy the sign and size relations", "[constraint_map]") {
  ConstraintMapSolution sol = solve_tilted(129);
  ReducedCoefficients rc = coefficients(sol);
  const Grid& g = sol.u.grid;
  const double h = g.h;
  double g_min = inf64, excess = -inf64;
  for (int i = 0; i < g.num_nodes(); ++i) {
    if (!sol.contact_mask[static_cast<std::size_t>(i)] || g.is_boundary(i)) continue;
    if (std::isnan(rc.g[i])) continue;
    g_min = std::min(g_min, rc.g[i]);
    for (int c = 0; c < 2; ++c) {
      double amag = std::hypot(rc.a.at(i, 2 * c), rc.a.at(i, 2 * c + 1));
      excess = std::max(excess, amag - 2.0 * std::sqrt(std::max(0.0, rc.g[i])));
    }
  }
  CHECK(g_min >= -10.0 * h);
  CHECK(excess <= 10.0 * h);
  // The example's free boundary is regular: the curvature source sits at 1.
  for (int i : sol.fb_points) {
    if (std::isnan(rc.g[i])) continue;
    CHECK(rc.g[i] == Catch::Approx(1.0).epsilon(0.2));
  }
}

TEST_CASE("poisson ball solver reproduces a cubic exactly", "[constraint_map]") {
  Grid g = make_grid_2d(129, 129, -1.0, 1.0, -1.0, 1.0);
  ScalarField rhs(g), exact(g);
  for (int i = 0; i < g.num_nodes(); ++i) {
    Point p = g.point(i);
    exact[i] = p[0] * p[0] * p[1];
    rhs[i] = 2.0 * p[1];  // Laplacian of x^2 y
  }
  ScalarField phi = solve_poisson_ball(rhs, exact, {0.0, 0.0}, 0.45);
  // Cubics are in the kernel of the truncation error, so only solver
  // tolerance remains.
  double sup = 0.0;
  for (int i : ball_nodes(g, {0.0, 0.0}, 0.45)) sup = std::max(sup, std::abs(phi[i] - exact[i]));
  CHECK(sup <= 1e-6);
}

TEST_CASE("discrete energy of the linear 1-d map equals the domain length",
          "[constraint_map]") {
  Grid g = make_grid_1d(101, -1.0, 1.0);
  VectorField u(g, 2, 0.0);
  for (int i = 0; i < g.num_nodes(); ++i) u.at(i, 0) = g.point(i)[0];
  CHECK(discrete_energy(u) == Catch::Approx(2.0).margin(1e-12));
  CHECK(optimal_relaxation(g) > 1.0);
  CHECK(optimal_relaxation(g) < 2.0);
}

TEST_CASE("map solver validates boundary data and relaxation", "[constraint_map]") {
  Grid g = make_grid_1d(33, -1.0, 1.0);
  VectorField bad(g, 2, 0.0);  // |u| = 0 < 1: outside the sphere-complement closure
  CHECK_THROWS_AS(minimize_energy(make_sphere_complement(2), bad), Error);
  try {
    minimize_energy(make_sphere_complement(2), bad);
    FAIL("expected a typed error");
  } catch (const Error& e) {
    CHECK(e.code == errc::boundary_data_outside_target);
  }
  ExactExample ex = exact_example(g);
  CHECK_THROWS_AS(minimize_energy(make_sphere_complement(2), ex.u, 1e-8, 1000, 2.5), Error);
}
