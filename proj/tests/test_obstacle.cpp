#include <catch2/catch_amalgamated.hpp>

#include "cmap/obstacle.hpp"

using namespace cmap;

namespace {

// Closed form for the radial benchmark: unit source, contact disk of radius
// r0, so w(r) = (r^2 - r0^2)/4 - (r0^2/2) log(r/r0) outside the disk.
double radial_w(double r, double r0) {
  if (r <= r0) return 0.0;
  return 0.25 * (r * r - r0 * r0) - 0.5 * r0 * r0 * std::log(r / r0);
}

ObstacleSolution solve_radial(int n, double tol = 1e-6) {
  Grid g = make_grid_2d(n, n, -1.0, 1.0, -1.0, 1.0);
  ScalarField src(g, 1.0), bc(g, 0.0);
  for (int i = 0; i < g.num_nodes(); ++i)
    if (g.is_boundary(i)) {
      Point p = g.point(i);
      bc[i] = radial_w(std::hypot(p[0], p[1]), 0.5);
    }
  return solve_obstacle(src, bc, tol);
}

}  // namespace

TEST_CASE("radial closed form solves w'' + w'/r = 1 (RK4 cross-check)", "[obstacle]") {
  // Integrate the ODE independently from the contact radius outward and
  // compare against the formula the other tests lean on.
  const double r0 = 0.5, dr = 1e-4;
  double r = r0, w = 0.0, s = 0.0;  // s = w'
  auto f = [](double rr, double ss) { return 1.0 - ss / rr; };
  while (r < 1.25 - 0.5 * dr) {
    double k1s = f(r, s), k1w = s;
    double k2s = f(r + 0.5 * dr, s + 0.5 * dr * k1s), k2w = s + 0.5 * dr * k1s;
    double k3s = f(r + 0.5 * dr, s + 0.5 * dr * k2s), k3w = s + 0.5 * dr * k2s;
    double k4s = f(r + dr, s + dr * k3s), k4w = s + dr * k3s;
    w += dr * (k1w + 2.0 * k2w + 2.0 * k3w + k4w) / 6.0;
    s += dr * (k1s + 2.0 * k2s + 2.0 * k3s + k4s) / 6.0;
    r += dr;
  }
  CHECK(w == Catch::Approx(radial_w(1.25, r0)).margin(1e-10));
}

TEST_CASE("obstacle solve matches the radial benchmark", "[obstacle]") {
  const int n = 129;
  ObstacleSolution sol = solve_radial(n);
  const Grid& g = sol.w.grid;
  REQUIRE(sol.converged);

  double sup = 0.0;
  for (int i = 0; i < g.num_nodes(); ++i) {
    Point p = g.point(i);
    sup = std::max(sup, std::abs(sol.w[i] - radial_w(std::hypot(p[0], p[1]), 0.5)));
  }
  CHECK(sup <= 10.0 * g.h * g.h);

  // Every detected free-boundary node sits within 2h of the true circle.
  REQUIRE_FALSE(sol.fb_points.empty());
  for (int i : sol.fb_points) {
    Point p = g.point(i);
    CHECK(std::abs(std::hypot(p[0], p[1]) - 0.5) <= 2.0 * g.h);
  }
}

TEST_CASE("solution is nonnegative with small complementarity residual", "[obstacle]") {
  ObstacleSolution sol = solve_radial(65);
  for (double v : sol.w.values) CHECK(v >= 0.0);
  ScalarField src(sol.w.grid, 1.0);
  CHECK(complementarity_residual(sol.w, src) <= 1e-4);
  CHECK(complementarity_residual(sol.w, src) == Catch::Approx(sol.residual));
}

TEST_CASE("solutions are monotone in the boundary data", "[obstacle]") {
  Grid g = make_grid_2d(33, 33, -1.0, 1.0, -1.0, 1.0);
  ScalarField src(g, 1.0);
  SplitMix64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    ScalarField lo(g, 0.0), hi(g, 0.0);
    double a = rng.uniform(0.1, 0.6), b = rng.uniform(0.0, 0.5), c = rng.uniform(0.0, 0.4);
    for (int i = 0; i < g.num_nodes(); ++i)
      if (g.is_boundary(i)) {
        Point p = g.point(i);
        lo[i] = a + b * p[0] * p[0] + c * (1.0 + std::sin(3.0 * p[1])) * 0.2;
        hi[i] = lo[i] + rng.uniform(0.05, 0.3);
      }
    ObstacleSolution wl = solve_obstacle(src, lo, 1e-8);
    ObstacleSolution wh = solve_obstacle(src, hi, 1e-8);
    for (int i = 0; i < g.num_nodes(); ++i) CHECK(wh.w[i] >= wl.w[i] - 1e-6);
  }
}

TEST_CASE("quadratic growth at free-boundary points stays in band", "[obstacle]") {
  ObstacleSolution sol = solve_radial(129);
  const Grid& g = sol.w.grid;
  std::size_t stride = std::max<std::size_t>(1, sol.fb_points.size() / 5);
  for (std::size_t k = 0; k < sol.fb_points.size(); k += stride) {
    Point x0 = g.point(sol.fb_points[k]);
    for (double r : {0.1, 0.2}) {
      double sup = 0.0;
      for (int i : ball_nodes(g, x0, r)) sup = std::max(sup, sol.w[i]);
      CHECK(sup / (r * r) >= 0.05);
      CHECK(sup / (r * r) <= 20.0);
    }
  }
}

TEST_CASE("classify_point calls the radial benchmark regular", "[obstacle]") {
  ObstacleSolution sol = solve_radial(129);
  ScalarField src(sol.w.grid, 1.0);
  std::vector<double> scales{0.05, 0.1, 0.2};
  ClassifyResult cr = classify_point(sol, src, sol.fb_points.front(), scales);
  CHECK(cr.cls == FreeBoundaryClass::Regular);
  CHECK(cr.g_at_point == 1.0);
  CHECK(cr.max_ratio >= 0.5);  // contact disk is genuinely thick
}

TEST_CASE("classify_point calls a line contact singular", "[obstacle]") {
  Grid g = make_grid_2d(65, 65, -1.0, 1.0, -1.0, 1.0);
  ObstacleSolution sol;
  sol.w = ScalarField(g);
  for (int i = 0; i < g.num_nodes(); ++i) {
    double x = g.point(i)[0];
    sol.w[i] = 0.5 * x * x;
  }
  // Tight threshold: the contact is the exact-zero column at x = 0, whose
  // min-diameter is zero at every scale.
  contact_set(sol, 1e-12);
  REQUIRE_FALSE(sol.fb_points.empty());
  ScalarField src(g, 1.0);
  int node = sol.fb_points[sol.fb_points.size() / 2];
  ClassifyResult cr = classify_point(sol, src, node, {0.1, 0.2, 0.4});
  CHECK(cr.cls == FreeBoundaryClass::Singular);
  CHECK(cr.r0 == 0.0);
}

TEST_CASE("min_diameter measures the narrowest strip", "[obstacle]") {
  // Collinear points have zero width regardless of their spread.
  std::vector<Point> line{{0.0, 0.0}, {0.3, 0.15}, {0.6, 0.3}, {1.2, 0.6}};
  CHECK(min_diameter(line) <= 1e-12);
  // The four corners of a unit square have width exactly 1 (the direction
  // sweep includes the axis directions).
  std::vector<Point> square{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
  CHECK(min_diameter(square) == Catch::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("obstacle solver validates its inputs", "[obstacle]") {
  Grid g = make_grid_2d(9, 9, -1.0, 1.0, -1.0, 1.0);
  ScalarField src(g, 1.0), bc(g, 0.0);
  ScalarField bad_src = src;
  bad_src[40] = -0.5;
  CHECK_THROWS_AS(solve_obstacle(bad_src, bc), Error);
  try {
    solve_obstacle(bad_src, bc);
    FAIL("expected a typed error");
  } catch (const Error& e) {
    CHECK(e.code == errc::negative_source);
  }

  ObstacleSolution sol = solve_obstacle(src, bc);
  ScalarField src2(sol.w.grid, 1.0);
  // An interior node far from any contact boundary is not a free-boundary point.
  CHECK_THROWS_AS(classify_point(sol, src2, g.index(1, 1), {0.2}), Error);
}
