#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "cmap/fields.hpp"

using namespace cmap;

TEST_CASE("grid indexing round-trips and spots the boundary", "[fields]") {
  Grid g = make_grid_2d(5, 5, -1.0, 1.0, -1.0, 1.0);
  CHECK(g.h == Catch::Approx(0.5));
  CHECK(g.num_nodes() == 25);
  int i = g.index(3, 2);
  CHECK(g.ix_of(i) == 3);
  CHECK(g.iy_of(i) == 2);
  Point p = g.point(i);
  CHECK(p[0] == Catch::Approx(0.5));
  CHECK(p[1] == Catch::Approx(0.0));
  CHECK(g.is_boundary(g.index(0, 2)));
  CHECK(g.is_boundary(g.index(2, 4)));
  CHECK_FALSE(g.is_boundary(g.index(2, 2)));
  CHECK(g.ring_depth(g.index(2, 2)) == 2);
}

TEST_CASE("grid factories reject unequal spacings", "[fields]") {
  CHECK_NOTHROW(make_grid_2d(5, 9, 0.0, 1.0, 0.0, 2.0));
  CHECK_THROWS_AS(make_grid_2d(5, 6, 0.0, 1.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(make_grid_1d(1, 0.0, 1.0), Error);
}

TEST_CASE("five-point laplacian is exact on quadratics", "[fields]") {
  Grid g = make_grid_2d(17, 17, -1.0, 1.0, -1.0, 1.0);
  ScalarField f(g);
  for (int i = 0; i < g.num_nodes(); ++i) {
    Point p = g.point(i);
    f[i] = p[0] * p[0] + 3.0 * p[1] * p[1] - 2.0 * p[0] * p[1] + p[0] - 4.0;
  }
  ScalarField lap = laplacian(f);
  for (int i = 0; i < g.num_nodes(); ++i) {
    if (g.is_boundary(i)) {
      CHECK(std::isnan(lap[i]));
    } else {
      CHECK(lap[i] == Catch::Approx(8.0).margin(1e-12));
    }
  }
}

TEST_CASE("gradient is exact on affine data including the boundary ring", "[fields]") {
  Grid g = make_grid_2d(9, 9, 0.0, 1.0, 0.0, 1.0);
  ScalarField f(g);
  for (int i = 0; i < g.num_nodes(); ++i) {
    Point p = g.point(i);
    f[i] = 2.0 * p[0] - 5.0 * p[1] + 1.0;
  }
  VectorField df = gradient(f);
  for (int i = 0; i < g.num_nodes(); ++i) {
    CHECK(df.at(i, 0) == Catch::Approx(2.0).margin(1e-13));
    CHECK(df.at(i, 1) == Catch::Approx(-5.0).margin(1e-13));
  }
}

TEST_CASE("third difference recovers the third derivative of a cubic exactly",
          "[fields]") {
  Grid g = make_grid_1d(33, -1.0, 1.0);
  ScalarField f(g);
  for (int i = 0; i < g.num_nodes(); ++i) {
    double x = g.point(i)[0];
    f[i] = x * x * x - 2.0 * x * x + x;
  }
  ScalarField t = third_difference(f, 0);
  for (int i = 0; i < g.num_nodes(); ++i) {
    if (i < 2 || i > g.n[0] - 3) {
      CHECK(std::isnan(t[i]));
    } else {
      CHECK(t[i] == Catch::Approx(6.0).margin(1e-9));
    }
  }
}

TEST_CASE("periodic third difference has no NaN ring on periodic data", "[fields]") {
  Grid g = make_grid_1d(65, 0.0, 1.0);
  ScalarField f(g);
  for (int i = 0; i < g.num_nodes(); ++i)
    f[i] = std::sin(2.0 * 3.14159265358979323846 * g.point(i)[0]);
  ScalarField t = third_difference_periodic(f, 0);
  for (int i = 0; i < g.num_nodes(); ++i) CHECK_FALSE(std::isnan(t[i]));
  // d^3/dx^3 sin(2 pi x) = -(2 pi)^3 cos(2 pi x); check one interior node.
  double w = 2.0 * 3.14159265358979323846;
  CHECK(t[16] == Catch::Approx(-w * w * w * std::cos(w * g.point(16)[0])).epsilon(0.01));
}

TEST_CASE("ball_nodes collects exactly the nodes inside the ball", "[fields]") {
  Grid g = make_grid_2d(21, 21, -1.0, 1.0, -1.0, 1.0);
  std::vector<int> ball = ball_nodes(g, {0.15, -0.05}, 0.3);
  for (int i : ball) CHECK(dist(g.point(i), {0.15, -0.05}) <= 0.3 + 1e-15);
  int brute = 0;
  for (int i = 0; i < g.num_nodes(); ++i)
    if (dist(g.point(i), {0.15, -0.05}) <= 0.3) ++brute;
  CHECK(static_cast<int>(ball.size()) == brute);
}

TEST_CASE("field files round-trip bit-exactly", "[fields]") {
  Grid g = make_grid_2d(7, 5, 0.0, 1.5, -0.25, 0.75);
  VectorField f(g, 2);
  SplitMix64 rng(7);
  for (double& v : f.values) v = rng.uniform(-3.0, 3.0);
  f.values[3] = 0.1;  // not representable in binary: the 17-digit test case

  std::string path = std::filesystem::temp_directory_path() / "cmap_fields_roundtrip.tmp";
  save_field(path, f);
  VectorField back = load_field(path);
  REQUIRE(back.m == f.m);
  REQUIRE(same_grid(back.grid, f.grid));
  for (std::size_t k = 0; k < f.values.size(); ++k) CHECK(back.values[k] == f.values[k]);
  std::remove(path.c_str());
}

TEST_CASE("field loader rejects malformed files", "[fields]") {
  std::string path = std::filesystem::temp_directory_path() / "cmap_fields_bad.tmp";
  {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    REQUIRE(fp != nullptr);
    std::fprintf(fp, "2 1 4 4 0 1 0 1\n1.0\n2.0\n");  // truncated value list
    std::fclose(fp);
  }
  CHECK_THROWS_AS(load_field(path), Error);
  CHECK_THROWS_AS(load_field("/nonexistent/cmap.field"), Error);
  std::remove(path.c_str());
}
