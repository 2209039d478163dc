#pragma once

// Uniform grids on boxes in R^1 / R^2 and the finite-difference operators the
// diagnostics are built from. Values are stored row-major with x fastest;
// vector fields keep the components of one node adjacent ("components innermost").
//
// Stencils: 3/5-point Laplacian, O(h^2) central gradient (one-sided O(h^2) on the
// boundary ring), and the antisymmetric third difference
//   (f(x+2h) - 2 f(x+h) + 2 f(x-h) - f(x-2h)) / (2 h^3),
// exact on cubics and quartics. Nodes where a stencil does not fit are NaN.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cmap/common.hpp"

namespace cmap {

using Point = std::array<double, 2>;  // y component ignored for 1-d grids

inline double dist(const Point& a, const Point& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

struct Grid {
  int dims = 1;                         // 1 or 2
  std::array<int, 2> n = {2, 1};        // nodes per axis (n[1]=1 when dims==1)
  std::array<double, 2> lo = {0.0, 0.0};
  std::array<double, 2> hi = {1.0, 0.0};
  double h = 1.0;                       // common spacing, equal on both axes

  int num_nodes() const { return n[0] * n[1]; }
  int index(int ix, int iy = 0) const { return iy * n[0] + ix; }
  int ix_of(int idx) const { return idx % n[0]; }
  int iy_of(int idx) const { return idx / n[0]; }
  double x_of(int ix) const { return lo[0] + ix * h; }
  double y_of(int iy) const { return dims == 2 ? lo[1] + iy * h : 0.0; }
  Point point(int idx) const { return {x_of(ix_of(idx)), y_of(iy_of(idx))}; }

  bool is_boundary(int idx) const {
    int ix = ix_of(idx), iy = iy_of(idx);
    if (ix == 0 || ix == n[0] - 1) return true;
    return dims == 2 && (iy == 0 || iy == n[1] - 1);
  }
  /// Distance (in nodes) to the nearest grid edge along any axis.
  int ring_depth(int idx) const {
    int ix = ix_of(idx), iy = iy_of(idx);
    int d = std::min(ix, n[0] - 1 - ix);
    if (dims == 2) d = std::min(d, std::min(iy, n[1] - 1 - iy));
    return d;
  }
};

inline Grid make_grid_1d(int nx, double x0, double x1) {
  if (nx < 2) fail(errc::grid_too_small, "1-d grid needs at least 2 nodes");
  if (!(x1 > x0)) fail(errc::invalid_argument, "grid extent must be increasing");
  Grid g;
  g.dims = 1;
  g.n = {nx, 1};
  g.lo = {x0, 0.0};
  g.hi = {x1, 0.0};
  g.h = (x1 - x0) / (nx - 1);
  return g;
}

inline Grid make_grid_2d(int nx, int ny, double x0, double x1, double y0, double y1) {
  if (nx < 2 || ny < 2) fail(errc::grid_too_small, "2-d grid needs at least 2 nodes per axis");
  if (!(x1 > x0) || !(y1 > y0)) fail(errc::invalid_argument, "grid extent must be increasing");
  Grid g;
  g.dims = 2;
  g.n = {nx, ny};
  g.lo = {x0, y0};
  g.hi = {x1, y1};
  g.h = (x1 - x0) / (nx - 1);
  double hy = (y1 - y0) / (ny - 1);
  if (std::abs(g.h - hy) > 1e-14 * std::max(1.0, std::abs(g.h)))
    fail(errc::invalid_argument, "grid spacing must be equal on both axes");
  return g;
}

inline bool same_grid(const Grid& a, const Grid& b) {
  return a.dims == b.dims && a.n == b.n && a.lo == b.lo && a.hi == b.hi;
}

struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), values(static_cast<std::size_t>(g.num_nodes()), fill) {}

  double& operator[](int idx) { return values[static_cast<std::size_t>(idx)]; }
  double operator[](int idx) const { return values[static_cast<std::size_t>(idx)]; }
  double& at(int ix, int iy = 0) { return values[static_cast<std::size_t>(grid.index(ix, iy))]; }
  double at(int ix, int iy = 0) const { return values[static_cast<std::size_t>(grid.index(ix, iy))]; }
};

struct VectorField {
  Grid grid;
  int m = 1;  // components per node
  std::vector<double> values;  // node-major, components innermost

  VectorField() = default;
  VectorField(const Grid& g, int comps, double fill = 0.0)
      : grid(g), m(comps), values(static_cast<std::size_t>(g.num_nodes()) * comps, fill) {}

  double& at(int idx, int c) { return values[static_cast<std::size_t>(idx) * m + c]; }
  double at(int idx, int c) const { return values[static_cast<std::size_t>(idx) * m + c]; }

  Eigen::VectorXd node(int idx) const {
    Eigen::VectorXd v(m);
    for (int c = 0; c < m; ++c) v(c) = at(idx, c);
    return v;
  }
  void set_node(int idx, const Eigen::VectorXd& v) {
    for (int c = 0; c < m; ++c) at(idx, c) = v(c);
  }

  ScalarField component(int c) const {
    ScalarField f(grid);
    for (int i = 0; i < grid.num_nodes(); ++i) f[i] = at(i, c);
    return f;
  }
};

/// 3/5-point Laplacian; the boundary ring is NaN (stencil does not fit).
inline ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  if (g.n[0] < 3 || (g.dims == 2 && g.n[1] < 3))
    fail(errc::grid_too_small, "laplacian needs at least 3 nodes per axis");
  ScalarField out(g, nan64);
  double h2 = g.h * g.h;
  if (g.dims == 1) {
    for (int i = 1; i < g.n[0] - 1; ++i) out[i] = (f[i - 1] + f[i + 1] - 2.0 * f[i]) / h2;
    return out;
  }
  for (int iy = 1; iy < g.n[1] - 1; ++iy)
    for (int ix = 1; ix < g.n[0] - 1; ++ix) {
      int i = g.index(ix, iy);
      out[i] = (f[i - 1] + f[i + 1] + f[i - g.n[0]] + f[i + g.n[0]] - 4.0 * f[i]) / h2;
    }
  return out;
}

namespace detail {
// O(h^2) first derivative along a line of `n` samples with stride `s`.
inline double d1_axis(const std::vector<double>& v, int i, int pos, int n, int s, double h) {
  if (pos == 0) return (-3.0 * v[i] + 4.0 * v[i + s] - v[i + 2 * s]) / (2.0 * h);
  if (pos == n - 1) return (3.0 * v[i] - 4.0 * v[i - s] + v[i - 2 * s]) / (2.0 * h);
  return (v[i + s] - v[i - s]) / (2.0 * h);
}
}  // namespace detail

/// Central O(h^2) gradient, one-sided O(h^2) on the boundary ring.
inline VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid;
  if (g.n[0] < 3 || (g.dims == 2 && g.n[1] < 3))
    fail(errc::grid_too_small, "gradient needs at least 3 nodes per axis");
  VectorField out(g, g.dims);
  for (int iy = 0; iy < g.n[1]; ++iy)
    for (int ix = 0; ix < g.n[0]; ++ix) {
      int i = g.index(ix, iy);
      out.at(i, 0) = detail::d1_axis(f.values, i, ix, g.n[0], 1, g.h);
      if (g.dims == 2) out.at(i, 1) = detail::d1_axis(f.values, i, iy, g.n[1], g.n[0], g.h);
    }
  return out;
}

/// Antisymmetric third difference along `axis`; two rings of NaN per side.
inline ScalarField third_difference(const ScalarField& f, int axis) {
  const Grid& g = f.grid;
  if (axis < 0 || axis >= g.dims) fail(errc::invalid_argument, "axis out of range");
  int na = g.n[axis];
  if (na < 5) fail(errc::grid_too_small, "third difference needs at least 5 nodes along the axis");
  ScalarField out(g, nan64);
  int s = axis == 0 ? 1 : g.n[0];
  double d = 2.0 * g.h * g.h * g.h;
  for (int iy = 0; iy < g.n[1]; ++iy)
    for (int ix = 0; ix < g.n[0]; ++ix) {
      int pos = axis == 0 ? ix : iy;
      if (pos < 2 || pos > na - 3) continue;
      int i = g.index(ix, iy);
      out[i] = (f[i + 2 * s] - 2.0 * f[i + s] + 2.0 * f[i - s] - f[i - 2 * s]) / d;
    }
  return out;
}

/// Same stencil with periodic wrapping (period n-1 nodes, endpoints identified).
inline ScalarField third_difference_periodic(const ScalarField& f, int axis) {
  const Grid& g = f.grid;
  if (axis < 0 || axis >= g.dims) fail(errc::invalid_argument, "axis out of range");
  int na = g.n[axis];
  if (na < 5) fail(errc::grid_too_small, "third difference needs at least 5 nodes along the axis");
  ScalarField out(g, nan64);
  int period = na - 1;
  double d = 2.0 * g.h * g.h * g.h;
  auto wrap = [&](int p) { return ((p % period) + period) % period; };
  for (int iy = 0; iy < g.n[1]; ++iy)
    for (int ix = 0; ix < g.n[0]; ++ix) {
      int i = g.index(ix, iy);
      int pos = axis == 0 ? ix : iy;
      auto sample = [&](int off) {
        int p = wrap(pos + off);
        return axis == 0 ? f[g.index(p, iy)] : f[g.index(ix, p)];
      };
      out[i] = (sample(2) - 2.0 * sample(1) + 2.0 * sample(-1) - sample(-2)) / d;
    }
  return out;
}

/// Indices of grid nodes inside the closed ball B_r(c).
inline std::vector<int> ball_nodes(const Grid& g, const Point& c, double r) {
  std::vector<int> out;
  int ix0 = std::max(0, static_cast<int>(std::ceil((c[0] - r - g.lo[0]) / g.h)));
  int ix1 = std::min(g.n[0] - 1, static_cast<int>(std::floor((c[0] + r - g.lo[0]) / g.h)));
  if (g.dims == 1) {
    for (int ix = ix0; ix <= ix1; ++ix)
      if (std::abs(g.x_of(ix) - c[0]) <= r) out.push_back(g.index(ix));
    return out;
  }
  int iy0 = std::max(0, static_cast<int>(std::ceil((c[1] - r - g.lo[1]) / g.h)));
  int iy1 = std::min(g.n[1] - 1, static_cast<int>(std::floor((c[1] + r - g.lo[1]) / g.h)));
  double r2 = r * r;
  for (int iy = iy0; iy <= iy1; ++iy)
    for (int ix = ix0; ix <= ix1; ++ix) {
      double dx = g.x_of(ix) - c[0], dy = g.y_of(iy) - c[1];
      if (dx * dx + dy * dy <= r2) out.push_back(g.index(ix, iy));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Field files. Line 1: "dims m nx [ny] xmin xmax [ymin ymax]"; then one value
// per line, nodes row-major, components innermost, 17 significant digits.
// ---------------------------------------------------------------------------

namespace detail {
inline void write_header(std::FILE* fp, const Grid& g, int m) {
  if (g.dims == 1)
    std::fprintf(fp, "1 %d %d %.17g %.17g\n", m, g.n[0], g.lo[0], g.hi[0]);
  else
    std::fprintf(fp, "2 %d %d %d %.17g %.17g %.17g %.17g\n", m, g.n[0], g.n[1], g.lo[0], g.hi[0],
                 g.lo[1], g.hi[1]);
}
inline void write_values(std::FILE* fp, const std::vector<double>& v) {
  for (double x : v) std::fprintf(fp, "%.17g\n", x);
}
}  // namespace detail

inline void save_field(const std::string& path, const VectorField& f) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) fail(errc::io_error, "cannot open for writing: " + path);
  detail::write_header(fp, f.grid, f.m);
  detail::write_values(fp, f.values);
  std::fclose(fp);
}

inline void save_field(const std::string& path, const ScalarField& f) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) fail(errc::io_error, "cannot open for writing: " + path);
  detail::write_header(fp, f.grid, 1);
  detail::write_values(fp, f.values);
  std::fclose(fp);
}

inline VectorField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open for reading: " + path);
  std::string header;
  if (!std::getline(in, header)) fail(errc::io_error, "empty field file: " + path);
  std::istringstream hs(header);
  int dims = 0, m = 0;
  if (!(hs >> dims >> m)) fail(errc::io_error, "bad field header: " + path);
  Grid g;
  if (dims == 1) {
    int nx;
    double x0, x1;
    if (!(hs >> nx >> x0 >> x1)) fail(errc::io_error, "bad 1-d field header: " + path);
    g = make_grid_1d(nx, x0, x1);
  } else if (dims == 2) {
    int nx, ny;
    double x0, x1, y0, y1;
    if (!(hs >> nx >> ny >> x0 >> x1 >> y0 >> y1))
      fail(errc::io_error, "bad 2-d field header: " + path);
    g = make_grid_2d(nx, ny, x0, x1, y0, y1);
  } else {
    fail(errc::io_error, "unsupported dims in field file: " + path);
  }
  if (m < 1) fail(errc::io_error, "bad component count: " + path);
  VectorField f(g, m);
  std::string line;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (!std::getline(in, line)) fail(errc::io_error, "truncated field file: " + path);
    f.values[k] = std::strtod(line.c_str(), nullptr);
  }
  return f;
}

inline ScalarField load_scalar_field(const std::string& path) {
  VectorField f = load_field(path);
  if (f.m != 1) fail(errc::io_error, "expected a scalar field: " + path);
  ScalarField s(f.grid);
  s.values = std::move(f.values);
  return s;
}

}  // namespace cmap
