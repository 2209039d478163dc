#pragma once

// Vector-valued energy minimization into the closure of the target manifold:
// nodewise nonlinear Gauss-Seidel (replace by the neighbor average, project back
// onto the closure when the average lands outside), red-black ordering, optional
// over-relaxation with an energy-descent safeguard. On top of the solver:
// the distance/image decomposition u = V + w nu(V), the reduced coefficients
// (g, a^i, tangential gradient, curvature terms h^i), the Euler-Lagrange
// residual, the closed-form 1-d contact example, and the harmonic corrector
// solve used to pass from V to the reduced field v = V^i - phi^i.

#include <cmath>
#include <cstdint>
#include <vector>

#include "cmap/fields.hpp"
#include "cmap/geometry.hpp"
#include "cmap/obstacle.hpp"

namespace cmap {

struct ConstraintMapSolution {
  TargetManifold target;
  VectorField u;
  double energy = 0.0;        // discrete Dirichlet energy h^(d-2) * sum_edges |du|^2
  int iterations = 0;
  bool converged = false;
  bool energy_monotone = true;  // no sweep increased the energy
  double final_omega = 1.0;

  // Decomposition (global closed forms; see decompose_map)
  VectorField V;
  ScalarField w;
  std::vector<std::uint8_t> in_tube;
  std::vector<std::uint8_t> contact_mask;
  std::vector<int> fb_points;
  double eps_fb = 0.0;
};

inline double discrete_energy(const VectorField& u) {
  const Grid& g = u.grid;
  double scale = g.dims == 1 ? 1.0 / g.h : 1.0;  // h^(d-2)
  double e = 0.0;
  for (int iy = 0; iy < g.n[1]; ++iy)
    for (int ix = 0; ix < g.n[0]; ++ix) {
      int i = g.index(ix, iy);
      if (ix + 1 < g.n[0])
        for (int c = 0; c < u.m; ++c) e += sqr(u.at(i + 1, c) - u.at(i, c));
      if (g.dims == 2 && iy + 1 < g.n[1])
        for (int c = 0; c < u.m; ++c) e += sqr(u.at(i + g.n[0], c) - u.at(i, c));
    }
  return scale * e;
}

/// Near-optimal SOR factor for Laplace sweeps on this grid (callers opt in;
/// the default solver behavior stays plain Gauss-Seidel, omega = 1).
inline double optimal_relaxation(const Grid& g) {
  double len = g.hi[0] - g.lo[0];
  if (g.dims == 2) len = std::min(len, g.hi[1] - g.lo[1]);
  return 2.0 / (1.0 + std::sin(3.14159265358979323846 * g.h / len));
}

namespace detail {

/// Projects y onto the closure of the target if it lies outside; `prev` breaks
/// the degenerate sphere case (average at the origin).
inline void project_into_closure(const TargetManifold& t, Eigen::VectorXd& y,
                                 const Eigen::VectorXd& prev) {
  if (t.kind == TargetKind::HalfSpace) {
    if (y(t.ambient_dim - 1) < 0.0) y(t.ambient_dim - 1) = 0.0;
    return;
  }
  double n = y.norm();
  if (n >= 1.0) return;
  if (n < 1e-300) {
    double pn = prev.norm();
    y = pn > 1e-300 ? (prev / pn).eval() : Eigen::VectorXd::Unit(t.ambient_dim, 0).eval();
    return;
  }
  y /= n;
}

}  // namespace detail

/// Fills V, w, tube flags, contact mask and fb nodes of `sol` from sol.u.
/// w = rho(u) and (for the sphere) V = u/|u| are global closed forms, so both
/// are filled everywhere they are defined; nodes outside the tubular
/// neighborhood are flagged so diagnostics can exclude them.
inline void decompose_map(ConstraintMapSolution& sol, double eps_fb = -1.0) {
  const TargetManifold& t = sol.target;
  const Grid& g = sol.u.grid;
  const int m = t.ambient_dim;
  sol.V = VectorField(g, m, nan64);
  sol.w = ScalarField(g, nan64);
  sol.in_tube.assign(static_cast<std::size_t>(g.num_nodes()), 0);
  for (int i = 0; i < g.num_nodes(); ++i) {
    Eigen::VectorXd y = sol.u.node(i);
    if (t.kind == TargetKind::HalfSpace) {
      sol.w[i] = y(m - 1);
      Eigen::VectorXd v = y;
      v(m - 1) = 0.0;
      sol.V.set_node(i, v);
    } else {
      double n = y.norm();
      if (n == 0.0) continue;  // degenerate: stays NaN, out of tube
      sol.w[i] = n - 1.0;
      sol.V.set_node(i, (y / n).eval());
    }
    if (std::abs(sol.w[i]) < t.tubular_halfwidth) sol.in_tube[static_cast<std::size_t>(i)] = 1;
  }
  ObstacleSolution tmp;
  tmp.w = sol.w;
  // Distance part below the detection threshold counts as contact.
  for (double& v : tmp.w.values)
    if (std::isnan(v)) v = inf64;
  contact_set(tmp, eps_fb >= 0.0 ? eps_fb : g.h * g.h);
  sol.contact_mask = std::move(tmp.contact_mask);
  sol.fb_points = std::move(tmp.fb_points);
  sol.eps_fb = tmp.eps_fb;
}

/// Constrained energy minimization. `dirichlet` supplies the boundary ring and
/// the interior initial guess. omega = 1 reproduces plain average-then-project
/// Gauss-Seidel; omega in (1,2) over-relaxes, guarded by an energy monitor that
/// halves (omega - 1) whenever a sweep fails to decrease the energy.
inline ConstraintMapSolution minimize_energy(const TargetManifold& t, const VectorField& dirichlet,
                                             double tol = 1e-6, int max_iter = 2000000,
                                             double omega = 1.0, double eps_fb = -1.0) {
  const Grid& g = dirichlet.grid;
  const int m = t.ambient_dim;
  if (dirichlet.m != m) fail(errc::invalid_argument, "dirichlet component count != ambient_dim");
  if (g.n[0] < 3 || (g.dims == 2 && g.n[1] < 3))
    fail(errc::grid_too_small, "map solve needs at least 3 nodes per axis");
  if (!(omega > 0.0) || omega >= 2.0) fail(errc::invalid_argument, "relaxation must be in (0,2)");

  ConstraintMapSolution sol;
  sol.target = t;
  sol.u = dirichlet;
  VectorField& u = sol.u;

  for (int i = 0; i < g.num_nodes(); ++i) {
    Eigen::VectorXd y = u.node(i);
    if (g.is_boundary(i)) {
      if (signed_distance(t, y) < -1e-12)
        fail(errc::boundary_data_outside_target, "Dirichlet datum outside the target closure");
      continue;
    }
    // Interior guess must start feasible.
    detail::project_into_closure(t, y, Eigen::VectorXd::Unit(m, 0));
    u.set_node(i, y);
  }

  const double change_tol = tol * g.h * g.h;
  double e_prev = discrete_energy(u);
  sol.energy = e_prev;

  Eigen::VectorXd avg(m), cand(m), prev(m);
  auto relax_node = [&](int i, int stride_y, double& chg) {
    double inv;
    for (int c = 0; c < m; ++c) avg(c) = u.at(i - 1, c) + u.at(i + 1, c);
    if (g.dims == 2) {
      for (int c = 0; c < m; ++c) avg(c) += u.at(i - stride_y, c) + u.at(i + stride_y, c);
      inv = 0.25;
    } else {
      inv = 0.5;
    }
    avg *= inv;
    prev = u.node(i);
    cand = prev + omega * (avg - prev);
    detail::project_into_closure(t, cand, prev);
    chg = std::max(chg, (cand - prev).norm());
    u.set_node(i, cand);
  };

  int it = 0;
  for (; it < max_iter; ++it) {
    double chg = 0.0;
    if (g.dims == 1) {
      for (int color = 0; color < 2; ++color)
        for (int i = 2 - color; i < g.n[0] - 1; i += 2) relax_node(i, 0, chg);
    } else {
      // Serial sweep: the nonlinear update touches Eigen scratch vectors, and
      // desk-scale grids converge in few sweeps at a good omega anyway.
      for (int color = 0; color < 2; ++color)
        for (int iy = 1; iy < g.n[1] - 1; ++iy) {
          int first = 2 - ((iy + color) & 1);
          for (int ix = first; ix < g.n[0] - 1; ix += 2) relax_node(g.index(ix, iy), g.n[0], chg);
        }
    }
    double e_now = discrete_energy(u);
    if (e_now > e_prev * (1.0 + 1e-12) + 1e-300) {
      sol.energy_monotone = false;
      if (omega > 1.0) omega = 1.0 + 0.5 * (omega - 1.0);  // back off toward plain GS
    }
    e_prev = e_now;
    if (chg <= change_tol) {
      sol.converged = true;
      ++it;
      break;
    }
  }
  sol.iterations = it;
  sol.energy = e_prev;
  sol.final_omega = omega;
  decompose_map(sol, eps_fb);
  return sol;
}

// ---------------------------------------------------------------------------
// Reduced coefficients of the image-map system  Delta V = a . Dw + h,
// a^i = -2 D(nu^i o V),  h^i = H_u((Du)^tau, (Du)^tau),  g = |beta(V) (Du)^tau|^2.
// ---------------------------------------------------------------------------

struct ReducedCoefficients {
  // Component layout for the (m x dims) per-node matrices: index i*dims + alpha.
  VectorField tangential_grad;  // (Du)^tau_{i,alpha} = D_alpha V^i + w D_alpha(nu^i o V)
  VectorField a;                // a^i_alpha
  VectorField h_terms;          // m components
  ScalarField g;                // curvature source of the distance part
};

inline ReducedCoefficients coefficients(const ConstraintMapSolution& sol) {
  const TargetManifold& t = sol.target;
  const Grid& gr = sol.u.grid;
  const int m = t.ambient_dim, d = gr.dims;

  // nu o V: equals V for the sphere target, the constant e_m for the half space.
  VectorField nuV(gr, m);
  for (int i = 0; i < gr.num_nodes(); ++i) {
    if (t.kind == TargetKind::HalfSpace) {
      for (int c = 0; c < m; ++c) nuV.at(i, c) = c == m - 1 ? 1.0 : 0.0;
    } else {
      for (int c = 0; c < m; ++c) nuV.at(i, c) = sol.V.at(i, c);
    }
  }

  std::vector<VectorField> dV(static_cast<std::size_t>(m)), dnuV(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) {
    dV[static_cast<std::size_t>(c)] = gradient(sol.V.component(c));
    dnuV[static_cast<std::size_t>(c)] = gradient(nuV.component(c));
  }

  ReducedCoefficients rc;
  rc.tangential_grad = VectorField(gr, m * d, nan64);
  rc.a = VectorField(gr, m * d, nan64);
  rc.h_terms = VectorField(gr, m, nan64);
  rc.g = ScalarField(gr, nan64);

  Eigen::VectorXd xi(m), bxi(m);
  for (int i = 0; i < gr.num_nodes(); ++i) {
    if (!sol.in_tube[static_cast<std::size_t>(i)]) continue;
    Eigen::VectorXd Vn = sol.V.node(i);
    Eigen::VectorXd un = sol.u.node(i);
    double wn = sol.w[i];
    bool ok = true;
    double gsum = 0.0;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(m);
    for (int al = 0; al < d && ok; ++al) {
      for (int c = 0; c < m; ++c) {
        double dv = dV[static_cast<std::size_t>(c)].at(i, al);
        double dn = dnuV[static_cast<std::size_t>(c)].at(i, al);
        if (std::isnan(dv) || std::isnan(dn)) {
          ok = false;
          break;
        }
        xi(c) = dv + wn * dn;
        rc.tangential_grad.at(i, c * d + al) = xi(c);
        rc.a.at(i, c * d + al) = -2.0 * dn;
      }
      if (!ok) break;
      if (t.kind == TargetKind::HalfSpace) {
        // Flat boundary: beta = 0 and H = 0; the distance source vanishes.
        continue;
      }
      bxi = xi - Vn * Vn.dot(xi);  // beta(V) = I - V V^T on the unit sphere
      gsum += bxi.squaredNorm();
      h += projection_hessian_quad(t, un, xi);
    }
    if (!ok) continue;
    rc.g[i] = gsum;
    for (int c = 0; c < m; ++c) rc.h_terms.at(i, c) = h(c);
  }
  return rc;
}

/// Max over well-interior nodes of |Delta_h u - A_u(D_h u, D_h u) Chi_contact|.
/// Nodes at graph distance <= 1 from a detected free-boundary node are skipped:
/// the centered Laplacian of a C^{1,1} map is O(1) wrong where the stencil
/// straddles the contact interface, which says nothing about the solve.
inline double euler_lagrange_residual(const ConstraintMapSolution& sol) {
  const TargetManifold& t = sol.target;
  const Grid& g = sol.u.grid;
  const int m = t.ambient_dim;

  // The equation switches branches where w hits zero. A five-point stencil
  // that straddles the interface sees a second-derivative jump and cannot be
  // expected to satisfy either branch, so the residual ignores nodes whose
  // stencil comes near it: any member with w in (0, 2h²] lies within ~2h of
  // the zero set, and detected interface nodes are excluded with one ring.
  std::vector<std::uint8_t> skip(static_cast<std::size_t>(g.num_nodes()), 0);
  auto mark = [&](int i) { skip[static_cast<std::size_t>(i)] = 1; };
  auto mark_around = [&](int i) {
    mark(i);
    int ix = g.ix_of(i), iy = g.iy_of(i);
    if (ix > 0) mark(i - 1);
    if (ix < g.n[0] - 1) mark(i + 1);
    if (g.dims == 2 && iy > 0) mark(i - g.n[0]);
    if (g.dims == 2 && iy < g.n[1] - 1) mark(i + g.n[0]);
  };
  for (int i : sol.fb_points) mark_around(i);
  const double band = 2.0 * g.h * g.h;
  for (int i = 0; i < g.num_nodes(); ++i) {
    double wi = sol.w[i];
    if (wi > 0.0 && wi <= band) mark_around(i);
  }

  std::vector<ScalarField> lap(static_cast<std::size_t>(m));
  std::vector<VectorField> grad(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) {
    lap[static_cast<std::size_t>(c)] = laplacian(sol.u.component(c));
    grad[static_cast<std::size_t>(c)] = gradient(sol.u.component(c));
  }

  double res = 0.0;
  Eigen::VectorXd xi(m);
  for (int i = 0; i < g.num_nodes(); ++i) {
    if (g.is_boundary(i) || skip[static_cast<std::size_t>(i)]) continue;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    if (sol.contact_mask[static_cast<std::size_t>(i)] && t.kind != TargetKind::HalfSpace) {
      Eigen::VectorXd un = sol.u.node(i);
      double nn = un.norm();
      if (nn == 0.0) continue;
      Eigen::VectorXd uh = un / nn;
      for (int al = 0; al < g.dims; ++al) {
        for (int c = 0; c < m; ++c) xi(c) = grad[static_cast<std::size_t>(c)].at(i, al);
        xi -= uh * uh.dot(xi);          // tangential part of the discrete gradient
        rhs -= xi.squaredNorm() * uh;   // A_u(xi, xi) = -|xi^tau|^2 u on the sphere
      }
    }
    for (int c = 0; c < m; ++c)
      res = std::max(res, std::abs(lap[static_cast<std::size_t>(c)][i] - rhs(c)));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Closed-form 1-d contact example: the map leaves the boundary tangentially at
// x = 0, straight segment for x < 0, unit-speed boundary arc for x >= 0.
// ---------------------------------------------------------------------------

struct ExactExample {
  VectorField u;       // (1,-x) for x<0, (cos x, -sin x) for x>=0
  VectorField V;       // image part (cos theta, -sin theta)
  ScalarField w;       // sqrt(1+x^2)-1 for x<0, 0 for x>=0
  ScalarField theta;   // atan(x) for x<0, x for x>=0
  // One-sided third-derivative limits of theta at the contact point.
  double theta_third_left = -2.0;
  double theta_third_right = 0.0;
};

inline ExactExample exact_example(const Grid& g) {
  if (g.dims != 1) fail(errc::invalid_argument, "the contact example is one-dimensional");
  ExactExample ex;
  ex.u = VectorField(g, 2);
  ex.V = VectorField(g, 2);
  ex.w = ScalarField(g);
  ex.theta = ScalarField(g);
  for (int i = 0; i < g.n[0]; ++i) {
    double x = g.x_of(i);
    double th = x < 0.0 ? std::atan(x) : x;
    ex.theta[i] = th;
    ex.V.at(i, 0) = std::cos(th);
    ex.V.at(i, 1) = -std::sin(th);
    if (x < 0.0) {
      ex.u.at(i, 0) = 1.0;
      ex.u.at(i, 1) = -x;
      ex.w[i] = std::sqrt(1.0 + x * x) - 1.0;
    } else {
      ex.u.at(i, 0) = std::cos(x);
      ex.u.at(i, 1) = -std::sin(x);
      ex.w[i] = 0.0;
    }
  }
  return ex;
}

/// Dirichlet solve of Delta phi = rhs on the grid nodes strictly inside
/// B_radius(center); every other node is pinned to `boundary_source`.
/// Used for the harmonic corrector phi^i (rhs = h^i, boundary = V^i).
inline ScalarField solve_poisson_ball(const ScalarField& rhs, const ScalarField& boundary_source,
                                      const Point& center, double radius, double tol = 1e-8,
                                      int max_iter = 2000000) {
  const Grid& g = rhs.grid;
  if (!same_grid(g, boundary_source.grid)) fail(errc::grid_mismatch, "grids differ");
  ScalarField phi = boundary_source;
  std::vector<int> inner;
  for (int i : ball_nodes(g, center, radius)) {
    if (g.is_boundary(i)) continue;
    int ix = g.ix_of(i), iy = g.iy_of(i);
    bool interior = dist(g.point(g.index(ix - 1, iy)), center) <= radius &&
                    dist(g.point(g.index(ix + 1, iy)), center) <= radius;
    if (g.dims == 2)
      interior = interior && dist(g.point(g.index(ix, iy - 1)), center) <= radius &&
                 dist(g.point(g.index(ix, iy + 1)), center) <= radius;
    if (interior) inner.push_back(i);
  }
  if (inner.empty()) fail(errc::insufficient_nodes, "analysis ball contains no interior nodes");
  for (int i : inner)
    if (std::isnan(rhs[i]) || std::isnan(phi[i]))
      fail(errc::invalid_argument, "NaN inside the analysis ball");

  const double h2 = g.h * g.h;
  const double omega = optimal_relaxation(g);
  const double change_tol = tol * h2;
  const double denom = g.dims == 1 ? 0.5 : 0.25;
  for (int it = 0; it < max_iter; ++it) {
    double chg = 0.0;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = pass; k < inner.size(); k += 2) {
        int i = inner[k];
        double s = phi[i - 1] + phi[i + 1];
        if (g.dims == 2) s += phi[i - g.n[0]] + phi[i + g.n[0]];
        double gs = denom * (s - h2 * rhs[i]);
        double cand = phi[i] + omega * (gs - phi[i]);
        chg = std::max(chg, std::abs(cand - phi[i]));
        phi[i] = cand;
      }
    if (chg <= change_tol) break;
  }
  return phi;
}

}  // namespace cmap
