#pragma once

// Scalar obstacle problems  Delta w = g Chi_{w>0},  w >= 0,  Dirichlet data,
// solved by projected red-black SOR (relaxation 1.5). Free-boundary tooling:
// contact masks, free-boundary nodes, the min-diameter statistic (width of the
// narrowest enclosing strip, 360 sampled directions), and the regular/singular
// classification by the thickness ratio min_diam(contact ∩ B_r)/r.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cmap/fields.hpp"

namespace cmap {

struct ObstacleSolution {
  ScalarField w;
  std::vector<std::uint8_t> contact_mask;  // w <= eps_fb, interior nodes
  std::vector<int> fb_points;              // contact nodes with a free 4-neighbor
  double residual = 0.0;                   // max_i min(w_i, |Delta_h w - g|_i)
  int iterations = 0;
  bool converged = false;
  double eps_fb = 0.0;
};

namespace detail {

inline double complementarity_residual(const ScalarField& w, const ScalarField& g) {
  const Grid& gr = w.grid;
  double res = 0.0;
  double h2 = gr.h * gr.h;
  if (gr.dims == 1) {
    for (int i = 1; i < gr.n[0] - 1; ++i) {
      double lap = (w[i - 1] + w[i + 1] - 2.0 * w[i]) / h2;
      res = std::max(res, std::min(w[i], std::abs(lap - g[i])));
    }
    return res;
  }
  for (int iy = 1; iy < gr.n[1] - 1; ++iy)
    for (int ix = 1; ix < gr.n[0] - 1; ++ix) {
      int i = gr.index(ix, iy);
      double lap = (w[i - 1] + w[i + 1] + w[i - gr.n[0]] + w[i + gr.n[0]] - 4.0 * w[i]) / h2;
      res = std::max(res, std::min(w[i], std::abs(lap - g[i])));
    }
  return res;
}

}  // namespace detail

/// Rebuilds the contact mask {w <= eps_fb} and the free-boundary node list
/// (contact nodes with at least one non-contact 4-neighbor). Boundary-ring
/// nodes are never flagged; the mask is about the interior complementarity.
inline void contact_set(ObstacleSolution& sol, double eps_fb) {
  const Grid& g = sol.w.grid;
  sol.eps_fb = eps_fb;
  sol.contact_mask.assign(static_cast<std::size_t>(g.num_nodes()), 0);
  sol.fb_points.clear();
  for (int i = 0; i < g.num_nodes(); ++i)
    if (sol.w[i] <= eps_fb) sol.contact_mask[static_cast<std::size_t>(i)] = 1;
  auto on = [&](int i) { return sol.contact_mask[static_cast<std::size_t>(i)] != 0; };
  for (int i = 0; i < g.num_nodes(); ++i) {
    // Boundary nodes carry the mask but are never free-boundary points: the
    // interface there belongs to the Dirichlet data, not to the solution.
    if (!on(i) || g.is_boundary(i)) continue;
    int ix = g.ix_of(i), iy = g.iy_of(i);
    bool fb = (ix > 0 && !on(i - 1)) || (ix < g.n[0] - 1 && !on(i + 1));
    if (g.dims == 2 && !fb)
      fb = (iy > 0 && !on(i - g.n[0])) || (iy < g.n[1] - 1 && !on(i + g.n[0]));
    if (fb) sol.fb_points.push_back(i);
  }
}

/// Projected red-black SOR for Delta w = g Chi_{w>0}, w >= 0.
/// `dirichlet` supplies the boundary ring and the initial guess (clamped >= 0).
/// Stops when the sweep max-change <= tol*h^2 and the complementarity residual
/// <= tol; non-convergence is reported through the flag, not an exception.
inline ObstacleSolution solve_obstacle(const ScalarField& g_src, const ScalarField& dirichlet,
                                       double tol = 1e-6, int max_iter = 2000000,
                                       double eps_fb = -1.0) {
  const Grid& g = g_src.grid;
  if (!same_grid(g, dirichlet.grid)) fail(errc::grid_mismatch, "g and dirichlet grids differ");
  if (g.n[0] < 3 || (g.dims == 2 && g.n[1] < 3))
    fail(errc::grid_too_small, "obstacle solve needs at least 3 nodes per axis");
  for (double v : g_src.values)
    if (v < 0.0) fail(errc::negative_source, "source term must be nonnegative");
  for (int i = 0; i < g.num_nodes(); ++i)
    if (g.is_boundary(i) && dirichlet[i] < 0.0)
      fail(errc::invalid_argument, "Dirichlet data must be nonnegative");

  ObstacleSolution sol;
  sol.w = dirichlet;
  for (int i = 0; i < g.num_nodes(); ++i)
    if (!g.is_boundary(i)) sol.w[i] = std::max(0.0, sol.w[i]);

  const double omega = 1.5;
  const double h2 = g.h * g.h;
  const double change_tol = tol * h2;
  ScalarField& w = sol.w;

  // Red-black: nodes of one color have no stencil neighbors of the same color,
  // so the in-color update order (and any threading of it) cannot matter.
  auto sweep_1d = [&](int color) {
    double chg = 0.0;
    int first = 1 + ((1 + color) & 1);
    for (int i = first; i < g.n[0] - 1; i += 2) {
      double gs = 0.5 * (w[i - 1] + w[i + 1] - h2 * g_src[i]);
      double cand = std::max(0.0, w[i] + omega * (gs - w[i]));
      chg = std::max(chg, std::abs(cand - w[i]));
      w[i] = cand;
    }
    return chg;
  };
  auto sweep_2d_row = [&](int iy, int color) {
    double chg = 0.0;
    int first = 2 - ((iy + color) & 1);  // nodes with (ix+iy) parity == color
    const int stride = g.n[0];
    for (int ix = first; ix < g.n[0] - 1; ix += 2) {
      int i = g.index(ix, iy);
      double gs = 0.25 * (w[i - 1] + w[i + 1] + w[i - stride] + w[i + stride] - h2 * g_src[i]);
      double cand = std::max(0.0, w[i] + omega * (gs - w[i]));
      chg = std::max(chg, std::abs(cand - w[i]));
      w[i] = cand;
    }
    return chg;
  };

  int it = 0;
  for (; it < max_iter; ++it) {
    double chg = 0.0;
    if (g.dims == 1) {
      chg = std::max(sweep_1d(0), sweep_1d(1));
    } else {
      for (int color = 0; color < 2; ++color) {
        const std::size_t rows = static_cast<std::size_t>(g.n[1] - 2);
        std::vector<double> chunk_chg(64, 0.0);
        parallel_chunks(rows, [&](std::size_t b, std::size_t e, std::size_t cid) {
          double local = 0.0;
          for (std::size_t r = b; r < e; ++r)
            local = std::max(local, sweep_2d_row(static_cast<int>(r) + 1, color));
          chunk_chg[cid] = local;
        });
        for (double c : chunk_chg) chg = std::max(chg, c);
      }
    }
    if (chg <= change_tol) {
      sol.residual = detail::complementarity_residual(w, g_src);
      if (sol.residual <= tol) {
        sol.converged = true;
        ++it;
        break;
      }
    }
  }
  sol.iterations = it;
  if (!sol.converged) sol.residual = detail::complementarity_residual(w, g_src);
  contact_set(sol, eps_fb >= 0.0 ? eps_fb : h2);
  return sol;
}

/// Width of the narrowest strip containing the points: min over 360 sampled
/// directions of the projection extent. Singletons give 0.
inline double min_diameter(const std::vector<Point>& pts) {
  if (pts.empty()) fail(errc::empty_set, "min_diameter of an empty set");
  if (pts.size() == 1) return 0.0;
  double best = inf64;
  for (int k = 0; k < 360; ++k) {
    double th = k * (3.14159265358979323846 / 360.0);
    double c = std::cos(th), s = std::sin(th);
    double mn = inf64, mx = -inf64;
    for (const Point& p : pts) {
      double proj = c * p[0] + s * p[1];
      mn = std::min(mn, proj);
      mx = std::max(mx, proj);
    }
    best = std::min(best, mx - mn);
  }
  return best;
}

inline double min_diameter(const Grid& g, const std::vector<int>& nodes) {
  std::vector<Point> pts;
  pts.reserve(nodes.size());
  for (int i : nodes) pts.push_back(g.point(i));
  return min_diameter(pts);
}

enum class FreeBoundaryClass { Regular, Singular };

struct ClassifyResult {
  FreeBoundaryClass cls = FreeBoundaryClass::Singular;
  double r0 = 0.0;          // smallest tested scale whose thickness ratio >= tau (0: none)
  double max_ratio = 0.0;   // max over tested scales of min_diam(contact ∩ B_r)/r
  double g_at_point = 0.0;
  std::vector<double> ratio_profile;  // per requested scale, same order
};

/// Regular iff g(x0) > tol_g AND the contact set is thick at some tested scale
/// (min-diameter ratio >= tau). x0 must be a detected free-boundary node.
inline ClassifyResult classify_point(const ObstacleSolution& sol, const ScalarField& g_src,
                                     int x0_node, const std::vector<double>& scales,
                                     double tol_g = 1e-6, double tau = 0.1) {
  const Grid& g = sol.w.grid;
  if (!same_grid(g, g_src.grid)) fail(errc::grid_mismatch, "solution and source grids differ");
  if (std::find(sol.fb_points.begin(), sol.fb_points.end(), x0_node) == sol.fb_points.end())
    fail(errc::not_free_boundary_point, "node is not a detected free-boundary point");
  if (scales.empty()) fail(errc::invalid_argument, "no scales given");

  ClassifyResult out;
  out.g_at_point = g_src[x0_node];
  Point c = g.point(x0_node);
  for (double r : scales) {
    std::vector<int> contact;
    for (int i : ball_nodes(g, c, r))
      if (sol.contact_mask[static_cast<std::size_t>(i)]) contact.push_back(i);
    double ratio = contact.empty() ? 0.0 : min_diameter(g, contact) / r;
    out.ratio_profile.push_back(ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
    if (ratio >= tau) out.r0 = (out.r0 == 0.0) ? r : std::min(out.r0, r);
  }
  out.cls = (out.g_at_point > tol_g && out.max_ratio >= tau) ? FreeBoundaryClass::Regular
                                                             : FreeBoundaryClass::Singular;
  return out;
}

}  // namespace cmap
