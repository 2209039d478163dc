#pragma once

// Two-dimensional global solutions with conic contact sets. The contact set is
// the region a^2 x^2 + y^2 <= alpha x + beta y in a rotated frame (an ellipse
// for a > 0, a parabola for a = 0), or one of the flat degenerations
// (half-plane, line, strip). Outside the contact set the potential U solves
// Delta U = 1 with U = |DU| = 0 on the contact boundary; its gradient is
// expressed through the Schwarz function S of the boundary conic,
//     U_x - i U_y = (conj(z) - S(z)) / 2,
// and U itself is recovered either by a line quadrature from a boundary point
// (evaluate_U) or from an explicit antiderivative (evaluate_closed). The
// module also ships the thickness data (delta, mu, rho_hat), the comparison
// paraboloid p, and the two verification sweeps used by the experiments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "cmap/common.hpp"
#include "cmap/fields.hpp"
#include "cmap/obstacle.hpp"

namespace cmap {

enum class GlobalKind { Ellipse, Parabola, HalfPlane, Line, Strip };

struct GlobalParams {
  double axis_ratio = 1.0;  // a in the conic; 1 = disk, 0 = parabola
  double alpha = 1.0;       // linear coefficient in x (conic kinds, > 0)
  double beta = 0.0;        // linear coefficient in y
  double rotation = 0.0;    // frame-to-world angle, radians
  double width = 0.0;       // strip thickness (Strip only)
};

/// Comparison paraboloid p(z) = (m00 xh^2 + m11 yh^2)/2 in frame coordinates
/// centered at `center` (world), plus the thickness scales of the contact set.
struct ThicknessData {
  double delta = 1.0;    // analysis radius
  double mu = 1.0;       // contact half-thickness scale in the unit window
  double rho_hat = 0.0;  // distance-to-vertex correction (beta tilt)
  std::complex<double> center{0.0, 0.0};
  double m00 = 0.0, m11 = 0.0;
};

struct GlobalSolution {
  GlobalKind kind = GlobalKind::HalfPlane;
  GlobalParams par;
  std::complex<double> rot{1.0, 0.0};    // e^{i rotation}, cached for hot loops
  // Cached frame geometry (conic kinds).
  std::complex<double> z0{0.0, 0.0};     // ellipse center (frame)
  double axis_major = 0.0;               // A, x-direction semi-axis
  double axis_minor = 0.0;               // B, y-direction semi-axis
  double focal = 0.0;                    // c >= 0, c^2 = A^2 - B^2
  std::complex<double> zstar{0.0, 0.0};  // parabola branch point (frame)
  ThicknessData thick;
};

namespace detail {

inline std::complex<double> to_frame(const GlobalSolution& s, std::complex<double> z) {
  return z * std::conj(s.rot);
}

inline std::complex<double> to_world_vec(const GlobalSolution& s, std::complex<double> v) {
  return v * s.rot;
}

/// sqrt(zh^2 - c^2) on the branch that behaves like zh at infinity; the cut is
/// the focal segment [-c, c].
inline std::complex<double> focal_sqrt(std::complex<double> zh, double c) {
  if (c == 0.0) return zh;
  double scale = std::abs(zh) + c;
  if (std::abs(zh.imag()) <= 1e-13 * scale && std::abs(zh.real()) <= c + 1e-13 * scale)
    fail(errc::branch_cut, "point on the focal segment of the ellipse");
  std::complex<double> q = c / zh;
  return zh * std::sqrt(1.0 - q * q);
}

/// Quadratic contact predicate in frame coordinates (conic kinds).
inline double conic_Q(const GlobalSolution& s, std::complex<double> zf) {
  double a = s.par.axis_ratio;
  return sqr(a * zf.real()) + sqr(zf.imag()) - s.par.alpha * zf.real() - s.par.beta * zf.imag();
}

}  // namespace detail

inline bool contact_contains(const GlobalSolution& s, std::complex<double> z_world) {
  std::complex<double> zf = detail::to_frame(s, z_world);
  switch (s.kind) {
    case GlobalKind::Ellipse:
    case GlobalKind::Parabola:
      return detail::conic_Q(s, zf) <= 0.0;
    case GlobalKind::HalfPlane:
      return zf.real() <= 0.0;
    case GlobalKind::Line:
      return std::abs(zf.imag()) <= 1e-14 * (1.0 + std::abs(zf));
    case GlobalKind::Strip:
      return zf.imag() >= 0.0 && zf.imag() <= s.par.width;
  }
  return false;
}

namespace detail {

inline ThicknessData thickness_data(GlobalKind kind, const GlobalParams& par,
                                    std::complex<double> z0) {
  ThicknessData td;
  std::complex<double> rot = std::exp(std::complex<double>(0.0, par.rotation));
  if (kind == GlobalKind::HalfPlane) {
    td.m00 = 1.0;  // p = xh^2/2
    return td;
  }
  if (kind == GlobalKind::Line || kind == GlobalKind::Strip) {
    td.m11 = 1.0;  // p = yh^2/2, lower phase for the strip
    return td;
  }
  const double a = kind == GlobalKind::Parabola ? 0.0 : par.axis_ratio;
  const double al = par.alpha, be = par.beta;
  const double t = a > 0.0 ? std::min(al / (2.0 * a * a), 1.0) : 1.0;
  const double mu2 = be * be / 4.0 + al * t - a * a * t * t;
  td.mu = std::sqrt(mu2);
  td.rho_hat =
      be == 0.0 ? 0.0 : be * be / (2.0 * al) / (std::sqrt(1.0 + sqr(a * be / al)) + 1.0);

  const bool thin = al > 2.0 * a * a;  // vertex of the x-profile lies past the unit window
  if (td.mu >= 0.5) {
    // Contact already thick at unit scale: analyze at radius one with the
    // centered paraboloid.
    td.delta = 1.0;
    if (kind == GlobalKind::Parabola) {
      td.m11 = 1.0;
    } else {
      td.center = rot * z0;
      td.m00 = a / (1.0 + a);
      td.m11 = 1.0 / (1.0 + a);
    }
    return td;
  }
  if (thin) {
    td.delta = std::max(mu2, td.rho_hat / 4.0);
    td.m00 = -a / (1.0 - a);
    td.m11 = 1.0 / (1.0 - a);
  } else {
    td.delta = td.mu;  // = minor semi-axis of the ellipse
    td.center = rot * z0;
    td.m00 = a / (1.0 + a);
    td.m11 = 1.0 / (1.0 + a);
  }
  return td;
}

}  // namespace detail

inline GlobalSolution make_global(GlobalKind kind, const GlobalParams& par) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(par.axis_ratio) || !finite(par.alpha) || !finite(par.beta) ||
      !finite(par.rotation) || !finite(par.width))
    fail(errc::invalid_conic, "non-finite conic parameter");
  GlobalSolution s;
  s.kind = kind;
  s.par = par;
  s.rot = std::exp(std::complex<double>(0.0, par.rotation));
  switch (kind) {
    case GlobalKind::Ellipse: {
      double a = par.axis_ratio;
      if (!(a > 0.0) || a > 1.0) fail(errc::invalid_conic, "ellipse needs axis_ratio in (0,1]");
      if (!(par.alpha > 0.0)) fail(errc::invalid_conic, "ellipse needs alpha > 0");
      double rho2 = std::sqrt(sqr(par.alpha / (2.0 * a)) + sqr(par.beta / 2.0));
      s.z0 = {par.alpha / (2.0 * a * a), par.beta / 2.0};
      s.axis_major = rho2 / a;
      s.axis_minor = rho2;
      s.focal = std::sqrt(std::max(0.0, sqr(s.axis_major) - sqr(s.axis_minor)));
      break;
    }
    case GlobalKind::Parabola: {
      if (par.axis_ratio != 0.0) fail(errc::invalid_conic, "parabola needs axis_ratio = 0");
      if (!(par.alpha > 0.0)) fail(errc::invalid_conic, "parabola needs alpha > 0");
      std::complex<double> zeta(par.alpha, par.beta);
      s.zstar = zeta * zeta / (4.0 * par.alpha);
      break;
    }
    case GlobalKind::Strip:
      if (!(par.width > 0.0)) fail(errc::invalid_conic, "strip needs width > 0");
      break;
    case GlobalKind::HalfPlane:
    case GlobalKind::Line:
      break;
  }
  s.thick = detail::thickness_data(kind, par, s.z0);
  return s;
}

namespace detail {

/// Schwarz function in frame coordinates. Analytic across the exterior and up
/// to the contact boundary; throws branch_cut on the interior cut.
inline std::complex<double> schwarz_frame(const GlobalSolution& s, std::complex<double> zf) {
  switch (s.kind) {
    case GlobalKind::Ellipse: {
      std::complex<double> zh = zf - s.z0;
      double A = s.axis_major, B = s.axis_minor, c = s.focal;
      if (std::abs(zh) < 1e-150) fail(errc::branch_cut, "evaluation at the ellipse center");
      std::complex<double> f = focal_sqrt(zh, c);
      std::complex<double> den = (A * A + B * B) * zh + 2.0 * A * B * f;
      return std::conj(s.z0) + (c * c * zh * zh + 4.0 * A * A * B * B) / den;
    }
    case GlobalKind::Parabola: {
      std::complex<double> d = s.zstar - zf;
      double scale = std::abs(zf) + std::abs(s.zstar) + 1.0;
      if (std::abs(d.imag()) <= 1e-13 * scale && d.real() <= 1e-13 * scale)
        fail(errc::branch_cut, "point on the parabola branch ray");
      std::complex<double> zeta(s.par.alpha, s.par.beta);
      return zf - zeta + 2.0 * std::sqrt(s.par.alpha) * std::sqrt(d);
    }
    case GlobalKind::HalfPlane:
      return -zf;
    case GlobalKind::Line:
      return zf;
    case GlobalKind::Strip:
      // Two boundary lines; reflect across the nearer one.
      if (zf.imag() > 0.5 * s.par.width) return zf - std::complex<double>(0.0, 2.0 * s.par.width);
      return zf;
  }
  fail(errc::invalid_argument, "unreachable");
}

}  // namespace detail

/// Schwarz function in world coordinates: S_world(z) agrees with conj(z) on
/// the contact boundary.
inline std::complex<double> schwarz(const GlobalSolution& s, std::complex<double> z_world) {
  return std::conj(s.rot) * detail::schwarz_frame(s, detail::to_frame(s, z_world));
}

/// Gradient of the potential as a world vector (Ux, Uy); zero on the contact set.
inline std::complex<double> gradient_U(const GlobalSolution& s, std::complex<double> z_world) {
  if (contact_contains(s, z_world)) return {0.0, 0.0};
  std::complex<double> zf = detail::to_frame(s, z_world);
  std::complex<double> dbar = 0.5 * (std::conj(zf) - detail::schwarz_frame(s, zf));
  // dbar = Ux - i Uy in the frame; the gradient vector is its conjugate.
  return detail::to_world_vec(s, std::conj(dbar));
}

namespace detail {

/// Boundary point whose straight segment to zf stays outside the contact set
/// (frame coordinates, conic kinds, zf strictly exterior).
inline std::complex<double> anchor_point(const GlobalSolution& s, std::complex<double> zf) {
  if (s.kind == GlobalKind::Ellipse) {
    // Scale toward the center: the elliptic norm is monotone along the ray.
    std::complex<double> zh = zf - s.z0;
    double lam = std::sqrt(sqr(zh.real() / s.axis_major) + sqr(zh.imag() / s.axis_minor));
    return s.z0 + zh / lam;
  }
  // Parabola: nearest boundary point, sampled then refined; the segment to an
  // exterior point meets the convex interior only at the anchor.
  const double al = s.par.alpha, be = s.par.beta;
  auto bd = [&](double y) { return std::complex<double>((y * y - be * y) / al, y); };
  std::complex<double> vertex = bd(be / 2.0);
  double reach = 2.0 * std::abs(zf - vertex) + 1.0;
  double y_lo = zf.imag() - reach, y_hi = zf.imag() + reach;
  const int nscan = 512;
  double best_y = y_lo, best_d = inf64;
  for (int k = 0; k <= nscan; ++k) {
    double y = y_lo + (y_hi - y_lo) * k / nscan;
    double d = std::abs(bd(y) - zf);
    if (d < best_d) {
      best_d = d;
      best_y = y;
    }
  }
  double step = (y_hi - y_lo) / nscan;
  double lo = best_y - step, hi = best_y + step;
  for (int it = 0; it < 80; ++it) {  // golden-section polish
    double m1 = lo + 0.381966011250105 * (hi - lo);
    double m2 = hi - 0.381966011250105 * (hi - lo);
    if (std::abs(bd(m1) - zf) < std::abs(bd(m2) - zf))
      hi = m2;
    else
      lo = m1;
  }
  return bd(0.5 * (lo + hi));
}

/// Composite-midpoint quadrature of grad U along the segment a -> b (frame).
inline double segment_quadrature(const GlobalSolution& s, std::complex<double> a,
                                 std::complex<double> b, int steps) {
  std::complex<double> dz = (b - a) / static_cast<double>(steps);
  double acc = 0.0;
  for (int k = 0; k < steps; ++k) {
    std::complex<double> m = a + (k + 0.5) * dz;
    std::complex<double> dbar = 0.5 * (std::conj(m) - schwarz_frame(s, m));
    acc += (dbar * dz).real();
  }
  return acc;
}

}  // namespace detail

/// Potential by line quadrature from a contact-boundary anchor. Zero on the
/// contact set; flat kinds use their closed forms.
inline double evaluate_U(const GlobalSolution& s, std::complex<double> z_world, int steps = 200) {
  if (steps < 1) fail(errc::invalid_argument, "quadrature needs at least one step");
  if (contact_contains(s, z_world)) return 0.0;
  std::complex<double> zf = detail::to_frame(s, z_world);
  switch (s.kind) {
    case GlobalKind::HalfPlane:
      return sqr(std::max(zf.real(), 0.0)) / 2.0;
    case GlobalKind::Line:
      return sqr(zf.imag()) / 2.0;
    case GlobalKind::Strip:
      return zf.imag() < 0.0 ? sqr(zf.imag()) / 2.0 : sqr(zf.imag() - s.par.width) / 2.0;
    default:
      break;
  }
  std::complex<double> anchor = detail::anchor_point(s, zf);
  try {
    return std::max(0.0, detail::segment_quadrature(s, anchor, zf, steps));
  } catch (const Error& e) {
    if (e.code != errc::branch_cut) throw;
  }
  // The straight segment grazed the cut; retry via an outward dogleg.
  std::complex<double> out = zf - anchor;
  std::complex<double> way = anchor + out + std::complex<double>(-out.imag(), out.real());
  try {
    return std::max(0.0, detail::segment_quadrature(s, anchor, way, steps) +
                             detail::segment_quadrature(s, way, zf, steps));
  } catch (const Error& e) {
    if (e.code == errc::branch_cut)
      fail(errc::path_blocked, "no quadrature path to the evaluation point");
    throw;
  }
}

/// Potential from the explicit antiderivative of the Schwarz function
/// (fast path used by catalog scans; cross-checked against evaluate_U).
inline double evaluate_closed(const GlobalSolution& s, std::complex<double> z_world) {
  if (contact_contains(s, z_world)) return 0.0;
  std::complex<double> zf = detail::to_frame(s, z_world);
  switch (s.kind) {
    case GlobalKind::HalfPlane:
      return sqr(std::max(zf.real(), 0.0)) / 2.0;
    case GlobalKind::Line:
      return sqr(zf.imag()) / 2.0;
    case GlobalKind::Strip:
      return zf.imag() < 0.0 ? sqr(zf.imag()) / 2.0 : sqr(zf.imag() - s.par.width) / 2.0;
    default:
      break;
  }
  auto reT = [&](std::complex<double> z) {
    if (s.kind == GlobalKind::Ellipse) {
      std::complex<double> zh = z - s.z0;
      double A = s.axis_major, B = s.axis_minor, c = s.focal;
      std::complex<double> f = detail::focal_sqrt(zh, c);
      std::complex<double> den = (A * A + B * B) * zh + 2.0 * A * B * f;
      std::complex<double> Sc = (c * c * zh * zh + 4.0 * A * A * B * B) / den;
      return (std::conj(s.z0) * zh + 0.5 * zh * Sc).real() + A * B * std::log(std::abs(zh + f));
    }
    std::complex<double> zeta(s.par.alpha, s.par.beta);
    std::complex<double> d = s.zstar - z;
    std::complex<double> T =
        0.5 * z * z - zeta * z - (4.0 / 3.0) * std::sqrt(s.par.alpha) * d * std::sqrt(d);
    return T.real();
  };
  double u = std::norm(zf) / 4.0 - 0.5 * (reT(zf) - reT({0.0, 0.0}));
  return std::max(0.0, u);
}

inline ThicknessData delta_and_p(const GlobalSolution& s) { return s.thick; }

/// Comparison paraboloid at a world point.
inline double eval_p(const GlobalSolution& s, std::complex<double> z_world) {
  std::complex<double> zh = detail::to_frame(s, z_world - s.thick.center);
  return 0.5 * (s.thick.m00 * sqr(zh.real()) + s.thick.m11 * sqr(zh.imag()));
}

/// Gradient of the comparison paraboloid as a world vector.
inline std::complex<double> grad_p(const GlobalSolution& s, std::complex<double> z_world) {
  std::complex<double> zh = detail::to_frame(s, z_world - s.thick.center);
  return detail::to_world_vec(
      s, std::complex<double>(s.thick.m00 * zh.real(), s.thick.m11 * zh.imag()));
}

// ---------------------------------------------------------------------------
// Verification sweeps.
// ---------------------------------------------------------------------------

struct UpProfile {
  std::vector<double> radii;
  std::vector<double> ratios;  // sup |DU - Dp| / sqrt(delta r) over B_r(0)
  double worst = 0.0;
};

/// Samples |DU - Dp| on sunflower point sets in balls B_r(0) around the base
/// contact point and normalizes by sqrt(delta * r). Points on the branch cut
/// are skipped (measure zero).
inline UpProfile verify_Up(const GlobalSolution& s, int samples_per_ball = 10000,
                           int num_radii = 8) {
  if (samples_per_ball < 16 || num_radii < 1) fail(errc::invalid_argument, "sweep too small");
  UpProfile out;
  double delta = s.thick.delta;
  if (delta >= 1.0) {
    out.radii.assign(1, 1.0);
  } else {
    out.radii.resize(static_cast<std::size_t>(num_radii));
    for (int k = 0; k < num_radii; ++k)
      out.radii[static_cast<std::size_t>(k)] =
          delta * std::pow(1.0 / delta, num_radii == 1 ? 1.0 : double(k) / (num_radii - 1));
  }
  const double golden = 2.39996322972865332;
  for (double r : out.radii) {
    double worst = 0.0;
    for (int k = 0; k < samples_per_ball; ++k) {
      double rad = r * std::sqrt((k + 0.5) / samples_per_ball);
      std::complex<double> z = std::polar(rad, golden * k);
      try {
        double v = std::abs(gradient_U(s, z) - grad_p(s, z));
        worst = std::max(worst, v);
      } catch (const Error& e) {
        if (e.code != errc::branch_cut) throw;
      }
    }
    out.ratios.push_back(worst / std::sqrt(delta * r));
    out.worst = std::max(out.worst, out.ratios.back());
  }
  return out;
}

struct InsideAlternative {
  int components = 0;           // connected pieces of contact inside B_delta(0)
  double min_separation = 0.0;  // smallest gap between two pieces (inf if < 2)
  double contact_min_diam = 0.0;    // narrowest-strip width of the whole patch
  double component_min_diam = 0.0;  // smallest narrowest-strip width per piece
};

/// Discrete geometry of the contact set inside B_delta(0): connected
/// components, their closest approach, and narrowest-strip widths of the
/// patch as a whole and of each piece. A thick patch passes on its own
/// width; a split patch passes on separation plus per-piece width.
inline InsideAlternative inside_alternative(const GlobalSolution& s, int n = 129) {
  if (n < 9) fail(errc::invalid_argument, "alternative scan needs a finer grid");
  InsideAlternative out;
  const double delta = s.thick.delta;
  const double h = 2.0 * delta / (n - 1);
  std::vector<std::uint8_t> contact(std::size_t(n) * n, 0);
  auto at = [&](int ix, int iy) { return std::size_t(iy) * n + ix; };
  auto pos = [&](int ix, int iy) {
    return std::complex<double>(-delta + h * ix, -delta + h * iy);
  };
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      std::complex<double> z = pos(ix, iy);
      if (std::abs(z) <= delta && contact_contains(s, z)) contact[at(ix, iy)] = 1;
    }

  // Flood fill (4-neighbor) over contact nodes.
  std::vector<int> comp(std::size_t(n) * n, -1);
  std::vector<int> stack;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      if (!contact[at(ix, iy)] || comp[at(ix, iy)] >= 0) continue;
      int id = out.components++;
      stack.assign(1, int(at(ix, iy)));
      comp[at(ix, iy)] = id;
      while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        int cx = i % n, cy = i / n;
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int nx2 = cx + dx[k], ny2 = cy + dy[k];
          if (nx2 < 0 || nx2 >= n || ny2 < 0 || ny2 >= n) continue;
          std::size_t j = at(nx2, ny2);
          if (contact[j] && comp[j] < 0) {
            comp[j] = id;
            stack.push_back(int(j));
          }
        }
      }
    }

  out.min_separation = inf64;
  if (out.components >= 2) {
    // Closest approach is realized between piece rims: an inner node has all
    // four neighbors in its own piece, one of which is strictly closer to the
    // other piece.
    std::vector<std::vector<std::complex<double>>> rims(
        static_cast<std::size_t>(out.components));
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        std::size_t i = at(ix, iy);
        if (!contact[i]) continue;
        bool rim = false;
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4 && !rim; ++k) {
          int nx2 = ix + dx[k], ny2 = iy + dy[k];
          rim = nx2 < 0 || nx2 >= n || ny2 < 0 || ny2 >= n || !contact[at(nx2, ny2)];
        }
        if (rim) rims[static_cast<std::size_t>(comp[i])].push_back(pos(ix, iy));
      }
    for (std::size_t a = 0; a < rims.size(); ++a)
      for (std::size_t b = a + 1; b < rims.size(); ++b)
        for (auto& pa : rims[a])
          for (auto& pb : rims[b])
            out.min_separation = std::min(out.min_separation, std::abs(pa - pb));
  }

  std::vector<Point> all;
  std::vector<std::vector<Point>> per(static_cast<std::size_t>(out.components));
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      std::size_t i = at(ix, iy);
      if (!contact[i]) continue;
      std::complex<double> z = pos(ix, iy);
      Point p{z.real(), z.imag()};
      all.push_back(p);
      per[static_cast<std::size_t>(comp[i])].push_back(p);
    }
  out.contact_min_diam = all.empty() ? 0.0 : min_diameter(all);
  out.component_min_diam = inf64;
  for (auto& pc : per)
    out.component_min_diam = std::min(out.component_min_diam, min_diameter(pc));
  if (out.components == 0) out.component_min_diam = 0.0;
  return out;
}

}  // namespace cmap
