// cmap: configuration-driven experiment runner for the constraint-map lab.
// One subcommand per module. Every run writes a JSON report with sorted keys
// and the fully resolved configuration embedded, so a rerun with the same
// config and build diffs byte-identically. Results carry no wall-clock data.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cmap/config.hpp"
#include "cmap/constraint_map.hpp"
#include "cmap/global2d.hpp"
#include "cmap/obstacle.hpp"
#include "cmap/potential.hpp"
#include "cmap/regularity.hpp"

namespace {

using json = nlohmann::json;  // std::map-backed: keys serialize sorted
using namespace cmap;

// ---------------------------------------------------------------------------
// Report plumbing.
// ---------------------------------------------------------------------------

void emit_report(const std::string& dir, const std::string& name, const json& rep) {
  std::filesystem::create_directories(dir);
  std::string body = rep.dump(2);
  body.push_back('\n');
  std::ofstream out(dir + "/" + name, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write report " + dir + "/" + name);
  out << body;
  std::cout << body;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared config fragments.
// ---------------------------------------------------------------------------

Grid grid_from_config(const Config& cfg, int dims, json& resolved) {
  int n = static_cast<int>(cfg.get_int("grid", "n", 257));
  double x0 = cfg.get_double("grid", "xmin", -1.0);
  double x1 = cfg.get_double("grid", "xmax", 1.0);
  resolved["grid"]["n"] = n;
  resolved["grid"]["xmin"] = x0;
  resolved["grid"]["xmax"] = x1;
  if (dims == 1) return make_grid_1d(n, x0, x1);
  double y0 = cfg.get_double("grid", "ymin", -1.0);
  double y1 = cfg.get_double("grid", "ymax", 1.0);
  resolved["grid"]["ymin"] = y0;
  resolved["grid"]["ymax"] = y1;
  return make_grid_2d(n, n, x0, x1, y0, y1);
}

std::vector<double> scales_from_config(const Config& cfg, const std::string& sec,
                                       double def_top, int def_count, json& resolved) {
  double top = cfg.get_double(sec, "top", def_top);
  int count = static_cast<int>(cfg.get_int(sec, "count", def_count));
  resolved[sec]["top"] = top;
  resolved[sec]["count"] = count;
  return dyadic_scales(top, count);
}

// ---------------------------------------------------------------------------
// solve-obstacle
// ---------------------------------------------------------------------------

// Radial benchmark data: contact disk of radius r0, unit source.
double radial_w(double r, double r0) {
  if (r <= r0) return 0.0;
  return 0.25 * (r * r - r0 * r0) - 0.5 * r0 * r0 * std::log(r / r0);
}

void run_solve_obstacle(const std::string& cfg_path) {
  Config cfg = parse_config_file(cfg_path);
  cfg.restrict_sections({"grid", "obstacle", "scales", "output"});
  cfg.restrict_keys("grid", {"n", "xmin", "xmax", "ymin", "ymax"});
  cfg.restrict_keys("obstacle",
                    {"source_constant", "dirichlet", "r0", "tol", "max_iter", "eps_fb"});
  cfg.restrict_keys("scales", {"top", "count"});
  cfg.restrict_keys("output", {"dir"});

  json resolved;
  Grid g = grid_from_config(cfg, 2, resolved);
  double src = cfg.get_double("obstacle", "source_constant", 1.0);
  std::string diri = cfg.get_string("obstacle", "dirichlet", "radial");
  double r0 = cfg.get_double("obstacle", "r0", 0.5);
  double tol = cfg.get_double("obstacle", "tol", 1e-6);
  int max_iter = static_cast<int>(cfg.get_int("obstacle", "max_iter", 2000000));
  double eps_fb = cfg.get_double("obstacle", "eps_fb", -1.0);
  std::string dir = cfg.get_string("output", "dir", ".");
  resolved["obstacle"] = {{"source_constant", src}, {"dirichlet", diri},     {"r0", r0},
                          {"tol", tol},             {"max_iter", max_iter},  {"eps_fb", eps_fb}};
  resolved["output"]["dir"] = dir;

  ScalarField gs(g, src), bc(g, 0.0);
  if (diri == "radial") {
    for (int i = 0; i < g.num_nodes(); ++i)
      if (g.is_boundary(i)) {
        Point p = g.point(i);
        bc[i] = radial_w(std::hypot(p[0], p[1]), r0);
      }
  } else if (diri != "zero") {
    fail(errc::config_parse, "dirichlet must be 'radial' or 'zero', got " + diri);
  }

  ObstacleSolution sol = solve_obstacle(gs, bc, tol, max_iter, eps_fb);

  // Thickness profile of the contact set, measured around its centroid.
  std::vector<double> ladder = scales_from_config(cfg, "scales", 0.5, 4, resolved);
  std::vector<int> contact;
  Point centroid{0.0, 0.0};
  for (int i = 0; i < g.num_nodes(); ++i)
    if (sol.contact_mask[static_cast<std::size_t>(i)]) {
      contact.push_back(i);
      Point p = g.point(i);
      centroid[0] += p[0];
      centroid[1] += p[1];
    }
  if (!contact.empty()) {
    centroid[0] /= static_cast<double>(contact.size());
    centroid[1] /= static_cast<double>(contact.size());
  }
  json profile = json::array();
  for (double r : ladder) {
    std::vector<Point> pts;
    for (int i : contact)
      if (dist(g.point(i), centroid) <= r) pts.push_back(g.point(i));
    double md = pts.size() < 2 ? 0.0 : min_diameter(pts);
    profile.push_back({{"r", r}, {"min_diam", md}});
  }

  std::filesystem::create_directories(dir);
  save_field(dir + "/w.field", sol.w);

  json rep;
  rep["config"] = resolved;
  rep["converged"] = sol.converged;
  rep["fb_point_count"] = sol.fb_points.size();
  rep["iterations"] = sol.iterations;
  rep["min_diam_profile"] = profile;
  rep["residual"] = sol.residual;
  emit_report(dir, "report.json", rep);
}

// ---------------------------------------------------------------------------
// solve-map
// ---------------------------------------------------------------------------

// Boundary profile of the tilted contact example: a flat piece glued to an
// arc of the unit circle along t = x cos(phi) + y sin(phi) - offset.
void tilted_profile(double t, double& u0, double& u1) {
  if (t < 0.0) {
    u0 = 1.0;
    u1 = -t;
  } else {
    u0 = std::cos(t);
    u1 = -std::sin(t);
  }
}

void run_solve_map(const std::string& cfg_path) {
  Config cfg = parse_config_file(cfg_path);
  cfg.restrict_sections({"grid", "map", "output"});
  cfg.restrict_keys("grid", {"n", "xmin", "xmax", "ymin", "ymax", "dims"});
  cfg.restrict_keys("map", {"target", "ambient_dim", "boundary", "phi", "offset", "tol",
                            "omega", "max_iter", "eps_fb"});
  cfg.restrict_keys("output", {"dir"});

  json resolved;
  int dims = static_cast<int>(cfg.get_int("grid", "dims", 2));
  if (dims != 1 && dims != 2) fail(errc::config_parse, "grid dims must be 1 or 2");
  resolved["grid"]["dims"] = dims;
  Grid g = grid_from_config(cfg, dims, resolved);

  std::string target_name = cfg.get_string("map", "target", "sphere-complement");
  int ambient = static_cast<int>(cfg.get_int("map", "ambient_dim", 2));
  std::string boundary = cfg.get_string("map", "boundary",
                                        dims == 1 ? "contact-example" : "tilted-profile");
  double phi = cfg.get_double("map", "phi", 0.35);
  double offset = cfg.get_double("map", "offset", 0.1);
  double tol = cfg.get_double("map", "tol", 1e-6);
  double omega = cfg.get_double("map", "omega", -1.0);
  int max_iter = static_cast<int>(cfg.get_int("map", "max_iter", 2000000));
  double eps_fb = cfg.get_double("map", "eps_fb", -1.0);
  std::string dir = cfg.get_string("output", "dir", ".");
  double omega_used = omega > 0.0 ? omega : optimal_relaxation(g);
  resolved["map"] = {{"target", target_name}, {"ambient_dim", ambient},
                     {"boundary", boundary},  {"phi", phi},
                     {"offset", offset},      {"tol", tol},
                     {"omega", omega_used},   {"max_iter", max_iter},
                     {"eps_fb", eps_fb}};
  resolved["output"]["dir"] = dir;

  TargetManifold target;
  if (target_name == "sphere-complement")
    target = make_sphere_complement(ambient);
  else if (target_name == "half-space")
    target = make_half_space(ambient);
  else
    fail(errc::config_parse, "target must be 'sphere-complement' or 'half-space'");

  VectorField diri(g, ambient, 0.0);
  if (boundary == "contact-example") {
    if (dims != 1) fail(errc::config_parse, "contact-example boundary is one-dimensional");
    if (ambient != 2) fail(errc::config_parse, "contact-example needs ambient_dim = 2");
    ExactExample ex = exact_example(g);
    diri = ex.u;
  } else if (boundary == "tilted-profile") {
    if (dims != 2) fail(errc::config_parse, "tilted-profile boundary is two-dimensional");
    if (ambient != 2) fail(errc::config_parse, "tilted-profile needs ambient_dim = 2");
    for (int i = 0; i < g.num_nodes(); ++i) {
      Point p = g.point(i);
      double t = p[0] * std::cos(phi) + p[1] * std::sin(phi) - offset;
      tilted_profile(t, diri.at(i, 0), diri.at(i, 1));
    }
  } else {
    fail(errc::config_parse, "boundary must be 'contact-example' or 'tilted-profile'");
  }

  ConstraintMapSolution sol = minimize_energy(target, diri, tol, max_iter, omega_used, eps_fb);
  double el = euler_lagrange_residual(sol);
  int in_contact = 0;
  for (std::uint8_t b : sol.contact_mask) in_contact += b;

  std::filesystem::create_directories(dir);
  save_field(dir + "/u.field", sol.u);
  save_field(dir + "/V.field", sol.V);
  save_field(dir + "/w.field", sol.w);

  json rep;
  rep["config"] = resolved;
  rep["contact_fraction"] = static_cast<double>(in_contact) / g.num_nodes();
  rep["converged"] = sol.converged;
  rep["el_residual"] = el;
  rep["energy"] = sol.energy;
  rep["energy_monotone"] = sol.energy_monotone;
  rep["fb_point_count"] = sol.fb_points.size();
  rep["iterations"] = sol.iterations;
  emit_report(dir, "report.json", rep);
}

// ---------------------------------------------------------------------------
// regularity
// ---------------------------------------------------------------------------

std::vector<Point> read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open points file " + path);
  std::vector<Point> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream ls(t);
    Point p{0.0, 0.0};
    if (!(ls >> p[0] >> p[1]))
      fail(errc::io_error, "points line " + std::to_string(lineno) + ": expected x,y");
    pts.push_back(p);
  }
  if (pts.empty()) fail(errc::invalid_argument, "points file holds no points");
  return pts;
}

void run_regularity(const std::string& field_path, const std::string& points_path,
                    const std::string& cfg_path) {
  Config cfg = parse_config_file(cfg_path);
  cfg.restrict_sections({"regularity", "scales", "gap", "output"});
  cfg.restrict_keys("regularity", {"eps_fb", "source_constant", "source_field", "degree",
                                   "snap_radius", "tol_g", "tau"});
  cfg.restrict_keys("scales", {"top", "count"});
  cfg.restrict_keys("gap", {"top", "count", "sigma"});
  cfg.restrict_keys("output", {"dir"});

  ScalarField w = load_scalar_field(field_path);
  const Grid& g = w.grid;
  if (g.dims != 2) fail(errc::invalid_argument, "regularity diagnostics run on 2-d fields");

  json resolved;
  double eps_fb = cfg.get_double("regularity", "eps_fb", -1.0);
  double eps_eff = eps_fb > 0.0 ? eps_fb : g.h * g.h;
  int degree = static_cast<int>(cfg.get_int("regularity", "degree", 3));
  double snap_radius = cfg.get_double("regularity", "snap_radius", 2.0 * g.h);
  double tol_g = cfg.get_double("regularity", "tol_g", 1e-6);
  double tau = cfg.get_double("regularity", "tau", 0.1);
  std::string dir = cfg.get_string("output", "dir", ".");
  resolved["regularity"] = {{"eps_fb", eps_eff}, {"degree", degree},
                            {"snap_radius", snap_radius}, {"tol_g", tol_g}, {"tau", tau}};
  resolved["output"]["dir"] = dir;

  ScalarField g_src(g, cfg.get_double("regularity", "source_constant", 1.0));
  if (cfg.has("regularity", "source_field")) {
    g_src = load_scalar_field(cfg.get_raw("regularity", "source_field"));
    if (!same_grid(g_src.grid, g)) fail(errc::grid_mismatch, "source field grid differs");
    resolved["regularity"]["source_field"] = cfg.get_raw("regularity", "source_field");
  } else {
    resolved["regularity"]["source_constant"] = g_src[0];
  }

  std::vector<double> scales = scales_from_config(cfg, "scales", 0.3, 4, resolved);
  std::vector<double> gap_radii = scales_from_config(cfg, "gap", 0.2, 3, resolved);
  double sigma = cfg.get_double("gap", "sigma", 0.5);
  resolved["gap"]["sigma"] = sigma;

  ObstacleSolution sol;
  sol.w = w;
  contact_set(sol, eps_eff);

  std::ostringstream csv;
  csv << "# regularity report; resolved config:\n# " << resolved.dump() << "\n";
  csv << "x,y,exponent,classification,r0,lambda_max,cubic_ratio_max\n";
  for (const Point& want : read_points_csv(points_path)) {
    // Snap to the nearest detected free-boundary node within snap_radius.
    int node = -1;
    double best = inf64;
    for (int i : sol.fb_points) {
      double d = dist(g.point(i), want);
      if (d < best) {
        best = d;
        node = i;
      }
    }
    if (node < 0 || best > snap_radius)
      fail(errc::not_free_boundary_point,
           "no free-boundary node within snap_radius of (" + format_g17(want[0]) + ", " +
               format_g17(want[1]) + ")");
    Point x0 = g.point(node);

    GrowthResult gr = growth_exponent(w, x0, degree, scales);
    ClassifyResult cl = classify_point(sol, g_src, node, scales, tol_g, tau);
    GapResult gap = gap_test(w, cl.g_at_point, x0, gap_radii, sigma, tol_g);
    CubicGrowthResult cg = cubic_growth_check(w, x0, scales);
    double cubic_max = 0.0;
    for (double r : cg.ratios) cubic_max = std::max(cubic_max, r);

    csv << format_g17(x0[0]) << ',' << format_g17(x0[1]) << ',' << format_g17(gr.exponent)
        << ',' << (cl.cls == FreeBoundaryClass::Regular ? "regular" : "singular") << ','
        << format_g17(cl.r0) << ',' << format_g17(gap.zero_coefficient ? 0.0 : gap.lambda)
        << ',' << format_g17(cubic_max) << "\n";
  }

  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/regularity.csv", std::ios::binary);
  if (!out) fail(errc::io_error, "cannot write " + dir + "/regularity.csv");
  out << csv.str();
  std::cout << csv.str();
}

// ---------------------------------------------------------------------------
// global2d
// ---------------------------------------------------------------------------

GlobalKind parse_kind(const std::string& s) {
  if (s == "ellipse") return GlobalKind::Ellipse;
  if (s == "parabola") return GlobalKind::Parabola;
  if (s == "half-plane") return GlobalKind::HalfPlane;
  if (s == "line") return GlobalKind::Line;
  if (s == "strip") return GlobalKind::Strip;
  fail(errc::config_parse,
       "kind must be one of ellipse|parabola|half-plane|line|strip, got " + s);
}

GlobalParams parse_params(const std::string& spec) {
  GlobalParams p;
  if (spec.empty()) return p;
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      fail(errc::config_parse, "params entry '" + item + "' is not key=value");
    std::string key = detail::trim(item.substr(0, eq));
    std::string val = detail::trim(item.substr(eq + 1));
    std::size_t idx = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &idx);
    } catch (const std::exception&) {
      fail(errc::config_parse, "params value for " + key + " is not a number");
    }
    if (idx != val.size()) fail(errc::config_parse, "trailing characters in params " + key);
    if (key == "axis_ratio")
      p.axis_ratio = v;
    else if (key == "alpha")
      p.alpha = v;
    else if (key == "beta")
      p.beta = v;
    else if (key == "rotation")
      p.rotation = v;
    else if (key == "width")
      p.width = v;
    else
      fail(errc::config_parse, "unknown params key " + key);
  }
  return p;
}

// 100 points along the contact boundary of the instance, world coordinates.
std::vector<std::complex<double>> boundary_points(const GlobalSolution& s) {
  std::vector<std::complex<double>> pts;
  std::complex<double> rot = s.rot;
  const int count = 100;
  switch (s.kind) {
    case GlobalKind::Ellipse:
      for (int k = 0; k < count; ++k) {
        double ph = 2.0 * pi64 * k / count;
        std::complex<double> zf = s.z0 + std::complex<double>(s.axis_major * std::cos(ph),
                                                              s.axis_minor * std::sin(ph));
        pts.push_back(zf * rot);
      }
      break;
    case GlobalKind::Parabola:
      for (int k = 0; k < count; ++k) {
        double y = s.par.beta + 10.0 * (static_cast<double>(k) / (count - 1) - 0.5);
        double x = (y * y - s.par.beta * y) / s.par.alpha;
        pts.push_back(std::complex<double>(x, y) * rot);
      }
      break;
    case GlobalKind::HalfPlane:
      for (int k = 0; k < count; ++k) {
        double y = 10.0 * (static_cast<double>(k) / (count - 1) - 0.5);
        pts.push_back(std::complex<double>(0.0, y) * rot);
      }
      break;
    case GlobalKind::Line:
      for (int k = 0; k < count; ++k) {
        double x = 10.0 * (static_cast<double>(k) / (count - 1) - 0.5);
        pts.push_back(std::complex<double>(x, 0.0) * rot);
      }
      break;
    case GlobalKind::Strip:
      for (int k = 0; k < count; ++k) {
        double x = 10.0 * (static_cast<double>(k / 2) / (count / 2 - 1) - 0.5);
        double y = (k % 2) ? s.par.width : 0.0;
        pts.push_back(std::complex<double>(x, y) * rot);
      }
      break;
  }
  return pts;
}

void run_global2d(const std::string& kind_str, const std::string& params_str, bool verify,
                  double c0, const std::string& dir) {
  GlobalKind kind = parse_kind(kind_str);
  GlobalParams par = parse_params(params_str);
  GlobalSolution s = make_global(kind, par);

  double worst = 0.0;
  for (std::complex<double> z : boundary_points(s))
    worst = std::max(worst, std::abs(schwarz(s, z) - std::conj(z)));

  json rep;
  rep["config"] = {{"kind", kind_str},
                   {"params",
                    {{"axis_ratio", par.axis_ratio},
                     {"alpha", par.alpha},
                     {"beta", par.beta},
                     {"rotation", par.rotation},
                     {"width", par.width}}},
                   {"verify", verify},
                   {"c0", c0}};
  rep["delta"] = s.thick.delta;
  rep["max_schwarz_residual"] = worst;
  rep["mu"] = s.thick.mu;

  if (verify) {
    UpProfile up = verify_Up(s);
    InsideAlternative ia = inside_alternative(s);
    rep["max_Up_ratio"] = up.worst;
    json upj;
    upj["radii"] = up.radii;
    upj["ratios"] = up.ratios;
    rep["up_profile"] = upj;
    double delta = s.thick.delta, mu = s.thick.mu;
    std::string inside_case = "unresolved";
    if (ia.contact_min_diam >= delta / c0)
      inside_case = "case1-thick-patch";
    else if (ia.components >= 2 && ia.min_separation >= mu * std::sqrt(delta) / c0 &&
             ia.component_min_diam >= delta / c0)
      inside_case = "case2-split-patch";
    rep["inside_case"] = inside_case;
    rep["inside_detail"] = {{"components", ia.components},
                            {"min_separation", ia.min_separation},
                            {"contact_min_diam", ia.contact_min_diam},
                            {"component_min_diam", ia.component_min_diam}};
  }
  emit_report(dir, "report.json", rep);
}

// ---------------------------------------------------------------------------
// potential
// ---------------------------------------------------------------------------

void run_potential(bool check_bound, const std::string& modulus, double delta, double alpha,
                   int n, const std::string& dir) {
  if (!check_bound)
    fail(errc::invalid_argument, "nothing to do: pass --check-bound");
  GrowthModulus om;
  if (modulus == "power")
    om.form = GrowthModulus::Form::Power;
  else if (modulus == "log")
    om.form = GrowthModulus::Form::LogConstant;
  else
    fail(errc::config_parse, "modulus must be 'power' or 'log', got " + modulus);
  om.alpha = alpha;
  om.delta = delta;
  validate_modulus(om);

  Grid g = make_grid_2d(n, n, -1.0, 1.0, -1.0, 1.0);
  ScalarField f = canonical_bound_source(g, om);
  double phi0 = potential_phi(f, 0, {0.0, 0.0});
  Point gr0 = potential_phi_gradient(f, 0, {0.0, 0.0});

  std::vector<double> radii;
  for (int k = 1; k <= 8; ++k) radii.push_back(std::pow(delta, (8.0 - k) / 8.0));
  QuadBoundProfile qb = verify_quad_bound(om, f, radii);

  json rep;
  rep["config"] = {{"modulus", modulus}, {"delta", delta}, {"alpha", alpha}, {"n", n}};
  rep["grad_phi_at_origin"] = std::hypot(gr0[0], gr0[1]);
  rep["max_ratio"] = qb.worst;
  rep["per_r_profile"] = {{"radii", qb.radii}, {"ratios", qb.ratios}};
  rep["phi_at_origin"] = phi0;
  emit_report(dir, "report.json", rep);
}

// ---------------------------------------------------------------------------
// reproduce-example
// ---------------------------------------------------------------------------

void run_reproduce_example(double h, const std::string& dir) {
  if (!(h > 0.0) || h > 0.1) fail(errc::invalid_argument, "h must lie in (0, 0.1]");
  int n = static_cast<int>(std::lround(2.0 / h)) + 1;
  if (n % 2 == 0) ++n;  // keep a node exactly at the contact point x = 0
  Grid g = make_grid_1d(n, -1.0, 1.0);
  ExactExample ex = exact_example(g);

  TargetManifold target = make_sphere_complement(2);
  ConstraintMapSolution sol =
      minimize_energy(target, ex.u, 1e-8, 2000000, optimal_relaxation(g));
  double sup_err = 0.0;
  for (int i = 0; i < g.num_nodes(); ++i)
    for (int c = 0; c < 2; ++c)
      sup_err = std::max(sup_err, std::abs(sol.u.at(i, c) - ex.u.at(i, c)));

  // One-sided third differences of the angle variable at the contact point,
  // taken on the closed-form profile: the left limit is -2, the right is 0.
  int k0 = (n - 1) / 2;
  auto th = [&](int k) { return ex.theta[k]; };
  double h3 = g.h * g.h * g.h;
  double left = (th(k0) - 3.0 * th(k0 - 1) + 3.0 * th(k0 - 2) - th(k0 - 3)) / h3;
  double right = (th(k0 + 3) - 3.0 * th(k0 + 2) + 3.0 * th(k0 + 1) - th(k0)) / h3;

  json rep;
  rep["config"] = {{"h", g.h}, {"n", n}};
  rep["energy"] = sol.energy;
  rep["iterations"] = sol.iterations;
  rep["sup_error"] = sup_err;
  rep["theta_third_left"] = left;
  rep["theta_third_right"] = right;
  emit_report(dir, "report.json", rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Constraint-map laboratory: obstacle solves, constrained map solves, pointwise "
      "regularity diagnostics, explicit 2-d global solutions, and potential bounds."};
  app.require_subcommand(1);
  app.footer("Environment: CMAP_THREADS caps the number of worker threads.");

  std::string cfg_path, field_path, points_path, out_dir = ".";
  std::string kind = "ellipse", params, modulus = "power";
  bool verify = false, check_bound = false;
  double c0 = 25.0, delta = 0.05, alpha = 0.5, h = 1e-3;
  int quad_n = 317;

  CLI::App* so = app.add_subcommand("solve-obstacle", "Solve the scalar obstacle problem");
  so->add_option("--config", cfg_path, "Experiment config file")->required();

  CLI::App* sm = app.add_subcommand("solve-map", "Solve the constrained map problem");
  sm->add_option("--config", cfg_path, "Experiment config file")->required();

  CLI::App* rg = app.add_subcommand("regularity", "Pointwise free-boundary diagnostics");
  rg->add_option("--field", field_path, "Scalar field file (distance part w)")->required();
  rg->add_option("--points", points_path, "CSV of x,y probe points")->required();
  rg->add_option("--config", cfg_path, "Diagnostics config file")->required();

  CLI::App* g2 = app.add_subcommand("global2d", "Explicit 2-d global solution checks");
  g2->add_option("--kind", kind, "ellipse|parabola|half-plane|line|strip")->required();
  g2->add_option("--params", params,
                 "Comma list of key=value: axis_ratio, alpha, beta, rotation, width");
  g2->add_flag("--verify", verify, "Run the gradient-bound and thickness verification");
  g2->add_option("--c0", c0,
                 "Empirical Lemma constant for the thickness thresholds (from the sweep)");
  g2->add_option("--out", out_dir, "Output directory (created if missing)");

  CLI::App* po = app.add_subcommand("potential", "Generalized Newtonian potential checks");
  po->add_flag("--check-bound", check_bound, "Verify the modulus-weighted growth bound");
  po->add_option("--modulus", modulus, "power|log")->required();
  po->add_option("--delta", delta, "Hypothesis scale in (0,1)")->required();
  po->add_option("--alpha", alpha, "Power-form exponent parameter in [0,1]");
  po->add_option("--n", quad_n, "Quadrature grid nodes per axis");
  po->add_option("--out", out_dir, "Output directory (created if missing)");

  CLI::App* re = app.add_subcommand("reproduce-example",
                                    "Reproduce the 1-d contact example and its third "
                                    "derivative jump");
  re->add_option("--h", h, "Grid spacing on [-1,1]");
  re->add_option("--out", out_dir, "Output directory (created if missing)");

  try {
    app.parse(argc, argv);
    if (so->parsed()) run_solve_obstacle(cfg_path);
    if (sm->parsed()) run_solve_map(cfg_path);
    if (rg->parsed()) run_regularity(field_path, points_path, cfg_path);
    if (g2->parsed()) run_global2d(kind, params, verify, c0, out_dir);
    if (po->parsed()) run_potential(check_bound, modulus, delta, alpha, quad_n, out_dir);
    if (re->parsed()) run_reproduce_example(h, out_dir);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    json err = {{"error", {{"code", errc_name(e.code)}, {"what", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return e.code == errc::config_parse ? 2 : 1;
  } catch (const std::exception& e) {
    json err = {{"error", {{"code", "internal"}, {"what", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 1;
  }
  return 0;
}
