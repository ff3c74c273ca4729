// phimin: profiles, width tables, hypothesis checks, graph-equation solves,
// verification suites and the uniqueness experiment, from one binary.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "phimin/experiments.hpp"
#include "phimin/geometry.hpp"
#include "phimin/pde.hpp"
#include "phimin/profile.hpp"
#include "phimin/weight.hpp"

using nlohmann::json;
using namespace phimin;

namespace {

constexpr const char* kVersion = "1.0.0";

WeightSpec weight_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad --phi JSON: {}", e.what()));
  }
  const std::string family = j.value("family", "");
  WeightSpec spec = [&] {
    if (family == "identity") return WeightSpec::identity();
    if (family == "linear") return WeightSpec::linear(j.value("k", 1.0));
    if (family == "quadratic") return WeightSpec::quadratic();
    if (family == "alpha_log") return WeightSpec::alpha_log(j.value("alpha", 1.0));
    if (family == "arctan") return WeightSpec::arctan();
    if (family == "user_table") {
      std::vector<std::array<double, 2>> pts;
      for (const auto& p : j.at("points")) pts.push_back({p.at(0), p.at(1)});
      return WeightSpec::user_table(std::move(pts));
    }
    throw ConfigError(fmt::format("unknown weight family '{}'", family));
  }();
  if (j.value("reflected", false)) spec = spec.reflect();
  return spec;
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

void write_text(const std::string& path, const std::string& text) {
  if (path == "-" || path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot open '{}' for writing", path));
  out << text;
}

void write_manifest(const std::string& path, const std::string& command, const json& inputs,
                    const json& tolerances) {
  if (path.empty()) return;
  json m{{"tool", "phimin"},
         {"version", kVersion},
         {"command", command},
         {"inputs", inputs},
         {"tolerances", tolerances}};
  write_text(path, m.dump(2) + "\n");
}

// --- tiny SVG emitters -----------------------------------------------------

std::string svg_line_plot(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::string& title) {
  const int W = 720, H = 480, M = 50;
  double xlo = xs.front(), xhi = xs.front(), ylo = ys.front(), yhi = ys.front();
  for (double v : xs) { xlo = std::min(xlo, v); xhi = std::max(xhi, v); }
  for (double v : ys) { ylo = std::min(ylo, v); yhi = std::max(yhi, v); }
  if (xhi == xlo) xhi = xlo + 1;
  if (yhi == ylo) yhi = ylo + 1;
  auto px = [&](double x) { return M + (W - 2 * M) * (x - xlo) / (xhi - xlo); };
  auto py = [&](double y) { return H - M - (H - 2 * M) * (y - ylo) / (yhi - ylo); };
  std::string s = fmt::format(
      "<svg xmlns='http://www.w3.org/2000/svg' width='{}' height='{}'>\n"
      "<rect width='100%' height='100%' fill='white'/>\n"
      "<text x='{}' y='24' font-family='monospace' font-size='14'>{}</text>\n"
      "<polyline fill='none' stroke='black' stroke-width='1.5' points='",
      W, H, M, title);
  for (std::size_t k = 0; k < xs.size(); ++k)
    s += fmt::format("{:.2f},{:.2f} ", px(xs[k]), py(ys[k]));
  s += fmt::format(
      "'/>\n<text x='{}' y='{}' font-family='monospace' font-size='11'>[{:.6g}, {:.6g}] x "
      "[{:.6g}, {:.6g}]</text>\n</svg>\n",
      M, H - 12, xlo, xhi, ylo, yhi);
  return s;
}

std::string svg_heatmap(int nx, int ny, const NodeField& f, const std::string& title) {
  const int cell = std::max(2, 640 / std::max(nx, ny));
  const int W = nx * cell + 20, H = ny * cell + 50;
  double lo = f[0], hi = f[0];
  for (double v : f) { lo = std::min(lo, v); hi = std::max(hi, v); }
  const double span = (hi > lo) ? hi - lo : 1.0;
  std::string s = fmt::format(
      "<svg xmlns='http://www.w3.org/2000/svg' width='{}' height='{}'>\n"
      "<text x='10' y='20' font-family='monospace' font-size='13'>{} range [{:.3g}, "
      "{:.3g}]</text>\n",
      W, H, title, lo, hi);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double t = (f[static_cast<std::size_t>(i) * ny + j] - lo) / span;
      const int r = static_cast<int>(255 * t), b = static_cast<int>(255 * (1 - t));
      s += fmt::format("<rect x='{}' y='{}' width='{}' height='{}' fill='rgb({},{},{})'/>\n",
                       10 + i * cell, 30 + (ny - 1 - j) * cell, cell, cell, r, 64, b);
    }
  s += "</svg>\n";
  return s;
}

// --- shared solve helper ----------------------------------------------------

std::pair<GraphPatch, SolveReport> solve_on_domain(const WeightSpec& spec, double h,
                                                   double x0, double x1, double y0, double y1,
                                                   int nx, int ny, double perturb,
                                                   unsigned seed) {
  IntegrationOptions iopts;
  iopts.x_cap = std::max({std::abs(x0), std::abs(x1), 10.0}) * 1.5;
  const ProfileSolution prof = integrate_profile(spec, h, iopts);
  GraphPatch tmpl(x0, x1, y0, y1, nx, ny);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
  const double p1 = seed ? uni(rng) : 0.0;
  const double p2 = seed ? uni(rng) : 0.0;
  std::function<double(double, double)> pert;
  if (perturb != 0.0)
    pert = [=](double x, double y) {
      return perturb * std::sin(2.0 * x + p1) * std::sin(2.0 * y + p2);
    };
  const BoundaryData bc = make_boundary_from_profile(prof, tmpl, pert);
  return solve_graph_equation(spec, tmpl, bc);
}

json solve_report_json(const SolveReport& rep) {
  return json{{"iterations", rep.iterations},
              {"final_residual_norm", rep.final_residual_norm},
              {"damping_history", rep.damping_history},
              {"converged", rep.converged}};
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    out.push_back(std::stod(csv.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for weighted-minimal graphs and catenary cylinders"};
  app.require_subcommand(1);
  // --h is a value option here, so help is long-form only.
  app.set_help_flag("--help", "print help");
  auto sub = [](CLI::App* parent, const char* name, const char* desc) {
    CLI::App* s = parent->add_subcommand(name, desc);
    s->set_help_flag("--help", "print help");
    return s;
  };

  std::string phi_json = R"({"family":"identity"})";
  std::string out_path, manifest_path, plot_path, report_path;
  double h = 0.0, tol = 1e-10;

  // profile
  auto* cmd_profile = sub(&app, "profile", "integrate the catenary profile, emit CSV");
  double xmax = 0.0;
  cmd_profile->add_option("--phi", phi_json, "weight spec JSON");
  cmd_profile->add_option("--h", h, "neck height u(0)");
  cmd_profile->add_option("--xmax", xmax, "stop at this x (0 = run to termination)");
  cmd_profile->add_option("--tol", tol, "width tolerance");
  cmd_profile->add_option("--out", out_path, "CSV path ('-' = stdout)");
  cmd_profile->add_option("--plot", plot_path, "SVG line plot path");
  cmd_profile->add_option("--manifest", manifest_path, "manifest JSON path");

  // width
  auto* cmd_width = sub(&app, "width", "half-width table over neck heights");
  std::string h_list = "0";
  cmd_width->add_option("--phi", phi_json, "weight spec JSON");
  cmd_width->add_option("--h-list", h_list, "comma-separated neck heights");
  cmd_width->add_option("--tol", tol, "quadrature tolerance");
  cmd_width->add_option("--out", out_path, "CSV path ('-' = stdout)");
  cmd_width->add_option("--manifest", manifest_path, "manifest JSON path");

  // hypotheses
  auto* cmd_hyp = sub(&app, "hypotheses", "uniqueness-theorem hypothesis report");
  double lo = std::nan(""), hi = std::nan("");
  cmd_hyp->add_option("--phi", phi_json, "weight spec JSON");
  cmd_hyp->add_option("--lo", lo, "quotient sampling interval start");
  cmd_hyp->add_option("--hi", hi, "quotient sampling interval end");
  cmd_hyp->add_option("--out", out_path, "JSON path ('-' = stdout)");
  cmd_hyp->add_option("--manifest", manifest_path, "manifest JSON path");

  // solve
  auto* cmd_solve = sub(&app, "solve", "Dirichlet solve of the graph equation");
  std::string domain = "-1.2,1.2,-1,1", grid = "65,65";
  double perturb = 0.0;
  unsigned seed = 0;
  cmd_solve->add_option("--phi", phi_json, "weight spec JSON");
  cmd_solve->add_option("--h", h, "neck height of the boundary profile");
  cmd_solve->add_option("--domain", domain, "x0,x1,y0,y1");
  cmd_solve->add_option("--grid", grid, "nx,ny");
  cmd_solve->add_option("--perturb", perturb, "boundary perturbation amplitude");
  cmd_solve->add_option("--seed", seed, "phase seed for the perturbation (0 = fixed phases)");
  cmd_solve->add_option("--out", out_path, "patch JSON path");
  cmd_solve->add_option("--report", report_path, "solve report JSON path");
  cmd_solve->add_option("--manifest", manifest_path, "manifest JSON path");

  // verify
  auto* cmd_verify = sub(&app, "verify", "run one verification suite");
  std::string suite = "quotient", ubar_name = "sine_sq";
  double t_plane = 0.3, eps = 0.01, omega = 1.0, threshold = std::nan("");
  int n = 65;
  cmd_verify->add_option("--suite", suite, "quotient|moving-plane|decay|extremum|identities")
      ->required();
  cmd_verify->add_option("--phi", phi_json, "weight spec JSON");
  cmd_verify->add_option("--h", h, "neck height");
  cmd_verify->add_option("--t", t_plane, "moving-plane offset");
  cmd_verify->add_option("--ubar", ubar_name, "constant|sine_plain|sine_sq|sine_cube");
  cmd_verify->add_option("--eps", eps, "perturbation amplitude");
  cmd_verify->add_option("--omega", omega, "perturbation frequency in x2");
  cmd_verify->add_option("--grid", n, "grid nodes per side");
  cmd_verify->add_option("--threshold", threshold, "pass/fail threshold override");
  cmd_verify->add_option("--out", out_path, "report JSON path ('-' = stdout)");
  cmd_verify->add_option("--plot", plot_path, "SVG heatmap path");
  cmd_verify->add_option("--manifest", manifest_path, "manifest JSON path");

  // experiment
  auto* cmd_exp = sub(&app, "experiment", "batch experiments");
  auto* cmd_uni = sub(cmd_exp, "uniqueness", "multi-start y-invariance experiment");
  std::string amps = "0,0.05,0.2";
  cmd_uni->add_option("--phi", phi_json, "weight spec JSON");
  cmd_uni->add_option("--h", h, "neck height");
  cmd_uni->add_option("--grid", n, "grid nodes per side");
  cmd_uni->add_option("--amps", amps, "comma-separated perturbation amplitudes");
  cmd_uni->add_option("--out", out_path, "report JSON path ('-' = stdout)");
  cmd_uni->add_option("--manifest", manifest_path, "manifest JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    const WeightSpec spec = weight_from_json(phi_json);

    if (*cmd_profile) {
      IntegrationOptions opts;
      opts.width_tol = tol;
      if (xmax > 0.0) opts.x_cap = xmax;
      const ProfileSolution sol = integrate_profile(spec, h, opts);
      std::string csv = "x,u,uprime\n";
      std::vector<double> xs, ys;
      for (const auto& s : sol.samples) {
        if (xmax > 0.0 && s.x > xmax) break;
        csv += fmt::format("{},{},{}\n", g17(s.x), g17(s.u), g17(s.uprime));
        xs.push_back(s.x);
        ys.push_back(s.u);
      }
      write_text(out_path, csv);
      if (!plot_path.empty())
        write_text(plot_path, svg_line_plot(xs, ys, fmt::format("profile {} h={}",
                                                                spec.describe(), h)));
      write_manifest(manifest_path, "profile",
                     {{"phi", json::parse(phi_json)}, {"h", h}, {"xmax", xmax}},
                     {{"width_tol", tol}, {"rel_tol", opts.rel_tol}, {"abs_tol", opts.abs_tol}});
      return 0;
    }

    if (*cmd_width) {
      const WidthTable table = width_table(spec, parse_list(h_list), tol);
      std::string csv = "h,lambda,direction\n";
      for (const auto& row : table.rows)
        csv += fmt::format("{},{},{}\n", g17(row.h), g17(row.lambda),
                           to_string(table.direction));
      write_text(out_path, csv);
      write_manifest(manifest_path, "width",
                     {{"phi", json::parse(phi_json)}, {"h_list", h_list}}, {{"tol", tol}});
      return 0;
    }

    if (*cmd_hyp) {
      const HypothesisReport rep = check_hypotheses(spec, lo, hi);
      const char* integ = rep.integrable_exp_neg_phi == Integrability::finite ? "finite"
                          : rep.integrable_exp_neg_phi == Integrability::infinite
                              ? "infinite"
                              : "inconclusive";
      json out{{"weight", spec.describe()},
               {"increasing", rep.increasing},
               {"convex", rep.convex},
               {"quotient_bound", rep.quotient_bound},
               {"integrable_exp_neg_phi", integ},
               {"range_finite_top", rep.range_finite_top},
               {"sample_lo", rep.sample_lo},
               {"sample_hi", rep.sample_hi}};
      write_text(out_path, out.dump(2) + "\n");
      write_manifest(manifest_path, "hypotheses", {{"phi", json::parse(phi_json)}}, json::object());
      return 0;
    }

    if (*cmd_solve) {
      const std::vector<double> d = parse_list(domain);
      const std::vector<double> g = parse_list(grid);
      if (d.size() != 4 || g.size() != 2) throw ConfigError("--domain needs 4 and --grid 2 values");
      auto [patch, rep] = solve_on_domain(spec, h, d[0], d[1], d[2], d[3],
                                          static_cast<int>(g[0]), static_cast<int>(g[1]),
                                          perturb, seed);
      if (!out_path.empty()) write_text(out_path, patch.to_json() + "\n");
      if (!report_path.empty()) write_text(report_path, solve_report_json(rep).dump(2) + "\n");
      write_manifest(manifest_path, "solve",
                     {{"phi", json::parse(phi_json)},
                      {"h", h},
                      {"domain", domain},
                      {"grid", grid},
                      {"perturb", perturb},
                      {"seed", seed}},
                     {{"tol", SolveOptions{}.tol}});
      if (!rep.converged) {
        std::fprintf(stderr, "solve did not converge (residual %.3e)\n",
                     rep.final_residual_norm);
        return 1;
      }
      return 0;
    }

    if (*cmd_verify) {
      json out{{"suite", suite}, {"weight", spec.describe()}, {"h", h}};
      bool pass = false;

      if (suite == "quotient" || suite == "decay") {
        IntegrationOptions iopts;
        const ProfileSolution prof = integrate_profile(spec, h, iopts);
        if (!std::isfinite(prof.lambda_estimate))
          throw ConfigError("suite needs a finite half-width");
        UbarSpec ub;
        ub.eps = eps;
        ub.omega = omega;
        if (ubar_name == "constant") ub.family = UbarFamily::constant;
        else if (ubar_name == "sine_plain") ub.family = UbarFamily::sine_plain;
        else if (ubar_name == "sine_sq") ub.family = UbarFamily::sine_sq;
        else if (ubar_name == "sine_cube") ub.family = UbarFamily::sine_cube;
        else throw ConfigError(fmt::format("unknown ubar family '{}'", ubar_name));
        const double L = prof.lambda_estimate;
        const PerturbedCylinder pc =
            perturbed_cylinder_build(prof, spec, ub, 0.5 * L, 0.95 * L, -1.0, 1.0, n, n);
        if (suite == "quotient") {
          const QuotientCheck qc = quotient_formula_check(pc);
          const double thr = std::isnan(threshold) ? 1e-10 : threshold;
          pass = qc.max_discrepancy <= thr && qc.min_denominator >= 0.5;
          out["max_discrepancy"] = qc.max_discrepancy;
          out["min_denominator"] = qc.min_denominator;
          out["max_abs_quotient"] = qc.max_abs_quotient;
          out["threshold"] = thr;
        } else {
          const DecayReport dr = decay_bound_check(pc);
          pass = dr.bound_holds && dr.limits_finite;
          out["bound_holds"] = dr.bound_holds;
          out["worst_slack"] = dr.worst_slack;
          out["limit_dphi_over_w"] = dr.limit_dphi_over_w;
          out["limit_gap_times_w"] = dr.limit_gap_times_w;
          out["limits_finite"] = dr.limits_finite;
        }
      } else if (suite == "moving-plane" || suite == "extremum" || suite == "identities") {
        IntegrationOptions iopts;
        const ProfileSolution prof = integrate_profile(spec, h, iopts);
        const double L = std::isfinite(prof.lambda_estimate)
                             ? 0.75 * prof.lambda_estimate
                             : std::min(prof.max_x() / 2.0, 2.0);
        auto [patch, rep] = solve_on_domain(spec, h, -L, L, -1.0, 1.0, n, n,
                                            suite == "extremum" ? eps : 0.0, seed);
        out["solve"] = solve_report_json(rep);
        if (!rep.converged) throw NotMinimal("underlying solve did not converge");
        if (suite == "moving-plane") {
          const MovingPlaneReport mp = moving_plane_check(patch, t_plane);
          const double thr = std::isnan(threshold) ? 1e-8 : threshold;
          pass = t_plane == 0.0 ? mp.max_abs_gap <= thr : mp.min_gap >= -thr;
          out["t"] = mp.t;
          out["min_gap"] = mp.min_gap;
          out["max_gap"] = mp.max_gap;
          out["max_abs_gap"] = mp.max_abs_gap;
          out["overlap_columns"] = mp.overlap_columns;
          out["threshold"] = thr;
        } else if (suite == "extremum") {
          const ExtremumReport er = eta_quotient_extremum_check(patch, spec, 1e-6);
          pass = er.boundary_attained;
          out["interior_min"] = er.interior_min;
          out["interior_max"] = er.interior_max;
          out["boundary_min"] = er.boundary_min;
          out["boundary_max"] = er.boundary_max;
          out["boundary_attained"] = er.boundary_attained;
          out["hypothesis_violated"] = er.hypothesis_violated;
        } else {
          const IdentityResiduals ir = identity_residuals(patch, spec, 1e-6);
          const double hx = patch.hx();
          const double thr = std::isnan(threshold) ? 50.0 * hx * hx : threshold;
          pass = std::max({ir.x1, ir.x2, ir.height, ir.eta1, ir.eta2, ir.eta3, ir.lap2}) <= thr;
          out["x1"] = ir.x1;
          out["x2"] = ir.x2;
          out["height"] = ir.height;
          out["eta1"] = ir.eta1;
          out["eta2"] = ir.eta2;
          out["eta3"] = ir.eta3;
          out["lap2"] = ir.lap2;
          out["threshold"] = thr;
          if (!plot_path.empty())
            write_text(plot_path, svg_heatmap(patch.nx(), patch.ny(),
                                              phi_minimal_residual(patch, spec),
                                              "graph-equation residual"));
        }
      } else {
        throw ConfigError(fmt::format("unknown suite '{}'", suite));
      }

      out["pass"] = pass;
      write_text(out_path, out.dump(2) + "\n");
      write_manifest(manifest_path, "verify",
                     {{"phi", json::parse(phi_json)},
                      {"suite", suite},
                      {"h", h},
                      {"grid", n},
                      {"eps", eps},
                      {"omega", omega},
                      {"t", t_plane},
                      {"ubar", ubar_name}},
                     {{"threshold", threshold}});
      return pass ? 0 : 1;
    }

    if (*cmd_uni) {
      UniquenessOptions opts;
      opts.grid_n = n;
      const UniquenessReport rep = uniqueness_experiment(spec, h, parse_list(amps), opts);
      json solves = json::array();
      for (const auto& s : rep.solves) solves.push_back(solve_report_json(s));
      json out{{"weight", spec.describe()},
               {"h", h},
               {"hypotheses_ok", rep.hypotheses_ok},
               {"max_y_variation", rep.max_y_variation},
               {"max_eta2", rep.max_eta2},
               {"max_pairwise_diff", rep.max_pairwise_diff},
               {"fitted_h", rep.fitted_h},
               {"all_converged", rep.all_converged},
               {"solves", solves}};
      write_text(out_path, out.dump(2) + "\n");
      write_manifest(manifest_path, "experiment uniqueness",
                     {{"phi", json::parse(phi_json)}, {"h", h}, {"grid", n}, {"amps", amps}},
                     {{"solve_tol", opts.solve.tol}});
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
