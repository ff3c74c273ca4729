#include "phimin/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "phimin/geometry.hpp"

namespace phimin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Residual of the interior stencil; heights come from the full patch.
struct Discretization {
  const GraphPatch& p;
  const WeightSpec& spec;
  int nx, ny;
  double hx, hy;

  explicit Discretization(const GraphPatch& patch, const WeightSpec& s)
      : p(patch), spec(s), nx(patch.nx()), ny(patch.ny()), hx(patch.hx()), hy(patch.hy()) {}

  int rows() const { return (nx - 2) * (ny - 2); }
  int row(int i, int j) const { return (i - 1) * (ny - 2) + (j - 1); }

  double residual_at(const std::vector<double>& u, int i, int j) const {
    auto v = [&](int a, int b) { return u[static_cast<std::size_t>(a) * ny + b]; };
    const double ux = (v(i + 1, j) - v(i - 1, j)) / (2 * hx);
    const double uy = (v(i, j + 1) - v(i, j - 1)) / (2 * hy);
    const double uxx = (v(i + 1, j) - 2 * v(i, j) + v(i - 1, j)) / (hx * hx);
    const double uyy = (v(i, j + 1) - 2 * v(i, j) + v(i, j - 1)) / (hy * hy);
    const double uxy = (v(i + 1, j + 1) - v(i + 1, j - 1) - v(i - 1, j + 1) +
                        v(i - 1, j - 1)) / (4 * hx * hy);
    const double dphi = spec.eval(v(i, j)).dphi;
    return (1 + ux * ux) * uyy + (1 + uy * uy) * uxx - 2 * ux * uy * uxy -
           dphi * (1 + ux * ux + uy * uy);
  }

  Eigen::VectorXd residual(const std::vector<double>& u) const {
    Eigen::VectorXd r(rows());
    for (int i = 1; i < nx - 1; ++i)
      for (int j = 1; j < ny - 1; ++j) r[row(i, j)] = residual_at(u, i, j);
    return r;
  }

  // Analytic Jacobian: nine entries per interior row, boundary columns dropped.
  Eigen::SparseMatrix<double> jacobian(const std::vector<double>& u) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(rows()) * 9);
    auto v = [&](int a, int b) { return u[static_cast<std::size_t>(a) * ny + b]; };
    for (int i = 1; i < nx - 1; ++i)
      for (int j = 1; j < ny - 1; ++j) {
        const double ux = (v(i + 1, j) - v(i - 1, j)) / (2 * hx);
        const double uy = (v(i, j + 1) - v(i, j - 1)) / (2 * hy);
        const double uxx = (v(i + 1, j) - 2 * v(i, j) + v(i - 1, j)) / (hx * hx);
        const double uyy = (v(i, j + 1) - 2 * v(i, j) + v(i, j - 1)) / (hy * hy);
        const double uxy = (v(i + 1, j + 1) - v(i + 1, j - 1) - v(i - 1, j + 1) +
                            v(i - 1, j - 1)) / (4 * hx * hy);
        const WeightEval w = spec.eval(v(i, j));
        const double dR_duxx = 1 + uy * uy;
        const double dR_duyy = 1 + ux * ux;
        const double dR_duxy = -2 * ux * uy;
        const double dR_dux = 2 * ux * uyy - 2 * uy * uxy - 2 * w.dphi * ux;
        const double dR_duy = 2 * uy * uxx - 2 * ux * uxy - 2 * w.dphi * uy;
        const double dR_du = -w.ddphi * (1 + ux * ux + uy * uy);

        const int r0 = row(i, j);
        auto add = [&](int a, int b, double val) {
          if (a <= 0 || a >= nx - 1 || b <= 0 || b >= ny - 1) return;  // Dirichlet
          trip.emplace_back(r0, row(a, b), val);
        };
        add(i, j, dR_du - 2 * dR_duxx / (hx * hx) - 2 * dR_duyy / (hy * hy));
        add(i + 1, j, dR_duxx / (hx * hx) + dR_dux / (2 * hx));
        add(i - 1, j, dR_duxx / (hx * hx) - dR_dux / (2 * hx));
        add(i, j + 1, dR_duyy / (hy * hy) + dR_duy / (2 * hy));
        add(i, j - 1, dR_duyy / (hy * hy) - dR_duy / (2 * hy));
        add(i + 1, j + 1, dR_duxy / (4 * hx * hy));
        add(i - 1, j - 1, dR_duxy / (4 * hx * hy));
        add(i + 1, j - 1, -dR_duxy / (4 * hx * hy));
        add(i - 1, j + 1, -dR_duxy / (4 * hx * hy));
      }
    Eigen::SparseMatrix<double> J(rows(), rows());
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }
};

}  // namespace

void BoundaryData::validate(int nx, int ny, double a) const {
  if (static_cast<int>(bottom.size()) != nx || static_cast<int>(top.size()) != nx ||
      static_cast<int>(left.size()) != ny || static_cast<int>(right.size()) != ny)
    throw ConfigError("BoundaryData: edge lengths do not match the grid");
  for (const auto* e : {&bottom, &top, &left, &right})
    for (double v : *e)
      if (!(v > a)) throw DomainError("BoundaryData: trace value <= domain endpoint a");
  const double tol = 1e-12;
  if (std::abs(bottom.front() - left.front()) > tol ||
      std::abs(bottom.back() - right.front()) > tol ||
      std::abs(top.front() - left.back()) > tol ||
      std::abs(top.back() - right.back()) > tol)
    throw ConfigError("BoundaryData: corner values disagree");
}

void BoundaryData::apply(GraphPatch& patch) const {
  const int nx = patch.nx(), ny = patch.ny();
  for (int i = 0; i < nx; ++i) {
    patch.at(i, 0) = bottom[i];
    patch.at(i, ny - 1) = top[i];
  }
  for (int j = 0; j < ny; ++j) {
    patch.at(0, j) = left[j];
    patch.at(nx - 1, j) = right[j];
  }
}

std::pair<GraphPatch, SolveReport> solve_graph_equation(const WeightSpec& spec,
                                                        const GraphPatch& grid_template,
                                                        const BoundaryData& boundary,
                                                        const std::optional<NodeField>& init,
                                                        const SolveOptions& opts) {
  const int nx = grid_template.nx(), ny = grid_template.ny();
  boundary.validate(nx, ny, spec.a());

  GraphPatch patch = grid_template;
  boundary.apply(patch);
  if (init) {
    if (init->size() != patch.values().size())
      throw ConfigError("solve_graph_equation: init size mismatch");
    for (int i = 1; i < nx - 1; ++i)
      for (int j = 1; j < ny - 1; ++j)
        patch.at(i, j) = (*init)[static_cast<std::size_t>(i) * ny + j];
  } else {
    // Bilinear blend of the boundary traces.
    for (int i = 1; i < nx - 1; ++i)
      for (int j = 1; j < ny - 1; ++j) {
        const double s = static_cast<double>(i) / (nx - 1);
        const double t = static_cast<double>(j) / (ny - 1);
        const double horiz = (1 - t) * boundary.bottom[i] + t * boundary.top[i];
        const double vert = (1 - s) * boundary.left[j] + s * boundary.right[j];
        const double corners = (1 - s) * (1 - t) * boundary.bottom.front() +
                               s * (1 - t) * boundary.bottom.back() +
                               (1 - s) * t * boundary.top.front() + s * t * boundary.top.back();
        patch.at(i, j) = horiz + vert - corners;
      }
  }
  for (double v : patch.values())
    if (!(v > spec.a()))
      throw DomainViolation("solve_graph_equation: initial heights reach the domain endpoint");

  Discretization disc(patch, spec);
  SolveReport report;

  Eigen::VectorXd r = disc.residual(patch.values());
  double rnorm2 = r.norm();
  report.final_residual_norm = r.lpNorm<Eigen::Infinity>();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  const double domain_floor = std::isfinite(spec.a()) ? spec.a() : -kInf;

  for (int it = 0; it < opts.max_iterations; ++it) {
    if (report.final_residual_norm <= opts.tol) {
      report.converged = true;
      break;
    }
    lu.compute(disc.jacobian(patch.values()));
    if (lu.info() != Eigen::Success)
      throw StepFailure("solve_graph_equation: singular Jacobian");
    Eigen::VectorXd step = lu.solve(-r);

    double t = 1.0;
    std::vector<double> trial = patch.values();
    bool accepted = false;
    double trial_norm2 = rnorm2;
    Eigen::VectorXd r_trial;
    while (true) {
      bool in_domain = true;
      for (int i = 1; i < nx - 1 && in_domain; ++i)
        for (int j = 1; j < ny - 1; ++j) {
          const double v = patch.at(i, j) + t * step[disc.row(i, j)];
          trial[static_cast<std::size_t>(i) * ny + j] = v;
          if (!(v > domain_floor)) {
            in_domain = false;
            break;
          }
        }
      if (in_domain) {
        r_trial = disc.residual(trial);
        trial_norm2 = r_trial.norm();
        if (trial_norm2 <= (1.0 - 1e-4 * t) * rnorm2) {
          accepted = true;
          break;
        }
      }
      if (t <= opts.damping_floor) {
        // Floor hit: keep the floor step only if it still makes progress.
        if (in_domain && trial_norm2 < rnorm2) accepted = true;
        else if (!in_domain)
          throw DomainViolation(
              "solve_graph_equation: damping floor hit against the domain endpoint");
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // stagnation; return best iterate, converged = false

    patch.values() = trial;
    r = r_trial;
    rnorm2 = trial_norm2;
    report.final_residual_norm = r.lpNorm<Eigen::Infinity>();
    report.damping_history.push_back(t);
    ++report.iterations;
  }
  if (report.final_residual_norm <= opts.tol) report.converged = true;
  return {std::move(patch), std::move(report)};
}

BoundaryData make_boundary_from_profile(const ProfileSolution& profile,
                                        const GraphPatch& grid_template,
                                        const std::function<double(double, double)>& perturbation,
                                        double slab_margin_fraction) {
  const double lam = profile.lambda_estimate;
  const double xmax = std::max(std::abs(grid_template.x0()), std::abs(grid_template.x1()));
  if (std::isfinite(lam) && xmax > lam * (1.0 - slab_margin_fraction))
    throw SlabViolation(fmt::format(
        "grid |x| extent {} violates the slab margin {} (Lambda_h = {})", xmax,
        lam * (1.0 - slab_margin_fraction), lam));
  if (xmax > profile.max_x())
    throw SlabViolation("grid x-range exceeds the sampled profile extent");

  const int nx = grid_template.nx(), ny = grid_template.ny();
  BoundaryData bc;
  bc.bottom.resize(nx);
  bc.top.resize(nx);
  bc.left.resize(ny);
  bc.right.resize(ny);
  auto val = [&](double x, double y) {
    double v = profile.at(x).u;
    if (perturbation) v += perturbation(x, y);
    return v;
  };
  for (int i = 0; i < nx; ++i) {
    bc.bottom[i] = val(grid_template.x(i), grid_template.y0());
    bc.top[i] = val(grid_template.x(i), grid_template.y1());
  }
  for (int j = 0; j < ny; ++j) {
    bc.left[j] = val(grid_template.x0(), grid_template.y(j));
    bc.right[j] = val(grid_template.x1(), grid_template.y(j));
  }
  return bc;
}

namespace {

double column_fit_h(const WeightSpec& spec, const GraphPatch& patch, double h_guess) {
  // y-average each column, then least-squares over the profile height.
  const int nx = patch.nx(), ny = patch.ny();
  std::vector<double> col(nx, 0.0);
  for (int i = 0; i < nx; ++i) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j) s += patch.at(i, j);
    col[i] = s / ny;
  }
  auto misfit = [&](double hh) {
    IntegrationOptions iopts;
    iopts.x_cap = std::max(std::abs(patch.x0()), std::abs(patch.x1())) + 1.0;
    const ProfileSolution prof = integrate_profile(spec, hh, iopts);
    double m = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double d = col[i] - prof.at(patch.x(i)).u;
      m += d * d;
    }
    return m;
  };
  // Golden-section around the guess.
  double lo = h_guess - 0.5, hi = h_guess + 0.5;
  if (std::isfinite(spec.a())) lo = std::max(lo, spec.a() + 1e-6);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = misfit(x1), f2 = misfit(x2);
  for (int k = 0; k < 60 && hi - lo > 1e-9; ++k) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = misfit(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = misfit(x2);
    }
  }
  return 0.5 * (lo + hi);
}

// Discrete 1d profile on the template's x-grid: solves the reduced
// (y-invariant) stencil equation exactly, so its y-invariant extension is an
// exact discrete solution of the 2d problem. Endpoint values come from the
// continuous profile.
std::vector<double> discrete_profile_trace(const WeightSpec& spec,
                                           const ProfileSolution& profile,
                                           const GraphPatch& tmpl) {
  const int nx = tmpl.nx();
  const double hx = tmpl.hx();
  std::vector<double> w(nx);
  for (int i = 0; i < nx; ++i) w[i] = profile.at(tmpl.x(i)).u;

  const int m = nx - 2;
  Eigen::SparseMatrix<double> J(m, m);
  Eigen::VectorXd F(m), d;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int it = 0; it < 60; ++it) {
    std::vector<Eigen::Triplet<double>> trip;
    double fnorm = 0.0;
    for (int i = 1; i <= m; ++i) {
      const double ux = (w[i + 1] - w[i - 1]) / (2 * hx);
      const double uxx = (w[i + 1] - 2 * w[i] + w[i - 1]) / (hx * hx);
      const WeightEval e = spec.eval(w[i]);
      F(i - 1) = uxx - e.dphi * (1.0 + ux * ux);
      fnorm = std::max(fnorm, std::abs(F(i - 1)));
      const double d_uxx = 1.0 / (hx * hx);
      const double d_ux = -2.0 * e.dphi * ux;
      trip.emplace_back(i - 1, i - 1, -2.0 * d_uxx - e.ddphi * (1.0 + ux * ux));
      if (i > 1) trip.emplace_back(i - 1, i - 2, d_uxx - d_ux / (2 * hx));
      if (i < m) trip.emplace_back(i - 1, i, d_uxx + d_ux / (2 * hx));
    }
    if (fnorm <= 1e-12) break;
    J.setFromTriplets(trip.begin(), trip.end());
    lu.compute(J);
    d = lu.solve(F);
    for (int i = 1; i <= m; ++i) w[i] -= d(i - 1);
  }
  return w;
}

}  // namespace

UniquenessReport uniqueness_experiment(const WeightSpec& spec, double h,
                                       const std::vector<double>& perturbation_amplitudes,
                                       const UniquenessOptions& opts) {
  UniquenessReport rep;
  rep.hypotheses = check_hypotheses(spec, std::max(h, std::isfinite(spec.a())
                                                          ? spec.a() + 0.5 * (h - spec.a())
                                                          : h));
  rep.hypotheses_ok = rep.hypotheses.increasing && rep.hypotheses.convex &&
                      rep.hypotheses.integrable_exp_neg_phi == Integrability::finite &&
                      std::isfinite(rep.hypotheses.quotient_bound);

  const ProfileSolution profile = integrate_profile(spec, h);
  const double lam = profile.lambda_estimate;
  const double L = opts.slab_fraction * (std::isfinite(lam) ? lam : 2.0);
  GraphPatch tmpl(-L, L, -opts.y_half_extent, opts.y_half_extent, opts.grid_n, opts.grid_n);
  // y-invariant Dirichlet trace taken from the discrete 1d profile, so the
  // y-invariant candidate solves the 2d stencil exactly and the metrics
  // measure the solver, not the O(hx^2) trace bias.
  const std::vector<double> trace = discrete_profile_trace(spec, profile, tmpl);
  BoundaryData bc;
  bc.bottom = trace;
  bc.top = trace;
  bc.left.assign(tmpl.ny(), trace.front());
  bc.right.assign(tmpl.ny(), trace.back());

  std::vector<GraphPatch> solutions;
  for (double amp : perturbation_amplitudes) {
    NodeField init(tmpl.values().size());
    for (int i = 0; i < tmpl.nx(); ++i)
      for (int j = 0; j < tmpl.ny(); ++j) {
        const double s = static_cast<double>(i) / (tmpl.nx() - 1);
        const double t = static_cast<double>(j) / (tmpl.ny() - 1);
        init[static_cast<std::size_t>(i) * tmpl.ny() + j] =
            trace[i] + amp * std::sin(std::numbers::pi * s) * std::sin(std::numbers::pi * t);
      }
    auto [patch, report] = solve_graph_equation(spec, tmpl, bc, init, opts.solve);
    rep.solves.push_back(report);
    solutions.push_back(std::move(patch));
  }
  rep.all_converged = true;
  for (const auto& s : rep.solves) rep.all_converged = rep.all_converged && s.converged;

  for (const auto& sol : solutions) {
    for (int i = 0; i < sol.nx(); ++i) {
      double lo = kInf, hi = -kInf;
      for (int j = 0; j < sol.ny(); ++j) {
        lo = std::min(lo, sol.at(i, j));
        hi = std::max(hi, sol.at(i, j));
      }
      rep.max_y_variation = std::max(rep.max_y_variation, hi - lo);
    }
    const SurfaceFields sf = surface_fields(sol);
    for (double e2 : sf.eta2) rep.max_eta2 = std::max(rep.max_eta2, std::abs(e2));
  }
  for (std::size_t p = 0; p < solutions.size(); ++p)
    for (std::size_t q = p + 1; q < solutions.size(); ++q)
      for (std::size_t k = 0; k < solutions[p].values().size(); ++k)
        rep.max_pairwise_diff = std::max(
            rep.max_pairwise_diff,
            std::abs(solutions[p].values()[k] - solutions[q].values()[k]));

  rep.fitted_h = solutions.empty() ? h : column_fit_h(spec, solutions.front(), h);
  return rep;
}

}  // namespace phimin
