#include "phimin/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace phimin {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double UbarSpec::value(double x1, double x2, double lambda) const {
  const double s = std::sin(omega * x2 + phase);
  switch (family) {
    case UbarFamily::constant: return eps;
    case UbarFamily::sine_plain: return eps * s;
    case UbarFamily::sine_sq: return eps * s * (lambda - x1) * (lambda - x1);
    case UbarFamily::sine_cube: return eps * s * std::pow(lambda - x1, 3);
  }
  return 0.0;
}

double UbarSpec::d_x1(double x1, double x2, double lambda) const {
  const double s = std::sin(omega * x2 + phase);
  switch (family) {
    case UbarFamily::constant:
    case UbarFamily::sine_plain: return 0.0;
    case UbarFamily::sine_sq: return -2.0 * eps * s * (lambda - x1);
    case UbarFamily::sine_cube: return -3.0 * eps * s * (lambda - x1) * (lambda - x1);
  }
  return 0.0;
}

double UbarSpec::d_x2(double x1, double x2, double lambda) const {
  const double c = omega * std::cos(omega * x2 + phase);
  switch (family) {
    case UbarFamily::constant: return 0.0;
    case UbarFamily::sine_plain: return eps * c;
    case UbarFamily::sine_sq: return eps * c * (lambda - x1) * (lambda - x1);
    case UbarFamily::sine_cube: return eps * c * std::pow(lambda - x1, 3);
  }
  return 0.0;
}

double UbarSpec::d_x1x2(double x1, double x2, double lambda) const {
  const double c = omega * std::cos(omega * x2 + phase);
  switch (family) {
    case UbarFamily::constant:
    case UbarFamily::sine_plain: return 0.0;
    case UbarFamily::sine_sq: return -2.0 * eps * c * (lambda - x1);
    case UbarFamily::sine_cube: return -3.0 * eps * c * (lambda - x1) * (lambda - x1);
  }
  return 0.0;
}

bool UbarSpec::decays_at_edge() const {
  return family == UbarFamily::constant || family == UbarFamily::sine_sq ||
         family == UbarFamily::sine_cube;
}

std::string UbarSpec::name() const {
  switch (family) {
    case UbarFamily::constant: return "constant";
    case UbarFamily::sine_plain: return "sine_plain";
    case UbarFamily::sine_sq: return "sine_sq";
    case UbarFamily::sine_cube: return "sine_cube";
  }
  return "?";
}

PerturbedCylinder perturbed_cylinder_build(const ProfileSolution& profile,
                                           const WeightSpec& spec, const UbarSpec& ubar,
                                           double x_lo, double x_hi, double y_lo, double y_hi,
                                           int nx, int ny) {
  if (!(x_hi > x_lo) || !(y_hi > y_lo) || nx < 2 || ny < 2)
    throw ConfigError("perturbed_cylinder_build: bad strip");
  if (std::max(std::abs(x_lo), std::abs(x_hi)) > profile.max_x())
    throw StripViolation("strip exceeds the sampled profile x-domain");
  const double lambda = profile.lambda_estimate;
  const bool needs_lambda = ubar.family == UbarFamily::sine_sq ||
                            ubar.family == UbarFamily::sine_cube;
  if (needs_lambda && !std::isfinite(lambda))
    throw ConfigError("ubar family needs a finite half-width");

  PerturbedCylinder pc;
  pc.h = profile.h;
  pc.lambda = lambda;
  pc.ubar = ubar;
  pc.x_lo = x_lo;
  pc.x_hi = x_hi;
  pc.y_lo = y_lo;
  pc.y_hi = y_hi;
  pc.nx = nx;
  pc.ny = ny;
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  pc.u.resize(n);
  pc.uprime.resize(n);
  pc.dphi.resize(n);
  pc.ub.resize(n);
  pc.ub_x1.resize(n);
  pc.ub_x2.resize(n);
  pc.ub_x1x2.resize(n);
  pc.F_tilde.resize(n);

  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * ny + j;
      const double x1 = pc.x1_at(i);
      const double x2 = pc.x2_at(j);
      const ProfileSample s = profile.at(x1);
      pc.u[k] = s.u;
      pc.uprime[k] = s.uprime;
      pc.dphi[k] = spec.eval(s.u).dphi;
      pc.ub[k] = ubar.value(x1, x2, lambda);
      pc.ub_x1[k] = ubar.d_x1(x1, x2, lambda);
      pc.ub_x2[k] = ubar.d_x2(x1, x2, lambda);
      pc.ub_x1x2[k] = ubar.d_x1x2(x1, x2, lambda);
      const double w = std::sqrt(1.0 + s.uprime * s.uprime);
      pc.F_tilde[k] = {x1 + pc.ub[k] * s.uprime / w, x2, s.u - pc.ub[k] / w};

      // Graph condition: the e3 component of dF/dx1 x dF/dx2 must not vanish.
      const double third = -pc.ub_x1[k] * s.uprime / w - (w + pc.ub[k] * pc.dphi[k]) / w;
      if (!(std::abs(third) > 1e-10))
        throw StripViolation(
            fmt::format("perturbation destroys the graph property at x1 = {}", x1));
    }
  return pc;
}

QuotientCheck quotient_formula_check(const PerturbedCylinder& pc) {
  QuotientCheck out;
  out.min_denominator = kInf;
  for (std::size_t k = 0; k < pc.u.size(); ++k) {
    const double up = pc.uprime[k];
    const double w = std::sqrt(1.0 + up * up);
    const double dphi = pc.dphi[k];
    const double ub = pc.ub[k], ub1 = pc.ub_x1[k], ub2 = pc.ub_x2[k];

    // Route (i): unit normal from the analytic tangent vectors of Ftilde.
    const double nf[3] = {up / w, 0.0, -1.0 / w};
    const double e1[3] = {1.0 / w, 0.0, up / w};
    double t1[3], t2[3];
    for (int c = 0; c < 3; ++c) {
      t1[c] = ub1 * nf[c] + ub * dphi * e1[c];
      t2[c] = ub2 * nf[c];
    }
    t1[0] += 1.0;
    t1[2] += up;
    t2[1] += 1.0;
    double cr[3] = {t1[1] * t2[2] - t1[2] * t2[1], t1[2] * t2[0] - t1[0] * t2[2],
                    t1[0] * t2[1] - t1[1] * t2[0]};
    const double norm = std::sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]);
    double n2 = cr[1] / norm, n3 = cr[2] / norm;
    if (n3 > 0.0) {
      n2 = -n2;
      n3 = -n3;
    }
    const double direct = n2 / n3;

    // Route (ii): the closed quotient formula.
    const double q = dphi / w;
    const double denom = 1.0 + ub1 * up / w + ub * q;
    const double formula = ub2 * w * (1.0 + ub * q) / denom;

    out.min_denominator = std::min(out.min_denominator, denom);
    out.max_discrepancy = std::max(out.max_discrepancy, std::abs(direct - formula));
    out.max_abs_quotient = std::max(out.max_abs_quotient, std::abs(formula));
  }
  return out;
}

DecayReport decay_bound_check(const PerturbedCylinder& pc, double tol) {
  DecayReport rep;
  if (!std::isfinite(pc.lambda)) return rep;

  rep.worst_slack = kInf;
  bool holds = true;
  for (int i = 0; i < pc.nx; ++i) {
    const double x1 = pc.x1_at(i);
    for (int j = 0; j < pc.ny; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * pc.ny + j;
      const double x2 = pc.x2_at(j);
      // sup over s in [x1, lambda) of |ubar_{x1x2}|, by dense analytic sampling.
      double sup = 0.0;
      for (int m = 0; m <= 256; ++m) {
        const double s = x1 + (pc.lambda - x1) * m / 256.0;
        sup = std::max(sup, std::abs(pc.ubar.d_x1x2(s, x2, pc.lambda)));
      }
      const double rhs = (pc.lambda - x1) * sup;
      const double lhs = std::abs(pc.ub_x2[k]);
      rep.worst_slack = std::min(rep.worst_slack, rhs - lhs);
      holds = holds && lhs <= rhs + tol;
    }
  }
  rep.bound_holds = holds;

  // Limit estimates at the outermost sampled column.
  const std::size_t k_last = static_cast<std::size_t>(pc.nx - 1) * pc.ny;
  const double up = pc.uprime[k_last];
  const double w = std::sqrt(1.0 + up * up);
  rep.limit_dphi_over_w = pc.dphi[k_last] / w;
  rep.limit_gap_times_w = (pc.lambda - pc.x1_at(pc.nx - 1)) * w;
  rep.limits_finite = std::isfinite(rep.limit_dphi_over_w) &&
                      std::isfinite(rep.limit_gap_times_w);
  return rep;
}

MovingPlaneReport moving_plane_check(const GraphPatch& patch, double t) {
  MovingPlaneReport rep;
  rep.t = t;
  rep.min_gap = kInf;
  rep.max_gap = -kInf;
  const int nx = patch.nx(), ny = patch.ny();

  // Cubic Lagrange interpolation of u(., y_j) at an off-grid abscissa.
  auto interp = [&](double x, int j) {
    const double s = (x - patch.x0()) / patch.hx();
    int i1 = static_cast<int>(std::floor(s));
    i1 = std::clamp(i1, 1, nx - 3);
    const double xi[4] = {patch.x(i1 - 1), patch.x(i1), patch.x(i1 + 1), patch.x(i1 + 2)};
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
      double l = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) l *= (x - xi[b]) / (xi[a] - xi[b]);
      acc += l * patch.at(i1 - 1 + a, j);
    }
    return acc;
  };

  for (int i = 0; i < nx; ++i) {
    const double xi = patch.x(i);
    if (xi > t) continue;  // compare on the left part
    const double xr = 2.0 * t - xi;
    if (xr < patch.x0() - 1e-14 || xr > patch.x1() + 1e-14) continue;
    ++rep.overlap_columns;
    for (int j = 0; j < ny; ++j) {
      const double gap = interp(std::clamp(xr, patch.x0(), patch.x1()), j) - patch.at(i, j);
      rep.min_gap = std::min(rep.min_gap, gap);
      rep.max_gap = std::max(rep.max_gap, gap);
      rep.max_abs_gap = std::max(rep.max_abs_gap, std::abs(gap));
    }
  }
  if (rep.overlap_columns == 0)
    throw EmptyOverlap(fmt::format("no reflected overlap for t = {}", t));
  return rep;
}

ExtremumReport eta_quotient_extremum_check(const GraphPatch& patch, const WeightSpec& spec,
                                           double residual_tol, double tol) {
  const int nx = patch.nx(), ny = patch.ny();
  {
    const NodeField r = phi_minimal_residual(patch, spec);
    double rmax = 0.0;
    for (int i = 2; i < nx - 2; ++i)
      for (int j = 2; j < ny - 2; ++j)
        rmax = std::max(rmax, std::abs(r[static_cast<std::size_t>(i) * ny + j]));
    if (rmax > residual_tol)
      throw NotMinimal(fmt::format("graph-equation residual {} exceeds tolerance {}", rmax,
                                   residual_tol));
  }
  const SurfaceFields sf = surface_fields(patch);
  ExtremumReport rep;
  rep.interior_min = rep.boundary_min = kInf;
  rep.interior_max = rep.boundary_max = -kInf;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * ny + j;
      const double q = sf.eta2[k] / sf.eta3[k];
      if (patch.is_boundary(i, j)) {
        rep.boundary_min = std::min(rep.boundary_min, q);
        rep.boundary_max = std::max(rep.boundary_max, q);
      } else {
        rep.interior_min = std::min(rep.interior_min, q);
        rep.interior_max = std::max(rep.interior_max, q);
      }
      if (spec.eval(patch.values()[k]).ddphi < 0.0) rep.hypothesis_violated = true;
    }
  rep.boundary_attained = rep.interior_max <= rep.boundary_max + tol &&
                          rep.interior_min >= rep.boundary_min - tol;
  return rep;
}

}  // namespace phimin
