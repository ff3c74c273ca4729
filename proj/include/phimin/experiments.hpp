#pragma once

#include <array>
#include <string>
#include <vector>

#include "phimin/geometry.hpp"
#include "phimin/grid.hpp"
#include "phimin/profile.hpp"
#include "phimin/weight.hpp"

namespace phimin {

/// Analytic perturbation fields ubar with hand-coded partials, so the
/// closed-formula cross-checks are free of differencing error.
/// lambda below is the profile half-width (the slab edge).
enum class UbarFamily {
  constant,    // eps
  sine_plain,  // eps * sin(omega x2 + phase)
  sine_sq,     // eps * sin(omega x2 + phase) * (lambda - x1)^2
  sine_cube    // eps * sin(omega x2 + phase) * (lambda - x1)^3
};

struct UbarSpec {
  UbarFamily family = UbarFamily::sine_sq;
  double eps = 0.01;
  double omega = 1.0;
  double phase = 0.0;

  double value(double x1, double x2, double lambda) const;
  double d_x1(double x1, double x2, double lambda) const;
  double d_x2(double x1, double x2, double lambda) const;
  double d_x1x2(double x1, double x2, double lambda) const;
  /// Does ubar_{x2} vanish at the slab edge x1 -> lambda?
  bool decays_at_edge() const;
  std::string name() const;
};

/// Sampled graph-over-catenary embedding Ftilde = F + ubar * N_F on a
/// strip grid inside the profile's x-domain.
struct PerturbedCylinder {
  double h = 0.0;
  double lambda = 0.0;  // half-width of the base profile
  UbarSpec ubar;
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
  int nx = 0, ny = 0;
  // Per-node samples, row-major in the x1 index.
  std::vector<double> u, uprime, dphi;            // base profile data
  std::vector<double> ub, ub_x1, ub_x2, ub_x1x2;  // perturbation data
  std::vector<std::array<double, 3>> F_tilde;

  double x1_at(int i) const { return x_lo + (x_hi - x_lo) * i / (nx - 1); }
  double x2_at(int j) const { return y_lo + (y_hi - y_lo) * j / (ny - 1); }
};

PerturbedCylinder perturbed_cylinder_build(const ProfileSolution& profile,
                                           const WeightSpec& spec, const UbarSpec& ubar,
                                           double x_lo, double x_hi, double y_lo, double y_hi,
                                           int nx = 41, int ny = 41);

/// eta2/eta3 computed two ways: the cross product of the analytic tangent
/// vectors of Ftilde, and the closed quotient formula in (ubar, u', dphi).
struct QuotientCheck {
  double max_discrepancy = 0.0;
  double min_denominator = 0.0;  // the closed formula's denominator over the strip
  double max_abs_quotient = 0.0;
};

QuotientCheck quotient_formula_check(const PerturbedCylinder& pc);

/// Pointwise bound |ubar_{x2}| <= (lambda - x1) sup_{s >= x1} |ubar_{x1x2}|
/// plus the two profile limits entering the decay estimate.
struct DecayReport {
  bool bound_holds = false;
  double worst_slack = 0.0;  // min over nodes of (rhs - lhs)
  double limit_dphi_over_w = 0.0;      // dphi / sqrt(1+u'^2) at the last samples
  double limit_gap_times_w = 0.0;      // (lambda - x1) sqrt(1+u'^2)
  bool limits_finite = false;
};

DecayReport decay_bound_check(const PerturbedCylinder& pc, double tol = 1e-12);

/// Signed gaps u(2t - x1, x2) - u(x1, x2) over the overlap window,
/// cubic interpolation in x1 at fixed x2.
struct MovingPlaneReport {
  double t = 0.0;
  double min_gap = 0.0;
  double max_gap = 0.0;
  double max_abs_gap = 0.0;
  int overlap_columns = 0;
};

MovingPlaneReport moving_plane_check(const GraphPatch& patch, double t);

/// Discrete maximum-principle consequence of the LAP2 equation: extrema of
/// eta2/eta3 sit on the boundary ring (within tol).
struct ExtremumReport {
  double interior_min = 0.0, interior_max = 0.0;
  double boundary_min = 0.0, boundary_max = 0.0;
  bool boundary_attained = false;
  bool hypothesis_violated = false;  // ddphi < 0 somewhere on the patch
};

ExtremumReport eta_quotient_extremum_check(const GraphPatch& patch, const WeightSpec& spec,
                                           double residual_tol, double tol = 1e-8);

}  // namespace phimin
