#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "phimin/grid.hpp"
#include "phimin/profile.hpp"
#include "phimin/weight.hpp"

namespace phimin {

/// Dirichlet heights along the four edges of a GraphPatch grid.
/// bottom/top run over i = 0..nx-1 (at j = 0 and j = ny-1),
/// left/right over j = 0..ny-1 (at i = 0 and i = nx-1).
/// Corners are shared and must agree.
struct BoundaryData {
  std::vector<double> bottom, top, left, right;

  void validate(int nx, int ny, double a) const;
  /// Applies the traces to the ring of a patch.
  void apply(GraphPatch& patch) const;
};

struct SolveOptions {
  double tol = 1e-10;       // max-norm of the discrete residual
  int max_iterations = 60;
  double damping_floor = 9.5367431640625e-07;  // 2^-20
};

struct SolveReport {
  int iterations = 0;
  double final_residual_norm = 0.0;  // max-norm
  std::vector<double> damping_history;
  bool converged = false;
};

/// Damped Newton iteration on the discretized graph equation with an
/// analytic Jacobian and Armijo backtracking. On NoConvergence the best
/// iterate is still returned (report.converged = false). Throws
/// DomainViolation when damping cannot keep the heights above a.
std::pair<GraphPatch, SolveReport> solve_graph_equation(
    const WeightSpec& spec, const GraphPatch& grid_template, const BoundaryData& boundary,
    const std::optional<NodeField>& init = std::nullopt, const SolveOptions& opts = {});

/// Dirichlet traces of (a perturbation of) the mirrored catenary profile.
/// Requires the grid x-range to stay a margin inside the slab when the
/// half-width is finite (default margin 5% of Lambda_h).
BoundaryData make_boundary_from_profile(
    const ProfileSolution& profile, const GraphPatch& grid_template,
    const std::function<double(double, double)>& perturbation = nullptr,
    double slab_margin_fraction = 0.05);

struct UniquenessOptions {
  int grid_n = 65;
  double slab_fraction = 0.75;  // x-range = slab_fraction * min(Lambda_h, 2) slab
  double y_half_extent = 1.0;
  SolveOptions solve;
};

/// Desk-scale surrogate of the uniqueness theorem: several independently
/// initialized solves with y-invariant boundary data, checked for
/// y-invariance, vanishing eta2, and pairwise agreement.
struct UniquenessReport {
  HypothesisReport hypotheses;
  bool hypotheses_ok = false;    // increasing, convex, integrable, bounded quotient
  double max_y_variation = 0.0;  // max over solves and x-columns
  double max_eta2 = 0.0;
  double max_pairwise_diff = 0.0;
  double fitted_h = 0.0;  // least-squares height over y-averaged columns
  std::vector<SolveReport> solves;
  bool all_converged = false;
};

UniquenessReport uniqueness_experiment(const WeightSpec& spec, double h,
                                       const std::vector<double>& perturbation_amplitudes,
                                       const UniquenessOptions& opts = {});

}  // namespace phimin
