#pragma once

#include <array>

#include "phimin/grid.hpp"
#include "phimin/weight.hpp"

namespace phimin {

/// Per-node geometric quantities of the height graph, downward-oriented
/// (eta3 < 0 everywhere).
struct SurfaceFields {
  int nx = 0, ny = 0;
  std::vector<std::array<double, 3>> normal;  // unit Gauss map
  NodeField H;                                // mean curvature, H = -dphi*eta3 on solutions
  NodeField S_norm2;                          // |S|^2
  NodeField K;                                // Gauss curvature (diagnostic)
  NodeField eta1, eta2, eta3;                 // angle functions <e_i, N>
  NodeField grad_x3_norm2;                    // |grad x3|^2 = 1 - eta3^2
  NodeField ux, uy;                           // first partials, kept for reuse
};

/// First and second partials of u by second-order differences
/// (central inside, one-sided at the boundary).
struct PatchDerivatives {
  NodeField ux, uy, uxx, uyy, uxy;
};

PatchDerivatives patch_derivatives(const GraphPatch& patch);

SurfaceFields surface_fields(const GraphPatch& patch);

/// Residual of the graph equation
///   (1+ux^2) uyy + (1+uy^2) uxx - 2 ux uy uxy - dphi(u)(1+ux^2+uy^2);
/// identically zero iff the patch is discretely phi-minimal.
NodeField phi_minimal_residual(const GraphPatch& patch, const WeightSpec& spec);

/// Drift Laplacian Delta^phi f = Delta_Sigma f + dphi <grad x3, grad f> in
/// the induced metric, divergence-form flux differencing on interior nodes
/// (boundary entries are left at zero).
NodeField drift_laplacian(const GraphPatch& patch, const WeightSpec& spec,
                          const NodeField& f);

/// Interior max-norms of the fundamental-equation defects on an
/// (approximately) phi-minimal patch. Throws NotMinimal when the graph
/// equation residual exceeds residual_tol.
struct IdentityResiduals {
  double x1 = 0.0;      // Delta^phi x1
  double x2 = 0.0;      // Delta^phi x2
  double height = 0.0;  // Delta^phi x3 - dphi
  double eta1 = 0.0;    // Delta^phi eta1 + |S|^2 eta1 - ddphi eta1 eta3^2
  double eta2 = 0.0;    // same with eta2
  double eta3 = 0.0;    // Delta^phi eta3 + |S|^2 eta3 + ddphi eta3 |grad x3|^2
  double lap2 = 0.0;    // Delta^phi(q) + 2<grad q, grad eta3/eta3> - ddphi q, q = eta2/eta3
};

IdentityResiduals identity_residuals(const GraphPatch& patch, const WeightSpec& spec,
                                     double residual_tol);

/// Weighted area  int e^{phi(u)} sqrt(1+|Du|^2) dx dy  by composite Simpson
/// quadrature (grid node counts must be odd) with trapezoid fallback.
double weighted_area(const GraphPatch& patch, const WeightSpec& spec);

/// Derivative of the weighted area under the normal perturbation
/// F + eps*v*N at eps = 0, by Richardson-extrapolated central differences.
/// v must vanish on the boundary ring.
double first_variation(const GraphPatch& patch, const WeightSpec& spec,
                       const NodeField& v);

}  // namespace phimin
