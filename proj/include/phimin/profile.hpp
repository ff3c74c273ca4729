#pragma once

#include <vector>

#include "phimin/weight.hpp"

namespace phimin {

enum class ProfileTermination { reached_x_cap, reached_height_cap, width_converged };

struct ProfileSample {
  double x;
  double u;
  double uprime;
};

/// Catenary profile u solving u'' = dphi(u)(1 + u'^2), u(0) = h, u'(0) = 0,
/// sampled on x >= 0 (u is even; negative abscissae are mirrored on demand).
struct ProfileSolution {
  double h = 0.0;
  std::vector<ProfileSample> samples;  // strictly increasing in x, starts at x = 0
  double lambda_estimate = 0.0;        // half-width, +inf when the slab is all of R^3
  double slope_limit = 0.0;            // lim |u'|, +inf in the blow-up case
  ProfileTermination termination = ProfileTermination::reached_x_cap;

  /// (u, u') at any |x| < max sampled x, by cubic Hermite interpolation.
  /// Mirrors evenly: u(-x) = u(x), u'(-x) = -u'(x).
  ProfileSample at(double x) const;
  double max_x() const { return samples.back().x; }
};

struct IntegrationOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double width_tol = 1e-9;    // certified remainder bound for width_converged
  double x_cap = 1e3;
  double height_cap_base = 1e6;  // scaled by |h| + 1
};

/// Integrates the arc-length system x' = cos t, u' = sin t, t' = dphi(u) cos t
/// with an embedded Runge-Kutta 5(4) pair. Regular through the slope blow-up.
ProfileSolution integrate_profile(const WeightSpec& spec, double h,
                                  const IntegrationOptions& opts = {});

/// First integral of the profile ODE: the slope u' at height u = lambda is
/// sqrt(e^{2(phi(lambda) - phi(h))} - 1). Returns +inf on overflow.
double first_integral_slope(const WeightSpec& spec, double h, double lambda);

/// Half-width Lambda_h = int_h^inf dlambda / sqrt(e^{2(phi-phi(h))} - 1),
/// by adaptive quadrature with the endpoint substitution lambda = h + t^2.
/// Returns +inf when the range is bounded above or e^{-phi} is not
/// integrable; throws Inconclusive when neither can be certified.
double half_width(const WeightSpec& spec, double h, double tol = 1e-10);

/// sqrt(e^{2(c - phi(h))} - 1) when c < inf; +inf otherwise.
double asymptotic_slope(const WeightSpec& spec, double h);

enum class WidthDirection { decreasing, increasing, constant, mixed };

struct WidthRow {
  double h;
  double lambda;
};

struct WidthTable {
  std::vector<WidthRow> rows;  // sorted by h
  WidthDirection direction = WidthDirection::mixed;
};

/// Lambda_h over a list of heights, annotated with the monotonicity
/// direction predicted by the sign of ddphi (dphi increasing => widths
/// decreasing, and vice versa).
WidthTable width_table(const WeightSpec& spec, std::vector<double> h_list,
                       double tol = 1e-10);

const char* to_string(WidthDirection d);
const char* to_string(ProfileTermination t);

}  // namespace phimin
