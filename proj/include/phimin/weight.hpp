#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "phimin/errors.hpp"

namespace phimin {

/// Which analytic family a weight belongs to.
enum class WeightFamily {
  identity,   ///< phi(x) = x on all of R
  linear,     ///< phi(x) = k*x, k != 0
  quadratic,  ///< phi(x) = x^2/2 on ]0, +inf[
  alpha_log,  ///< phi(x) = alpha*log(x) on ]0, +inf[, alpha > 0
  arctan,     ///< phi(x) = atan(x) on all of R
  user_table  ///< monotone cubic interpolant of (x, phi) samples
};

/// Value of phi and its first two derivatives at one height.
struct WeightEval {
  double phi;
  double dphi;
  double ddphi;
};

enum class Integrability { finite, infinite, inconclusive };

/// Flags a weight against the hypotheses of the uniqueness theorem:
/// strictly increasing, convex, bounded ddphi/dphi, integrable exp(-phi).
struct HypothesisReport {
  bool increasing = false;
  bool convex = false;
  /// Sampled sup of |ddphi| / dphi on [sample_lo, sample_hi].
  double quotient_bound = 0.0;
  Integrability integrable_exp_neg_phi = Integrability::inconclusive;
  bool range_finite_top = false;
  /// Interval actually sampled for the quotient bound.
  double sample_lo = 0.0;
  double sample_hi = 0.0;
};

/// A weight function phi : ]a, +inf[ -> ]b, c[ together with its
/// domain/range endpoints. Immutable after construction.
class WeightSpec {
 public:
  static WeightSpec identity();
  static WeightSpec linear(double k);
  static WeightSpec quadratic();
  static WeightSpec alpha_log(double alpha);
  static WeightSpec arctan();
  /// Points must be strictly increasing in both coordinates; the
  /// interpolant is a monotone cubic Hermite spline, extended linearly
  /// past the last knot.
  static WeightSpec user_table(std::vector<std::array<double, 2>> points);

  WeightFamily family() const { return family_; }
  double param() const { return param_; }
  bool reflected() const { return reflected_; }
  const std::vector<std::array<double, 2>>& table_points() const { return points_; }

  /// Lower domain endpoint (heights live in ]a, +inf[). May be -inf.
  double a() const { return a_; }
  /// Range endpoints ]b, c[. b may be -inf, c may be +inf.
  double b() const { return reflected_ ? -c_ : b_; }
  double c() const { return reflected_ ? -b_ : c_; }

  /// (phi, dphi, ddphi) at x3. Throws DomainError if x3 <= a,
  /// NonFinite if the evaluation overflows.
  WeightEval eval(double x3) const;

  /// The weight -phi with range ]-c, -b[. An involution.
  WeightSpec reflect() const;

  std::string describe() const;

 private:
  WeightSpec() = default;

  WeightFamily family_ = WeightFamily::identity;
  double param_ = 0.0;
  bool reflected_ = false;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0;

  // user_table state
  std::vector<std::array<double, 2>> points_;
  std::vector<double> slopes_;  // Fritsch-Carlson tangents at the knots

  WeightEval eval_table(double x3) const;
};

/// Certifies convergence or divergence of \int_h^inf exp(-phi),
/// the criterion deciding whether the half-width is finite.
Integrability classify_integrability(const WeightSpec& spec, double h);

/// Full hypothesis report; quotient bound sampled on [lo, hi]
/// (defaults derived from the domain endpoint when NaN is passed).
HypothesisReport check_hypotheses(const WeightSpec& spec,
                                  double sample_lo = std::nan(""),
                                  double sample_hi = std::nan(""));

}  // namespace phimin
