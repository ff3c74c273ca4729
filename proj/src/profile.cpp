#include "phimin/profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace phimin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using boost::math::quadrature::gauss_kronrod;

template <class F>
double quad(F&& f, double lo, double hi, double tol) {
  if (hi <= lo) return 0.0;
  return gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, tol);
}

double slope_at(const WeightSpec& spec, double phi_h, double lambda) {
  const double twice = 2.0 * (spec.eval(lambda).phi - phi_h);
  if (twice < 0.0)
    throw DomainError("first integral: phi(lambda) < phi(h)");
  if (twice > 1400.0) return kInf;
  return std::sqrt(std::expm1(twice));
}

// Certified bound on int_T^inf e^{-phi}, +inf when no rule applies.
double exp_neg_phi_tail_bound(const WeightSpec& spec, double T) {
  const WeightEval e = spec.eval(T);
  if (e.dphi <= 0.0) return kInf;
  // Convex tail (dphi nondecreasing past T): dominated by an exponential.
  bool convex_tail = false;
  switch (spec.family()) {
    case WeightFamily::identity:
    case WeightFamily::quadratic:
      convex_tail = !spec.reflected();
      break;
    case WeightFamily::linear:
      convex_tail = true;  // dphi constant
      break;
    case WeightFamily::user_table:
      convex_tail = T >= spec.table_points().back()[0];  // linear extension
      break;
    default:
      break;
  }
  if (convex_tail) return std::exp(-e.phi) / e.dphi;
  // Power-law tail: if lambda*dphi >= p > 1 on [T, inf[ (checked by
  // doubling samples), then e^{-phi} <= e^{-phi(T)} (T/lambda)^p.
  if (T > 0.0) {
    double p = kInf;
    double prev = kInf;
    bool nondecreasing = true;
    for (int k = 0; k <= 30; ++k) {
      const double lam = T * std::pow(2.0, k);
      if (!std::isfinite(lam)) break;
      const double s = lam * spec.eval(lam).dphi;
      if (k > 0 && s < prev - 1e-9 * (1.0 + std::abs(prev))) nondecreasing = false;
      p = std::min(p, s);
      prev = s;
    }
    if (nondecreasing && p > 1.0 + 1e-6)
      return std::exp(-e.phi) * T / (p - 1.0);
  }
  return kInf;
}

// int_{u_from}^inf dlambda / slope(lambda): the horizontal distance still
// missing between the height u_from and the slab edge.
double width_remainder(const WeightSpec& spec, double phi_h, double u_from, double tol) {
  double T = u_from;
  double tail = kInf;
  for (int k = 0; k < 200; ++k) {
    const double twice = 2.0 * (spec.eval(T).phi - phi_h);
    if (twice > 1e-12) {
      const double damp = std::sqrt(-std::expm1(-std::min(twice, 1400.0)));
      const double b = exp_neg_phi_tail_bound(spec, T);
      tail = std::isfinite(b) ? std::exp(phi_h) * b / damp : kInf;
      if (tail < 0.25 * tol) break;
    }
    T = (std::abs(T) + 1.0) * 2.0;
    if (!std::isfinite(T)) return kInf;
  }
  if (!std::isfinite(tail)) return kInf;
  // lambda = u_from + e^s - 1 compresses heavy-tailed integration ranges.
  const double body = quad(
      [&](double s) {
        const double es = std::exp(s);
        return es / slope_at(spec, phi_h, u_from + es - 1.0);
      },
      0.0, std::log1p(T - u_from), 0.25 * tol);
  return body + 0.5 * tail;
}

struct State {
  double x, u, theta;
};

State axpy(const State& s, double dt, const State& d) {
  return {s.x + dt * d.x, s.u + dt * d.u, s.theta + dt * d.theta};
}

}  // namespace

ProfileSample ProfileSolution::at(double x) const {
  const double ax = std::abs(x);
  if (ax > samples.back().x)
    throw DomainError(fmt::format("profile sampled only up to |x| = {}", samples.back().x));
  auto it = std::lower_bound(samples.begin(), samples.end(), ax,
                             [](const ProfileSample& s, double v) { return s.x < v; });
  ProfileSample out{};
  if (it == samples.begin()) {
    out = samples.front();
  } else {
    const ProfileSample& s1 = *it;
    const ProfileSample& s0 = *(it - 1);
    const double hx = s1.x - s0.x;
    const double t = (ax - s0.x) / hx;
    const double t2 = t * t, t3 = t2 * t;
    const double m0 = s0.uprime * hx, m1 = s1.uprime * hx;
    out.u = (2 * t3 - 3 * t2 + 1) * s0.u + (t3 - 2 * t2 + t) * m0 +
            (-2 * t3 + 3 * t2) * s1.u + (t3 - t2) * m1;
    out.uprime = ((6 * t2 - 6 * t) * s0.u + (3 * t2 - 4 * t + 1) * m0 +
                  (-6 * t2 + 6 * t) * s1.u + (3 * t2 - 2 * t) * m1) / hx;
  }
  out.x = x;
  if (x < 0.0) out.uprime = -out.uprime;
  return out;
}

ProfileSolution integrate_profile(const WeightSpec& spec, double h,
                                  const IntegrationOptions& opts) {
  if (!(h > spec.a())) throw DomainError("integrate_profile: h <= a");
  const double phi_h = spec.eval(h).phi;
  const double height_cap = opts.height_cap_base * (std::abs(h) + 1.0);

  // Dormand-Prince 5(4) tableau (autonomous system, so no c coefficients).
  static constexpr double a21 = 1. / 5;
  static constexpr double a31 = 3. / 40, a32 = 9. / 40;
  static constexpr double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
  static constexpr double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561,
                          a54 = -212. / 729;
  static constexpr double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247,
                          a64 = 49. / 176, a65 = -5103. / 18656;
  static constexpr double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192,
                          b5 = -2187. / 6784, b6 = 11. / 84;
  static constexpr double e1 = 35. / 384 - 5179. / 57600, e3 = 500. / 1113 - 7571. / 16695,
                          e4 = 125. / 192 - 393. / 640, e5 = -2187. / 6784 + 92097. / 339200,
                          e6 = 11. / 84 - 187. / 2100, e7 = -1. / 40;

  auto rhs = [&](const State& s) -> State {
    const double ct = std::cos(s.theta);
    return {ct, std::sin(s.theta), spec.eval(s.u).dphi * ct};
  };

  ProfileSolution sol;
  sol.h = h;
  State s{0.0, h, 0.0};
  sol.samples.push_back({0.0, h, 0.0});

  bool integrability_checked = false;
  bool width_can_converge = false;

  double ds = 1e-3 / (1.0 + std::abs(spec.eval(h).dphi));
  const double ds_max = 0.02;
  const double ds_min = 1e-13;
  State k1 = rhs(s);

  for (long step = 0; step < 2'000'000; ++step) {
    ds = std::min(ds, ds_max);
    bool rhs_ok = true;
    State k2{}, k3{}, k4{}, k5{}, k6{}, k7{};
    State y7 = s;
    try {
    k2 = rhs(axpy(s, ds, {a21 * k1.x, a21 * k1.u, a21 * k1.theta}));
    State y3 = s;
    y3.x += ds * (a31 * k1.x + a32 * k2.x);
    y3.u += ds * (a31 * k1.u + a32 * k2.u);
    y3.theta += ds * (a31 * k1.theta + a32 * k2.theta);
    k3 = rhs(y3);
    State y4 = s;
    y4.x += ds * (a41 * k1.x + a42 * k2.x + a43 * k3.x);
    y4.u += ds * (a41 * k1.u + a42 * k2.u + a43 * k3.u);
    y4.theta += ds * (a41 * k1.theta + a42 * k2.theta + a43 * k3.theta);
    k4 = rhs(y4);
    State y5 = s;
    y5.x += ds * (a51 * k1.x + a52 * k2.x + a53 * k3.x + a54 * k4.x);
    y5.u += ds * (a51 * k1.u + a52 * k2.u + a53 * k3.u + a54 * k4.u);
    y5.theta += ds * (a51 * k1.theta + a52 * k2.theta + a53 * k3.theta + a54 * k4.theta);
    k5 = rhs(y5);
    State y6 = s;
    y6.x += ds * (a61 * k1.x + a62 * k2.x + a63 * k3.x + a64 * k4.x + a65 * k5.x);
    y6.u += ds * (a61 * k1.u + a62 * k2.u + a63 * k3.u + a64 * k4.u + a65 * k5.u);
    y6.theta += ds * (a61 * k1.theta + a62 * k2.theta + a63 * k3.theta + a64 * k4.theta +
                      a65 * k5.theta);
    k6 = rhs(y6);
    y7 = s;
    y7.x += ds * (b1 * k1.x + b3 * k3.x + b4 * k4.x + b5 * k5.x + b6 * k6.x);
    y7.u += ds * (b1 * k1.u + b3 * k3.u + b4 * k4.u + b5 * k5.u + b6 * k6.u);
    y7.theta += ds * (b1 * k1.theta + b3 * k3.theta + b4 * k4.theta + b5 * k5.theta +
                      b6 * k6.theta);
    k7 = rhs(y7);
    } catch (const DomainError&) {
      rhs_ok = false;  // a stage left the weight domain; retry smaller
      k7 = k1;
    }

    const double err_x = ds * (e1 * k1.x + e3 * k3.x + e4 * k4.x + e5 * k5.x + e6 * k6.x +
                               e7 * k7.x);
    const double err_u = ds * (e1 * k1.u + e3 * k3.u + e4 * k4.u + e5 * k5.u + e6 * k6.u +
                               e7 * k7.u);
    const double err_t = ds * (e1 * k1.theta + e3 * k3.theta + e4 * k4.theta + e5 * k5.theta +
                               e6 * k6.theta + e7 * k7.theta);
    auto scaled = [&](double e, double y0, double y1) {
      return std::abs(e) / (opts.abs_tol + opts.rel_tol * std::max(std::abs(y0), std::abs(y1)));
    };
    const double err = rhs_ok
                           ? std::max({scaled(err_x, s.x, y7.x), scaled(err_u, s.u, y7.u),
                                       scaled(err_t, s.theta, y7.theta)})
                           : 2.0;

    if (err <= 1.0) {
      s = y7;
      k1 = k7;  // FSAL
      if (s.x > sol.samples.back().x)
        sol.samples.push_back({s.x, s.u, std::tan(s.theta)});

      const double ct = std::cos(s.theta);
      if (ct < 1e-8) {
        if (!integrability_checked) {
          integrability_checked = true;
          width_can_converge =
              !std::isfinite(spec.c()) &&
              classify_integrability(spec, h) == Integrability::finite;
        }
        if (width_can_converge) {
          // x advances slower than 1e-8 per unit arc length; the remainder
          // quadrature is accurate to width_tol whatever its size, so the
          // corrected width is already certified.
          const double rem = width_remainder(spec, phi_h, s.u, opts.width_tol);
          if (std::isfinite(rem)) {
            sol.termination = ProfileTermination::width_converged;
            sol.lambda_estimate = s.x + rem;
            sol.slope_limit = kInf;
            return sol;
          }
        }
      }
      if (std::abs(s.u - h) > height_cap) {
        sol.termination = ProfileTermination::reached_height_cap;
        if (!integrability_checked) {
          integrability_checked = true;
          width_can_converge =
              !std::isfinite(spec.c()) &&
              classify_integrability(spec, h) == Integrability::finite;
        }
        sol.lambda_estimate =
            width_can_converge ? s.x + width_remainder(spec, phi_h, s.u, opts.width_tol) : kInf;
        sol.slope_limit = std::isfinite(spec.c()) ? sol.samples.back().uprime : kInf;
        return sol;
      }
      if (s.x > opts.x_cap) {
        sol.termination = ProfileTermination::reached_x_cap;
        sol.lambda_estimate = kInf;
        sol.slope_limit =
            std::isfinite(spec.c()) ? sol.samples.back().uprime : kInf;
        return sol;
      }
    }
    const double fac = rhs_ok ? std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0)
                              : 0.25;
    ds *= fac;
    if (ds < ds_min)
      throw StepFailure(fmt::format("profile integrator underflowed its step at x = {}", s.x));
  }
  throw StepFailure("profile integrator exceeded its step budget");
}

double first_integral_slope(const WeightSpec& spec, double h, double lambda) {
  if (!(h > spec.a())) throw DomainError("first_integral_slope: h <= a");
  if (!(lambda > spec.a())) throw DomainError("first_integral_slope: lambda <= a");
  return slope_at(spec, spec.eval(h).phi, lambda);
}

double half_width(const WeightSpec& spec, double h, double tol) {
  if (!(h > spec.a())) throw DomainError("half_width: h <= a");
  if (!(tol > 0.0)) throw DomainError("half_width: tol <= 0");
  if (std::isfinite(spec.c())) return kInf;
  switch (classify_integrability(spec, h)) {
    case Integrability::infinite:
      return kInf;
    case Integrability::inconclusive:
      throw Inconclusive("half_width: integrability of exp(-phi) not certified");
    case Integrability::finite:
      break;
  }
  const double phi_h = spec.eval(h).phi;
  const double dphi_h = spec.eval(h).dphi;
  // Endpoint substitution lambda = h + t^2 regularizes the 1/sqrt singularity.
  const double T0 = h + std::max(1.0, 1.0 / std::max(dphi_h, 1e-8));
  auto integrand = [&](double t) {
    if (t == 0.0) return std::sqrt(2.0 / dphi_h);
    return 2.0 * t / slope_at(spec, phi_h, h + t * t);
  };
  const double body = quad(integrand, 0.0, std::sqrt(T0 - h), 0.25 * tol);
  return body + width_remainder(spec, phi_h, T0, tol);
}

double asymptotic_slope(const WeightSpec& spec, double h) {
  if (!(h > spec.a())) throw DomainError("asymptotic_slope: h <= a");
  const double c = spec.c();
  if (!std::isfinite(c)) return kInf;
  const double twice = 2.0 * (c - spec.eval(h).phi);
  if (twice > 1400.0) return kInf;
  return std::sqrt(std::expm1(twice));
}

WidthTable width_table(const WeightSpec& spec, std::vector<double> h_list, double tol) {
  WidthTable t;
  std::sort(h_list.begin(), h_list.end());
  for (double h : h_list) t.rows.push_back({h, half_width(spec, h, tol)});

  // Direction from the sign of ddphi sampled above the smallest height.
  const double lo = h_list.front();
  const double hi = std::max(h_list.back(), lo + 1.0) + (h_list.back() - h_list.front()) + 1.0;
  bool any_pos = false, any_neg = false;
  for (int i = 0; i <= 400; ++i) {
    const double x = lo + (hi - lo) * i / 400;
    const double dd = spec.eval(x).ddphi;
    if (dd > 1e-12) any_pos = true;
    if (dd < -1e-12) any_neg = true;
  }
  if (any_pos && any_neg) t.direction = WidthDirection::mixed;
  else if (any_pos) t.direction = WidthDirection::decreasing;
  else if (any_neg) t.direction = WidthDirection::increasing;
  else t.direction = WidthDirection::constant;
  return t;
}

const char* to_string(WidthDirection d) {
  switch (d) {
    case WidthDirection::decreasing: return "decreasing";
    case WidthDirection::increasing: return "increasing";
    case WidthDirection::constant: return "constant";
    case WidthDirection::mixed: return "mixed";
  }
  return "?";
}

const char* to_string(ProfileTermination t) {
  switch (t) {
    case ProfileTermination::reached_x_cap: return "reached_x_cap";
    case ProfileTermination::reached_height_cap: return "reached_height_cap";
    case ProfileTermination::width_converged: return "width_converged";
  }
  return "?";
}

}  // namespace phimin
