#include "phimin/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace phimin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fritsch-Carlson tangents: the resulting Hermite spline is monotone
// whenever the data is.
std::vector<double> monotone_tangents(const std::vector<std::array<double, 2>>& p) {
  const std::size_t n = p.size();
  std::vector<double> d(n - 1), m(n);
  for (std::size_t i = 0; i + 1 < n; ++i)
    d[i] = (p[i + 1][1] - p[i][1]) / (p[i + 1][0] - p[i][0]);
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i)
    m[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m[i] = m[i + 1] = 0.0;
      continue;
    }
    const double alpha = m[i] / d[i];
    const double beta = m[i + 1] / d[i];
    const double r = alpha * alpha + beta * beta;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      m[i] = tau * alpha * d[i];
      m[i + 1] = tau * beta * d[i];
    }
  }
  return m;
}

}  // namespace

WeightSpec WeightSpec::identity() {
  WeightSpec w;
  w.family_ = WeightFamily::identity;
  w.a_ = -kInf;
  w.b_ = -kInf;
  w.c_ = kInf;
  return w;
}

WeightSpec WeightSpec::linear(double k) {
  if (k == 0.0 || !std::isfinite(k)) throw ConfigError("linear weight needs k != 0");
  WeightSpec w;
  w.family_ = WeightFamily::linear;
  w.param_ = k;
  w.a_ = -kInf;
  w.b_ = k > 0 ? -kInf : kInf;
  w.c_ = k > 0 ? kInf : -kInf;
  if (w.b_ > w.c_) std::swap(w.b_, w.c_);
  return w;
}

WeightSpec WeightSpec::quadratic() {
  WeightSpec w;
  w.family_ = WeightFamily::quadratic;
  w.a_ = 0.0;
  w.b_ = 0.0;
  w.c_ = kInf;
  return w;
}

WeightSpec WeightSpec::alpha_log(double alpha) {
  if (alpha <= 0.0 || !std::isfinite(alpha))
    throw ConfigError("alpha_log weight needs alpha > 0");
  WeightSpec w;
  w.family_ = WeightFamily::alpha_log;
  w.param_ = alpha;
  w.a_ = 0.0;
  w.b_ = -kInf;
  w.c_ = kInf;
  return w;
}

WeightSpec WeightSpec::arctan() {
  WeightSpec w;
  w.family_ = WeightFamily::arctan;
  w.a_ = -kInf;
  w.b_ = -std::asin(1.0);  // -pi/2
  w.c_ = std::asin(1.0);
  return w;
}

WeightSpec WeightSpec::user_table(std::vector<std::array<double, 2>> points) {
  if (points.size() < 4) throw ConfigError("user_table needs at least 4 points");
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i][0] < points[i + 1][0]))
      throw ConfigError("user_table abscissae must be strictly increasing");
    if (!(points[i][1] < points[i + 1][1]))
      throw ConfigError("user_table values must be strictly increasing");
  }
  WeightSpec w;
  w.family_ = WeightFamily::user_table;
  w.a_ = points.front()[0];
  w.b_ = points.front()[1];
  w.c_ = kInf;  // extended linearly past the last knot
  w.slopes_ = monotone_tangents(points);
  w.points_ = std::move(points);
  return w;
}

WeightEval WeightSpec::eval_table(double x3) const {
  const auto& p = points_;
  if (x3 >= p.back()[0]) {
    const double m = slopes_.back();
    return {p.back()[1] + m * (x3 - p.back()[0]), m, 0.0};
  }
  auto it = std::upper_bound(p.begin(), p.end(), x3,
                             [](double v, const std::array<double, 2>& q) { return v < q[0]; });
  const std::size_t i = static_cast<std::size_t>(it - p.begin()) - 1;
  const double hx = p[i + 1][0] - p[i][0];
  const double t = (x3 - p[i][0]) / hx;
  const double y0 = p[i][1], y1 = p[i + 1][1];
  const double m0 = slopes_[i] * hx, m1 = slopes_[i + 1] * hx;
  const double t2 = t * t, t3 = t2 * t;
  const double phi = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
                     (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
  const double dphi = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
                       (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / hx;
  const double ddphi = ((12 * t - 6) * y0 + (6 * t - 4) * m0 +
                        (-12 * t + 6) * y1 + (6 * t - 2) * m1) / (hx * hx);
  return {phi, dphi, ddphi};
}

WeightEval WeightSpec::eval(double x3) const {
  if (!(x3 > a_))
    throw DomainError(fmt::format("height {} outside domain ]{}, +inf[", x3, a_));
  WeightEval e{};
  switch (family_) {
    case WeightFamily::identity:
      e = {x3, 1.0, 0.0};
      break;
    case WeightFamily::linear:
      e = {param_ * x3, param_, 0.0};
      break;
    case WeightFamily::quadratic:
      e = {0.5 * x3 * x3, x3, 1.0};
      break;
    case WeightFamily::alpha_log:
      e = {param_ * std::log(x3), param_ / x3, -param_ / (x3 * x3)};
      break;
    case WeightFamily::arctan: {
      const double d = 1.0 + x3 * x3;
      e = {std::atan(x3), 1.0 / d, -2.0 * x3 / (d * d)};
      break;
    }
    case WeightFamily::user_table:
      e = eval_table(x3);
      break;
  }
  if (reflected_) e = {-e.phi, -e.dphi, -e.ddphi};
  if (!std::isfinite(e.phi) || !std::isfinite(e.dphi) || !std::isfinite(e.ddphi))
    throw NonFinite(fmt::format("weight evaluation overflowed at x3 = {}", x3));
  return e;
}

WeightSpec WeightSpec::reflect() const {
  WeightSpec w = *this;
  w.reflected_ = !reflected_;
  return w;
}

std::string WeightSpec::describe() const {
  std::string base;
  switch (family_) {
    case WeightFamily::identity: base = "identity"; break;
    case WeightFamily::linear: base = fmt::format("linear(k={})", param_); break;
    case WeightFamily::quadratic: base = "quadratic"; break;
    case WeightFamily::alpha_log: base = fmt::format("alpha_log(alpha={})", param_); break;
    case WeightFamily::arctan: base = "arctan"; break;
    case WeightFamily::user_table: base = fmt::format("user_table({} pts)", points_.size()); break;
  }
  return reflected_ ? "reflected " + base : base;
}

namespace {

// Is dphi known to be nonincreasing nowhere on [T, inf[, i.e. the tail
// bound  int_T^inf e^{-phi} <= e^{-phi(T)} / dphi(T)  is valid?
bool tail_bound_valid(const WeightSpec& spec) {
  if (spec.reflected()) {
    // -quadratic etc. are decreasing; handled by the divergence paths.
    return spec.family() == WeightFamily::alpha_log;  // ddphi of -alpha*log > 0
  }
  switch (spec.family()) {
    case WeightFamily::identity:
    case WeightFamily::quadratic:
      return true;
    case WeightFamily::linear:
      return spec.param() > 0;
    case WeightFamily::user_table:
      return spec.table_points().size() > 0;  // constant slope past last knot
    default:
      return false;
  }
}

}  // namespace

Integrability classify_integrability(const WeightSpec& spec, double h) {
  if (!(h > spec.a())) throw DomainError("classify_integrability: h <= a");

  // Bounded range above: e^{-phi} >= e^{-c} > 0 on an unbounded interval.
  if (std::isfinite(spec.c())) return Integrability::infinite;

  // Decreasing weights: e^{-phi(lambda)} >= e^{-phi(h)} for lambda >= h.
  {
    const double dphi_h = spec.eval(h).dphi;
    if (dphi_h < 0.0) return Integrability::infinite;
  }

  // Convex-increasing tail bound:  int_T^inf e^{-phi} <= e^{-phi(T)} / dphi(T).
  if (tail_bound_valid(spec)) {
    double T = std::max(h, std::isfinite(spec.a()) ? spec.a() + 1.0 : 1.0);
    for (int k = 0; k < 64; ++k) {
      const WeightEval e = spec.eval(T);
      if (e.dphi > 0.0) {
        const double log_tail = -e.phi - std::log(e.dphi);
        if (log_tail < std::log(1e-8)) return Integrability::finite;
      }
      T = (std::abs(T) + 1.0) * 2.0;
      if (!std::isfinite(T)) break;
    }
    return Integrability::inconclusive;
  }

  // Power-law certificate: sample s(lambda) = lambda * dphi(lambda) at
  // doubling heights. If s stays >= p > 1 with nondecreasing trend, then
  // e^{-phi} <= e^{-phi(T)} (T/lambda)^p, an integrable tail; if s stays
  // <= 1 with nonincreasing trend, e^{-phi} >= e^{-phi(T)} (T/lambda)^1,
  // a divergent tail.
  {
    const double lo = std::max(h, 1.0);
    double s_min = kInf, s_max = -kInf, s_first = 0.0, s_last = 0.0;
    bool ok = true;
    for (int k = 0; k <= 40 && ok; ++k) {
      const double lam = lo * std::pow(2.0, k);
      if (!std::isfinite(lam)) break;
      try {
        const double s = lam * spec.eval(lam).dphi;
        if (k == 0) s_first = s;
        s_last = s;
        s_min = std::min(s_min, s);
        s_max = std::max(s_max, s);
      } catch (const NonFinite&) {
        ok = false;
      }
    }
    const double margin = 1e-3;
    if (ok && s_min > 1.0 + margin && s_last >= s_first - 1e-9 * (1.0 + std::abs(s_first)))
      return Integrability::finite;
    if (ok && s_max <= 1.0 + 1e-6 && s_last <= s_first + 1e-9 * (1.0 + std::abs(s_first)))
      return Integrability::infinite;
  }

  // Divergence witness by doubling blocks: if the block lower bounds
  // T * min_{[T,2T]} e^{-phi} do not decay, the integral cannot converge.
  {
    double T = std::max(h, 1.0);
    double prev_block = -kInf;
    int nondecaying = 0;
    for (int k = 0; k < 40; ++k) {
      double m = kInf;
      for (int j = 0; j <= 8; ++j)
        m = std::min(m, std::exp(-spec.eval(T + T * j / 8.0).phi));
      const double block = T * m;
      if (block >= prev_block * (1.0 - 1e-9) && block > 1e-6) ++nondecaying;
      else nondecaying = 0;
      prev_block = block;
      T *= 2.0;
      if (!std::isfinite(T) || nondecaying >= 20) break;
    }
    if (nondecaying >= 20) return Integrability::infinite;
  }

  return Integrability::inconclusive;
}

HypothesisReport check_hypotheses(const WeightSpec& spec, double sample_lo, double sample_hi) {
  HypothesisReport r;
  const double a = spec.a();
  if (std::isnan(sample_lo)) sample_lo = std::isfinite(a) ? a + 0.5 : 0.0;
  if (std::isnan(sample_hi)) sample_hi = sample_lo + 100.0;
  if (!(sample_lo > a) || !(sample_hi > sample_lo))
    throw DomainError("check_hypotheses: bad sample interval");
  r.sample_lo = sample_lo;
  r.sample_hi = sample_hi;
  r.range_finite_top = std::isfinite(spec.c());

  const bool refl = spec.reflected();
  switch (spec.family()) {
    case WeightFamily::identity:
      r.increasing = !refl;
      r.convex = true;
      r.quotient_bound = 0.0;
      break;
    case WeightFamily::linear:
      r.increasing = (spec.param() > 0) != refl;
      r.convex = true;
      r.quotient_bound = 0.0;
      break;
    case WeightFamily::quadratic:
      r.increasing = !refl;
      r.convex = !refl;
      r.quotient_bound = 1.0 / sample_lo;  // |1| / x, decreasing
      break;
    case WeightFamily::alpha_log:
      r.increasing = !refl;
      r.convex = refl;  // -alpha*log x has ddphi > 0
      r.quotient_bound = 1.0 / sample_lo;  // |alpha/x^2| / (alpha/x)
      break;
    case WeightFamily::arctan: {
      r.increasing = !refl;
      r.convex = false;  // ddphi changes sign at x = 0
      // sup of 2|x|/(1+x^2) on the interval: maximum at |x| = 1.
      auto q = [](double x) { return 2.0 * std::abs(x) / (1.0 + x * x); };
      r.quotient_bound = std::max(q(sample_lo), q(sample_hi));
      if (sample_lo < 1.0 && sample_hi > 1.0) r.quotient_bound = std::max(r.quotient_bound, q(1.0));
      if (sample_lo < -1.0 && sample_hi > -1.0) r.quotient_bound = std::max(r.quotient_bound, q(-1.0));
      break;
    }
    case WeightFamily::user_table: {
      // Dense sampling plus sign analysis.
      const int n = 4001;
      bool inc = true, convex = true;
      double qb = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double x = sample_lo + (sample_hi - sample_lo) * i / n;
        const WeightEval e = spec.eval(x);
        inc = inc && e.dphi > 0.0;
        convex = convex && e.ddphi >= -1e-10;
        if (e.dphi > 0.0) qb = std::max(qb, std::abs(e.ddphi) / e.dphi);
      }
      r.increasing = inc;
      r.convex = convex;
      r.quotient_bound = qb;
      break;
    }
  }
  r.integrable_exp_neg_phi = classify_integrability(spec, sample_lo);
  return r;
}

}  // namespace phimin
