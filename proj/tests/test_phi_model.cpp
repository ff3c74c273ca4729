#include <doctest.h>

#include <cmath>
#include <limits>

#include "phimin/weight.hpp"

using namespace phimin;

namespace {

// Finite-difference oracle for dphi and ddphi.
void check_derivatives(const WeightSpec& w, double x, double tol = 1e-6) {
  const double e = 1e-5 * (1.0 + std::abs(x));
  const WeightEval c = w.eval(x);
  const double d1 = (w.eval(x + e).phi - w.eval(x - e).phi) / (2 * e);
  const double d2 = (w.eval(x + e).dphi - w.eval(x - e).dphi) / (2 * e);
  CHECK(std::abs(c.dphi - d1) <= tol * (1.0 + std::abs(c.dphi)));
  CHECK(std::abs(c.ddphi - d2) <= tol * (1.0 + std::abs(c.ddphi)));
}

}  // namespace

TEST_CASE("family closed forms") {
  const auto id = WeightSpec::identity();
  CHECK(id.eval(2.5).phi == doctest::Approx(2.5));
  CHECK(id.eval(2.5).dphi == doctest::Approx(1.0));
  CHECK(id.eval(2.5).ddphi == doctest::Approx(0.0));

  const auto lin = WeightSpec::linear(3.0);
  CHECK(lin.eval(-1.0).phi == doctest::Approx(-3.0));
  CHECK(lin.eval(-1.0).dphi == doctest::Approx(3.0));

  const auto quad = WeightSpec::quadratic();
  CHECK(quad.eval(2.0).phi == doctest::Approx(2.0));
  CHECK(quad.eval(2.0).dphi == doctest::Approx(2.0));
  CHECK(quad.eval(2.0).ddphi == doctest::Approx(1.0));

  const auto al = WeightSpec::alpha_log(2.0);
  CHECK(al.eval(std::exp(1.0)).phi == doctest::Approx(2.0));
  CHECK(al.eval(4.0).dphi == doctest::Approx(0.5));

  const auto at = WeightSpec::arctan();
  CHECK(at.eval(1.0).phi == doctest::Approx(std::atan(1.0)));
  CHECK(at.eval(1.0).dphi == doctest::Approx(0.5));
  CHECK(at.c() == doctest::Approx(std::acos(-1.0) / 2));
}

TEST_CASE("derivatives agree with finite differences") {
  for (double x : {0.3, 1.0, 2.7}) {
    check_derivatives(WeightSpec::identity(), x);
    check_derivatives(WeightSpec::linear(-2.0), x);
    check_derivatives(WeightSpec::quadratic(), x);
    check_derivatives(WeightSpec::alpha_log(1.5), x);
    check_derivatives(WeightSpec::arctan(), x);
  }
}

TEST_CASE("user_table interpolates knots and stays monotone") {
  const std::vector<std::array<double, 2>> pts{{0.0, 0.0}, {1.0, 0.8}, {2.0, 1.0},
                                               {3.0, 2.5}, {4.0, 2.6}};
  const auto w = WeightSpec::user_table(pts);
  // the domain is open at the first knot, so probe the others
  for (std::size_t k = 1; k < pts.size(); ++k)
    CHECK(w.eval(pts[k][0]).phi == doctest::Approx(pts[k][1]).epsilon(1e-12));
  double prev = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 400; ++k) {
    const double v = w.eval(4.0 * k / 400).phi;
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  // linear extension beyond the last knot
  const double s = w.eval(4.0).dphi;
  CHECK(w.eval(6.0).phi == doctest::Approx(2.6 + 2.0 * s).epsilon(1e-12));
  CHECK(w.eval(6.0).ddphi == doctest::Approx(0.0));
  for (double x : {0.4, 1.7, 2.5, 3.9}) check_derivatives(w, x, 1e-4);
}

TEST_CASE("user_table dphi is continuous at the knots") {
  const auto w = WeightSpec::user_table({{0.0, 0.0}, {1.0, 0.5}, {2.0, 2.0}, {3.0, 2.2}});
  for (double knot : {1.0, 2.0}) {
    const double lo = w.eval(knot - 1e-9).dphi;
    const double hi = w.eval(knot + 1e-9).dphi;
    CHECK(std::abs(lo - hi) < 1e-6);
  }
}

TEST_CASE("reflect negates phi and is an involution") {
  const auto at = WeightSpec::arctan();
  const auto r = at.reflect();
  CHECK(r.eval(0.7).phi == doctest::Approx(-at.eval(0.7).phi));
  CHECK(r.eval(0.7).dphi == doctest::Approx(-at.eval(0.7).dphi));
  CHECK(r.eval(0.7).ddphi == doctest::Approx(-at.eval(0.7).ddphi));
  CHECK(r.b() == doctest::Approx(-at.c()));
  CHECK(r.c() == doctest::Approx(-at.b()));
  const auto rr = r.reflect();
  CHECK(rr.eval(0.7).phi == doctest::Approx(at.eval(0.7).phi));
  CHECK(rr.reflected() == at.reflected());
}

TEST_CASE("integrability classification") {
  CHECK(classify_integrability(WeightSpec::identity(), 0.0) == Integrability::finite);
  CHECK(classify_integrability(WeightSpec::quadratic(), 1.0) == Integrability::finite);
  CHECK(classify_integrability(WeightSpec::linear(2.0), 0.0) == Integrability::finite);
  // decreasing weight: exp(-phi) grows
  CHECK(classify_integrability(WeightSpec::linear(-1.0), 0.0) == Integrability::infinite);
  // bounded range: exp(-phi) bounded below
  CHECK(classify_integrability(WeightSpec::arctan(), 0.0) == Integrability::infinite);
  // power-law boundary at alpha = 1
  CHECK(classify_integrability(WeightSpec::alpha_log(0.5), 1.0) == Integrability::infinite);
  CHECK(classify_integrability(WeightSpec::alpha_log(1.0), 1.0) == Integrability::infinite);
  CHECK(classify_integrability(WeightSpec::alpha_log(1.5), 1.0) == Integrability::finite);
  CHECK(classify_integrability(WeightSpec::alpha_log(2.0), 1.0) == Integrability::finite);
  CHECK(classify_integrability(WeightSpec::alpha_log(3.0), 1.0) == Integrability::finite);
  // table with positive terminal slope: exponential tail
  const auto tab = WeightSpec::user_table({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.5}, {3.0, 4.5}});
  CHECK(classify_integrability(tab, 0.5) == Integrability::finite);
}

TEST_CASE("hypothesis report") {
  const auto id = check_hypotheses(WeightSpec::identity());
  CHECK(id.increasing);
  CHECK(id.convex);
  CHECK(id.quotient_bound == doctest::Approx(0.0));
  CHECK(id.integrable_exp_neg_phi == Integrability::finite);
  CHECK_FALSE(id.range_finite_top);

  const auto quad = check_hypotheses(WeightSpec::quadratic(), 1.0, 10.0);
  CHECK(quad.increasing);
  CHECK(quad.convex);
  CHECK(quad.quotient_bound == doctest::Approx(1.0));  // sup of 1/x on [1, 10]
  CHECK(quad.sample_lo == doctest::Approx(1.0));

  const auto at = check_hypotheses(WeightSpec::arctan());
  CHECK(at.increasing);
  CHECK_FALSE(at.convex);  // ddphi changes sign at 0
  CHECK(at.range_finite_top);
  CHECK(at.quotient_bound == doctest::Approx(1.0));  // sup 2|x|/(1+x^2) at |x| = 1

  const auto al = check_hypotheses(WeightSpec::alpha_log(2.0), 1.0, 5.0);
  CHECK(al.increasing);
  CHECK_FALSE(al.convex);
  CHECK(al.quotient_bound == doctest::Approx(1.0));  // |(-a/x^2)| / (a/x) = 1/x at x = 1
}

TEST_CASE("constructor and eval errors") {
  CHECK_THROWS_AS(WeightSpec::linear(0.0), ConfigError);
  CHECK_THROWS_AS(WeightSpec::alpha_log(-1.0), ConfigError);
  CHECK_THROWS_AS(WeightSpec::user_table({{0.0, 0.0}, {1.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(WeightSpec::user_table({{0.0, 0.0}, {1.0, 1.0}, {1.0, 2.0}, {2.0, 3.0}}),
                  ConfigError);
  CHECK_THROWS_AS(WeightSpec::user_table({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.5}, {3.0, 2.0}}),
                  ConfigError);
  CHECK_THROWS_AS(WeightSpec::quadratic().eval(-1.0), DomainError);
  CHECK_THROWS_AS(WeightSpec::alpha_log(2.0).eval(0.0), DomainError);
  CHECK_THROWS_AS(classify_integrability(WeightSpec::quadratic(), -2.0), DomainError);
}

TEST_CASE("describe names the family") {
  CHECK(WeightSpec::identity().describe() == "identity");
  CHECK(WeightSpec::alpha_log(2.0).describe().find("alpha_log") != std::string::npos);
}
