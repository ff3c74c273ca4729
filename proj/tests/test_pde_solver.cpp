#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phimin/geometry.hpp"
#include "phimin/pde.hpp"

using namespace phimin;

namespace {

constexpr double kPi = std::numbers::pi;

BoundaryData boundary_from(const GraphPatch& tmpl,
                           const std::function<double(double, double)>& g) {
  BoundaryData b;
  for (int i = 0; i < tmpl.nx(); ++i) {
    b.bottom.push_back(g(tmpl.x(i), tmpl.y0()));
    b.top.push_back(g(tmpl.x(i), tmpl.y1()));
  }
  for (int j = 0; j < tmpl.ny(); ++j) {
    b.left.push_back(g(tmpl.x0(), tmpl.y(j)));
    b.right.push_back(g(tmpl.x1(), tmpl.y(j)));
  }
  return b;
}

double max_err(const GraphPatch& p, const std::function<double(double, double)>& g) {
  double m = 0.0;
  for (int i = 0; i < p.nx(); ++i)
    for (int j = 0; j < p.ny(); ++j)
      m = std::max(m, std::abs(p.at(i, j) - g(p.x(i), p.y(j))));
  return m;
}

}  // namespace

TEST_CASE("boundary validation") {
  const GraphPatch tmpl(0, 1, 0, 1, 5, 5);
  BoundaryData b = boundary_from(tmpl, [](double x, double y) { return x + y; });
  CHECK_NOTHROW(b.validate(5, 5, -1e300));

  BoundaryData short_edge = b;
  short_edge.top.pop_back();
  CHECK_THROWS_AS(short_edge.validate(5, 5, -1e300), ConfigError);

  BoundaryData corner = b;
  corner.left[0] += 0.5;  // disagrees with bottom[0]
  CHECK_THROWS_AS(corner.validate(5, 5, -1e300), ConfigError);

  // heights must stay above the domain endpoint
  CHECK_THROWS_AS(b.validate(5, 5, 3.0), DomainError);
}

TEST_CASE("solver reproduces the log-cosine solution") {
  const auto w = WeightSpec::identity();
  auto exact = [](double x, double) { return -std::log(std::cos(x)); };
  const GraphPatch tmpl(-1.2, 1.2, -1.0, 1.0, 65, 65);
  const auto [sol, rep] = solve_graph_equation(w, tmpl, boundary_from(tmpl, exact));
  CHECK(rep.converged);
  CHECK(rep.final_residual_norm <= 1e-10);
  CHECK(max_err(sol, exact) <= 5e-4);

  // second-order accuracy across one refinement
  const GraphPatch fine(-1.2, 1.2, -1.0, 1.0, 129, 129);
  const auto [sol2, rep2] = solve_graph_equation(w, fine, boundary_from(fine, exact));
  CHECK(rep2.converged);
  CHECK(std::log2(max_err(sol, exact) / max_err(sol2, exact)) > 1.8);
}

TEST_CASE("solution is independent of the initial iterate") {
  const auto w = WeightSpec::identity();
  auto exact = [](double x, double) { return -std::log(std::cos(x)); };
  const GraphPatch tmpl(-1.0, 1.0, -1.0, 1.0, 33, 33);
  const BoundaryData b = boundary_from(tmpl, exact);

  const auto [base, r0] = solve_graph_equation(w, tmpl, b);
  NodeField init(static_cast<std::size_t>(33) * 33, 0.0);
  for (int i = 0; i < 33; ++i)
    for (int j = 0; j < 33; ++j) {
      const double s = (tmpl.x(i) + 1.0) / 2.0, t = (tmpl.y(j) + 1.0) / 2.0;
      init[static_cast<std::size_t>(i) * 33 + j] =
          exact(tmpl.x(i), 0.0) + 0.3 * std::sin(kPi * s) * std::sin(kPi * t);
    }
  const auto [other, r1] = solve_graph_equation(w, tmpl, b, init);
  CHECK(r1.converged);
  double diff = 0.0;
  for (std::size_t k = 0; k < base.values().size(); ++k)
    diff = std::max(diff, std::abs(base.values()[k] - other.values()[k]));
  CHECK(diff <= 1e-9);
}

TEST_CASE("even boundary data gives an even solution") {
  const auto w = WeightSpec::identity();
  auto even = [](double x, double y) {
    return -std::log(std::cos(x)) + 0.05 * std::cos(kPi * y) * (1.44 - x * x);
  };
  const GraphPatch tmpl(-1.2, 1.2, -1.0, 1.0, 65, 65);
  const auto [sol, rep] = solve_graph_equation(w, tmpl, boundary_from(tmpl, even));
  CHECK(rep.converged);
  double defect = 0.0;
  for (int i = 0; i < sol.nx(); ++i)
    for (int j = 0; j < sol.ny(); ++j)
      defect = std::max(defect, std::abs(sol.at(i, j) - sol.at(sol.nx() - 1 - i, j)));
  CHECK(defect <= 1e-10);
}

TEST_CASE("solve with a nonunit weight satisfies its own equation") {
  const auto w = WeightSpec::quadratic();
  const GraphPatch tmpl(-0.4, 0.4, -0.5, 0.5, 33, 33);
  const auto [sol, rep] = solve_graph_equation(
      w, tmpl, boundary_from(tmpl, [](double x, double) { return 1.0 + 0.2 * x * x; }));
  CHECK(rep.converged);
  const NodeField res = phi_minimal_residual(sol, w);
  for (int i = 1; i < sol.nx() - 1; ++i)
    for (int j = 1; j < sol.ny() - 1; ++j)
      CHECK(std::abs(res[static_cast<std::size_t>(i) * sol.ny() + j]) <= 1e-9);
}

TEST_CASE("profile boundary traces and the slab guard") {
  const auto w = WeightSpec::identity();
  const ProfileSolution prof = integrate_profile(w, 0.0);
  const GraphPatch ok(-1.2, 1.2, -1.0, 1.0, 17, 17);
  const BoundaryData b = make_boundary_from_profile(prof, ok);
  CHECK(b.bottom.front() == doctest::Approx(prof.at(-1.2).u));
  CHECK(b.left.front() == doctest::Approx(b.left.back()));  // y-invariant

  // pi/2 - 1.55 is inside the 5% margin: rejected
  const GraphPatch close(-1.55, 1.55, -1.0, 1.0, 17, 17);
  CHECK_THROWS_AS(make_boundary_from_profile(prof, close), SlabViolation);
}

TEST_CASE("uniqueness experiment at desk scale") {
  UniquenessOptions opts;
  opts.grid_n = 33;
  const UniquenessReport rep =
      uniqueness_experiment(WeightSpec::identity(), 0.0, {0.0, 0.1}, opts);
  CHECK(rep.hypotheses_ok);
  CHECK(rep.all_converged);
  CHECK(rep.max_pairwise_diff <= 1e-9);
  CHECK(rep.max_y_variation <= 1e-9);
  CHECK(rep.max_eta2 <= 1e-9);
  CHECK(std::abs(rep.fitted_h) <= 1e-2);
  CHECK(rep.solves.size() == 2);
}
