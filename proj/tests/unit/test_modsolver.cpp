#include "doctest.h"

#include <cmath>
#include <numbers>

#include "confmod/analytic.hpp"
#include "confmod/error.hpp"
#include "confmod/geometry.hpp"
#include "confmod/modsolver.hpp"

using namespace confmod;
using namespace confmod::modsolver;
using geometry::Point;
using geometry::Quadrilateral;

namespace {

CondenserGeometry square_ring(double outer = 2.0, double inner = 1.0) {
  CondenserGeometry g;
  const std::vector<Point> o{{-outer, -outer}, {outer, -outer}, {outer, outer}, {-outer, outer}};
  const std::vector<Point> i{{-inner, -inner}, {inner, -inner}, {inner, inner}, {-inner, inner}};
  g.loops.push_back({o, std::vector<EdgeLabel>(4, EdgeLabel::Dirichlet0)});
  g.loops.push_back({i, std::vector<EdgeLabel>(4, EdgeLabel::Dirichlet1)});
  g.bounds = {-outer, outer, -outer, outer};
  return g;
}

double solve_level(const CondenserGeometry& g, const GridPlan& plan, int level,
                   Backend backend = Backend::Cholesky) {
  const GridCondenser c(g, build_axes(plan, level));
  return 1.0 / c.solve(backend, 1e-11, 0).energy;
}

}  // namespace

TEST_CASE("richardson recovers a second-order limit") {
  const std::vector<RawValue> raw{{0.4, 1.0 + 0.5 * 0.16}, {0.2, 1.0 + 0.5 * 0.04}, {0.1, 1.0 + 0.5 * 0.01}};
  const RichardsonResult r = richardson(raw);
  CHECK_FALSE(r.fallback);
  CHECK(r.fitted_order == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.extrapolated == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("richardson handles constant and erratic data") {
  const std::vector<RawValue> flat{{0.4, 2.0}, {0.2, 2.0}, {0.1, 2.0}};
  const RichardsonResult a = richardson(flat);
  CHECK(a.extrapolated == 2.0);
  CHECK(a.error_estimate == 0.0);

  const std::vector<RawValue> zigzag{{0.4, 1.0}, {0.2, 1.2}, {0.1, 1.1}};
  const RichardsonResult b = richardson(zigzag);
  CHECK(b.fallback);
  CHECK(b.extrapolated == 1.1);
  CHECK(b.error_estimate == doctest::Approx(0.1));

  // First-order data fits p = 1 exactly.
  const std::vector<RawValue> first{{0.4, 1.4}, {0.2, 1.2}, {0.1, 1.1}};
  const RichardsonResult c = richardson(first);
  CHECK(c.fitted_order == doctest::Approx(1.0));
  CHECK(c.extrapolated == doctest::Approx(1.0));
}

TEST_CASE("graded axes keep knots and bisect per level") {
  AxisPlan plan;
  plan.lo = -1.0;
  plan.hi = 3.0;
  plan.knots = {0.0, 1.0};
  plan.sources = {{0.5, 0.5, 0.05}};
  const std::vector<double> a0 = build_axis(plan, 0);
  const std::vector<double> a1 = build_axis(plan, 1);
  CHECK(a0.front() == -1.0);
  CHECK(a0.back() == 3.0);
  CHECK(std::find(a0.begin(), a0.end(), 0.0) != a0.end());
  CHECK(std::find(a0.begin(), a0.end(), 1.0) != a0.end());
  CHECK(a1.size() == 2 * a0.size() - 1);
  for (std::size_t i = 1; i < a0.size(); ++i) {
    CHECK(a0[i] > a0[i - 1]);
    // The last step before a knot absorbs up to half a cell.
    const double s = std::max(plan.spacing(a0[i - 1]), plan.spacing(a0[i]));
    CHECK(a0[i] - a0[i - 1] <= 1.5 * s + 1e-12);
  }
  CHECK(plan.spacing(0.5) == doctest::Approx(0.05));
  CHECK(plan.spacing(2.0) > plan.spacing(1.2));
}

TEST_CASE("rectangles are exact") {
  const Quadrilateral sq = Quadrilateral::make({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {0, 1, 2, 3});
  CHECK(quad_modulus(sq).value == doctest::Approx(1.0).epsilon(1e-9));
  const Quadrilateral rc = Quadrilateral::make({{0, 0}, {1, 0}, {1, 0.5}, {0, 0.5}}, {0, 1, 2, 3});
  const ModulusEstimate m = quad_modulus(rc);
  const ModulusEstimate mc = conjugate_modulus(rc);
  CHECK(m.value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(mc.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(m.raw.size() == 3);
}

TEST_CASE("concentric annulus converges at second order") {
  const ModulusEstimate e = annulus_ring_modulus(1.0, 2.0);
  const double exact = std::log(2.0) / (2 * std::numbers::pi);
  CHECK(std::abs(e.value - exact) < 1e-4);
  CHECK(e.fitted_order >= 1.5);
  // Raw values decrease monotonically towards the limit from above.
  REQUIRE(e.raw.size() == 3);
  CHECK(e.raw[0].value > e.raw[1].value);
  CHECK(e.raw[1].value > e.raw[2].value);
  CHECK(e.raw[2].value > exact);
  CHECK(e.raw[0].h > e.raw[1].h);
}

TEST_CASE("small inner electrode far from the outer one") {
  const ModulusEstimate e = annulus_ring_modulus(1.0, std::exp(2 * std::numbers::pi));
  CHECK(e.value == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("Jacobi CG backend matches the direct solve") {
  const CondenserGeometry g = condenser_for(annulus_polylines(1.0, 2.0));
  const GridPlan plan = generic_plan(g);
  const double direct = solve_level(g, plan, 0);
  const double cg = solve_level(g, plan, 0, Backend::JacobiCG);
  CHECK(cg == doctest::Approx(direct).epsilon(1e-8));
}

TEST_CASE("CG iteration cap raises divergence") {
  const CondenserGeometry g = condenser_for(annulus_polylines(1.0, 2.0));
  const GridCondenser c(g, build_axes(generic_plan(g), 0));
  try {
    c.solve(Backend::JacobiCG, 1e-14, 3);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SolverDivergence);
  }
}

TEST_CASE("square ring: network equals the five-point scheme on conforming grids") {
  const CondenserGeometry g = square_ring();
  const GridPlan plan = generic_plan(g);
  for (int level = 0; level < 2; ++level) {
    const GridAxes axes = build_axes(plan, level);
    const double pde = 1.0 / GridCondenser(g, axes).solve(Backend::Cholesky, 1e-12, 0).energy;
    CHECK(resistor_network_modulus(g, axes) == doctest::Approx(pde).epsilon(1e-9));
  }
}

TEST_CASE("annulus: network and PDE agree within two percent") {
  const CondenserGeometry g = condenser_for(annulus_polylines(1.0, 2.0));
  const GridPlan plan = generic_plan(g);
  for (int level = 0; level < 3; ++level) {
    const GridAxes axes = build_axes(plan, level);
    const double pde = 1.0 / GridCondenser(g, axes).solve(Backend::Cholesky, 1e-12, 0).energy;
    const double net = resistor_network_modulus(g, axes);
    CHECK(std::abs(net / pde - 1.0) < 0.02);
  }
}

TEST_CASE("network without a path between electrodes") {
  CondenserGeometry g;
  g.loops.push_back({{{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                     {EdgeLabel::Dirichlet0, EdgeLabel::Neumann, EdgeLabel::Neumann, EdgeLabel::Neumann}});
  g.loops.push_back({{{2, 0}, {3, 0}, {3, 1}, {2, 1}},
                     {EdgeLabel::Dirichlet1, EdgeLabel::Neumann, EdgeLabel::Neumann, EdgeLabel::Neumann}});
  g.bounds = {0, 3, 0, 1};
  const GridPlan plan = generic_plan(g);
  CHECK_THROWS_AS(resistor_network_modulus(g, build_axes(plan, 0)), Error);
}

TEST_CASE("touching electrodes are rejected") {
  CondenserGeometry g;
  g.loops.push_back({{{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                     {EdgeLabel::Dirichlet0, EdgeLabel::Dirichlet1, EdgeLabel::Neumann,
                      EdgeLabel::Neumann}});
  g.bounds = {0, 1, 0, 1};
  bool threw = false;
  try {
    GridCondenser c(g, build_axes(generic_plan(g), 0));
    c.solve(Backend::Cholesky, 1e-10, 0);
  } catch (const Error& e) {
    threw = true;
    CHECK(e.kind() == ErrorKind::ComponentsTouch);
  }
  CHECK(threw);
}

TEST_CASE("conformal invariance of the normalising Mobius map") {
  for (double rho : {1.5, 3.0}) {
    const double r = analytic::r_of_rho(rho);
    const RingPolylines ring{circle_polyline({0, 0}, 1.0), circle_polyline({0, -r / 2}, r / 2)};
    const ModulusEstimate a = ring_modulus(ring);
    const ModulusEstimate b = annulus_ring_modulus(1.0, rho);
    CHECK(std::abs(a.value / b.value - 1.0) < 5e-3);
  }
}

TEST_CASE("channel condenser labels") {
  const geometry::ChannelDomain d = geometry::fixtures::rectangle_frame();
  const geometry::Box box = geometry::truncation_box(d, 8.0);
  const CondenserGeometry g = condenser_for(d, box);
  REQUIRE(g.loops.size() == 3);
  int walls = 0;
  for (const LabeledLoop& l : g.loops) {
    CHECK(l.points.size() == l.labels.size());
    walls += l.wall ? 1 : 0;
  }
  CHECK(walls == 1);
}
