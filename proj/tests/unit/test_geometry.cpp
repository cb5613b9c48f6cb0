#include "doctest.h"

#include <cmath>

#include "confmod/error.hpp"
#include "confmod/geometry.hpp"

using namespace confmod;
using namespace confmod::geometry;

namespace {

BoundaryFunction pl(std::vector<Point> pts) { return BoundaryFunction::from_samples(std::move(pts)); }

ChannelDomainCandidate simple_candidate() {
  return {pl({{-1, 1}, {0.5, 2}, {2, 1}}), pl({{-1, 1}, {2, 1}}), pl({{0, 0}, {1, 0}}),
          pl({{0, 0}, {0.5, -1}, {1, 0}}), std::nullopt, std::nullopt};
}

double polygon_area(std::span<const Point> loop) { return std::abs(signed_area(loop)); }

}  // namespace

TEST_CASE("validate_domain accepts a plain channel") {
  const ValidationResult r = validate_domain(simple_candidate());
  CHECK(r.ok());
  CHECK(r.violations.empty());
  CHECK(r.domain->a() == -1.0);
  CHECK(r.domain->d() == 1.0);
}

TEST_CASE("validate_domain flags touching graphs") {
  ChannelDomainCandidate raw = simple_candidate();
  raw.inner_upper = pl({{0, 0}, {0.5, 1.0}, {1, 0}});
  const ValidationResult r = validate_domain(raw);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations.front().kind == ViolationKind::Ordering);
  CHECK_THROWS_AS(require_valid(raw), Error);
  try {
    require_valid(raw);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrderingViolation);
  }
}

TEST_CASE("validate_domain flags an inner interval that sticks out") {
  const ChannelDomainCandidate raw{pl({{0, 1}, {1, 2}, {2, 1}}), pl({{0, 1}, {2, 1}}),
                                   pl({{0, 0}, {3, 0}}), pl({{0, 0}, {1.5, -1}, {3, 0}}),
                                   std::nullopt, std::nullopt};
  const ValidationResult r = validate_domain(raw);
  REQUIRE_FALSE(r.ok());
  bool interval = false;
  for (const Violation& v : r.violations) interval = interval || v.kind == ViolationKind::Interval;
  CHECK(interval);
}

TEST_CASE("validate_domain flags open ends and lists every violation") {
  ChannelDomainCandidate raw = simple_candidate();
  raw.outer_upper = pl({{-1, 1.001}, {0.5, 2}, {2, 1}});
  raw.inner_upper = pl({{0, 0}, {0.5, 1.5}, {1, 0}});
  const ValidationResult r = validate_domain(raw);
  REQUIRE_FALSE(r.ok());
  bool endpoint = false;
  bool ordering = false;
  for (const Violation& v : r.violations) {
    endpoint = endpoint || v.kind == ViolationKind::Endpoint;
    ordering = ordering || v.kind == ViolationKind::Ordering;
  }
  CHECK(endpoint);
  CHECK(ordering);
}

TEST_CASE("builtin fixtures are valid") {
  for (const ChannelDomain& d :
       {fixtures::rectangle_frame(), fixtures::lens_channel(), fixtures::tilted_strip()}) {
    ChannelDomainCandidate raw{d.outer_upper(), d.outer_lower(), d.inner_upper(), d.inner_lower(),
                               std::nullopt, std::nullopt};
    CHECK(validate_domain(raw).ok());
    CHECK(d.min_gap() > 0.0);
  }
}

TEST_CASE("stretch scales abscissae only") {
  ChannelDomainCandidate raw = simple_candidate();
  raw.outer_upper = pl({{-1, 1}, {0.5, 2}, {3, 5}, {4, 1}});
  raw.outer_lower = pl({{-1, 1}, {4, 1}});
  const ChannelDomain d = require_valid(raw);

  const ChannelDomain same = stretch(d, StretchFactor(1.0));
  for (std::size_t i = 0; i < d.outer_upper().samples().size(); ++i) {
    CHECK(same.outer_upper().samples()[i] == d.outer_upper().samples()[i]);
  }
  const ChannelDomain twice = stretch(d, StretchFactor(2.0));
  CHECK(twice.outer_upper().samples()[2] == Point{6, 5});
  CHECK(twice.a() == -2.0);
  CHECK(twice.b() == 8.0);
  CHECK(twice.c() == 0.0);
  CHECK(twice.d() == 2.0);

  const ChannelDomain six = stretch(stretch(d, StretchFactor(2.0)), StretchFactor(3.0));
  const ChannelDomain direct = stretch(d, StretchFactor(6.0));
  for (std::size_t i = 0; i < d.outer_upper().samples().size(); ++i) {
    CHECK(six.outer_upper().samples()[i].x == doctest::Approx(direct.outer_upper().samples()[i].x));
    CHECK(six.outer_upper().samples()[i].y == direct.outer_upper().samples()[i].y);
  }
  CHECK_THROWS_AS(StretchFactor(0.0), Error);
  CHECK_THROWS_AS(StretchFactor(-1.0), Error);
}

TEST_CASE("stretch round trip restores samples") {
  const ChannelDomain d = fixtures::lens_channel();
  for (double H : {0.37, 2.0, 7.5, 64.0}) {
    const ChannelDomain back = stretch(stretch(d, StretchFactor(H)), StretchFactor(1.0 / H));
    const auto orig = d.outer_lower().samples();
    const auto got = back.outer_lower().samples();
    REQUIRE(orig.size() == got.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < orig.size(); ++i) {
      worst = std::max(worst, std::abs(orig[i].x - got[i].x));
      CHECK(orig[i].y == got[i].y);
    }
    CHECK(worst <= 4e-16 * 2.0);
  }
}

TEST_CASE("split preserves area inside the truncation box") {
  for (const ChannelDomain& base :
       {fixtures::rectangle_frame(), fixtures::lens_channel(), fixtures::tilted_strip()}) {
    for (double H : {1.0, 4.0}) {
      const ChannelDomain d = stretch(base, StretchFactor(H));
      const Split s = split_at_verticals(d, {8.0});
      REQUIRE(s.p.truncation().has_value());
      const Box box = *s.p.truncation();
      const double omega =
          box.area() - polygon_area(d.outer_loop()) - polygon_area(d.inner_loop());
      CHECK(std::abs(s.q.area() + s.p.area() - omega) <= 1e-12 * box.area());
    }
  }
}

TEST_CASE("split puts Q between the verticals") {
  const ChannelDomain d = fixtures::rectangle_frame();
  const Split s = split_at_verticals(d);
  CHECK(s.q.vertex(0).x == doctest::Approx(d.c()));
  CHECK(s.q.vertex(2).x == doctest::Approx(d.d()));
  CHECK(s.q.area() == doctest::Approx(1.0));
  // P carries the vertices in the order D, C, B, A.
  CHECK(s.p.vertex(0) == s.q.vertex(3));
  CHECK(s.p.vertex(3) == s.q.vertex(0));
}

TEST_CASE("truncation box is square and centred") {
  const ChannelDomain d = fixtures::tilted_strip();
  const Box bb = d.bounding_box();
  const Box box = truncation_box(d, 8.0);
  CHECK(box.width() == doctest::Approx(box.height()));
  CHECK(box.width() == doctest::Approx(16.0 * std::max(bb.width(), bb.height())));
  CHECK(box.contains({bb.xmin, bb.ymin}));
  CHECK(box.contains({bb.xmax, bb.ymax}));
}

TEST_CASE("quadrilateral validation and conjugate") {
  const Quadrilateral q = Quadrilateral::make({{0, 0}, {2, 0}, {2, 1}, {0, 1}}, {0, 1, 2, 3});
  CHECK(q.area() == doctest::Approx(2.0));
  const Quadrilateral c = q.conjugate();
  CHECK(c.vertex(0) == q.vertex(1));
  CHECK(c.vertex(3) == q.vertex(0));
  CHECK_THROWS_AS(Quadrilateral::make({{0, 0}, {1, 1}, {1, 0}, {0, 1}}, {0, 1, 2, 3}), Error);
  CHECK_THROWS_AS(Quadrilateral::make({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {0, 2, 1, 3}), Error);
}

TEST_CASE("polyline helpers") {
  const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(signed_area(sq) == doctest::Approx(1.0));
  CHECK(is_simple(sq));
  CHECK(distance_to_segment({0.5, 2}, {0, 1}, {1, 1}) == doctest::Approx(1.0));
  CHECK(distance_to_segment({3, 1}, {0, 1}, {1, 1}) == doctest::Approx(2.0));
}

TEST_CASE("boundary functions") {
  const BoundaryFunction p = BoundaryFunction::polynomial({1.0, 0.0, 2.0}, -1.0, 1.0, 5);
  CHECK(p.has_exact());
  CHECK(p(0.3) == doctest::Approx(1.18));
  CHECK(p.interpolate(0.0) == doctest::Approx(1.0));
  const BoundaryFunction arc = BoundaryFunction::semicircle_arc(0.5, 0.0, 0.5, false, 0.0, 1.0);
  CHECK(arc(0.5) == doctest::Approx(-0.5));
  CHECK(arc(0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(pl({{0, 0}, {0, 1}}), Error);
  CHECK_THROWS_AS(pl({{0, 0}}), Error);
}
