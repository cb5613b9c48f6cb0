#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace confmod::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned rectangle; used for truncation of unbounded regions.
struct Box {
  double xmin = 0.0;
  double xmax = 0.0;
  double ymin = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  bool contains(Point p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  /// Counter-clockwise corner loop.
  std::vector<Point> loop() const;
  Box expanded(double factor) const;
};

inline constexpr std::size_t kDefaultSamples = 1025;

enum class BoundaryKind { PiecewiseLinear, Polynomial, SemicircleArc };

/// The graph y = f(x) of a continuous function on [lo, hi].
///
/// Every function carries dense samples (the polyline used for gridding and
/// file output). Builtin kinds additionally evaluate exactly, which the
/// quadrature in the analytic layer prefers over the interpolant.
class BoundaryFunction {
 public:
  /// Throws Error(InvalidInput) unless there are >= 2 finite samples with
  /// strictly increasing abscissae.
  static BoundaryFunction from_samples(std::vector<Point> samples);

  /// y = c0 + c1 x + c2 x^2 + ... sampled at `n` uniform abscissae.
  static BoundaryFunction polynomial(std::vector<double> coeffs, double lo, double hi,
                                     std::size_t n = kDefaultSamples);

  /// Upper (or lower) arc of the circle centred at (cx, cy) with radius r,
  /// restricted to [lo, hi] within [cx - r, cx + r]. Samples are spaced
  /// uniformly in angle so the vertical tangents at the ends stay resolved.
  static BoundaryFunction semicircle_arc(double cx, double cy, double radius, bool upper,
                                         double lo, double hi,
                                         std::size_t n = kDefaultSamples);

  BoundaryKind kind() const { return kind_; }
  std::span<const Point> samples() const { return samples_; }
  double lo() const { return samples_.front().x; }
  double hi() const { return samples_.back().x; }
  bool has_exact() const { return kind_ != BoundaryKind::PiecewiseLinear; }

  /// Exact value for builtins, the interpolant otherwise.
  double operator()(double x) const;
  /// Piecewise-linear interpolant through the samples.
  double interpolate(double x) const;

  /// Graph of x -> f(x / H), i.e. the image under (x, y) -> (Hx, y).
  BoundaryFunction stretched(double H) const;

  std::span<const double> coefficients() const { return coeffs_; }
  /// (cx, cy, r, upper) for semicircle arcs, in unstretched coordinates.
  std::array<double, 4> arc_parameters() const { return {cx_, cy_, radius_, upper_ ? 1.0 : 0.0}; }
  double x_scale() const { return x_scale_; }

 private:
  BoundaryFunction() = default;
  double exact(double x) const;

  BoundaryKind kind_ = BoundaryKind::PiecewiseLinear;
  std::vector<Point> samples_;
  std::vector<double> coeffs_;
  double cx_ = 0.0;
  double cy_ = 0.0;
  double radius_ = 0.0;
  bool upper_ = true;
  double x_scale_ = 1.0;
};

/// Horizontal stretching coefficient H > 0.
class StretchFactor {
 public:
  explicit StretchFactor(double H);
  double value() const { return value_; }

 private:
  double value_;
};

/// Raw input for a domain of the channel class; see validate_domain.
struct ChannelDomainCandidate {
  BoundaryFunction outer_upper;  // g1 on [a, b]
  BoundaryFunction outer_lower;  // f1 on [a, b]
  BoundaryFunction inner_upper;  // f2 on [c, d]
  BoundaryFunction inner_lower;  // g2 on [c, d]
  std::optional<Interval> interval_outer;
  std::optional<Interval> interval_inner;
};

enum class ViolationKind { Interval, Ordering, Endpoint };

struct Violation {
  ViolationKind kind;
  std::string detail;
};

std::string to_string(ViolationKind kind);

/// Unbounded doubly-connected domain: the plane minus the upper compact
/// {a <= x <= b, f1 <= y <= g1} and the lower compact {c <= x <= d, g2 <= y <= f2}.
/// Only obtainable through validate_domain, so every instance satisfies the
/// class conditions.
class ChannelDomain {
 public:
  const BoundaryFunction& outer_upper() const { return g1_; }
  const BoundaryFunction& outer_lower() const { return f1_; }
  const BoundaryFunction& inner_upper() const { return f2_; }
  const BoundaryFunction& inner_lower() const { return g2_; }

  double a() const { return f1_.lo(); }
  double b() const { return f1_.hi(); }
  double c() const { return f2_.lo(); }
  double d() const { return f2_.hi(); }

  /// Counter-clockwise outline of the upper compact (f1 left to right, then g1 back).
  std::vector<Point> outer_loop() const;
  /// Counter-clockwise outline of the lower compact (g2 left to right, then f2 back).
  std::vector<Point> inner_loop() const;

  Box bounding_box() const;
  /// Smallest f1 - f2 over the polyline breakpoints in [c, d].
  double min_gap() const;

 private:
  friend struct DomainAccess;
  ChannelDomain(BoundaryFunction g1, BoundaryFunction f1, BoundaryFunction f2, BoundaryFunction g2)
      : g1_(std::move(g1)), f1_(std::move(f1)), f2_(std::move(f2)), g2_(std::move(g2)) {}

  BoundaryFunction g1_;
  BoundaryFunction f1_;
  BoundaryFunction f2_;
  BoundaryFunction g2_;
};

struct ValidationResult {
  std::optional<ChannelDomain> domain;
  std::vector<Violation> violations;

  bool ok() const { return domain.has_value(); }
};

/// Checks every class condition and reports all violations at once.
ValidationResult validate_domain(const ChannelDomainCandidate& raw);

/// validate_domain, throwing Error on the first violation kind with every
/// violation listed in the message.
ChannelDomain require_valid(const ChannelDomainCandidate& raw);

ChannelDomain stretch(const ChannelDomain& domain, StretchFactor H);

/// Jordan domain with four marked boundary vertices z1..z4.
///
/// The boundary is a closed polyline (last vertex connects back to the first),
/// positively oriented with respect to the region. With a truncation box the
/// region is the box minus the closed polygon, and the polyline therefore runs
/// clockwise; the box edges carry no marked vertices.
class Quadrilateral {
 public:
  static Quadrilateral make(std::vector<Point> boundary, std::array<std::size_t, 4> marked,
                            std::optional<Box> truncation = std::nullopt);

  std::span<const Point> boundary() const { return boundary_; }
  const std::array<std::size_t, 4>& marked() const { return marked_; }
  Point vertex(std::size_t k) const { return boundary_[marked_[k]]; }
  const std::optional<Box>& truncation() const { return truncation_; }
  bool exterior() const { return truncation_.has_value(); }

  /// (Q; z2, z3, z4, z1), with the polyline re-indexed to start at z2.
  Quadrilateral conjugate() const;
  Quadrilateral with_truncation(Box box) const;

  /// Area of the region (box area minus the hole for truncated regions).
  double area() const;

 private:
  Quadrilateral() = default;

  std::vector<Point> boundary_;
  std::array<std::size_t, 4> marked_{};
  std::optional<Box> truncation_;
};

Quadrilateral stretch(const Quadrilateral& q, StretchFactor H);

struct SplitOptions {
  double box_factor = 8.0;
};

struct Split {
  Quadrilateral q;  // (Q; A, B, C, D)
  Quadrilateral p;  // (P; D, C, B, A), truncated
};

/// Cuts the domain along the vertical segments AB (x = c) and CD (x = d).
Split split_at_verticals(const ChannelDomain& domain, const SplitOptions& options = {});

/// Square box centred on the domain with half-side box_factor * max(b - a, vertical extent).
Box truncation_box(const ChannelDomain& domain, double box_factor);

double signed_area(std::span<const Point> loop);
bool is_simple(std::span<const Point> loop);
double distance_to_segment(Point p, Point a, Point b);

namespace fixtures {

/// F1: mirror-symmetric plates over [0, 1] with bevelled ends; Q is the unit square.
ChannelDomain rectangle_frame();
/// F2: sinusoidal lower edge of an asymmetric lens over [-0.5, 1.5] above a
/// flat-topped plate on [0, 1].
ChannelDomain lens_channel();
/// F3: tilted gap f1 = 1 + x over f2 = 0 on [0, 1], with a semicircular underside.
ChannelDomain tilted_strip();

}  // namespace fixtures

}  // namespace confmod::geometry
