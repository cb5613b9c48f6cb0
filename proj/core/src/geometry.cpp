#include "confmod/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "confmod/error.hpp"

namespace confmod::geometry {

struct DomainAccess {
  static ChannelDomain make(const ChannelDomainCandidate& raw) {
    return ChannelDomain(raw.outer_upper, raw.outer_lower, raw.inner_upper, raw.inner_lower);
  }
  static ChannelDomain make(BoundaryFunction g1, BoundaryFunction f1, BoundaryFunction f2,
                            BoundaryFunction g2) {
    return ChannelDomain(std::move(g1), std::move(f1), std::move(f2), std::move(g2));
  }
};

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void push_unique(std::vector<Point>& out, Point p) {
  if (out.empty() || !(out.back() == p)) out.push_back(p);
}

}  // namespace

// ---------------------------------------------------------------------------
// Box

std::vector<Point> Box::loop() const {
  return {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}};
}

Box Box::expanded(double factor) const {
  const double cx = 0.5 * (xmin + xmax);
  const double cy = 0.5 * (ymin + ymax);
  const double hw = 0.5 * width() * factor;
  const double hh = 0.5 * height() * factor;
  return {cx - hw, cx + hw, cy - hh, cy + hh};
}

// ---------------------------------------------------------------------------
// BoundaryFunction

BoundaryFunction BoundaryFunction::from_samples(std::vector<Point> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorKind::InvalidInput, "boundary function needs at least two samples");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].x) || !std::isfinite(samples[i].y)) {
      throw Error(ErrorKind::InvalidInput, "non-finite boundary sample");
    }
    if (i > 0 && !(samples[i].x > samples[i - 1].x)) {
      throw Error(ErrorKind::InvalidInput,
                  "sample abscissae must be strictly increasing (at x = " +
                      fmt_num(samples[i].x) + ")");
    }
  }
  BoundaryFunction f;
  f.kind_ = BoundaryKind::PiecewiseLinear;
  f.samples_ = std::move(samples);
  return f;
}

BoundaryFunction BoundaryFunction::polynomial(std::vector<double> coeffs, double lo, double hi,
                                              std::size_t n) {
  if (coeffs.empty()) throw Error(ErrorKind::InvalidInput, "polynomial needs coefficients");
  if (!(lo < hi) || n < 2) throw Error(ErrorKind::InvalidInput, "polynomial needs lo < hi, n >= 2");
  BoundaryFunction f;
  f.kind_ = BoundaryKind::Polynomial;
  f.coeffs_ = std::move(coeffs);
  f.samples_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = (i + 1 == n) ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    f.samples_.push_back({x, f.exact(x)});
  }
  return f;
}

BoundaryFunction BoundaryFunction::semicircle_arc(double cx, double cy, double radius, bool upper,
                                                  double lo, double hi, std::size_t n) {
  if (!(radius > 0.0) || !(lo < hi) || lo < cx - radius || hi > cx + radius || n < 2) {
    throw Error(ErrorKind::InvalidInput, "semicircle arc needs cx - r <= lo < hi <= cx + r");
  }
  BoundaryFunction f;
  f.kind_ = BoundaryKind::SemicircleArc;
  f.cx_ = cx;
  f.cy_ = cy;
  f.radius_ = radius;
  f.upper_ = upper;
  const double t_lo = std::acos(std::clamp((lo - cx) / radius, -1.0, 1.0));
  const double t_hi = std::acos(std::clamp((hi - cx) / radius, -1.0, 1.0));
  f.samples_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x;
    if (i == 0) {
      x = lo;
    } else if (i + 1 == n) {
      x = hi;
    } else {
      const double t = t_lo + (t_hi - t_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      x = cx + radius * std::cos(t);
    }
    if (!f.samples_.empty() && !(x > f.samples_.back().x)) continue;
    f.samples_.push_back({x, f.exact(x)});
  }
  return f;
}

double BoundaryFunction::exact(double x) const {
  const double u = x / x_scale_;
  switch (kind_) {
    case BoundaryKind::Polynomial: {
      double acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
      return acc;
    }
    case BoundaryKind::SemicircleArc: {
      const double dx = u - cx_;
      const double h = std::sqrt(std::max(0.0, (radius_ - dx) * (radius_ + dx)));
      return upper_ ? cy_ + h : cy_ - h;
    }
    case BoundaryKind::PiecewiseLinear:
      break;
  }
  return interpolate(x);
}

double BoundaryFunction::interpolate(double x) const {
  if (x <= samples_.front().x) return samples_.front().y;
  if (x >= samples_.back().x) return samples_.back().y;
  auto it = std::upper_bound(samples_.begin(), samples_.end(), x,
                             [](double v, const Point& p) { return v < p.x; });
  const Point& p1 = *it;
  const Point& p0 = *(it - 1);
  const double t = (x - p0.x) / (p1.x - p0.x);
  return p0.y + t * (p1.y - p0.y);
}

double BoundaryFunction::operator()(double x) const {
  const double span = hi() - lo();
  if (x < lo() - 1e-12 * span || x > hi() + 1e-12 * span) {
    throw Error(ErrorKind::OutOfRange, "boundary function evaluated at x = " + fmt_num(x) +
                                           " outside [" + fmt_num(lo()) + ", " + fmt_num(hi()) + "]");
  }
  return has_exact() ? exact(std::clamp(x, lo(), hi())) : interpolate(x);
}

BoundaryFunction BoundaryFunction::stretched(double H) const {
  BoundaryFunction f = *this;
  for (Point& p : f.samples_) p.x *= H;
  f.x_scale_ *= H;
  return f;
}

StretchFactor::StretchFactor(double H) : value_(H) {
  if (!(H > 0.0) || !std::isfinite(H)) {
    throw Error(ErrorKind::InvalidInput, "stretch factor must be positive, got " + fmt_num(H));
  }
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Interval: return "interval-violation";
    case ViolationKind::Ordering: return "ordering-violation";
    case ViolationKind::Endpoint: return "endpoint-mismatch";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Validation

namespace {

std::vector<double> merged_abscissae(const BoundaryFunction& u, const BoundaryFunction& v,
                                     double lo, double hi) {
  std::vector<double> xs;
  for (const Point& p : u.samples()) {
    if (p.x >= lo && p.x <= hi) xs.push_back(p.x);
  }
  for (const Point& p : v.samples()) {
    if (p.x >= lo && p.x <= hi) xs.push_back(p.x);
  }
  xs.push_back(lo);
  xs.push_back(hi);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace

ValidationResult validate_domain(const ChannelDomainCandidate& raw) {
  ValidationResult result;
  auto report = [&](ViolationKind kind, std::string detail) {
    result.violations.push_back({kind, std::move(detail)});
  };

  const BoundaryFunction& g1 = raw.outer_upper;
  const BoundaryFunction& f1 = raw.outer_lower;
  const BoundaryFunction& f2 = raw.inner_upper;
  const BoundaryFunction& g2 = raw.inner_lower;

  // Intervals.
  if (g1.lo() != f1.lo() || g1.hi() != f1.hi()) {
    report(ViolationKind::Interval, "outer functions are not defined on a common [a, b]");
  }
  if (g2.lo() != f2.lo() || g2.hi() != f2.hi()) {
    report(ViolationKind::Interval, "inner functions are not defined on a common [c, d]");
  }
  if (raw.interval_outer && (raw.interval_outer->lo != f1.lo() || raw.interval_outer->hi != f1.hi())) {
    report(ViolationKind::Interval, "declared interval_outer does not match the sampled domain");
  }
  if (raw.interval_inner && (raw.interval_inner->lo != f2.lo() || raw.interval_inner->hi != f2.hi())) {
    report(ViolationKind::Interval, "declared interval_inner does not match the sampled domain");
  }
  const double a = std::max(f1.lo(), g1.lo());
  const double b = std::min(f1.hi(), g1.hi());
  const double c = std::max(f2.lo(), g2.lo());
  const double d = std::min(f2.hi(), g2.hi());
  if (c < a || d > b) {
    report(ViolationKind::Interval, "[c, d] = [" + fmt_num(c) + ", " + fmt_num(d) +
                                        "] is not contained in [a, b] = [" + fmt_num(a) + ", " +
                                        fmt_num(b) + "]");
  }

  // Orderings, on the merged polyline breakpoints.
  if (a < b) {
    for (double x : merged_abscissae(f1, g1, a, b)) {
      if (f1.interpolate(x) > g1.interpolate(x)) {
        report(ViolationKind::Ordering, "f1 > g1 at x = " + fmt_num(x));
        break;
      }
    }
  }
  if (c < d) {
    for (double x : merged_abscissae(g2, f2, c, d)) {
      if (g2.interpolate(x) > f2.interpolate(x)) {
        report(ViolationKind::Ordering, "g2 > f2 at x = " + fmt_num(x));
        break;
      }
    }
  }
  const double lo = std::max(a, c);
  const double hi = std::min(b, d);
  if (lo < hi) {
    for (double x : merged_abscissae(f1, f2, lo, hi)) {
      if (!(f2.interpolate(x) < f1.interpolate(x))) {
        report(ViolationKind::Ordering, "f2 >= f1 at x = " + fmt_num(x));
        break;
      }
    }
  }

  // Endpoint closures, exactly at the sample level.
  if (f1.samples().front().y != g1.samples().front().y) {
    report(ViolationKind::Endpoint, "f1(a) != g1(a)");
  }
  if (f1.samples().back().y != g1.samples().back().y) {
    report(ViolationKind::Endpoint, "f1(b) != g1(b)");
  }
  if (f2.samples().front().y != g2.samples().front().y) {
    report(ViolationKind::Endpoint, "f2(c) != g2(c)");
  }
  if (f2.samples().back().y != g2.samples().back().y) {
    report(ViolationKind::Endpoint, "f2(d) != g2(d)");
  }

  if (result.violations.empty()) result.domain = DomainAccess::make(raw);
  return result;
}

ChannelDomain require_valid(const ChannelDomainCandidate& raw) {
  ValidationResult r = validate_domain(raw);
  if (r.ok()) return *std::move(r.domain);
  std::string msg;
  for (const Violation& v : r.violations) {
    if (!msg.empty()) msg += "; ";
    msg += to_string(v.kind) + ": " + v.detail;
  }
  ErrorKind kind = ErrorKind::InvalidInput;
  switch (r.violations.front().kind) {
    case ViolationKind::Interval: kind = ErrorKind::IntervalViolation; break;
    case ViolationKind::Ordering: kind = ErrorKind::OrderingViolation; break;
    case ViolationKind::Endpoint: kind = ErrorKind::EndpointMismatch; break;
  }
  throw Error(kind, msg);
}

// ---------------------------------------------------------------------------
// ChannelDomain

std::vector<Point> ChannelDomain::outer_loop() const {
  std::vector<Point> loop;
  for (const Point& p : f1_.samples()) push_unique(loop, p);
  auto g = g1_.samples();
  for (auto it = g.rbegin(); it != g.rend(); ++it) push_unique(loop, *it);
  if (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
  return loop;
}

std::vector<Point> ChannelDomain::inner_loop() const {
  std::vector<Point> loop;
  for (const Point& p : g2_.samples()) push_unique(loop, p);
  auto f = f2_.samples();
  for (auto it = f.rbegin(); it != f.rend(); ++it) push_unique(loop, *it);
  if (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
  return loop;
}

Box ChannelDomain::bounding_box() const {
  Box box{a(), b(), f1_.samples().front().y, f1_.samples().front().y};
  auto extend = [&box](const BoundaryFunction& f) {
    for (const Point& p : f.samples()) {
      box.ymin = std::min(box.ymin, p.y);
      box.ymax = std::max(box.ymax, p.y);
    }
  };
  extend(g1_);
  extend(f1_);
  extend(f2_);
  extend(g2_);
  return box;
}

double ChannelDomain::min_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (double x : merged_abscissae(f1_, f2_, c(), d())) {
    gap = std::min(gap, f1_.interpolate(x) - f2_.interpolate(x));
  }
  return gap;
}

ChannelDomain stretch(const ChannelDomain& domain, StretchFactor H) {
  const double h = H.value();
  return DomainAccess::make(domain.outer_upper().stretched(h), domain.outer_lower().stretched(h),
                            domain.inner_upper().stretched(h), domain.inner_lower().stretched(h));
}

// ---------------------------------------------------------------------------
// Polygon helpers

double signed_area(std::span<const Point> loop) {
  const std::size_t n = loop.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = loop[i];
    const Point& q = loop[(i + 1) % n];
    acc += p.x * q.y - q.x * p.y;
  }
  return 0.5 * acc;
}

double distance_to_segment(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

namespace {

double orient(Point a, Point b, Point c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace

bool is_simple(std::span<const Point> loop) {
  const std::size_t n = loop.size();
  if (n < 3) return false;
  struct Seg {
    double xmin, xmax, ymin, ymax;
    std::size_t i;
  };
  std::vector<Seg> segs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = loop[i];
    const Point& q = loop[(i + 1) % n];
    if (p == q) return false;
    segs[i] = {std::min(p.x, q.x), std::max(p.x, q.x), std::min(p.y, q.y), std::max(p.y, q.y), i};
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& s, const Seg& t) { return s.xmin < t.xmin; });
  for (std::size_t k = 0; k < n; ++k) {
    const Seg& s = segs[k];
    for (std::size_t m = k + 1; m < n && segs[m].xmin <= s.xmax; ++m) {
      const Seg& t = segs[m];
      if (t.ymin > s.ymax || t.ymax < s.ymin) continue;
      const std::size_t i = s.i;
      const std::size_t j = t.i;
      const bool adjacent = (i + 1) % n == j || (j + 1) % n == i;
      const Point& a0 = loop[i];
      const Point& a1 = loop[(i + 1) % n];
      const Point& b0 = loop[j];
      const Point& b1 = loop[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share exactly one vertex; reject folding back onto each other.
        const Point shared = (i + 1) % n == j ? a1 : a0;
        const Point u = (i + 1) % n == j ? a0 : a1;
        const Point w = (i + 1) % n == j ? b1 : b0;
        if (orient(shared, u, w) == 0.0 &&
            (u.x - shared.x) * (w.x - shared.x) + (u.y - shared.y) * (w.y - shared.y) > 0.0) {
          return false;
        }
        continue;
      }
      if (segments_intersect(a0, a1, b0, b1)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Quadrilateral

Quadrilateral Quadrilateral::make(std::vector<Point> boundary, std::array<std::size_t, 4> marked,
                                  std::optional<Box> truncation) {
  const std::size_t n = boundary.size();
  if (n < 4) throw Error(ErrorKind::InvalidInput, "quadrilateral boundary needs >= 4 vertices");
  for (const Point& p : boundary) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::InvalidInput, "non-finite quadrilateral vertex");
    }
  }
  for (std::size_t k = 0; k < 4; ++k) {
    if (marked[k] >= n) throw Error(ErrorKind::InvalidInput, "marked index out of range");
    if (k > 0 && !(marked[k] > marked[k - 1])) {
      throw Error(ErrorKind::InvalidInput, "marked indices must increase along the boundary");
    }
  }
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t m = k + 1; m < 4; ++m) {
      if (boundary[marked[k]] == boundary[marked[m]]) {
        throw Error(ErrorKind::DegenerateArc, "two marked vertices coincide");
      }
    }
  }
  if (!is_simple(boundary)) {
    throw Error(ErrorKind::InvalidInput, "quadrilateral boundary is not a simple closed polyline");
  }
  const double area = signed_area(boundary);
  if (truncation) {
    if (!(area < 0.0)) {
      throw Error(ErrorKind::InvalidInput,
                  "truncated (exterior) quadrilateral boundary must run clockwise");
    }
    for (const Point& p : boundary) {
      if (!(p.x > truncation->xmin && p.x < truncation->xmax && p.y > truncation->ymin &&
            p.y < truncation->ymax)) {
        throw Error(ErrorKind::InvalidInput, "truncation box must strictly contain the boundary");
      }
    }
  } else if (!(area > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "quadrilateral boundary must be positively oriented");
  }
  Quadrilateral q;
  q.boundary_ = std::move(boundary);
  q.marked_ = marked;
  q.truncation_ = truncation;
  return q;
}

Quadrilateral Quadrilateral::conjugate() const {
  const std::size_t n = boundary_.size();
  const std::size_t shift = marked_[1];
  std::vector<Point> rotated(n);
  for (std::size_t i = 0; i < n; ++i) rotated[i] = boundary_[(i + shift) % n];
  Quadrilateral q;
  q.boundary_ = std::move(rotated);
  q.marked_ = {0, marked_[2] - shift, marked_[3] - shift, marked_[0] + n - shift};
  q.truncation_ = truncation_;
  return q;
}

Quadrilateral Quadrilateral::with_truncation(Box box) const {
  return make(boundary_, marked_, box);
}

double Quadrilateral::area() const {
  const double a = signed_area(boundary_);
  return truncation_ ? truncation_->area() + a : a;
}

Quadrilateral stretch(const Quadrilateral& q, StretchFactor H) {
  const double h = H.value();
  std::vector<Point> pts(q.boundary().begin(), q.boundary().end());
  for (Point& p : pts) p.x *= h;
  std::optional<Box> box = q.truncation();
  if (box) {
    box->xmin *= h;
    box->xmax *= h;
  }
  return Quadrilateral::make(std::move(pts), q.marked(), box);
}

// ---------------------------------------------------------------------------
// Split

Box truncation_box(const ChannelDomain& domain, double box_factor) {
  const Box bb = domain.bounding_box();
  const double half = box_factor * std::max(bb.width(), bb.height());
  const double cx = 0.5 * (bb.xmin + bb.xmax);
  const double cy = 0.5 * (bb.ymin + bb.ymax);
  return {cx - half, cx + half, cy - half, cy + half};
}

Split split_at_verticals(const ChannelDomain& domain, const SplitOptions& options) {
  const BoundaryFunction& g1 = domain.outer_upper();
  const BoundaryFunction& f1 = domain.outer_lower();
  const BoundaryFunction& f2 = domain.inner_upper();
  const BoundaryFunction& g2 = domain.inner_lower();
  const double c = domain.c();
  const double d = domain.d();

  const Point A{c, f1.interpolate(c)};
  const Point B{c, f2.samples().front().y};
  const Point C{d, f2.samples().back().y};
  const Point D{d, f1.interpolate(d)};
  if (!(A.y > B.y) || !(D.y > C.y)) {
    throw Error(ErrorKind::DegenerateStrip, "vertical cut has zero length");
  }

  // Q: A -> B -> f2 (left to right) -> C -> D -> f1 (right to left) -> A.
  std::vector<Point> qb;
  std::array<std::size_t, 4> qm{};
  qm[0] = 0;
  qb.push_back(A);
  qm[1] = qb.size();
  qb.push_back(B);
  for (const Point& p : f2.samples()) {
    if (p.x > c && p.x < d) qb.push_back(p);
  }
  qm[2] = qb.size();
  qb.push_back(C);
  qm[3] = qb.size();
  qb.push_back(D);
  {
    auto s = f1.samples();
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
      if (it->x > c && it->x < d) qb.push_back(*it);
    }
  }

  // P (clockwise around the union of both compacts and Q):
  // D -> C -> g2 (right to left) -> B -> A -> f1 (c down to a) -> g1 (a to b) -> f1 (b down to d).
  std::vector<Point> pb;
  std::array<std::size_t, 4> pm{};
  pm[0] = 0;
  pb.push_back(D);
  pm[1] = pb.size();
  pb.push_back(C);
  {
    auto s = g2.samples();
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
      if (it->x > c && it->x < d) push_unique(pb, *it);
    }
  }
  pm[2] = pb.size();
  pb.push_back(B);
  pm[3] = pb.size();
  pb.push_back(A);
  {
    auto s = f1.samples();
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
      if (it->x < c) push_unique(pb, *it);
    }
    for (const Point& p : g1.samples()) push_unique(pb, p);
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
      if (it->x > d) push_unique(pb, *it);
    }
  }
  while (pb.size() > 1 && pb.back() == pb.front()) pb.pop_back();

  return {Quadrilateral::make(std::move(qb), qm),
          Quadrilateral::make(std::move(pb), pm, truncation_box(domain, options.box_factor))};
}

// ---------------------------------------------------------------------------
// Fixtures

namespace fixtures {

ChannelDomain rectangle_frame() {
  constexpr double bevel = 0.02;
  ChannelDomainCandidate raw{
      BoundaryFunction::from_samples({{0.0, 1.0}, {bevel, 1.5}, {1.0 - bevel, 1.5}, {1.0, 1.0}}),
      BoundaryFunction::from_samples({{0.0, 1.0}, {1.0, 1.0}}),
      BoundaryFunction::from_samples({{0.0, 0.0}, {1.0, 0.0}}),
      BoundaryFunction::from_samples({{0.0, 0.0}, {bevel, -0.5}, {1.0 - bevel, -0.5}, {1.0, 0.0}}),
      Interval{0.0, 1.0},
      Interval{0.0, 1.0}};
  return require_valid(raw);
}

ChannelDomain lens_channel() {
  const std::size_t n = kDefaultSamples;
  const double a = -0.5;
  const double b = 1.5;
  std::vector<Point> f1;
  std::vector<Point> g1;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (i + 1 == n) ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double y = 1.0 + 0.3 * std::sin(std::numbers::pi * x);
    const double s = (x - a) / (b - a);
    const double bump = 2.4 * s * (1.0 - s) * (1.0 + 0.8 * s);
    f1.push_back({x, y});
    g1.push_back({x, (i == 0 || i + 1 == n) ? y : y + bump});
  }
  std::vector<Point> f2;
  std::vector<Point> g2;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (i + 1 == n) ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    f2.push_back({x, 0.0});
    g2.push_back({x, -0.9 * x * (1.0 - x) * (1.0 + x)});
  }
  ChannelDomainCandidate raw{BoundaryFunction::from_samples(std::move(g1)),
                             BoundaryFunction::from_samples(std::move(f1)),
                             BoundaryFunction::from_samples(std::move(f2)),
                             BoundaryFunction::from_samples(std::move(g2)),
                             Interval{a, b},
                             Interval{0.0, 1.0}};
  return require_valid(raw);
}

ChannelDomain tilted_strip() {
  ChannelDomainCandidate raw{BoundaryFunction::polynomial({1.0, 2.5, -1.5}, 0.0, 1.0),
                             BoundaryFunction::polynomial({1.0, 1.0}, 0.0, 1.0),
                             BoundaryFunction::polynomial({0.0}, 0.0, 1.0),
                             BoundaryFunction::semicircle_arc(0.5, 0.0, 0.5, false, 0.0, 1.0),
                             Interval{0.0, 1.0},
                             Interval{0.0, 1.0}};
  return require_valid(raw);
}

}  // namespace fixtures

}  // namespace confmod::geometry
