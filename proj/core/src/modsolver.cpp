#include "confmod/modsolver.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "confmod/error.hpp"

namespace confmod::modsolver {

using geometry::ChannelDomain;
using geometry::Quadrilateral;

namespace {

struct Segment {
  Point p;
  Point q;
  EdgeLabel label;
};

struct Crossing {
  double pos;
  EdgeLabel label;
};

using CrossingLists = std::vector<std::vector<Crossing>>;

std::vector<Segment> segments_of(const CondenserGeometry& g) {
  std::vector<Segment> out;
  for (const LabeledLoop& loop : g.loops) {
    const std::size_t n = loop.points.size();
    if (n < 3 || loop.labels.size() != n) {
      throw Error(ErrorKind::InvalidInput, "loop needs >= 3 points and one label per edge");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Point p = loop.points[i];
      const Point q = loop.points[(i + 1) % n];
      if (p == q) continue;
      out.push_back({p, q, loop.labels[i]});
    }
  }
  return out;
}

// Crossings of every segment with the lines {y = lines[k]} (horizontal) or
// {x = lines[k]}. Half-open in the line-normal coordinate so a vertex on a line
// is counted once, or twice or never when both edges leave on the same side.
CrossingLists crossings_on_lines(std::span<const Segment> segs, std::span<const double> lines,
                                 bool horizontal) {
  CrossingLists out(lines.size());
  for (const Segment& s : segs) {
    const double pn = horizontal ? s.p.y : s.p.x;
    const double qn = horizontal ? s.q.y : s.q.x;
    const double pt = horizontal ? s.p.x : s.p.y;
    const double qt = horizontal ? s.q.x : s.q.y;
    if (pn == qn) continue;
    const double lo = std::min(pn, qn);
    const double hi = std::max(pn, qn);
    auto first = std::lower_bound(lines.begin(), lines.end(), lo);
    auto last = std::lower_bound(lines.begin(), lines.end(), hi);
    for (auto it = first; it != last; ++it) {
      const double t = (*it - pn) / (qn - pn);
      const double pos = pt + t * (qt - pt);
      out[static_cast<std::size_t>(it - lines.begin())].push_back({pos, s.label});
    }
  }
  for (auto& list : out) {
    std::sort(list.begin(), list.end(),
              [](const Crossing& u, const Crossing& v) { return u.pos < v.pos; });
  }
  return out;
}

bool is_dirichlet(EdgeLabel l) { return l != EdgeLabel::Neumann; }

// Portion of [lo, hi] on a line that is not cut away by outside intervals with a
// Neumann end. Outside intervals bounded only by Dirichlet crossings stay open.
double aperture(std::span<const Crossing> list, double lo, double hi) {
  double clipped = 0.0;
  const std::size_t n = list.size();
  for (std::size_t k = 0; k <= n; k += 2) {
    const double a = k == 0 ? -std::numeric_limits<double>::infinity() : list[k - 1].pos;
    const double b = k == n ? std::numeric_limits<double>::infinity() : list[k].pos;
    const bool neumann = (k > 0 && list[k - 1].label == EdgeLabel::Neumann) ||
                         (k < n && list[k].label == EdgeLabel::Neumann);
    if (!neumann) continue;
    const double overlap = std::min(b, hi) - std::max(a, lo);
    if (overlap > 0.0) clipped += overlap;
  }
  return std::max(0.0, (hi - lo) - clipped);
}

// Portion of [lo, hi] inside the region (odd-numbered intervals).
double inside_length(std::span<const Crossing> list, double lo, double hi) {
  double len = 0.0;
  for (std::size_t k = 1; k < list.size(); k += 2) {
    const double overlap = std::min(list[k].pos, hi) - std::max(list[k - 1].pos, lo);
    if (overlap > 0.0) len += overlap;
  }
  return len;
}

// Crossings strictly between positions u < v (shrunk by tol).
std::span<const Crossing> between(std::span<const Crossing> list, double u, double v, double tol) {
  auto cmp = [](const Crossing& c, double x) { return c.pos < x; };
  auto first = std::lower_bound(list.begin(), list.end(), u + tol, cmp);
  auto last = std::lower_bound(list.begin(), list.end(), v - tol, cmp);
  if (last < first) last = first;
  return {first, last};
}

std::vector<double> midpoints(std::span<const double> v) {
  std::vector<double> m(v.size() - 1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) m[i] = 0.5 * (v[i] + v[i + 1]);
  return m;
}

double lower_face(std::span<const double> v, std::size_t i) {
  return i == 0 ? v[0] : 0.5 * (v[i - 1] + v[i]);
}
double upper_face(std::span<const double> v, std::size_t i) {
  return i + 1 == v.size() ? v[i] : 0.5 * (v[i] + v[i + 1]);
}

Box bbox_of(std::span<const Point> pts) {
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Point& p : pts) {
    b.xmin = std::min(b.xmin, p.x);
    b.xmax = std::max(b.xmax, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.ymax = std::max(b.ymax, p.y);
  }
  return b;
}

double grid_tolerance(const GridAxes& axes) {
  const double extent = std::max(axes.xs.back() - axes.xs.front(), axes.ys.back() - axes.ys.front());
  const double scale = std::max({extent, std::abs(axes.xs.front()), std::abs(axes.xs.back()),
                                 std::abs(axes.ys.front()), std::abs(axes.ys.back())});
  return 1e-10 * scale;
}

// Per-node boundary flags: bit 0 Neumann, bit 1 Dirichlet-0, bit 2 Dirichlet-1.
std::vector<std::uint8_t> boundary_flags(std::span<const Segment> segs, const GridAxes& axes,
                                         double tol) {
  const std::size_t nx = axes.xs.size();
  std::vector<std::uint8_t> flags(axes.nodes(), 0);
  for (const Segment& s : segs) {
    const double x0 = std::min(s.p.x, s.q.x) - tol;
    const double x1 = std::max(s.p.x, s.q.x) + tol;
    const double y0 = std::min(s.p.y, s.q.y) - tol;
    const double y1 = std::max(s.p.y, s.q.y) + tol;
    const auto i0 = static_cast<std::size_t>(
        std::lower_bound(axes.xs.begin(), axes.xs.end(), x0) - axes.xs.begin());
    const auto i1 = static_cast<std::size_t>(
        std::upper_bound(axes.xs.begin(), axes.xs.end(), x1) - axes.xs.begin());
    const auto j0 = static_cast<std::size_t>(
        std::lower_bound(axes.ys.begin(), axes.ys.end(), y0) - axes.ys.begin());
    const auto j1 = static_cast<std::size_t>(
        std::upper_bound(axes.ys.begin(), axes.ys.end(), y1) - axes.ys.begin());
    const std::uint8_t bit = s.label == EdgeLabel::Neumann      ? 1
                             : s.label == EdgeLabel::Dirichlet0 ? 2
                                                                : 4;
    for (std::size_t j = j0; j < j1; ++j) {
      for (std::size_t i = i0; i < i1; ++i) {
        if (geometry::distance_to_segment({axes.xs[i], axes.ys[j]}, s.p, s.q) <= tol) {
          flags[j * nx + i] |= bit;
        }
      }
    }
  }
  return flags;
}

bool inside_by_parity(std::span<const Crossing> row, double x) {
  auto cmp = [](const Crossing& c, double v) { return c.pos < v; };
  const auto count = std::lower_bound(row.begin(), row.end(), x, cmp) - row.begin();
  return count % 2 == 1;
}

// Union-find over node ids.
struct Components {
  std::vector<std::uint32_t> parent;

  explicit Components(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Jacobi-preconditioned CG from x; returns iterations, updates x and residual.
int jacobi_pcg(const SpMat& A, const Vec& b, Vec& x, double tol, int max_iters, double& rel_res) {
  const Vec dinv = A.diagonal().cwiseInverse();
  Vec r = b - A * x;
  const double bnorm = std::max(b.norm(), std::numeric_limits<double>::min());
  rel_res = r.norm() / bnorm;
  if (rel_res <= tol) return 0;
  Vec z = dinv.cwiseProduct(r);
  Vec p = z;
  double rz = r.dot(z);
  int it = 0;
  while (it < max_iters) {
    const Vec Ap = A * p;
    const double alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    ++it;
    rel_res = r.norm() / bnorm;
    if (rel_res <= tol) break;
    z = dinv.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return it;
}

}  // namespace

// ---------------------------------------------------------------------------
// Geometry adapters

std::vector<Point> circle_polyline(Point center, double radius, std::size_t n) {
  if (!(radius > 0.0) || n < 8) throw Error(ErrorKind::InvalidInput, "circle needs r > 0, n >= 8");
  std::vector<Point> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    pts[k] = {center.x + radius * std::cos(t), center.y + radius * std::sin(t)};
  }
  return pts;
}

RingPolylines annulus_polylines(double r, double R, std::size_t n) {
  if (!(r > 0.0) || !(R > r)) {
    throw Error(ErrorKind::NonpositiveOrUnorderedRadii, "annulus radii must satisfy 0 < r < R");
  }
  return {circle_polyline({0.0, 0.0}, R, n), circle_polyline({0.0, 0.0}, r, n)};
}

CondenserGeometry condenser_for(const RingPolylines& ring) {
  CondenserGeometry g;
  g.loops.push_back({ring.outer, std::vector<EdgeLabel>(ring.outer.size(), EdgeLabel::Dirichlet0)});
  g.loops.push_back({ring.inner, std::vector<EdgeLabel>(ring.inner.size(), EdgeLabel::Dirichlet1)});
  g.bounds = bbox_of(ring.outer);
  return g;
}

CondenserGeometry condenser_for(const ChannelDomain& domain, const Box& box) {
  CondenserGeometry g;
  const std::vector<Point> walls = box.loop();
  g.loops.push_back({walls, std::vector<EdgeLabel>(walls.size(), EdgeLabel::Neumann), true});
  std::vector<Point> upper = domain.outer_loop();
  std::vector<Point> lower = domain.inner_loop();
  g.loops.push_back({upper, std::vector<EdgeLabel>(upper.size(), EdgeLabel::Dirichlet0)});
  g.loops.push_back({lower, std::vector<EdgeLabel>(lower.size(), EdgeLabel::Dirichlet1)});
  g.bounds = box;
  return g;
}

CondenserGeometry condenser_for(const Quadrilateral& q) {
  CondenserGeometry g;
  const auto pts = q.boundary();
  const auto& m = q.marked();
  LabeledLoop loop{{pts.begin(), pts.end()}, std::vector<EdgeLabel>(pts.size(), EdgeLabel::Neumann)};
  for (std::size_t i = m[0]; i < m[1]; ++i) loop.labels[i] = EdgeLabel::Dirichlet0;
  for (std::size_t i = m[2]; i < m[3]; ++i) loop.labels[i] = EdgeLabel::Dirichlet1;
  if (q.truncation()) {
    const std::vector<Point> walls = q.truncation()->loop();
    g.loops.push_back({walls, std::vector<EdgeLabel>(walls.size(), EdgeLabel::Neumann), true});
    g.bounds = *q.truncation();
  } else {
    g.bounds = bbox_of(pts);
  }
  g.loops.push_back(std::move(loop));
  return g;
}

// ---------------------------------------------------------------------------
// Axes

double AxisPlan::spacing(double x) const {
  double s = max_size > 0.0 ? max_size : (hi - lo) / 8.0;
  for (const SizeSource& src : sources) {
    const double dist = std::max(0.0, std::abs(x - src.center) - src.half_extent);
    s = std::min(s, src.size + (growth - 1.0) * dist);
  }
  return s;
}

std::vector<double> build_axis(const AxisPlan& plan, int level) {
  if (!(plan.hi > plan.lo)) throw Error(ErrorKind::InvalidInput, "axis needs lo < hi");
  if (level < 0 || level > 12) throw Error(ErrorKind::InvalidInput, "grid level out of range");
  const double extent = plan.hi - plan.lo;
  std::vector<double> knots{plan.lo, plan.hi};
  for (double k : plan.knots) {
    if (k > plan.lo && k < plan.hi) knots.push_back(k);
  }
  std::sort(knots.begin(), knots.end());
  std::vector<double> merged;
  for (double k : knots) {
    if (merged.empty() || k - merged.back() > 1e-9 * extent) merged.push_back(k);
  }
  merged.back() = plan.hi;

  std::vector<double> coarse;
  for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
    const double k0 = merged[k];
    const double k1 = merged[k + 1];
    double x = k0;
    coarse.push_back(x);
    for (;;) {
      const double s0 = plan.spacing(x);
      const double s = std::min(s0, plan.spacing(std::min(x + s0, k1)));
      if (k1 - x <= 1.5 * s) break;
      x += s;
      coarse.push_back(x);
    }
  }
  coarse.push_back(plan.hi);

  const std::size_t parts = std::size_t{1} << level;
  std::vector<double> out;
  out.reserve((coarse.size() - 1) * parts + 1);
  for (std::size_t k = 0; k + 1 < coarse.size(); ++k) {
    const double step = (coarse[k + 1] - coarse[k]) / static_cast<double>(parts);
    for (std::size_t p = 0; p < parts; ++p) out.push_back(coarse[k] + step * static_cast<double>(p));
  }
  out.push_back(plan.hi);
  return out;
}

GridAxes build_axes(const GridPlan& plan, int level) {
  return {build_axis(plan.x, level), build_axis(plan.y, level)};
}

namespace {

void prune_sources(std::vector<SizeSource>& sources, double growth) {
  std::sort(sources.begin(), sources.end(),
            [](const SizeSource& a, const SizeSource& b) { return a.size < b.size; });
  std::vector<SizeSource> kept;
  for (const SizeSource& s : sources) {
    bool dominated = false;
    if (s.half_extent == 0.0) {
      for (const SizeSource& k : kept) {
        const double dist = std::max(0.0, std::abs(s.center - k.center) - k.half_extent);
        if (k.size + (growth - 1.0) * dist <= s.size) {
          dominated = true;
          break;
        }
      }
    }
    if (!dominated) kept.push_back(s);
  }
  sources = std::move(kept);
}

double distance_to_segments(Point p, std::span<const Segment> segs) {
  double best = std::numeric_limits<double>::infinity();
  for (const Segment& s : segs) best = std::min(best, geometry::distance_to_segment(p, s.p, s.q));
  return best;
}

void finish_plan(GridPlan& plan, const Box& bounds, double growth) {
  plan.x.lo = bounds.xmin;
  plan.x.hi = bounds.xmax;
  plan.y.lo = bounds.ymin;
  plan.y.hi = bounds.ymax;
  plan.x.growth = plan.y.growth = growth;
  prune_sources(plan.x.sources, growth);
  prune_sources(plan.y.sources, growth);
}

}  // namespace

GridPlan generic_plan(const CondenserGeometry& geometry, double h0_override, double growth) {
  std::vector<Segment> d0;
  std::vector<Segment> d1;
  std::vector<Point> feature_pts;
  for (const LabeledLoop& loop : geometry.loops) {
    if (loop.wall) continue;
    const std::size_t n = loop.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Segment s{loop.points[i], loop.points[(i + 1) % n], loop.labels[i]};
      if (s.label == EdgeLabel::Dirichlet0) d0.push_back(s);
      if (s.label == EdgeLabel::Dirichlet1) d1.push_back(s);
      feature_pts.push_back(loop.points[i]);
    }
  }
  if (d0.empty() || d1.empty()) {
    throw Error(ErrorKind::InvalidInput, "condenser needs both Dirichlet-0 and Dirichlet-1 edges");
  }
  const Box fb = bbox_of(feature_pts);
  double feature = std::min(fb.width(), fb.height());
  if (!(feature > 0.0)) feature = std::max(fb.width(), fb.height());

  struct Sized {
    Point p;
    double size;
  };
  std::vector<Sized> sized;
  for (const LabeledLoop& loop : geometry.loops) {
    if (loop.wall) continue;
    const Box lb = bbox_of(loop.points);
    const double diameter = std::max(lb.width(), lb.height());
    const std::size_t n = loop.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point p = loop.points[i];
      const EdgeLabel in = loop.labels[(i + n - 1) % n];
      const EdgeLabel out = loop.labels[i];
      double s = std::min(feature, diameter);
      if (in == EdgeLabel::Dirichlet0 || out == EdgeLabel::Dirichlet0) {
        s = std::min(s, distance_to_segments(p, d1));
      }
      if (in == EdgeLabel::Dirichlet1 || out == EdgeLabel::Dirichlet1) {
        s = std::min(s, distance_to_segments(p, d0));
      }
      if (!(s > 0.0)) throw Error(ErrorKind::ComponentsTouch, "electrodes touch");
      sized.push_back({p, s / 16.0});
    }
  }
  double h0 = std::numeric_limits<double>::infinity();
  for (const Sized& s : sized) h0 = std::min(h0, s.size);
  const double scale = h0_override > 0.0 ? h0_override / h0 : 1.0;

  GridPlan plan;
  plan.h0 = h0 * scale;
  for (const Sized& s : sized) {
    plan.x.sources.push_back({s.p.x, 0.0, s.size * scale});
    plan.y.sources.push_back({s.p.y, 0.0, s.size * scale});
  }
  for (const LabeledLoop& loop : geometry.loops) {
    if (loop.wall) continue;
    const std::size_t n = loop.points.size();
    for (std::size_t i = 0; i < n; ++i) {
      const bool label_change = loop.labels[(i + n - 1) % n] != loop.labels[i];
      if (n <= 64 || label_change) {
        plan.x.knots.push_back(loop.points[i].x);
        plan.y.knots.push_back(loop.points[i].y);
      }
    }
  }
  finish_plan(plan, geometry.bounds, growth);
  return plan;
}

namespace {

// Endpoints and sharp turns of a boundary polyline.
void corner_points(const geometry::BoundaryFunction& f, std::vector<Point>& out) {
  const auto s = f.samples();
  out.push_back(s.front());
  out.push_back(s.back());
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double a0 = std::atan2(s[i].y - s[i - 1].y, s[i].x - s[i - 1].x);
    const double a1 = std::atan2(s[i + 1].y - s[i].y, s[i + 1].x - s[i].x);
    if (std::abs(a1 - a0) > 0.3) out.push_back(s[i]);
  }
}

}  // namespace

GridPlan channel_plan(const ChannelDomain& domain, const Box& bounds, double h0_override,
                      double growth) {
  const double gap = domain.min_gap();
  const double h0 = h0_override > 0.0 ? h0_override : gap / 16.0;
  const double length = domain.d() - domain.c();
  const double coarsen = std::clamp(length / (4.0 * gap), 1.0, 16.0);
  const Box bb = domain.bounding_box();

  // Plate ends and cut endpoints are corner singularities; grade toward them.
  const double h_corner = h0 / 8.0;
  GridPlan plan;
  plan.h0 = h0;
  for (double x : {domain.a(), domain.b(), domain.c(), domain.d()}) {
    plan.x.sources.push_back({x, 0.0, h_corner});
  }
  for (const geometry::BoundaryFunction* f :
       {&domain.outer_lower(), &domain.inner_upper()}) {
    plan.y.sources.push_back({f->samples().front().y, 0.0, h_corner});
    plan.y.sources.push_back({f->samples().back().y, 0.0, h_corner});
  }
  plan.y.sources.push_back({domain.outer_lower().interpolate(domain.c()), 0.0, h_corner});
  plan.y.sources.push_back({domain.outer_lower().interpolate(domain.d()), 0.0, h_corner});
  plan.x.sources.push_back({0.5 * (bb.xmin + bb.xmax), 0.5 * bb.width(), h0 * coarsen});
  plan.y.sources.push_back({0.5 * (bb.ymin + bb.ymax), 0.5 * bb.height(), h0});

  std::vector<Point> corners;
  corner_points(domain.outer_upper(), corners);
  corner_points(domain.outer_lower(), corners);
  corner_points(domain.inner_upper(), corners);
  corner_points(domain.inner_lower(), corners);
  for (const Point& p : corners) {
    plan.x.knots.push_back(p.x);
    plan.y.knots.push_back(p.y);
    plan.x.sources.push_back({p.x, 0.0, h0});
  }
  plan.y.knots.push_back(domain.outer_lower().interpolate(domain.c()));
  plan.y.knots.push_back(domain.outer_lower().interpolate(domain.d()));
  finish_plan(plan, bounds, growth);
  return plan;
}

// ---------------------------------------------------------------------------
// GridCondenser

GridCondenser::GridCondenser(const CondenserGeometry& geometry, GridAxes axes)
    : axes_(std::move(axes)) {
  const auto& xs = axes_.xs;
  const auto& ys = axes_.ys;
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  if (nx < 2 || ny < 2) throw Error(ErrorKind::InvalidInput, "grid needs >= 2 lines per axis");
  if (axes_.nodes() >= std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::InvalidInput, "grid too large");
  }
  const std::vector<Segment> segs = segments_of(geometry);
  const double tol = grid_tolerance(axes_);
  const std::vector<double> xm = midpoints(xs);
  const std::vector<double> ym = midpoints(ys);
  const CrossingLists rows = crossings_on_lines(segs, ys, true);
  const CrossingLists cols = crossings_on_lines(segs, xs, false);
  const CrossingLists row_mid = crossings_on_lines(segs, ym, true);
  const CrossingLists col_mid = crossings_on_lines(segs, xm, false);

  const std::vector<std::uint8_t> flags = boundary_flags(segs, axes_, tol);
  kinds_.assign(axes_.nodes(), NodeKind::Exterior);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t id = j * nx + i;
      const std::uint8_t f = flags[id];
      if ((f & 2) && (f & 4)) {
        throw Error(ErrorKind::ComponentsTouch, "node lies on both electrodes");
      }
      if (f & 2) {
        kinds_[id] = NodeKind::Dirichlet0;
      } else if (f & 4) {
        kinds_[id] = NodeKind::Dirichlet1;
      } else if ((f & 1) || inside_by_parity(rows[j], xs[i])) {
        kinds_[id] = NodeKind::Free;
      }
    }
  }

  struct RawLink {
    std::uint32_t a;
    std::uint32_t b;  // node id, or npos for boundary links
    double weight;
    std::int8_t value;
  };
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<RawLink> raw;
  raw.reserve(2 * axes_.nodes());
  std::vector<std::uint8_t> ghost(axes_.nodes(), 0);

  auto dirichlet_value = [](NodeKind k) -> std::int8_t { return k == NodeKind::Dirichlet0 ? 0 : 1; };
  auto value_of = [](EdgeLabel l) -> std::int8_t { return l == EdgeLabel::Dirichlet0 ? 0 : 1; };

  // Pair along one grid line; positions u < v, crossings strictly inside.
  auto link_pair = [&](std::uint32_t ia, std::uint32_t ib, double u, double v,
                       std::span<const Crossing> cross, double face) {
    const NodeKind ka = kinds_[ia];
    const NodeKind kb = kinds_[ib];
    const double len = v - u;
    if (!(face > 0.0)) return;
    auto boundary_link = [&](std::uint32_t node, const Crossing& c, double dist) {
      if (!is_dirichlet(c.label)) return;
      const double delta = std::max(dist, 1e-4 * len);
      raw.push_back({node, kNone, face / delta, value_of(c.label)});
    };
    const bool fa = ka == NodeKind::Free;
    const bool fb = kb == NodeKind::Free;
    if (cross.empty()) {
      if (fa && fb) {
        raw.push_back({ia, ib, face / len, -1});
      } else if (fa && kb != NodeKind::Exterior) {
        raw.push_back({ia, kNone, face / len, dirichlet_value(kb)});
      } else if (fb && ka != NodeKind::Exterior) {
        raw.push_back({ib, kNone, face / len, dirichlet_value(ka)});
      } else if (ka != NodeKind::Exterior && kb != NodeKind::Exterior && !fa && !fb &&
                 ka != kb) {
        throw Error(ErrorKind::ComponentsTouch, "adjacent grid nodes carry both electrode values");
      }
      return;
    }
    // A single Neumann wall between a free node and an exterior one: the exterior
    // node becomes a ghost unknown so the flux through the wetted face survives.
    if (cross.size() == 1 && cross.front().label == EdgeLabel::Neumann) {
      if (fa && kb == NodeKind::Exterior) {
        ghost[ib] = 1;
        raw.push_back({ia, ib, face / len, -1});
        return;
      }
      if (fb && ka == NodeKind::Exterior) {
        ghost[ia] = 1;
        raw.push_back({ib, ia, face / len, -1});
        return;
      }
    }
    if (fa) boundary_link(ia, cross.front(), cross.front().pos - u);
    if (fb) boundary_link(ib, cross.back(), v - cross.back().pos);
  };

  for (std::size_t j = 0; j < ny; ++j) {
    const double ylo = lower_face(ys, j);
    const double yhi = upper_face(ys, j);
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const auto ia = static_cast<std::uint32_t>(j * nx + i);
      const auto ib = ia + 1;
      if (kinds_[ia] != NodeKind::Free && kinds_[ib] != NodeKind::Free) {
        if (kinds_[ia] == NodeKind::Exterior || kinds_[ib] == NodeKind::Exterior) continue;
      }
      const auto cross = between(rows[j], xs[i], xs[i + 1], tol);
      const double face = aperture(col_mid[i], ylo, yhi);
      link_pair(ia, ib, xs[i], xs[i + 1], cross, face);
    }
  }
  for (std::size_t i = 0; i < nx; ++i) {
    const double xlo = lower_face(xs, i);
    const double xhi = upper_face(xs, i);
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      const auto ia = static_cast<std::uint32_t>(j * nx + i);
      const auto ib = static_cast<std::uint32_t>((j + 1) * nx + i);
      if (kinds_[ia] != NodeKind::Free && kinds_[ib] != NodeKind::Free) {
        if (kinds_[ia] == NodeKind::Exterior || kinds_[ib] == NodeKind::Exterior) continue;
      }
      const auto cross = between(cols[i], ys[j], ys[j + 1], tol);
      const double face = aperture(row_mid[j], xlo, xhi);
      link_pair(ia, ib, ys[j], ys[j + 1], cross, face);
    }
  }

  // Links among ghosts (and from ghosts to electrode nodes) carry the part of
  // their dual face that lies inside the region.
  auto ghost_pair = [&](std::uint32_t ia, std::uint32_t ib, double len,
                        std::span<const Crossing> cross, std::span<const Crossing> dual,
                        double lo, double hi) {
    const bool ga = ghost[ia] != 0;
    const bool gb = ghost[ib] != 0;
    if (!(ga || gb) || !cross.empty()) return;
    const NodeKind ka = kinds_[ia];
    const NodeKind kb = kinds_[ib];
    const bool da = ka == NodeKind::Dirichlet0 || ka == NodeKind::Dirichlet1;
    const bool db = kb == NodeKind::Dirichlet0 || kb == NodeKind::Dirichlet1;
    if (!((ga && gb) || (ga && db) || (gb && da))) return;
    const double wet = inside_length(dual, lo, hi);
    if (!(wet > 0.0)) return;
    if (ga && gb) {
      raw.push_back({ia, ib, wet / len, -1});
    } else if (ga) {
      raw.push_back({ia, kNone, wet / len, dirichlet_value(kb)});
    } else {
      raw.push_back({ib, kNone, wet / len, dirichlet_value(ka)});
    }
  };
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const auto ia = static_cast<std::uint32_t>(j * nx + i);
      if (!ghost[ia] && !ghost[ia + 1]) continue;
      ghost_pair(ia, ia + 1, xs[i + 1] - xs[i], between(rows[j], xs[i], xs[i + 1], tol),
                 col_mid[i], lower_face(ys, j), upper_face(ys, j));
    }
  }
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      const auto ia = static_cast<std::uint32_t>(j * nx + i);
      const auto ib = static_cast<std::uint32_t>((j + 1) * nx + i);
      if (!ghost[ia] && !ghost[ib]) continue;
      ghost_pair(ia, ib, ys[j + 1] - ys[j], between(cols[i], ys[j], ys[j + 1], tol),
                 row_mid[j], lower_face(xs, i), upper_face(xs, i));
    }
  }

  // Free components without electrode contact carry no energy; drop them.
  Components comp(axes_.nodes());
  for (const RawLink& l : raw) {
    if (l.value < 0) comp.unite(l.a, l.b);
  }
  std::vector<std::uint8_t> grounded(axes_.nodes(), 0);
  for (const RawLink& l : raw) {
    if (l.value >= 0) grounded[comp.find(l.a)] = 1;
  }
  unknown_of_.assign(axes_.nodes(), kNone);
  for (std::size_t id = 0; id < axes_.nodes(); ++id) {
    const bool unknown = kinds_[id] == NodeKind::Free || ghost[id];
    if (unknown && grounded[comp.find(static_cast<std::uint32_t>(id))]) {
      unknown_of_[id] = static_cast<std::uint32_t>(n_free_++);
    }
  }
  links_.reserve(raw.size());
  for (const RawLink& l : raw) {
    const std::uint32_t ua = unknown_of_[l.a];
    if (ua == kNone) continue;
    links_.push_back({ua, l.value < 0 ? unknown_of_[l.b] : 0u, l.weight, l.value});
  }
}

SolveStats GridCondenser::solve(Backend backend, double tol, int max_iters) const {
  SolveStats stats;
  stats.unknowns = n_free_;
  bool has0 = false;
  bool has1 = false;
  for (const Link& l : links_) {
    has0 = has0 || l.value == 0;
    has1 = has1 || l.value == 1;
  }
  if (!has0 || !has1) {
    throw Error(ErrorKind::InvalidInput,
                "the region does not connect the two electrodes on this grid");
  }
  const auto n = static_cast<Eigen::Index>(n_free_);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * links_.size());
  Vec rhs = Vec::Zero(n);
  for (const Link& l : links_) {
    trip.emplace_back(l.a, l.a, l.weight);
    if (l.value < 0) {
      trip.emplace_back(l.b, l.b, l.weight);
      trip.emplace_back(l.a, l.b, -l.weight);
      trip.emplace_back(l.b, l.a, -l.weight);
    } else if (l.value == 1) {
      rhs[l.a] += l.weight;
    }
  }
  SpMat A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  const int cap = max_iters > 0
                      ? max_iters
                      : static_cast<int>(std::ceil(50.0 * std::sqrt(static_cast<double>(n))));
  Vec u = Vec::Zero(n);
  if (backend == Backend::Cholesky) {
    Eigen::CholmodSupernodalLLT<SpMat, Eigen::Lower> chol;
    chol.compute(A);
    if (chol.info() != Eigen::Success) {
      throw Error(ErrorKind::SolverDivergence, "sparse Cholesky factorization failed");
    }
    u = chol.solve(rhs);
    stats.iterations = jacobi_pcg(A, rhs, u, tol, cap, stats.residual);
  } else {
    stats.iterations = jacobi_pcg(A, rhs, u, tol, cap, stats.residual);
  }
  if (!(stats.residual <= tol)) {
    throw Error(ErrorKind::SolverDivergence,
                "relative residual " + std::to_string(stats.residual) + " after " +
                    std::to_string(stats.iterations) + " iterations");
  }

  double energy = constant_energy_;
  for (const Link& l : links_) {
    const double other = l.value < 0 ? u[l.b] : static_cast<double>(l.value);
    const double du = u[l.a] - other;
    energy += l.weight * du * du;
  }
  stats.energy = energy;
  return stats;
}

// ---------------------------------------------------------------------------
// Ladder and extrapolation

RichardsonResult richardson(std::span<const RawValue> raw) {
  if (raw.size() < 3) throw Error(ErrorKind::InvalidInput, "richardson needs >= 3 entries");
  for (std::size_t i = 1; i < raw.size(); ++i) {
    if (!(raw[i].h < raw[i - 1].h) || !(raw[i].h > 0.0)) {
      throw Error(ErrorKind::InvalidInput, "richardson needs strictly decreasing positive h");
    }
  }
  const RawValue& e1 = raw[raw.size() - 3];
  const RawValue& e2 = raw[raw.size() - 2];
  const RawValue& e3 = raw[raw.size() - 1];
  const double d1 = e1.value - e2.value;
  const double d2 = e2.value - e3.value;
  RichardsonResult out;
  if (d1 == 0.0 && d2 == 0.0) {
    out.extrapolated = e3.value;
    return out;
  }
  auto fallback = [&] {
    out.extrapolated = e3.value;
    out.error_estimate = std::abs(d2);
    out.fitted_order = 0.0;
    out.fallback = true;
    return out;
  };
  if (!(d1 * d2 > 0.0)) return fallback();
  const double ratio = d1 / d2;
  auto model = [&](double p) {
    return (std::pow(e1.h, p) - std::pow(e2.h, p)) / (std::pow(e2.h, p) - std::pow(e3.h, p));
  };
  constexpr double kMinOrder = 0.5;
  constexpr double kMaxOrder = 10.0;
  double p = 0.0;
  const double q1 = e1.h / e2.h;
  const double q2 = e2.h / e3.h;
  if (std::abs(q1 - q2) <= 1e-12 * q1) {
    p = std::log(ratio) / std::log(q1);
  } else {
    double lo = kMinOrder;
    double hi = kMaxOrder;
    if (ratio < model(lo) || ratio > model(hi)) return fallback();
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (model(mid) < ratio ? lo : hi) = mid;
    }
    p = 0.5 * (lo + hi);
  }
  if (!(p >= kMinOrder && p <= kMaxOrder)) return fallback();
  const double C = d2 / (std::pow(e2.h, p) - std::pow(e3.h, p));
  out.extrapolated = e3.value - C * std::pow(e3.h, p);
  out.error_estimate = std::abs(out.extrapolated - e3.value);
  out.fitted_order = p;
  return out;
}

ModulusEstimate modulus_on_ladder(const CondenserGeometry& geometry, const GridPlan& plan,
                                  const SolverOptions& options) {
  if (options.levels < 1) throw Error(ErrorKind::InvalidInput, "grid.levels must be >= 1");
  ModulusEstimate est;
  for (int level = 0; level < options.levels; ++level) {
    const GridCondenser grid(geometry, build_axes(plan, level));
    const SolveStats stats = grid.solve(options.backend, options.cg_tol, options.cg_max_iters);
    if (!(stats.energy > 0.0)) {
      throw Error(ErrorKind::InvalidInput, "zero condenser energy: electrodes are not coupled");
    }
    est.raw.push_back({plan.h0 / static_cast<double>(1 << level), 1.0 / stats.energy});
    est.iterations = stats.iterations;
    est.residual = stats.residual;
    est.unknowns = stats.unknowns;
  }
  if (est.raw.size() >= 3) {
    const RichardsonResult r = richardson(est.raw);
    est.extrapolated = r.extrapolated;
    est.error_estimate = r.error_estimate;
    est.fitted_order = r.fitted_order;
  } else {
    est.extrapolated = est.raw.back().value;
    est.error_estimate =
        est.raw.size() == 2 ? std::abs(est.raw[1].value - est.raw[0].value) : 0.0;
  }
  est.value = est.extrapolated;
  return est;
}

ModulusEstimate ring_modulus(const RingPolylines& ring, const SolverOptions& options) {
  const CondenserGeometry g = condenser_for(ring);
  return modulus_on_ladder(g, generic_plan(g, options.h0, options.growth), options);
}

ModulusEstimate ring_modulus(const ChannelDomain& domain, const SolverOptions& options) {
  const Box box = geometry::truncation_box(domain, options.box_factor);
  const CondenserGeometry g = condenser_for(domain, box);
  return modulus_on_ladder(g, channel_plan(domain, box, options.h0, options.growth), options);
}

ModulusEstimate annulus_ring_modulus(double r, double R, const SolverOptions& options) {
  return ring_modulus(annulus_polylines(r, R), options);
}

ModulusEstimate quad_modulus(const Quadrilateral& q, const SolverOptions& options) {
  const CondenserGeometry g = condenser_for(q);
  return modulus_on_ladder(g, generic_plan(g, options.h0, options.growth), options);
}

ModulusEstimate conjugate_modulus(const Quadrilateral& q, const SolverOptions& options) {
  return quad_modulus(q.conjugate(), options);
}

ChannelModuli channel_moduli(const ChannelDomain& domain, double H, const SolverOptions& options) {
  const ChannelDomain stretched = geometry::stretch(domain, geometry::StretchFactor(H));
  double factor = options.box_factor;
  auto p_condenser = [&](double f) {
    const geometry::Split split = geometry::split_at_verticals(stretched, {f});
    return condenser_for(split.p);
  };
  auto coarse_p = [&](double f) {
    const Box box = geometry::truncation_box(stretched, f);
    SolverOptions coarse = options;
    coarse.levels = 1;
    return modulus_on_ladder(p_condenser(f), channel_plan(stretched, box, options.h0,
                                                          options.growth),
                             coarse)
        .raw.front()
        .value;
  };
  if (options.expand_box) {
    double current = coarse_p(factor);
    for (int k = 0; k < 6; ++k) {
      const double next = coarse_p(2.0 * factor);
      factor *= 2.0;
      if (std::abs(next - current) < 0.005 * std::abs(next)) break;
      current = next;
    }
  }

  ChannelModuli out;
  out.box_factor = factor;
  out.box = geometry::truncation_box(stretched, factor);
  const geometry::Split split = geometry::split_at_verticals(stretched, {factor});
  const GridPlan outer_plan = channel_plan(stretched, out.box, options.h0, options.growth);
  out.omega = modulus_on_ladder(condenser_for(stretched, out.box), outer_plan, options);
  const CondenserGeometry qg = condenser_for(split.q);
  out.q = modulus_on_ladder(qg, channel_plan(stretched, qg.bounds, options.h0, options.growth),
                            options);
  out.p = modulus_on_ladder(condenser_for(split.p), outer_plan, options);
  return out;
}

// ---------------------------------------------------------------------------
// Resistor network

double resistor_network_modulus(const CondenserGeometry& geometry, const GridAxes& axes) {
  const auto& xs = axes.xs;
  const auto& ys = axes.ys;
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  if (nx < 2 || ny < 2) throw Error(ErrorKind::InvalidInput, "grid needs >= 2 lines per axis");
  const std::vector<Segment> segs = segments_of(geometry);
  const double tol = grid_tolerance(axes);
  const std::vector<double> ym = midpoints(ys);
  const std::vector<double> xm = midpoints(xs);
  const CrossingLists mid_rows = crossings_on_lines(segs, ym, true);
  const CrossingLists rows = crossings_on_lines(segs, ys, true);

  // Included cells and the conductance of every grid edge they touch.
  std::vector<double> gh((nx - 1) * ny, 0.0);  // edge (i,j)-(i+1,j)
  std::vector<double> gv(nx * (ny - 1), 0.0);  // edge (i,j)-(i,j+1)
  std::vector<std::uint8_t> used(nx * ny, 0);
  std::vector<std::uint8_t> full(nx * ny, 0);  // count of included incident cells
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      if (!inside_by_parity(mid_rows[j], xm[i])) continue;
      const double dx = xs[i + 1] - xs[i];
      const double dy = ys[j + 1] - ys[j];
      gh[j * (nx - 1) + i] += dy / (2.0 * dx);
      gh[(j + 1) * (nx - 1) + i] += dy / (2.0 * dx);
      gv[j * nx + i] += dx / (2.0 * dy);
      gv[j * nx + i + 1] += dx / (2.0 * dy);
      for (std::size_t id : {j * nx + i, j * nx + i + 1, (j + 1) * nx + i, (j + 1) * nx + i + 1}) {
        used[id] = 1;
        ++full[id];
      }
    }
  }

  // Node labels: -1 free, 0/1 electrode.
  std::vector<std::int8_t> label(nx * ny, -1);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t id = j * nx + i;
      if (!used[id]) continue;
      const bool rim = full[id] < 4;
      const bool inside = inside_by_parity(rows[j], xs[i]);
      if (!rim && inside) continue;
      const Point p{xs[i], ys[j]};
      double best = std::numeric_limits<double>::infinity();
      EdgeLabel nearest = EdgeLabel::Neumann;
      for (const Segment& s : segs) {
        const double dist = geometry::distance_to_segment(p, s.p, s.q);
        if (dist < best) {
          best = dist;
          nearest = s.label;
        }
      }
      // Rim nodes within half a local cell of an electrode snap onto it.
      double cell = std::numeric_limits<double>::infinity();
      if (i > 0) cell = std::min(cell, xs[i] - xs[i - 1]);
      if (i + 1 < nx) cell = std::min(cell, xs[i + 1] - xs[i]);
      if (j > 0) cell = std::min(cell, ys[j] - ys[j - 1]);
      if (j + 1 < ny) cell = std::min(cell, ys[j + 1] - ys[j]);
      if (inside && best > std::max(tol, 0.5 * cell)) continue;
      if (nearest == EdgeLabel::Dirichlet0) label[id] = 0;
      if (nearest == EdgeLabel::Dirichlet1) label[id] = 1;
    }
  }

  // Connectivity between the electrodes through included edges.
  Components comp(nx * ny);
  auto for_each_edge = [&](auto&& fn) {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        const double g = gh[j * (nx - 1) + i];
        if (g > 0.0) fn(j * nx + i, j * nx + i + 1, g);
      }
    }
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) {
        const double g = gv[j * nx + i];
        if (g > 0.0) fn(j * nx + i, (j + 1) * nx + i, g);
      }
    }
  };
  for_each_edge([&](std::size_t a, std::size_t b, double) {
    if (label[a] < 0 && label[b] < 0) comp.unite(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
  });
  std::vector<std::uint8_t> touches(nx * ny, 0);  // bit 0: electrode 0, bit 1: electrode 1
  bool direct = false;
  for_each_edge([&](std::size_t a, std::size_t b, double) {
    if (label[a] >= 0 && label[b] < 0) touches[comp.find(static_cast<std::uint32_t>(b))] |= 1 << label[a];
    if (label[b] >= 0 && label[a] < 0) touches[comp.find(static_cast<std::uint32_t>(a))] |= 1 << label[b];
    if (label[a] >= 0 && label[b] >= 0 && label[a] != label[b]) direct = true;
  });
  bool connected = direct;
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> unknown(nx * ny, kNone);
  std::uint32_t n = 0;
  for (std::size_t id = 0; id < nx * ny; ++id) {
    if (!used[id] || label[id] >= 0) continue;
    const std::uint8_t t = touches[comp.find(static_cast<std::uint32_t>(id))];
    if (t == 3) connected = true;
    if (t != 0) unknown[id] = n++;
  }
  if (!connected) {
    throw Error(ErrorKind::DisconnectedGraph, "no conducting path between the electrodes");
  }

  std::vector<Eigen::Triplet<double>> trip;
  Vec rhs = Vec::Zero(n);
  for_each_edge([&](std::size_t a, std::size_t b, double g) {
    const std::uint32_t ua = unknown[a];
    const std::uint32_t ub = unknown[b];
    if (ua != kNone) trip.emplace_back(ua, ua, g);
    if (ub != kNone) trip.emplace_back(ub, ub, g);
    if (ua != kNone && ub != kNone) {
      trip.emplace_back(ua, ub, -g);
      trip.emplace_back(ub, ua, -g);
    } else if (ua != kNone && label[b] == 1) {
      rhs[ua] += g;
    } else if (ub != kNone && label[a] == 1) {
      rhs[ub] += g;
    }
  });
  Vec u = Vec::Zero(n);
  if (n > 0) {
    SpMat A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SpMat> ldlt(A);
    if (ldlt.info() != Eigen::Success) {
      throw Error(ErrorKind::SolverDivergence, "resistor network factorization failed");
    }
    u = ldlt.solve(rhs);
  }
  auto potential = [&](std::size_t id) {
    return label[id] >= 0 ? static_cast<double>(label[id]) : u[unknown[id]];
  };
  double conductance = 0.0;
  for_each_edge([&](std::size_t a, std::size_t b, double g) {
    const bool ka = label[a] >= 0 || unknown[a] != kNone;
    const bool kb = label[b] >= 0 || unknown[b] != kNone;
    if (!ka || !kb) return;
    const double du = potential(a) - potential(b);
    conductance += g * du * du;
  });
  if (!(conductance > 0.0)) {
    throw Error(ErrorKind::DisconnectedGraph, "zero effective conductance");
  }
  return 1.0 / conductance;
}

}  // namespace confmod::modsolver
