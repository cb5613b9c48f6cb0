#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "confmod/geometry.hpp"

namespace confmod::modsolver {

using geometry::Box;
using geometry::Point;

enum class EdgeLabel : std::uint8_t { Neumann, Dirichlet0, Dirichlet1 };

/// Closed polyline; labels[i] applies to the edge from points[i] to points[i + 1]
/// (the last edge closes the loop).
struct LabeledLoop {
  std::vector<Point> points;
  std::vector<EdgeLabel> labels;
  bool wall = false;  // truncation box; ignored when sizing the grid
};

/// Region = even-odd interior of all loops, gridded over `bounds`.
struct CondenserGeometry {
  std::vector<LabeledLoop> loops;
  Box bounds;
};

/// Two nested closed polylines: u = 0 on `outer`, u = 1 on `inner`.
struct RingPolylines {
  std::vector<Point> outer;
  std::vector<Point> inner;
};

std::vector<Point> circle_polyline(Point center, double radius, std::size_t n = 4096);
RingPolylines annulus_polylines(double r, double R, std::size_t n = 4096);

CondenserGeometry condenser_for(const RingPolylines& ring);
/// Ring condenser of the channel domain truncated by `box` (Neumann walls):
/// u = 0 on the upper compact, u = 1 on the lower.
CondenserGeometry condenser_for(const geometry::ChannelDomain& domain, const Box& box);
/// u = 0 on arc z1z2, u = 1 on arc z3z4, Neumann elsewhere (and on the box walls).
CondenserGeometry condenser_for(const geometry::Quadrilateral& q);

// ---------------------------------------------------------------------------
// Graded tensor-product grids

/// Target spacing `size` on [center - half_extent, center + half_extent],
/// growing linearly with rate (growth - 1) away from it.
struct SizeSource {
  double center = 0.0;
  double half_extent = 0.0;
  double size = 0.0;
};

struct AxisPlan {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> knots;  // coordinates that must be grid lines
  std::vector<SizeSource> sources;
  double growth = 1.2;
  double max_size = 0.0;  // 0: (hi - lo) / 8

  double spacing(double x) const;
};

/// Coarse nodes march between knots with the planned spacing; level L bisects
/// every coarse interval L times.
std::vector<double> build_axis(const AxisPlan& plan, int level);

struct GridPlan {
  AxisPlan x;
  AxisPlan y;
  double h0 = 0.0;  // nominal coarsest spacing, reported as the ladder's h
};

struct GridAxes {
  std::vector<double> xs;
  std::vector<double> ys;

  std::size_t nodes() const { return xs.size() * ys.size(); }
};

GridAxes build_axes(const GridPlan& plan, int level);

/// Vertex-driven sizing: spacing near each Dirichlet vertex is 1/16 of its
/// distance to the other electrode (capped by the feature size).
/// `h0_override > 0` rescales every size so the finest source equals it.
GridPlan generic_plan(const CondenserGeometry& geometry, double h0_override = 0.0,
                      double growth = 1.2);

/// Sizing for a (stretched) channel domain gridded over `bounds`: h0 =
/// min gap / 16 across the channel and near the ends; along a long channel the
/// x spacing coarsens up to 16 h0.
GridPlan channel_plan(const geometry::ChannelDomain& domain, const Box& bounds,
                      double h0_override = 0.0, double growth = 1.2);

// ---------------------------------------------------------------------------
// Discrete condenser

enum class NodeKind : std::uint8_t { Exterior, Free, Dirichlet0, Dirichlet1 };

enum class Backend { Cholesky, JacobiCG };

struct SolveStats {
  double energy = 0.0;
  std::size_t unknowns = 0;
  int iterations = 0;
  double residual = 0.0;
};

/// Node classification and link weights of a condenser on a tensor grid.
///
/// Links crossing a Dirichlet edge use the Shortley-Weller distance to the
/// crossing; links crossing a Neumann edge are dropped and dual faces are
/// clipped where they leave the region through Neumann walls.
class GridCondenser {
 public:
  GridCondenser(const CondenserGeometry& geometry, GridAxes axes);

  const GridAxes& axes() const { return axes_; }
  std::span<const NodeKind> kinds() const { return kinds_; }
  std::size_t unknowns() const { return n_free_; }
  std::size_t link_count() const { return links_.size(); }

  /// Solves for the potential and returns the Dirichlet energy.
  SolveStats solve(Backend backend, double tol, int max_iters) const;

 private:
  struct Link {
    std::uint32_t a;  // free node (unknown index)
    std::uint32_t b;  // free unknown index, or unused for Dirichlet links
    double weight;
    std::int8_t value;  // -1: free-free, else the Dirichlet value (0 or 1)
  };

  GridAxes axes_;
  std::vector<NodeKind> kinds_;
  std::vector<std::uint32_t> unknown_of_;
  std::vector<Link> links_;
  double constant_energy_ = 0.0;
  std::size_t n_free_ = 0;
};

// ---------------------------------------------------------------------------
// Moduli

struct SolverOptions {
  double h0 = 0.0;  // 0: automatic
  int levels = 3;
  double cg_tol = 1e-10;
  int cg_max_iters = 0;  // 0: 50 sqrt(N)
  double box_factor = 8.0;
  bool expand_box = true;
  double growth = 1.2;
  Backend backend = Backend::Cholesky;
};

struct RawValue {
  double h = 0.0;
  double value = 0.0;
};

struct RichardsonResult {
  double extrapolated = 0.0;
  double error_estimate = 0.0;
  double fitted_order = 0.0;
  bool fallback = false;
};

/// Fits v(h) = v* + C h^p exactly through the last three entries. Data that
/// is not monotone with a consistent ratio (or gives p outside [0.5, 10])
/// falls back to the finest value with the last difference as error.
RichardsonResult richardson(std::span<const RawValue> raw);

struct ModulusEstimate {
  double value = 0.0;
  std::vector<RawValue> raw;  // decreasing h
  double extrapolated = 0.0;
  double error_estimate = 0.0;
  double fitted_order = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::size_t unknowns = 0;  // finest level
};

/// Runs the ladder plan(level) for level = 0..levels-1 and extrapolates 1/E.
ModulusEstimate modulus_on_ladder(const CondenserGeometry& geometry, const GridPlan& plan,
                                  const SolverOptions& options);

ModulusEstimate ring_modulus(const RingPolylines& ring, const SolverOptions& options = {});
ModulusEstimate ring_modulus(const geometry::ChannelDomain& domain,
                             const SolverOptions& options = {});
ModulusEstimate annulus_ring_modulus(double r, double R, const SolverOptions& options = {});
ModulusEstimate quad_modulus(const geometry::Quadrilateral& q, const SolverOptions& options = {});
ModulusEstimate conjugate_modulus(const geometry::Quadrilateral& q,
                                  const SolverOptions& options = {});

/// Moduli of a stretched channel domain and of both halves of its vertical
/// split, on grids sharing one sizing plan. The truncation box is doubled
/// until the coarsest m(P) changes by less than 0.5%.
struct ChannelModuli {
  ModulusEstimate omega;
  ModulusEstimate q;
  ModulusEstimate p;
  Box box;
  double box_factor = 0.0;
};

ChannelModuli channel_moduli(const geometry::ChannelDomain& domain, double H,
                             const SolverOptions& options = {});

/// Staircase resistor network: cells whose centre lies in the region carry
/// edge conductances dy/(2dx) and dx/(2dy); corner nodes outside the region
/// take the label of the nearest boundary edge (Neumann stays free). Returns
/// 1 / effective conductance between the two electrodes.
double resistor_network_modulus(const CondenserGeometry& geometry, const GridAxes& axes);

}  // namespace confmod::modsolver
