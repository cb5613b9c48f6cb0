// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failing criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "confmod/analytic.hpp"
#include "confmod/geometry.hpp"
#include "confmod/modsolver.hpp"
#include "confmod/quadrature.hpp"
#include "confmod/verify.hpp"

using namespace confmod;
using analytic::Complex;
using geometry::ChannelDomain;
using geometry::Point;
using geometry::Quadrilateral;
using geometry::StretchFactor;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Fixture {
  const char* name;
  ChannelDomain domain;
  bool nonsymmetric;
};

const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> f{
      {"F1", geometry::fixtures::rectangle_frame(), false},
      {"F2", geometry::fixtures::lens_channel(), true},
      {"F3", geometry::fixtures::tilted_strip(), true},
  };
  return f;
}

const std::vector<double> kLadder{4, 8, 16, 32, 64};

// Sweeps are shared by criteria 4 to 8.
const std::vector<std::vector<verify::SweepRecord>>& sweeps() {
  static const std::vector<std::vector<verify::SweepRecord>> rows = [] {
    std::vector<std::vector<verify::SweepRecord>> out;
    for (const Fixture& f : fixtures()) {
      const auto t0 = std::chrono::steady_clock::now();
      out.push_back(verify::sweep(f.domain, kLadder));
      const double dt =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::printf("# sweep %s (%.1f s)\n", f.name, dt);
      for (const verify::SweepRecord& r : out.back()) {
        std::printf("#   H=%-3g ratio %.6f gap %.5f add %.6f m_Q %.5f gammaH %.5f m_P %.5f%s\n", r.H,
                    r.ratio, r.grotzsch_gap, r.additivity_ratio, r.m_Q, r.gamma * r.H, r.m_P,
                    r.ok() ? "" : (" error: " + *r.error).c_str());
      }
    }
    return out;
  }();
  return rows;
}

bool all_rows_ok(const std::vector<verify::SweepRecord>& rows) {
  for (const auto& r : rows) {
    if (!r.ok()) return false;
  }
  return true;
}

Outcome c1_annulus() {
  const auto t0 = std::chrono::steady_clock::now();
  const modsolver::ModulusEstimate e = modsolver::annulus_ring_modulus(1.0, 2.0);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double exact = std::log(2.0) / (2 * kPi);
  const double dev = std::abs(e.value - exact);
  return {dev <= 1e-3 && dt < 30.0,
          fmt("m=%.8f exact %.8f |dev| %.2e (est %.1e, p=%.2f), %.2f s", e.value, exact, dev,
              e.error_estimate, e.fitted_order, dt)};
}

Outcome c2_quads() {
  const Quadrilateral square = Quadrilateral::make({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {0, 1, 2, 3});
  const Quadrilateral rect = Quadrilateral::make({{0, 0}, {1, 0}, {1, 0.5}, {0, 0.5}}, {0, 1, 2, 3});
  const double ms = modsolver::quad_modulus(square).value;
  const double mr = modsolver::quad_modulus(rect).value;
  bool ok = std::abs(ms - 1.0) <= 1e-3 && std::abs(mr - 0.5) <= 1e-3;
  std::string detail = fmt("square %.6f, rect %.6f; m m* =", ms, mr);

  const std::vector<Quadrilateral> quads{
      square,
      rect,
      Quadrilateral::make({{0, 0}, {2, 0}, {1.5, 1}, {0.5, 1}}, {0, 1, 2, 3}),
      Quadrilateral::make({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, {0, 1, 2, 5}),
      geometry::split_at_verticals(geometry::fixtures::lens_channel()).q,
  };
  for (const Quadrilateral& q : quads) {
    const double p = modsolver::quad_modulus(q).value * modsolver::conjugate_modulus(q).value;
    ok = ok && std::abs(p - 1.0) <= 0.01;
    detail += fmt(" %.5f", p);
  }
  return {ok, detail};
}

Outcome c3_invariance() {
  bool ok = true;
  std::string detail;
  for (double rho : {1.5, 3.0}) {
    const double r = analytic::r_of_rho(rho);
    const modsolver::RingPolylines ring{modsolver::circle_polyline({0, 0}, 1.0),
                                        modsolver::circle_polyline({0, -r / 2}, r / 2)};
    const double a = modsolver::ring_modulus(ring).value;
    const double b = modsolver::annulus_ring_modulus(1.0, rho).value;
    const double rel = std::abs(a / b - 1.0);
    ok = ok && rel < 5e-3;
    detail += fmt("rho=%g: %.6f vs %.6f (rel %.1e) ", rho, a, b, rel);
  }
  return {ok, detail};
}

Outcome c4_bound() {
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < fixtures().size(); ++i) {
    double worst = -1e300;
    for (const auto& r : sweeps()[i]) {
      ok = ok && r.ok() && r.ratio <= 1.0 + r.eps_disc();
      worst = std::max(worst, r.ratio - 1.0 - r.eps_disc());
    }
    detail += fmt("%s max(ratio-1-eps) %.4f ", fixtures()[i].name, worst);
  }
  return {ok, detail};
}

Outcome c5_asymptotics() {
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < fixtures().size(); ++i) {
    const auto& rows = sweeps()[i];
    bool inc = all_rows_ok(rows);
    for (std::size_t k = 1; k < rows.size(); ++k) inc = inc && rows[k].ratio > rows[k - 1].ratio;
    const bool floor = rows.back().ratio >= 0.7;
    ok = ok && inc && floor;
    detail += fmt("%s %.4f->%.4f%s ", fixtures()[i].name, rows.front().ratio, rows.back().ratio,
                  inc ? "" : " (not increasing)");
  }
  return {ok, detail};
}

Outcome c6_grotzsch_lower() {
  bool ok = true;
  double min_gap = 1e300;
  double min_lower = 1e300;
  for (const auto& rows : sweeps()) {
    for (const auto& r : rows) {
      const double eps = r.eps_disc();
      const bool g = r.grotzsch_gap >= -(eps / r.m_omega + r.m_Q_err + r.m_P_err);
      const bool l = r.m_Q >= r.gamma * r.H * (1.0 - eps);
      ok = ok && r.ok() && g && l;
      min_gap = std::min(min_gap, r.grotzsch_gap);
      min_lower = std::min(min_lower, r.m_Q / (r.gamma * r.H) - 1.0);
    }
  }
  return {ok, fmt("min gap %.4f, min m_Q/(gamma H)-1 %.2e", min_gap, min_lower)};
}

Outcome c7_additivity() {
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < fixtures().size(); ++i) {
    const auto& rows = sweeps()[i];
    bool inc = all_rows_ok(rows);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      inc = inc && rows[k].additivity_ratio > rows[k - 1].additivity_ratio;
    }
    const double gain = rows.back().additivity_ratio - rows.front().additivity_ratio;
    const bool enough = !fixtures()[i].nonsymmetric || gain >= 0.05;
    ok = ok && inc && enough;
    detail += fmt("%s gain %.4f%s%s ", fixtures()[i].name, gain, inc ? "" : " (not increasing)",
                  enough ? "" : " (< 0.05)");
  }
  return {ok, detail};
}

Outcome c8_growth() {
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < fixtures().size(); ++i) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& r : sweeps()[i]) {
      if (!r.ok()) continue;
      x.push_back(std::log(r.H));
      y.push_back(r.m_P);
    }
    const double slope = verify::polyfit(x, y, 1)[1];
    const double quad = verify::polyfit(x, y, 2)[2];
    ok = ok && x.size() == kLadder.size() && slope > 0.0 && std::abs(quad) <= 0.1;
    detail += fmt("%s slope %.4f quad %.4f ", fixtures()[i].name, slope, quad);
  }
  return {ok, detail};
}

// Contour quadrature from 1 along the segment, w = 1 + s^2 (zeta - 1).
Complex g_quadrature(double M, Complex zeta) {
  const Complex dz = zeta - 1.0;
  auto f = [&](double s) { return std::sqrt(2.0 + s * s * dz); };
  return 2.0 * M / kPi * std::sqrt(dz) * quadrature::integrate(f, 0.0, 1.0, 1e-14).value;
}

Outcome c9_maps() {
  const double M = 1.0;
  const double g1 = std::abs(analytic::halfplane_to_U(M, 1.0));
  const double gm1 = std::abs(analytic::halfplane_to_U(M, -1.0) - Complex(0, -M));
  double asym = 0.0;
  for (const Complex z : {Complex(1e6, 0), Complex(-1e6, 0), Complex(0, -1e6),
                          std::polar(1e6, -kPi / 4), std::polar(1e6, -3 * kPi / 4)}) {
    asym = std::max(asym, std::abs(analytic::halfplane_to_U(M, z) * kPi / (M * z) - 1.0));
  }
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> re(-5.0, 5.0);
  std::uniform_real_distribution<double> im(-5.0, -0.05);
  double contour = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Complex z(re(rng), im(rng));
    contour = std::max(contour, std::abs(analytic::halfplane_to_U(M, z) - g_quadrature(M, z)));
  }
  return {g1 <= 1e-12 && gm1 <= 1e-12 && asym < 1e-5 && contour <= 1e-10,
          fmt("|g(1)| %.1e, |g(-1)+iM| %.1e, max |g pi/(M z)-1| at |z|=1e6 %.3e, contour %.1e",
              g1, gm1, asym, contour)};
}

Outcome c10_dilatation() {
  bool ok = true;
  std::string detail;
  for (double slope : {0.5, 1.0, 2.0}) {
    analytic::ShearParams p;
    p.a = {slope, -slope, slope};
    const std::vector<double> Hs{1, 10, 100, 1000};
    const auto rows = verify::dilatation_audit(p, Hs);
    bool dec = true;
    for (std::size_t k = 1; k < rows.size(); ++k) dec = dec && rows[k].K < rows[k - 1].K;
    ok = ok && dec && rows.back().K < 1.002;
    detail += fmt("a=%g K(1e3)=%.7f%s ", slope, rows.back().K, dec ? "" : " (not decreasing)");
  }
  return {ok, detail};
}

Outcome c11_teichmuller() {
  const double t = 1e6;
  const double dev = std::abs(2 * kPi * analytic::teichmuller_modulus(t) / std::log(16 * t) - 1.0);
  double mu = 0.0;
  for (int i = 1; i <= 99; ++i) {
    const double r = i / 100.0;
    const double rc = std::sqrt((1 - r) * (1 + r));
    mu = std::max(mu, std::abs(analytic::grotzsch_mu(r) * analytic::grotzsch_mu(rc) - kPi * kPi / 4));
  }
  return {dev < 1e-3 && mu <= 1e-11, fmt("|2pi mod/log(16t)-1| %.2e, mu identity %.1e", dev, mu)};
}

Outcome c12_oracle() {
  bool ok = true;
  double worst = 0.0;
  std::string detail;
  auto compare = [&](const char* name, const modsolver::CondenserGeometry& g,
                     const modsolver::GridPlan& plan) {
    double w = 0.0;
    for (int level = 0; level < 3; ++level) {
      const modsolver::GridAxes axes = modsolver::build_axes(plan, level);
      const double pde =
          1.0 / modsolver::GridCondenser(g, axes).solve(modsolver::Backend::Cholesky, 1e-10, 0).energy;
      const double net = modsolver::resistor_network_modulus(g, axes);
      w = std::max(w, std::abs(net / pde - 1.0));
    }
    ok = ok && w < 0.02;
    worst = std::max(worst, w);
    detail += fmt("%s %.2e ", name, w);
  };
  const auto annulus = modsolver::condenser_for(modsolver::annulus_polylines(1.0, 2.0));
  compare("annulus", annulus, modsolver::generic_plan(annulus));
  for (const Fixture& f : fixtures()) {
    const ChannelDomain s = geometry::stretch(f.domain, StretchFactor(4.0));
    const geometry::Box box = geometry::truncation_box(s, 8.0);
    const auto g = modsolver::condenser_for(s, box);
    compare(f.name, g, modsolver::channel_plan(s, box));
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"annulus anchor", c1_annulus},
      {"quadrilateral anchors and reciprocity", c2_quads},
      {"conformal invariance", c3_invariance},
      {"bound", c4_bound},
      {"asymptotics", c5_asymptotics},
      {"groetzsch and lower bound", c6_grotzsch_lower},
      {"additivity trend", c7_additivity},
      {"growth of m(P)", c8_growth},
      {"map identities", c9_maps},
      {"dilatation", c10_dilatation},
      {"teichmuller asymptotic", c11_teichmuller},
      {"oracle equivalence", c12_oracle},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed;
}
