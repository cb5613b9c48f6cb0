#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "confmod/analytic.hpp"
#include "confmod/config.hpp"
#include "confmod/error.hpp"
#include "confmod/geometry.hpp"
#include "confmod/modsolver.hpp"
#include "confmod/verify.hpp"

namespace confmod::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kOracleTolerance = 0.02;

struct Common {
  std::string domain;
  std::string H;
  double grid_h0 = -1.0;
  int levels = 0;
  double cg_tol = 0.0;
  std::string out;
  bool json = false;
  long seed = 0;  // reserved
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(flag + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError(flag + " needs a comma-separated list");
  return out;
}

void add_common(CLI::App* app, Common& c, bool with_domain = true) {
  if (with_domain) app->add_option("--domain", c.domain, "YAML domain config");
  app->add_option("--H", c.H, "stretch factor(s), comma-separated");
  app->add_option("--grid-h0", c.grid_h0, "coarsest grid spacing (0: automatic)");
  app->add_option("--levels", c.levels, "grid ladder length");
  app->add_option("--cg-tol", c.cg_tol, "relative residual tolerance");
  app->add_option("--out", c.out, "directory for CSV/JSON artifacts");
  app->add_flag("--json", c.json, "print JSON instead of text");
  app->add_option("--seed", c.seed, "reserved; every algorithm is deterministic");
}

config::RunConfig load_config(const Common& c) {
  if (c.domain.empty()) throw UsageError("--domain is required");
  config::RunConfig cfg = config::load(c.domain);
  if (c.grid_h0 >= 0.0) cfg.solver.h0 = c.grid_h0;
  if (c.levels != 0) {
    if (c.levels < 1 || c.levels > 6) throw UsageError("--levels must be in 1..6");
    cfg.solver.levels = c.levels;
  }
  if (c.cg_tol != 0.0) {
    if (!(c.cg_tol > 0.0)) throw UsageError("--cg-tol must be positive");
    cfg.solver.cg_tol = c.cg_tol;
  }
  if (!c.H.empty()) {
    cfg.H = parse_list(c.H, "--H");
    for (std::size_t i = 0; i < cfg.H.size(); ++i) {
      if (!(cfg.H[i] > 0.0) || (i > 0 && !(cfg.H[i] > cfg.H[i - 1]))) {
        throw UsageError("--H must be positive and strictly increasing");
      }
    }
  }
  return cfg;
}

modsolver::SolverOptions solver_from_flags(const Common& c) {
  modsolver::SolverOptions s;
  if (c.grid_h0 >= 0.0) s.h0 = c.grid_h0;
  if (c.levels != 0) {
    if (c.levels < 1 || c.levels > 6) throw UsageError("--levels must be in 1..6");
    s.levels = c.levels;
  }
  if (c.cg_tol != 0.0) s.cg_tol = c.cg_tol;
  return s;
}

double single_H(const config::RunConfig& cfg, const Common& c) {
  if (c.H.empty()) return 1.0;
  if (cfg.H.size() != 1) throw UsageError("this command takes a single --H value");
  return cfg.H.front();
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

json estimate_json(const modsolver::ModulusEstimate& e) {
  json raw = json::array();
  for (const modsolver::RawValue& r : e.raw) raw.push_back({{"h", r.h}, {"value", r.value}});
  return {{"value", e.value},
          {"error_estimate", e.error_estimate},
          {"fitted_order", e.fitted_order},
          {"raw", raw},
          {"unknowns", e.unknowns},
          {"iterations", e.iterations},
          {"residual", e.residual}};
}

std::string estimate_text(const modsolver::ModulusEstimate& e) {
  std::string s = num(e.value) + " +- " + num(e.error_estimate) + " (order " +
                  num(e.fitted_order) + "; raw";
  for (const modsolver::RawValue& r : e.raw) s += " " + num(r.value);
  return s + ")";
}

// Prints text or JSON and mirrors the JSON into <out>/<name>.json.
void emit(const Common& c, std::ostream& out, const std::string& name, const json& j,
          const std::string& text) {
  if (c.json) {
    out << j.dump(2) << '\n';
  } else {
    out << text;
  }
  if (!c.out.empty()) write_file(fs::path(c.out) / (name + ".json"), j.dump(2) + "\n");
}

std::pair<double, double> pair_of(const std::string& text, const std::string& flag) {
  const std::vector<double> v = parse_list(text, flag);
  if (v.size() != 2) throw UsageError(flag + " takes two numbers");
  return {v[0], v[1]};
}

// ---------------------------------------------------------------------------

int cmd_gamma(const Common& c, std::ostream& out) {
  const config::RunConfig cfg = load_config(c);
  const analytic::GammaValue g = analytic::gamma(cfg.domain);
  emit(c, out, "gamma", {{"gamma", g.value}, {"abs_error", g.abs_error_estimate}},
       "gamma " + num(g.value) + " (abs error " + num(g.abs_error_estimate) + ")\n");
  return kOk;
}

int cmd_modulus(const Common& c, const std::string& annulus, std::ostream& out) {
  if (!annulus.empty()) {
    if (!c.domain.empty()) throw UsageError("--annulus and --domain are exclusive");
    const auto [r, R] = pair_of(annulus, "--annulus");
    const double exact = analytic::annulus_modulus(r, R);
    const modsolver::ModulusEstimate e =
        modsolver::annulus_ring_modulus(r, R, solver_from_flags(c));
    json j = estimate_json(e);
    j["exact"] = exact;
    emit(c, out, "modulus", j,
         "annulus modulus " + estimate_text(e) + "\nexact " + num(exact) + "\n");
    return kOk;
  }
  const config::RunConfig cfg = load_config(c);
  const double H = single_H(cfg, c);
  const modsolver::ChannelModuli cm = modsolver::channel_moduli(cfg.domain, H, cfg.solver);
  const double gamma = analytic::gamma(cfg.domain).value;
  json j = estimate_json(cm.omega);
  j["H"] = H;
  j["box_factor"] = cm.box_factor;
  j["prediction"] = 1.0 / (gamma * H);
  emit(c, out, "modulus", j,
       "m(Omega_H) at H=" + num(H) + ": " + estimate_text(cm.omega) + "\n1/(gamma H) " +
           num(1.0 / (gamma * H)) + ", box factor " + num(cm.box_factor) + "\n");
  return kOk;
}

int cmd_quad(const Common& c, const std::string& rect, std::ostream& out) {
  std::optional<geometry::Quadrilateral> q;
  json j;
  std::string text;
  modsolver::SolverOptions opts;
  if (!rect.empty()) {
    if (!c.domain.empty()) throw UsageError("--rect and --domain are exclusive");
    const auto [w, h] = pair_of(rect, "--rect");
    if (!(w > 0.0) || !(h > 0.0)) throw UsageError("--rect needs positive sides");
    q = geometry::Quadrilateral::make({{0, 0}, {w, 0}, {w, h}, {0, h}}, {0, 1, 2, 3});
    opts = solver_from_flags(c);
    j["exact"] = h / w;
    text = "exact " + num(h / w) + "\n";
  } else {
    const config::RunConfig cfg = load_config(c);
    const double H = single_H(cfg, c);
    const geometry::ChannelDomain s = geometry::stretch(cfg.domain, geometry::StretchFactor(H));
    q = geometry::split_at_verticals(s).q;
    opts = cfg.solver;
    const double gH = analytic::gamma(cfg.domain).value * H;
    j["H"] = H;
    j["gamma_H"] = gH;
    text = "gamma H " + num(gH) + "\n";
  }
  const modsolver::ModulusEstimate m = modsolver::quad_modulus(*q, opts);
  const modsolver::ModulusEstimate mc = modsolver::conjugate_modulus(*q, opts);
  j["modulus"] = estimate_json(m);
  j["conjugate"] = estimate_json(mc);
  j["product"] = m.value * mc.value;
  emit(c, out, "quad", j,
       "m(Q) " + estimate_text(m) + "\nm(Q*) " + estimate_text(mc) + "\nproduct " +
           num(m.value * mc.value) + "\n" + text);
  return kOk;
}

verify::SweepOptions sweep_options(const config::RunConfig& cfg) {
  verify::SweepOptions o;
  o.solver = cfg.solver;
  return o;
}

int cmd_sweep(const Common& c, std::ostream& out) {
  const config::RunConfig cfg = load_config(c);
  const std::vector<verify::SweepRecord> rows = verify::sweep(cfg.domain, cfg.H, sweep_options(cfg));
  const std::string csv = verify::to_csv(rows);
  verify::VerificationReport report;
  report.records = rows;
  report.provenance = {cfg.source, cfg.hash, cfg.solver};
  if (c.json) {
    out << verify::to_json(report) << '\n';
  } else {
    out << csv;
  }
  if (!c.out.empty()) {
    write_file(fs::path(c.out) / "sweep.csv", csv);
    write_file(fs::path(c.out) / "sweep.json", verify::to_json(report) + "\n");
  }
  for (const verify::SweepRecord& r : rows) {
    if (!r.ok()) return kSolver;
  }
  return kOk;
}

int cmd_verify(const Common& c, std::ostream& out) {
  const config::RunConfig cfg = load_config(c);
  const std::vector<verify::SweepRecord> rows = verify::sweep(cfg.domain, cfg.H, sweep_options(cfg));
  verify::VerificationReport report = verify::check_theorem(rows, cfg.tolerances);
  report.provenance = {cfg.source, cfg.hash, cfg.solver};
  if (c.json) {
    out << verify::to_json(report) << '\n';
  } else {
    for (const verify::Verdict& v : report.verdicts) {
      out << (v.pass ? "PASS " : "FAIL ") << v.claim << " margin " << num(v.margin) << ": "
          << v.detail << '\n';
    }
  }
  if (!c.out.empty()) {
    write_file(fs::path(c.out) / "sweep.csv", verify::to_csv(rows));
    write_file(fs::path(c.out) / "report.json", verify::to_json(report) + "\n");
  }
  return report.all_pass() ? kOk : kVerificationFailure;
}

int cmd_oracle(const Common& c, const std::string& annulus, std::ostream& out) {
  modsolver::CondenserGeometry g;
  modsolver::GridPlan plan;
  modsolver::SolverOptions opts;
  json j;
  if (!annulus.empty()) {
    if (!c.domain.empty()) throw UsageError("--annulus and --domain are exclusive");
    const auto [r, R] = pair_of(annulus, "--annulus");
    analytic::annulus_modulus(r, R);  // radii check
    opts = solver_from_flags(c);
    g = modsolver::condenser_for(modsolver::annulus_polylines(r, R));
    plan = modsolver::generic_plan(g, opts.h0, opts.growth);
  } else {
    const config::RunConfig cfg = load_config(c);
    const double H = single_H(cfg, c);
    opts = cfg.solver;
    const geometry::ChannelDomain s = geometry::stretch(cfg.domain, geometry::StretchFactor(H));
    const geometry::Box box = geometry::truncation_box(s, opts.box_factor);
    g = modsolver::condenser_for(s, box);
    plan = modsolver::channel_plan(s, box, opts.h0, opts.growth);
    j["H"] = H;
  }
  std::string text;
  bool ok = true;
  j["levels"] = json::array();
  for (int level = 0; level < opts.levels; ++level) {
    const modsolver::GridAxes axes = modsolver::build_axes(plan, level);
    const modsolver::GridCondenser cond(g, axes);
    const double pde = 1.0 / cond.solve(opts.backend, opts.cg_tol, opts.cg_max_iters).energy;
    const double net = modsolver::resistor_network_modulus(g, axes);
    const double rel = (net - pde) / pde;
    ok = ok && std::abs(rel) <= kOracleTolerance;
    j["levels"].push_back({{"level", level}, {"pde", pde}, {"network", net}, {"rel", rel}});
    text += "level " + std::to_string(level) + ": pde " + num(pde) + " network " + num(net) +
            " rel " + num(rel) + "\n";
  }
  j["tolerance"] = kOracleTolerance;
  j["pass"] = ok;
  text += std::string(ok ? "PASS" : "FAIL") + " oracle agreement within " + num(kOracleTolerance) +
          "\n";
  emit(c, out, "oracle", j, text);
  return ok ? kOk : kVerificationFailure;
}

int cmd_maps(const Common& c, double M, double slope, std::ostream& out) {
  if (!(M > 0.0)) throw UsageError("--M must be positive");
  using analytic::Complex;
  json j;
  std::string text;
  bool ok = true;
  auto claim = [&](const std::string& name, double value, double limit, bool pass) {
    ok = ok && pass;
    j["claims"].push_back({{"claim", name}, {"value", value}, {"limit", limit}, {"pass", pass}});
    text += std::string(pass ? "PASS " : "FAIL ") + name + " " + num(value) + " (limit " +
            num(limit) + ")\n";
  };
  j["claims"] = json::array();
  claim("g(1)=0", std::abs(analytic::halfplane_to_U(M, 1.0)), 1e-12,
        std::abs(analytic::halfplane_to_U(M, 1.0)) <= 1e-12);
  const double gm1 = std::abs(analytic::halfplane_to_U(M, -1.0) - Complex(0.0, -M));
  claim("g(-1)=-iM", gm1, 1e-12, gm1 <= 1e-12);
  for (const Complex z : {Complex(1e6, 0.0), Complex(-1e6, 0.0), Complex(0.0, -1e6)}) {
    const double dev = std::abs(analytic::halfplane_to_U(M, z) * std::numbers::pi / (M * z) - 1.0);
    claim("g(z)pi/(Mz)-1 at z=" + num(z.real()) + (z.imag() < 0 ? "-1e6i" : ""), dev, 1e-5,
          dev < 1e-5);
  }
  double mu_err = 0.0;
  for (int i = 1; i <= 99; ++i) {
    const double r = i / 100.0;
    const double rc = std::sqrt((1.0 - r) * (1.0 + r));
    mu_err = std::max(mu_err, std::abs(analytic::grotzsch_mu(r) * analytic::grotzsch_mu(rc) /
                                           (std::numbers::pi * std::numbers::pi / 4.0) -
                                       1.0));
  }
  claim("mu(r)mu(r')=pi^2/4", mu_err, 1e-11, mu_err <= 1e-11);
  const double t = 1e6;
  const double teich =
      std::abs(2.0 * std::numbers::pi * analytic::teichmuller_modulus(t) / std::log(16.0 * t) - 1.0);
  claim("2pi mod(T_t)/log(16t)-1 at t=1e6", teich, 1e-3, teich < 1e-3);

  analytic::ShearParams p;
  p.a = {slope, slope, slope};
  const std::vector<double> Hs{1.0, 10.0, 100.0, 1000.0};
  const std::vector<verify::DilatationRow> rows = verify::dilatation_audit(p, Hs);
  j["dilatation"] = json::array();
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && !(rows[i].K < rows[i - 1].K)) monotone = false;
    j["dilatation"].push_back({{"H", rows[i].H}, {"k", rows[i].k}, {"K", rows[i].K}});
    text += "H " + num(rows[i].H) + ": k " + num(rows[i].k) + " K " + num(rows[i].K) + "\n";
  }
  claim("K(H) decreasing", monotone ? 1.0 : 0.0, 1.0, monotone);
  claim("K(1e3)<1.002", rows.back().K, 1.002, rows.back().K < 1.002);
  j["M"] = M;
  j["slope"] = slope;
  j["pass"] = ok;
  emit(c, out, "maps", j, text);
  if (!c.out.empty()) write_file(fs::path(c.out) / "dilatation.csv", verify::dilatation_csv(rows));
  return ok ? kOk : kVerificationFailure;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Io:
    case ErrorKind::IntervalViolation:
    case ErrorKind::OrderingViolation:
    case ErrorKind::EndpointMismatch:
    case ErrorKind::NonpositiveGap:
      return kConfig;
    case ErrorKind::InvalidInput:
    case ErrorKind::OutOfRange:
    case ErrorKind::NonpositiveOrUnorderedRadii:
    case ErrorKind::InsufficientSpan:
      return kUsage;
    default:
      return kSolver;
  }
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformal moduli of stretched channel domains", "confmod"};
  app.require_subcommand(1);
  Common c;
  std::string annulus;
  std::string rect;
  double M = 1.0;
  double slope = 2.0;

  CLI::App* gamma = app.add_subcommand("gamma", "integral of 1/(f1 - f2) over [c, d]");
  add_common(gamma, c);
  CLI::App* modulus = app.add_subcommand("modulus", "ring modulus of an annulus or a stretched domain");
  add_common(modulus, c);
  modulus->add_option("--annulus", annulus, "radii r,R");
  CLI::App* quad = app.add_subcommand("quad", "quadrilateral modulus and its conjugate");
  add_common(quad, c);
  quad->add_option("--rect", rect, "rectangle sides w,h");
  CLI::App* sweep = app.add_subcommand("sweep", "table of moduli over an H ladder");
  add_common(sweep, c);
  CLI::App* verify_cmd = app.add_subcommand("verify", "sweep and check every claim");
  add_common(verify_cmd, c);
  CLI::App* oracle = app.add_subcommand("oracle", "PDE solve against the resistor network");
  add_common(oracle, c);
  oracle->add_option("--annulus", annulus, "radii r,R");
  CLI::App* maps = app.add_subcommand("maps", "map identities, ring functions and dilatation");
  add_common(maps, c, false);
  maps->add_option("--M", M, "offset of the L-shaped region");
  maps->add_option("--slope", slope, "shear slope bound");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kUsage;
  }

  try {
    if (gamma->parsed()) return cmd_gamma(c, out);
    if (modulus->parsed()) return cmd_modulus(c, annulus, out);
    if (quad->parsed()) return cmd_quad(c, rect, out);
    if (sweep->parsed()) return cmd_sweep(c, out);
    if (verify_cmd->parsed()) return cmd_verify(c, out);
    if (oracle->parsed()) return cmd_oracle(c, annulus, out);
    if (maps->parsed()) return cmd_maps(c, M, slope, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kUsage;
}

}  // namespace confmod::cli
