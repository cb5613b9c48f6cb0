#include "confmod/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "confmod/error.hpp"

namespace confmod::config {

using geometry::BoundaryFunction;
using geometry::Interval;
using geometry::Point;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

void require_map(const YAML::Node& node, const std::string& where) {
  if (!node.IsMap()) fail(where + " must be a mapping");
}

void allow_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.contains(key)) fail("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) fail(where + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(where + " has the wrong type");
  }
}

std::vector<double> numbers(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) fail(where + " must be a list");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(scalar<double>(node[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Interval interval(const YAML::Node& node, const std::string& where) {
  const std::vector<double> v = numbers(node, where);
  if (v.size() != 2) fail(where + " must be [lo, hi]");
  return {v[0], v[1]};
}

BoundaryFunction function(const YAML::Node& node, const std::string& where,
                          const std::optional<Interval>& span) {
  require_map(node, where);
  const std::string kind = scalar<std::string>(node["kind"], where + ".kind");
  if (kind == "samples") {
    allow_keys(node, where, {"kind", "points"});
    const YAML::Node pts = node["points"];
    if (!pts.IsSequence()) fail(where + ".points must be a list of [x, y]");
    std::vector<Point> samples;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::vector<double> p = numbers(pts[i], where + ".points[" + std::to_string(i) + "]");
      if (p.size() != 2) fail(where + ".points entries must be [x, y]");
      samples.push_back({p[0], p[1]});
    }
    try {
      return BoundaryFunction::from_samples(std::move(samples));
    } catch (const Error& e) {
      fail(where + ": " + e.what());
    }
  }
  if (kind != "builtin") fail(where + ".kind must be 'samples' or 'builtin'");
  allow_keys(node, where, {"kind", "name", "params"});
  if (!span) fail(where + ": builtin functions need the matching interval_* key");
  const std::string name = scalar<std::string>(node["name"], where + ".name");
  const YAML::Node params = node["params"];
  require_map(params, where + ".params");
  if (name == "polynomial") {
    allow_keys(params, where + ".params", {"coeffs"});
    return BoundaryFunction::polynomial(numbers(params["coeffs"], where + ".params.coeffs"),
                                        span->lo, span->hi);
  }
  if (name == "semicircle_arc") {
    allow_keys(params, where + ".params", {"cx", "cy", "r", "upper"});
    const double cx = scalar<double>(params["cx"], where + ".params.cx");
    const double cy = scalar<double>(params["cy"], where + ".params.cy");
    const double r = scalar<double>(params["r"], where + ".params.r");
    const bool upper = scalar<bool>(params["upper"], where + ".params.upper");
    try {
      return BoundaryFunction::semicircle_arc(cx, cy, r, upper, span->lo, span->hi);
    } catch (const Error& e) {
      fail(where + ": " + e.what());
    }
  }
  fail(where + ".name must be 'polynomial' or 'semicircle_arc'");
}

void solver_options(const YAML::Node& root, modsolver::SolverOptions& s) {
  if (const YAML::Node grid = root["grid"]) {
    require_map(grid, "grid");
    allow_keys(grid, "grid", {"h0", "levels"});
    if (grid["h0"]) s.h0 = scalar<double>(grid["h0"], "grid.h0");
    if (grid["levels"]) s.levels = scalar<int>(grid["levels"], "grid.levels");
  }
  if (const YAML::Node cg = root["cg"]) {
    require_map(cg, "cg");
    allow_keys(cg, "cg", {"tol", "max_iters"});
    if (cg["tol"]) s.cg_tol = scalar<double>(cg["tol"], "cg.tol");
    if (cg["max_iters"]) s.cg_max_iters = scalar<int>(cg["max_iters"], "cg.max_iters");
  }
  if (const YAML::Node tr = root["truncation"]) {
    require_map(tr, "truncation");
    allow_keys(tr, "truncation", {"box_factor"});
    if (tr["box_factor"]) s.box_factor = scalar<double>(tr["box_factor"], "truncation.box_factor");
  }
  if (!(s.h0 >= 0.0)) fail("grid.h0 must be >= 0");
  if (s.levels < 1 || s.levels > 6) fail("grid.levels must be in 1..6");
  if (!(s.cg_tol > 0.0)) fail("cg.tol must be positive");
  if (s.cg_max_iters < 0) fail("cg.max_iters must be >= 0");
  if (!(s.box_factor > 0.0)) fail("truncation.box_factor must be positive");
}

}  // namespace

geometry::ChannelDomain fixture(std::string_view name) {
  if (name == "rectangle_frame") return geometry::fixtures::rectangle_frame();
  if (name == "lens_channel") return geometry::fixtures::lens_channel();
  if (name == "tilted_strip") return geometry::fixtures::tilted_strip();
  fail("unknown fixture '" + std::string(name) + "'");
}

bool fixture_is_symmetric(std::string_view name) { return name == "rectangle_frame"; }

RunConfig parse(std::string_view text, std::string source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    fail(source + ": " + e.what());
  }
  require_map(root, "config");
  allow_keys(root, "config",
             {"confmod_config", "fixture", "outer", "inner", "interval_outer", "interval_inner",
              "grid", "cg", "truncation", "sweep", "tolerances", "symmetric"});
  if (!root["confmod_config"]) fail("missing schema key confmod_config");
  if (scalar<int>(root["confmod_config"], "confmod_config") != kSchemaVersion) {
    fail("unsupported confmod_config version");
  }

  std::optional<std::string> fixture_name;
  bool symmetric = false;
  auto build_domain = [&]() -> geometry::ChannelDomain {
    const bool has_curves = root["outer"] || root["inner"];
    if (root["fixture"]) {
      if (has_curves || root["interval_outer"] || root["interval_inner"]) {
        fail("'fixture' cannot be combined with boundary curves");
      }
      fixture_name = scalar<std::string>(root["fixture"], "fixture");
      symmetric = fixture_is_symmetric(*fixture_name);
      return fixture(*fixture_name);
    }
    if (!root["outer"] || !root["inner"]) fail("config needs 'fixture' or both 'outer' and 'inner'");
    std::optional<Interval> outer_span;
    std::optional<Interval> inner_span;
    if (root["interval_outer"]) outer_span = interval(root["interval_outer"], "interval_outer");
    if (root["interval_inner"]) inner_span = interval(root["interval_inner"], "interval_inner");
    const YAML::Node outer = root["outer"];
    const YAML::Node inner = root["inner"];
    require_map(outer, "outer");
    require_map(inner, "inner");
    allow_keys(outer, "outer", {"upper", "lower"});
    allow_keys(inner, "inner", {"upper", "lower"});
    geometry::ChannelDomainCandidate raw{
        function(outer["upper"], "outer.upper", outer_span),
        function(outer["lower"], "outer.lower", outer_span),
        function(inner["upper"], "inner.upper", inner_span),
        function(inner["lower"], "inner.lower", inner_span), outer_span, inner_span};
    return geometry::require_valid(raw);
  };
  geometry::ChannelDomain domain = build_domain();
  if (root["symmetric"]) symmetric = scalar<bool>(root["symmetric"], "symmetric");

  modsolver::SolverOptions solver;
  solver_options(root, solver);

  std::vector<double> H = kDefaultLadder;
  if (const YAML::Node sw = root["sweep"]) {
    require_map(sw, "sweep");
    allow_keys(sw, "sweep", {"H"});
    if (sw["H"]) H = numbers(sw["H"], "sweep.H");
  }
  for (std::size_t i = 0; i < H.size(); ++i) {
    if (!(H[i] > 0.0) || (i > 0 && !(H[i] > H[i - 1]))) {
      fail("sweep.H must be positive and strictly increasing");
    }
  }

  verify::Tolerances tol;
  if (const YAML::Node t = root["tolerances"]) {
    require_map(t, "tolerances");
    allow_keys(t, "tolerances", {"slack", "ratio_floor", "additivity_gain", "quadratic_bound"});
    if (t["slack"]) tol.slack = scalar<double>(t["slack"], "tolerances.slack");
    if (t["ratio_floor"]) tol.ratio_floor = scalar<double>(t["ratio_floor"], "tolerances.ratio_floor");
    if (t["additivity_gain"]) {
      tol.additivity_gain = scalar<double>(t["additivity_gain"], "tolerances.additivity_gain");
    }
    if (t["quadratic_bound"]) {
      tol.quadratic_bound = scalar<double>(t["quadratic_bound"], "tolerances.quadratic_bound");
    }
  }
  tol.nonsymmetric = !symmetric;

  return RunConfig{std::move(source), verify::fnv1a_hex(text), std::move(fixture_name),
                   std::move(domain), solver, std::move(H), tol};
}

RunConfig load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

}  // namespace confmod::config
