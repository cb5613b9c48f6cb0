#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "confmod/geometry.hpp"
#include "confmod/modsolver.hpp"
#include "confmod/verify.hpp"

namespace confmod::config {

inline constexpr int kSchemaVersion = 1;

/// Parsed YAML domain/run config.
///
///   confmod_config: 1
///   fixture: lens_channel            # or the four boundary blocks below
///   outer: {upper: <fn>, lower: <fn>}
///   inner: {upper: <fn>, lower: <fn>}
///   interval_outer: [a, b]
///   interval_inner: [c, d]
///   grid: {h0: 0.0, levels: 3}
///   cg: {tol: 1e-10, max_iters: 0}
///   truncation: {box_factor: 8}
///   sweep: {H: [4, 8, 16, 32, 64]}
///   tolerances: {slack: 0.02, ratio_floor: 0.7, additivity_gain: 0.05, quadratic_bound: 0.1}
///   symmetric: false
///
/// <fn> is {kind: samples, points: [[x, y], ...]} or
/// {kind: builtin, name: polynomial, params: {coeffs: [...]}} or
/// {kind: builtin, name: semicircle_arc, params: {cx, cy, r, upper}}.
/// Builtins span the matching interval. Unknown keys are errors.
struct RunConfig {
  std::string source;
  std::string hash;  // FNV-1a of the file text
  std::optional<std::string> fixture;
  geometry::ChannelDomain domain;
  modsolver::SolverOptions solver;
  std::vector<double> H;
  verify::Tolerances tolerances;
};

/// Throws Error(Config) for schema problems and the validation error kinds
/// for domains outside the class.
RunConfig parse(std::string_view text, std::string source = "<string>");
RunConfig load(const std::filesystem::path& path);

/// rectangle_frame, lens_channel or tilted_strip; Error(Config) otherwise.
geometry::ChannelDomain fixture(std::string_view name);
bool fixture_is_symmetric(std::string_view name);

inline const std::vector<double> kDefaultLadder{4.0, 8.0, 16.0, 32.0, 64.0};

}  // namespace confmod::config
