#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slice/systems_registry.hpp"
#include "slice/verify.hpp"

namespace slice::report {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "slice-report/1";

struct NumericsOverrides {
  std::optional<double> fd_step;
  std::optional<double> mixed_step;
  std::optional<int> richardson_levels;
  std::optional<double> rank_tol;
  std::optional<double> check_tol;
  std::optional<bool> exact_derivatives;
};

struct RunConfig {
  std::string system;
  ParamMap params;
  /// Selects a registered golden point; supplies x, p and params not given explicitly.
  std::optional<std::string> golden;
  std::optional<Vec> x;
  std::optional<Vec> p;
  std::optional<Vec> eta;
  std::optional<Vec> s;
  NumericsOverrides numerics;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

/// Reads a TOML or JSON config (chosen by extension, .json or anything else as TOML).
RunConfig load_config(const std::string& path);
RunConfig config_from_json(const json& doc);
/// Fields set in `overrides` replace those in `base`; params are merged key by key.
RunConfig merge(RunConfig base, const RunConfig& overrides);

/// "1,2,3" or "[1, 2, 3]".
Vec parse_vector(const std::string& text);

NumericsConfig numerics_config(const NumericsOverrides& o);

struct ResolvedPoint {
  MechanicalGSystem system;
  Vec x;
  Vec p;
  std::string label;
  std::optional<GoldenPoint> golden;
};

/// Validates the config and builds the system and covector. Exactly one of
/// p or (eta, s) must be present; lengths must match the system.
ResolvedPoint resolve(const RunConfig& cfg);

/// Every golden point of every system, with default numerics overridden by `o`.
std::vector<ResolvedPoint> all_bundled(const NumericsOverrides& o);

json versions();
json numerics_json(const NumericsConfig& n, const NumericsOverrides& o);

json describe_json(const verify::PointContext& c, const NumericsOverrides& o);
std::string describe_text(const verify::PointContext& c);

struct VerifiedPoint {
  std::string system;
  std::string label;
  ParamMap params;
  Vec x;
  Vec p;
  std::vector<verify::ResidualReport> checks;
};

json verify_json(const std::vector<VerifiedPoint>& points, const NumericsOverrides& o);
std::string verify_text(const std::vector<VerifiedPoint>& points);

json list_json();
std::string list_text();

/// Throws NumericalError naming the first non-finite number in the document.
void ensure_finite(const json& doc);

}  // namespace slice::report
