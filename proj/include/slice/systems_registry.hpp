#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "slice/g_manifold.hpp"
#include "slice/normal_space.hpp"

namespace slice {

using ParamMap = std::map<std::string, double>;

struct GoldenPoint {
  std::string label;
  ParamMap params;  // overrides of the system defaults
  Vec x;
  Vec p;
  /// Keys: g, h, r, S, g_mu, h_mu, p, q_mu, k, B, V, g_px.
  std::map<std::string, Index> dims;
  std::set<CaseFlag> flags;
  bool j_nonzero = false;
};

struct SystemDescriptor {
  std::string key;
  std::string description;
  ParamMap default_params;
  std::vector<GoldenPoint> golden_points;
};

/// Registered systems in a fixed order.
const std::vector<SystemDescriptor>& list_systems();
const SystemDescriptor& find_system(const std::string& key);

/// Builds the system; unknown parameter names or invalid values raise ConfigError.
/// Metric invariance is validated at a few sample points.
MechanicalGSystem instantiate(const std::string& key, const ParamMap& params = {},
                              NumericsConfig numerics = {});

/// Hat map R^3 -> so(3) matrices.
Eigen::Matrix3d hat(const Eigen::Vector3d& v);

}  // namespace slice
