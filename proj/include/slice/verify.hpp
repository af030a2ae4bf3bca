#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "slice/normal_space.hpp"
#include "slice/oracles.hpp"
#include "slice/systems_registry.hpp"

namespace slice::verify {

using oracles::ResidualReport;

/// Full pipeline output at one point.
struct PointContext {
  std::string label;
  MechanicalGSystem system;
  Vec x;
  Vec p;
  ClosedForms cf;
  NormalSpaceResult ns;
  std::optional<GoldenPoint> golden;

  const PointData& pd() const { return cf.pd(); }
};

/// Runs analyze_point and build_normal_space. Throws NumericalError on failure.
std::shared_ptr<const PointContext> make_context(const MechanicalGSystem& system, const Vec& x,
                                                 const Vec& p, std::string label = "",
                                                 std::optional<GoldenPoint> golden = {});

Vec random_vector(std::mt19937_64& rng, Index n, double scale = 1.0);

// Individual checks. Sampled checks draw from a generator seeded with `seed`.
ResidualReport check_theorem_oracle(const PointContext& c);
ResidualReport check_normal_form(const PointContext& c);
ResidualReport check_dimension_law(const PointContext& c);
ResidualReport check_containment(const PointContext& c);
ResidualReport check_complementarity(const PointContext& c);
ResidualReport check_special_cases_j(const PointContext& c);
ResidualReport check_special_cases_B(const PointContext& c);
ResidualReport check_locked_inertia_equivariance(const PointContext& c, int samples,
                                                 std::uint64_t seed);
ResidualReport check_locked_inertia_infinitesimal(const PointContext& c, int samples,
                                                  std::uint64_t seed);
ResidualReport check_kks_welldefined(const PointContext& c, int samples, std::uint64_t seed);
ResidualReport check_kks_skew(const PointContext& c);
ResidualReport check_canonical_form(const PointContext& c, int samples, std::uint64_t seed);
ResidualReport check_momentum_JN(const PointContext& c, int samples, std::uint64_t seed);
ResidualReport check_equivariance_DI(const PointContext& c, int samples, std::uint64_t seed);
ResidualReport check_equivariance_C(const PointContext& c, int samples, std::uint64_t seed);
ResidualReport check_V_invariance(const PointContext& c);
ResidualReport check_covariant_cross(const PointContext& c, int samples, std::uint64_t seed);
ResidualReport check_generator_bracket(const PointContext& c, int samples, std::uint64_t seed);
ResidualReport check_split_roundtrip(const PointContext& c, int samples, std::uint64_t seed);
ResidualReport check_witt_artin(const PointContext& c);
ResidualReport check_metric_invariance(const PointContext& c);
ResidualReport check_jacobi(const PointContext& c);
ResidualReport check_frame_invariance(const PointContext& c);
ResidualReport check_inertia_kernel(const PointContext& c);
ResidualReport check_golden_dims(const PointContext& c);
ResidualReport check_golden_flags(const PointContext& c);

/// Dimension table of a computed point, keyed like GoldenPoint::dims.
std::map<std::string, Index> computed_dims(const PointContext& c);

struct SuiteOptions {
  int samples = 10;
  std::uint64_t seed = 1;
  std::optional<double> check_tol;
  unsigned threads = 1;
};

/// All checks at one point, sorted by name. Pipeline failures become a
/// failing "pipeline" report instead of an exception.
std::vector<ResidualReport> run_point_suite(const MechanicalGSystem& system, const Vec& x,
                                            const Vec& p, const SuiteOptions& opt,
                                            std::optional<GoldenPoint> golden = {});

/// Parallelism cap from SLICE_NUM_THREADS, defaulting to the hardware count.
unsigned thread_budget();

}  // namespace slice::verify
