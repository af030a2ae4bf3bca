#pragma once

#include <string>
#include <vector>

#include "slice/lie_core.hpp"

namespace slice {

struct NamedResidual {
  std::string name;
  double value;
};

struct SplittingReport {
  std::vector<NamedResidual> residuals;
  /// True when the invariance algebra is zero and invariance checks were skipped.
  bool invariance_vacuous = true;
  double worst() const;
};

/// g = h + p + q_mu + k together with g.mu = h.mu + V_mu + W.
struct CoadjointSplitting {
  Subspace g_mu;
  Subspace h_mu;
  Subspace p;
  Subspace q_mu;
  Subspace k;
  Subspace orbit;       // g.mu, in g*
  Subspace h_mu_orbit;  // h.mu, in g*
  Subspace V_mu;
  Subspace W;
  BilinearForm omega_mu;
  SplittingReport invariance_report;

  /// p + q_mu + k, a complement of h.
  Subspace r(double rank_tol = kDefaultRankTol) const;
};

/// Tolerance for the direct-sum and isotropy checks that raise SplittingError.
inline constexpr double kSplittingTol = 1e-8;

CoadjointSplitting witt_artin_split(const LieAlgebra& g, const Vec& mu, const Subspace& h,
                                    const Subspace& gpx, double rank_tol = kDefaultRankTol);

SplittingReport verify_splitting(const CoadjointSplitting& sp, const LieAlgebra& g, const Vec& mu,
                                 const Subspace& h, const Subspace& gpx);

}  // namespace slice
