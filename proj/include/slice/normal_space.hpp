#pragma once

#include <set>
#include <string>
#include <vector>

#include "slice/g_manifold.hpp"
#include "slice/witt_artin.hpp"

namespace slice {

/// Tangent vector to T*Q at p_x in I-representation coordinates:
/// xi_r and nu in the frame's r basis, a and beta in its S basis.
struct IRep {
  Vec xi_r;
  Vec a;
  Vec nu;
  Vec beta;

  Vec stacked() const;
  static IRep unstack(const Vec& v, Index dim_r, Index dim_s);
};

/// Everything point-local at (x, p_x). Subspaces of the slice (B and its
/// parts) are expressed in S coordinates, i.e. their ambient space is R^{dim S}.
struct PointData {
  PointFrame frame;
  Vec p_x;
  Vec mu;     // g*
  Vec alpha;  // values on the S basis
  Vec eta;    // r coordinates
  Vec s;      // S coordinates
  Subspace g_px;
  CoadjointSplitting splitting;
  Subspace h_s;          // h . s
  Subspace h_mu_s;       // h_mu . s
  Subspace B;            // (h_mu . s)^perp in S
  Subspace h_mu_s_perp;  // (h_mu . s)^perp inside h . s
  Subspace h_alpha_ann;  // [h . alpha]^0 = (h . s)^perp
  Mat pr1;               // S coordinates, projector onto h_mu_s_perp along h_alpha_ann

  Vec eta_algebra() const { return frame.r.basis() * eta; }
  Vec s_chart() const { return frame.S.basis() * s; }
  Index dim_r() const { return frame.r.dim(); }
  Index dim_s() const { return frame.S.dim(); }
};

/// Builds the frame with r = p + q_mu + k so that the splitting of g and the
/// I-representation share one complement of h.
PointData analyze_point(const MechanicalGSystem& system, const Vec& x, const Vec& p_x);

/// p_x = FL(eta_Q(x) + s) for eta in g and s a chart vector in the slice.
Vec covector_from_velocity(const MechanicalGSystem& system, const Vec& x, const Vec& eta,
                           const Vec& s);

/// Precomputed derivative data shared by the closed forms at one point.
class ClosedForms {
 public:
  ClosedForms(MechanicalGSystem system, PointData pd);

  const MechanicalGSystem& system() const { return system_; }
  const PointData& pd() const { return pd_; }

  /// Infinitesimal cotangent-lifted action of xi at p_x.
  IRep lifted_generator(const Vec& xi) const;
  /// f1(gamma, a) on the r basis; gamma in r coordinates, a in S coordinates.
  Vec f1(const Vec& gamma, const Vec& a) const;
  /// f2(gamma) on the S basis.
  Vec f2(const Vec& gamma) const;
  /// (D I . w) for w in S coordinates.
  Mat DI_slice(const Vec& w) const;
  const Mat& DI_eta_s() const { return di_eta_s_; }
  const Mat& C_s() const { return c_s_; }
  /// Slice representation of zeta in h on S coordinates.
  Mat rho(const Vec& zeta) const;

 private:
  MechanicalGSystem system_;
  PointData pd_;
  std::vector<Mat> di_slice_;  // D I . S_j
  Mat di_eta_s_;               // D I . (eta_Q + s)
  Mat c_s_;                    // C(s) on r x S
};

/// Span of the lifted generators of g_mu, in stacked I-representation coordinates.
Subspace g_mu_orbit_directions(const ClosedForms& cf);
/// Span of the lifted generators of all of g.
Subspace g_orbit_directions(const ClosedForms& cf);

/// <l diamond o, xi_a> = <o, rep[a] l> for each representation matrix rep[a].
Vec diamond(const Vec& l, const Vec& o, const std::vector<Mat>& rep);

/// j: h_mu_s_perp (S coordinates) -> k, matrix in the bases of the two subspaces.
LinearMapRep j_map(const ClosedForms& cf);

enum class CaseFlag {
  TotallyIsotropic,
  VerticalCovector,
  LocallyFree,
  TrivialSliceAction,
  HsubGmu,
  Generic
};
std::string to_string(CaseFlag f);

struct NormalSpaceResult {
  /// Columns: adapted basis of V in stacked I-representation coordinates,
  /// ordered q_mu block, B block, B* block.
  Mat V_basis;
  Subspace V;
  Index dim_N = 0;
  Index dim_B = 0;
  /// Symplectic form on the adapted basis.
  Mat omega;
  /// Expected block normal form Xi + [[0, I], [-I, 0]].
  Mat omega_expected;
  double block_residual = 0.0;
  /// Maps (N_mu, B, B*) coordinates to stacked I-representation coordinates.
  Mat iota;
  /// One symmetric matrix per g_px basis vector: <J_N(w), zeta> = w^T Q w.
  std::vector<Mat> JN_tensor;
  /// Linearized g_px action on V coordinates, one matrix per g_px basis vector.
  std::vector<Mat> gpx_action_V;
  std::set<CaseFlag> case_flags;
  LinearMapRep j{Subspace(0), Subspace(0), Mat(0, 0)};
  Mat B_star;  // columns: B* basis inside S* (values on the S basis)
};

/// Canonical form on stacked coordinates (xi_r, a; nu, beta).
Mat canonical_omega(Index dim_r, Index dim_s);

NormalSpaceResult build_normal_space(const ClosedForms& cf);

/// Closed-form J_N(w) on the g_px basis; w in V coordinates.
Vec momentum_JN(const NormalSpaceResult& ns, const Vec& w);
/// Same quantity as 1/2 omega(zeta . w, w).
Vec momentum_JN_from_action(const NormalSpaceResult& ns, const Vec& w);

/// Linearized action of zeta in g_px on stacked I-representation coordinates.
Mat gpx_action_stacked(const ClosedForms& cf, const Vec& zeta);

}  // namespace slice
