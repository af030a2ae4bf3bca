#include "slice/witt_artin.hpp"

#include <algorithm>
#include <cmath>

namespace slice {

namespace {

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double invariance_residual(const Subspace& sub, const Mat& op) {
  double worst = 0.0;
  for (Index a = 0; a < sub.dim(); ++a) worst = std::max(worst, sub.residual(op * sub.vector(a)));
  return worst;
}

double isotropy_residual(const BilinearForm& omega, const Subspace& sub) {
  double worst = 0.0;
  for (Index a = 0; a < sub.dim(); ++a) {
    for (Index b = 0; b < sub.dim(); ++b) {
      worst = std::max(worst, std::abs(omega(sub.vector(a), sub.vector(b))));
    }
  }
  return worst;
}

/// Rank of the union of the subspaces minus the sum of their dimensions (0 when direct).
Index direct_sum_defect(const std::vector<const Subspace*>& parts, Index ambient,
                        double rank_tol) {
  Index total = 0;
  for (const Subspace* s : parts) total += s->dim();
  Mat cols(ambient, total);
  Index c = 0;
  for (const Subspace* s : parts) {
    cols.middleCols(c, s->dim()) = s->basis();
    c += s->dim();
  }
  return total - span_of(cols, rank_tol, 1.0).dim();
}

/// {xi : ad*_xi mu in target}.
Subspace preimage(const Mat& orbit_map, const Subspace& target, double rank_tol) {
  const Index n = orbit_map.rows();
  Mat m = (Mat::Identity(n, n) - target.projector()) * orbit_map;
  return kernel_of(m, rank_tol, orbit_map.size() ? orbit_map.norm() : 0.0);
}

}  // namespace

double SplittingReport::worst() const {
  double w = 0.0;
  for (const auto& r : residuals) w = std::max(w, r.value);
  return w;
}

Subspace CoadjointSplitting::r(double rank_tol) const {
  return sum(sum(p, q_mu, rank_tol), k, rank_tol);
}

CoadjointSplitting witt_artin_split(const LieAlgebra& g, const Vec& mu, const Subspace& h,
                                    const Subspace& gpx, double rank_tol) {
  const Index n = g.dim();
  if (mu.size() != n || h.ambient_dim() != n || gpx.ambient_dim() != n) {
    throw DimensionMismatch("witt_artin_split: dimension mismatch");
  }
  Mat orbit_map = g.ad_star_columns(mu);
  const double orbit_scale = orbit_map.size() ? orbit_map.norm() : 0.0;

  Subspace g_mu = coadjoint_stabilizer(g, mu, rank_tol);
  Subspace h_mu = intersect(h, g_mu, rank_tol);
  double gpx_res = h_mu.containment_residual(gpx);
  if (gpx_res > kSplittingTol) {
    throw ContainmentError("witt_artin_split: g_px is not inside h_mu", gpx_res);
  }
  Subspace p = ortho_complement(h_mu, g.inner_product(), g_mu, rank_tol);

  Subspace orbit = orbit_tangent(g, mu, rank_tol);
  BilinearForm omega = kks_form(g, mu, rank_tol);
  Subspace h_mu_orbit = span_of(Mat(orbit_map * h.basis()), rank_tol, orbit_scale);

  Subspace z = symplectic_orthogonal(h_mu_orbit, omega, orbit, rank_tol);
  Subspace v_mu = ortho_complement(h_mu_orbit, g.dual_inner_product(), z, rank_tol);
  Subspace z2 = symplectic_orthogonal(v_mu, omega, orbit, rank_tol);
  LinearMapRep j = compatible_complex_structure(omega.restricted_to(z2), g.dual_inner_product(),
                                                z2, rank_tol);
  Mat w_cols(n, h_mu_orbit.dim());
  for (Index a = 0; a < h_mu_orbit.dim(); ++a) w_cols.col(a) = j.apply(h_mu_orbit.vector(a));
  Subspace w = span_of(w_cols, rank_tol);

  Subspace g1 = preimage(orbit_map, v_mu, rank_tol);
  Subspace q_mu = ortho_complement(g_mu, g.inner_product(), g1, rank_tol);
  Subspace g2 = preimage(orbit_map, w, rank_tol);
  Subspace k = ortho_complement(g_mu, g.inner_product(), g2, rank_tol);

  if (direct_sum_defect({&h, &p, &q_mu, &k}, n, rank_tol) != 0 ||
      h.dim() + p.dim() + q_mu.dim() + k.dim() != n) {
    throw SplittingError("witt_artin_split: h + p + q_mu + k is not a direct sum equal to g");
  }
  if (direct_sum_defect({&h_mu_orbit, &v_mu, &w}, n, rank_tol) != 0 ||
      h_mu_orbit.dim() + v_mu.dim() + w.dim() != orbit.dim() || w.dim() != h_mu_orbit.dim()) {
    throw SplittingError("witt_artin_split: orbit tangent does not split as h.mu + V_mu + W");
  }
  double iso = std::max(isotropy_residual(omega, w), isotropy_residual(omega, h_mu_orbit));
  double scale = std::max(1.0, max_abs(omega.matrix()));
  if (iso > kSplittingTol * scale) {
    throw SplittingError("witt_artin_split: W or h.mu is not isotropic", iso);
  }
  if (v_mu.dim() > 0) {
    Eigen::JacobiSVD<Mat> svd(omega.restricted_to(v_mu).matrix());
    if (numerical_rank(svd.singularValues(), rank_tol, 0.0) != v_mu.dim()) {
      throw SplittingError("witt_artin_split: orbit form is degenerate on V_mu");
    }
  }

  CoadjointSplitting sp{g_mu, h_mu, p, q_mu, k, orbit, h_mu_orbit, v_mu, w, omega, {}};
  sp.invariance_report = verify_splitting(sp, g, mu, h, gpx);
  return sp;
}

SplittingReport verify_splitting(const CoadjointSplitting& sp, const LieAlgebra& g, const Vec& mu,
                                 const Subspace& h, const Subspace& gpx) {
  SplittingReport rep;
  rep.invariance_vacuous = gpx.dim() == 0;
  auto add = [&](std::string name, double v) { rep.residuals.push_back({std::move(name), v}); };

  double q_h = 0.0;
  for (Index a = 0; a < sp.q_mu.dim(); ++a) {
    q_h = std::max(q_h, max_abs(h.basis().transpose() * g.ad_star(sp.q_mu.vector(a), mu)));
  }
  add("q_mu_annihilates_h", q_h);

  Subspace qk = sum(sp.q_mu, sp.k);
  double k_pair = 0.0;
  for (Index a = 0; a < sp.k.dim(); ++a) {
    k_pair = std::max(k_pair, max_abs(qk.basis().transpose() * g.ad_star(sp.k.vector(a), mu)));
  }
  add("k_annihilates_q_mu_plus_k", k_pair);

  add("W_isotropic", isotropy_residual(sp.omega_mu, sp.W));
  add("h_mu_orbit_isotropic", isotropy_residual(sp.omega_mu, sp.h_mu_orbit));
  add("orbit_dimension_count",
      std::abs(static_cast<double>(sp.orbit.dim() - sp.h_mu_orbit.dim() - sp.V_mu.dim() -
                                   sp.W.dim())) +
          std::abs(static_cast<double>(sp.W.dim() - sp.h_mu_orbit.dim())));

  Mat orbit_map = g.ad_star_columns(mu);
  Index q_rank = span_of(Mat(orbit_map * sp.q_mu.basis()), kDefaultRankTol,
                         orbit_map.size() ? orbit_map.norm() : 0.0)
                     .dim();
  add("q_mu_onto_V_mu", std::abs(static_cast<double>(q_rank - sp.V_mu.dim())) +
                            std::abs(static_cast<double>(sp.q_mu.dim() - sp.V_mu.dim())));

  double inv_g = 0.0;
  double inv_dual = 0.0;
  for (Index a = 0; a < gpx.dim(); ++a) {
    Mat adz = g.ad(gpx.vector(a));
    Mat co = adz.transpose();
    for (const Subspace* s : {&sp.g_mu, &sp.h_mu, &sp.p, &sp.q_mu, &sp.k}) {
      inv_g = std::max(inv_g, invariance_residual(*s, adz));
    }
    for (const Subspace* s : {&sp.h_mu_orbit, &sp.V_mu, &sp.W}) {
      inv_dual = std::max(inv_dual, invariance_residual(*s, co));
    }
  }
  add("gpx_invariance_algebra", inv_g);
  add("gpx_invariance_dual", inv_dual);
  add("gpx_ip_invariance", g.ip_invariance_residual(gpx));
  return rep;
}

}  // namespace slice
