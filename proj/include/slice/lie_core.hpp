#pragma once

#include <string>
#include <vector>

#include "slice/linear_core.hpp"

namespace slice {

/// Finite-dimensional real Lie algebra with a fixed basis e_0..e_{n-1}.
/// Elements of g and of g* are both coordinate vectors; the pairing
/// <mu, xi> is the dot product.
class LieAlgebra {
 public:
  /// ad_basis[i](k, j) = c^k_{ij}, i.e. [e_i, e_j] = sum_k c^k_{ij} e_k.
  LieAlgebra(std::string label, std::vector<Mat> ad_basis, Mat inner_product);

  static LieAlgebra so3();
  static LieAlgebra abelian(Index dim, std::string label = "");

  const std::string& label() const { return label_; }
  Index dim() const { return dim_; }
  double structure_constant(Index i, Index j, Index k) const { return ad_basis_[i](k, j); }

  Vec bracket(const Vec& xi, const Vec& eta) const;
  /// Matrix of eta -> [xi, eta].
  Mat ad(const Vec& xi) const;
  /// <ad*_xi mu, eta> = <mu, [xi, eta]>.
  Vec ad_star(const Vec& xi, const Vec& mu) const;
  /// Column i is ad*_{e_i} mu.
  Mat ad_star_columns(const Vec& mu) const;
  /// Ad_{Exp zeta} = exp(ad_zeta).
  Mat Ad(const Vec& zeta) const;
  /// Coadjoint action of Exp(zeta) on g*: the inverse transpose of Ad_{Exp zeta}.
  Mat CoAd(const Vec& zeta) const;

  const BilinearForm& inner_product() const { return ip_; }
  const Mat& gram() const { return ip_.matrix(); }
  /// Induced inner product on g*: inverse Gram matrix.
  const BilinearForm& dual_inner_product() const { return dual_ip_; }

  double jacobi_residual() const;
  double antisymmetry_residual() const;
  /// Largest |<[z,a],b> + <a,[z,b]>| over basis vectors z of m and a, b of g.
  double ip_invariance_residual(const Subspace& m) const;
  /// Largest distance of [a, b] from m over basis vectors a, b of m.
  double subalgebra_residual(const Subspace& m) const;

 private:
  std::string label_;
  Index dim_;
  std::vector<Mat> ad_basis_;
  BilinearForm ip_;
  BilinearForm dual_ip_;
};

/// g_mu: kernel of xi -> ad*_xi mu.
Subspace coadjoint_stabilizer(const LieAlgebra& g, const Vec& mu,
                              double rank_tol = kDefaultRankTol);

/// g . mu inside g*.
Subspace orbit_tangent(const LieAlgebra& g, const Vec& mu, double rank_tol = kDefaultRankTol);

/// Representative lambda with ad*_lambda mu = v, for v in the orbit tangent.
Vec orbit_lift(const LieAlgebra& g, const Vec& mu, const Vec& v);

/// Value -<mu, [l1, l2]> of the orbit form on ad*_{l1} mu, ad*_{l2} mu.
double kks_value(const LieAlgebra& g, const Vec& mu, const Vec& l1, const Vec& l2);

/// Orbit form assembled on the basis of orbit_tangent(mu).
BilinearForm kks_form(const LieAlgebra& g, const Vec& mu, double rank_tol = kDefaultRankTol);

struct OrbitMomentum {
  Vec value;  // coordinates on the basis of h
  bool closed;
  double closure_residual;
};

/// -(nu restricted to h); flags h that is not closed under the bracket.
OrbitMomentum orbit_momentum_JO(const LieAlgebra& g, const Vec& nu, const Subspace& h);

}  // namespace slice
