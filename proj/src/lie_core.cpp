#include "slice/lie_core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace slice {

namespace {

constexpr double kJacobiTol = 1e-10;
constexpr double kClosureTol = 1e-8;

BilinearForm checked_ip(const Mat& ip, Index dim) {
  if (ip.rows() != dim || ip.cols() != dim) {
    throw DimensionMismatch("inner product does not match algebra dimension");
  }
  BilinearForm form = BilinearForm::on_ambient(ip, FormKind::Symmetric);
  Eigen::LLT<Mat> llt(form.matrix());
  if (dim > 0 && llt.info() != Eigen::Success) {
    throw DegeneracyError("algebra inner product is not positive definite");
  }
  return form;
}

}  // namespace

LieAlgebra::LieAlgebra(std::string label, std::vector<Mat> ad_basis, Mat inner_product)
    : label_(std::move(label)),
      dim_(static_cast<Index>(ad_basis.size())),
      ad_basis_(std::move(ad_basis)),
      ip_(checked_ip(inner_product, dim_)),
      dual_ip_(BilinearForm::on_ambient(
          dim_ ? Mat(ip_.matrix().inverse()) : Mat(0, 0), FormKind::Symmetric)) {
  for (const Mat& m : ad_basis_) {
    if (m.rows() != dim_ || m.cols() != dim_) {
      throw DimensionMismatch("structure constant block has wrong shape");
    }
  }
  double anti = antisymmetry_residual();
  if (anti > 1e-12) throw DegeneracyError("structure constants are not antisymmetric", anti);
  double jac = jacobi_residual();
  if (jac > kJacobiTol) throw DegeneracyError("structure constants violate Jacobi", jac);
}

LieAlgebra LieAlgebra::so3() {
  std::vector<Mat> ad(3, Mat::Zero(3, 3));
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d e = Eigen::Vector3d::Unit(i);
    for (int j = 0; j < 3; ++j) {
      ad[i].col(j) = e.cross(Eigen::Vector3d::Unit(j));
    }
  }
  return LieAlgebra("so(3)", std::move(ad), Mat::Identity(3, 3));
}

LieAlgebra LieAlgebra::abelian(Index dim, std::string label) {
  if (label.empty()) label = "R^" + std::to_string(dim);
  return LieAlgebra(std::move(label), std::vector<Mat>(dim, Mat::Zero(dim, dim)),
                    Mat::Identity(dim, dim));
}

Mat LieAlgebra::ad(const Vec& xi) const {
  if (xi.size() != dim_) throw DimensionMismatch("algebra vector has wrong length");
  Mat out = Mat::Zero(dim_, dim_);
  for (Index i = 0; i < dim_; ++i) {
    if (xi(i) != 0.0) out += xi(i) * ad_basis_[i];
  }
  return out;
}

Vec LieAlgebra::bracket(const Vec& xi, const Vec& eta) const {
  if (eta.size() != dim_) throw DimensionMismatch("algebra vector has wrong length");
  return ad(xi) * eta;
}

Vec LieAlgebra::ad_star(const Vec& xi, const Vec& mu) const {
  if (mu.size() != dim_) throw DimensionMismatch("dual vector has wrong length");
  return ad(xi).transpose() * mu;
}

Mat LieAlgebra::ad_star_columns(const Vec& mu) const {
  if (mu.size() != dim_) throw DimensionMismatch("dual vector has wrong length");
  Mat out(dim_, dim_);
  for (Index i = 0; i < dim_; ++i) out.col(i) = ad_basis_[i].transpose() * mu;
  return out;
}

Mat LieAlgebra::Ad(const Vec& zeta) const { return ad(zeta).exp(); }

Mat LieAlgebra::CoAd(const Vec& zeta) const { return ad(-zeta).exp().transpose(); }

double LieAlgebra::jacobi_residual() const {
  double worst = 0.0;
  for (Index i = 0; i < dim_; ++i) {
    for (Index j = 0; j < dim_; ++j) {
      // ad_[e_i,e_j] = [ad_i, ad_j] is equivalent to Jacobi on all triples.
      Mat lhs = ad(ad_basis_[i].col(j));
      Mat rhs = ad_basis_[i] * ad_basis_[j] - ad_basis_[j] * ad_basis_[i];
      if (lhs.size()) worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double LieAlgebra::antisymmetry_residual() const {
  double worst = 0.0;
  for (Index i = 0; i < dim_; ++i) {
    for (Index j = 0; j < dim_; ++j) {
      worst = std::max(worst, (ad_basis_[i].col(j) + ad_basis_[j].col(i)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double LieAlgebra::ip_invariance_residual(const Subspace& m) const {
  double worst = 0.0;
  const Mat& g = gram();
  for (Index a = 0; a < m.dim(); ++a) {
    Mat adz = ad(m.vector(a));
    Mat r = adz.transpose() * g + g * adz;
    if (r.size()) worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

double LieAlgebra::subalgebra_residual(const Subspace& m) const {
  double worst = 0.0;
  for (Index a = 0; a < m.dim(); ++a) {
    for (Index b = a + 1; b < m.dim(); ++b) {
      worst = std::max(worst, m.residual(bracket(m.vector(a), m.vector(b))));
    }
  }
  return worst;
}

Subspace coadjoint_stabilizer(const LieAlgebra& g, const Vec& mu, double rank_tol) {
  return kernel_of(g.ad_star_columns(mu), rank_tol);
}

Subspace orbit_tangent(const LieAlgebra& g, const Vec& mu, double rank_tol) {
  return span_of(g.ad_star_columns(mu), rank_tol);
}

Vec orbit_lift(const LieAlgebra& g, const Vec& mu, const Vec& v) {
  Mat m = g.ad_star_columns(mu);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(m);
  Vec lambda = cod.solve(v);
  double res = (m * lambda - v).norm();
  if (res > 1e-8 * std::max(1.0, v.norm())) {
    throw InconsistentSystem("orbit_lift: vector is not tangent to the orbit", res);
  }
  return lambda;
}

double kks_value(const LieAlgebra& g, const Vec& mu, const Vec& l1, const Vec& l2) {
  return -mu.dot(g.bracket(l1, l2));
}

BilinearForm kks_form(const LieAlgebra& g, const Vec& mu, double rank_tol) {
  Subspace t = orbit_tangent(g, mu, rank_tol);
  std::vector<Vec> lifts;
  lifts.reserve(static_cast<std::size_t>(t.dim()));
  for (Index a = 0; a < t.dim(); ++a) lifts.push_back(orbit_lift(g, mu, t.vector(a)));
  Mat omega(t.dim(), t.dim());
  for (Index a = 0; a < t.dim(); ++a) {
    for (Index b = 0; b < t.dim(); ++b) omega(a, b) = kks_value(g, mu, lifts[a], lifts[b]);
  }
  return BilinearForm(t, omega, FormKind::Skew);
}

OrbitMomentum orbit_momentum_JO(const LieAlgebra& g, const Vec& nu, const Subspace& h) {
  if (nu.size() != g.dim() || h.ambient_dim() != g.dim()) {
    throw DimensionMismatch("orbit_momentum_JO: dimension mismatch");
  }
  double res = g.subalgebra_residual(h);
  return OrbitMomentum{Vec(-(h.basis().transpose() * nu)), res <= kClosureTol, res};
}

}  // namespace slice
