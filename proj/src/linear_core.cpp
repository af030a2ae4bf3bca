#include "slice/linear_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slice {

namespace {

constexpr double kOrthonormalTol = 1e-10;
constexpr double kContainmentTol = 1e-7;

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_contained(const Subspace& outer, const Subspace& inner, const char* what) {
  double res = outer.containment_residual(inner);
  if (res > kContainmentTol) {
    throw ContainmentError(std::string(what) + ": subspace not contained (residual " +
                               std::to_string(res) + ")",
                           res);
  }
}

}  // namespace

Index numerical_rank(const Vec& singular_values, double rank_tol, double reference_scale) {
  if (singular_values.size() == 0) return 0;
  double top = std::max(singular_values.maxCoeff(), reference_scale);
  double threshold = rank_tol * top;
  Index r = 0;
  for (Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > threshold) ++r;
  }
  return r;
}

Subspace::Subspace(Index ambient_dim) : ambient_(ambient_dim), basis_(ambient_dim, 0) {
  if (ambient_dim < 0) throw DimensionMismatch("negative ambient dimension");
}

Subspace Subspace::from_orthonormal(Mat basis) {
  Subspace s(basis.rows());
  if (basis.cols() > 0) {
    Mat gram = basis.transpose() * basis;
    double err = max_abs(gram - Mat::Identity(basis.cols(), basis.cols()));
    if (err > kOrthonormalTol) {
      throw DegeneracyError("basis is not orthonormal", err);
    }
  }
  s.basis_ = std::move(basis);
  return s;
}

Subspace Subspace::full(Index ambient_dim) {
  return from_orthonormal(Mat::Identity(ambient_dim, ambient_dim));
}

Mat Subspace::projector() const { return basis_ * basis_.transpose(); }

Vec Subspace::coordinates(const Vec& v) const {
  if (v.size() != ambient_) throw DimensionMismatch("vector length does not match subspace");
  return basis_.transpose() * v;
}

Vec Subspace::from_coordinates(const Vec& c) const {
  if (c.size() != dim()) throw DimensionMismatch("coordinate length does not match subspace");
  return basis_ * c;
}

double Subspace::residual(const Vec& v) const {
  if (v.size() != ambient_) throw DimensionMismatch("vector length does not match subspace");
  return (v - basis_ * (basis_.transpose() * v)).norm();
}

double Subspace::containment_residual(const Subspace& other) const {
  if (other.ambient_dim() != ambient_) throw DimensionMismatch("ambient dimensions differ");
  double worst = 0.0;
  for (Index i = 0; i < other.dim(); ++i) worst = std::max(worst, residual(other.vector(i)));
  return worst;
}

bool Subspace::contains(const Subspace& other, double tol) const {
  return containment_residual(other) <= tol;
}

Mat orthonormal_columns(const Mat& columns, double rank_tol, double reference_scale) {
  const Index n = columns.rows();
  if (columns.cols() == 0 || n == 0) return Mat(n, 0);
  Eigen::JacobiSVD<Mat> svd(columns);
  Index r = numerical_rank(svd.singularValues(), rank_tol, reference_scale);
  if (r == 0) return Mat(n, 0);
  Eigen::ColPivHouseholderQR<Mat> qr(columns);
  Mat q = qr.householderQ() * Mat::Identity(n, r);
  const Mat& packed = qr.matrixQR();
  for (Index i = 0; i < r; ++i) {
    if (packed(i, i) < 0) q.col(i) *= -1.0;
  }
  return q;
}

Subspace span_of(const Mat& columns, double rank_tol, double reference_scale) {
  return Subspace::from_orthonormal(orthonormal_columns(columns, rank_tol, reference_scale));
}

Subspace span_of(const std::vector<Vec>& vectors, Index ambient_dim, double rank_tol,
                 double reference_scale) {
  Mat cols(ambient_dim, static_cast<Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != ambient_dim) {
      throw DimensionMismatch("span_of: vectors have inconsistent lengths");
    }
    cols.col(static_cast<Index>(i)) = vectors[i];
  }
  return span_of(cols, rank_tol, reference_scale);
}

Subspace sum(const Subspace& a, const Subspace& b, double rank_tol) {
  if (a.ambient_dim() != b.ambient_dim()) throw DimensionMismatch("sum: ambient dimensions differ");
  Mat cols(a.ambient_dim(), a.dim() + b.dim());
  cols << a.basis(), b.basis();
  return span_of(cols, rank_tol, 1.0);
}

BilinearForm::BilinearForm(Subspace domain, Mat matrix, FormKind kind)
    : domain_(std::move(domain)), matrix_(std::move(matrix)), kind_(kind) {
  if (matrix_.rows() != domain_.dim() || matrix_.cols() != domain_.dim()) {
    throw DimensionMismatch("bilinear form matrix does not match its domain");
  }
  Mat t = matrix_.transpose();
  double scale = std::max(1.0, max_abs(matrix_));
  double err = kind_ == FormKind::Symmetric ? max_abs(matrix_ - t) : max_abs(matrix_ + t);
  if (err > 1e-10 * scale) {
    throw DegeneracyError(kind_ == FormKind::Symmetric ? "form is not symmetric"
                                                        : "form is not skew",
                          err);
  }
  matrix_ = kind_ == FormKind::Symmetric ? Mat(0.5 * (matrix_ + t)) : Mat(0.5 * (matrix_ - t));
}

BilinearForm BilinearForm::on_ambient(Mat matrix, FormKind kind) {
  Index n = matrix.rows();
  return BilinearForm(Subspace::full(n), std::move(matrix), kind);
}

Mat BilinearForm::ambient_matrix() const {
  return domain_.basis() * matrix_ * domain_.basis().transpose();
}

double BilinearForm::operator()(const Vec& u, const Vec& v) const {
  return domain_.coordinates(u).dot(matrix_ * domain_.coordinates(v));
}

BilinearForm BilinearForm::restricted_to(const Subspace& sub) const {
  require_contained(domain_, sub, "restricted_to");
  Mat c = domain_.basis().transpose() * sub.basis();
  return BilinearForm(sub, c.transpose() * matrix_ * c, kind_);
}

LinearMapRep::LinearMapRep(Subspace d, Subspace c, Mat m)
    : domain(std::move(d)), codomain(std::move(c)), matrix(std::move(m)) {
  if (matrix.rows() != codomain.dim() || matrix.cols() != domain.dim()) {
    throw DimensionMismatch("linear map matrix does not match its subspaces");
  }
}

Vec LinearMapRep::apply(const Vec& v) const {
  return codomain.from_coordinates(matrix * domain.coordinates(v));
}

Mat LinearMapRep::ambient_matrix() const {
  return codomain.basis() * matrix * domain.basis().transpose();
}

Subspace kernel_of(const Mat& matrix, double rank_tol, double reference_scale) {
  const Index n = matrix.cols();
  if (matrix.rows() == 0 || n == 0) return Subspace::full(n);
  Eigen::JacobiSVD<Mat> svd(matrix, Eigen::ComputeFullV);
  Index r = numerical_rank(svd.singularValues(), rank_tol, reference_scale);
  Mat v = svd.matrixV().rightCols(n - r);
  // Canonical basis of the kernel, independent of the SVD's rotation freedom.
  return span_of(Mat(v * v.transpose()), rank_tol, 1.0);
}

Vec solve_exact(const Mat& matrix, const Vec& rhs, double rank_tol, double consistency_tol) {
  if (matrix.rows() != rhs.size()) throw DimensionMismatch("solve_exact: rhs length mismatch");
  const Index n = matrix.cols();
  if (n == 0) {
    double res = rhs.size() ? rhs.cwiseAbs().maxCoeff() : 0.0;
    if (res > consistency_tol) throw InconsistentSystem("solve_exact: inconsistent system", res);
    return Vec(0);
  }
  Eigen::JacobiSVD<Mat> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Index r = numerical_rank(svd.singularValues(), rank_tol);
  if (r < n) {
    throw AmbiguityError("solve_exact: solution is not unique (rank " + std::to_string(r) +
                         " < " + std::to_string(n) + ")");
  }
  Vec x = svd.solve(rhs);
  double res = (matrix * x - rhs).norm();
  if (res > consistency_tol * std::max(1.0, rhs.norm())) {
    throw InconsistentSystem("solve_exact: inconsistent system", res);
  }
  return x;
}

Subspace intersect(const Subspace& u, const Subspace& w, double rank_tol) {
  if (u.ambient_dim() != w.ambient_dim()) {
    throw DimensionMismatch("intersect: ambient dimensions differ");
  }
  const Index n = u.ambient_dim();
  Mat stacked(2 * n, n);
  stacked << Mat::Identity(n, n) - u.projector(), Mat::Identity(n, n) - w.projector();
  return kernel_of(stacked, rank_tol, 1.0);
}

Subspace ortho_complement(const Subspace& u, const BilinearForm& ip, const Subspace& within,
                          double rank_tol) {
  require_contained(within, u, "ortho_complement");
  require_contained(ip.domain(), within, "ortho_complement");
  if (ip.kind() != FormKind::Symmetric) {
    throw DegeneracyError("ortho_complement: inner product must be symmetric");
  }
  Mat pairing = u.basis().transpose() * ip.ambient_matrix() * within.basis();
  Subspace k = kernel_of(pairing, rank_tol);
  return Subspace::from_orthonormal(within.basis() * k.basis());
}

Subspace symplectic_orthogonal(const Subspace& u, const BilinearForm& omega, const Subspace& within,
                               double rank_tol) {
  require_contained(within, u, "symplectic_orthogonal");
  require_contained(omega.domain(), within, "symplectic_orthogonal");
  Mat pairing = u.basis().transpose() * omega.ambient_matrix() * within.basis();
  // Scale reference: the form itself, so that a vanishing pairing gives the full space.
  double scale = std::max(1e-300, omega.matrix().size() ? omega.matrix().norm() : 0.0);
  Subspace k = kernel_of(pairing, rank_tol, scale);
  return Subspace::from_orthonormal(within.basis() * k.basis());
}

LinearMapRep compatible_complex_structure(const BilinearForm& omega, const BilinearForm& ip,
                                          const Subspace& z, double rank_tol) {
  require_contained(omega.domain(), z, "compatible_complex_structure");
  require_contained(ip.domain(), z, "compatible_complex_structure");
  const Index d = z.dim();
  if (d == 0) return LinearMapRep(z, z, Mat(0, 0));
  if (d % 2 != 0) throw DegeneracyError("compatible_complex_structure: odd-dimensional space");
  Mat g = z.basis().transpose() * ip.ambient_matrix() * z.basis();
  Mat w = z.basis().transpose() * omega.ambient_matrix() * z.basis();
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) {
    throw DegeneracyError("compatible_complex_structure: inner product not positive definite");
  }
  Mat l = llt.matrixL();
  Mat linv = l.triangularView<Eigen::Lower>().solve(Mat::Identity(d, d));
  // omega(u,v) = ip(Au,v) gives A = -G^{-1} W; conjugated by L it becomes skew.
  Mat a = -linv * w * linv.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> eig(a.transpose() * a);
  Vec ev = eig.eigenvalues();
  if (ev.minCoeff() <= rank_tol * rank_tol * std::max(ev.maxCoeff(), 1e-300)) {
    throw DegeneracyError("compatible_complex_structure: omega is degenerate on Z",
                          ev.minCoeff());
  }
  Mat inv_sqrt = eig.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                 eig.eigenvectors().transpose();
  Mat j_tilde = a * inv_sqrt;
  Mat j = linv.transpose() * j_tilde * l.transpose();
  return LinearMapRep(z, z, j);
}

double relative_error(const Mat& value, const Mat& reference) {
  if (value.rows() != reference.rows() || value.cols() != reference.cols()) {
    throw DimensionMismatch("relative_error: shape mismatch");
  }
  if (value.size() == 0) return 0.0;
  return max_abs(value - reference) / std::max(1.0, max_abs(reference));
}

}  // namespace slice
