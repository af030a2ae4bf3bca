#pragma once

#include <Eigen/Dense>
#include <vector>

#include "slice/errors.hpp"

namespace slice {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kDefaultRankTol = 1e-9;

/// Number of singular values above rank_tol * max(largest, reference_scale).
/// Every rank decision in the library goes through here.
Index numerical_rank(const Vec& singular_values, double rank_tol,
                     double reference_scale = 0.0);

/// Linear subspace of R^n carried by an orthonormal basis (columns).
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(Index ambient_dim);

  /// Wraps columns that are already orthonormal; throws if they are not.
  static Subspace from_orthonormal(Mat basis);
  static Subspace full(Index ambient_dim);

  Index ambient_dim() const { return ambient_; }
  Index dim() const { return basis_.cols(); }
  bool is_zero() const { return basis_.cols() == 0; }
  const Mat& basis() const { return basis_; }
  Vec vector(Index i) const { return basis_.col(i); }

  /// Euclidean orthogonal projector onto the subspace.
  Mat projector() const;
  Vec coordinates(const Vec& v) const;
  Vec from_coordinates(const Vec& c) const;

  /// Euclidean distance of v from the subspace.
  double residual(const Vec& v) const;
  /// Largest residual of the columns of other, relative to their norm.
  double containment_residual(const Subspace& other) const;
  bool contains(const Subspace& other, double tol = 1e-8) const;

 private:
  Index ambient_ = 0;
  Mat basis_;
};

/// Orthonormal basis of the column span, by column-pivoted QR.
Mat orthonormal_columns(const Mat& columns, double rank_tol = kDefaultRankTol,
                        double reference_scale = 0.0);

Subspace span_of(const Mat& columns, double rank_tol = kDefaultRankTol,
                 double reference_scale = 0.0);
Subspace span_of(const std::vector<Vec>& vectors, Index ambient_dim,
                 double rank_tol = kDefaultRankTol, double reference_scale = 0.0);
/// Span of the union of two subspaces.
Subspace sum(const Subspace& a, const Subspace& b, double rank_tol = kDefaultRankTol);

enum class FormKind { Symmetric, Skew };

/// Bilinear form given by its Gram matrix in the basis of a subspace.
class BilinearForm {
 public:
  BilinearForm() : domain_(0), kind_(FormKind::Symmetric) {}
  BilinearForm(Subspace domain, Mat matrix, FormKind kind);
  /// Form on all of R^n with the given ambient matrix.
  static BilinearForm on_ambient(Mat matrix, FormKind kind);

  const Subspace& domain() const { return domain_; }
  const Mat& matrix() const { return matrix_; }
  FormKind kind() const { return kind_; }

  /// Gram matrix acting on ambient vectors (valid for vectors in the domain).
  Mat ambient_matrix() const;
  double operator()(const Vec& u, const Vec& v) const;
  BilinearForm restricted_to(const Subspace& sub) const;

 private:
  Subspace domain_;
  Mat matrix_;
  FormKind kind_;
};

/// Linear map in the bases of a domain and codomain subspace.
struct LinearMapRep {
  Subspace domain;
  Subspace codomain;
  Mat matrix;

  LinearMapRep(Subspace d, Subspace c, Mat m);
  /// Acts on ambient vectors of the domain, returns ambient vectors.
  Vec apply(const Vec& v) const;
  Mat ambient_matrix() const;
};

Subspace kernel_of(const Mat& matrix, double rank_tol = kDefaultRankTol,
                   double reference_scale = 0.0);

/// Unique solution of matrix * x = rhs. Rank-deficient -> AmbiguityError,
/// residual above consistency_tol -> InconsistentSystem.
Vec solve_exact(const Mat& matrix, const Vec& rhs, double rank_tol = kDefaultRankTol,
                double consistency_tol = 1e-8);

Subspace intersect(const Subspace& u, const Subspace& w, double rank_tol = kDefaultRankTol);

/// {w in within : ip(w, u) = 0 for u in U}.
Subspace ortho_complement(const Subspace& u, const BilinearForm& ip, const Subspace& within,
                          double rank_tol = kDefaultRankTol);

/// {v in within : omega(v, u) = 0 for u in U}.
Subspace symplectic_orthogonal(const Subspace& u, const BilinearForm& omega,
                               const Subspace& within, double rank_tol = kDefaultRankTol);

/// Complex structure J on Z with omega(u, v) = ip(A u, v), J = A |A|^{-1}.
LinearMapRep compatible_complex_structure(const BilinearForm& omega, const BilinearForm& ip,
                                          const Subspace& z, double rank_tol = kDefaultRankTol);

/// Max-norm difference relative to max(1, |reference|_inf).
double relative_error(const Mat& value, const Mat& reference);

}  // namespace slice
