#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "slice/lie_core.hpp"
#include "slice/numerics.hpp"

namespace slice {

struct NumericsConfig {
  FdConfig fd;
  double rank_tol = kDefaultRankTol;
  /// Use the system's closed-form generator and its Jacobian when supplied.
  bool use_exact_derivatives = true;
  double invariance_tol = 1e-6;
};

/// Callbacks describing a Lie algebra acting by isometries on one chart.
struct SystemEvaluators {
  /// Exp(xi) . x in chart coordinates.
  std::function<Vec(const Vec& xi, const Vec& x)> action;
  std::function<Mat(const Vec& x)> metric;
  /// Optional; defaults to "everywhere".
  std::function<bool(const Vec& x)> in_domain;
  /// Optional closed form of xi_Q(x).
  std::function<Vec(const Vec& xi, const Vec& x)> generator;
  /// Optional closed form of d(xi_Q)/dx.
  std::function<Mat(const Vec& xi, const Vec& x)> generator_jacobian;
};

class MechanicalGSystem {
 public:
  MechanicalGSystem(std::string label, LieAlgebra algebra, Index chart_dim, SystemEvaluators ev,
                    NumericsConfig numerics = {});

  const std::string& label() const { return label_; }
  const LieAlgebra& algebra() const { return algebra_; }
  Index chart_dim() const { return chart_dim_; }
  const NumericsConfig& numerics() const { return numerics_; }
  MechanicalGSystem with_numerics(NumericsConfig numerics) const;

  Vec action(const Vec& xi, const Vec& x) const;
  Mat metric(const Vec& x) const;
  bool in_domain(const Vec& x) const;
  bool has_exact_generator() const;

  double step_at(const Vec& x) const;
  double mixed_step_at(const Vec& x) const;
  /// Largest step <= h keeping x +- h v inside the chart; throws ChartError.
  double safe_step(const Vec& x, const Vec& v, double h) const;

  /// xi_Q(x): closed form when available and enabled, otherwise generator_fd.
  Vec generator(const Vec& xi, const Vec& x) const;
  /// Central difference of t -> action(t xi, x).
  Vec generator_fd(const Vec& xi, const Vec& x) const;
  /// N x dim(g) matrix, column i = (e_i)_Q(x).
  Mat generator_matrix(const Vec& x) const;
  /// d(xi_Q)/dx at x.
  Mat generator_jacobian(const Vec& xi, const Vec& x) const;
  /// Partial derivative of the metric along chart direction v.
  Mat metric_derivative(const Vec& x, const Vec& v) const;

 private:
  std::string label_;
  LieAlgebra algebra_;
  Index chart_dim_;
  SystemEvaluators ev_;
  NumericsConfig numerics_;
};

/// Gamma^k_{ij} at a point; upper[k](i, j).
struct Christoffel {
  std::vector<Mat> upper;
  /// Vector with components Gamma^k_{ij} u^i v^j.
  Vec contract(const Vec& u, const Vec& v) const;
  double symmetry_residual() const;
};

Christoffel christoffel(const MechanicalGSystem& system, const Vec& x);

Mat locked_inertia(const MechanicalGSystem& system, const Vec& x);
/// d/dt I(x + t v) at t = 0, a symmetric matrix on g.
Mat locked_inertia_derivative(const MechanicalGSystem& system, const Vec& x, const Vec& v);

struct InvarianceReport {
  double residual = 0.0;
  bool vacuous = true;
  bool ok = true;
};

/// Point-local geometry with fixed bases of h, r and the slice S.
struct PointFrame {
  Vec x;
  Subspace h;
  Subspace r;
  Subspace S;
  Mat gen;        // N x dim g
  Mat gen_r;      // N x dim r
  Mat metric;     // N x N
  Mat I_full;     // dim g x dim g
  Mat I_r;        // dim r x dim r, in r coordinates
  Mat slice_gram; // dim S x dim S, in S coordinates
  Christoffel christoffel;
  InvarianceReport invariance;

  /// Algebra vector -> (component in h, r-coordinates of the component in r),
  /// for the oblique splitting g = h + r.
  std::pair<Vec, Vec> split_algebra(const Vec& xi) const;
  /// Slice representation of zeta in h, as a matrix on S coordinates.
  Mat slice_rep(const MechanicalGSystem& system, const Vec& zeta) const;
};

/// Builds the frame at x. r defaults to the inner-product complement of h;
/// a caller-supplied r must be a complement of h. Invariance of h, r, S under
/// invariance_generators is measured and reported.
PointFrame point_frame(const MechanicalGSystem& system, const Vec& x,
                       const Subspace& invariance_generators,
                       const Subspace* r_override = nullptr);

/// Rebuilds a frame with a different complement r, reusing the point data.
PointFrame reframe(const MechanicalGSystem& system, const PointFrame& frame, const Subspace& r,
                   const Subspace& invariance_generators);

using CovectorCurve = std::function<std::pair<Vec, Vec>(double)>;

/// (K)_j = p'_j - Gamma^k_{ij} c'^i p_k at t = 0.
Vec connection_K(const MechanicalGSystem& system, const CovectorCurve& curve);

/// Matrix C[i][j] = <C(v)(r_i), S_j> (metric pairing) for v in S (ambient).
Mat C_operator(const MechanicalGSystem& system, const PointFrame& frame, const Vec& v);

/// mu_i = <p, (e_i)_Q(x)>.
Vec cotangent_momentum(const PointFrame& frame, const Vec& p);

struct TangentSplit {
  Vec xi_r;  // r coordinates
  Vec a;     // S coordinates
};
struct CotangentSplit {
  Vec nu;    // values on the r basis
  Vec beta;  // values on the S basis
};

TangentSplit split_tangent(const PointFrame& frame, const Vec& u);
Vec join_tangent(const PointFrame& frame, const TangentSplit& t);
CotangentSplit split_cotangent(const PointFrame& frame, const Vec& gamma);
Vec join_cotangent(const PointFrame& frame, const CotangentSplit& c);
CotangentSplit legendre(const PointFrame& frame, const TangentSplit& t);
TangentSplit legendre_inverse(const PointFrame& frame, const CotangentSplit& c);

/// Largest entry of xi_Q . dG + J^T G + G J (Killing equation) at x.
double killing_residual(const MechanicalGSystem& system, const Vec& xi, const Vec& x);

/// |[xi_Q, eta_Q](x) + ([xi, eta])_Q(x)|, relative.
double generator_bracket_residual(const MechanicalGSystem& system, const Vec& xi, const Vec& eta,
                                  const Vec& x);

}  // namespace slice
