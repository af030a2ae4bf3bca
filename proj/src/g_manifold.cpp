#include "slice/g_manifold.hpp"

#include <algorithm>
#include <cmath>

namespace slice {

namespace {

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double subspace_invariance(const Subspace& sub, const Mat& op) {
  double worst = 0.0;
  for (Index a = 0; a < sub.dim(); ++a) worst = std::max(worst, sub.residual(op * sub.vector(a)));
  return worst;
}

InvarianceReport measure_invariance(const MechanicalGSystem& system, const PointFrame& f,
                                    const Subspace& m) {
  InvarianceReport rep;
  rep.vacuous = m.dim() == 0;
  const LieAlgebra& g = system.algebra();
  for (Index a = 0; a < m.dim(); ++a) {
    Vec zeta = m.vector(a);
    Mat adz = g.ad(zeta);
    rep.residual = std::max(rep.residual, subspace_invariance(f.h, adz));
    rep.residual = std::max(rep.residual, subspace_invariance(f.r, adz));
    rep.residual =
        std::max(rep.residual, subspace_invariance(f.S, system.generator_jacobian(zeta, f.x)));
  }
  rep.ok = rep.residual <= system.numerics().invariance_tol;
  return rep;
}

void fill_r_dependent(PointFrame& f) {
  f.gen_r = f.gen * f.r.basis();
  f.I_r = f.gen_r.transpose() * f.metric * f.gen_r;
  f.I_r = 0.5 * (f.I_r + f.I_r.transpose()).eval();
}

void require_complement(const Subspace& h, const Subspace& r, double rank_tol) {
  const Index n = h.ambient_dim();
  if (r.ambient_dim() != n || h.dim() + r.dim() != n || sum(h, r, rank_tol).dim() != n) {
    throw SplittingError("r is not a complement of the isotropy algebra");
  }
}

}  // namespace

MechanicalGSystem::MechanicalGSystem(std::string label, LieAlgebra algebra, Index chart_dim,
                                     SystemEvaluators ev, NumericsConfig numerics)
    : label_(std::move(label)),
      algebra_(std::move(algebra)),
      chart_dim_(chart_dim),
      ev_(std::move(ev)),
      numerics_(numerics) {
  if (!ev_.action || !ev_.metric) throw ConfigError("system needs an action and a metric");
  if (chart_dim_ <= 0) throw DimensionMismatch("chart dimension must be positive");
}

MechanicalGSystem MechanicalGSystem::with_numerics(NumericsConfig numerics) const {
  MechanicalGSystem copy = *this;
  copy.numerics_ = numerics;
  return copy;
}

Vec MechanicalGSystem::action(const Vec& xi, const Vec& x) const {
  if (xi.size() != algebra_.dim() || x.size() != chart_dim_) {
    throw DimensionMismatch("action: argument has wrong length");
  }
  return ev_.action(xi, x);
}

Mat MechanicalGSystem::metric(const Vec& x) const {
  if (x.size() != chart_dim_) throw DimensionMismatch("metric: point has wrong length");
  return ev_.metric(x);
}

bool MechanicalGSystem::in_domain(const Vec& x) const {
  return !ev_.in_domain || ev_.in_domain(x);
}

bool MechanicalGSystem::has_exact_generator() const {
  return static_cast<bool>(ev_.generator) && numerics_.use_exact_derivatives;
}

double MechanicalGSystem::step_at(const Vec& x) const {
  return numerics_.fd.step * std::max(1.0, x.norm());
}

double MechanicalGSystem::mixed_step_at(const Vec& x) const {
  return numerics_.fd.mixed_step * std::max(1.0, x.norm());
}

double MechanicalGSystem::safe_step(const Vec& x, const Vec& v, double h) const {
  for (int i = 0; i <= numerics_.fd.max_shrinks; ++i) {
    // Richardson only ever shrinks the step, so checking the largest suffices.
    if (in_domain(x + h * v) && in_domain(x - h * v)) return h;
    h *= 0.5;
  }
  throw ChartError("finite-difference stencil leaves the chart domain");
}

Vec MechanicalGSystem::generator_fd(const Vec& xi, const Vec& x) const {
  double h = step_at(x) / std::max(1.0, xi.norm());
  return fd::derivative([&](double t) -> Vec { return action(t * xi, x); }, h,
                        numerics_.fd.richardson_levels);
}

Vec MechanicalGSystem::generator(const Vec& xi, const Vec& x) const {
  if (has_exact_generator()) {
    if (xi.size() != algebra_.dim() || x.size() != chart_dim_) {
      throw DimensionMismatch("generator: argument has wrong length");
    }
    return ev_.generator(xi, x);
  }
  return generator_fd(xi, x);
}

Mat MechanicalGSystem::generator_matrix(const Vec& x) const {
  const Index n = algebra_.dim();
  Mat out(chart_dim_, n);
  for (Index i = 0; i < n; ++i) out.col(i) = generator(Vec::Unit(n, i), x);
  return out;
}

Mat MechanicalGSystem::generator_jacobian(const Vec& xi, const Vec& x) const {
  if (ev_.generator_jacobian && numerics_.use_exact_derivatives) return ev_.generator_jacobian(xi, x);
  Mat out(chart_dim_, chart_dim_);
  const int levels = numerics_.fd.richardson_levels;
  for (Index k = 0; k < chart_dim_; ++k) {
    Vec e = Vec::Unit(chart_dim_, k);
    if (has_exact_generator()) {
      double h = safe_step(x, e, step_at(x));
      out.col(k) = fd::derivative([&](double s) -> Vec { return ev_.generator(xi, x + s * e); },
                                  h, levels);
    } else {
      double h = safe_step(x, e, mixed_step_at(x));
      double scale = std::max(1.0, xi.norm());
      out.col(k) = fd::mixed_derivative(
                       [&](double s, double t) -> Vec { return action((t / scale) * xi, x + s * e); },
                       h, levels) *
                   scale;
    }
  }
  return out;
}

Mat MechanicalGSystem::metric_derivative(const Vec& x, const Vec& v) const {
  if (v.norm() == 0.0) return Mat::Zero(chart_dim_, chart_dim_);
  double h = safe_step(x, v, step_at(x) / std::max(1.0, v.norm()));
  Mat d = fd::derivative([&](double t) -> Mat { return metric(x + t * v); }, h,
                         numerics_.fd.richardson_levels);
  return 0.5 * (d + d.transpose());
}

Vec Christoffel::contract(const Vec& u, const Vec& v) const {
  Vec out(static_cast<Index>(upper.size()));
  for (std::size_t k = 0; k < upper.size(); ++k) out(static_cast<Index>(k)) = u.dot(upper[k] * v);
  return out;
}

double Christoffel::symmetry_residual() const {
  double worst = 0.0;
  for (const Mat& m : upper) worst = std::max(worst, max_abs(m - m.transpose()));
  return worst;
}

Christoffel christoffel(const MechanicalGSystem& system, const Vec& x) {
  const Index n = system.chart_dim();
  std::vector<Mat> dg;
  dg.reserve(static_cast<std::size_t>(n));
  for (Index l = 0; l < n; ++l) dg.push_back(system.metric_derivative(x, Vec::Unit(n, l)));
  Eigen::LLT<Mat> llt(system.metric(x));
  if (llt.info() != Eigen::Success) throw DegeneracyError("metric is not positive definite");
  Mat ginv = llt.solve(Mat::Identity(n, n));
  // First-kind symbols Gamma_{l,ij} = (d_i g_jl + d_j g_il - d_l g_ij) / 2.
  std::vector<Mat> first(static_cast<std::size_t>(n), Mat(n, n));
  for (Index l = 0; l < n; ++l) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        first[l](i, j) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
      }
    }
  }
  Christoffel out;
  out.upper.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (Index k = 0; k < n; ++k) {
    for (Index l = 0; l < n; ++l) out.upper[k] += ginv(k, l) * first[l];
  }
  return out;
}

Mat locked_inertia(const MechanicalGSystem& system, const Vec& x) {
  Mat gen = system.generator_matrix(x);
  Mat i = gen.transpose() * system.metric(x) * gen;
  return 0.5 * (i + i.transpose());
}

Mat locked_inertia_derivative(const MechanicalGSystem& system, const Vec& x, const Vec& v) {
  const Index n = system.algebra().dim();
  if (v.norm() == 0.0) return Mat::Zero(n, n);
  double base = system.has_exact_generator() ? system.step_at(x) : system.mixed_step_at(x);
  double h = system.safe_step(x, v, base / std::max(1.0, v.norm()));
  Mat d = fd::derivative([&](double t) -> Mat { return locked_inertia(system, x + t * v); }, h,
                         system.numerics().fd.richardson_levels);
  return 0.5 * (d + d.transpose());
}

std::pair<Vec, Vec> PointFrame::split_algebra(const Vec& xi) const {
  const Index n = h.ambient_dim();
  Mat basis(n, n);
  basis << h.basis(), r.basis();
  Vec c = basis.colPivHouseholderQr().solve(xi);
  return {h.basis() * c.head(h.dim()), c.tail(r.dim())};
}

Mat PointFrame::slice_rep(const MechanicalGSystem& system, const Vec& zeta) const {
  return S.basis().transpose() * system.generator_jacobian(zeta, x) * S.basis();
}

PointFrame point_frame(const MechanicalGSystem& system, const Vec& x,
                       const Subspace& invariance_generators, const Subspace* r_override) {
  if (x.size() != system.chart_dim()) throw DimensionMismatch("point has wrong length");
  if (!system.in_domain(x)) throw ChartError("point lies outside the chart domain");
  const LieAlgebra& g = system.algebra();
  const double tol = system.numerics().rank_tol;
  PointFrame f;
  f.x = x;
  f.gen = system.generator_matrix(x);
  f.metric = system.metric(x);
  f.metric = 0.5 * (f.metric + f.metric.transpose()).eval();
  Eigen::LLT<Mat> llt(f.metric);
  if (llt.info() != Eigen::Success) throw DegeneracyError("metric is not positive definite");
  f.h = kernel_of(f.gen, tol);
  if (r_override) {
    require_complement(f.h, *r_override, tol);
    f.r = *r_override;
  } else {
    f.r = ortho_complement(f.h, g.inner_product(), Subspace::full(g.dim()), tol);
  }
  Subspace orbit = span_of(f.gen, tol);
  f.S = ortho_complement(orbit, BilinearForm::on_ambient(f.metric, FormKind::Symmetric),
                         Subspace::full(system.chart_dim()), tol);
  f.I_full = f.gen.transpose() * f.metric * f.gen;
  f.I_full = 0.5 * (f.I_full + f.I_full.transpose()).eval();
  f.slice_gram = f.S.basis().transpose() * f.metric * f.S.basis();
  f.slice_gram = 0.5 * (f.slice_gram + f.slice_gram.transpose()).eval();
  fill_r_dependent(f);
  f.christoffel = christoffel(system, x);
  f.invariance = measure_invariance(system, f, invariance_generators);
  return f;
}

PointFrame reframe(const MechanicalGSystem& system, const PointFrame& frame, const Subspace& r,
                   const Subspace& invariance_generators) {
  require_complement(frame.h, r, system.numerics().rank_tol);
  PointFrame f = frame;
  f.r = r;
  fill_r_dependent(f);
  f.invariance = measure_invariance(system, f, invariance_generators);
  return f;
}

Vec connection_K(const MechanicalGSystem& system, const CovectorCurve& curve) {
  auto [c0, p0] = curve(0.0);
  double h = system.step_at(c0);
  const int levels = system.numerics().fd.richardson_levels;
  Vec dc = fd::derivative([&](double t) -> Vec { return curve(t).first; }, h, levels);
  Vec dp = fd::derivative([&](double t) -> Vec { return curve(t).second; }, h, levels);
  Christoffel gamma = christoffel(system, c0);
  const Index n = system.chart_dim();
  Mat m = Mat::Zero(n, n);
  for (Index k = 0; k < n; ++k) m += p0(k) * gamma.upper[k];
  return dp - m.transpose() * dc;
}

Mat C_operator(const MechanicalGSystem& system, const PointFrame& frame, const Vec& v) {
  double res = frame.S.residual(v);
  if (res > 1e-8 * std::max(1.0, v.norm())) throw DomainError("C_operator: v is not in the slice", res);
  Mat out(frame.r.dim(), frame.S.dim());
  Mat gs = frame.metric * frame.S.basis();
  for (Index i = 0; i < frame.r.dim(); ++i) {
    Vec xi = frame.r.vector(i);
    Vec u = system.generator_jacobian(xi, frame.x) * v +
            frame.christoffel.contract(frame.gen_r.col(i), v);
    out.row(i) = (u.transpose() * gs);
  }
  return out;
}

Vec cotangent_momentum(const PointFrame& frame, const Vec& p) {
  if (p.size() != frame.gen.rows()) throw DimensionMismatch("covector has wrong length");
  return frame.gen.transpose() * p;
}

namespace {

Mat tangent_basis(const PointFrame& f) {
  Mat a(f.gen.rows(), f.r.dim() + f.S.dim());
  a << f.gen_r, f.S.basis();
  return a;
}

}  // namespace

TangentSplit split_tangent(const PointFrame& frame, const Vec& u) {
  Vec c = tangent_basis(frame).fullPivLu().solve(u);
  return {c.head(frame.r.dim()), c.tail(frame.S.dim())};
}

Vec join_tangent(const PointFrame& frame, const TangentSplit& t) {
  return frame.gen_r * t.xi_r + frame.S.basis() * t.a;
}

CotangentSplit split_cotangent(const PointFrame& frame, const Vec& gamma) {
  return {frame.gen_r.transpose() * gamma, frame.S.basis().transpose() * gamma};
}

Vec join_cotangent(const PointFrame& frame, const CotangentSplit& c) {
  Vec rhs(c.nu.size() + c.beta.size());
  rhs << c.nu, c.beta;
  return tangent_basis(frame).transpose().fullPivLu().solve(rhs);
}

CotangentSplit legendre(const PointFrame& frame, const TangentSplit& t) {
  return {frame.I_r * t.xi_r, frame.slice_gram * t.a};
}

TangentSplit legendre_inverse(const PointFrame& frame, const CotangentSplit& c) {
  return {frame.I_r.ldlt().solve(c.nu), frame.slice_gram.ldlt().solve(c.beta)};
}

double killing_residual(const MechanicalGSystem& system, const Vec& xi, const Vec& x) {
  Vec gen = system.generator(xi, x);
  Mat j = system.generator_jacobian(xi, x);
  Mat g = system.metric(x);
  Mat k = system.metric_derivative(x, gen) + j.transpose() * g + g * j;
  return max_abs(k) / std::max(1.0, max_abs(g));
}

double generator_bracket_residual(const MechanicalGSystem& system, const Vec& xi, const Vec& eta,
                                  const Vec& x) {
  Vec lie = system.generator_jacobian(eta, x) * system.generator(xi, x) -
            system.generator_jacobian(xi, x) * system.generator(eta, x);
  Vec expected = -system.generator(system.algebra().bracket(xi, eta), x);
  return relative_error(lie, expected);
}

}  // namespace slice
