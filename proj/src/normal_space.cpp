#include "slice/normal_space.hpp"

#include <algorithm>
#include <cmath>

namespace slice {

namespace {

constexpr double kBlockTol = 1e-8;

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Zeroes v when it is numerically negligible against scale.
Vec snap_to_zero(const Vec& v, double scale, double rank_tol) {
  Vec n(1);
  n(0) = v.norm();
  if (numerical_rank(n, rank_tol, scale) == 0) return Vec::Zero(v.size());
  return v;
}

/// Metric-orthogonal projector onto span(d) for the Gram matrix g, in the ambient coordinates of d.
Mat metric_projector(const Subspace& d, const Mat& g) {
  const Index n = d.ambient_dim();
  if (d.dim() == 0) return Mat::Zero(n, n);
  const Mat& b = d.basis();
  Mat gram = b.transpose() * g * b;
  return b * gram.ldlt().solve(b.transpose() * g);
}

Subspace span_of_images(const std::vector<Mat>& reps, const Vec& v, Index ambient, double rank_tol) {
  Mat cols(ambient, static_cast<Index>(reps.size()));
  for (std::size_t a = 0; a < reps.size(); ++a) cols.col(static_cast<Index>(a)) = reps[a] * v;
  return span_of(cols, rank_tol, v.norm());
}

}  // namespace

Vec IRep::stacked() const {
  Vec out(xi_r.size() + a.size() + nu.size() + beta.size());
  out << xi_r, a, nu, beta;
  return out;
}

IRep IRep::unstack(const Vec& v, Index dim_r, Index dim_s) {
  if (v.size() != 2 * (dim_r + dim_s)) throw DimensionMismatch("I-representation length mismatch");
  return {v.segment(0, dim_r), v.segment(dim_r, dim_s), v.segment(dim_r + dim_s, dim_r),
          v.segment(2 * dim_r + dim_s, dim_s)};
}

PointData analyze_point(const MechanicalGSystem& system, const Vec& x, const Vec& p_x) {
  const LieAlgebra& g = system.algebra();
  const Index n = g.dim();
  const double tol = system.numerics().rank_tol;
  if (p_x.size() != system.chart_dim()) throw DimensionMismatch("covector has wrong length");

  PointFrame f0 = point_frame(system, x, Subspace(n));
  double scale = std::max(1.0, p_x.norm()) * std::max(1.0, f0.gen.norm());
  Vec mu = snap_to_zero(cotangent_momentum(f0, p_x), scale, tol);
  Vec alpha = snap_to_zero(f0.S.basis().transpose() * p_x, std::max(1.0, p_x.norm()), tol);

  // g_px = {xi in h : xi . alpha = 0, ad*_xi mu = 0}.
  Subspace g_px(n);
  if (f0.h.dim() > 0) {
    Mat stacked(f0.S.dim() + n, f0.h.dim());
    for (Index a = 0; a < f0.h.dim(); ++a) {
      Vec zeta = f0.h.vector(a);
      stacked.col(a) << f0.slice_rep(system, zeta).transpose() * alpha, g.ad_star(zeta, mu);
    }
    Subspace coeffs = kernel_of(stacked, tol, alpha.norm() + mu.norm());
    g_px = Subspace::from_orthonormal(f0.h.basis() * coeffs.basis());
  }

  CoadjointSplitting sp = witt_artin_split(g, mu, f0.h, g_px, tol);
  PointFrame f = reframe(system, f0, sp.r(tol), g_px);

  Eigen::LLT<Mat> ir(f.I_r);
  if (f.r.dim() > 0 && ir.info() != Eigen::Success) {
    throw DegeneracyError("locked inertia is singular on r");
  }
  Vec eta = f.r.dim() > 0 ? Vec(ir.solve(f.r.basis().transpose() * mu)) : Vec(0);
  Vec s = f.S.dim() > 0 ? Vec(f.slice_gram.llt().solve(alpha)) : Vec(0);

  std::vector<Mat> rho_h, rho_hmu;
  for (Index a = 0; a < f.h.dim(); ++a) rho_h.push_back(f.slice_rep(system, f.h.vector(a)));
  for (Index a = 0; a < sp.h_mu.dim(); ++a) {
    rho_hmu.push_back(f.slice_rep(system, sp.h_mu.vector(a)));
  }
  const Index ds = f.S.dim();
  BilinearForm slice_metric = BilinearForm::on_ambient(f.slice_gram, FormKind::Symmetric);
  Subspace full_s = Subspace::full(ds);
  Subspace h_s = span_of_images(rho_h, s, ds, tol);
  Subspace h_mu_s = span_of_images(rho_hmu, s, ds, tol);
  Subspace b = ortho_complement(h_mu_s, slice_metric, full_s, tol);
  Subspace d = ortho_complement(h_mu_s, slice_metric, h_s, tol);
  Subspace ann = ortho_complement(h_s, slice_metric, full_s, tol);
  Mat pr1 = metric_projector(d, f.slice_gram);

  return PointData{std::move(f), p_x,  std::move(mu), std::move(alpha), std::move(eta),
                   std::move(s), std::move(g_px), std::move(sp), std::move(h_s),
                   std::move(h_mu_s), std::move(b), std::move(d), std::move(ann),
                   std::move(pr1)};
}

Vec covector_from_velocity(const MechanicalGSystem& system, const Vec& x, const Vec& eta,
                           const Vec& s) {
  if (eta.size() != system.algebra().dim()) throw DimensionMismatch("eta has wrong length");
  if (s.size() != system.chart_dim()) throw DimensionMismatch("s has wrong length");
  Mat gm = system.metric(x);
  Mat gen = system.generator_matrix(x);
  double off = (gen.transpose() * gm * s).norm();
  if (off > 1e-8 * std::max(1.0, s.norm()) * std::max(1.0, gen.norm())) {
    throw ConfigError("s is not orthogonal to the group orbit");
  }
  return gm * (gen * eta + s);
}

ClosedForms::ClosedForms(MechanicalGSystem system, PointData pd)
    : system_(std::move(system)), pd_(std::move(pd)) {
  const PointFrame& f = pd_.frame;
  for (Index j = 0; j < f.S.dim(); ++j) {
    di_slice_.push_back(locked_inertia_derivative(system_, f.x, f.S.vector(j)));
  }
  di_eta_s_ = locked_inertia_derivative(system_, f.x, f.gen_r * pd_.eta + pd_.s_chart());
  c_s_ = C_operator(system_, f, pd_.s_chart());
}

Mat ClosedForms::DI_slice(const Vec& w) const {
  const Index n = system_.algebra().dim();
  Mat out = Mat::Zero(n, n);
  for (Index j = 0; j < w.size(); ++j) out += w(j) * di_slice_[static_cast<std::size_t>(j)];
  return out;
}

Mat ClosedForms::rho(const Vec& zeta) const {
  return pd_.frame.slice_rep(system_, zeta);
}

IRep ClosedForms::lifted_generator(const Vec& xi) const {
  const PointFrame& f = pd_.frame;
  const LieAlgebra& g = system_.algebra();
  auto [xi_h, xi_r] = f.split_algebra(xi);
  Vec xr = f.r.basis() * xi_r;
  Vec eta = pd_.eta_algebra();
  Vec nu(f.r.dim());
  for (Index i = 0; i < f.r.dim(); ++i) {
    Vec ri = f.r.vector(i);
    nu(i) = 0.5 * (xr.dot(di_eta_s_ * ri) - pd_.mu.dot(g.bracket(xr, ri))) -
            pd_.mu.dot(g.bracket(xi_h, ri));
  }
  Vec beta = c_s_.transpose() * xi_r;
  for (Index j = 0; j < f.S.dim(); ++j) {
    beta(j) -= 0.5 * xr.dot(di_slice_[static_cast<std::size_t>(j)] * eta);
  }
  if (xi_h.norm() > 0.0 && f.S.dim() > 0) beta -= rho(xi_h).transpose() * pd_.alpha;
  return {xi_r, Vec::Zero(f.S.dim()), nu, beta};
}

Vec ClosedForms::f1(const Vec& gamma, const Vec& a) const {
  const PointFrame& f = pd_.frame;
  const LieAlgebra& g = system_.algebra();
  Vec ga = f.r.basis() * gamma;
  Vec eta = pd_.eta_algebra();
  Mat dia = DI_slice(a);
  Vec out = c_s_ * a;
  for (Index i = 0; i < f.r.dim(); ++i) {
    Vec ri = f.r.vector(i);
    out(i) += 0.5 * (ga.dot(di_eta_s_ * ri) - eta.dot(dia * ri) + pd_.mu.dot(g.bracket(ga, ri)));
  }
  return out;
}

Vec ClosedForms::f2(const Vec& gamma) const {
  const PointFrame& f = pd_.frame;
  Vec ga = f.r.basis() * gamma;
  Vec eta = pd_.eta_algebra();
  Vec out = c_s_.transpose() * gamma;
  for (Index j = 0; j < f.S.dim(); ++j) {
    out(j) -= 0.5 * eta.dot(di_slice_[static_cast<std::size_t>(j)] * ga);
  }
  return out;
}

namespace {

Subspace lifted_span(const ClosedForms& cf, const Subspace& algebra_sub) {
  const PointData& pd = cf.pd();
  Index len = 2 * (pd.dim_r() + pd.dim_s());
  Mat cols(len, algebra_sub.dim());
  for (Index a = 0; a < algebra_sub.dim(); ++a) {
    cols.col(a) = cf.lifted_generator(algebra_sub.vector(a)).stacked();
  }
  return span_of(cols, cf.system().numerics().rank_tol, 1.0);
}

}  // namespace

Subspace g_mu_orbit_directions(const ClosedForms& cf) {
  return lifted_span(cf, cf.pd().splitting.g_mu);
}

Subspace g_orbit_directions(const ClosedForms& cf) {
  return lifted_span(cf, Subspace::full(cf.system().algebra().dim()));
}

Vec diamond(const Vec& l, const Vec& o, const std::vector<Mat>& rep) {
  Vec out(static_cast<Index>(rep.size()));
  for (std::size_t a = 0; a < rep.size(); ++a) {
    if (rep[a].cols() != l.size() || rep[a].rows() != o.size()) {
      throw DimensionMismatch("diamond: representation matrix has wrong shape");
    }
    out(static_cast<Index>(a)) = o.dot(rep[a] * l);
  }
  return out;
}

LinearMapRep j_map(const ClosedForms& cf) {
  const PointData& pd = cf.pd();
  const LieAlgebra& g = cf.system().algebra();
  const Subspace& d = pd.h_mu_s_perp;
  const Subspace& k = pd.splitting.k;
  const Subspace& h = pd.frame.h;
  Mat out(k.dim(), d.dim());
  if (d.dim() == 0) return LinearMapRep(d, k, out);
  std::vector<Mat> rep;
  for (Index a = 0; a < h.dim(); ++a) rep.push_back(cf.rho(h.vector(a)));
  // <mu, [k_l, zeta_a]> c_l = <alpha, zeta_a . b> for every zeta_a in h.
  Mat m(h.dim(), k.dim());
  for (Index a = 0; a < h.dim(); ++a) {
    for (Index l = 0; l < k.dim(); ++l) m(a, l) = pd.mu.dot(g.bracket(k.vector(l), h.vector(a)));
  }
  for (Index c = 0; c < d.dim(); ++c) {
    Vec rhs = diamond(d.vector(c), pd.alpha, rep);
    try {
      out.col(c) = solve_exact(m, rhs, cf.system().numerics().rank_tol);
    } catch (const NumericalError& e) {
      throw SplittingError(std::string("j_map: ") + e.what(), e.residual());
    }
  }
  return LinearMapRep(d, k, out);
}

std::string to_string(CaseFlag f) {
  switch (f) {
    case CaseFlag::TotallyIsotropic: return "TotallyIsotropic";
    case CaseFlag::VerticalCovector: return "VerticalCovector";
    case CaseFlag::LocallyFree: return "LocallyFree";
    case CaseFlag::TrivialSliceAction: return "TrivialSliceAction";
    case CaseFlag::HsubGmu: return "HsubGmu";
    case CaseFlag::Generic: return "Generic";
  }
  return "Unknown";
}

Mat canonical_omega(Index dim_r, Index dim_s) {
  const Index q = dim_r + dim_s;
  Mat out = Mat::Zero(2 * q, 2 * q);
  out.topRightCorner(q, q) = Mat::Identity(q, q);
  out.bottomLeftCorner(q, q) = -Mat::Identity(q, q);
  return out;
}

Mat gpx_action_stacked(const ClosedForms& cf, const Vec& zeta) {
  const PointData& pd = cf.pd();
  const Subspace& r = pd.frame.r;
  const Index dr = pd.dim_r();
  const Index ds = pd.dim_s();
  Mat ad_r = r.basis().transpose() * cf.system().algebra().ad(zeta) * r.basis();
  Mat rho = ds > 0 ? cf.rho(zeta) : Mat(0, 0);
  Mat out = Mat::Zero(2 * (dr + ds), 2 * (dr + ds));
  out.block(0, 0, dr, dr) = ad_r;
  out.block(dr, dr, ds, ds) = rho;
  out.block(dr + ds, dr + ds, dr, dr) = -ad_r.transpose();
  out.block(2 * dr + ds, 2 * dr + ds, ds, ds) = -rho.transpose();
  return out;
}

NormalSpaceResult build_normal_space(const ClosedForms& cf) {
  const PointData& pd = cf.pd();
  const LieAlgebra& g = cf.system().algebra();
  const CoadjointSplitting& sp = pd.splitting;
  const Subspace& r = pd.frame.r;
  const double tol = cf.system().numerics().rank_tol;
  const Index dq = sp.q_mu.dim();
  const Index db = pd.B.dim();
  const Index dv = dq + 2 * db;
  const Index len = 2 * (pd.dim_r() + pd.dim_s());
  const Mat& gs = pd.frame.slice_gram;
  const Mat& bm = pd.B.basis();

  NormalSpaceResult ns;
  ns.dim_N = dq;
  ns.dim_B = db;
  ns.j = j_map(cf);
  ns.B_star = db > 0 ? Mat(gs * bm * (bm.transpose() * gs * bm).inverse()) : Mat(pd.dim_s(), 0);

  ns.V_basis.resize(len, dv);
  for (Index i = 0; i < dq; ++i) {
    Vec gamma = r.basis().transpose() * sp.q_mu.vector(i);
    Vec zero_a = Vec::Zero(pd.dim_s());
    ns.V_basis.col(i) = IRep{gamma, zero_a, cf.f1(gamma, zero_a), cf.f2(gamma)}.stacked();
  }
  for (Index kk = 0; kk < db; ++kk) {
    Vec b = pd.B.vector(kk);
    Vec d_coords = pd.h_mu_s_perp.basis().transpose() * (pd.pr1 * b);
    Vec gamma_alg = sp.k.basis() * (ns.j.matrix * d_coords);
    Vec gamma = r.basis().transpose() * gamma_alg;
    ns.V_basis.col(dq + kk) = IRep{gamma, b, cf.f1(gamma, b), cf.f2(gamma)}.stacked();
  }
  for (Index l = 0; l < db; ++l) {
    ns.V_basis.col(dq + db + l) = IRep{Vec::Zero(pd.dim_r()), Vec::Zero(pd.dim_s()),
                                       Vec::Zero(pd.dim_r()), ns.B_star.col(l)}
                                      .stacked();
  }
  ns.V = span_of(ns.V_basis, tol, 1.0);
  if (ns.V.dim() != dv) throw DegeneracyError("build_normal_space: V basis is rank deficient");

  Mat om = canonical_omega(pd.dim_r(), pd.dim_s());
  ns.omega = ns.V_basis.transpose() * om * ns.V_basis;
  ns.omega_expected = Mat::Zero(dv, dv);
  for (Index i = 0; i < dq; ++i) {
    for (Index j = 0; j < dq; ++j) {
      ns.omega_expected(i, j) = kks_value(g, pd.mu, sp.q_mu.vector(i), sp.q_mu.vector(j));
    }
  }
  ns.omega_expected.block(dq, dq + db, db, db) = Mat::Identity(db, db);
  ns.omega_expected.block(dq + db, dq, db, db) = -Mat::Identity(db, db);
  ns.block_residual = relative_error(ns.omega, ns.omega_expected);
  if (ns.block_residual > kBlockTol) {
    throw SplittingError("build_normal_space: omega is not in block normal form",
                         ns.block_residual);
  }

  // iota takes N_mu coordinates in the V_mu basis; convert through q_mu.
  Mat orbit_map = g.ad_star_columns(pd.mu);
  Mat t = sp.V_mu.basis().transpose() * orbit_map * sp.q_mu.basis();
  Mat conv = Mat::Identity(dv, dv);
  if (dq > 0) conv.topLeftCorner(dq, dq) = t.inverse();
  ns.iota = ns.V_basis * conv;

  Mat oq = orbit_map * sp.q_mu.basis();
  Eigen::CompleteOrthogonalDecomposition<Mat> oq_solver;
  if (dq > 0) oq_solver.compute(oq);
  for (Index z = 0; z < pd.g_px.dim(); ++z) {
    Vec zeta = pd.g_px.vector(z);
    Mat rho = pd.dim_s() > 0 ? cf.rho(zeta) : Mat(0, 0);
    Mat m = db > 0 ? Mat(ns.B_star.transpose() * rho * bm) : Mat(0, 0);
    Mat q = Mat::Zero(dv, dv);
    for (Index i = 0; i < dq; ++i) {
      for (Index j = 0; j < dq; ++j) {
        q(i, j) = 0.5 * pd.mu.dot(g.bracket(sp.q_mu.vector(i),
                                            g.bracket(zeta, sp.q_mu.vector(j))));
      }
    }
    q.topLeftCorner(dq, dq) = 0.5 * (q.topLeftCorner(dq, dq) + q.topLeftCorner(dq, dq).transpose()).eval();
    q.block(dq, dq + db, db, db) = 0.5 * m.transpose();
    q.block(dq + db, dq, db, db) = 0.5 * m;
    ns.JN_tensor.push_back(q);

    Mat act = Mat::Zero(dv, dv);
    if (dq > 0) {
      Mat images(g.dim(), dq);
      for (Index j = 0; j < dq; ++j) images.col(j) = g.bracket(zeta, sp.q_mu.vector(j));
      act.topLeftCorner(dq, dq) = oq_solver.solve(Mat(orbit_map * images));
    }
    act.block(dq, dq, db, db) = m;
    act.block(dq + db, dq + db, db, db) = -m.transpose();
    ns.gpx_action_V.push_back(act);
  }

  const Index n = g.dim();
  if (sp.g_mu.dim() == n) ns.case_flags.insert(CaseFlag::TotallyIsotropic);
  if (pd.alpha.norm() == 0.0) ns.case_flags.insert(CaseFlag::VerticalCovector);
  if (pd.frame.h.dim() == 0) ns.case_flags.insert(CaseFlag::LocallyFree);
  double slice_action = 0.0;
  for (Index a = 0; a < pd.frame.h.dim(); ++a) {
    if (pd.dim_s() > 0) slice_action = std::max(slice_action, max_abs(cf.rho(pd.frame.h.vector(a))));
  }
  if (slice_action <= tol) ns.case_flags.insert(CaseFlag::TrivialSliceAction);
  if (sp.h_mu.dim() == pd.frame.h.dim()) ns.case_flags.insert(CaseFlag::HsubGmu);
  if (ns.case_flags.empty()) ns.case_flags.insert(CaseFlag::Generic);
  return ns;
}

Vec momentum_JN(const NormalSpaceResult& ns, const Vec& w) {
  Vec out(static_cast<Index>(ns.JN_tensor.size()));
  for (std::size_t z = 0; z < ns.JN_tensor.size(); ++z) {
    out(static_cast<Index>(z)) = w.dot(ns.JN_tensor[z] * w);
  }
  return out;
}

Vec momentum_JN_from_action(const NormalSpaceResult& ns, const Vec& w) {
  Vec out(static_cast<Index>(ns.gpx_action_V.size()));
  for (std::size_t z = 0; z < ns.gpx_action_V.size(); ++z) {
    out(static_cast<Index>(z)) = 0.5 * (ns.gpx_action_V[z] * w).dot(ns.omega * w);
  }
  return out;
}

}  // namespace slice
