#include "slice/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace slice::verify {

namespace {

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

ResidualReport vacuous(std::string name, double tol, std::string why) {
  return oracles::make_report(std::move(name), 0.0, tol, "vacuous: " + why);
}

std::string join_flags(const std::set<CaseFlag>& flags) {
  std::string out;
  for (CaseFlag f : flags) {
    if (!out.empty()) out += ",";
    out += to_string(f);
  }
  return out;
}

bool has_special_flag(const std::set<CaseFlag>& flags) {
  for (CaseFlag f : flags) {
    if (f != CaseFlag::Generic) return true;
  }
  return false;
}

// Smooth curve in T*Q through (x, p) with random velocity and acceleration.
CovectorCurve random_curve(std::mt19937_64& rng, const Vec& x, const Vec& p) {
  const Index n = x.size();
  Vec u1 = random_vector(rng, n, 0.5);
  Vec u2 = random_vector(rng, n, 0.5);
  Vec q1 = random_vector(rng, n, 0.5);
  Vec q2 = random_vector(rng, n, 0.5);
  return [=](double t) {
    return std::make_pair(Vec(x + std::sin(t) * u1 + (1.0 - std::cos(t)) * u2),
                          Vec(p + std::sin(t) * q1 + t * t * q2));
  };
}

}  // namespace

Vec random_vector(std::mt19937_64& rng, Index n, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

std::shared_ptr<const PointContext> make_context(const MechanicalGSystem& system, const Vec& x,
                                                 const Vec& p, std::string label,
                                                 std::optional<GoldenPoint> golden) {
  PointData pd = analyze_point(system, x, p);
  ClosedForms cf(system, std::move(pd));
  NormalSpaceResult ns = build_normal_space(cf);
  return std::make_shared<const PointContext>(
      PointContext{std::move(label), system, x, p, std::move(cf), std::move(ns), std::move(golden)});
}

ResidualReport check_theorem_oracle(const PointContext& c) {
  const Index n = c.system.algebra().dim();
  double worst = 0.0;
  Index at = 0;
  for (Index i = 0; i < n; ++i) {
    Vec xi = Vec::Unit(n, i);
    Vec closed = c.cf.lifted_generator(xi).stacked();
    Vec fd = oracles::fd_lifted_generator(c.system, c.pd().frame, xi, c.p).stacked();
    double e = relative_error(closed, fd);
    if (e > worst) {
      worst = e;
      at = i;
    }
  }
  return oracles::make_report("theorem_oracle", worst, 1e-5,
                              "worst basis index " + std::to_string(at));
}

ResidualReport check_normal_form(const PointContext& c) {
  return oracles::make_report("normal_form", c.ns.block_residual, 1e-8);
}

ResidualReport check_dimension_law(const PointContext& c) {
  const PointData& pd = c.pd();
  Index expected = 2 * pd.dim_s() + c.system.algebra().dim() + 2 * pd.g_px.dim() -
                   2 * pd.frame.h.dim() - pd.splitting.g_mu.dim();
  Index got = c.ns.V.dim();
  return oracles::make_report("dimension_law", std::abs(static_cast<double>(got - expected)), 0.0,
                              "dim V=" + std::to_string(got) +
                                  " formula=" + std::to_string(expected));
}

ResidualReport check_containment(const PointContext& c) {
  const PointData& pd = c.pd();
  const Index n = c.system.algebra().dim();
  Mat om = canonical_omega(pd.dim_r(), pd.dim_s());
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    Vec l = c.cf.lifted_generator(Vec::Unit(n, i)).stacked();
    Vec pair = c.ns.V.basis().transpose() * om * l;
    if (pair.size() > 0) worst = std::max(worst, max_abs(pair) / std::max(1.0, l.norm()));
  }
  return oracles::make_report("containment", worst, 1e-8);
}

ResidualReport check_complementarity(const PointContext& c) {
  const PointData& pd = c.pd();
  const double tol = c.system.numerics().rank_tol;
  const Index len = 2 * (pd.dim_r() + pd.dim_s());
  Subspace orbit = g_orbit_directions(c.cf);
  Subspace orbit_mu = g_mu_orbit_directions(c.cf);
  auto om = BilinearForm::on_ambient(canonical_omega(pd.dim_r(), pd.dim_s()), FormKind::Skew);
  Subspace annihilator = symplectic_orthogonal(orbit, om, Subspace::full(len), tol);
  Subspace both = sum(c.ns.V, orbit_mu, tol);
  Index meet = intersect(c.ns.V, orbit_mu, tol).dim();
  Index dim_gap = std::abs(c.ns.V.dim() + orbit_mu.dim() - annihilator.dim());
  double res = static_cast<double>(meet + dim_gap);
  res = std::max(res, annihilator.containment_residual(both));
  res = std::max(res, both.containment_residual(annihilator));
  std::ostringstream ctx;
  ctx << "dim V=" << c.ns.V.dim() << " dim g_mu.p=" << orbit_mu.dim()
      << " dim (g.p)^omega=" << annihilator.dim() << " dim meet=" << meet;
  return oracles::make_report("complementarity", res, 1e-8, ctx.str());
}

ResidualReport check_special_cases_j(const PointContext& c) {
  if (!has_special_flag(c.ns.case_flags)) {
    return vacuous("special_cases_j", 1e-9, "no special flag set");
  }
  return oracles::make_report("special_cases_j", max_abs(c.ns.j.matrix), 1e-9,
                              "flags " + join_flags(c.ns.case_flags));
}

ResidualReport check_special_cases_B(const PointContext& c) {
  if (!has_special_flag(c.ns.case_flags)) {
    return vacuous("special_cases_B", 1e-8, "no special flag set");
  }
  const PointData& pd = c.pd();
  double res = std::abs(static_cast<double>(pd.B.dim() - pd.h_alpha_ann.dim()));
  res = std::max(res, pd.B.containment_residual(pd.h_alpha_ann));
  res = std::max(res, pd.h_alpha_ann.containment_residual(pd.B));
  return oracles::make_report("special_cases_B", res, 1e-8,
                              "dim B=" + std::to_string(pd.B.dim()) +
                                  " dim [h.alpha]0=" + std::to_string(pd.h_alpha_ann.dim()));
}

namespace {

std::pair<ResidualReport, ResidualReport> locked_inertia_samples(const PointContext& c,
                                                                 int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = c.system.algebra().dim();
  double w1 = 0.0;
  double w2 = 0.0;
  for (int k = 0; k < samples; ++k) {
    Vec xi = random_vector(rng, n);
    Vec eta = random_vector(rng, n);
    Vec lambda = random_vector(rng, n);
    Vec zeta = random_vector(rng, n, 0.5);
    auto [a, b] = oracles::locked_inertia_identity_check(c.system, c.x, xi, eta, lambda, zeta);
    w1 = std::max(w1, a.residual);
    w2 = std::max(w2, b.residual);
  }
  return {oracles::make_report("locked_inertia_equivariance", w1, 1e-6),
          oracles::make_report("locked_inertia_infinitesimal", w2, 1e-6)};
}

}  // namespace

ResidualReport check_locked_inertia_equivariance(const PointContext& c, int samples,
                                                 std::uint64_t seed) {
  return locked_inertia_samples(c, samples, seed).first;
}

ResidualReport check_locked_inertia_infinitesimal(const PointContext& c, int samples,
                                                  std::uint64_t seed) {
  return locked_inertia_samples(c, samples, seed).second;
}

ResidualReport check_kks_welldefined(const PointContext& c, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const LieAlgebra& g = c.system.algebra();
  const Subspace& gmu = c.pd().splitting.g_mu;
  const Vec& mu = c.pd().mu;
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Vec l1 = random_vector(rng, g.dim());
    Vec l2 = random_vector(rng, g.dim());
    Vec z1 = gmu.from_coordinates(random_vector(rng, gmu.dim()));
    Vec z2 = gmu.from_coordinates(random_vector(rng, gmu.dim()));
    double base = kks_value(g, mu, l1, l2);
    double moved = kks_value(g, mu, l1 + z1, l2 + z2);
    worst = std::max(worst, std::abs(moved - base) / std::max(1.0, std::abs(base)));
  }
  return oracles::make_report("kks_welldefined", worst, 1e-10);
}

ResidualReport check_kks_skew(const PointContext& c) {
  const LieAlgebra& g = c.system.algebra();
  const Vec& mu = c.pd().mu;
  double worst = 0.0;
  for (Index i = 0; i < g.dim(); ++i) {
    for (Index j = 0; j < g.dim(); ++j) {
      Vec a = Vec::Unit(g.dim(), i);
      Vec b = Vec::Unit(g.dim(), j);
      worst = std::max(worst, std::abs(kks_value(g, mu, a, b) + kks_value(g, mu, b, a)));
    }
  }
  return oracles::make_report("kks_skew", worst, 1e-10);
}

ResidualReport check_canonical_form(const PointContext& c, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    CovectorCurve y1 = random_curve(rng, c.x, c.p);
    CovectorCurve y2 = random_curve(rng, c.x, c.p);
    worst = std::max(worst, oracles::chart_canonical_form_check(c.system, y1, y2).residual);
  }
  return oracles::make_report("canonical_form", worst, 1e-6);
}

ResidualReport check_momentum_JN(const PointContext& c, int samples, std::uint64_t seed) {
  const NormalSpaceResult& ns = c.ns;
  if (ns.JN_tensor.empty()) return vacuous("momentum_JN", 1e-10, "g_px = 0");
  std::mt19937_64 rng(seed);
  const PointData& pd = c.pd();
  Mat om = canonical_omega(pd.dim_r(), pd.dim_s());
  const Index dv = ns.V_basis.cols();
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Vec w = random_vector(rng, dv);
    Vec closed = momentum_JN(ns, w);
    Vec by_action = momentum_JN_from_action(ns, w);
    // Same quantity through the linearized action on the ambient coordinates.
    Vec v = ns.V_basis * w;
    Vec ambient(closed.size());
    for (Index z = 0; z < pd.g_px.dim(); ++z) {
      Mat act = gpx_action_stacked(c.cf, pd.g_px.vector(z));
      ambient(z) = 0.5 * (act * v).dot(om * v);
    }
    worst = std::max({worst, relative_error(closed, by_action), relative_error(closed, ambient)});
  }
  return oracles::make_report("momentum_JN", worst, 1e-10);
}

ResidualReport check_equivariance_DI(const PointContext& c, int samples, std::uint64_t seed) {
  const PointFrame& fr = c.pd().frame;
  if (fr.h.dim() == 0) return vacuous("equivariance_DI", 1e-5, "h = 0");
  if (fr.S.dim() == 0) return vacuous("equivariance_DI", 1e-5, "S = 0");
  std::mt19937_64 rng(seed);
  const LieAlgebra& g = c.system.algebra();
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Vec xi = random_vector(rng, g.dim());
    Vec lambda = random_vector(rng, g.dim());
    Vec v = random_vector(rng, fr.S.dim());
    for (Index a = 0; a < fr.h.dim(); ++a) {
      Vec zeta = fr.h.vector(a);
      Vec zv = fr.slice_rep(c.system, zeta) * v;
      double t1 = xi.dot(locked_inertia_derivative(c.system, c.x, fr.S.basis() * zv) * lambda);
      Mat dv = locked_inertia_derivative(c.system, c.x, fr.S.basis() * v);
      double t2 = g.bracket(zeta, xi).dot(dv * lambda);
      double t3 = xi.dot(dv * g.bracket(zeta, lambda));
      double scale = std::max({1.0, std::abs(t1), std::abs(t2), std::abs(t3)});
      worst = std::max(worst, std::abs(t1 + t2 + t3) / scale);
    }
  }
  return oracles::make_report("equivariance_DI", worst, 1e-5);
}

ResidualReport check_equivariance_C(const PointContext& c, int samples, std::uint64_t seed) {
  const PointData& pd = c.pd();
  const PointFrame& fr = pd.frame;
  if (pd.g_px.dim() == 0) return vacuous("equivariance_C", 1e-5, "g_px = 0");
  if (fr.S.dim() == 0 || fr.r.dim() == 0) return vacuous("equivariance_C", 1e-5, "r or S = 0");
  std::mt19937_64 rng(seed);
  const LieAlgebra& g = c.system.algebra();
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Vec eta = random_vector(rng, fr.r.dim());
    Vec v = random_vector(rng, fr.S.dim());
    Vec w = random_vector(rng, fr.S.dim());
    Mat cv = C_operator(c.system, fr, fr.S.basis() * v);
    for (Index z = 0; z < pd.g_px.dim(); ++z) {
      Vec zeta = pd.g_px.vector(z);
      Mat rho = fr.slice_rep(c.system, zeta);
      Mat ad_r = fr.r.basis().transpose() * g.ad(zeta) * fr.r.basis();
      Mat czv = C_operator(c.system, fr, fr.S.basis() * (rho * v));
      double t1 = eta.dot(czv * w);
      double t2 = (ad_r * eta).dot(cv * w);
      double t3 = eta.dot(cv * (rho * w));
      double scale = std::max({1.0, std::abs(t1), std::abs(t2), std::abs(t3)});
      worst = std::max(worst, std::abs(t1 + t2 + t3) / scale);
    }
  }
  return oracles::make_report("equivariance_C", worst, 1e-5);
}

ResidualReport check_V_invariance(const PointContext& c) {
  const PointData& pd = c.pd();
  if (pd.g_px.dim() == 0) return vacuous("V_invariance", 1e-6, "g_px = 0");
  double worst = 0.0;
  for (Index z = 0; z < pd.g_px.dim(); ++z) {
    Mat act = gpx_action_stacked(c.cf, pd.g_px.vector(z));
    for (Index i = 0; i < c.ns.V.dim(); ++i) {
      Vec image = act * c.ns.V.vector(i);
      worst = std::max(worst, c.ns.V.residual(image));
    }
  }
  return oracles::make_report("V_invariance", worst, 1e-6);
}

ResidualReport check_covariant_cross(const PointContext& c, int samples, std::uint64_t seed) {
  const PointFrame& fr = c.pd().frame;
  if (fr.S.dim() == 0) return vacuous("covariant_cross_check", 1e-5, "S = 0");
  std::mt19937_64 rng(seed);
  const Index n = c.system.algebra().dim();
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Vec s = fr.S.basis() * random_vector(rng, fr.S.dim(), 0.5);
    Vec xi = random_vector(rng, n);
    Vec lambda = random_vector(rng, n);
    worst = std::max(worst, oracles::covariant_cross_check(c.system, fr, s, xi, lambda).residual);
  }
  return oracles::make_report("covariant_cross_check", worst, 1e-5);
}

ResidualReport check_generator_bracket(const PointContext& c, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = c.system.algebra().dim();
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Vec xi = random_vector(rng, n);
    Vec eta = random_vector(rng, n);
    worst = std::max(worst, generator_bracket_residual(c.system, xi, eta, c.x));
  }
  return oracles::make_report("generator_bracket_law", worst, 1e-5);
}

ResidualReport check_split_roundtrip(const PointContext& c, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const PointFrame& fr = c.pd().frame;
  const Index n = c.system.chart_dim();
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Vec u = random_vector(rng, n);
    Vec gamma = random_vector(rng, n);
    worst = std::max(worst, relative_error(join_tangent(fr, split_tangent(fr, u)), u));
    worst = std::max(worst, relative_error(join_cotangent(fr, split_cotangent(fr, gamma)), gamma));
    TangentSplit t = split_tangent(fr, u);
    TangentSplit back = legendre_inverse(fr, legendre(fr, t));
    worst = std::max(worst, relative_error(back.xi_r, t.xi_r));
    worst = std::max(worst, relative_error(back.a, t.a));
  }
  return oracles::make_report("split_roundtrip", worst, 1e-12);
}

ResidualReport check_witt_artin(const PointContext& c) {
  const SplittingReport& rep = c.pd().splitting.invariance_report;
  std::string worst_name;
  double worst = 0.0;
  for (const auto& r : rep.residuals) {
    if (r.value >= worst) {
      worst = r.value;
      worst_name = r.name;
    }
  }
  return oracles::make_report("witt_artin_residuals", worst, 1e-8,
                              worst_name.empty() ? "" : "worst " + worst_name);
}

ResidualReport check_metric_invariance(const PointContext& c) {
  const Index n = c.system.algebra().dim();
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    worst = std::max(worst, killing_residual(c.system, Vec::Unit(n, i), c.x));
  }
  return oracles::make_report("metric_invariance", worst, 1e-6);
}

ResidualReport check_jacobi(const PointContext& c) {
  const LieAlgebra& g = c.system.algebra();
  return oracles::make_report("jacobi", std::max(g.jacobi_residual(), g.antisymmetry_residual()),
                              1e-10);
}

ResidualReport check_frame_invariance(const PointContext& c) {
  const InvarianceReport& inv = c.pd().frame.invariance;
  return oracles::make_report("frame_invariance", inv.residual, c.system.numerics().invariance_tol,
                              inv.vacuous ? "vacuous: g_px = 0" : "");
}

ResidualReport check_inertia_kernel(const PointContext& c) {
  const PointFrame& fr = c.pd().frame;
  Eigen::JacobiSVD<Mat> svd(fr.I_full);
  Index rank = numerical_rank(svd.singularValues(), c.system.numerics().rank_tol);
  Index expected = c.system.algebra().dim() - fr.h.dim();
  return oracles::make_report("locked_inertia_kernel",
                              std::abs(static_cast<double>(rank - expected)), 0.0,
                              "rank I=" + std::to_string(rank) +
                                  " dim g - dim h=" + std::to_string(expected));
}

std::map<std::string, Index> computed_dims(const PointContext& c) {
  const PointData& pd = c.pd();
  const CoadjointSplitting& sp = pd.splitting;
  return {{"g", c.system.algebra().dim()},
          {"h", pd.frame.h.dim()},
          {"r", pd.dim_r()},
          {"S", pd.dim_s()},
          {"g_mu", sp.g_mu.dim()},
          {"h_mu", sp.h_mu.dim()},
          {"p", sp.p.dim()},
          {"q_mu", sp.q_mu.dim()},
          {"k", sp.k.dim()},
          {"B", pd.B.dim()},
          {"V", c.ns.V.dim()},
          {"g_px", pd.g_px.dim()}};
}

ResidualReport check_golden_dims(const PointContext& c) {
  if (!c.golden) return vacuous("golden_dims", 0.0, "not a golden point");
  auto got = computed_dims(c);
  int mismatches = 0;
  std::string ctx;
  for (const auto& [key, want] : c.golden->dims) {
    auto it = got.find(key);
    Index have = it == got.end() ? -1 : it->second;
    if (have != want) {
      ++mismatches;
      ctx += key + "=" + std::to_string(have) + " (expected " + std::to_string(want) + ") ";
    }
  }
  return oracles::make_report("golden_dims", mismatches, 0.0, ctx);
}

ResidualReport check_golden_flags(const PointContext& c) {
  if (!c.golden) return vacuous("golden_flags", 0.0, "not a golden point");
  int mismatches = 0;
  std::string ctx;
  if (c.ns.case_flags != c.golden->flags) {
    ++mismatches;
    ctx = "flags " + join_flags(c.ns.case_flags) + " (expected " + join_flags(c.golden->flags) +
          ") ";
  }
  bool j_nonzero = max_abs(c.ns.j.matrix) > 1e-9;
  if (j_nonzero != c.golden->j_nonzero) {
    ++mismatches;
    ctx += std::string("j ") + (j_nonzero ? "nonzero" : "zero");
  }
  return oracles::make_report("golden_flags", mismatches, 0.0, ctx);
}

unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SLICE_NUM_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

std::vector<ResidualReport> run_point_suite(const MechanicalGSystem& system, const Vec& x,
                                            const Vec& p, const SuiteOptions& opt,
                                            std::optional<GoldenPoint> golden) {
  std::shared_ptr<const PointContext> ctx;
  std::vector<ResidualReport> out;
  try {
    ctx = make_context(system, x, p, golden ? golden->label : "", golden);
  } catch (const NumericalError& e) {
    double res = e.residual() > 0.0 ? e.residual() : std::numeric_limits<double>::infinity();
    out.push_back({"pipeline", res, opt.check_tol.value_or(0.0), false, e.what()});
    return out;
  }
  const PointContext& c = *ctx;
  const int n = opt.samples;
  auto seed = [&](std::uint64_t k) { return opt.seed * 1000003ULL + k; };
  std::vector<std::pair<std::string, std::function<ResidualReport()>>> tasks = {
      {"theorem_oracle", [&] { return check_theorem_oracle(c); }},
      {"normal_form", [&] { return check_normal_form(c); }},
      {"dimension_law", [&] { return check_dimension_law(c); }},
      {"containment", [&] { return check_containment(c); }},
      {"complementarity", [&] { return check_complementarity(c); }},
      {"special_cases_j", [&] { return check_special_cases_j(c); }},
      {"special_cases_B", [&] { return check_special_cases_B(c); }},
      {"locked_inertia_equivariance",
       [&] { return check_locked_inertia_equivariance(c, n, seed(1)); }},
      {"locked_inertia_infinitesimal",
       [&] { return check_locked_inertia_infinitesimal(c, n, seed(1)); }},
      {"kks_welldefined", [&] { return check_kks_welldefined(c, n, seed(2)); }},
      {"kks_skew", [&] { return check_kks_skew(c); }},
      {"canonical_form", [&] { return check_canonical_form(c, n, seed(3)); }},
      {"momentum_JN", [&] { return check_momentum_JN(c, n, seed(4)); }},
      {"equivariance_DI", [&] { return check_equivariance_DI(c, n, seed(5)); }},
      {"equivariance_C", [&] { return check_equivariance_C(c, n, seed(6)); }},
      {"V_invariance", [&] { return check_V_invariance(c); }},
      {"covariant_cross_check", [&] { return check_covariant_cross(c, n, seed(7)); }},
      {"generator_bracket_law", [&] { return check_generator_bracket(c, n, seed(8)); }},
      {"split_roundtrip", [&] { return check_split_roundtrip(c, n, seed(9)); }},
      {"witt_artin_residuals", [&] { return check_witt_artin(c); }},
      {"metric_invariance", [&] { return check_metric_invariance(c); }},
      {"jacobi", [&] { return check_jacobi(c); }},
      {"frame_invariance", [&] { return check_frame_invariance(c); }},
      {"locked_inertia_kernel", [&] { return check_inertia_kernel(c); }},
      {"golden_dims", [&] { return check_golden_dims(c); }},
      {"golden_flags", [&] { return check_golden_flags(c); }},
  };

  out.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        out[i] = tasks[i].second();
      } catch (const Error& e) {
        double res = std::numeric_limits<double>::infinity();
        if (auto* ne = dynamic_cast<const NumericalError*>(&e); ne && ne->residual() > 0.0) {
          res = ne->residual();
        }
        out[i] = {tasks[i].first, res, 0.0, false, e.what()};
      }
    }
  };
  unsigned threads = std::clamp<unsigned>(opt.threads, 1u, static_cast<unsigned>(tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (opt.check_tol) {
    for (auto& r : out) {
      r.tolerance = *opt.check_tol;
      r.pass = std::isfinite(r.residual) && r.residual <= r.tolerance;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ResidualReport& a, const ResidualReport& b) { return a.name < b.name; });
  return out;
}

}  // namespace slice::verify
