#include <doctest.h>

#include <random>

#include "slice/errors.hpp"
#include "slice/normal_space.hpp"
#include "slice/oracles.hpp"
#include "slice/systems_registry.hpp"

using namespace slice;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Vec random_vec(std::mt19937_64& rng, Index n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

struct Built {
  ClosedForms cf;
  NormalSpaceResult ns;
};

Built build(const std::string& key, const ParamMap& params, const Vec& x, const Vec& p) {
  MechanicalGSystem sys = instantiate(key, params);
  ClosedForms cf(sys, analyze_point(sys, x, p));
  NormalSpaceResult ns = build_normal_space(cf);
  return {std::move(cf), std::move(ns)};
}

Built build_golden(const std::string& key, const std::string& label) {
  for (const auto& gp : find_system(key).golden_points) {
    if (gp.label == label) return build(key, gp.params, gp.x, gp.p);
  }
  FAIL("no golden point " << label);
  throw;
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("IRep stacking round-trips") {
  IRep r{vec({1, 2}), vec({3}), vec({4, 5}), vec({6})};
  Vec s = r.stacked();
  CHECK(s.size() == 6);
  IRep back = IRep::unstack(s, 2, 1);
  CHECK(back.xi_r == r.xi_r);
  CHECK(back.a == r.a);
  CHECK(back.nu == r.nu);
  CHECK(back.beta == r.beta);
}

TEST_CASE("point data at the north pole with a vertical covector") {
  Built b = build_golden("so3_r3", "north_pole_vertical");
  const PointData& pd = b.cf.pd();
  CHECK((pd.mu - vec({1, 0, 0})).norm() < 1e-14);
  CHECK(pd.alpha.norm() == 0.0);
  CHECK(pd.s.norm() == 0.0);
  CHECK(pd.g_px.dim() == 0);
  CHECK(pd.B.dim() == 1);
  CHECK(b.ns.V.dim() == 2);
  CHECK(b.ns.dim_N == 0);
  CHECK(b.ns.dim_B == 1);
  Mat expected(2, 2);
  expected << 0, 1, -1, 0;
  CHECK(max_abs(b.ns.omega - expected) < 1e-12);
}

TEST_CASE("covector from velocity is the Legendre transform") {
  MechanicalGSystem sys = instantiate("so3_two_body");
  Vec x = vec({0, 0, 1, 0, 0, 0});
  Vec eta = vec({1, 0, 0});
  Vec s = vec({0, 0, 0.4, 0.3, -0.2, 0.5});
  Vec p = covector_from_velocity(sys, x, eta, s);
  Vec u = sys.generator(eta, x) + s;
  CHECK((p - sys.metric(x) * u).norm() < 1e-14);
  CHECK_THROWS_AS(covector_from_velocity(sys, x, eta, vec({1, 0, 0, 0, 0, 0})), ConfigError);
}

TEST_CASE("analyze_point recovers eta and s from p") {
  MechanicalGSystem sys = instantiate("so3_two_body");
  Vec x = vec({0, 0, 1, 0, 0, 0});
  Vec eta = vec({0.7, -0.4, 0});
  Vec s = vec({0, 0, 0.4, 0.3, -0.2, 0.5});
  PointData pd = analyze_point(sys, x, covector_from_velocity(sys, x, eta, s));
  CHECK((pd.eta_algebra() - eta).norm() < 1e-12);
  CHECK((pd.s_chart() - s).norm() < 1e-12);
}

TEST_CASE("closed-form lifted generator matches the difference oracle off the golden points") {
  std::mt19937_64 rng(21);
  struct Case {
    std::string key;
    ParamMap params;
    Vec x;
  };
  std::vector<Case> cases = {{"so3_r3", {{"warp", 0.2}}, vec({0.5, -0.3, 0.9})},
                             {"so3_two_body", {{"warp", 0.1}}, vec({0.2, 0.1, 1, -0.3, 0.4, 0.6})},
                             {"so3_on_so3", {}, vec({0.6, 0.2, -0.9})},
                             {"torus2_r4", {{"warp", 0.4}}, vec({0.8, 0.1, 0.3, -0.5})}};
  for (const auto& c : cases) {
    MechanicalGSystem sys = instantiate(c.key, c.params);
    Vec p = random_vec(rng, sys.chart_dim());
    ClosedForms cf(sys, analyze_point(sys, c.x, p));
    for (int k = 0; k < 3; ++k) {
      Vec xi = random_vec(rng, sys.algebra().dim());
      Vec closed = cf.lifted_generator(xi).stacked();
      Vec fd = oracles::fd_lifted_generator(sys, cf.pd().frame, xi, p).stacked();
      CHECK_MESSAGE(relative_error(closed, fd) < 1e-6, c.key);
    }
  }
}

TEST_CASE("lifted generators of the isotropy algebra have no base component") {
  Built b = build_golden("so3_two_body", "axis_and_origin_j_nonzero");
  const PointData& pd = b.cf.pd();
  IRep r = b.cf.lifted_generator(pd.frame.h.vector(0));
  CHECK(r.xi_r.norm() < 1e-12);
  CHECK(r.a.norm() < 1e-12);
}

TEST_CASE("j solves its defining equation at the two-body point") {
  Built b = build_golden("so3_two_body", "axis_and_origin_j_nonzero");
  const PointData& pd = b.cf.pd();
  const LieAlgebra& g = b.cf.system().algebra();
  const LinearMapRep& j = b.ns.j;
  REQUIRE(j.domain.dim() > 0);
  REQUIRE(j.codomain.dim() == 1);
  CHECK(max_abs(j.matrix) > 1e-3);
  // <mu, [j(b), zeta]> = <alpha, zeta . b> for zeta spanning h.
  Vec zeta = pd.frame.h.vector(0);
  Mat rho = b.cf.rho(zeta);
  for (Index c = 0; c < j.domain.dim(); ++c) {
    Vec bvec = j.domain.vector(c);
    Vec jb = j.codomain.basis() * j.matrix.col(c);
    double lhs = pd.mu.dot(g.bracket(jb, zeta));
    double rhs = pd.alpha.dot(rho * bvec);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("omega is in block normal form at every golden point") {
  for (const auto& d : list_systems()) {
    for (const auto& gp : d.golden_points) {
      Built b = build(d.key, gp.params, gp.x, gp.p);
      CHECK_MESSAGE(b.ns.block_residual < 1e-8, d.key << "/" << gp.label);
      CHECK(b.ns.V.dim() == gp.dims.at("V"));
      CHECK(b.ns.case_flags == gp.flags);
    }
  }
}

TEST_CASE("torus points have a purely canonical omega") {
  for (const auto& gp : find_system("torus2_r4").golden_points) {
    Built b = build("torus2_r4", gp.params, gp.x, gp.p);
    CHECK(b.ns.dim_N == 0);
    CHECK(max_abs(b.ns.omega - b.ns.omega_expected) < 1e-12);
    CHECK(max_abs(b.ns.j.matrix) == 0.0);
  }
}

TEST_CASE("free so(3) point carries the orbit form in the N block") {
  Built b = build_golden("so3_on_so3", "off_identity");
  const PointData& pd = b.cf.pd();
  const LieAlgebra& g = b.cf.system().algebra();
  REQUIRE(b.ns.dim_N == 2);
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      double kks = -pd.mu.dot(g.bracket(pd.splitting.q_mu.vector(i), pd.splitting.q_mu.vector(j)));
      CHECK(b.ns.omega(i, j) == doctest::Approx(kks).epsilon(1e-9));
    }
  }
}

TEST_CASE("J_N is quadratic, vanishes at zero, and agrees with the action route") {
  Built b = build_golden("torus2_r4", "circle_isotropy_vertical");
  REQUIRE(b.ns.JN_tensor.size() == 1);
  const Index dv = b.ns.V_basis.cols();
  CHECK(momentum_JN(b.ns, Vec::Zero(dv)).norm() == 0.0);
  std::mt19937_64 rng(4);
  double biggest = 0.0;
  for (int k = 0; k < 20; ++k) {
    Vec w = random_vec(rng, dv);
    Vec a = momentum_JN(b.ns, w);
    Vec c = momentum_JN_from_action(b.ns, w);
    CHECK(relative_error(a, c) < 1e-12);
    CHECK(relative_error(momentum_JN(b.ns, 2.0 * w), 4.0 * a) < 1e-12);
    biggest = std::max(biggest, a.cwiseAbs().maxCoeff());
  }
  // The circle rotates the slice, so the momentum is not identically zero.
  CHECK(biggest > 1e-3);
}

TEST_CASE("J_N is empty without isotropy") {
  Built b = build_golden("so3_r3", "north_pole_vertical");
  CHECK(b.ns.JN_tensor.empty());
  CHECK(momentum_JN(b.ns, Vec::Ones(2)).size() == 0);
}

TEST_CASE("the isotropy action preserves V") {
  Built b = build_golden("so3_two_body", "axis_and_origin_zero_momentum");
  const PointData& pd = b.cf.pd();
  REQUIRE(pd.g_px.dim() == 1);
  Mat act = gpx_action_stacked(b.cf, pd.g_px.vector(0));
  for (Index i = 0; i < b.ns.V.dim(); ++i) CHECK(b.ns.V.residual(act * b.ns.V.vector(i)) < 1e-10);
  Mat om = canonical_omega(pd.dim_r(), pd.dim_s());
  // The linearized action is infinitesimally symplectic.
  CHECK(max_abs(act.transpose() * om + om * act) < 1e-10);
}

TEST_CASE("canonical omega layout") {
  Mat om = canonical_omega(1, 1);
  Mat expected(4, 4);
  expected << 0, 0, 1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, -1, 0, 0;
  CHECK(om == expected);
}

TEST_CASE("diamond pairs through the representation") {
  std::vector<Mat> rep = {Mat::Identity(2, 2), Mat::Zero(2, 2)};
  Vec l = vec({1, 2});
  Vec o = vec({3, -1});
  Vec d = diamond(l, o, rep);
  CHECK(d(0) == doctest::Approx(1.0));
  CHECK(d(1) == 0.0);
}

TEST_CASE("case flag names") {
  CHECK(to_string(CaseFlag::TotallyIsotropic) == "TotallyIsotropic");
  CHECK(to_string(CaseFlag::Generic) == "Generic");
}
