#include <doctest.h>

#include <cmath>
#include <random>

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

Vec cross(const Vec& a, const Vec& b) { return Eigen::Vector3d(a).cross(Eigen::Vector3d(b)); }

}  // namespace

TEST_CASE("make_report passes only finite residuals within tolerance") {
  CHECK(oracles::make_report("a", 1e-9, 1e-8).pass);
  CHECK_FALSE(oracles::make_report("a", 1e-7, 1e-8).pass);
  CHECK_FALSE(oracles::make_report("a", std::nan(""), 1.0).pass);
}

TEST_CASE("difference generator of rotations is the cross product") {
  MechanicalGSystem sys = instantiate("so3_r3");
  Vec x = vec({0.2, 0.9, -0.4});
  Vec xi = vec({1.5, -0.3, 0.2});
  CHECK((oracles::fd_generator(sys, xi, x) - cross(xi, x)).norm() < 1e-9);
}

TEST_CASE("difference Christoffel symbols of the warped two-body metric") {
  MechanicalGSystem sys = instantiate("so3_two_body", {{"warp", 0.25}});
  Vec x = vec({0.1, -0.2, 0.9, 0.3, 0.4, -0.5});
  Christoffel fd = oracles::fd_christoffel(sys, x);
  Christoffel lib = christoffel(sys, x);
  for (std::size_t k = 0; k < fd.upper.size(); ++k) {
    CHECK(relative_error(fd.upper[k], lib.upper[k]) < 1e-8);
  }
}

TEST_CASE("difference lift of rotations on flat R^3") {
  // The cotangent lift rotates the covector with the point: xdot = xi x x, pdot = xi x p.
  MechanicalGSystem sys = instantiate("so3_r3");
  Vec x = vec({0.3, -0.5, 0.8});
  Vec p = vec({0.6, 0.2, -0.1});
  Vec xi = vec({0.4, 1.0, -0.7});
  PointFrame f = point_frame(sys, x, Subspace(3));
  IRep r = oracles::fd_lifted_generator(sys, f, xi, p);
  Vec xdot = cross(xi, x);
  Vec k = cross(xi, p);
  Mat basis(3, f.r.dim() + f.S.dim());
  basis << f.gen_r, f.S.basis();
  Vec c = basis.fullPivLu().solve(xdot);
  CHECK((r.xi_r - c.head(f.r.dim())).norm() < 1e-8);
  CHECK((r.a - c.tail(f.S.dim())).norm() < 1e-8);
  CHECK((r.nu - f.gen_r.transpose() * k).norm() < 1e-8);
  CHECK((r.beta - f.S.basis().transpose() * k).norm() < 1e-8);
}

TEST_CASE("canonical form identity holds on random curves") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (const auto& key : {"so3_r3", "so3_on_so3"}) {
    MechanicalGSystem sys = instantiate(key, {});
    Vec x = vec({0.3, -0.2, 0.4});
    Vec p = vec({0.5, 0.1, -0.7});
    for (int k = 0; k < 5; ++k) {
      Vec a = vec({u(rng), u(rng), u(rng)});
      Vec b = vec({u(rng), u(rng), u(rng)});
      Vec qa = vec({u(rng), u(rng), u(rng)});
      Vec qb = vec({u(rng), u(rng), u(rng)});
      CovectorCurve y1 = [=](double t) {
        return std::make_pair(Vec(x + std::sin(t) * a), Vec(p + t * qa + t * t * qb));
      };
      CovectorCurve y2 = [=](double t) {
        return std::make_pair(Vec(x + t * b + t * t * a), Vec(p + std::sin(t) * qb));
      };
      auto rep = oracles::chart_canonical_form_check(sys, y1, y2);
      CHECK_MESSAGE(rep.pass, key << " " << rep.residual);
    }
  }
}

TEST_CASE("locked inertia identities on every system") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& d : list_systems()) {
    MechanicalGSystem sys = instantiate(d.key, d.golden_points.back().params);
    const Index n = sys.algebra().dim();
    auto rv = [&] {
      Vec v(n);
      for (Index i = 0; i < n; ++i) v(i) = u(rng);
      return v;
    };
    Vec x = d.golden_points.back().x;
    auto [eq, inf] = oracles::locked_inertia_identity_check(sys, x, rv(), rv(), rv(), 0.5 * rv());
    CHECK_MESSAGE(eq.pass, d.key << " " << eq.residual);
    CHECK_MESSAGE(inf.pass, d.key << " " << inf.residual);
  }
}

TEST_CASE("covariant cross-check on a warped slice") {
  MechanicalGSystem sys = instantiate("so3_two_body", {{"warp", 0.2}});
  Vec x = vec({0, 0, 1, 0, 0, 0.5});
  PointFrame f = point_frame(sys, x, Subspace(3));
  Vec s = f.S.basis() * Vec::Ones(f.S.dim()) * 0.3;
  auto rep = oracles::covariant_cross_check(sys, f, s, vec({0.2, 1.0, -0.4}), vec({0.5, 0.5, 0.1}));
  CHECK_MESSAGE(rep.pass, rep.residual);
}
