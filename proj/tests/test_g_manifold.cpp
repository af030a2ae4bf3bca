#include <doctest.h>

#include <random>

#include "slice/errors.hpp"
#include "slice/g_manifold.hpp"
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

Vec random_vec(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> u(-1, 1);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

// Flat R^3: I(x) = |x|^2 Id - x x^T.
Mat rigid_body_inertia(const Vec& x) {
  return x.squaredNorm() * Mat::Identity(3, 3) - x * x.transpose();
}

}  // namespace

TEST_CASE("closed-form and difference generators agree") {
  std::mt19937_64 rng(11);
  for (const auto& d : list_systems()) {
    MechanicalGSystem sys = instantiate(d.key);
    Vec x = d.golden_points.back().x;
    for (int k = 0; k < 5; ++k) {
      Vec xi = random_vec(rng, sys.algebra().dim());
      CHECK(relative_error(sys.generator(xi, x), sys.generator_fd(xi, x)) < 1e-9);
      CHECK(relative_error(sys.generator(xi, x), oracles::fd_generator(sys, xi, x)) < 1e-9);
    }
  }
}

TEST_CASE("generator matrix columns are the basis generators") {
  MechanicalGSystem sys = instantiate("so3_r3");
  Vec x = vec({0.2, -0.5, 0.9});
  Mat gm = sys.generator_matrix(x);
  for (Index i = 0; i < 3; ++i) {
    Vec expected = Eigen::Vector3d::Unit(i).cross(Eigen::Vector3d(x));
    CHECK((gm.col(i) - expected).norm() < 1e-14);
  }
}

TEST_CASE("generator Jacobian falls back to differences without a closed form") {
  MechanicalGSystem exact = instantiate("so3_r3");
  NumericsConfig n;
  n.use_exact_derivatives = false;
  MechanicalGSystem fd = exact.with_numerics(n);
  CHECK_FALSE(fd.has_exact_generator());
  Vec x = vec({0.3, 0.1, -0.8});
  Vec xi = vec({0.5, -1.0, 0.25});
  CHECK(relative_error(fd.generator_jacobian(xi, x), exact.generator_jacobian(xi, x)) < 1e-6);
}

TEST_CASE("locked inertia of rotations on flat R^3") {
  MechanicalGSystem sys = instantiate("so3_r3");
  Vec x = vec({0.3, -1.2, 0.7});
  CHECK(relative_error(locked_inertia(sys, x), rigid_body_inertia(x)) < 1e-13);
  // d/dt I(x + t v) = 2 <x, v> Id - v x^T - x v^T
  Vec v = vec({1.0, 0.5, -0.25});
  Mat expected = 2.0 * x.dot(v) * Mat::Identity(3, 3) - v * x.transpose() - x * v.transpose();
  CHECK(relative_error(locked_inertia_derivative(sys, x, v), expected) < 1e-6);
}

TEST_CASE("Christoffel symbols of the conformal metric match the closed form") {
  const double w = 0.3;
  MechanicalGSystem sys = instantiate("so3_r3", {{"warp", w}});
  Vec x = vec({0.4, -0.1, 0.8});
  Christoffel c = christoffel(sys, x);
  // g = phi Id with phi = 1 + w |x|^2: Gamma^k_ij = (d_i phi d_jk + d_j phi d_ik - d_k phi d_ij) / 2 phi
  double phi = 1.0 + w * x.squaredNorm();
  Vec dphi = 2.0 * w * x;
  double worst = 0.0;
  for (Index k = 0; k < 3; ++k) {
    for (Index i = 0; i < 3; ++i) {
      for (Index j = 0; j < 3; ++j) {
        double e = (dphi(i) * (j == k) + dphi(j) * (i == k) - dphi(k) * (i == j)) / (2.0 * phi);
        worst = std::max(worst, std::abs(c.upper[k](i, j) - e));
      }
    }
  }
  CHECK(worst < 1e-8);
  CHECK(c.symmetry_residual() < 1e-12);
}

TEST_CASE("bundled metrics satisfy the Killing equation and the bracket law") {
  std::mt19937_64 rng(5);
  for (const auto& d : list_systems()) {
    MechanicalGSystem sys = instantiate(d.key, d.golden_points.back().params);
    for (const auto& gp : d.golden_points) {
      for (Index i = 0; i < sys.algebra().dim(); ++i) {
        CHECK(killing_residual(sys, Vec::Unit(sys.algebra().dim(), i), gp.x) < 1e-6);
      }
      Vec a = random_vec(rng, sys.algebra().dim());
      Vec b = random_vec(rng, sys.algebra().dim());
      CHECK(generator_bracket_residual(sys, a, b, gp.x) < 1e-6);
    }
  }
}

TEST_CASE("point frame at the north pole") {
  MechanicalGSystem sys = instantiate("so3_r3");
  Vec x = vec({0, 0, 1});
  PointFrame f = point_frame(sys, x, Subspace(3));
  CHECK(f.h.dim() == 1);
  CHECK(f.h.residual(Vec::Unit(3, 2)) < 1e-14);
  CHECK(f.r.dim() == 2);
  REQUIRE(f.S.dim() == 1);
  CHECK(f.S.residual(Vec::Unit(3, 2)) < 1e-14);
  // The slice is metric-orthogonal to the orbit.
  CHECK((f.gen.transpose() * f.metric * f.S.basis()).norm() < 1e-14);
  CHECK(f.invariance.vacuous);
}

TEST_CASE("oblique split of the algebra reconstructs the input") {
  MechanicalGSystem sys = instantiate("so3_two_body");
  PointFrame f = point_frame(sys, vec({0, 0, 1, 0.2, 0, 0}), Subspace(3));
  Vec xi = vec({0.3, -0.4, 0.9});
  auto [hpart, rcoords] = f.split_algebra(xi);
  CHECK((hpart + f.r.basis() * rcoords - xi).norm() < 1e-14);
  CHECK(f.h.residual(hpart) < 1e-14);
}

TEST_CASE("tangent and cotangent splits round-trip") {
  std::mt19937_64 rng(3);
  for (const auto& d : list_systems()) {
    for (const auto& gp : d.golden_points) {
      MechanicalGSystem sys = instantiate(d.key, gp.params);
      PointFrame f = point_frame(sys, gp.x, Subspace(sys.algebra().dim()));
      Vec u = random_vec(rng, sys.chart_dim());
      Vec g = random_vec(rng, sys.chart_dim());
      CHECK(relative_error(join_tangent(f, split_tangent(f, u)), u) < 1e-12);
      CHECK(relative_error(join_cotangent(f, split_cotangent(f, g)), g) < 1e-12);
      TangentSplit t = split_tangent(f, u);
      TangentSplit back = legendre_inverse(f, legendre(f, t));
      CHECK(relative_error(back.xi_r, t.xi_r) < 1e-12);
      CHECK(relative_error(back.a, t.a) < 1e-12);
    }
  }
}

TEST_CASE("Legendre transform of a tangent vector is its metric dual") {
  MechanicalGSystem sys = instantiate("so3_r3", {{"warp", 0.3}});
  PointFrame f = point_frame(sys, vec({0.3, -0.2, 1.1}), Subspace(3));
  Vec u = vec({0.1, 0.7, -0.3});
  Vec p = join_cotangent(f, legendre(f, split_tangent(f, u)));
  CHECK(relative_error(p, f.metric * u) < 1e-12);
}

TEST_CASE("C operator needs a slice vector") {
  MechanicalGSystem sys = instantiate("so3_r3");
  PointFrame f = point_frame(sys, vec({0, 0, 1}), Subspace(3));
  CHECK_NOTHROW(C_operator(sys, f, vec({0, 0, 0.5})));
  CHECK_THROWS_AS(C_operator(sys, f, vec({1, 0, 0})), DomainError);
}

TEST_CASE("cotangent momentum pairs with generators") {
  MechanicalGSystem sys = instantiate("so3_r3");
  PointFrame f = point_frame(sys, vec({0, 0, 1}), Subspace(3));
  Vec mu = cotangent_momentum(f, vec({0, -1, 0}));
  // mu_i = <p, e_i x x>; e1 x e3 = -e2 so mu = (1, 0, 0)
  CHECK((mu - vec({1, 0, 0})).norm() < 1e-14);
}

TEST_CASE("stencils shrink near the chart boundary and fail past it") {
  MechanicalGSystem sys = instantiate("so3_on_so3");
  Vec near = vec({3.0, 0, 0});
  double h = sys.safe_step(near, Vec::Unit(3, 0), 0.5);
  CHECK(h <= 0.5);
  CHECK(sys.in_domain(near + h * Vec::Unit(3, 0)));
  Vec edge = vec({3.14159265, 0, 0});
  CHECK_THROWS_AS(sys.safe_step(edge, Vec::Unit(3, 0), 1e-5), ChartError);
}

TEST_CASE("connection map of a horizontal lift vanishes") {
  // On flat R^3 with a constant covector along a straight line, K = 0.
  MechanicalGSystem sys = instantiate("so3_r3");
  CovectorCurve c = [](double t) {
    return std::make_pair(vec({t, 1.0, 0.5}), vec({0.2, 0.3, -0.1}));
  };
  CHECK(connection_K(sys, c).norm() < 1e-12);
}
