#include <doctest.h>

#include <Eigen/Geometry>

#include "slice/errors.hpp"
#include "slice/systems_registry.hpp"

using namespace slice;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Rodrigues formula written out, independent of Eigen's AngleAxis.
Eigen::Matrix3d rodrigues(const Eigen::Vector3d& w) {
  double t = w.norm();
  Eigen::Matrix3d k = hat(w / t);
  return Eigen::Matrix3d::Identity() + std::sin(t) * k + (1.0 - std::cos(t)) * k * k;
}

}  // namespace

TEST_CASE("registry order is fixed") {
  std::vector<std::string> keys;
  for (const auto& d : list_systems()) keys.push_back(d.key);
  CHECK(keys == std::vector<std::string>{"so3_r3", "so3_two_body", "torus2_r4", "so3_on_so3"});
}

TEST_CASE("unknown keys and parameters are rejected") {
  CHECK_THROWS_AS(find_system("nope"), UnknownSystem);
  CHECK_THROWS_AS(instantiate("nope"), UnknownSystem);
  CHECK_THROWS_AS(instantiate("so3_r3", {{"mass", 1.0}}), ConfigError);
  CHECK_THROWS_AS(instantiate("so3_r3", {{"warp", -1.0}}), ConfigError);
  CHECK_THROWS_AS(instantiate("so3_two_body", {{"m1", 0.0}}), ConfigError);
}

TEST_CASE("so3_r3 rotates by the Rodrigues formula with a flat metric") {
  MechanicalGSystem sys = instantiate("so3_r3");
  Eigen::Vector3d w(0.4, -1.1, 0.7);
  Vec x = vec({0.3, 0.2, -0.9});
  Vec expected = rodrigues(w) * Eigen::Vector3d(x);
  CHECK((sys.action(w, x) - expected).norm() < 1e-14);
  CHECK(sys.metric(x) == Mat::Identity(3, 3));
}

TEST_CASE("torus2_r4 rotates the two planes independently") {
  MechanicalGSystem sys = instantiate("torus2_r4");
  Vec x = vec({1, 2, 3, 4});
  Vec y = sys.action(vec({0.5, -0.25}), x);
  double c1 = std::cos(0.5), s1 = std::sin(0.5);
  double c2 = std::cos(-0.25), s2 = std::sin(-0.25);
  Vec expected = vec({c1 * 1 - s1 * 2, s1 * 1 + c1 * 2, c2 * 3 - s2 * 4, s2 * 3 + c2 * 4});
  CHECK((y - expected).norm() < 1e-14);
}

TEST_CASE("so3_two_body rotates both bodies and weights them by mass") {
  MechanicalGSystem sys = instantiate("so3_two_body", {{"m1", 3.0}, {"m2", 5.0}});
  Eigen::Vector3d w(0.2, 0.3, -0.4);
  Vec x = vec({1, 0, 0, 0, 1, 1});
  Vec y = sys.action(w, x);
  Eigen::Matrix3d r = rodrigues(w);
  CHECK((y.head(3) - r * Eigen::Vector3d(1, 0, 0)).norm() < 1e-14);
  CHECK((y.tail(3) - r * Eigen::Vector3d(0, 1, 1)).norm() < 1e-14);
  Mat g = sys.metric(x);
  CHECK(g(0, 0) == 3.0);
  CHECK(g(5, 5) == 5.0);
}

TEST_CASE("so3_on_so3 is left translation in exponential coordinates") {
  MechanicalGSystem sys = instantiate("so3_on_so3");
  Eigen::Vector3d w(0.3, 0.5, -0.2);
  Eigen::Vector3d x(-0.4, 0.1, 0.6);
  Vec y = sys.action(w, x);
  Eigen::Matrix3d lhs = rodrigues(Eigen::Vector3d(y));
  CHECK((lhs - rodrigues(w) * rodrigues(x)).norm() < 1e-13);
  // At the identity the metric is the bi-invariant one.
  CHECK((sys.metric(Vec::Zero(3)) - Mat::Identity(3, 3)).norm() < 1e-14);
  CHECK(sys.in_domain(Vec(x)));
  CHECK_FALSE(sys.in_domain(vec({4, 0, 0})));
}

TEST_CASE("so3_on_so3 generator matches differences on both sides of the series switch") {
  MechanicalGSystem sys = instantiate("so3_on_so3");
  Vec xi = vec({0.7, -0.2, 0.4});
  for (double t : {0.0, 0.05, 0.0999, 0.1001, 1.3, 2.9}) {
    Vec x = vec({t, 0, 0});
    CHECK(relative_error(sys.generator(xi, x), sys.generator_fd(xi, x)) < 1e-8);
  }
}

TEST_CASE("golden fixtures are consistent with their systems") {
  for (const auto& d : list_systems()) {
    CHECK_FALSE(d.golden_points.empty());
    for (const auto& gp : d.golden_points) {
      MechanicalGSystem sys = instantiate(d.key, gp.params);
      CHECK(gp.x.size() == sys.chart_dim());
      CHECK(gp.p.size() == sys.chart_dim());
      CHECK(gp.dims.size() == 12);
      CHECK(gp.dims.at("g") == sys.algebra().dim());
      CHECK(gp.dims.at("h") + gp.dims.at("r") == gp.dims.at("g"));
      CHECK(gp.dims.at("S") + gp.dims.at("r") == sys.chart_dim());
      CHECK(sys.in_domain(gp.x));
    }
  }
}

TEST_CASE("the two-body axis point is the j-nonzero exercise point") {
  const auto& gps = find_system("so3_two_body").golden_points;
  REQUIRE_FALSE(gps.empty());
  CHECK(gps.front().j_nonzero);
  CHECK(gps.front().x == vec({0, 0, 1, 0, 0, 0}));
}

TEST_CASE("hat is the cross product matrix") {
  Eigen::Vector3d a(1, 2, 3), b(-0.5, 0.25, 2);
  CHECK((hat(a) * b - a.cross(b)).norm() < 1e-15);
}
