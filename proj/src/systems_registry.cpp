#include "slice/systems_registry.hpp"

#include <cmath>

namespace slice {

namespace {

using V3 = Eigen::Vector3d;
using M3 = Eigen::Matrix3d;

constexpr double kPi = 3.14159265358979323846;

M3 rotation(const V3& w) {
  double th = w.norm();
  if (th == 0.0) return M3::Identity();
  return Eigen::AngleAxisd(th, w / th).toRotationMatrix();
}

V3 rotation_log(const M3& r) {
  Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

double poly(double t2, std::initializer_list<double> c) {
  double out = 0.0;
  double pw = 1.0;
  for (double v : c) {
    out += v * pw;
    pw *= t2;
  }
  return out;
}

// Coefficients of the left Jacobian of SO(3) and its inverse, with series near 0.
struct JacobianCoeffs {
  double c1;  // (1 - cos t) / t^2
  double c2;  // (t - sin t) / t^3
  double c3;  // 1/t^2 - (1 + cos t) / (2 t sin t)
};

JacobianCoeffs jacobian_coeffs(double t) {
  double t2 = t * t;
  if (t < 0.1) {
    return {poly(t2, {1.0 / 2, -1.0 / 24, 1.0 / 720, -1.0 / 40320, 1.0 / 3628800}),
            poly(t2, {1.0 / 6, -1.0 / 120, 1.0 / 5040, -1.0 / 362880, 1.0 / 39916800}),
            poly(t2, {1.0 / 12, 1.0 / 720, 1.0 / 30240, 1.0 / 1209600, 1.0 / 47900160})};
  }
  return {(1.0 - std::cos(t)) / t2, (t - std::sin(t)) / (t2 * t),
          1.0 / t2 - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t))};
}

M3 left_jacobian(const V3& x) {
  JacobianCoeffs c = jacobian_coeffs(x.norm());
  M3 k = hat(x);
  return M3::Identity() + c.c1 * k + c.c2 * k * k;
}

M3 left_jacobian_inverse(const V3& x) {
  JacobianCoeffs c = jacobian_coeffs(x.norm());
  M3 k = hat(x);
  return M3::Identity() - 0.5 * k + c.c3 * k * k;
}

ParamMap merge_params(const SystemDescriptor& d, const ParamMap& given) {
  ParamMap out = d.default_params;
  for (const auto& [name, value] : given) {
    if (!out.count(name)) throw ConfigError("system " + d.key + " has no parameter '" + name + "'");
    if (!std::isfinite(value)) throw ConfigError("parameter '" + name + "' is not finite");
    out[name] = value;
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::map<std::string, Index> dims(std::initializer_list<Index> v) {
  static const char* names[] = {"g", "h", "r", "S", "g_mu", "h_mu", "p", "q_mu", "k", "B", "V", "g_px"};
  std::map<std::string, Index> out;
  std::size_t i = 0;
  for (Index d : v) out[names[i++]] = d;
  return out;
}

using CF = CaseFlag;

std::vector<SystemDescriptor> build_registry() {
  std::vector<SystemDescriptor> out;
  out.push_back(
      {"so3_r3",
       "SO(3) rotating R^3; metric (1 + warp |x|^2) times the identity",
       {{"warp", 0.0}},
       {{"north_pole_vertical", {}, vec({0, 0, 1}), vec({0, -1, 0}),
         dims({3, 1, 2, 1, 1, 0, 1, 0, 1, 1, 2, 0}),
         {CF::VerticalCovector, CF::TrivialSliceAction}, false},
        {"north_pole_zero_covector", {}, vec({0, 0, 1}), vec({0, 0, 0}),
         dims({3, 1, 2, 1, 3, 1, 2, 0, 0, 1, 2, 1}),
         {CF::TotallyIsotropic, CF::VerticalCovector, CF::TrivialSliceAction, CF::HsubGmu},
         false},
        {"warped_generic", {{"warp", 0.3}}, vec({0.3, -0.2, 1.1}), vec({0.5, 0.4, -0.2}),
         dims({3, 1, 2, 1, 1, 0, 1, 0, 1, 1, 2, 0}), {CF::TrivialSliceAction}, false}}});
  out.push_back(
      {"so3_two_body",
       "SO(3) rotating two points in R^3; metric diag(m1 I, m2 I) scaled by 1 + warp |x|^2",
       {{"m1", 1.0}, {"m2", 2.0}, {"warp", 0.0}},
       {{"axis_and_origin_j_nonzero", {}, vec({0, 0, 1, 0, 0, 0}),
         vec({0, -1, 0.5, 1.2, -0.6, 0.8}), dims({3, 1, 2, 4, 1, 0, 1, 0, 1, 4, 8, 0}),
         {CF::Generic}, true},
        {"axis_and_origin_zero_momentum", {}, vec({0, 0, 1, 0, 0, 0}),
         vec({0, 0, 0.7, 0, 0, 1.1}), dims({3, 1, 2, 4, 3, 1, 2, 0, 0, 4, 8, 1}),
         {CF::TotallyIsotropic, CF::HsubGmu}, false},
        {"warped_collinear", {{"warp", 0.2}}, vec({0, 0, 1, 0, 0, 0.5}),
         vec({0.3, -0.8, 0.2, 0.5, 0.1, -0.4}), dims({3, 1, 2, 4, 1, 0, 1, 0, 1, 4, 8, 0}),
         {CF::Generic}, true}}});
  out.push_back(
      {"torus2_r4",
       "T^2 rotating the (x1,x2) and (x3,x4) planes of R^4; metric (1 + warp |x|^2) times the identity",
       {{"warp", 0.0}},
       {{"free_point", {}, vec({1, 0, 1, 0}), vec({0.3, 0.7, -0.4, 1.2}),
         dims({2, 0, 2, 2, 2, 0, 2, 0, 0, 2, 4, 0}),
         {CF::TotallyIsotropic, CF::LocallyFree, CF::TrivialSliceAction, CF::HsubGmu}, false},
        {"circle_isotropy_vertical", {}, vec({1, 0, 0, 0}), vec({0, 1, 0, 0}),
         dims({2, 1, 1, 3, 2, 1, 1, 0, 0, 3, 6, 1}),
         {CF::TotallyIsotropic, CF::VerticalCovector, CF::HsubGmu}, false},
        {"circle_isotropy_slice_momentum", {}, vec({1, 0, 0, 0}), vec({0, 1, 0.5, 0}),
         dims({2, 1, 1, 3, 2, 1, 1, 0, 0, 2, 4, 0}), {CF::TotallyIsotropic, CF::HsubGmu},
         false}}});
  out.push_back(
      {"so3_on_so3",
       "SO(3) acting on itself by left translation in exponential coordinates; bi-invariant metric",
       {},
       {{"identity", {}, vec({0, 0, 0}), vec({0.4, -0.3, 0.8}),
         dims({3, 0, 3, 0, 1, 0, 1, 2, 0, 0, 2, 0}),
         {CF::VerticalCovector, CF::LocallyFree, CF::TrivialSliceAction, CF::HsubGmu}, false},
        {"off_identity", {}, vec({0.3, -0.2, 0.4}), vec({0.5, 0.1, -0.7}),
         dims({3, 0, 3, 0, 1, 0, 1, 2, 0, 0, 2, 0}),
         {CF::VerticalCovector, CF::LocallyFree, CF::TrivialSliceAction, CF::HsubGmu}, false}}});
  return out;
}

MechanicalGSystem make_so3_r3(const ParamMap& p, NumericsConfig numerics) {
  double warp = p.at("warp");
  require(warp >= 0.0, "warp must be non-negative");
  SystemEvaluators ev;
  ev.action = [](const Vec& xi, const Vec& x) -> Vec { return rotation(xi) * V3(x); };
  ev.metric = [warp](const Vec& x) -> Mat {
    return (1.0 + warp * x.squaredNorm()) * Mat::Identity(3, 3);
  };
  ev.generator = [](const Vec& xi, const Vec& x) -> Vec { return V3(xi).cross(V3(x)); };
  ev.generator_jacobian = [](const Vec& xi, const Vec&) -> Mat { return hat(xi); };
  return MechanicalGSystem("so3_r3", LieAlgebra::so3(), 3, std::move(ev), numerics);
}

MechanicalGSystem make_so3_two_body(const ParamMap& p, NumericsConfig numerics) {
  double m1 = p.at("m1");
  double m2 = p.at("m2");
  double warp = p.at("warp");
  require(m1 > 0.0 && m2 > 0.0, "masses must be positive");
  require(warp >= 0.0, "warp must be non-negative");
  SystemEvaluators ev;
  ev.action = [](const Vec& xi, const Vec& x) -> Vec {
    M3 r = rotation(xi);
    Vec out(6);
    out << r * V3(x.head<3>()), r * V3(x.tail<3>());
    return out;
  };
  ev.metric = [m1, m2, warp](const Vec& x) -> Mat {
    Vec d(6);
    d << m1, m1, m1, m2, m2, m2;
    return (1.0 + warp * x.squaredNorm()) * Mat(d.asDiagonal());
  };
  ev.generator = [](const Vec& xi, const Vec& x) -> Vec {
    Vec out(6);
    out << V3(xi).cross(V3(x.head<3>())), V3(xi).cross(V3(x.tail<3>()));
    return out;
  };
  ev.generator_jacobian = [](const Vec& xi, const Vec&) -> Mat {
    Mat out = Mat::Zero(6, 6);
    out.topLeftCorner(3, 3) = hat(xi);
    out.bottomRightCorner(3, 3) = hat(xi);
    return out;
  };
  return MechanicalGSystem("so3_two_body", LieAlgebra::so3(), 6, std::move(ev), numerics);
}

MechanicalGSystem make_torus2_r4(const ParamMap& p, NumericsConfig numerics) {
  double warp = p.at("warp");
  require(warp >= 0.0, "warp must be non-negative");
  auto plane = [](double th) {
    Eigen::Matrix2d r;
    r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return r;
  };
  Eigen::Matrix2d j;
  j << 0, -1, 1, 0;
  SystemEvaluators ev;
  ev.action = [plane](const Vec& xi, const Vec& x) -> Vec {
    Vec out(4);
    out << plane(xi(0)) * x.head<2>(), plane(xi(1)) * x.tail<2>();
    return out;
  };
  ev.metric = [warp](const Vec& x) -> Mat {
    return (1.0 + warp * x.squaredNorm()) * Mat::Identity(4, 4);
  };
  ev.generator = [j](const Vec& xi, const Vec& x) -> Vec {
    Vec out(4);
    out << xi(0) * (j * x.head<2>()), xi(1) * (j * x.tail<2>());
    return out;
  };
  ev.generator_jacobian = [j](const Vec& xi, const Vec&) -> Mat {
    Mat out = Mat::Zero(4, 4);
    out.topLeftCorner(2, 2) = xi(0) * j;
    out.bottomRightCorner(2, 2) = xi(1) * j;
    return out;
  };
  return MechanicalGSystem("torus2_r4", LieAlgebra::abelian(2, "t2"), 4, std::move(ev), numerics);
}

MechanicalGSystem make_so3_on_so3(const ParamMap&, NumericsConfig numerics) {
  SystemEvaluators ev;
  ev.action = [](const Vec& xi, const Vec& x) -> Vec {
    return rotation_log(rotation(xi) * rotation(x));
  };
  ev.metric = [](const Vec& x) -> Mat {
    M3 jl = left_jacobian(x);
    return jl.transpose() * jl;
  };
  ev.in_domain = [](const Vec& x) { return x.norm() < kPi; };
  ev.generator = [](const Vec& xi, const Vec& x) -> Vec { return left_jacobian_inverse(x) * V3(xi); };
  return MechanicalGSystem("so3_on_so3", LieAlgebra::so3(), 3, std::move(ev), numerics);
}

void validate(const MechanicalGSystem& sys) {
  const Index n = sys.algebra().dim();
  const Index dim = sys.chart_dim();
  for (int sample = 0; sample < 3; ++sample) {
    Vec x(dim);
    for (Index i = 0; i < dim; ++i) x(i) = 0.35 * std::sin(1.7 * static_cast<double>(i + 1) + sample);
    double idres = (sys.action(Vec::Zero(n), x) - x).cwiseAbs().maxCoeff();
    if (idres > 1e-12) throw InvarianceError(sys.label() + ": action(0, x) != x", idres);
    for (Index i = 0; i < n; ++i) {
      double k = killing_residual(sys, Vec::Unit(n, i), x);
      if (k > 1e-6) throw InvarianceError(sys.label() + ": metric is not invariant", k);
    }
  }
}

}  // namespace

Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

const std::vector<SystemDescriptor>& list_systems() {
  static const std::vector<SystemDescriptor> registry = build_registry();
  return registry;
}

const SystemDescriptor& find_system(const std::string& key) {
  for (const auto& d : list_systems()) {
    if (d.key == key) return d;
  }
  throw UnknownSystem("unknown system '" + key + "'");
}

MechanicalGSystem instantiate(const std::string& key, const ParamMap& params,
                              NumericsConfig numerics) {
  const SystemDescriptor& d = find_system(key);
  ParamMap p = merge_params(d, params);
  MechanicalGSystem sys = [&] {
    if (key == "so3_r3") return make_so3_r3(p, numerics);
    if (key == "so3_two_body") return make_so3_two_body(p, numerics);
    if (key == "torus2_r4") return make_torus2_r4(p, numerics);
    return make_so3_on_so3(p, numerics);
  }();
  validate(sys);
  return sys;
}

}  // namespace slice
