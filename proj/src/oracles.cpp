#include "slice/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace slice::oracles {

namespace {

int levels(const MechanicalGSystem& s) { return s.numerics().fd.richardson_levels; }

double step(const MechanicalGSystem& s, const Vec& x) {
  return s.numerics().fd.step * std::max(1.0, x.norm());
}

double mixed(const MechanicalGSystem& s, const Vec& x) {
  return s.numerics().fd.mixed_step * std::max(1.0, x.norm());
}

}  // namespace

ResidualReport make_report(std::string name, double residual, double tolerance,
                           std::string context) {
  bool pass = std::isfinite(residual) && residual <= tolerance;
  return {std::move(name), residual, tolerance, pass, std::move(context)};
}

Vec fd_generator(const MechanicalGSystem& system, const Vec& xi, const Vec& x) {
  double h = step(system, x) / std::max(1.0, xi.norm());
  return fd::derivative([&](double t) -> Vec { return system.action(t * xi, x); }, h,
                        levels(system));
}

double fd_locked_inertia(const MechanicalGSystem& system, const Vec& x, const Vec& eta,
                         const Vec& lambda) {
  return fd_generator(system, eta, x).dot(system.metric(x) * fd_generator(system, lambda, x));
}

Christoffel fd_christoffel(const MechanicalGSystem& system, const Vec& x) {
  const Index n = system.chart_dim();
  std::vector<Mat> dg;
  for (Index l = 0; l < n; ++l) {
    Vec e = Vec::Unit(n, l);
    double h = system.safe_step(x, e, step(system, x));
    dg.push_back(fd::derivative([&](double t) -> Mat { return system.metric(x + t * e); }, h,
                                levels(system)));
  }
  Mat ginv = system.metric(x).inverse();
  Christoffel out;
  out.upper.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (Index k = 0; k < n; ++k) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        double v = 0.0;
        for (Index l = 0; l < n; ++l) {
          v += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        }
        out.upper[k](i, j) = 0.5 * v;
      }
    }
  }
  return out;
}

IRep fd_lifted_generator(const MechanicalGSystem& system, const PointFrame& frame, const Vec& xi,
                         const Vec& p_x) {
  const Vec& x = frame.x;
  const Index n = system.chart_dim();
  const double scale = std::max(1.0, xi.norm());
  Vec xdot = fd::derivative([&](double t) -> Vec { return system.action(t * xi, x); },
                            step(system, x) / scale, levels(system));
  // p(t)_j = sum_i p_i d_j Phi^i(-t xi, .) at Phi(t xi, x).
  Vec pdot(n);
  for (Index j = 0; j < n; ++j) {
    Vec e = Vec::Unit(n, j);
    Mat m = fd::mixed_derivative(
        [&](double k, double t) -> Vec {
          Vec y = system.action((t / scale) * xi, x) + k * e;
          return system.action(-(t / scale) * xi, y);
        },
        system.safe_step(x, e, mixed(system, x)), levels(system));
    pdot(j) = p_x.dot(m.col(0)) * scale;
  }
  Christoffel gamma = fd_christoffel(system, x);
  Mat contract = Mat::Zero(n, n);
  for (Index k = 0; k < n; ++k) contract += p_x(k) * gamma.upper[k];
  Vec K = pdot - contract.transpose() * xdot;

  const Subspace& r = frame.r;
  const Subspace& S = frame.S;
  Mat gen_r(n, r.dim());
  for (Index i = 0; i < r.dim(); ++i) gen_r.col(i) = fd_generator(system, r.vector(i), x);
  Mat basis(n, r.dim() + S.dim());
  basis << gen_r, S.basis();
  Vec c = basis.fullPivLu().solve(xdot);
  return {c.head(r.dim()), c.tail(S.dim()), gen_r.transpose() * K, S.basis().transpose() * K};
}

ResidualReport chart_canonical_form_check(const MechanicalGSystem& system, const ChartCurve& y1,
                                          const ChartCurve& y2, double tolerance) {
  auto [x0, p0] = y1(0.0);
  const double h = step(system, x0);
  const double hm = mixed(system, x0);
  const int lv = levels(system);
  // Two-parameter family F(s, t) with dF/ds = Y1, dF/dt = Y2 at the origin.
  auto family = [&](double s, double t) {
    auto [c1, q1] = y1(s);
    auto [c2, q2] = y2(t);
    return std::make_pair(Vec(c1 + c2 - x0), Vec(q1 + q2 - p0));
  };
  // Tautological form theta(dF/dt) at (s, 0) and theta(dF/ds) at (0, t).
  auto theta_t = [&](double s) -> Mat {
    Vec dc = fd::derivative([&](double t) -> Vec { return family(s, t).first; }, h, lv);
    Mat out(1, 1);
    out(0, 0) = family(s, 0.0).second.dot(dc);
    return out;
  };
  auto theta_s = [&](double t) -> Mat {
    Vec dc = fd::derivative([&](double s) -> Vec { return family(s, t).first; }, h, lv);
    Mat out(1, 1);
    out(0, 0) = family(0.0, t).second.dot(dc);
    return out;
  };
  double chart = -(fd::derivative(theta_t, hm, lv)(0, 0) - fd::derivative(theta_s, hm, lv)(0, 0));

  Vec k1 = connection_K(system, y1);
  Vec k2 = connection_K(system, y2);
  Vec c1dot = fd::derivative([&](double t) -> Vec { return y1(t).first; }, h, lv);
  Vec c2dot = fd::derivative([&](double t) -> Vec { return y2(t).first; }, h, lv);
  double formula = k2.dot(c1dot) - k1.dot(c2dot);
  double res = std::abs(chart - formula) / std::max(1.0, std::abs(chart));
  return make_report("canonical_form", res, tolerance,
                     "chart=" + std::to_string(chart) + " formula=" + std::to_string(formula));
}

std::pair<ResidualReport, ResidualReport> locked_inertia_identity_check(
    const MechanicalGSystem& system, const Vec& x, const Vec& xi, const Vec& eta,
    const Vec& lambda, const Vec& zeta, double tolerance) {
  const LieAlgebra& g = system.algebra();
  double base = fd_locked_inertia(system, x, eta, lambda);
  Mat ad = g.Ad(zeta);
  double moved = fd_locked_inertia(system, system.action(zeta, x), ad * eta, ad * lambda);
  double res1 = std::abs(moved - base) / std::max(1.0, std::abs(base));

  Vec xq = fd_generator(system, xi, x);
  double di = 0.0;
  if (xq.norm() > 0.0) {
    double hs = system.safe_step(x, xq, mixed(system, x) / std::max(1.0, xq.norm()));
    di = fd::derivative(
        [&](double t) -> Mat {
          Mat out(1, 1);
          out(0, 0) = fd_locked_inertia(system, x + t * xq, eta, lambda);
          return out;
        },
        hs, levels(system))(0, 0);
  }
  double t2 = fd_locked_inertia(system, x, g.bracket(xi, eta), lambda);
  double t3 = fd_locked_inertia(system, x, eta, g.bracket(xi, lambda));
  double scale = std::max({1.0, std::abs(di), std::abs(t2), std::abs(t3)});
  double res2 = std::abs(di + t2 + t3) / scale;
  return {make_report("locked_inertia_equivariance", res1, tolerance),
          make_report("locked_inertia_infinitesimal", res2, tolerance)};
}

ResidualReport covariant_cross_check(const MechanicalGSystem& system, const PointFrame& frame,
                                     const Vec& s, const Vec& xi, const Vec& lambda,
                                     double tolerance) {
  const Vec& x = frame.x;
  Vec xr = frame.r.basis() * frame.split_algebra(xi).second;
  const int lv = levels(system);
  double lhs = 0.0;
  double rhs = 0.0;
  if (s.norm() > 0.0) {
    double sn = s.norm();
    double hs = system.safe_step(x, s, mixed(system, x) / sn);
    Vec js = fd::mixed_derivative(
        [&](double k, double t) -> Vec { return system.action(t * xr, x + k * s); }, hs, lv);
    Christoffel gamma = fd_christoffel(system, x);
    Vec dtp = js + gamma.contract(fd_generator(system, xr, x), s);
    lhs = dtp.dot(system.metric(x) * fd_generator(system, lambda, x));
    rhs = 0.5 * fd::derivative(
                    [&](double t) -> Mat {
                      Mat out(1, 1);
                      out(0, 0) = fd_locked_inertia(system, x + t * s, xr, lambda);
                      return out;
                    },
                    hs, lv)(0, 0);
  }
  double res = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return make_report("covariant_cross_check", res, tolerance,
                     "christoffel=" + std::to_string(lhs) + " inertia=" + std::to_string(rhs));
}

}  // namespace slice::oracles
