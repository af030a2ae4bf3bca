#pragma once

#include <string>
#include <utility>

#include "slice/g_manifold.hpp"
#include "slice/normal_space.hpp"

// Finite-difference reference computations. These use only the raw action
// and metric evaluators of a system, the algebra's structure constants and
// the linear-algebra layer; a frame is consulted only for its choice of
// bases of r and S.
namespace slice::oracles {

struct ResidualReport {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string context;
};

ResidualReport make_report(std::string name, double residual, double tolerance,
                           std::string context = "");

/// Generator by central difference of t -> action(t xi, x).
Vec fd_generator(const MechanicalGSystem& system, const Vec& xi, const Vec& x);
/// Locked inertia I(x)(eta, lambda) from FD generators.
double fd_locked_inertia(const MechanicalGSystem& system, const Vec& x, const Vec& eta,
                         const Vec& lambda);
/// Christoffel symbols from FD metric derivatives.
Christoffel fd_christoffel(const MechanicalGSystem& system, const Vec& x);

/// Curve t -> Exp(t xi) . p_x lifted to T*Q; returns its I-representation at t = 0.
IRep fd_lifted_generator(const MechanicalGSystem& system, const PointFrame& frame, const Vec& xi,
                         const Vec& p_x);

/// A curve through (x, p_x) in T*Q given in the chart.
using ChartCurve = CovectorCurve;

/// Chart value of the canonical form on two curves versus the
/// <K(Y2), T tau(Y1)> - <K(Y1), T tau(Y2)> formula.
ResidualReport chart_canonical_form_check(const MechanicalGSystem& system, const ChartCurve& y1,
                                          const ChartCurve& y2, double tolerance = 1e-6);

/// Finite equivariance and infinitesimal identity of the locked inertia tensor.
std::pair<ResidualReport, ResidualReport> locked_inertia_identity_check(
    const MechanicalGSystem& system, const Vec& x, const Vec& xi, const Vec& eta,
    const Vec& lambda, const Vec& zeta, double tolerance = 1e-6);

/// <D_t P(0), lambda_Q(x)> by the Christoffel route versus 1/2 (D I . s)(xi^r, lambda).
ResidualReport covariant_cross_check(const MechanicalGSystem& system, const PointFrame& frame,
                                     const Vec& s, const Vec& xi, const Vec& lambda,
                                     double tolerance = 1e-5);

}  // namespace slice::oracles
