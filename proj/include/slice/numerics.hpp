#pragma once

#include <utility>
#include <vector>

#include "slice/linear_core.hpp"

namespace slice {

/// Finite-difference settings. Steps are scaled by max(1, |x|) at use sites.
struct FdConfig {
  double step = 1e-5;
  /// Step for derivatives of quantities that are themselves finite differences,
  /// and for cross-stencil second derivatives.
  double mixed_step = 1e-3;
  int richardson_levels = 1;
  int max_shrinks = 8;
};

namespace fd {

/// Richardson table on central differences D(h), D(h/2), ... (error ~ h^2).
template <class Estimate>
Mat richardson(Estimate&& estimate, double h, int levels) {
  std::vector<Mat> row;
  row.reserve(static_cast<std::size_t>(levels) + 1);
  for (int i = 0; i <= levels; ++i) {
    std::vector<Mat> next;
    next.reserve(static_cast<std::size_t>(i) + 1);
    next.push_back(estimate(h / static_cast<double>(1 << i)));
    double factor = 1.0;
    for (int k = 1; k <= i; ++k) {
      factor *= 4.0;
      next.push_back((factor * next[k - 1] - row[k - 1]) / (factor - 1.0));
    }
    row = std::move(next);
  }
  return row.back();
}

/// d/dt f(t) at t = 0. f maps double -> Mat (or Vec).
template <class F>
Mat derivative(F&& f, double h, int levels) {
  return richardson(
      [&](double s) -> Mat { return (Mat(f(s)) - Mat(f(-s))) / (2.0 * s); }, h, levels);
}

/// d^2/ds dt f(s, t) at 0 by the four-point cross stencil.
template <class F>
Mat mixed_derivative(F&& f, double h, int levels) {
  return richardson(
      [&](double s) -> Mat {
        return (Mat(f(s, s)) - Mat(f(s, -s)) - Mat(f(-s, s)) + Mat(f(-s, -s))) / (4.0 * s * s);
      },
      h, levels);
}

}  // namespace fd

}  // namespace slice
