#pragma once

#include <functional>

namespace qbounce {

using Integrand = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  /// Sum of per-panel |Kronrod - Gauss| differences.
  double error_estimate = 0.0;
  int panels = 0;
  int evaluations = 0;
};

inline constexpr int kDefaultMaxPanels = 4000;

/// Globally adaptive Gauss-Kronrod (10/21) quadrature of f over [lower, upper].
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops to `tol` (absolute). Throws NumericalFailure carrying the
/// achieved estimate if that needs more than `max_panels` panels.
QuadratureResult integrate(const Integrand& f, double lower, double upper, double tol,
                           int max_panels = kDefaultMaxPanels);

/// Integral over [0, inf) of a decaying integrand.
///
/// Integrates [0, initial_cutoff] adaptively, then appends panels
/// [L, 2L], [2L, 4L], ... until a panel contributes less than tol / 4 in
/// magnitude (including its error estimate). The result's error estimate
/// includes the last panel as the tail bound. Throws NumericalFailure if the
/// tail does not die out before `max_cutoff`.
QuadratureResult integrate_semi_infinite(const Integrand& f, double tol, double initial_cutoff = 8.0,
                                         double max_cutoff = 200.0);

}  // namespace qbounce
