#pragma once

#include <Eigen/Dense>

#include "qbounce/basis.hpp"

namespace qbounce {

enum class OperatorKind { position, kinetic, perturbation_cm, overlap };

/// Real symmetric operator in the truncated eigenbasis.
///
/// `reduced` holds the entries in bouncer units (l_g for position, eps_g for
/// the energy-like operators, dimensionless for overlaps); `unit` converts a
/// reduced entry to the params' unit system.
struct OperatorMatrix {
  OperatorKind kind = OperatorKind::position;
  Eigen::MatrixXd reduced;
  double unit = 1.0;
  /// Largest absolute quadrature error estimate among the entries (0 for
  /// matrices derived algebraically).
  double max_error_estimate = 0.0;

  int dim() const { return static_cast<int>(reduced.rows()); }
  Eigen::MatrixXd si() const { return reduced * unit; }
  /// 1-based entry in the params' unit.
  double at(int m, int n) const { return reduced(m - 1, n - 1) * unit; }
  /// max |A_mn - A_nm| / max |A|
  double asymmetry() const;
};

/// Matrix elements of z: z_mn = int_0^inf psi_m z psi_n dz, one adaptive
/// quadrature per (m <= n) pair over [0, (alpha_N + 15) l_g], mirrored.
OperatorMatrix position_matrix(const EigenBasis& basis, double tol = 1e-12);

/// Gram matrix <psi_m|psi_n> by the same quadrature.
OperatorMatrix gram_matrix(const EigenBasis& basis, double tol = 1e-12);

/// <m|P^2/2m|n> = E_n delta_mn - m g z_mn, symmetrized. No differentiation.
OperatorMatrix kinetic_matrix(const EigenBasis& basis, const OperatorMatrix& position);
OperatorMatrix kinetic_matrix(const EigenBasis& basis, double tol = 1e-12);

/// Centre-of-mass factor of H_1: V = -P^2/2m + m g z. Diagonal E_n/3,
/// off-diagonal 2 m g z_mn.
OperatorMatrix perturbation_cm_matrix(const EigenBasis& basis, const OperatorMatrix& position);
OperatorMatrix perturbation_cm_matrix(const EigenBasis& basis, double tol = 1e-12);

/// O_mn = <psi_m(mass m)|psi_n(mass scale * ...)> between the basis and the
/// basis of a particle whose k is `k_ratio` times larger. Used by the
/// reproject evolution mode.
OperatorMatrix shifted_overlap_matrix(const EigenBasis& basis, double k_ratio, double tol = 1e-12);

/// Closed-form magnitude 2 / (k (alpha_m - alpha_n)^2) of an off-diagonal
/// position element, in l_g. Undefined (throws) for m == n.
double position_offdiagonal_magnitude(const EigenBasis& basis, int m, int n);

}  // namespace qbounce
