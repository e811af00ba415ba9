#include "qbounce/operators.hpp"

#include <cmath>

#include "qbounce/errors.hpp"
#include "qbounce/quadrature.hpp"

namespace qbounce {
namespace {

template <typename Weight>
OperatorMatrix symmetric_quadrature(const EigenBasis& basis, OperatorKind kind, double unit, double tol,
                                    Weight weight) {
  const int n_levels = basis.size();
  const double cutoff = basis.reduced_cutoff();
  OperatorMatrix out;
  out.kind = kind;
  out.unit = unit;
  out.reduced = Eigen::MatrixXd::Zero(n_levels, n_levels);
  for (int m = 1; m <= n_levels; ++m) {
    for (int n = m; n <= n_levels; ++n) {
      const auto integrand = [&](double zeta) {
        return basis.reduced_eigenfunction(m, zeta) * weight(zeta) * basis.reduced_eigenfunction(n, zeta);
      };
      const QuadratureResult r = integrate(integrand, 0.0, cutoff, tol);
      out.reduced(m - 1, n - 1) = r.value;
      out.reduced(n - 1, m - 1) = r.value;
      out.max_error_estimate = std::max(out.max_error_estimate, r.error_estimate);
    }
  }
  return out;
}

}  // namespace

double OperatorMatrix::asymmetry() const {
  const double scale = reduced.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (reduced - reduced.transpose()).cwiseAbs().maxCoeff() / scale;
}

OperatorMatrix position_matrix(const EigenBasis& basis, double tol) {
  return symmetric_quadrature(basis, OperatorKind::position, basis.scales().length_unit, tol,
                              [](double zeta) { return zeta; });
}

OperatorMatrix gram_matrix(const EigenBasis& basis, double tol) {
  return symmetric_quadrature(basis, OperatorKind::overlap, 1.0, tol, [](double) { return 1.0; });
}

OperatorMatrix kinetic_matrix(const EigenBasis& basis, const OperatorMatrix& position) {
  if (position.kind != OperatorKind::position || position.dim() != basis.size()) {
    throw ContractError("kinetic_matrix: expected a position matrix of the basis dimension");
  }
  // In bouncer units m g z -> k z = z / l_g, E_n -> alpha_n.
  OperatorMatrix out;
  out.kind = OperatorKind::kinetic;
  out.unit = basis.scales().energy_unit;
  out.reduced = -position.reduced;
  for (int n = 0; n < basis.size(); ++n) out.reduced(n, n) += basis.alphas()[n];
  out.reduced = 0.5 * (out.reduced + out.reduced.transpose()).eval();
  return out;
}

OperatorMatrix kinetic_matrix(const EigenBasis& basis, double tol) {
  return kinetic_matrix(basis, position_matrix(basis, tol));
}

OperatorMatrix perturbation_cm_matrix(const EigenBasis& basis, const OperatorMatrix& position) {
  const OperatorMatrix kinetic = kinetic_matrix(basis, position);
  OperatorMatrix out;
  out.kind = OperatorKind::perturbation_cm;
  out.unit = basis.scales().energy_unit;
  out.reduced = -kinetic.reduced + position.reduced;
  out.reduced = 0.5 * (out.reduced + out.reduced.transpose()).eval();
  return out;
}

OperatorMatrix perturbation_cm_matrix(const EigenBasis& basis, double tol) {
  return perturbation_cm_matrix(basis, position_matrix(basis, tol));
}

OperatorMatrix shifted_overlap_matrix(const EigenBasis& basis, double k_ratio, double tol) {
  if (!(k_ratio > 0.0) || !std::isfinite(k_ratio)) throw DomainError("shifted_overlap_matrix: k ratio must be positive");
  const int n_levels = basis.size();
  OperatorMatrix out;
  out.kind = OperatorKind::overlap;
  out.unit = 1.0;
  out.reduced = Eigen::MatrixXd::Zero(n_levels, n_levels);
  if (k_ratio == 1.0) {
    out.reduced.setIdentity();
    return out;
  }
  // Both bases die off past the larger of the two turning-point cutoffs.
  const double cutoff = basis.reduced_cutoff() / std::min(1.0, k_ratio);
  const double root = std::sqrt(k_ratio);
  for (int m = 1; m <= n_levels; ++m) {
    for (int n = 1; n <= n_levels; ++n) {
      const auto integrand = [&](double zeta) {
        return basis.reduced_eigenfunction(m, zeta) * root * basis.reduced_eigenfunction(n, k_ratio * zeta);
      };
      const QuadratureResult r = integrate(integrand, 0.0, cutoff, tol);
      out.reduced(m - 1, n - 1) = r.value;
      out.max_error_estimate = std::max(out.max_error_estimate, r.error_estimate);
    }
  }
  return out;
}

double position_offdiagonal_magnitude(const EigenBasis& basis, int m, int n) {
  if (m == n) throw ContractError("position_offdiagonal_magnitude: needs m != n");
  const double gap = basis.alpha(m) - basis.alpha(n);
  return 2.0 / (gap * gap);
}

}  // namespace qbounce
