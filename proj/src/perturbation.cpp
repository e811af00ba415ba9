#include "qbounce/perturbation.hpp"

#include <cmath>
#include <numbers>

#include "qbounce/errors.hpp"

namespace qbounce {
namespace {

void check_inputs(const EigenBasis& basis, const OperatorMatrix& v, int n) {
  if (v.kind != OperatorKind::perturbation_cm || v.dim() != basis.size()) {
    throw ContractError("perturbation: expected the perturbation_cm matrix of this basis");
  }
  if (n < 1 || n > basis.size()) throw ContractError("perturbation: level outside the basis");
}

double coupling(const EigenBasis& basis, double internal_energy) {
  return internal_energy / basis.params().rest_energy();
}

}  // namespace

double first_order_energy(const EigenBasis& basis, const OperatorMatrix& v, int n, double internal_energy) {
  check_inputs(basis, v, n);
  return coupling(basis, internal_energy) * v.at(n, n);
}

PerturbedLevel first_order_state(const EigenBasis& basis, const OperatorMatrix& v, int n,
                                 double internal_energy) {
  check_inputs(basis, v, n);
  const double lambda = coupling(basis, internal_energy);
  PerturbedLevel level;
  level.n = n;
  level.internal_energy = internal_energy;
  level.energy_correction = lambda * v.at(n, n);
  const double alpha_n = basis.alpha(n);
  for (int m = 1; m <= basis.size(); ++m) {
    if (m == n) continue;
    // Reduced V over a reduced energy gap: dimensionless either way.
    const double c = lambda * v.reduced(m - 1, n - 1) / (alpha_n - basis.alpha(m));
    level.state_correction.push_back({m, c});
  }

  // sum_{m > N} 4 |lambda| / (alpha_m - alpha_n)^3 with asymptotic zeros, plus
  // the integral remainder of the alpha_m ~ m^(2/3) law beyond the last term.
  constexpr int kTailTerms = 20000;
  const int first = basis.size() + 1;
  double tail = 0.0;
  for (int m = first; m < first + kTailTerms; ++m) {
    const double gap = airy_zero_estimate(m) - alpha_n;
    tail += 1.0 / (gap * gap * gap);
  }
  const int last = first + kTailTerms;
  const double scale = std::pow(3.0 * std::numbers::pi / 2.0, 2.0 / 3.0);  // alpha_m ~ scale m^(2/3)
  tail += 1.0 / (scale * scale * scale * last);
  level.truncation_tail = 4.0 * std::abs(lambda) * tail;
  return level;
}

Eigen::VectorXd truncated_exact_energies(const EigenBasis& basis, const OperatorMatrix& v,
                                         double internal_energy) {
  if (v.kind != OperatorKind::perturbation_cm || v.dim() != basis.size()) {
    throw ContractError("truncated_exact_energies: expected the perturbation_cm matrix of this basis");
  }
  const double lambda = coupling(basis, internal_energy);
  Eigen::MatrixXd h = lambda * v.reduced;
  for (int n = 0; n < basis.size(); ++n) h(n, n) += basis.alphas()[n];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("truncated_exact_energies: eigensolver failed");
  }
  return solver.eigenvalues();
}

double printed_energy_correction(const EigenBasis& basis, int n, double internal_energy) {
  return internal_energy * basis.energy(n) / basis.params().rest_energy();
}

double printed_state_coefficient(const EigenBasis& basis, int n, int m, double internal_energy) {
  const double gap = basis.alpha(m) - basis.alpha(n);
  const double sign = ((m - n) % 2 == 0) ? 1.0 : -1.0;
  return coupling(basis, internal_energy) * 2.0 * sign / (gap * gap * gap);
}

std::vector<ComparisonRow> compare_with_printed(const EigenBasis& basis, const OperatorMatrix& v, int n,
                                                double internal_energy) {
  std::vector<ComparisonRow> rows;
  const double computed_energy = first_order_energy(basis, v, n, internal_energy);
  const double printed_energy = printed_energy_correction(basis, n, internal_energy);
  rows.push_back({n, n, computed_energy, printed_energy, computed_energy / printed_energy});
  const PerturbedLevel level = first_order_state(basis, v, n, internal_energy);
  for (const auto& [m, c] : level.state_correction) {
    const double printed = printed_state_coefficient(basis, n, m, internal_energy);
    rows.push_back({n, m, c, printed, c / printed});
  }
  return rows;
}

}  // namespace qbounce
