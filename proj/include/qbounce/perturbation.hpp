#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qbounce/basis.hpp"
#include "qbounce/operators.hpp"

namespace qbounce {

struct StateCoefficient {
  int m;
  double coefficient;
};

/// First-order correction of level n for internal energy E_i under
/// H_1 = (H_int / m c^2)(-P^2/2m + m g z).
struct PerturbedLevel {
  int n = 0;
  double internal_energy = 0.0;
  double energy_correction = 0.0;
  /// (m, c_m) for every m != n inside the truncated basis, ascending m.
  std::vector<StateCoefficient> state_correction;
  /// Estimated sum of |c_m| over the levels m > N dropped by truncation,
  /// from the closed-form 4 (E_i/mc^2) / |alpha_m - alpha_n|^3 decay.
  double truncation_tail = 0.0;
};

/// (E_i / m c^2) V_nn, read off the V matrix. Equals E_i E_n / (3 m c^2).
double first_order_energy(const EigenBasis& basis, const OperatorMatrix& v, int n, double internal_energy);

/// c_m = (E_i / m c^2) V_mn / (E_n - E_m) for m != n.
PerturbedLevel first_order_state(const EigenBasis& basis, const OperatorMatrix& v, int n,
                                 double internal_energy);

/// Exact eigenvalues (ascending, in eps_g) of the truncated matrix
/// diag(alpha) + (E_i/mc^2) V by dense symmetric eigensolve.
Eigen::VectorXd truncated_exact_energies(const EigenBasis& basis, const OperatorMatrix& v,
                                         double internal_energy);

/// The printed closed forms the computed corrections are compared with.
/// Energy: E_i E_n / (m c^2). State: (E_i/mc^2) 2 (-1)^(m-n+2) / (alpha_m - alpha_n)^3,
/// i.e. the printed coefficient with energies measured in eps_g.
double printed_energy_correction(const EigenBasis& basis, int n, double internal_energy);
double printed_state_coefficient(const EigenBasis& basis, int n, int m, double internal_energy);

struct ComparisonRow {
  int n;
  int m;  // == n for the energy row
  double computed;
  double printed;
  double ratio;  // computed / printed
};

/// Energy row followed by one row per m != n.
std::vector<ComparisonRow> compare_with_printed(const EigenBasis& basis, const OperatorMatrix& v, int n,
                                                double internal_energy);

}  // namespace qbounce
