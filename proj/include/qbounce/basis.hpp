#pragma once

#include <vector>

#include "qbounce/airy.hpp"

namespace qbounce {

inline constexpr double kHbarSI = 1.054571817e-34;        // J s
inline constexpr double kSpeedOfLightSI = 299792458.0;    // m / s
inline constexpr double kBoltzmannSI = 1.380649e-23;      // J / K
inline constexpr double kStandardGravity = 9.80665;       // m / s^2

/// Physical constants of the bouncer. Any consistent unit system works; SI
/// is assumed wherever a unit is printed.
struct BouncerParams {
  double mass = 1.0;
  double gravity = 1.0;
  double hbar = 1.0;
  double c = 1.0;

  /// Throws DomainError unless every field is finite and > 0.
  void validate() const;

  /// Rest energy m c^2.
  double rest_energy() const { return mass * c * c; }

  bool operator==(const BouncerParams&) const = default;
};

/// m = g = hbar = 1 with the given speed of light.
BouncerParams bouncer_unit_params(double c);

/// Natural scales of the linear potential: k = (2 m^2 g / hbar^2)^(1/3),
/// l_g = 1/k, eps_g = m g / k, tau_g = hbar / eps_g.
struct DerivedScales {
  double k = 0.0;
  double length_unit = 0.0;
  double energy_unit = 0.0;
  double time_unit = 0.0;
};

DerivedScales derive_scales(const BouncerParams& params);

/// Truncated eigenbasis psi_n(z) = N_n Ai(k z - alpha_n), n = 1..size().
///
/// Everything is stored in bouncer units (lengths in l_g, energies in eps_g);
/// the SI accessors convert on the way out. Immutable after construction.
class EigenBasis {
 public:
  EigenBasis(BouncerParams params, AiryZeroTable zeros);

  int size() const { return static_cast<int>(zeros_.zeros.size()); }
  const BouncerParams& params() const { return params_; }
  const DerivedScales& scales() const { return scales_; }
  const AiryZeroTable& zero_table() const { return zeros_; }

  /// alpha_n, 1-based level.
  double alpha(int n) const;
  const std::vector<double>& alphas() const { return zeros_.zeros; }

  /// E_n = m g alpha_n / k in the params' energy unit.
  double energy(int n) const;
  /// N_n = sqrt(k) / |Ai'(-alpha_n)|, positive by convention.
  double norm(int n) const;
  /// Normalization in l_g^(-1/2): 1 / |Ai'(-alpha_n)|.
  double reduced_norm(int n) const;

  /// psi_n at reduced height zeta = k z, in units of l_g^(-1/2).
  double reduced_eigenfunction(int n, double zeta) const;

  /// Height above which every psi_n, n <= N, is negligible: (alpha_N + 15) l_g, in l_g.
  double reduced_cutoff() const { return alphas().back() + 15.0; }

 private:
  void check_level(int n) const;

  BouncerParams params_;
  DerivedScales scales_;
  AiryZeroTable zeros_;
  std::vector<double> reduced_norms_;
};

/// Builds the first N eigenstates. Requires 1 <= N <= 200; zero refinement
/// tolerance as in airy_zeros.
EigenBasis build_basis(const BouncerParams& params, int size, double zero_tol = 1e-13);

/// psi_n(z) in m^(-1/2) (params' length unit). Throws DomainError for z < 0.
double eval_eigenfunction(const EigenBasis& basis, int n, double z);

/// Params with mass m + E_i / c^2. Throws DomainError if that is not positive.
BouncerParams mass_shifted_params(const BouncerParams& params, double internal_energy);

}  // namespace qbounce
