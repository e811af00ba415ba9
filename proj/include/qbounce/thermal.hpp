#pragma once

#include <vector>

#include "qbounce/basis.hpp"

namespace qbounce {

/// Internal energy levels E_i with optional degeneracies. The lowest level is
/// exactly 0: the ground-state internal energy is absorbed into m.
struct InternalSpectrum {
  std::vector<double> levels;
  std::vector<int> degeneracies;  // empty means all 1

  /// Throws DomainError unless levels are finite, non-decreasing, start at 0,
  /// and degeneracies (if given) are positive and match in length.
  void validate() const;
  int degeneracy(int i) const { return degeneracies.empty() ? 1 : degeneracies[i]; }
  int size() const { return static_cast<int>(levels.size()); }

  bool operator==(const InternalSpectrum&) const = default;
};

InternalSpectrum two_level_spectrum(double gap);
/// Truncated harmonic ladder 0, eps, 2 eps, ..., (count - 1) eps.
InternalSpectrum ladder_spectrum(double spacing, int count);
InternalSpectrum listed_spectrum(std::vector<double> levels, std::vector<int> degeneracies = {});

struct ThermalState {
  InternalSpectrum spectrum;
  double temperature = 0.0;
  double beta = 0.0;  // +inf at T = 0
  std::vector<double> weights;
  double partition_function = 1.0;
  double mean_energy = 0.0;
  double variance = 0.0;
};

/// Boltzmann state of the internal levels. T = 0 is the exact limit (weight
/// spread over the ground manifold by degeneracy). Throws DomainError for T < 0.
ThermalState thermal_state(const InternalSpectrum& spectrum, double temperature,
                           double boltzmann = kBoltzmannSI);

struct VarianceSample {
  double temperature;
  double variance;
  /// d ln <dE^2> / d ln T = beta kappa_3 / <dE^2>; NaN where the variance vanishes.
  double exponent;
};

/// Exact variance on an ascending positive temperature grid, with the local
/// power-law exponent (compare with the T^2 scaling claim).
std::vector<VarianceSample> variance_vs_temperature_profile(const InternalSpectrum& spectrum,
                                                            const std::vector<double>& temperatures,
                                                            double boltzmann = kBoltzmannSI);

}  // namespace qbounce
