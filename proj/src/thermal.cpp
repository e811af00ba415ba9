#include "qbounce/thermal.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qbounce/errors.hpp"

namespace qbounce {

void InternalSpectrum::validate() const {
  if (levels.empty()) throw DomainError("InternalSpectrum: no levels");
  if (levels.front() != 0.0) throw DomainError("InternalSpectrum: lowest level must be exactly 0");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i])) throw DomainError("InternalSpectrum: non-finite level");
    if (i > 0 && levels[i] < levels[i - 1]) throw DomainError("InternalSpectrum: levels must be non-decreasing");
  }
  if (!degeneracies.empty()) {
    if (degeneracies.size() != levels.size()) {
      throw DomainError("InternalSpectrum: degeneracies must match levels in length");
    }
    for (int g : degeneracies) {
      if (g < 1) throw DomainError("InternalSpectrum: degeneracies must be positive");
    }
  }
}

InternalSpectrum two_level_spectrum(double gap) {
  InternalSpectrum s{{0.0, gap}, {}};
  s.validate();
  return s;
}

InternalSpectrum ladder_spectrum(double spacing, int count) {
  if (count < 1) throw DomainError("ladder_spectrum: count must be >= 1");
  InternalSpectrum s;
  s.levels.reserve(count);
  for (int i = 0; i < count; ++i) s.levels.push_back(spacing * i);
  s.validate();
  return s;
}

InternalSpectrum listed_spectrum(std::vector<double> levels, std::vector<int> degeneracies) {
  InternalSpectrum s{std::move(levels), std::move(degeneracies)};
  s.validate();
  return s;
}

ThermalState thermal_state(const InternalSpectrum& spectrum, double temperature, double boltzmann) {
  spectrum.validate();
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw DomainError("thermal_state: temperature must be finite and >= 0");
  }
  ThermalState st;
  st.spectrum = spectrum;
  st.temperature = temperature;
  const int n = spectrum.size();
  st.weights.assign(n, 0.0);

  // Levels are measured from the ground level (exactly 0), so exponents are <= 0.
  if (temperature == 0.0) {
    st.beta = std::numeric_limits<double>::infinity();
    double z = 0.0;
    for (int i = 0; i < n && spectrum.levels[i] == 0.0; ++i) z += spectrum.degeneracy(i);
    for (int i = 0; i < n && spectrum.levels[i] == 0.0; ++i) st.weights[i] = spectrum.degeneracy(i) / z;
    st.partition_function = z;
  } else {
    st.beta = 1.0 / (boltzmann * temperature);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
      st.weights[i] = spectrum.degeneracy(i) * std::exp(-st.beta * spectrum.levels[i]);
      z += st.weights[i];
    }
    for (double& w : st.weights) w /= z;
    st.partition_function = z;
  }

  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += st.weights[i] * spectrum.levels[i];
  double var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = spectrum.levels[i] - mean;
    var += st.weights[i] * d * d;
  }
  st.mean_energy = mean;
  st.variance = var;
  return st;
}

std::vector<VarianceSample> variance_vs_temperature_profile(const InternalSpectrum& spectrum,
                                                            const std::vector<double>& temperatures,
                                                            double boltzmann) {
  std::vector<VarianceSample> out;
  out.reserve(temperatures.size());
  for (std::size_t j = 0; j < temperatures.size(); ++j) {
    const double t = temperatures[j];
    if (!(t > 0.0)) throw DomainError("variance_vs_temperature_profile: temperatures must be positive");
    if (j > 0 && !(t > temperatures[j - 1])) {
      throw DomainError("variance_vs_temperature_profile: temperatures must be ascending");
    }
    const ThermalState st = thermal_state(spectrum, t, boltzmann);
    double third = 0.0;
    for (int i = 0; i < spectrum.size(); ++i) {
      const double d = spectrum.levels[i] - st.mean_energy;
      third += st.weights[i] * d * d * d;
    }
    const double exponent =
        st.variance > 0.0 ? st.beta * third / st.variance : std::numeric_limits<double>::quiet_NaN();
    out.push_back({t, st.variance, exponent});
  }
  return out;
}

}  // namespace qbounce
