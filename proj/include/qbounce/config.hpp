#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qbounce/basis.hpp"
#include "qbounce/evolution.hpp"
#include "qbounce/thermal.hpp"

namespace qbounce {

inline constexpr int kConfigSchemaVersion = 1;

/// Internal spectrum recipe. Energies are in the run's energy unit (J, or
/// the m = g = hbar = 1 unit in bouncer mode).
struct InternalSpec {
  std::string kind = "two_level";  // two_level | ladder | list
  double spacing = 100.0;          // two_level gap / ladder spacing
  int count = 2;                   // ladder levels
  std::vector<double> energies;    // list
  std::vector<int> degeneracies;   // list, optional

  InternalSpectrum build() const;
  bool operator==(const InternalSpec&) const = default;
};

struct InitialStateSpec {
  std::string kind = "gaussian";  // gaussian | coefficients
  double center = 10.0;           // l_g
  double sigma = 1.0;             // l_g
  std::vector<double> real;
  std::vector<double> imag;

  bool operator==(const InitialStateSpec&) const = default;
};

struct RunConfig {
  bool bouncer_units = true;
  double mass = 1.0;
  double gravity = 1.0;
  double hbar = 1.0;
  double c = 1000.0;

  int basis_size = 30;
  double zero_tol = 1e-13;
  double quadrature_tol = 1e-12;

  InternalSpec internal;
  /// Kelvin in SI mode, k_B T in the energy unit in bouncer mode.
  double temperature = 100.0;
  std::vector<double> sweep_temperatures{0.0, 25.0, 50.0, 100.0, 200.0};

  InitialStateSpec initial;
  double t_max = 400.0;
  int steps = 8000;

  std::string backend = "all";
  DampingConvention damping = DampingConvention::second_cumulant;
  std::vector<std::pair<int, int>> tracked_pairs{{6, 7}, {7, 8}};
  /// 0 means: classical bounce period of the Gaussian packet.
  double revival_window = 0.0;
  std::string output_dir = "out";

  BouncerParams params() const;
  double boltzmann() const { return bouncer_units ? 1.0 : kBoltzmannSI; }
  /// Selected backends in canonical order.
  std::vector<Backend> backends() const;

  /// Throws ValidationError naming the offending dotted field.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace qbounce
