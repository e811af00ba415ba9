#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qbounce/basis.hpp"
#include "qbounce/operators.hpp"
#include "qbounce/thermal.hpp"

namespace qbounce {

enum class Backend { exact_phase, exact_reproject, first_order, cumulant };

std::string_view backend_name(Backend backend);
std::optional<Backend> parse_backend(std::string_view name);

/// How the second-order (cumulant) damping exponent is derived from delta.
///
/// `printed` applies delta = <dE^2> t^2 g^2 (da)^2 / (9 hbar^2 c^4 k^2) as is.
/// `second_cumulant` applies delta / 2, the exact second cumulant of the
/// thermal phase distribution (Gaussian average e^{-s^2/2}).
enum class DampingConvention { second_cumulant, printed };

std::string_view damping_name(DampingConvention convention);
std::optional<DampingConvention> parse_damping(std::string_view name);

/// Centre-of-mass amplitudes c_n in the eigenbasis, normalized.
struct CmState {
  Eigen::VectorXcd coefficients;
  /// Norm of the projection before renormalization (1 for explicit lists).
  double captured_norm = 1.0;
};

/// Normalizes the given amplitudes. Throws DomainError for a zero or non-finite vector.
CmState state_from_coefficients(const Eigen::VectorXcd& coefficients);

/// Real Gaussian packet at rest, |G|^2 with mean center and std sigma (both
/// in l_g), projected onto the basis by quadrature. Throws DomainError if the
/// basis captures less than 0.999 of its norm.
CmState gaussian_packet(const EigenBasis& basis, double center, double sigma, double tol = 1e-12);

inline constexpr double kMinCapturedNorm = 0.999;

struct DensityMatrix {
  Eigen::MatrixXcd entries;

  static DensityMatrix from_state(const CmState& state);

  int dim() const { return static_cast<int>(entries.rows()); }
  double trace_error() const;
  double hermiticity_error() const;
  double purity() const;
  double min_eigenvalue() const;
  /// Throws DomainError unless Hermitian (1e-12), unit trace (1e-10), PSD (-1e-10).
  void validate() const;
};

/// Tr(rho z) in the matrix's unit. Throws ContractError on dimension
/// mismatch, NumericalFailure if the imaginary part exceeds 1e-10 relative.
double position_expectation(const DensityMatrix& rho, const OperatorMatrix& z);

struct PairSeries {
  int m = 0;
  int n = 0;
  std::vector<std::complex<double>> values;
  /// |rho_mn(t)| / |rho_mn(0)|; empty when |rho_mn(0)| <= 1e-12.
  std::vector<double> visibility;
};

struct EvolutionResult {
  Backend backend = Backend::exact_phase;
  std::vector<double> times;
  std::vector<double> z_expect;
  std::vector<double> purity;
  std::vector<PairSeries> pairs;
  std::vector<std::string> warnings;
  /// Free-form scalar diagnostics (e.g. reproject orthogonality defect).
  std::vector<std::pair<std::string, double>> diagnostics;
};

struct CumulantStats {
  double mean_energy = 0.0;
  double variance = 0.0;
  DampingConvention convention = DampingConvention::second_cumulant;
  /// delta_mn / t^2 in the params' inverse time squared (printed formula).
  Eigen::MatrixXd delta_rate;

  /// Printed-formula delta for the 1-based pair at time t.
  double delta(int m, int n, double t) const { return delta_rate(m - 1, n - 1) * t * t; }
  double damping_factor() const { return convention == DampingConvention::printed ? 1.0 : 0.5; }
  /// Exponent actually applied to rho_mn: damping_factor() * delta.
  double applied_exponent(int m, int n, double t) const { return damping_factor() * delta(m, n, t); }
};

/// Everything the backends share. Tracked pairs are 1-based.
struct EvolutionContext {
  EigenBasis basis;
  OperatorMatrix position;
  ThermalState thermal;
  std::vector<std::pair<int, int>> tracked_pairs;
  DampingConvention damping = DampingConvention::second_cumulant;
  double quadrature_tol = 1e-12;
};

/// Largest E_i / m c^2 the linearized backends accept without a warning tag.
inline constexpr double kLinearizationGuard = 0.1;

/// Thermal sum over internal levels, each evolving with mass m + E_i/c^2.
/// `phase`: energies E_n(M_i) applied in the fixed base-mass basis.
/// `reproject`: the state is expanded in the mass-M_i basis, evolved, mapped back.
EvolutionResult evolve_exact(const DensityMatrix& rho0, const EvolutionContext& ctx,
                             const std::vector<double>& times, bool reproject = false);

/// Energies linearized as E_n (1 + E_i / 3 m c^2).
EvolutionResult evolve_first_order(const DensityMatrix& rho0, const EvolutionContext& ctx,
                                   const std::vector<double>& times);

struct CumulantRun {
  EvolutionResult result;
  CumulantStats stats;
};

/// Mean-energy phase with Gaussian damping exp(-applied exponent).
CumulantRun evolve_cumulant(const DensityMatrix& rho0, const EvolutionContext& ctx,
                            const std::vector<double>& times);

CumulantStats cumulant_stats(const EvolutionContext& ctx);

/// No internal structure: phases alpha_n t / tau_g scaled by `rate_scale`
/// (e.g. 1 + E_bar / 3 m c^2 for the effective numerator mass).
EvolutionResult evolve_bare(const DensityMatrix& rho0, const EvolutionContext& ctx,
                            const std::vector<double>& times, double rate_scale = 1.0);

/// Single-time density matrix of a backend (for invariant checks).
DensityMatrix density_at(Backend backend, const DensityMatrix& rho0, const EvolutionContext& ctx, double t);

/// Dispatches to the backend's series function.
EvolutionResult evolve(Backend backend, const DensityMatrix& rho0, const EvolutionContext& ctx,
                       const std::vector<double>& times);

/// Uniform grid 0, t_max/steps, ..., t_max (steps + 1 points).
std::vector<double> uniform_times(double t_max, int steps);

struct Revival {
  double time;
  /// Window contrast at the revival over the initial window contrast.
  double contrast;
};

struct RevivalReport {
  std::vector<Revival> revivals;
  double initial_contrast = 0.0;
  std::optional<double> collapse_time;
  /// "ok", "stationary" or "no-collapse".
  std::string diagnostic;
};

/// Sliding-window contrast C(t) = max - min of <z> over [t, t + window].
/// After the first drop below 0.2 C(0), every stretch where C rises above
/// 0.2 C(0) again is a revival, reported at its peak (ties: earliest) with
/// the time taken at the window centre. Requires a uniform grid spanning at
/// least three windows.
RevivalReport detect_revival(const EvolutionResult& series, double window);

/// Mean spacing of the first `cycles` maxima of <z> (parabolic refinement),
/// counting t = 0 when the series starts at a maximum.
double early_period(const EvolutionResult& series, int cycles = 2);

}  // namespace qbounce
