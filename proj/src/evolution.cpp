#include "qbounce/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "qbounce/errors.hpp"
#include "qbounce/quadrature.hpp"

namespace qbounce {
namespace {

using Complex = std::complex<double>;
constexpr double kVisibilityFloor = 1e-12;

// rho(t) in bouncer units for one reduced time t / tau_g.
using Propagator = std::function<Eigen::MatrixXcd(double)>;

double rest_ratio(const EvolutionContext& ctx, double internal_energy) {
  return internal_energy / ctx.basis.params().rest_energy();
}

// E_n(M_i) / E_n(m) - 1 = (1 + x)^(1/3) - 1, without cancellation for small x.
double exact_rate_shift(double x) { return std::expm1(std::log1p(x) / 3.0); }

// Phase-only propagation: rho_mn(t) = rho0_mn sum_i w_i exp(-i (a_m - a_n) (1 + s_i) t).
Propagator phase_propagator(const DensityMatrix& rho0, const EvolutionContext& ctx, std::vector<double> weights,
                            std::vector<double> rate_shifts) {
  const Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(ctx.basis.alphas().data(), ctx.basis.size());
  return [rho = rho0.entries, alpha, weights = std::move(weights), shifts = std::move(rate_shifts)](double t) {
    const int n = static_cast<int>(alpha.size());
    Eigen::MatrixXcd factor = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd u(n);
    // Ascending internal level order keeps the thermal sum deterministic.
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] == 0.0) continue;
      for (int k = 0; k < n; ++k) u(k) = std::polar(1.0, -alpha(k) * (1.0 + shifts[i]) * t);
      factor.noalias() += weights[i] * (u * u.adjoint());
    }
    return Eigen::MatrixXcd(rho.cwiseProduct(factor));
  };
}

struct ReprojectLevel {
  double weight;
  double rate;  // E_n(M_i) / E_n(m)
  Eigen::MatrixXd rotation;
};

Propagator reproject_propagator(const DensityMatrix& rho0, const EvolutionContext& ctx, double& defect) {
  std::vector<ReprojectLevel> levels;
  defect = 0.0;
  const auto& th = ctx.thermal;
  for (int i = 0; i < th.spectrum.size(); ++i) {
    if (th.weights[i] == 0.0) continue;
    const double x = rest_ratio(ctx, th.spectrum.levels[i]);
    // Validates the shifted mass.
    mass_shifted_params(ctx.basis.params(), th.spectrum.levels[i]);
    const double k_ratio = std::exp(2.0 * std::log1p(x) / 3.0);
    const OperatorMatrix overlap = shifted_overlap_matrix(ctx.basis, k_ratio, ctx.quadrature_tol);
    const int n = overlap.dim();
    defect = std::max(defect, (overlap.reduced.transpose() * overlap.reduced - Eigen::MatrixXd::Identity(n, n))
                                  .cwiseAbs()
                                  .maxCoeff());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(overlap.reduced, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXd rotation = svd.matrixU() * svd.matrixV().transpose();
    if (x == 0.0) rotation.setIdentity();
    levels.push_back({th.weights[i], 1.0 + exact_rate_shift(x), std::move(rotation)});
  }
  const Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(ctx.basis.alphas().data(), ctx.basis.size());
  return [rho = rho0.entries, alpha, levels = std::move(levels)](double t) {
    const int n = static_cast<int>(alpha.size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd u(n);
    for (const auto& level : levels) {
      const Eigen::MatrixXcd q = level.rotation.cast<Complex>();
      Eigen::MatrixXcd shifted = q.transpose() * rho * q;
      for (int k = 0; k < n; ++k) u(k) = std::polar(1.0, -alpha(k) * level.rate * t);
      shifted = shifted.cwiseProduct(u * u.adjoint()).eval();
      out.noalias() += level.weight * (q * shifted * q.transpose());
    }
    return out;
  };
}

std::vector<double> level_shifts(const EvolutionContext& ctx, bool linearized) {
  std::vector<double> shifts;
  for (double e : ctx.thermal.spectrum.levels) {
    mass_shifted_params(ctx.basis.params(), e);
    const double x = rest_ratio(ctx, e);
    shifts.push_back(linearized ? x / 3.0 : exact_rate_shift(x));
  }
  return shifts;
}

Propagator cumulant_propagator(const DensityMatrix& rho0, const EvolutionContext& ctx, const CumulantStats& stats) {
  const Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(ctx.basis.alphas().data(), ctx.basis.size());
  const double mean_shift = rest_ratio(ctx, stats.mean_energy) / 3.0;
  // delta in reduced time: delta_rate * tau_g^2 * t_reduced^2
  const double tau = ctx.basis.scales().time_unit;
  const Eigen::MatrixXd exponent_rate = stats.damping_factor() * stats.delta_rate * (tau * tau);
  return [rho = rho0.entries, alpha, mean_shift, exponent_rate](double t) {
    const int n = static_cast<int>(alpha.size());
    Eigen::VectorXcd u(n);
    for (int k = 0; k < n; ++k) u(k) = std::polar(1.0, -alpha(k) * (1.0 + mean_shift) * t);
    Eigen::MatrixXcd factor = u * u.adjoint();
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) factor(a, b) *= std::exp(-exponent_rate(a, b) * t * t);
    }
    return Eigen::MatrixXcd(rho.cwiseProduct(factor));
  };
}

void check_pairs(const EvolutionContext& ctx) {
  for (const auto& [m, n] : ctx.tracked_pairs) {
    if (m < 1 || n < 1 || m > ctx.basis.size() || n > ctx.basis.size()) {
      throw ContractError("evolution: tracked pair outside the basis");
    }
  }
}

void check_times(const std::vector<double>& times) {
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!(times[j] >= 0.0) || !std::isfinite(times[j])) throw DomainError("evolution: times must be finite and >= 0");
    if (j > 0 && times[j] < times[j - 1]) throw DomainError("evolution: times must be ascending");
  }
}

double reduced_expectation(const Eigen::MatrixXcd& rho, const Eigen::MatrixXd& z) {
  const Complex value = rho.cwiseProduct(z.transpose().cast<Complex>()).sum();
  const double scale = rho.cwiseAbs().cwiseProduct(z.cwiseAbs()).sum();
  if (std::abs(value.imag()) > 1e-10 * std::max(scale, 1.0)) {
    throw NumericalFailure("position_expectation: trace has a non-negligible imaginary part");
  }
  return value.real();
}

EvolutionResult run_series(Backend backend, const DensityMatrix& rho0, const EvolutionContext& ctx,
                           const std::vector<double>& times, const Propagator& propagate) {
  rho0.validate();
  if (rho0.dim() != ctx.basis.size() || ctx.position.dim() != ctx.basis.size()) {
    throw ContractError("evolution: dimension mismatch between state, basis and position matrix");
  }
  check_times(times);
  check_pairs(ctx);

  const double tau = ctx.basis.scales().time_unit;
  const double length = ctx.basis.scales().length_unit;
  EvolutionResult out;
  out.backend = backend;
  out.times = times;
  out.z_expect.reserve(times.size());
  out.purity.reserve(times.size());
  for (const auto& [m, n] : ctx.tracked_pairs) {
    PairSeries p;
    p.m = m;
    p.n = n;
    out.pairs.push_back(p);
  }

  for (double t : times) {
    const Eigen::MatrixXcd rho = propagate(t / tau);
    out.z_expect.push_back(reduced_expectation(rho, ctx.position.reduced) * length);
    out.purity.push_back(rho.cwiseAbs2().sum());
    for (auto& p : out.pairs) p.values.push_back(rho(p.m - 1, p.n - 1));
  }
  for (auto& p : out.pairs) {
    const double initial = std::abs(rho0.entries(p.m - 1, p.n - 1));
    if (initial <= kVisibilityFloor) continue;
    p.visibility.reserve(p.values.size());
    for (const Complex& v : p.values) p.visibility.push_back(std::abs(v) / initial);
  }
  return out;
}

void add_linearization_warning(const EvolutionContext& ctx, EvolutionResult& result) {
  const auto& levels = ctx.thermal.spectrum.levels;
  const double worst = rest_ratio(ctx, *std::max_element(levels.begin(), levels.end()));
  if (worst >= kLinearizationGuard) {
    std::ostringstream msg;
    msg << "validity-guard: max E_i/mc^2 = " << worst << " >= " << kLinearizationGuard;
    result.warnings.push_back(msg.str());
  }
}

Propagator make_propagator(Backend backend, const DensityMatrix& rho0, const EvolutionContext& ctx,
                           double& defect) {
  switch (backend) {
    case Backend::exact_phase:
      return phase_propagator(rho0, ctx, ctx.thermal.weights, level_shifts(ctx, false));
    case Backend::exact_reproject:
      return reproject_propagator(rho0, ctx, defect);
    case Backend::first_order:
      return phase_propagator(rho0, ctx, ctx.thermal.weights, level_shifts(ctx, true));
    case Backend::cumulant:
      return cumulant_propagator(rho0, ctx, cumulant_stats(ctx));
  }
  throw ContractError("unknown backend");
}

}  // namespace

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::exact_phase: return "exact_phase";
    case Backend::exact_reproject: return "exact_reproject";
    case Backend::first_order: return "first_order";
    case Backend::cumulant: return "cumulant";
  }
  return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) {
  for (Backend b : {Backend::exact_phase, Backend::exact_reproject, Backend::first_order, Backend::cumulant}) {
    if (backend_name(b) == name) return b;
  }
  return std::nullopt;
}

std::string_view damping_name(DampingConvention convention) {
  return convention == DampingConvention::printed ? "printed" : "second_cumulant";
}

std::optional<DampingConvention> parse_damping(std::string_view name) {
  if (name == "printed") return DampingConvention::printed;
  if (name == "second_cumulant") return DampingConvention::second_cumulant;
  return std::nullopt;
}

CmState state_from_coefficients(const Eigen::VectorXcd& coefficients) {
  if (coefficients.size() == 0 || !coefficients.allFinite()) {
    throw DomainError("state_from_coefficients: coefficients must be finite and non-empty");
  }
  const double norm = coefficients.norm();
  if (norm == 0.0) throw DomainError("state_from_coefficients: zero vector");
  return {coefficients / norm, 1.0};
}

CmState gaussian_packet(const EigenBasis& basis, double center, double sigma, double tol) {
  if (!(sigma > 0.0) || !std::isfinite(center) || !std::isfinite(sigma)) {
    throw DomainError("gaussian_packet: need finite center and sigma > 0");
  }
  const double amplitude = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
  const auto packet = [=](double zeta) {
    const double d = zeta - center;
    return amplitude * std::exp(-d * d / (4.0 * sigma * sigma));
  };
  const double upper = std::max(basis.reduced_cutoff(), center + 15.0 * sigma);
  Eigen::VectorXcd c(basis.size());
  for (int n = 1; n <= basis.size(); ++n) {
    const auto integrand = [&](double zeta) { return basis.reduced_eigenfunction(n, zeta) * packet(zeta); };
    c(n - 1) = integrate(integrand, 0.0, upper, tol).value;
  }
  const double captured = c.squaredNorm();
  if (captured < kMinCapturedNorm) {
    std::ostringstream msg;
    msg << "gaussian_packet: basis captures only " << captured << " of the packet norm (need >= "
        << kMinCapturedNorm << ")";
    throw DomainError(msg.str());
  }
  return {c / std::sqrt(captured), captured};
}

DensityMatrix DensityMatrix::from_state(const CmState& state) {
  return {state.coefficients * state.coefficients.adjoint()};
}

double DensityMatrix::trace_error() const { return std::abs(entries.trace() - Complex(1.0, 0.0)); }

double DensityMatrix::hermiticity_error() const { return (entries - entries.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::purity() const { return (entries * entries).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (entries + entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) throw DomainError("DensityMatrix: must be square");
  if (hermiticity_error() > 1e-12) throw DomainError("DensityMatrix: not Hermitian");
  if (trace_error() > 1e-10) throw DomainError("DensityMatrix: trace differs from 1");
  if (min_eigenvalue() < -1e-10) throw DomainError("DensityMatrix: negative eigenvalue");
}

double position_expectation(const DensityMatrix& rho, const OperatorMatrix& z) {
  if (rho.dim() != z.dim()) throw ContractError("position_expectation: dimension mismatch");
  return reduced_expectation(rho.entries, z.reduced) * z.unit;
}

CumulantStats cumulant_stats(const EvolutionContext& ctx) {
  const BouncerParams& p = ctx.basis.params();
  const double k = ctx.basis.scales().k;
  CumulantStats stats;
  stats.mean_energy = ctx.thermal.mean_energy;
  stats.variance = ctx.thermal.variance;
  stats.convention = ctx.damping;
  const int n = ctx.basis.size();
  stats.delta_rate = Eigen::MatrixXd::Zero(n, n);
  const double c2 = p.c * p.c;
  const double prefactor = stats.variance * p.gravity * p.gravity / (9.0 * p.hbar * p.hbar * c2 * c2 * k * k);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double gap = ctx.basis.alphas()[a] - ctx.basis.alphas()[b];
      stats.delta_rate(a, b) = prefactor * gap * gap;
    }
  }
  return stats;
}

EvolutionResult evolve_exact(const DensityMatrix& rho0, const EvolutionContext& ctx, const std::vector<double>& times,
                             bool reproject) {
  double defect = 0.0;
  const Backend backend = reproject ? Backend::exact_reproject : Backend::exact_phase;
  EvolutionResult out = run_series(backend, rho0, ctx, times, make_propagator(backend, rho0, ctx, defect));
  if (reproject) out.diagnostics.emplace_back("overlap_orthogonality_defect", defect);
  return out;
}

EvolutionResult evolve_first_order(const DensityMatrix& rho0, const EvolutionContext& ctx,
                                   const std::vector<double>& times) {
  double unused = 0.0;
  EvolutionResult out =
      run_series(Backend::first_order, rho0, ctx, times, make_propagator(Backend::first_order, rho0, ctx, unused));
  add_linearization_warning(ctx, out);
  return out;
}

CumulantRun evolve_cumulant(const DensityMatrix& rho0, const EvolutionContext& ctx, const std::vector<double>& times) {
  CumulantRun run;
  run.stats = cumulant_stats(ctx);
  run.result = run_series(Backend::cumulant, rho0, ctx, times, cumulant_propagator(rho0, ctx, run.stats));
  add_linearization_warning(ctx, run.result);
  return run;
}

EvolutionResult evolve_bare(const DensityMatrix& rho0, const EvolutionContext& ctx, const std::vector<double>& times,
                            double rate_scale) {
  return run_series(Backend::exact_phase, rho0, ctx, times,
                    phase_propagator(rho0, ctx, {1.0}, {rate_scale - 1.0}));
}

EvolutionResult evolve(Backend backend, const DensityMatrix& rho0, const EvolutionContext& ctx,
                       const std::vector<double>& times) {
  switch (backend) {
    case Backend::exact_phase: return evolve_exact(rho0, ctx, times, false);
    case Backend::exact_reproject: return evolve_exact(rho0, ctx, times, true);
    case Backend::first_order: return evolve_first_order(rho0, ctx, times);
    case Backend::cumulant: return evolve_cumulant(rho0, ctx, times).result;
  }
  throw ContractError("unknown backend");
}

DensityMatrix density_at(Backend backend, const DensityMatrix& rho0, const EvolutionContext& ctx, double t) {
  double defect = 0.0;
  return {make_propagator(backend, rho0, ctx, defect)(t / ctx.basis.scales().time_unit)};
}

std::vector<double> uniform_times(double t_max, int steps) {
  if (!(t_max >= 0.0) || steps < 1) throw DomainError("uniform_times: need t_max >= 0 and steps >= 1");
  std::vector<double> t(steps + 1);
  for (int j = 0; j <= steps; ++j) t[j] = t_max * j / steps;
  return t;
}

RevivalReport detect_revival(const EvolutionResult& series, double window) {
  const auto& t = series.times;
  const auto& z = series.z_expect;
  if (t.size() < 3 || z.size() != t.size()) throw ContractError("detect_revival: series too short");
  const double dt = t[1] - t[0];
  if (!(window > 0.0) || !(dt > 0.0)) throw ContractError("detect_revival: need window > 0 and a uniform grid");
  if (t.back() - t.front() < 3.0 * window) {
    throw ContractError("detect_revival: series must span at least three windows");
  }
  const auto w = static_cast<std::size_t>(std::max(2L, std::lround(window / dt)));
  const std::size_t count = z.size() - w;

  std::vector<double> contrast(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto [lo, hi] = std::minmax_element(z.begin() + i, z.begin() + i + w + 1);
    contrast[i] = *hi - *lo;
  }

  RevivalReport report;
  report.initial_contrast = contrast[0];
  const double zscale = std::max(1.0, std::abs(*std::max_element(z.begin(), z.end())));
  if (contrast[0] <= 1e-12 * zscale) {
    report.diagnostic = "stationary";
    return report;
  }
  const double threshold = 0.2 * contrast[0];
  std::size_t i = 0;
  while (i < count && contrast[i] >= threshold) ++i;
  if (i == count) {
    report.diagnostic = "no-collapse";
    return report;
  }
  report.collapse_time = t[i];
  report.diagnostic = "ok";
  const double half = 0.5 * static_cast<double>(w) * dt;
  while (i < count) {
    if (contrast[i] <= threshold) {
      ++i;
      continue;
    }
    std::size_t best = i;
    while (i < count && contrast[i] > threshold) {
      if (contrast[i] > contrast[best]) best = i;
      ++i;
    }
    report.revivals.push_back({t[best] + half, contrast[best] / contrast[0]});
  }
  return report;
}

double early_period(const EvolutionResult& series, int cycles) {
  const auto& t = series.times;
  const auto& z = series.z_expect;
  if (cycles < 1 || t.size() < 3) throw ContractError("early_period: need cycles >= 1 and a usable series");
  std::vector<double> peaks;
  if (z[1] < z[0]) peaks.push_back(t[0]);
  for (std::size_t j = 1; j + 1 < z.size() && static_cast<int>(peaks.size()) <= cycles; ++j) {
    if (z[j] > z[j - 1] && z[j] >= z[j + 1]) {
      // Vertex of the parabola through the three samples.
      const double denom = z[j - 1] - 2.0 * z[j] + z[j + 1];
      const double offset = denom != 0.0 ? 0.5 * (z[j - 1] - z[j + 1]) / denom : 0.0;
      peaks.push_back(t[j] + offset * (t[j + 1] - t[j]));
    }
  }
  if (static_cast<int>(peaks.size()) < cycles + 1) {
    throw NumericalFailure("early_period: fewer maxima than requested cycles");
  }
  return (peaks[cycles] - peaks[0]) / cycles;
}

}  // namespace qbounce
