#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "../common/oracles.hpp"
#include "qbounce/errors.hpp"
#include "qbounce/evolution.hpp"

using namespace qbounce;
using cd = std::complex<double>;

namespace {

struct Setup {
  BouncerParams params = bouncer_unit_params(1000.0);
  EigenBasis basis = build_basis(params, 12);
  OperatorMatrix z = position_matrix(basis);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

EvolutionContext context(const ThermalState& th, std::vector<std::pair<int, int>> pairs = {{1, 2}}) {
  return {setup().basis, setup().z, th, std::move(pairs), DampingConvention::second_cumulant, 1e-12};
}

ThermalState ground_only() { return thermal_state(listed_spectrum({0.0}), 0.0, 1.0); }

ThermalState two_level(double x, double beta_gap) {
  const double gap = x * setup().params.rest_energy();
  return thermal_state(two_level_spectrum(gap), gap / beta_gap, 1.0);
}

DensityMatrix superposition(std::initializer_list<cd> amps) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(setup().basis.size());
  int i = 0;
  for (cd a : amps) c(i++) = a;
  return DensityMatrix::from_state(state_from_coefficients(c));
}

double beat_period() {
  const auto& b = setup().basis;
  return 2.0 * std::numbers::pi / (b.alpha(2) - b.alpha(1)) * b.scales().time_unit;
}

double max_pair_gap(const EvolutionResult& a, const EvolutionResult& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.times.size(); ++j) {
    worst = std::max(worst, std::abs(a.pairs[0].values[j] - b.pairs[0].values[j]));
  }
  return worst;
}

const std::vector<Backend> kAll{Backend::exact_phase, Backend::exact_reproject, Backend::first_order,
                                Backend::cumulant};

}  // namespace

TEST_CASE("backend names round-trip") {
  for (Backend b : kAll) CHECK(parse_backend(backend_name(b)) == b);
  CHECK_FALSE(parse_backend("exact").has_value());
  CHECK(parse_damping("printed") == DampingConvention::printed);
  CHECK(parse_damping(damping_name(DampingConvention::second_cumulant)) == DampingConvention::second_cumulant);
}

TEST_CASE("states and density matrices") {
  const CmState s = state_from_coefficients(Eigen::Vector3cd(cd(3, 0), cd(0, 4), 0));
  CHECK(s.coefficients.norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(state_from_coefficients(Eigen::Vector2cd::Zero()), DomainError);
  const DensityMatrix rho = DensityMatrix::from_state(s);
  CHECK(rho.trace_error() < 1e-15);
  CHECK(rho.hermiticity_error() == 0.0);
  CHECK(rho.purity() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rho.min_eigenvalue() > -1e-12);
  CHECK_NOTHROW(rho.validate());
  DensityMatrix bad = rho;
  bad.entries(0, 1) += 1e-6;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = rho;
  bad.entries *= 1.01;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("Gaussian packet projection") {
  const EigenBasis b = build_basis(bouncer_unit_params(1.0), 30);
  const CmState g = gaussian_packet(b, 10.0, 1.0);
  CHECK(g.captured_norm > 0.999);
  CHECK(g.coefficients.norm() == doctest::Approx(1.0).epsilon(1e-13));
  for (int n = 0; n < 30; ++n) CHECK(std::abs(g.coefficients(n).imag()) == 0.0);
  const OperatorMatrix z = position_matrix(b);
  const double zmean = position_expectation(DensityMatrix::from_state(g), z) / b.scales().length_unit;
  CHECK(zmean == doctest::Approx(10.0).epsilon(1e-3));
  CHECK_THROWS_AS(gaussian_packet(b, 40.0, 1.0), DomainError);
  CHECK_THROWS_AS(gaussian_packet(b, 10.0, 0.0), DomainError);
}

TEST_CASE("position expectation") {
  const auto& z = setup().z;
  const int n = setup().basis.size();
  CHECK(position_expectation(superposition({1.0}), z) == doctest::Approx(2.0 * setup().basis.alpha(1) / (3.0 * setup().basis.scales().k)).epsilon(1e-9));
  DensityMatrix mixed{Eigen::MatrixXcd::Zero(n, n)};
  mixed.entries(0, 0) = mixed.entries(1, 1) = 0.5;
  CHECK(position_expectation(mixed, z) == doctest::Approx((z.at(1, 1) + z.at(2, 2)) / 2).epsilon(1e-14));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(position_expectation(superposition({s, s}), z) ==
        doctest::Approx((z.at(1, 1) + z.at(2, 2)) / 2 + z.at(1, 2)).epsilon(1e-14));
  DensityMatrix small{Eigen::MatrixXcd::Identity(3, 3) / 3.0};
  CHECK_THROWS_AS(position_expectation(small, z), ContractError);
}

TEST_CASE("single internal level: pure, bare evolution, all backends agree") {
  const auto ctx = context(ground_only());
  const auto rho0 = superposition({0.6, cd(0, 0.8), 0.0, 0.0});
  const auto times = uniform_times(5.0 * beat_period(), 250);
  const EvolutionResult bare = evolve_bare(rho0, ctx, times);
  for (Backend b : kAll) {
    const EvolutionResult r = evolve(b, rho0, ctx, times);
    CHECK(r.backend == b);
    REQUIRE(r.times == times);
    for (std::size_t j = 0; j < times.size(); ++j) {
      CHECK(std::abs(r.purity[j] - 1.0) < 1e-10);
      CHECK(std::abs(r.z_expect[j] - bare.z_expect[j]) < 1e-10);
    }
  }
  // Linear phase of rho_12 for a single level.
  const EvolutionResult fo = evolve_first_order(rho0, ctx, times);
  const double rate = (setup().basis.alpha(2) - setup().basis.alpha(1)) / setup().basis.scales().time_unit;
  const double phase0 = std::arg(rho0.entries(0, 1));
  for (std::size_t j = 0; j < times.size(); ++j) {
    const cd expected = std::polar(std::abs(rho0.entries(0, 1)), phase0 + rate * times[j]);
    CHECK(std::abs(fo.pairs[0].values[j] - expected) < 1e-10);
  }
}

TEST_CASE("stationary state keeps <z> constant in the phase-type backends") {
  const auto ctx = context(two_level(1e-3, 1.0));
  const auto rho0 = superposition({1.0});
  const auto times = uniform_times(40.0, 100);
  for (Backend b : {Backend::exact_phase, Backend::first_order, Backend::cumulant}) {
    const EvolutionResult r = evolve(b, rho0, ctx, times);
    for (double v : r.z_expect) CHECK(std::abs(v - setup().z.at(1, 1)) < 1e-10);
  }
}

TEST_CASE("two-level internal, two-level centre of mass: closed form") {
  const double x = 2e-3;
  const auto th = two_level(x, 0.7);
  const auto ctx = context(th);
  const double s = 1.0 / std::sqrt(2.0);
  const auto rho0 = superposition({s, s});
  const auto times = uniform_times(30.0 * beat_period(), 300);
  const EvolutionResult r = evolve_exact(rho0, ctx, times);
  const auto& b = setup().basis;
  const double gap = b.alpha(2) - b.alpha(1);
  for (std::size_t j = 0; j < times.size(); ++j) {
    cd sum = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double xi = th.spectrum.levels[i] / setup().params.rest_energy();
      sum += th.weights[i] * std::exp(cd(0, gap * std::cbrt(1.0 + xi) * times[j] / b.scales().time_unit));
    }
    CHECK(std::abs(std::abs(r.pairs[0].values[j]) - std::abs(sum) / 2.0) < 1e-10);
    CHECK(std::abs(r.pairs[0].values[j] - sum / 2.0) < 1e-10);
  }
}

TEST_CASE("first_order converges to exact_phase quadratically") {
  const double s = 1.0 / std::sqrt(2.0);
  const auto rho0 = superposition({s, s, 0.0, 0.0});
  const auto times = uniform_times(beat_period(), 200);
  const auto error = [&](double x) {
    const auto ctx = context(two_level(x, 1.0));
    return max_pair_gap(evolve_first_order(rho0, ctx, times), evolve_exact(rho0, ctx, times));
  };
  const double ratio = error(1e-3) / error(1e-4);
  CHECK(ratio > 100.0 / 1.5);
  CHECK(ratio < 100.0 * 1.5);
  const auto zero_ctx = context(ground_only());
  CHECK(max_pair_gap(evolve_first_order(rho0, zero_ctx, times), evolve_exact(rho0, zero_ctx, times)) < 1e-12);
}

TEST_CASE("linearization guard tags the result") {
  const auto rho0 = superposition({0.6, 0.8});
  const auto ctx = context(two_level(0.2, 1.0));
  const auto times = uniform_times(1.0, 4);
  CHECK_FALSE(evolve_first_order(rho0, ctx, times).warnings.empty());
  CHECK_FALSE(evolve_cumulant(rho0, ctx, times).result.warnings.empty());
  CHECK(evolve_first_order(rho0, context(two_level(1e-3, 1.0)), times).warnings.empty());
}

TEST_CASE("cumulant backend") {
  const double s = 1.0 / std::sqrt(2.0);
  const auto rho0 = superposition({s, s});
  const auto ctx = context(two_level(1e-3, 1.0));
  const CumulantStats stats = cumulant_stats(ctx);

  SUBCASE("t = 0 reproduces rho0") {
    CHECK((density_at(Backend::cumulant, rho0, ctx, 0.0).entries - rho0.entries).cwiseAbs().maxCoeff() == 0.0);
    CHECK(stats.delta(1, 2, 0.0) == 0.0);
  }
  SUBCASE("zero variance reduces to first_order") {
    const auto c0 = context(ground_only());
    const auto times = uniform_times(10.0, 50);
    CHECK(max_pair_gap(evolve_cumulant(rho0, c0, times).result, evolve_first_order(rho0, c0, times)) < 1e-13);
  }
  SUBCASE("delta structure") {
    const int n = setup().basis.size();
    for (int a = 1; a <= n; ++a) {
      CHECK(stats.delta(a, a, 3.0) == 0.0);
      for (int b = 1; b <= n; ++b) {
        CHECK(stats.delta(a, b, 2.0) == stats.delta(b, a, 2.0));
        CHECK(stats.delta(a, b, 2.0) >= 0.0);
        CHECK(stats.delta(a, b, 6.0) == doctest::Approx(9.0 * stats.delta(a, b, 2.0)).epsilon(1e-15));
        const double da = setup().basis.alpha(a) - setup().basis.alpha(b);
        if (a != b) CHECK(stats.delta_rate(a - 1, b - 1) / (da * da) == doctest::Approx(stats.delta_rate(0, 1) / std::pow(setup().basis.alpha(2) - setup().basis.alpha(1), 2)).epsilon(1e-12));
      }
    }
    CHECK(stats.applied_exponent(1, 2, 5.0) == 0.5 * stats.delta(1, 2, 5.0));
    EvolutionContext printed = ctx;
    printed.damping = DampingConvention::printed;
    CHECK(cumulant_stats(printed).applied_exponent(1, 2, 5.0) == stats.delta(1, 2, 5.0));
  }
  SUBCASE("delta grows with the variance") {
    double prev = -1.0;
    for (double beta_gap : {8.0, 4.0, 2.0, 1.0, 0.5}) {
      const double d = cumulant_stats(context(two_level(1e-3, beta_gap))).delta(1, 2, 100.0);
      CHECK(d > prev);
      prev = d;
    }
  }
  SUBCASE("matches the thermal average while the exponent is small, departs beyond") {
    const double t_half = std::sqrt(0.5 / stats.applied_exponent(1, 2, 1.0));
    const auto times = uniform_times(3.0 * t_half, 600);
    const CumulantRun cu = evolve_cumulant(rho0, ctx, times);
    const EvolutionResult fo = evolve_first_order(rho0, ctx, times);
    double inside = 0.0, beyond = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double dev = std::abs(std::abs(cu.result.pairs[0].values[j]) - std::abs(fo.pairs[0].values[j])) /
                         std::abs(fo.pairs[0].values[j]);
      if (stats.applied_exponent(1, 2, times[j]) <= 0.5) inside = std::max(inside, dev);
      if (stats.delta(1, 2, times[j]) > 2.0) beyond = std::max(beyond, dev);
    }
    CHECK(inside < 0.05);
    CHECK(beyond > 0.05);
  }
}

TEST_CASE("cumulant converges to first_order as the variance shrinks") {
  const double s = 1.0 / std::sqrt(2.0);
  const auto rho0 = superposition({s, s});
  const auto times = uniform_times(beat_period(), 400);
  const auto error = [&](double x) {
    const auto ctx = context(two_level(x, 1.0));
    return max_pair_gap(evolve_cumulant(rho0, ctx, times).result, evolve_first_order(rho0, ctx, times));
  };
  const double ratio = error(2e-3) / error(2e-3 / std::sqrt(2.0));
  CHECK(ratio > 4.0 / 1.5);
  CHECK(ratio < 4.0 * 1.5);
}

TEST_CASE("trace, hermiticity and purity across backends") {
  const EigenBasis& b = setup().basis;
  const CmState g = gaussian_packet(b, 6.0, 1.0);
  const DensityMatrix rho0 = DensityMatrix::from_state(g);
  const auto ctx = context(thermal_state(ladder_spectrum(0.5 * setup().params.rest_energy() * 1e-3, 6), 0.4, 1.0));
  for (Backend backend : kAll) {
    for (double t : {0.0, 0.7, 13.0, 250.0}) {
      const DensityMatrix rho = density_at(backend, rho0, ctx, t);
      CHECK(rho.trace_error() < 1e-10);
      CHECK(rho.hermiticity_error() < 1e-10);
      CHECK(rho.purity() <= 1.0 + 1e-10);
      CHECK(rho.min_eigenvalue() > -1e-10);
    }
  }
  const EvolutionResult r = evolve_exact(rho0, ctx, uniform_times(beat_period(), 50), true);
  bool found = false;
  for (const auto& [name, value] : r.diagnostics) {
    if (name == "overlap_orthogonality_defect") {
      found = true;
      CHECK(value < 1e-6);
    }
  }
  CHECK(found);
}

TEST_CASE("purity decreases over one period for a thermal two-level IDOF") {
  const double s = 1.0 / std::sqrt(2.0);
  const auto rho0 = superposition({s, s});
  const auto ctx = context(two_level(1e-2, 1.0));
  const double t_rel = 2.0 * std::numbers::pi / ((setup().basis.alpha(2) - setup().basis.alpha(1)) * 1e-2 / 3.0) *
                       setup().basis.scales().time_unit;
  const auto times = uniform_times(0.25 * t_rel, 100);
  const EvolutionResult r = evolve_exact(rho0, ctx, times);
  for (std::size_t j = 1; j < times.size(); ++j) CHECK(r.purity[j] < r.purity[j - 1]);
}

TEST_CASE("visibility is absent for pairs without initial coherence") {
  const auto ctx = context(ground_only(), {{1, 2}, {1, 3}});
  const auto r = evolve_exact(superposition({0.6, 0.8}), ctx, uniform_times(1.0, 3));
  CHECK(r.pairs[0].visibility.size() == 4u);
  CHECK(r.pairs[0].visibility[0] == doctest::Approx(1.0));
  CHECK(r.pairs[1].visibility.empty());
  CHECK_THROWS_AS(evolve_exact(superposition({1.0}), context(ground_only(), {{0, 2}}), {0.0}), ContractError);
}

TEST_CASE("revival detection") {
  SUBCASE("stationary series") {
    const auto r = evolve_exact(superposition({1.0}), context(ground_only()), uniform_times(100.0, 1000));
    const RevivalReport rep = detect_revival(r, 10.0);
    CHECK(rep.revivals.empty());
    CHECK(rep.diagnostic == "stationary");
  }
  SUBCASE("Gaussian packet from 10 l_g") {
    const EigenBasis b = build_basis(bouncer_unit_params(1.0), 30);
    const OperatorMatrix z = position_matrix(b);
    const DensityMatrix rho0 = DensityMatrix::from_state(gaussian_packet(b, 10.0, 1.0));
    const EvolutionContext ctx{b, z, ground_only(), {}, DampingConvention::second_cumulant, 1e-12};
    const double tau = b.scales().time_unit;
    const auto r = evolve_bare(rho0, ctx, uniform_times(170.0 * tau, 8500));
    const double classical = oracle::classical_bounce_period(10.0 * b.scales().length_unit, 1.0);
    CHECK(std::abs(early_period(r, 2) / classical - 1.0) < 0.02);
    const RevivalReport rep = detect_revival(r, classical);
    CHECK(rep.diagnostic == "ok");
    REQUIRE(rep.collapse_time.has_value());
    REQUIRE_FALSE(rep.revivals.empty());
    CHECK(rep.revivals.front().time > *rep.collapse_time);
    double best = 0.0;
    for (const auto& rv : rep.revivals) best = std::max(best, rv.contrast);
    CHECK(best >= 0.5);
    CHECK_THROWS_AS(detect_revival(r, 100.0 * tau), ContractError);
  }
}

TEST_CASE("time grid") {
  const auto t = uniform_times(2.0, 4);
  CHECK(t == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  CHECK_THROWS(uniform_times(-1.0, 4));
  CHECK_THROWS(uniform_times(1.0, 0));
}
