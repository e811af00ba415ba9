#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <boost/math/special_functions/airy.hpp>

#include "../common/oracles.hpp"
#include "qbounce/basis.hpp"
#include "qbounce/errors.hpp"
#include "qbounce/operators.hpp"

using namespace qbounce;

namespace {

struct Fixture {
  EigenBasis basis = build_basis(bouncer_unit_params(1000.0), 30);
  OperatorMatrix z = position_matrix(basis);
  OperatorMatrix gram = gram_matrix(basis);
  OperatorMatrix kinetic = kinetic_matrix(basis, z);
  OperatorMatrix v = perturbation_cm_matrix(basis, z);
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("Gram matrix is the identity") {
  const auto& g = fx().gram;
  CHECK(g.kind == OperatorKind::overlap);
  CHECK(std::abs(g.reduced(0, 0) - 1.0) < 1e-9);
  CHECK(std::abs(g.reduced(0, 1)) < 1e-9);
  CHECK((g.reduced - Eigen::MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("position elements against closed forms and a Simpson oracle") {
  const auto& b = fx().basis;
  const auto& z = fx().z;
  const double k = b.scales().k;
  CHECK(z.at(1, 1) * k == doctest::Approx(1.558738273639845).epsilon(1e-9));
  CHECK(std::abs(std::abs(z.at(1, 2)) * k * std::pow(b.alpha(2) - b.alpha(1), 2) - 2.0) < 1e-6);
  for (int n = 1; n <= 30; ++n) {
    CHECK(std::abs(z.reduced(n - 1, n - 1) - 2.0 * b.alpha(n) / 3.0) < 1e-7);
    CHECK(z.at(n, n) > 0.0);
    for (int m = 1; m <= 30; ++m) CHECK(z.reduced(m - 1, n - 1) == z.reduced(n - 1, m - 1));
  }
  for (int m = 1; m <= 10; ++m) {
    for (int n = 1; n <= 10; ++n) {
      if (m == n) continue;
      CHECK(std::abs(std::abs(z.reduced(m - 1, n - 1)) / position_offdiagonal_magnitude(b, m, n) - 1.0) < 1e-5);
    }
  }
  // Independent Simpson oracle with Boost Ai for z_23 in l_g.
  const double a2 = -boost::math::airy_ai_zero<double>(2), a3 = -boost::math::airy_ai_zero<double>(3);
  const double n2 = 1.0 / std::abs(boost::math::airy_ai_prime(-a2));
  const double n3 = 1.0 / std::abs(boost::math::airy_ai_prime(-a3));
  const double z23 = oracle::simpson(
      [&](double s) { return n2 * boost::math::airy_ai(s - a2) * s * n3 * boost::math::airy_ai(s - a3); }, 0.0,
      a3 + 20.0, 6000);
  CHECK(z.reduced(1, 2) == doctest::Approx(z23).epsilon(1e-9));
  CHECK(z.asymmetry() <= 1e-10);
  CHECK(z.max_error_estimate <= 1e-12);
}

TEST_CASE("off-diagonal signs follow (-1)^(m-n+1) under positive norms, reproducibly") {
  const auto& z = fx().z;
  const OperatorMatrix again = position_matrix(fx().basis);
  for (int m = 1; m <= 30; ++m) {
    for (int n = 1; n <= 30; ++n) {
      CHECK(again.reduced(m - 1, n - 1) == z.reduced(m - 1, n - 1));
      if (m != n) CHECK((z.reduced(m - 1, n - 1) > 0) == ((m - n) % 2 != 0));
    }
  }
}

TEST_CASE("kinetic matrix from the operator identity") {
  const auto& b = fx().basis;
  const auto& t = fx().kinetic;
  const auto& z = fx().z;
  const double mg = b.params().mass * b.params().gravity;
  double trace = 0.0;
  for (int n = 1; n <= 30; ++n) {
    CHECK(t.at(n, n) == doctest::Approx(b.energy(n) / 3.0).epsilon(1e-8));
    CHECK(std::abs(t.at(n, n) / b.energy(n) - 1.0 / 3.0) < 1e-7);
    trace += t.at(n, n);
    for (int m = 1; m <= 30; ++m) {
      if (m != n) CHECK(std::abs(t.at(m, n) + mg * z.at(m, n)) < 1e-10);
    }
  }
  CHECK(trace > 0.0);
  CHECK(t.kind == OperatorKind::kinetic);
}

TEST_CASE("perturbation matrix V = -T + m g z") {
  const auto& b = fx().basis;
  const auto& v = fx().v;
  const auto& z = fx().z;
  const double mg = b.params().mass * b.params().gravity;
  CHECK(v.at(1, 1) == doctest::Approx(b.energy(1) / 3.0).epsilon(1e-8));
  CHECK(std::abs(v.at(1, 2) - 2.0 * mg * z.at(1, 2)) < 1e-10);
  CHECK(v.asymmetry() <= 1e-10);
  for (int m = 1; m <= 30; ++m) {
    for (int n = 1; n <= 30; ++n) CHECK(v.reduced(m - 1, n - 1) == v.reduced(n - 1, m - 1));
  }
}

TEST_CASE("SI units on a neutron-like basis") {
  const BouncerParams p{1.67e-27, 9.81, kHbarSI, kSpeedOfLightSI};
  const EigenBasis b = build_basis(p, 5);
  const OperatorMatrix z = position_matrix(b);
  const OperatorMatrix v = perturbation_cm_matrix(b, z);
  CHECK(z.at(1, 1) == doctest::Approx(2.0 * b.alpha(1) / (3.0 * b.scales().k)).epsilon(1e-10));
  CHECK(v.at(2, 2) == doctest::Approx(b.energy(2) / 3.0).epsilon(1e-10));
}

TEST_CASE("resolution of identity: sum_m z_mn^2 approaches <n|z^2|n>") {
  const auto& b = fx().basis;
  const auto& z = fx().z;
  for (int n : {1, 3}) {
    const double z2 = 8.0 * b.alpha(n) * b.alpha(n) / 15.0;  // <n|z^2|n> in l_g^2
    double partial = 0.0, prev_deficit = INFINITY;
    for (int m = 1; m <= 30; ++m) {
      partial += z.reduced(m - 1, n - 1) * z.reduced(m - 1, n - 1);
      const double deficit = z2 - partial;
      if (m > n) CHECK(deficit < prev_deficit);
      CHECK(deficit > -1e-9);
      prev_deficit = deficit;
    }
    CHECK(prev_deficit < 1e-3 * z2);
  }
}

TEST_CASE("overlap with a rescaled basis") {
  const EigenBasis b = build_basis(bouncer_unit_params(1.0), 10);
  const OperatorMatrix same = shifted_overlap_matrix(b, 1.0);
  CHECK((same.reduced - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() == 0.0);
  const OperatorMatrix o = shifted_overlap_matrix(b, 1.0 + 1e-4);
  CHECK(std::abs(o.reduced(0, 0) - 1.0) < 1e-6);
  CHECK((o.reduced.transpose() * o.reduced - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("closed-form magnitude contract") {
  CHECK_THROWS_AS(position_offdiagonal_magnitude(fx().basis, 2, 2), ContractError);
}
