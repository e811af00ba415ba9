#include "qbounce/airy.hpp"

#include <quadmath.h>

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "qbounce/errors.hpp"

namespace qbounce {
namespace {

// Anchor grid for the Taylor representation on [-8, 8].
constexpr double kAnchorStep = 0.25;
constexpr int kAnchorCount = 65;
constexpr int kTaylorTerms = 24;

struct Anchor {
  double ai;
  double ai_prime;
};

// Maclaurin two-series form, summed in quad precision. The positive side
// cancels badly (Ai(8) ~ 1e-8 against partial sums ~ 1e6), quad precision
// leaves ~20 good digits there.
Anchor maclaurin_quad(double xd) {
  const __float128 x = xd;
  const __float128 x3 = x * x * x;
  const __float128 ai0 = strtoflt128("0.355028053887817239260063186004183176397979", nullptr);
  const __float128 aip0 = strtoflt128("0.258819403792806798405183560189203963479091", nullptr);

  __float128 f = 1, f_term = 1;
  __float128 g = x, g_term = x;
  __float128 fp = 0, fp_term = 0;
  __float128 gp = 1, gp_term = 1;
  const __float128 eps = strtoflt128("1e-38", nullptr);
  for (int k = 1; k < 400; ++k) {
    const __float128 kk = k;
    f_term *= x3 / ((3 * kk) * (3 * kk - 1));
    g_term *= x3 / ((3 * kk + 1) * (3 * kk));
    fp_term = (k == 1) ? x * x / 2 : fp_term * x3 / ((3 * kk - 3) * (3 * kk - 1));
    gp_term *= x3 / ((3 * kk - 2) * (3 * kk));
    f += f_term;
    g += g_term;
    fp += fp_term;
    gp += gp_term;
    const __float128 largest = fabsq(f_term) + fabsq(g_term) + fabsq(fp_term) + fabsq(gp_term);
    if (k > 3 && largest < eps) break;
  }
  return {static_cast<double>(ai0 * f - aip0 * g), static_cast<double>(ai0 * fp - aip0 * gp)};
}

const std::array<Anchor, kAnchorCount>& anchors() {
  static const std::array<Anchor, kAnchorCount> table = [] {
    std::array<Anchor, kAnchorCount> t{};
    for (int j = 0; j < kAnchorCount; ++j) {
      t[j] = maclaurin_quad(-kAiryAsymptoticThreshold + kAnchorStep * j);
    }
    return t;
  }();
  return table;
}

// Local Taylor series of the Airy ODE y'' = x y about the nearest anchor.
AiryPair taylor_eval(double x) {
  const int j = static_cast<int>(std::lround((x + kAiryAsymptoticThreshold) / kAnchorStep));
  const double x0 = -kAiryAsymptoticThreshold + kAnchorStep * j;
  const double h = x - x0;
  const Anchor& a = anchors()[j];

  std::array<double, kTaylorTerms> t{};
  t[0] = a.ai;
  t[1] = a.ai_prime;
  for (int k = 0; k + 2 < kTaylorTerms; ++k) {
    const double prev = (k >= 1) ? t[k - 1] : 0.0;
    t[k + 2] = (x0 * t[k] + prev) / ((k + 2.0) * (k + 1.0));
  }
  // Horner for y and y'.
  double y = t[kTaylorTerms - 1];
  double dy = (kTaylorTerms - 1) * t[kTaylorTerms - 1];
  for (int k = kTaylorTerms - 2; k >= 0; --k) {
    y = y * h + t[k];
    if (k >= 1) dy = dy * h + k * t[k];
  }
  return {y, dy};
}

// u_k coefficients of the Airy asymptotic expansions, v_k = -(6k+1)/(6k-1) u_k.
struct AsymptoticCoefficients {
  static constexpr int kMax = 80;
  std::array<double, kMax> u{};
  std::array<double, kMax> v{};
};

const AsymptoticCoefficients& asymptotic_coefficients() {
  static const AsymptoticCoefficients c = [] {
    AsymptoticCoefficients r;
    r.u[0] = 1.0;
    r.v[0] = 1.0;
    for (int k = 1; k < AsymptoticCoefficients::kMax; ++k) {
      const double kk = k;
      r.u[k] = r.u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216.0 * kk);
      r.v[k] = -(6 * kk + 1) / (6 * kk - 1) * r.u[k];
    }
    return r;
  }();
  return c;
}

// Sum of sign^k c_k zeta^-k over the indices k = parity, parity+2, ...,
// truncated at the smallest term.
double asymptotic_sum(const std::array<double, AsymptoticCoefficients::kMax>& c, double zeta,
                      int parity, int stride, bool alternate) {
  double sum = 0.0;
  double prev = INFINITY;
  int sign = 1;
  for (int k = parity; k < AsymptoticCoefficients::kMax; k += stride) {
    const double term = c[k] * std::pow(zeta, -k);
    if (std::abs(term) > prev) break;
    sum += sign * term;
    prev = std::abs(term);
    if (prev < 1e-18 * std::abs(sum)) break;
    if (alternate) sign = -sign;
  }
  return sum;
}

// zeta = (2/3) z^(3/2) as an unevaluated sum hi + lo. The phase and the
// exponential amplify its rounding by |zeta| (up to 1900 at |x| = 200).
struct SplitZeta {
  double hi;
  double lo;
};

SplitZeta split_zeta(double z) {
  const double s = std::sqrt(z);
  const double s_lo = std::fma(-s, s, z) / (2.0 * s);
  const double p = z * s;
  const double p_lo = std::fma(z, s, -p) + z * s_lo;
  constexpr double kTwoThirds = 2.0 / 3.0;
  const double two_thirds_lo = std::fma(-3.0, kTwoThirds, 2.0) / 3.0;
  const double hi = p * kTwoThirds;
  const double lo = std::fma(p, kTwoThirds, -hi) + p * two_thirds_lo + p_lo * kTwoThirds;
  return {hi, lo};
}

AiryPair asymptotic_positive(double x) {
  const auto& c = asymptotic_coefficients();
  const SplitZeta sz = split_zeta(x);
  const double zeta = sz.hi;
  const double root4 = std::sqrt(std::sqrt(x));
  const double pref = std::exp(-sz.hi) * (1.0 - sz.lo) / (2.0 * std::sqrt(std::numbers::pi));
  // sum (-1)^k u_k zeta^-k
  const double su = asymptotic_sum(c.u, zeta, 0, 1, true);
  const double sv = asymptotic_sum(c.v, zeta, 0, 1, true);
  return {pref / root4 * su, -pref * root4 * sv};
}

AiryPair asymptotic_negative(double x) {
  const auto& c = asymptotic_coefficients();
  const double z = -x;
  const SplitZeta sz = split_zeta(z);
  const double zeta = sz.hi;
  const double root4 = std::sqrt(std::sqrt(z));
  // phase = zeta - pi/4 in two parts (two-sum), then cos/sin of hi + lo to first order in lo.
  constexpr double kQuarterPi = std::numbers::pi / 4.0;
  constexpr double kQuarterPiLo = 3.061616997868383e-17;
  const double phase = sz.hi - kQuarterPi;
  const double bv = phase - sz.hi;
  const double phase_lo = ((sz.hi - (phase - bv)) + (-kQuarterPi - bv)) + sz.lo - kQuarterPiLo;
  const double c0 = std::cos(phase);
  const double s0 = std::sin(phase);
  const double cs = c0 - s0 * phase_lo;
  const double sn = s0 + c0 * phase_lo;
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);

  const double u_even = asymptotic_sum(c.u, zeta, 0, 2, true);
  const double u_odd = asymptotic_sum(c.u, zeta, 1, 2, true);
  const double v_even = asymptotic_sum(c.v, zeta, 0, 2, true);
  const double v_odd = asymptotic_sum(c.v, zeta, 1, 2, true);

  return {inv_sqrt_pi / root4 * (cs * u_even + sn * u_odd),
          inv_sqrt_pi * root4 * (sn * v_even - cs * v_odd)};
}

void check_argument(double x) {
  if (!std::isfinite(x)) throw DomainError("airy: non-finite argument");
  if (std::abs(x) > kAirySupport) {
    throw UnsupportedRange("airy: |x| = " + std::to_string(std::abs(x)) + " exceeds support window 200");
  }
}

}  // namespace

AiryPair airy_ai_pair(double x) {
  check_argument(x);
  if (x > kAiryAsymptoticThreshold) return asymptotic_positive(x);
  if (x < -kAiryAsymptoticThreshold) return asymptotic_negative(x);
  return taylor_eval(x);
}

double airy_ai(double x) { return airy_ai_pair(x).ai; }

double airy_ai_prime(double x) { return airy_ai_pair(x).ai_prime; }

double airy_zero_estimate(int n) {
  return std::pow(3.0 * std::numbers::pi * (4.0 * n - 1.0) / 8.0, 2.0 / 3.0);
}

AiryZeroTable airy_zeros(int count, double tol) {
  if (count < 1) throw ContractError("airy_zeros: count must be >= 1");
  if (!(tol >= 1e-14 && tol <= 1e-6)) throw ContractError("airy_zeros: tol must lie in [1e-14, 1e-6]");

  constexpr int kMaxIterations = 50;
  AiryZeroTable table;
  table.zeros.reserve(count);

  // F(a) = Ai(-a), F'(a) = -Ai'(-a)
  for (int n = 1; n <= count; ++n) {
    const double seed = airy_zero_estimate(n);
    const double half_width = 0.4 * std::numbers::pi / std::sqrt(seed);
    double lo = seed - half_width;
    double hi = seed + half_width;
    double f_lo = airy_ai(-lo);
    const double f_hi = airy_ai(-hi);
    if (f_lo * f_hi > 0.0) {
      throw NumericalFailure("airy_zeros: seed bracket has no sign change for n = " + std::to_string(n), n);
    }

    double a = seed;
    bool converged = false;
    for (int it = 0; it < kMaxIterations; ++it) {
      const AiryPair p = airy_ai_pair(-a);
      const double f = p.ai;
      const double df = -p.ai_prime;
      if (f == 0.0) {
        converged = true;
        break;
      }
      if ((f < 0.0) == (f_lo < 0.0)) {
        lo = a;
        f_lo = f;
      } else {
        hi = a;
      }
      double next = a - f / df;
      if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - a);
      a = next;
      if (step <= tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NumericalFailure("airy_zeros: Newton did not converge for n = " + std::to_string(n), n);
    }

    AiryPair at = airy_ai_pair(-a);
    const double polished = a + at.ai / at.ai_prime;
    if (polished >= lo && polished <= hi) {
      a = polished;
      at = airy_ai_pair(-a);
    }
    const double residual = std::abs(at.ai) / std::abs(at.ai_prime);
    table.achieved_tolerance = std::max(table.achieved_tolerance, residual);

    const double ulp = std::nextafter(a, INFINITY) - a;
    const double probe = std::max(tol, 8.0 * ulp);
    if (airy_ai(-(a - probe)) * airy_ai(-(a + probe)) > 0.0) {
      throw NumericalFailure("airy_zeros: zero " + std::to_string(n) + " not bracketed at tolerance", n,
                             residual);
    }
    table.zeros.push_back(a);
  }
  return table;
}

}  // namespace qbounce
