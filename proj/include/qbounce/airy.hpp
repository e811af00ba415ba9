#pragma once

#include <vector>

namespace qbounce {

/// Largest |x| accepted by the Airy kernels. Beyond this Ai underflows on the
/// right and is uselessly oscillatory on the left for this problem.
inline constexpr double kAirySupport = 200.0;

/// Below this |x| the local-Taylor representation is used, above it the
/// asymptotic expansions.
inline constexpr double kAiryAsymptoticThreshold = 8.0;

struct AiryPair {
  double ai;
  double ai_prime;
};

/// Ai(x). Throws DomainError for non-finite x, UnsupportedRange for |x| > 200.
double airy_ai(double x);

/// Ai'(x). Same errors as airy_ai.
double airy_ai_prime(double x);

/// Ai and Ai' together (one table lookup / one asymptotic evaluation).
AiryPair airy_ai_pair(double x);

/// First zeros of Ai on the negative axis, stored as positive numbers
/// alpha_n with Ai(-alpha_n) = 0.
struct AiryZeroTable {
  std::vector<double> zeros;
  /// max_n |Ai(-alpha_n)| / |Ai'(-alpha_n)|
  double achieved_tolerance = 0.0;
};

/// Leading-order asymptotic location (3 pi (4n - 1) / 8)^(2/3) of the n-th zero, n >= 1.
double airy_zero_estimate(int n);

/// Newton (with bisection fallback) refinement of the first `count` zeros.
///
/// Requires count >= 1 and 1e-14 <= tol <= 1e-6. Every returned zero is
/// verified to be bracketed by a sign change of Ai over alpha_n -/+ tol
/// (tol widened to a few ulps where alpha_n +- tol is not representable).
/// Throws NumericalFailure carrying n if Newton has not converged after 50
/// iterations.
AiryZeroTable airy_zeros(int count, double tol);

}  // namespace qbounce
