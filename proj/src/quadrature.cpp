#include "qbounce/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "qbounce/errors.hpp"

namespace qbounce {
namespace {

// Kronrod abscissae (descending); odd indices are the 10-point Gauss nodes.
constexpr std::array<double, 11> kNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double lower;
  double upper;
  double value;
  double error;

  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel kronrod21(const Integrand& f, double lower, double upper) {
  const double center = 0.5 * (lower + upper);
  const double half = 0.5 * (upper - lower);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[10];
  double gauss = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {lower, upper, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double lower, double upper, double tol, int max_panels) {
  if (!(upper >= lower) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw DomainError("integrate: invalid interval");
  }
  if (!(tol > 0.0)) throw DomainError("integrate: tolerance must be positive");
  QuadratureResult out;
  if (upper == lower) return out;

  std::priority_queue<Panel> panels;
  panels.push(kronrod21(f, lower, upper));
  double total_error = panels.top().error;
  out.evaluations = 21;

  while (total_error > tol) {
    if (static_cast<int>(panels.size()) >= max_panels) {
      throw NumericalFailure("integrate: no convergence within " + std::to_string(max_panels) +
                                 " panels (estimate " + std::to_string(total_error) + ")",
                             -1, total_error);
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lower + worst.upper);
    const Panel left = kronrod21(f, worst.lower, mid);
    const Panel right = kronrod21(f, mid, worst.upper);
    out.evaluations += 42;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Sum in ascending position order so the result does not depend on heap layout.
  std::vector<Panel> done;
  done.reserve(panels.size());
  while (!panels.empty()) {
    done.push_back(panels.top());
    panels.pop();
  }
  std::sort(done.begin(), done.end(), [](const Panel& a, const Panel& b) { return a.lower < b.lower; });
  out.value = 0.0;
  out.error_estimate = 0.0;
  for (const Panel& p : done) {
    out.value += p.value;
    out.error_estimate += p.error;
  }
  out.panels = static_cast<int>(done.size());
  return out;
}

QuadratureResult integrate_semi_infinite(const Integrand& f, double tol, double initial_cutoff,
                                         double max_cutoff) {
  QuadratureResult total = integrate(f, 0.0, initial_cutoff, 0.5 * tol);
  double lower = initial_cutoff;
  while (true) {
    const double upper = 2.0 * lower;
    if (upper > max_cutoff) {
      throw NumericalFailure("integrate_semi_infinite: tail did not decay before cutoff", -1,
                             total.error_estimate);
    }
    const QuadratureResult panel = integrate(f, lower, upper, 0.25 * tol);
    total.value += panel.value;
    total.error_estimate += panel.error_estimate;
    total.panels += panel.panels;
    total.evaluations += panel.evaluations;
    if (std::abs(panel.value) + panel.error_estimate < 0.25 * tol) {
      total.error_estimate += std::abs(panel.value);
      return total;
    }
    lower = upper;
  }
}

}  // namespace qbounce
