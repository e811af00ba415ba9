#include "qbounce/basis.hpp"

#include <cmath>
#include <string>

#include "qbounce/errors.hpp"

namespace qbounce {

void BouncerParams::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw DomainError(std::string("BouncerParams: ") + name + " must be finite and positive");
    }
  };
  check(mass, "mass");
  check(gravity, "gravity");
  check(hbar, "hbar");
  check(c, "c");
}

BouncerParams bouncer_unit_params(double c) { return {1.0, 1.0, 1.0, c}; }

DerivedScales derive_scales(const BouncerParams& params) {
  params.validate();
  DerivedScales s;
  const double ratio = params.mass / params.hbar;
  s.k = std::cbrt(2.0 * params.gravity * ratio * ratio);
  s.length_unit = 1.0 / s.k;
  s.energy_unit = params.mass * params.gravity / s.k;
  s.time_unit = params.hbar / s.energy_unit;
  return s;
}

EigenBasis::EigenBasis(BouncerParams params, AiryZeroTable zeros)
    : params_(params), scales_(derive_scales(params)), zeros_(std::move(zeros)) {
  reduced_norms_.reserve(zeros_.zeros.size());
  for (double a : zeros_.zeros) {
    reduced_norms_.push_back(1.0 / std::abs(airy_ai_prime(-a)));
  }
}

void EigenBasis::check_level(int n) const {
  if (n < 1 || n > size()) {
    throw ContractError("EigenBasis: level " + std::to_string(n) + " outside 1.." + std::to_string(size()));
  }
}

double EigenBasis::alpha(int n) const {
  check_level(n);
  return zeros_.zeros[n - 1];
}

double EigenBasis::energy(int n) const { return scales_.energy_unit * alpha(n); }

double EigenBasis::norm(int n) const { return std::sqrt(scales_.k) * reduced_norm(n); }

double EigenBasis::reduced_norm(int n) const {
  check_level(n);
  return reduced_norms_[n - 1];
}

double EigenBasis::reduced_eigenfunction(int n, double zeta) const {
  check_level(n);
  const double x = zeta - zeros_.zeros[n - 1];
  // Far above the turning point Ai has long underflowed.
  if (x > kAirySupport) return 0.0;
  return reduced_norms_[n - 1] * airy_ai(x);
}

EigenBasis build_basis(const BouncerParams& params, int size, double zero_tol) {
  params.validate();
  if (size < 1 || size > 200) throw ContractError("build_basis: N must lie in 1..200");
  return EigenBasis(params, airy_zeros(size, zero_tol));
}

double eval_eigenfunction(const EigenBasis& basis, int n, double z) {
  if (!std::isfinite(z) || z < 0.0) throw DomainError("eval_eigenfunction: z must be >= 0 (mirror at z = 0)");
  const double k = basis.scales().k;
  return std::sqrt(k) * basis.reduced_eigenfunction(n, k * z);
}

BouncerParams mass_shifted_params(const BouncerParams& params, double internal_energy) {
  BouncerParams shifted = params;
  shifted.mass = params.mass + internal_energy / (params.c * params.c);
  if (!(shifted.mass > 0.0) || !std::isfinite(shifted.mass)) {
    throw DomainError("mass_shifted_params: shifted mass m + E_i/c^2 must be positive");
  }
  return shifted;
}

}  // namespace qbounce
