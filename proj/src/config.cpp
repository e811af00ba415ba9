#include "qbounce/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "qbounce/errors.hpp"

namespace qbounce {
namespace {

using nlohmann::json;

// Reads an optional key; type errors are reported against the dotted path.
template <typename T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(path, std::string("wrong type: ") + e.what());
  }
}

const json& section(const json& root, const char* key) {
  static const json empty = json::object();
  if (!root.contains(key)) return empty;
  const json& s = root.at(key);
  if (!s.is_object()) throw ValidationError(key, "must be an object");
  return s;
}

void require_positive(double v, const char* field) {
  if (!std::isfinite(v) || v <= 0.0) throw ValidationError(field, "must be finite and > 0");
}

}  // namespace

InternalSpectrum InternalSpec::build() const {
  if (kind == "two_level") return two_level_spectrum(spacing);
  if (kind == "ladder") return ladder_spectrum(spacing, count);
  if (kind == "list") return listed_spectrum(energies, degeneracies);
  throw ValidationError("internal.kind", "must be two_level, ladder or list");
}

BouncerParams RunConfig::params() const {
  if (bouncer_units) return bouncer_unit_params(c);
  return {mass, gravity, hbar, c};
}

std::vector<Backend> RunConfig::backends() const {
  if (backend == "all") {
    return {Backend::exact_phase, Backend::exact_reproject, Backend::first_order, Backend::cumulant};
  }
  return {*parse_backend(backend)};
}

void RunConfig::validate() const {
  if (!bouncer_units) {
    require_positive(mass, "particle.mass");
    require_positive(gravity, "particle.gravity");
    require_positive(hbar, "particle.hbar");
  }
  require_positive(c, "particle.c");
  if (basis_size < 1 || basis_size > 200) throw ValidationError("basis.N", "must lie in 1..200");
  if (!(zero_tol >= 1e-14 && zero_tol <= 1e-6)) throw ValidationError("basis.zero_tol", "must lie in [1e-14, 1e-6]");
  if (!(quadrature_tol >= 1e-13) || !std::isfinite(quadrature_tol)) {
    throw ValidationError("quadrature.tol", "must be finite and >= 1e-13");
  }

  if (internal.kind == "two_level") {
    require_positive(internal.spacing, "internal.spacing");
  } else if (internal.kind == "ladder") {
    require_positive(internal.spacing, "internal.spacing");
    if (internal.count < 1 || internal.count > 100000) throw ValidationError("internal.count", "must lie in 1..100000");
  } else if (internal.kind == "list") {
    try {
      listed_spectrum(internal.energies, internal.degeneracies);
    } catch (const DomainError& e) {
      throw ValidationError("internal.energies", e.what());
    }
  } else {
    throw ValidationError("internal.kind", "must be two_level, ladder or list");
  }
  // Every internal level must leave a positive shifted mass.
  {
    const double rest = params().rest_energy();
    const InternalSpectrum spec = internal.build();
    if (!(spec.levels.back() / rest > -1.0)) throw ValidationError("internal", "shifted mass must stay positive");
  }

  if (!std::isfinite(temperature) || temperature < 0.0) throw ValidationError("thermal.temperature", "must be >= 0");
  for (double t : sweep_temperatures) {
    if (!std::isfinite(t) || t < 0.0) throw ValidationError("sweep.temperatures", "entries must be >= 0");
  }

  if (initial.kind == "gaussian") {
    require_positive(initial.center, "initial_state.center");
    require_positive(initial.sigma, "initial_state.sigma");
  } else if (initial.kind == "coefficients") {
    if (initial.real.empty()) throw ValidationError("initial_state.real", "must not be empty");
    if (static_cast<int>(initial.real.size()) > basis_size) {
      throw ValidationError("initial_state.real", "more coefficients than basis.N");
    }
    if (!initial.imag.empty() && initial.imag.size() != initial.real.size()) {
      throw ValidationError("initial_state.imag", "must match initial_state.real in length");
    }
    double norm = 0.0;
    for (double v : initial.real) norm += v * v;
    for (double v : initial.imag) norm += v * v;
    if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("initial_state.real", "zero or non-finite state");
  } else {
    throw ValidationError("initial_state.kind", "must be gaussian or coefficients");
  }

  if (!std::isfinite(t_max) || t_max <= 0.0) throw ValidationError("time.t_max", "must be finite and > 0");
  if (steps < 1 || steps > 10000000) throw ValidationError("time.steps", "must lie in 1..1e7");
  if (backend != "all" && !parse_backend(backend)) {
    throw ValidationError("backend", "must be exact_phase, exact_reproject, first_order, cumulant or all");
  }
  for (const auto& [m, n] : tracked_pairs) {
    if (m < 1 || n < 1 || m > basis_size || n > basis_size) {
      throw ValidationError("tracked_pairs", "pair indices must lie in 1..basis.N");
    }
  }
  if (!std::isfinite(revival_window) || revival_window < 0.0) {
    throw ValidationError("revival.window", "must be >= 0");
  }
  if (output_dir.empty()) throw ValidationError("output.directory", "must not be empty");
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("<root>", "config must be a JSON object");
  RunConfig c;
  int version = kConfigSchemaVersion;
  read(j, "schema_version", "schema_version", version);
  if (version != kConfigSchemaVersion) throw ValidationError("schema_version", "unsupported version");

  const json& particle = section(j, "particle");
  read(particle, "bouncer_units", "particle.bouncer_units", c.bouncer_units);
  read(particle, "mass", "particle.mass", c.mass);
  read(particle, "gravity", "particle.gravity", c.gravity);
  read(particle, "hbar", "particle.hbar", c.hbar);
  read(particle, "c", "particle.c", c.c);

  const json& basis = section(j, "basis");
  read(basis, "N", "basis.N", c.basis_size);
  read(basis, "zero_tol", "basis.zero_tol", c.zero_tol);
  read(section(j, "quadrature"), "tol", "quadrature.tol", c.quadrature_tol);

  const json& internal = section(j, "internal");
  read(internal, "kind", "internal.kind", c.internal.kind);
  read(internal, "spacing", "internal.spacing", c.internal.spacing);
  read(internal, "count", "internal.count", c.internal.count);
  read(internal, "energies", "internal.energies", c.internal.energies);
  read(internal, "degeneracies", "internal.degeneracies", c.internal.degeneracies);

  read(section(j, "thermal"), "temperature", "thermal.temperature", c.temperature);
  read(section(j, "sweep"), "temperatures", "sweep.temperatures", c.sweep_temperatures);

  const json& init = section(j, "initial_state");
  read(init, "kind", "initial_state.kind", c.initial.kind);
  read(init, "center", "initial_state.center", c.initial.center);
  read(init, "sigma", "initial_state.sigma", c.initial.sigma);
  read(init, "real", "initial_state.real", c.initial.real);
  read(init, "imag", "initial_state.imag", c.initial.imag);

  const json& time = section(j, "time");
  read(time, "t_max", "time.t_max", c.t_max);
  read(time, "steps", "time.steps", c.steps);

  read(j, "backend", "backend", c.backend);
  std::string damping{damping_name(c.damping)};
  read(section(j, "cumulant"), "damping", "cumulant.damping", damping);
  const auto parsed = parse_damping(damping);
  if (!parsed) throw ValidationError("cumulant.damping", "must be second_cumulant or printed");
  c.damping = *parsed;
  read(j, "tracked_pairs", "tracked_pairs", c.tracked_pairs);
  read(section(j, "revival"), "window", "revival.window", c.revival_window);
  read(section(j, "output"), "directory", "output.directory", c.output_dir);

  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["particle"] = {{"bouncer_units", c.bouncer_units}, {"mass", c.mass}, {"gravity", c.gravity},
                   {"hbar", c.hbar}, {"c", c.c}};
  j["basis"] = {{"N", c.basis_size}, {"zero_tol", c.zero_tol}};
  j["quadrature"] = {{"tol", c.quadrature_tol}};
  j["internal"] = {{"kind", c.internal.kind},
                   {"spacing", c.internal.spacing},
                   {"count", c.internal.count},
                   {"energies", c.internal.energies},
                   {"degeneracies", c.internal.degeneracies}};
  j["thermal"] = {{"temperature", c.temperature}};
  j["sweep"] = {{"temperatures", c.sweep_temperatures}};
  j["initial_state"] = {{"kind", c.initial.kind},
                        {"center", c.initial.center},
                        {"sigma", c.initial.sigma},
                        {"real", c.initial.real},
                        {"imag", c.initial.imag}};
  j["time"] = {{"t_max", c.t_max}, {"steps", c.steps}};
  j["backend"] = c.backend;
  j["cumulant"] = {{"damping", std::string(damping_name(c.damping))}};
  j["tracked_pairs"] = c.tracked_pairs;
  j["revival"] = {{"window", c.revival_window}};
  j["output"] = {{"directory", c.output_dir}};
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("--config", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("--config", std::string("JSON parse error: ") + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const RunConfig& config) {
  // The output location does not change any computed number.
  nlohmann::json j = config_to_json(config);
  j.erase("output");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qbounce
