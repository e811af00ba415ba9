#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qbounce/config.hpp"
#include "qbounce/errors.hpp"
#include "qbounce/io.hpp"

using namespace qbounce;
using nlohmann::json;

namespace {

std::string field_of(const json& j) {
  try {
    config_from_json(j).validate();
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("qbounce_config_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("defaults validate and round-trip") {
  const RunConfig def;
  CHECK_NOTHROW(def.validate());
  const json j = config_to_json(def);
  CHECK(config_from_json(j) == def);
  CHECK(config_to_json(config_from_json(j)) == j);
}

TEST_CASE("non-default config round-trips") {
  RunConfig c;
  c.bouncer_units = false;
  c.mass = 1.674927e-27;
  c.gravity = 9.80665;
  c.hbar = 1.054571817e-34;
  c.c = 299792458.0;
  c.basis_size = 12;
  c.internal.kind = "list";
  c.internal.energies = {0.0, 1e-25, 3e-25};
  c.internal.degeneracies = {1, 2, 1};
  c.initial.kind = "coefficients";
  c.initial.real = {1.0, 0.5};
  c.initial.imag = {0.0, -0.5};
  c.backend = "cumulant";
  c.damping = DampingConvention::printed;
  c.tracked_pairs = {{1, 2}, {2, 5}};
  c.revival_window = 0.01;
  c.output_dir = "elsewhere";
  CHECK_NOTHROW(c.validate());
  CHECK(config_from_json(config_to_json(c)) == c);
  CHECK(c.backends() == std::vector<Backend>{Backend::cumulant});
}

TEST_CASE("missing keys fall back to defaults") {
  const RunConfig c = config_from_json(json{{"schema_version", kConfigSchemaVersion}, {"basis", {{"N", 9}}}});
  CHECK(c.basis_size == 9);
  CHECK(c.c == RunConfig{}.c);
  CHECK(RunConfig{}.backends().size() == 4u);
}

TEST_CASE("validation names the offending field") {
  const json base = config_to_json(RunConfig{});
  const auto with = [&](const json::json_pointer& p, const json& v) {
    json j = base;
    j[p] = v;
    return field_of(j);
  };
  CHECK(with("/basis/N"_json_pointer, 0) == "basis.N");
  CHECK(with("/basis/N"_json_pointer, "thirty") == "basis.N");
  CHECK(with("/basis/zero_tol"_json_pointer, 1e-3) == "basis.zero_tol");
  CHECK(with("/quadrature/tol"_json_pointer, 0.0) == "quadrature.tol");
  CHECK(with("/particle/c"_json_pointer, -1.0) == "particle.c");
  CHECK(with("/internal/kind"_json_pointer, "triangle") == "internal.kind");
  CHECK(with("/thermal/temperature"_json_pointer, -5.0) == "thermal.temperature");
  CHECK(with("/sweep/temperatures"_json_pointer, json::array({1.0, -1.0})) == "sweep.temperatures");
  CHECK(with("/initial_state/sigma"_json_pointer, 0.0) == "initial_state.sigma");
  CHECK(with("/time/steps"_json_pointer, 0) == "time.steps");
  CHECK(with("/time/t_max"_json_pointer, 0.0) == "time.t_max");
  CHECK(with("/backend"_json_pointer, "magic") == "backend");
  CHECK(with("/cumulant/damping"_json_pointer, "other") == "cumulant.damping");
  CHECK(with("/tracked_pairs"_json_pointer, json::array({json::array({0, 1})})) == "tracked_pairs");
  CHECK(with("/revival/window"_json_pointer, -1.0) == "revival.window");
  CHECK(with("/schema_version"_json_pointer, 99) == "schema_version");
  CHECK(field_of(json::array()) == "<root>");
  CHECK(field_of(base) == "");
}

TEST_CASE("shifted mass must stay positive") {
  RunConfig c;
  c.internal.kind = "list";
  c.internal.energies = {0.0, -2.0 * c.c * c.c};
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("config hash is stable and ignores the output location") {
  RunConfig a;
  RunConfig b = a;
  b.output_dir = "somewhere/else";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16u);
  b.temperature = 101.0;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a) == config_hash(config_from_json(config_to_json(a))));
}

TEST_CASE("load_config reads files and reports bad JSON") {
  const auto dir = scratch("load");
  write_atomic(dir / "good.json", config_to_json(RunConfig{}).dump(2));
  CHECK(load_config(dir / "good.json") == RunConfig{});
  write_atomic(dir / "bad.json", "{ not json");
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ValidationError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ValidationError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1e-300, 2.338107410459767, 6.02214076e23}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("CSV header block and rows") {
  CsvTable t({"a[1]", "b[s]"});
  t.add_meta("generator", "test");
  t.add_row({1.0, 0.5});
  t.add_row({2.0, -0.25});
  CHECK(t.rows() == 2u);
  CHECK(t.str() == "# schema_version: 1\n# generator: test\na[1],b[s]\n1,0.5\n2,-0.25\n");
  CHECK_THROWS_AS(t.add_row({1.0}), ContractError);
}

TEST_CASE("atomic write replaces the target and leaves no temporary") {
  const auto dir = scratch("atomic");
  const auto target = dir / "nested" / "out.csv";
  write_atomic(target, "first\n");
  write_atomic(target, "second\n");
  CHECK(read_file(target) == "second\n");
  CHECK_FALSE(std::filesystem::exists(dir / "nested" / "out.csv.tmp"));
}
