#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>

#include "test_support.hpp"

namespace {

using nlohmann::ordered_json;
using testsupport::read_text;
using testsupport::schema_errors;
using testsupport::ScratchDir;
using testsupport::write_text;
namespace fs = std::filesystem;

const std::string kCli = CONTACTLAB_CLI_PATH;
const fs::path kSource = CONTACTLAB_SOURCE_DIR;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const ScratchDir& scratch) {
  const fs::path out_file = scratch.file("stdout.txt");
  const fs::path err_file = scratch.file("stderr.txt");
  const std::string cmd = "\"" + kCli + "\" " + args + " >\"" +
                          out_file.string() + "\" 2>\"" + err_file.string() +
                          "\"";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = read_text(out_file);
  r.err = read_text(err_file);
  return r;
}

const ordered_json& report_schema() {
  static const ordered_json schema =
      ordered_json::parse(read_text(kSource / "schemas" / "report.schema.json"));
  return schema;
}

ordered_json load_report(const fs::path& dir) {
  return ordered_json::parse(read_text(dir / "report.json"));
}

// Envelope plus the per-operation result definition.
void check_schema(const ordered_json& report, const std::string& op) {
  const auto& schema = report_schema();
  auto errs = schema_errors(report, schema);
  CHECK_MESSAGE(errs.empty(), testsupport::join_errors(errs));
  CHECK(report.at("operation").get<std::string>() == op);

  static const std::map<std::string, std::string> defs = {
      {"flow", "flow_result"},
      {"spectrum", "spectrum_result"},
      {"norms", "norms_result"},
      {"hessian-check", "hessian_check_result"},
      {"periodic-scan", "periodic_scan_result"},
      {"parseval", "parseval_result"},
      {"capacity-audit", "capacity_audit_result"},
      {"geodesic-audit", "geodesic_audit_result"},
      {"sweep", "sweep_result"}};
  errs = schema_errors(report.at("result"),
                       schema.at("definitions").at(defs.at(op)), schema);
  CHECK_MESSAGE(errs.empty(), (op + ": " + testsupport::join_errors(errs)));
}

std::string config_arg(const std::string& name) {
  return "\"" + (kSource / "configs" / name).string() + "\"";
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("flow run: report, schema, trajectory file") {
  ScratchDir scratch("cli-flow");
  const auto r = run_cli("flow " + config_arg("flow_harmonic.json") +
                             " --out \"" + scratch.path().string() + "\"",
                         scratch);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("report.json") != std::string::npos);
  CHECK(r.out.find("trajectory.csv") != std::string::npos);

  const auto rep = load_report(scratch.path());
  check_schema(rep, "flow");
  const auto& res = rep.at("result");
  CHECK(res.at("endpoint").at("base")[0].get<double>() ==
        doctest::Approx(std::cos(2.0)).epsilon(1e-8));
  CHECK(res.at("z_lift").get<double>() ==
        doctest::Approx(std::sin(4.0) / 4.0).epsilon(1e-8));
  CHECK(res.at("conformal_max").get<double>() == 0.0);
  CHECK(res.at("richardson_error").get<double>() <= 1e-8);

  const std::string csv = read_text(scratch.file("trajectory.csv"));
  CHECK(first_line(csv) == "t,x1,y1,z_lift,g,H_drift");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1002);  // header + 1001
}

TEST_CASE("spectrum run with translated points") {
  ScratchDir scratch("cli-spectrum");
  const auto r = run_cli("spectrum " + config_arg("spectrum_bump.json") +
                             " --out \"" + scratch.path().string() + "\"",
                         scratch);
  REQUIRE(r.exit_code == 0);
  const auto rep = load_report(scratch.path());
  check_schema(rep, "spectrum");
  const auto& res = rep.at("result");
  REQUIRE(res.at("values").size() == 2);
  CHECK(res.at("values")[1].get<double>() == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(res.at("selector").get<double>() == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(res.at("admissible").get<bool>());
  CHECK(res.contains("translated_points"));
  CHECK(res.at("translated_points").at("exterior_frozen").get<bool>());
  // 2.5 is not an integer: no discriminant witnesses at time 1.
  CHECK(res.at("discriminant_points").at("points").empty());
}

TEST_CASE("norms run is byte-reproducible") {
  ScratchDir a("cli-norms-a");
  ScratchDir b("cli-norms-b");
  const auto ra = run_cli("norms " + config_arg("norms_bump.json") +
                              " --out \"" + a.path().string() + "\"",
                          a);
  const auto rb = run_cli("norms " + config_arg("norms_bump.json") +
                              " --out \"" + b.path().string() + "\"",
                          b);
  REQUIRE(ra.exit_code == 0);
  REQUIRE(rb.exit_code == 0);
  const std::string bytes_a = read_text(a.file("report.json"));
  const std::string bytes_b = read_text(b.file("report.json"));
  CHECK(bytes_a == bytes_b);
  CHECK(!bytes_a.empty());

  const auto rep = load_report(a.path());
  check_schema(rep, "norms");
  const auto& res = rep.at("result");
  CHECK(res.at("shelukhin_norm").at("certified").get<bool>());
  CHECK(res.at("shelukhin_norm").at("value").get<double>() ==
        doctest::Approx(2.5).epsilon(1e-9));
  CHECK(res.at("discriminant_norm").at("value").get<double>() == 3.0);
  CHECK(res.at("hypotheses").at("sign_definite").get<std::string>() ==
        "nonneg");
}

TEST_CASE("hessian check reports the failed gate") {
  ScratchDir scratch("cli-hessian");
  const auto r = run_cli("hessian-check " + config_arg("hessian_core.json") +
                             " --out \"" + scratch.path().string() + "\"",
                         scratch);
  REQUIRE(r.exit_code == 0);  // diagnosis, not failure
  const auto rep = load_report(scratch.path());
  check_schema(rep, "hessian-check");
  CHECK_FALSE(rep.at("result").at("admissible").get<bool>());
  CHECK(rep.at("result").at("bound").get<double>() ==
        doctest::Approx(46.3124).epsilon(2e-3));
  CHECK(rep.at("result").at("margin").get<double>() < 0.0);
}

TEST_CASE("periodic scan writes the orbit table") {
  ScratchDir scratch("cli-scan");
  const auto r = run_cli("periodic-scan " + config_arg("scan_core7.json") +
                             " --out \"" + scratch.path().string() + "\"",
                         scratch);
  REQUIRE(r.exit_code == 0);
  const auto rep = load_report(scratch.path());
  check_schema(rep, "periodic-scan");
  const auto& res = rep.at("result");
  CHECK(res.at("bound").get<double>() >= 6.28);
  CHECK(res.at("consistent").get<bool>());
  CHECK(res.at("orbits_found").get<int>() >= 1);
  CHECK(res.at("search").at("grid_resolution").get<int>() == 32);

  const std::string csv = read_text(scratch.file("orbits.csv"));
  CHECK(first_line(csv) ==
        "period,closure_residual,max_displacement,nonconstant,seed_1,seed_2");
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 2);
}

TEST_CASE("parseval run checks every loop") {
  ScratchDir scratch("cli-parseval");
  const auto r = run_cli("parseval " + config_arg("parseval_loops.json") +
                             " --out \"" + scratch.path().string() + "\"",
                         scratch);
  REQUIRE(r.exit_code == 0);
  const auto rep = load_report(scratch.path());
  check_schema(rep, "parseval");
  const auto& res = rep.at("result");
  CHECK(res.at("all_ok").get<bool>());
  REQUIRE(res.at("loops").size() == 7);  // circle + two_mode + 5 random
  CHECK(std::abs(res.at("loops")[0].at("margin").get<double>()) <= 1e-9);
}

TEST_CASE("capacity audit run") {
  ScratchDir scratch("cli-capacity");
  const auto r = run_cli("capacity-audit " + config_arg("capacity_shear.json") +
                             " --out \"" + scratch.path().string() + "\"",
                         scratch);
  REQUIRE(r.exit_code == 0);
  const auto rep = load_report(scratch.path());
  check_schema(rep, "capacity-audit");
  const auto& res = rep.at("result");
  CHECK(res.at("all_ok").get<bool>());
  CHECK(res.at("sandon_lhs").get<double>() == 1.0);
  CHECK(res.at("displacement").at("min_separation").get<double>() ==
        doctest::Approx(0.25).epsilon(1e-6));
  CHECK(res.at("slacks").size() == 3);
}

TEST_CASE("geodesic audit run covers the schedule family") {
  ScratchDir scratch("cli-geodesic");
  const auto r = run_cli("geodesic-audit " + config_arg("geodesic_bump.json") +
                             " --out \"" + scratch.path().string() + "\"",
                         scratch);
  REQUIRE(r.exit_code == 0);
  const auto rep = load_report(scratch.path());
  check_schema(rep, "geodesic-audit");
  const auto& res = rep.at("result");
  CHECK(res.at("c_value").get<double>() == doctest::Approx(2.5).epsilon(1e-9));
  REQUIRE(res.at("schedules").size() == 20);
  for (const auto& row : res.at("schedules")) {
    CHECK(row.at("slack").get<double>() >= -1e-6);
    if (row.at("monotone").get<bool>())
      CHECK(row.at("equality").get<bool>());
    else
      CHECK_FALSE(row.at("equality").get<bool>());
  }
  CHECK(res.at("floor_audit").at("equality").get<bool>());
}

TEST_CASE("sweep run emits one row per peak value") {
  ScratchDir scratch("cli-sweep");
  const auto r = run_cli("sweep " + config_arg("sweep_family.json") +
                             " --out \"" + scratch.path().string() + "\"",
                         scratch);
  REQUIRE(r.exit_code == 0);
  const auto rep = load_report(scratch.path());
  check_schema(rep, "sweep");
  const auto& rows = rep.at("result").at("rows");
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) CHECK(row.at("status") == "ok");
  CHECK(rows[0].at("fpr_norm").at("value").get<double>() == 1.0);
  CHECK(rows[0].at("discriminant_norm").at("value").get<double>() == 1.0);
  // A = 1 sits on the integer boundary: ceil(1) = 1 < floor(1) + 1 = 2.
  CHECK(rows[1].at("fpr_norm").at("value").get<double>() == 1.0);
  CHECK(rows[1].at("discriminant_norm").at("value").get<double>() == 2.0);

  const std::string csv = read_text(scratch.file("sweep.csv"));
  CHECK(first_line(csv) ==
        "A,B0,hessian_bound,shelukhin_norm,fpr_norm,discriminant_norm,"
        "oscillation_norm,selector,admissible,regular_zero,status");
}

TEST_CASE("command-line overrides reach the operation") {
  ScratchDir scratch("cli-override");
  const auto r = run_cli("spectrum " + config_arg("norms_bump.json"),
                         scratch);  // wrong subcommand for the config
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("does not match") != std::string::npos);

  const auto r2 = run_cli("spectrum " + config_arg("spectrum_bump.json") +
                              " --grid 24 --out \"" +
                              scratch.path().string() + "\"",
                          scratch);
  REQUIRE(r2.exit_code == 0);
  const auto rep = load_report(scratch.path());
  CHECK(rep.at("result").at("critical_points").at("grid_resolution").get<int>() ==
        24);
}

TEST_CASE("exit code 1: unusable invocations and configs") {
  ScratchDir scratch("cli-errors");

  auto r = run_cli("", scratch);
  CHECK(r.exit_code == 1);  // a subcommand is required

  r = run_cli("transmogrify x.json", scratch);
  CHECK(r.exit_code == 1);

  r = run_cli("norms \"" + scratch.file("missing.json").string() + "\"",
              scratch);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("cannot open config file") != std::string::npos);

  write_text(scratch.file("broken.json"), "{ \"operation\": \n");
  r = run_cli("norms \"" + scratch.file("broken.json").string() + "\"",
              scratch);
  CHECK(r.exit_code == 1);
  // Parse failures come with a file:line:column prefix.
  CHECK(r.err.find("broken.json:2:") != std::string::npos);

  write_text(scratch.file("unknown_key.json"), R"({
    "hamiltonian": {"kind": "radial_bump", "n": 1, "B": 5.7739, "A": 2.5},
    "operation": "norms",
    "params": {"grid": 16, "bogus": 1}
  })");
  r = run_cli("norms \"" + scratch.file("unknown_key.json").string() + "\"",
              scratch);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("unknown key") != std::string::npos);
}

TEST_CASE("exit code 2: a failed mathematical hypothesis") {
  ScratchDir scratch("cli-hypothesis");
  write_text(scratch.file("steep_spectrum.json"), R"({
    "hamiltonian": {"kind": "quadratic_core", "n": 1, "a": 7.0,
                    "cutoff_radius": 2.0, "transition_width": 4.0},
    "operation": "spectrum",
    "params": {}
  })");
  const auto r = run_cli(
      "spectrum \"" + scratch.file("steep_spectrum.json").string() + "\"",
      scratch);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("hypothesis not satisfied") != std::string::npos);
}

TEST_CASE("exit code 3: a failed numerical diagnostic") {
  ScratchDir scratch("cli-accuracy");
  write_text(scratch.file("coarse_flow.json"), R"({
    "hamiltonian": {"kind": "quadratic_core", "n": 1, "a": 2.0,
                    "cutoff_radius": 3.0, "transition_width": 1.0},
    "operation": "flow",
    "params": {"start": [1.0, 0.0], "time": 1.0, "step": 0.3}
  })");
  const auto r = run_cli(
      "flow \"" + scratch.file("coarse_flow.json").string() + "\" --out \"" +
          scratch.path().string() + "\"",
      scratch);
  CHECK(r.exit_code == 3);
}
