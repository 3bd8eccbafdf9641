#pragma once

// JSON configuration loading (strict: unknown keys rejected), report
// serialization (ordered keys, no timestamps, fully deterministic for
// byte-identical reruns), CSV emitters, and the scenario dispatcher behind
// the command-line tool.

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "contactlab/capacity.hpp"
#include "contactlab/flow.hpp"
#include "contactlab/hamiltonian.hpp"
#include "contactlab/hessian.hpp"
#include "contactlab/norms.hpp"
#include "contactlab/orbits.hpp"
#include "contactlab/translated.hpp"
#include "contactlab/types.hpp"

namespace contactlab {

using json = nlohmann::ordered_json;

// --- Hamiltonian specs -----------------------------------------------------
// kinds: zero {n} | radial_bump {n, B, A, center?, scale?}
//      | quadratic_core {n, a, cutoff_radius, transition_width, center?}
//      | ring_bump {n, r_inner, r_outer, A}
//      | shear {n, c, core_lo, core_hi, width}
//      | sum {terms: [spec...]}
AutonomousHamiltonian hamiltonian_from_json(const nlohmann::json& spec);

// --- report serialization --------------------------------------------------

json vec_to_json(const Vec& v);
json to_json(const HessianBoundReport& r);
json to_json(const AdmissibilityReport& r);
json to_json(const CriticalPointReport& r);
json to_json(const SpectrumReport& r);
json to_json(const TranslatedPointReport& r);
json to_json(const DiscriminantPointReport& r);
json to_json(const CertifiedValue& v);
json to_json(const NormReport& r);
json to_json(const SelectorBoundReport& r);
json to_json(const FloorBoundReport& r);
json to_json(const OrbitSearchReport& r);
json to_json(const PeriodCertificate& r);
json to_json(const ParsevalReport& r);
json to_json(const DisplacementReport& r);
json to_json(const CapacityAuditReport& r);

// --- CSV emitters ----------------------------------------------------------

std::string trajectory_csv(const Trajectory& t);
std::string orbits_csv(const OrbitSearchReport& r);

// --- scenarios -------------------------------------------------------------

struct ScenarioConfig {
  nlohmann::json hamiltonian;  // raw spec, echoed into the report
  std::string operation;
  nlohmann::json params;
  std::string output_directory;  // empty = current directory
  std::string report_name = "report.json";
  std::string csv_name;  // empty = operation default
};

// Throws std::invalid_argument on unknown keys / malformed values.
ScenarioConfig scenario_from_json(const nlohmann::json& config,
                                  const std::string& forced_operation = "");

struct ScenarioResult {
  json report;  // schema-versioned envelope
  std::map<std::string, std::string> csv_files;  // name -> content
};

// Dispatches on config.operation.  Throws HypothesisError / IntegrityError /
// AccuracyError / std::invalid_argument per the operation contracts.
ScenarioResult run_scenario(const ScenarioConfig& config);

// One CSV row per A: B0(A), Hessian bound, certified norm values and flags.
// Per-row failures are recorded in the row and the sweep continues.
ScenarioResult corollary_one_sweep(const std::vector<double>& A_values,
                                   int n = 1, int grid_resolution = 0);

}  // namespace contactlab
