#include "contactlab/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "contactlab/critical.hpp"
#include "contactlab/numerics.hpp"

namespace contactlab {
namespace {

using njson = nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

void check_keys(const njson& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end())
      config_error("unknown key \"" + item.key() + "\" in " + where);
  }
}

double get_num(const njson& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number())
    config_error("\"" + key + "\" must be a number");
  return obj.at(key).get<double>();
}

int get_int(const njson& obj, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer())
    config_error("\"" + key + "\" must be an integer");
  return obj.at(key).get<int>();
}

bool get_bool(const njson& obj, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean())
    config_error("\"" + key + "\" must be a boolean");
  return obj.at(key).get<bool>();
}

std::string get_str(const njson& obj, const std::string& key,
                    const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string())
    config_error("\"" + key + "\" must be a string");
  return obj.at(key).get<std::string>();
}

Vec get_vec(const njson& obj, const std::string& key, int expected_size) {
  if (!obj.contains(key) || !obj.at(key).is_array())
    config_error("\"" + key + "\" must be an array of numbers");
  const njson& arr = obj.at(key);
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number())
      config_error("\"" + key + "\" must contain only numbers");
    v[i] = arr[i].get<double>();
  }
  if (expected_size >= 0 && v.size() != expected_size) {
    std::ostringstream msg;
    msg << "\"" << key << "\" must have " << expected_size << " entries";
    config_error(msg.str());
  }
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

AutonomousHamiltonian hamiltonian_from_json(const njson& spec) {
  if (!spec.is_object()) config_error("hamiltonian spec must be an object");
  const std::string kind = get_str(spec, "kind", "");
  if (kind.empty()) config_error("hamiltonian spec needs a \"kind\"");

  if (kind == "zero") {
    check_keys(spec, {"kind", "n"}, "zero spec");
    return make_zero(get_int(spec, "n", 1));
  }
  if (kind == "radial_bump") {
    check_keys(spec, {"kind", "n", "B", "A", "center", "scale"},
               "radial_bump spec");
    const int n = get_int(spec, "n", 1);
    const double B = get_num(spec, "B", 0.0);
    const double A = get_num(spec, "A", 0.0);
    Vec center;
    if (spec.contains("center")) center = get_vec(spec, "center", 2 * n);
    return make_radial_bump(B, A, n, center, get_num(spec, "scale", 1.0));
  }
  if (kind == "quadratic_core") {
    check_keys(spec, {"kind", "n", "a", "cutoff_radius", "transition_width",
                      "center"},
               "quadratic_core spec");
    const int n = get_int(spec, "n", 1);
    Vec center;
    if (spec.contains("center")) center = get_vec(spec, "center", 2 * n);
    return make_quadratic_core(get_num(spec, "a", 0.0),
                               get_num(spec, "cutoff_radius", 0.0),
                               get_num(spec, "transition_width", 0.0), n,
                               center);
  }
  if (kind == "ring_bump") {
    check_keys(spec, {"kind", "n", "r_inner", "r_outer", "A"}, "ring_bump spec");
    return make_ring_bump(get_num(spec, "r_inner", 0.0),
                          get_num(spec, "r_outer", 0.0), get_num(spec, "A", 0.0),
                          get_int(spec, "n", 1));
  }
  if (kind == "shear") {
    check_keys(spec, {"kind", "n", "c", "core_lo", "core_hi", "width"},
               "shear spec");
    ShearParams params;
    params.n = get_int(spec, "n", 1);
    params.c = get_num(spec, "c", 1.0);
    params.core_lo = get_vec(spec, "core_lo", 2 * params.n);
    params.core_hi = get_vec(spec, "core_hi", 2 * params.n);
    if (spec.contains("width") && spec.at("width").is_number()) {
      params.width = Vec::Constant(2 * params.n, spec.at("width").get<double>());
    } else {
      params.width = get_vec(spec, "width", 2 * params.n);
    }
    return make_shear(params);
  }
  if (kind == "sum") {
    check_keys(spec, {"kind", "terms"}, "sum spec");
    if (!spec.contains("terms") || !spec.at("terms").is_array())
      config_error("sum spec needs a \"terms\" array");
    std::vector<AutonomousHamiltonian> terms;
    for (const njson& t : spec.at("terms"))
      terms.push_back(hamiltonian_from_json(t));
    return make_sum(terms);
  }
  config_error("unknown hamiltonian kind \"" + kind + "\"");
}

// --- report serialization --------------------------------------------------

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json to_json(const HessianBoundReport& r) {
  json j;
  j["bound"] = r.bound;
  j["argmax"] = vec_to_json(r.argmax);
  j["grid_resolution"] = r.grid_resolution;
  return j;
}

json to_json(const AdmissibilityReport& r) {
  json j;
  j["bound"] = r.bound;
  j["threshold"] = r.threshold;
  j["safety_margin"] = r.safety_margin;
  j["margin"] = r.threshold - r.bound;
  j["admissible"] = r.admissible;
  j["witness"] = vec_to_json(r.witness);
  return j;
}

json to_json(const CriticalPointReport& r) {
  json j;
  j["grid_resolution"] = r.grid_resolution;
  j["newton_tol"] = r.newton_tol;
  json pts = json::array();
  for (const CriticalPoint& cp : r.points) {
    json p;
    p["location"] = vec_to_json(cp.location);
    p["value"] = cp.value;
    p["gradient_residual"] = cp.gradient_residual;
    p["hessian_signature"] = {cp.hessian_signature[0], cp.hessian_signature[1],
                              cp.hessian_signature[2]};
    p["exterior"] = cp.exterior_rep;
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  j["unresolved_seeds"] = static_cast<int>(r.unresolved_seeds.size());
  return j;
}

json to_json(const SpectrumReport& r) {
  json j;
  j["time"] = r.time;
  j["values"] = r.values;
  j["selector"] = r.selector;
  j["selector_inverse"] = r.selector_inverse;
  j["hessian_bound"] = r.hessian_bound;
  j["admissible"] = r.admissible;
  return j;
}

json to_json(const TranslatedPointReport& r) {
  json j;
  j["time"] = r.time;
  j["scan_resolution"] = r.scan_resolution;
  j["exterior_frozen"] = r.exterior_frozen;
  json pts = json::array();
  for (const TranslatedPoint& tp : r.points) {
    json p;
    p["base"] = vec_to_json(tp.base);
    p["translation"] = tp.translation;
    p["fixed_point_residual"] = tp.fixed_point_residual;
    p["conformal_residual"] = tp.conformal_residual;
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  j["unresolved_candidates"] = static_cast<int>(r.unresolved_candidates.size());
  return j;
}

json to_json(const DiscriminantPointReport& r) {
  json j;
  j["time"] = r.time;
  j["integer_tol"] = r.integer_tol;
  json pts = json::array();
  for (const TranslatedPoint& tp : r.points) {
    json p;
    p["base"] = vec_to_json(tp.base);
    p["translation"] = tp.translation;
    p["fixed_point_residual"] = tp.fixed_point_residual;
    p["conformal_residual"] = tp.conformal_residual;
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  return j;
}

json to_json(const CertifiedValue& v) {
  json j;
  j["certified"] = v.certified;
  if (v.certified)
    j["value"] = v.value;
  else
    j["reason"] = v.reason;
  return j;
}

json to_json(const NormReport& r) {
  json j;
  j["shelukhin_length"] = r.shelukhin_length;
  j["shelukhin_norm"] = to_json(r.shelukhin_norm);
  json dl;
  if (std::isnan(r.discriminant_length.value)) {
    dl["available"] = false;
  } else {
    dl["available"] = true;
    if (r.discriminant_length.infinite)
      dl["infinite"] = true;
    else
      dl["value"] = r.discriminant_length.value;
    dl["degenerate"] = r.discriminant_length.degenerate;
  }
  j["discriminant_length"] = std::move(dl);
  j["discriminant_norm"] = to_json(r.discriminant_norm);
  j["oscillation_norm"] = to_json(r.oscillation_norm);
  j["fpr_norm"] = to_json(r.fpr_norm);
  json hyp;
  hyp["admissible"] = r.hypotheses.admissible;
  hyp["regular_zero"] = r.hypotheses.regular_zero;
  hyp["sign_definite"] = r.hypotheses.sign == SignClass::NonNegative ? "nonneg"
                         : r.hypotheses.sign == SignClass::NonPositive
                             ? "nonpos"
                             : "mixed";
  hyp["hessian_bound"] = r.hypotheses.hessian_bound;
  j["hypotheses"] = std::move(hyp);
  j["max_h"] = r.max_h;
  j["min_h"] = r.min_h;
  j["identity"] = r.identity;
  return j;
}

json to_json(const SelectorBoundReport& r) {
  json j;
  j["c_value"] = r.c_value;
  j["c_inverse_value"] = r.c_inverse_value;
  j["integral_max"] = r.integral_max;
  j["integral_neg_min"] = r.integral_neg_min;
  j["slack"] = r.slack;
  j["slack_inverse"] = r.slack_inverse;
  j["equality"] = r.equality;
  j["equality_inverse"] = r.equality_inverse;
  j["tolerance"] = r.tolerance;
  return j;
}

json to_json(const FloorBoundReport& r) {
  json j;
  j["c_value"] = r.c_value;
  j["c_inverse_value"] = r.c_inverse_value;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["equality"] = r.equality;
  j["degenerate"] = r.degenerate;
  return j;
}

json to_json(const OrbitSearchReport& r) {
  json j;
  j["t_max"] = r.t_max;
  j["grid_resolution"] = r.grid_resolution;
  j["period_samples"] = r.period_samples;
  json orbits = json::array();
  for (const OrbitCandidate& o : r.orbits) {
    json e;
    e["seed"] = vec_to_json(o.seed);
    e["period"] = o.period;
    e["closure_residual"] = o.closure_residual;
    e["max_displacement"] = o.max_displacement;
    e["nonconstant"] = o.nonconstant;
    orbits.push_back(std::move(e));
  }
  j["orbits"] = std::move(orbits);
  j["unresolved"] = static_cast<int>(r.unresolved.size());
  return j;
}

json to_json(const PeriodCertificate& r) {
  json j;
  j["bound"] = r.bound;
  j["orbits_found"] = r.orbits_found;
  j["consistent"] = r.consistent;
  j["search"] = to_json(r.search);
  return j;
}

json to_json(const ParsevalReport& r) {
  json j;
  j["velocity_norm"] = r.velocity_norm;
  j["acceleration_norm"] = r.acceleration_norm;
  j["bound"] = r.bound;
  j["margin"] = r.margin;
  j["ok"] = r.ok;
  return j;
}

json to_json(const DisplacementReport& r) {
  json j;
  j["displaced"] = r.displaced;
  j["min_separation"] = r.min_separation;
  j["certified"] = r.certified;
  j["margin_required"] = r.margin_required;
  j["base_samples"] = r.base_samples;
  j["fiber_samples"] = r.fiber_samples;
  j["time"] = r.time;
  return j;
}

json to_json(const CapacityAuditReport& r) {
  json j;
  j["capacity"] = r.capacity;
  j["ceil_capacity"] = r.ceil_capacity;
  j["displacement"] = to_json(r.displacement);
  j["norms"] = to_json(r.norms);
  j["hypothesis_gap"] = r.hypothesis_gap;
  json slacks = json::array();
  for (const NormSlack& s : r.slacks) {
    json e;
    e["name"] = s.name;
    e["norm_ceil"] = s.norm_ceil;
    e["required"] = s.required;
    e["slack"] = s.slack;
    slacks.push_back(std::move(e));
  }
  j["slacks"] = std::move(slacks);
  j["c_value"] = r.c_value;
  j["c_inverse_value"] = r.c_inverse_value;
  j["sandon_lhs"] = r.sandon_lhs;
  j["sandon_rhs"] = r.sandon_rhs;
  j["sandon_ok"] = r.sandon_ok;
  j["all_ok"] = r.all_ok;
  return j;
}

// --- CSV emitters ----------------------------------------------------------

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream out;
  const int d = t.base.empty() ? 0 : static_cast<int>(t.base.front().size());
  const int n = d / 2;
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  for (int i = 1; i <= n; ++i) out << ",y" << i;
  out << ",z_lift,g,H_drift\n";
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    out << format_double(t.times[k]);
    for (int i = 0; i < d; ++i) out << "," << format_double(t.base[k][i]);
    out << "," << format_double(t.z_lift[k]);
    out << "," << format_double(t.conformal[k]);
    const double drift =
        t.has_energy ? t.energy[k] - t.energy.front() : 0.0;
    out << "," << format_double(drift) << "\n";
  }
  return out.str();
}

std::string orbits_csv(const OrbitSearchReport& r) {
  std::ostringstream out;
  int d = 0;
  if (!r.orbits.empty()) d = static_cast<int>(r.orbits.front().seed.size());
  out << "period,closure_residual,max_displacement,nonconstant";
  for (int i = 1; i <= d; ++i) out << ",seed_" << i;
  out << "\n";
  for (const OrbitCandidate& o : r.orbits) {
    out << format_double(o.period) << "," << format_double(o.closure_residual)
        << "," << format_double(o.max_displacement) << ","
        << (o.nonconstant ? 1 : 0);
    for (int i = 0; i < d; ++i) out << "," << format_double(o.seed[i]);
    out << "\n";
  }
  return out.str();
}

// --- scenarios -------------------------------------------------------------

ScenarioConfig scenario_from_json(const njson& config,
                                  const std::string& forced_operation) {
  check_keys(config, {"hamiltonian", "operation", "params", "output"},
             "scenario");
  ScenarioConfig out;
  if (config.contains("hamiltonian")) out.hamiltonian = config.at("hamiltonian");
  out.operation = get_str(config, "operation", forced_operation);
  if (out.operation.empty())
    config_error("no operation given (config key or subcommand)");
  if (!forced_operation.empty() && out.operation != forced_operation)
    config_error("config operation \"" + out.operation +
                 "\" does not match the subcommand \"" + forced_operation +
                 "\"");
  if (config.contains("params")) {
    if (!config.at("params").is_object())
      config_error("\"params\" must be an object");
    out.params = config.at("params");
  } else {
    out.params = njson::object();
  }
  if (config.contains("output")) {
    const njson& o = config.at("output");
    check_keys(o, {"directory", "report", "csv"}, "output");
    out.output_directory = get_str(o, "directory", "");
    out.report_name = get_str(o, "report", "report.json");
    out.csv_name = get_str(o, "csv", "");
  }
  return out;
}

namespace {

json envelope(const ScenarioConfig& config, json result) {
  json env;
  env["schema_version"] = "1.0";
  env["operation"] = config.operation;
  env["hamiltonian"] = config.hamiltonian.is_null()
                           ? json(nullptr)
                           : json(config.hamiltonian);
  env["result"] = std::move(result);
  return env;
}

AutonomousHamiltonian require_hamiltonian(const ScenarioConfig& config) {
  if (config.hamiltonian.is_null())
    config_error("operation \"" + config.operation +
                 "\" needs a \"hamiltonian\" entry");
  return hamiltonian_from_json(config.hamiltonian);
}

Schedule find_schedule(const std::string& name) {
  for (Schedule& s : standard_schedule_family())
    if (s.name == name) return s;
  config_error("unknown schedule \"" + name + "\"");
}

ScenarioResult run_flow(const ScenarioConfig& config) {
  check_keys(config.params, {"start", "fiber", "time", "scheme", "step",
                             "schedule"},
             "flow params");
  const AutonomousHamiltonian H = require_hamiltonian(config);
  const Vec start = get_vec(config.params, "start", H.phase_dim());
  const double fiber = get_num(config.params, "fiber", 0.0);
  const double T = get_num(config.params, "time", 1.0);
  const double step = get_num(config.params, "step", 1e-3);
  const std::string scheme_name = get_str(config.params, "scheme", "rk4");
  IntegratorSpec spec;
  spec.step = step;
  if (scheme_name == "rk4")
    spec.scheme = Scheme::RK4;
  else if (scheme_name == "stormer-verlet")
    spec.scheme = Scheme::StormerVerlet;
  else
    config_error("unknown scheme \"" + scheme_name + "\"");

  const std::string schedule_name = get_str(config.params, "schedule", "");
  ContactPathSpec path =
      schedule_name.empty()
          ? ContactPathSpec::autonomous(H, T)
          : ContactPathSpec::scheduled(H, find_schedule(schedule_name), T);

  const Trajectory traj =
      integrate_contact(path, CylinderPoint(start, fiber), spec, true);

  json result;
  result["time"] = T;
  result["scheme"] = scheme_name;
  result["step"] = step;
  if (!schedule_name.empty()) result["schedule"] = schedule_name;
  json s;
  s["base"] = vec_to_json(start);
  s["fiber"] = fiber;
  result["start"] = std::move(s);
  json e;
  e["base"] = vec_to_json(traj.base.back());
  e["fiber"] = wrap_unit(traj.z_lift.back());
  result["endpoint"] = std::move(e);
  result["z_lift"] = traj.z_lift.back();
  result["translation"] = traj.z_lift.back() - traj.z_lift.front();
  result["conformal_max"] = traj.max_conformal();
  result["energy_drift"] = traj.energy_drift();
  if (path.plain_autonomous()) {
    const FlowResult base = integrate_symplectic(H, start, T, spec, true);
    result["richardson_error"] = base.richardson_error;
  }

  ScenarioResult out;
  out.report = envelope(config, std::move(result));
  const std::string csv =
      config.csv_name.empty() ? "trajectory.csv" : config.csv_name;
  out.csv_files[csv] = trajectory_csv(traj);
  return out;
}

ScenarioResult run_spectrum(const ScenarioConfig& config) {
  check_keys(config.params, {"time", "grid", "force", "translated_points",
                             "scan_resolution", "step", "integer_tol"},
             "spectrum params");
  const AutonomousHamiltonian H = require_hamiltonian(config);
  const double t = get_num(config.params, "time", 1.0);
  const int grid = get_int(config.params, "grid", 0);
  const bool force = get_bool(config.params, "force", false);

  const SpectrumReport spectrum = spectrum_autonomous(H, t, grid, force);
  json result = to_json(spectrum);
  result["critical_points"] = to_json(critical_points(H, grid));

  if (get_bool(config.params, "translated_points", false)) {
    const int scan = get_int(config.params, "scan_resolution", 0);
    const double step = get_num(config.params, "step", 1e-3);
    const double itol = get_num(config.params, "integer_tol", 1e-4);
    result["translated_points"] =
        to_json(brute_force_translated_points(H, t, scan, step));
    result["discriminant_points"] =
        to_json(discriminant_points(H, t, scan, step, itol));
  }

  ScenarioResult out;
  out.report = envelope(config, std::move(result));
  return out;
}

ScenarioResult run_norms(const ScenarioConfig& config) {
  check_keys(config.params, {"grid"}, "norms params");
  const AutonomousHamiltonian H = require_hamiltonian(config);
  const NormReport rep = norm_report(H, get_int(config.params, "grid", 0));
  ScenarioResult out;
  out.report = envelope(config, to_json(rep));
  return out;
}

ScenarioResult run_hessian_check(const ScenarioConfig& config) {
  check_keys(config.params, {"grid", "safety_margin"}, "hessian-check params");
  const AutonomousHamiltonian H = require_hamiltonian(config);
  const AdmissibilityReport rep =
      admissibility_check(H, get_int(config.params, "grid", 0),
                          get_num(config.params, "safety_margin", 1e-3));
  ScenarioResult out;
  out.report = envelope(config, to_json(rep));
  return out;
}

ScenarioResult run_periodic_scan(const ScenarioConfig& config) {
  check_keys(config.params, {"t_max", "grid", "period_samples", "step",
                             "certificate"},
             "periodic-scan params");
  const AutonomousHamiltonian H = require_hamiltonian(config);
  const double t_max = get_num(config.params, "t_max", 1.0);
  const int grid = get_int(config.params, "grid", 0);
  const int samples = get_int(config.params, "period_samples", 256);
  const double step = get_num(config.params, "step", 1e-3);

  json result;
  OrbitSearchReport search;
  if (get_bool(config.params, "certificate", true) && t_max == 1.0) {
    const PeriodCertificate cert =
        hessian_period_certificate(H, grid, samples);
    search = cert.search;
    result = to_json(cert);
  } else {
    search = find_periodic_orbits(H, t_max, grid, samples, step);
    result["search"] = to_json(search);
  }

  ScenarioResult out;
  out.report = envelope(config, std::move(result));
  const std::string csv =
      config.csv_name.empty() ? "orbits.csv" : config.csv_name;
  out.csv_files[csv] = orbits_csv(search);
  return out;
}

std::vector<Vec> build_loop(const njson& spec, SplitMix64& rng) {
  check_keys(spec,
             {"kind", "radius", "samples", "amp2", "count", "degree", "seed",
              "values"},
             "loop spec");
  const std::string kind = get_str(spec, "kind", "");
  const int N = get_int(spec, "samples", 256);
  std::vector<Vec> samples;

  if (kind == "circle") {
    const double r = get_num(spec, "radius", 1.0);
    samples.resize(N + 1);
    for (int k = 0; k < N; ++k) {
      const double th = kTwoPi * k / N;
      samples[k] = Vec(2);
      samples[k] << r * std::cos(th), r * std::sin(th);
    }
  } else if (kind == "two_mode") {
    const double amp2 = get_num(spec, "amp2", 0.5);
    samples.resize(N + 1);
    for (int k = 0; k < N; ++k) {
      const double th = kTwoPi * k / N;
      samples[k] = Vec(2);
      samples[k] << std::cos(th) + amp2 * std::cos(2.0 * th),
          std::sin(th) + amp2 * std::sin(2.0 * th);
    }
  } else if (kind == "random_trig") {
    const int degree = get_int(spec, "degree", 8);
    samples.resize(N + 1);
    std::vector<double> ca(degree + 1), sa(degree + 1), cb(degree + 1),
        sb(degree + 1);
    for (int k = 1; k <= degree; ++k) {
      const double damp = 1.0 / (1.0 + k);
      ca[k] = damp * rng.gaussian();
      sa[k] = damp * rng.gaussian();
      cb[k] = damp * rng.gaussian();
      sb[k] = damp * rng.gaussian();
    }
    for (int s = 0; s < N; ++s) {
      const double t = static_cast<double>(s) / N;
      double x = 0.0, y = 0.0;
      for (int k = 1; k <= degree; ++k) {
        x += ca[k] * std::cos(kTwoPi * k * t) + sa[k] * std::sin(kTwoPi * k * t);
        y += cb[k] * std::cos(kTwoPi * k * t) + sb[k] * std::sin(kTwoPi * k * t);
      }
      samples[s] = Vec(2);
      samples[s] << x, y;
    }
  } else if (kind == "values") {
    if (!spec.contains("values") || !spec.at("values").is_array())
      config_error("loop kind \"values\" needs a \"values\" array");
    for (const njson& row : spec.at("values")) {
      Vec p(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) p[i] = row[i].get<double>();
      samples.push_back(std::move(p));
    }
    return samples;
  } else {
    config_error("unknown loop kind \"" + kind + "\"");
  }
  samples[N] = samples[0];  // exact closure
  return samples;
}

ScenarioResult run_parseval(const ScenarioConfig& config) {
  check_keys(config.params, {"loops", "tolerance", "seed"}, "parseval params");
  if (!config.params.contains("loops") || !config.params.at("loops").is_array())
    config_error("parseval params need a \"loops\" array");
  const double tol = get_num(config.params, "tolerance", 1e-9);
  SplitMix64 rng(static_cast<std::uint64_t>(get_int(config.params, "seed", 12345)));

  json loops = json::array();
  bool all_ok = true;
  int index = 0;
  for (const njson& spec : config.params.at("loops")) {
    const std::string kind = get_str(spec, "kind", "");
    const int count = kind == "random_trig" ? get_int(spec, "count", 1) : 1;
    for (int c = 0; c < count; ++c) {
      const std::vector<Vec> samples = build_loop(spec, rng);
      const ParsevalReport rep = loop_parseval_check(samples, tol);
      json e = to_json(rep);
      e["kind"] = kind;
      e["index"] = index++;
      loops.push_back(std::move(e));
      all_ok = all_ok && rep.ok;
    }
  }
  if (!all_ok) {
    throw IntegrityError(
        "spectral loop inequality failed on at least one sampled loop");
  }
  json result;
  result["loops"] = std::move(loops);
  result["all_ok"] = all_ok;
  ScenarioResult out;
  out.report = envelope(config, std::move(result));
  return out;
}

ScenarioResult run_capacity_audit(const ScenarioConfig& config) {
  check_keys(config.params, {"domain", "grid", "time", "step"},
             "capacity-audit params");
  const AutonomousHamiltonian H = require_hamiltonian(config);
  if (!config.params.contains("domain"))
    config_error("capacity-audit params need a \"domain\"");
  const njson& dom = config.params.at("domain");
  check_keys(dom, {"kind", "radius", "center"}, "domain");
  const std::string kind = get_str(dom, "kind", "ball_cylinder");
  if (kind != "ball_cylinder")
    config_error("unsupported domain kind \"" + kind + "\"");
  const DomainSpec U = DomainSpec::ball_cylinder(
      get_num(dom, "radius", 1.0), get_vec(dom, "center", H.phase_dim()));

  const CapacityAuditReport rep = capacity_energy_audit(
      H, U, get_int(config.params, "grid", 0),
      get_num(config.params, "time", 1.0), get_num(config.params, "step", 1e-3));
  ScenarioResult out;
  out.report = envelope(config, to_json(rep));
  return out;
}

ScenarioResult run_geodesic_audit(const ScenarioConfig& config) {
  check_keys(config.params,
             {"grid", "time_nodes", "tolerance", "schedules", "floor_audit"},
             "geodesic-audit params");
  const AutonomousHamiltonian H = require_hamiltonian(config);
  const int grid = get_int(config.params, "grid", 0);
  const int time_nodes = get_int(config.params, "time_nodes", 0);
  const double tol = get_num(config.params, "tolerance", 1e-6);

  // The selector values come from the admissible-class formula; the
  // admissibility gate lives in spectrum_autonomous.
  const SpectrumReport spectrum = spectrum_autonomous(H, 1.0, grid);
  const double c = spectrum.selector;
  const double c_inv = spectrum.selector_inverse;

  std::vector<Schedule> schedules = standard_schedule_family();
  if (config.params.contains("schedules")) {
    std::vector<Schedule> chosen;
    for (const njson& name : config.params.at("schedules"))
      chosen.push_back(find_schedule(name.get<std::string>()));
    schedules = std::move(chosen);
  }

  json rows = json::array();
  bool identity_equality_seen = false;
  for (const Schedule& sch : schedules) {
    ContactPathSpec path = ContactPathSpec::scheduled(H, sch, 1.0);
    const SelectorBoundReport audit =
        selector_lower_bound_audit(path, c, c_inv, grid, time_nodes, tol);
    json row = to_json(audit);
    row["schedule"] = sch.name;
    row["monotone"] = sch.monotone;
    rows.push_back(std::move(row));
    if (sch.name == "identity") {
      identity_equality_seen = audit.equality && audit.equality_inverse;
      if (!identity_equality_seen)
        throw IntegrityError(
            "autonomous representative must realize the selector bound with "
            "equality");
    }
  }

  json result;
  result["c_value"] = c;
  result["c_inverse_value"] = c_inv;
  result["schedules"] = std::move(rows);

  if (get_bool(config.params, "floor_audit", true)) {
    const NormReport norms = norm_report(H, grid);
    if (norms.discriminant_norm.certified || norms.identity) {
      result["floor_audit"] = to_json(floor_lower_bound_audit(H, grid));
    } else {
      json skipped;
      skipped["skipped"] = norms.discriminant_norm.reason;
      result["floor_audit"] = std::move(skipped);
    }
  }

  ScenarioResult out;
  out.report = envelope(config, std::move(result));
  return out;
}

ScenarioResult run_sweep(const ScenarioConfig& config) {
  check_keys(config.params, {"A_values", "n", "grid"}, "sweep params");
  if (!config.params.contains("A_values") ||
      !config.params.at("A_values").is_array())
    config_error("sweep params need an \"A_values\" array");
  std::vector<double> A_values;
  for (const njson& a : config.params.at("A_values")) {
    if (!a.is_number()) config_error("A_values must contain numbers");
    A_values.push_back(a.get<double>());
  }
  ScenarioResult out = corollary_one_sweep(
      A_values, get_int(config.params, "n", 1), get_int(config.params, "grid", 0));
  // Re-wrap with this scenario's envelope (operation echoed, config kept).
  json result = out.report["result"];
  out.report = envelope(config, std::move(result));
  if (!config.csv_name.empty() && out.csv_files.count("sweep.csv")) {
    out.csv_files[config.csv_name] = out.csv_files["sweep.csv"];
    out.csv_files.erase("sweep.csv");
  }
  return out;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config) {
  const std::string& op = config.operation;
  if (op == "flow") return run_flow(config);
  if (op == "spectrum") return run_spectrum(config);
  if (op == "norms") return run_norms(config);
  if (op == "hessian-check") return run_hessian_check(config);
  if (op == "periodic-scan") return run_periodic_scan(config);
  if (op == "parseval") return run_parseval(config);
  if (op == "capacity-audit") return run_capacity_audit(config);
  if (op == "geodesic-audit") return run_geodesic_audit(config);
  if (op == "sweep") return run_sweep(config);
  config_error("unknown operation \"" + op + "\"");
}

ScenarioResult corollary_one_sweep(const std::vector<double>& A_values, int n,
                                   int grid_resolution) {
  json rows = json::array();
  std::ostringstream csv;
  csv << "A,B0,hessian_bound,shelukhin_norm,fpr_norm,discriminant_norm,"
         "oscillation_norm,selector,admissible,regular_zero,status\n";

  for (double A : A_values) {
    json row;
    row["A"] = A;
    try {
      const double B0 = compute_B0(A, n);
      const AutonomousHamiltonian H = make_radial_bump(B0, A, n);
      const NormReport norms = norm_report(H, grid_resolution);
      const double selector = translation_selector(H, 1.0, grid_resolution);
      row["B0"] = B0;
      row["hessian_bound"] = norms.hypotheses.hessian_bound;
      row["shelukhin_norm"] = to_json(norms.shelukhin_norm);
      row["fpr_norm"] = to_json(norms.fpr_norm);
      row["discriminant_norm"] = to_json(norms.discriminant_norm);
      row["oscillation_norm"] = to_json(norms.oscillation_norm);
      row["selector"] = selector;
      row["admissible"] = norms.hypotheses.admissible;
      row["regular_zero"] = norms.hypotheses.regular_zero;
      row["status"] = "ok";
      csv << format_double(A) << "," << format_double(B0) << ","
          << format_double(norms.hypotheses.hessian_bound) << ","
          << format_double(norms.shelukhin_norm.value) << ","
          << format_double(norms.fpr_norm.value) << ","
          << format_double(norms.discriminant_norm.value) << ","
          << format_double(norms.oscillation_norm.value) << ","
          << format_double(selector) << ","
          << (norms.hypotheses.admissible ? 1 : 0) << ","
          << (norms.hypotheses.regular_zero ? 1 : 0) << ",ok\n";
    } catch (const std::exception& e) {
      row["status"] = "error";
      row["message"] = e.what();
      csv << format_double(A) << ",,,,,,,,,,error\n";
    }
    rows.push_back(std::move(row));
  }

  json result;
  result["rows"] = std::move(rows);
  ScenarioResult out;
  json env;
  env["schema_version"] = "1.0";
  env["operation"] = "sweep";
  env["hamiltonian"] = nullptr;
  env["result"] = std::move(result);
  out.report = std::move(env);
  out.csv_files["sweep.csv"] = csv.str();
  return out;
}

}  // namespace contactlab
