// contactlab: config-driven runner for the contact-dynamics toolkit.
//
// Every operation is a subcommand taking a JSON scenario file and optional
// overrides.  Exit codes: 0 success, 1 config/usage problems (with line and
// column for JSON syntax errors), 2 failed mathematical hypotheses, 3
// internal consistency or accuracy failures.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "contactlab/serialize.hpp"
#include "contactlab/types.hpp"

namespace {

namespace fs = std::filesystem;

struct SubOptions {
  std::string config_path;
  int grid = 0;
  double step = 0.0;
  double tol = 0.0;
  std::string out_dir;
  CLI::Option* grid_opt = nullptr;
  CLI::Option* step_opt = nullptr;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

const std::vector<std::pair<std::string, std::string>> kOperations = {
    {"flow", "integrate a contact flow and dump the trajectory"},
    {"spectrum", "translation spectrum, selector, translated points"},
    {"norms", "length functionals and certified norm values"},
    {"hessian-check", "global Hessian bound and admissibility gate"},
    {"periodic-scan", "short periodic orbit search and period certificate"},
    {"parseval", "spectral loop inequality on sampled closed curves"},
    {"capacity-audit", "displacement and capacity-energy inequalities"},
    {"geodesic-audit", "selector lower bounds over a schedule family"},
    {"sweep", "norm growth across a family of bump amplitudes"},
};

void report_json_error(const std::string& text, const std::string& path,
                       const nlohmann::json::parse_error& e) {
  // e.byte is the 1-based offset of the offending character.
  std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
  if (offset > text.size()) offset = text.size();
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::cerr << path << ":" << line << ":" << col << ": " << e.what() << "\n";
}

int run_operation(const std::string& op, const SubOptions& opts) {
  std::ifstream in(opts.config_path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot open config file: " << opts.config_path << "\n";
    return 1;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  nlohmann::json config;
  try {
    config = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    report_json_error(text, opts.config_path, e);
    return 1;
  }

  try {
    contactlab::ScenarioConfig scenario =
        contactlab::scenario_from_json(config, op);
    if (opts.grid_opt && opts.grid_opt->count() > 0)
      scenario.params["grid"] = opts.grid;
    if (opts.step_opt && opts.step_opt->count() > 0)
      scenario.params["step"] = opts.step;
    if (opts.tol_opt && opts.tol_opt->count() > 0)
      scenario.params["tolerance"] = opts.tol;
    if (opts.out_opt && opts.out_opt->count() > 0)
      scenario.output_directory = opts.out_dir;

    const contactlab::ScenarioResult result = run_scenario(scenario);

    const fs::path dir = scenario.output_directory.empty()
                             ? fs::path(".")
                             : fs::path(scenario.output_directory);
    fs::create_directories(dir);

    const fs::path report_path = dir / scenario.report_name;
    {
      std::ofstream out(report_path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << report_path.string() << "\n";
        return 1;
      }
      out << result.report.dump(2) << "\n";
    }
    std::cout << "wrote " << report_path.string() << "\n";
    for (const auto& [name, content] : result.csv_files) {
      const fs::path csv_path = dir / name;
      std::ofstream out(csv_path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << csv_path.string() << "\n";
        return 1;
      }
      out << content;
      std::cout << "wrote " << csv_path.string() << "\n";
    }
    return 0;
  } catch (const contactlab::HypothesisError& e) {
    std::cerr << "hypothesis not satisfied: " << e.what() << "\n";
    return 2;
  } catch (const contactlab::IntegrityError& e) {
    std::cerr << "integrity failure: " << e.what() << "\n";
    return 3;
  } catch (const contactlab::AccuracyError& e) {
    std::cerr << "accuracy failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contactlab: numerical checks for contact flows on R^2n x S^1"};
  app.require_subcommand(1);

  std::map<std::string, std::shared_ptr<SubOptions>> option_sets;
  for (const auto& [name, description] : kOperations) {
    auto opts = std::make_shared<SubOptions>();
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("config", opts->config_path, "scenario config (JSON)")
        ->required();
    opts->grid_opt =
        sub->add_option("--grid", opts->grid, "override grid resolution");
    opts->step_opt =
        sub->add_option("--step", opts->step, "override integrator step");
    opts->tol_opt =
        sub->add_option("--tol", opts->tol, "override tolerance");
    opts->out_opt =
        sub->add_option("--out", opts->out_dir, "override output directory");
    option_sets[name] = opts;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems share the config-error code
  }

  for (const auto& [name, opts] : option_sets)
    if (app.got_subcommand(name)) return run_operation(name, *opts);
  return 1;
}
