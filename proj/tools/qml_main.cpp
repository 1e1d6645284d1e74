// qml: run verification experiments on graded quotient modules and write
// report.json plus per-degree CSV profiles.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qml/report.hpp"

namespace {

struct Common {
  std::string spec_path;
  int degree = 30;
  std::string out = "qml-out";
  std::uint64_t seed = 1;
  std::string tol;
  std::string timestamp;
  bool print = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qml::InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--spec", c.spec_path, "Ideal spec JSON file");
  cmd->add_option("--degree,-D", c.degree, "Truncation degree D")->capture_default_str();
  cmd->add_option("--out,-o", c.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--tol", c.tol, "Tolerance overrides, claim=value[,claim=value]");
  cmd->add_option("--timestamp", c.timestamp, "Fixed report timestamp");
  cmd->add_flag("--print", c.print, "Also print report.json to stdout");
}

template <class T>
void param(CLI::App* cmd, qml::Json& params, const std::string& flag, const std::string& key,
           const std::string& help) {
  cmd->add_option_function<T>(flag, [&params, key](const T& v) { params[key] = v; }, help);
}

int finish(const qml::RunResult& res, bool print) {
  if (res.exit_code == qml::kExitInput) {
    std::cerr << "error: " << res.error << "\n";
    return res.exit_code;
  }
  for (const auto& r : res.reports) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.claim << ": " << r.verdict << "\n";
  }
  for (const auto& f : res.failed) std::cerr << "failed claim: " << f << "\n";
  if (print) std::cout << res.report.dump(2) << "\n";
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quotient-module compressions and spectral verification"};
  app.set_version_flag("--version", QML_VERSION);
  app.require_subcommand(1);

  Common common;
  qml::Json params = qml::Json::object();
  std::string config_path;

  std::vector<CLI::App*> commands;
  for (const auto& name : qml::experiment_names()) {
    if (name == "isometry-structure") continue;  // suite only
    CLI::App* cmd = app.add_subcommand(name, "Run the " + name + " experiment");
    add_common(cmd, common);
    commands.push_back(cmd);
    if (name == "compress") param<std::string>(cmd, params, "--poly", "poly", "Multiplier polynomial");
    if (name == "commutator") {
      param<int>(cmd, params, "--i", "i", "Adjoint coordinate (1-based)");
      param<int>(cmd, params, "--j", "j", "Coordinate (1-based)");
    }
    if (name == "trace-formula" || name == "shift-coeffs" || name == "zero-blocks" ||
        name == "module-map" || name == "dims") {
      param<int>(cmd, params, "--dim", "dim", "Number of variables d");
      param<int>(cmd, params, "--power", "power", "Power N of J");
    }
    if (name == "trace-formula") {
      param<std::string>(cmd, params, "--f1", "f1", "Homogeneous polynomial f1");
      param<std::string>(cmd, params, "--f2", "f2", "Homogeneous polynomial f2");
    }
    if (name == "shift-coeffs") param<int>(cmd, params, "--kmax", "k_max", "Largest k");
    if (name == "module-map") param<int>(cmd, params, "--samples", "samples", "Random samples");
    if (name == "asym-orth") {
      param<std::string>(cmd, params, "--theta-i", "theta_i", "Comma-separated unimodular entries");
      param<std::string>(cmd, params, "--theta-j", "theta_j", "Comma-separated unimodular entries");
      param<int>(cmd, params, "--kmax", "k_max_orth", "Largest k");
    }
    if (name == "nonnormal-demo") param<double>(cmd, params, "--floor", "floor", "Norm floor");
    if (name == "boundary-witness") param<std::string>(cmd, params, "--f", "f", "Witness polynomial");
    if (name == "spectrum-probe") {
      param<std::vector<int>>(cmd, params, "--tail-starts", "tail_starts", "Tail start degrees");
      param<int>(cmd, params, "--reference-start", "reference_start", "Reference tail start");
      param<std::string>(cmd, params, "--t", "t", "Unimodular boundary parameter");
    }
  }
  CLI::App* suite = app.add_subcommand("suite", "Run experiments listed in a config file");
  add_common(suite, common);
  suite->add_option("--config", config_path, "Suite config JSON")->required();

  CLI::App* spec_cmd = app.add_subcommand("spec", "Validate a spec and print its normal form");
  spec_cmd->add_option("--spec", common.spec_path, "Ideal spec JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qml::kExitInput;
  }

  try {
    std::optional<qml::IdealSpec> spec;
    if (!common.spec_path.empty()) spec = qml::parse_ideal_spec_text(read_file(common.spec_path));

    if (spec_cmd->parsed()) {
      std::cout << qml::serialize_ideal_spec(*spec).dump(2) << "\n";
      return qml::kExitPass;
    }

    qml::RunConfig cfg;
    if (suite->parsed()) {
      qml::Json doc;
      try {
        doc = qml::Json::parse(read_file(config_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw qml::InputError(std::string("config: malformed JSON: ") + e.what());
      }
      cfg = qml::parse_run_config(doc);
      if (suite->count("--degree")) cfg.max_degree = common.degree;
      if (suite->count("--out")) cfg.out_dir = common.out;
      if (suite->count("--seed")) cfg.seed = common.seed;
    } else {
      for (CLI::App* cmd : commands) {
        if (cmd->parsed()) cfg.experiments.push_back(cmd->get_name());
      }
      cfg.max_degree = common.degree;
      cfg.out_dir = common.out;
      cfg.seed = common.seed;
      cfg.params = params;
    }
    if (!common.tol.empty()) {
      for (const auto& [k, v] : qml::parse_tolerances(common.tol)) cfg.tolerances[k] = v;
    }
    cfg.timestamp = common.timestamp;
    return finish(qml::run(cfg, spec), common.print);
  } catch (const qml::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qml::kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qml::kExitInput;
  }
}
