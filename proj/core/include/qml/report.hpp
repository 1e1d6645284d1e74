#pragma once

// Ideal-spec documents, run configuration, experiment dispatch and the
// report.json / profiles/*.csv writers.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qml/verify.hpp"

namespace qml {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInput = 2;
inline constexpr const char* kReportSchema = "qml-report/1";

struct TermSpec {
  double re = 0.0;
  double im = 0.0;
  std::vector<int> alpha;
  bool operator==(const TermSpec&) const = default;
};

struct GeneratorSpec {
  std::vector<TermSpec> coefficients;
  bool operator==(const GeneratorSpec&) const = default;
};

struct ComponentSpec {
  std::string name;
  std::vector<GeneratorSpec> generators;
  std::string assumed = "unknown";  // "prime" | "primary" | "unknown"
  bool operator==(const ComponentSpec&) const = default;
};

struct PresetSpec {
  std::string kind;  // "j_theta" | "j_theta_power"
  std::vector<Complex> theta;
  int power = 1;
  bool operator==(const PresetSpec&) const = default;
};

struct IdealSpec {
  int d = 0;
  std::vector<ComponentSpec> components;
  std::optional<PresetSpec> presets;
  /// The preset expanded into explicit generators (not serialized).
  std::optional<ComponentSpec> preset_component;

  /// Components including the expanded preset.
  std::vector<ComponentSpec> all_components() const;
  bool operator==(const IdealSpec&) const = default;
};

/// Validates and expands; errors carry the field path.
IdealSpec parse_ideal_spec(const Json& doc);
IdealSpec parse_ideal_spec_text(std::string_view text);
Json serialize_ideal_spec(const IdealSpec& spec);

HPoly build_generator(const GeneratorSpec& gen, int dim);
GradedIdeal build_component(const ComponentSpec& comp, int dim);
std::vector<GradedIdeal> build_components(const IdealSpec& spec);
/// Intersection of all components.
GradedIdeal build_ideal(const IdealSpec& spec);

struct RunConfig {
  int max_degree = 30;
  std::vector<std::string> experiments;
  std::filesystem::path out_dir = "qml-out";
  std::uint64_t seed = 1;
  std::map<std::string, double> tolerances;
  Json params = Json::object();
  std::string timestamp;  // filled by run when empty
};

/// Names accepted in RunConfig::experiments.
const std::vector<std::string>& experiment_names();

/// "claim=value,claim=value"
std::map<std::string, double> parse_tolerances(std::string_view text);

/// Suite configuration document: {degree, experiments, seed, tol, params, out}.
RunConfig parse_run_config(const Json& doc);

struct RunResult {
  int exit_code = kExitPass;
  Json report;
  std::vector<std::string> failed;
  std::string error;
  std::vector<VerificationReport> reports;
};

/// Runs the experiments; writes report.json and profiles/*.csv under
/// config.out_dir when write_files is set. Input errors (exit 2) write
/// nothing.
RunResult run(const RunConfig& config, const std::optional<IdealSpec>& spec,
              bool write_files = true);

/// 17 significant digits, '.' separator, locale-independent.
std::string format_double(double v);

/// CSV text: degree,index,singular_value,trusted.
std::string profile_csv(const SpectralProfile& profile);

}  // namespace qml
