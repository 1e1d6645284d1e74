#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qml/error.hpp"
#include "qml/report.hpp"

using namespace qml;
namespace fs = std::filesystem;

namespace {

const char* kLineSpec = R"({
  "d": 3,
  "components": [{"name": "line", "assumed": "prime", "generators": [
    {"coefficients": [{"re": 1, "im": 0, "alpha": [1, 0, 0]}, {"re": -1, "im": 0, "alpha": [0, 1, 0]}]}]}]
})";

const char* kPresetSpec = R"({
  "d": 3,
  "presets": {"kind": "j_theta_power", "theta": [{"re": 1}, {"re": 1}, {"re": 1}], "power": 2}
})";

std::string error_of(const std::string& text) {
  try {
    parse_ideal_spec_text(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qml_test_report_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(IdealSpec, ParsesComponentsAndPresets) {
  const IdealSpec line = parse_ideal_spec_text(kLineSpec);
  EXPECT_EQ(line.d, 3);
  ASSERT_EQ(line.components.size(), 1u);
  EXPECT_EQ(line.components[0].assumed, "prime");
  EXPECT_EQ(build_ideal(line).quotient_component(4).dim(), 5);

  const IdealSpec preset = parse_ideal_spec_text(kPresetSpec);
  ASSERT_TRUE(preset.preset_component.has_value());
  EXPECT_EQ(preset.preset_component->name, "preset:j_theta_power");
  EXPECT_EQ(preset.preset_component->assumed, "primary");
  EXPECT_EQ(preset.all_components().size(), 1u);
  EXPECT_EQ(build_ideal(preset).quotient_component(5).dim(), 3);
}

TEST(IdealSpec, RoundTrip) {
  for (const char* text : {kLineSpec, kPresetSpec}) {
    const IdealSpec spec = parse_ideal_spec_text(text);
    const Json out = serialize_ideal_spec(spec);
    const IdealSpec again = parse_ideal_spec(out);
    EXPECT_EQ(spec, again);
    EXPECT_EQ(serialize_ideal_spec(again), out);
  }
}

TEST(IdealSpec, ErrorsCarryFieldPaths) {
  EXPECT_NE(error_of("{").find("malformed JSON"), std::string::npos);
  EXPECT_NE(error_of(R"({"components": []})").find("missing field \"d\""), std::string::npos);
  EXPECT_NE(error_of(R"({"d": 3})").find("component"), std::string::npos);
  EXPECT_NE(error_of(R"({"d": 3, "extra": 1, "presets": {"kind": "j_theta", "theta": [{"re":1},{"re":1},{"re":1}]}})")
                .find("unknown field \"extra\""),
            std::string::npos);

  const std::string short_alpha = error_of(R"({"d": 3, "components": [{"name": "a", "generators": [
      {"coefficients": [{"re": 1, "alpha": [1, 0, 0]}, {"re": 1, "alpha": [1, 0]}]}]}]})");
  EXPECT_NE(short_alpha.find("components[0]"), std::string::npos) << short_alpha;
  EXPECT_NE(short_alpha.find("alpha"), std::string::npos) << short_alpha;

  const std::string inhomogeneous = error_of(R"({"d": 2, "components": [{"name": "a", "generators": [
      {"coefficients": [{"re": 1, "alpha": [1, 0]}, {"re": 1, "alpha": [2, 0]}]}]}]})");
  EXPECT_NE(inhomogeneous.find("not homogeneous"), std::string::npos) << inhomogeneous;

  const std::string zero = error_of(R"({"d": 2, "components": [{"name": "a", "generators": [
      {"coefficients": [{"re": 0, "alpha": [1, 0]}]}]}]})");
  EXPECT_FALSE(zero.empty());

  EXPECT_FALSE(error_of(R"({"d": 3, "presets": {"kind": "j_theta", "theta": [{"re": 2}, {"re": 1}, {"re": 1}]}})").empty());
  EXPECT_FALSE(error_of(R"({"d": 3, "presets": {"kind": "j_theta", "theta": [{"re": 1}, {"re": 1}]}})").empty());
  EXPECT_FALSE(error_of(R"({"d": 3, "presets": {"kind": "other", "theta": [{"re": 1}, {"re": 1}, {"re": 1}]}})").empty());
  EXPECT_FALSE(error_of(R"({"d": 3, "presets": {"kind": "j_theta_power", "power": 0, "theta": [{"re": 1}, {"re": 1}, {"re": 1}]}})").empty());
  EXPECT_FALSE(error_of(R"({"d": 3, "components": [{"name": "a", "assumed": "maybe", "generators": [
      {"coefficients": [{"re": 1, "alpha": [1, 0, 0]}]}]}]})").empty());
}

TEST(Tolerances, ParseAndReject) {
  const auto tol = parse_tolerances("trace-formula=1e-5, zero-blocks=1e-8");
  EXPECT_DOUBLE_EQ(tol.at("trace-formula"), 1e-5);
  EXPECT_DOUBLE_EQ(tol.at("zero-blocks"), 1e-8);
  EXPECT_THROW(parse_tolerances("trace-formula"), InputError);
  EXPECT_THROW(parse_tolerances("trace-formula=abc"), InputError);
  EXPECT_THROW(parse_tolerances("nonsense=1"), InputError);
}

TEST(RunConfig, ParseDocument) {
  const RunConfig cfg = parse_run_config(Json::parse(
      R"({"degree": 12, "experiments": ["dims", "compress"], "seed": 9, "tol": {"zero-blocks": 1e-7},
          "params": {"poly": "z1"}, "out": "somewhere"})"));
  EXPECT_EQ(cfg.max_degree, 12);
  EXPECT_EQ(cfg.experiments.size(), 2u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_DOUBLE_EQ(cfg.tolerances.at("zero-blocks"), 1e-7);
  EXPECT_EQ(cfg.out_dir, fs::path("somewhere"));
  EXPECT_THROW(parse_run_config(Json::parse(R"({"degree": "x"})")), InputError);
  EXPECT_THROW(parse_run_config(Json::parse(R"({"bogus": 1})")), InputError);
}

TEST(Run, WritesReportAndProfiles) {
  RunConfig cfg;
  cfg.max_degree = 10;
  cfg.experiments = {"dims", "compress"};
  cfg.out_dir = fresh_dir("writes");
  cfg.timestamp = "2000-01-01T00:00:00Z";
  const RunResult res = run(cfg, parse_ideal_spec_text(kPresetSpec));
  EXPECT_EQ(res.exit_code, kExitPass) << res.error;
  ASSERT_TRUE(fs::exists(cfg.out_dir / "report.json"));
  const Json doc = Json::parse(slurp(cfg.out_dir / "report.json"));
  EXPECT_EQ(doc["schema"], kReportSchema);
  EXPECT_EQ(doc["timestamp"], "2000-01-01T00:00:00Z");
  EXPECT_TRUE(doc["summary"]["pass"].get<bool>());
  EXPECT_EQ(doc["reports"].size(), res.reports.size());
  EXPECT_FALSE(doc["config"].contains("out"));

  int csvs = 0;
  for (const auto& entry : fs::directory_iterator(cfg.out_dir / "profiles")) {
    ++csvs;
    const std::string text = slurp(entry.path());
    EXPECT_EQ(text.rfind("degree,index,singular_value,trusted\n", 0), 0u) << entry.path();
    EXPECT_NE(entry.path().extension(), ".tmp");
  }
  EXPECT_GT(csvs, 0);
  fs::remove_all(cfg.out_dir);
}

TEST(Run, InputErrorsWriteNothing) {
  RunConfig cfg;
  cfg.max_degree = 10;
  cfg.out_dir = fresh_dir("input");
  cfg.experiments = {"no-such-experiment"};
  RunResult res = run(cfg, parse_ideal_spec_text(kPresetSpec));
  EXPECT_EQ(res.exit_code, kExitInput);
  EXPECT_NE(res.error.find("unknown experiment"), std::string::npos);
  EXPECT_FALSE(fs::exists(cfg.out_dir));

  cfg.experiments = {"dims"};
  cfg.max_degree = 2;
  EXPECT_EQ(run(cfg, parse_ideal_spec_text(kPresetSpec)).exit_code, kExitInput);
  cfg.max_degree = 10;
  cfg.params = {{"i", 7}};
  cfg.experiments = {"commutator"};
  EXPECT_EQ(run(cfg, parse_ideal_spec_text(kPresetSpec)).exit_code, kExitInput);
  EXPECT_FALSE(fs::exists(cfg.out_dir));
}

TEST(Run, VerificationFailureExitsOne) {
  RunConfig cfg;
  cfg.max_degree = 12;
  cfg.experiments = {"boundary-witness"};
  cfg.params = {{"f", "w2^2"}};
  cfg.out_dir = fresh_dir("fail");
  const RunResult res = run(cfg, parse_ideal_spec_text(kPresetSpec), false);
  EXPECT_EQ(res.exit_code, kExitFail);
  ASSERT_EQ(res.failed.size(), 1u);
  EXPECT_FALSE(res.report["summary"]["pass"].get<bool>());
  EXPECT_FALSE(fs::exists(cfg.out_dir));
}

TEST(Run, DeterministicApartFromTimestamp) {
  RunConfig cfg;
  cfg.max_degree = 10;
  cfg.experiments = {"dims", "module-map", "zero-blocks"};
  cfg.seed = 3;
  const RunResult a = run(cfg, parse_ideal_spec_text(kPresetSpec), false);
  const RunResult b = run(cfg, parse_ideal_spec_text(kPresetSpec), false);
  Json ja = a.report, jb = b.report;
  ja.erase("timestamp");
  jb.erase("timestamp");
  EXPECT_EQ(ja.dump(), jb.dump());
}

TEST(Formatting, DoublesAndCsv) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-20), "-2.4999999999999999e-20");
  SpectralProfile p;
  p.degrees = {0, 1};
  p.singular_values = {{1.0}, {0.5, 0.25}};
  p.trusted = {true, false};
  EXPECT_EQ(profile_csv(p),
            "degree,index,singular_value,trusted\n0,0,1,true\n1,0,0.5,false\n1,1,0.25,false\n");
}

TEST(Experiments, NamesAreListed) {
  const auto& names = experiment_names();
  for (const char* n : {"dims", "compress", "commutator", "trace-formula", "shift-coeffs", "zero-blocks",
                        "module-map", "asym-orth", "nonnormal-demo", "boundary-witness", "spectrum-probe",
                        "isometry-structure"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  }
}
