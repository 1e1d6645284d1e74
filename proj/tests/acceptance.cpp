// Acceptance runner: one PASS/FAIL line per criterion.
//
//   qml_acceptance                 run every criterion
//   qml_acceptance --criterion 7   run one
//
// Exit status 0 iff every selected criterion passes.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "qml/report.hpp"

namespace fs = std::filesystem;
using namespace qml;

namespace {

// pinned tolerances
constexpr double kTraceTol = 1e-4;
constexpr double kTraceSeconds = 60.0;
constexpr double kVanishingTraceTol = 1e-6;
constexpr double kShiftTol = 1e-8;
constexpr int kShiftKMax = 60;
constexpr double kDecayA[2] = {0.9, 1.1};
constexpr double kDecayB[2] = {1.8, 2.2};
constexpr int kDecayKMin = 20;
constexpr int kDecayKMax = 200;
constexpr int kLateKMin = 5000;
constexpr int kLateKMax = 10000;
constexpr double kZeroBlockTol = 1e-9;
constexpr double kFitQuality = 0.95;
constexpr double kModuleMapTol = 1e-9;
constexpr int kModuleMapSamples = 50;
constexpr double kOrthTol = 1e-12;
constexpr int kOrthKMax = 40;
constexpr double kNormFloor = 0.1;
constexpr double kControlConstant = 10.0;
constexpr double kWitnessNormMin = 1e-3;
constexpr double kWitnessRatio = 0.1;
constexpr double kProbeNear = 0.05;
constexpr double kProbeMargin = 0.2;

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> notes;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream ss;
  ss << std::setprecision(digits) << v;
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

HPoly z(int d, int i) { return HPoly::variable(d, i); }

// ---------------------------------------------------------------- criteria

Outcome trace_formula() {
  Outcome out{true, "", {}};
  const int cases[4][2] = {{3, 1}, {3, 2}, {4, 2}, {3, 3}};
  std::string parts;
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = verify_trace_formula(c[0], c[1], z(c[0], 0), z(c[0], 0), 40, kTraceTol);
    const double secs = seconds_since(t0);
    const double pred = rep.predicted["re"].get<double>();
    const double comp = rep.computed["re"].get<double>();
    const bool ok = rep.pass && secs <= kTraceSeconds;
    out.pass = out.pass && ok;
    parts += " (" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "): " + fmt(comp, 10) +
             " vs " + fmt(pred) + ", " + fmt(secs, 2) + "s;";
    out.notes.push_back("d=" + std::to_string(c[0]) + " N=" + std::to_string(c[1]) +
                        " raw partial trace " +
                        fmt(rep.details["partial_trace_raw"]["re"].get<double>(), 8) +
                        ", tail " + fmt(rep.details["tail_estimate"].get<double>(), 3));
  }
  out.summary = "extrapolated traces" + parts;
  return out;
}

Outcome vanishing_trace() {
  const int d = 3;
  const HPoly w2 = w_basis(d)[1];
  const auto rep = verify_trace_formula(d, 2, w2, z(d, 0), 40, kVanishingTraceTol);
  const double re = rep.computed["re"].get<double>();
  const double im = rep.computed["im"].get<double>();
  const double mag = std::hypot(re, im);
  Outcome out{mag <= kVanishingTraceTol,
              "|tr[S_w2^*, S_z1]| = " + fmt(mag, 3) + " (bound " + fmt(kVanishingTraceTol) + ")",
              {}};
  out.notes.push_back("raw partial trace " +
                      fmt(std::abs(Complex(rep.details["partial_trace_raw"]["re"].get<double>(),
                                           rep.details["partial_trace_raw"]["im"].get<double>())),
                          3));
  return out;
}

Outcome shift_coefficients() {
  Outcome out{true, "", {}};
  bool literal = true;
  bool corrected = true;
  bool decay = true;
  double literal_err = 0.0;
  double corrected_err = 0.0;
  for (int d : {3, 4}) {
    for (int n_pow : {2, 3}) {
      const auto rep = verify_shift_coefficients_all(d, n_pow, kShiftKMax, kShiftTol);
      literal = literal && rep.details["literal_pass"].get<bool>();
      corrected = corrected && rep.pass;
      literal_err = std::max(literal_err, rep.details["literal_max_error"].get<double>());
      corrected_err = std::max(corrected_err, rep.computed["max_error"].get<double>());
    }
    for (int m = 1; m <= 2; ++m) {
      for (int n = 0; n < m; ++n) {
        const auto rep = verify_shift_decay(d, m, n, kDecayKMin, kDecayKMax);
        const double ea = rep.computed["a_exponent"].get<double>();
        const double eb = rep.computed["b_exponent"].get<double>();
        const bool ok = ea >= kDecayA[0] && ea <= kDecayA[1] && eb >= kDecayB[0] && eb <= kDecayB[1];
        decay = decay && ok;
        out.notes.push_back("decay d=" + std::to_string(d) + " (m,n)=(" + std::to_string(m) +
                            "," + std::to_string(n) + "): |a| ~ k^-" + fmt(ea) + ", |b| ~ k^-" +
                            fmt(eb) + (ok ? "" : "  OUT OF RANGE"));
        const auto late = verify_shift_decay(d, m, n, kLateKMin, kLateKMax);
        out.notes.push_back("        over k in [" + std::to_string(kLateKMin) + ", " +
                            std::to_string(kLateKMax) + "]: |a| ~ k^-" +
                            fmt(late.computed["a_exponent"].get<double>()) + ", |b| ~ k^-" +
                            fmt(late.computed["b_exponent"].get<double>()));
      }
    }
  }
  out.pass = literal && decay;
  out.summary = "literal a_{m,n}(k)<z_i^(m-n)g,f> max error " + fmt(literal_err, 3) +
                " (tol " + fmt(kShiftTol) + "); decay exponents " +
                (decay ? "in range" : "out of range");
  out.notes.insert(out.notes.begin(),
                   std::string("with parity factor (-1)^(m+n): max error ") +
                       fmt(corrected_err, 3) + (corrected ? " PASS" : " FAIL"));
  return out;
}

Outcome zero_blocks() {
  Outcome out{true, "", {}};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto rep = verify_zero_blocks(3, 3, i, 25, kZeroBlockTol);
    worst = std::max(worst, rep.computed.get<double>());
    out.pass = out.pass && rep.pass;
  }
  out.summary = "max cross-block norm (m <= n) " + fmt(worst, 3) + " over i = 1..3";
  return out;
}

Outcome hilbert_function() {
  Outcome out{true, "", {}};
  int checked = 0;
  for (int d = 2; d <= 5; ++d) {
    for (int n_pow = 1; n_pow <= 4; ++n_pow) {
      const auto ideal = j_theta_power(ThetaDirection::ones(d), n_pow);
      const auto expected = monomial_count(d, n_pow - 1);
      for (const auto& row : hilbert_dims(ideal, n_pow + 3)) {
        const auto want = row.degree >= n_pow - 1 ? expected : monomial_count(d, row.degree);
        if (row.quotient_dim != want) {
          out.pass = false;
          out.notes.push_back("d=" + std::to_string(d) + " N=" + std::to_string(n_pow) +
                              " degree " + std::to_string(row.degree) + ": " +
                              std::to_string(row.quotient_dim) + " != " + std::to_string(want));
        }
        ++checked;
      }
    }
  }
  out.summary = std::to_string(checked) + " (d, N, degree) quotient dimensions checked, d <= 5, N <= 4";
  return out;
}

Outcome isometry_structure() {
  Outcome out{true, "", {}};
  const auto rep = verify_isometry_structure(3, 2, 30, kFitQuality);
  out.pass = rep.pass;
  out.summary = "J^2, d=3, D=30: ||S - S_zi|| on degree k <= c/(k+1) with c = " +
                fmt(rep.computed["c"].get<double>()) + ", least-squares c = " +
                fmt(rep.computed["c_least_squares"].get<double>()) + ", fit quality " +
                fmt(rep.computed["fit_quality"].get<double>()) + " (>= " + fmt(kFitQuality) + ")";
  for (auto [d, n_pow] : {std::pair{3, 3}, std::pair{4, 2}}) {
    const auto other = verify_isometry_structure(d, n_pow, 30, kFitQuality);
    const auto& seq = other.details["sequence"];
    const auto& last = seq.back();
    out.notes.push_back("d=" + std::to_string(d) + " N=" + std::to_string(n_pow) + ": c = " +
                        fmt(other.computed["c"].get<double>()) + ", fit quality " +
                        fmt(other.computed["fit_quality"].get<double>()) + ", (k+1)*norm at k=" +
                        std::to_string(last["k"].get<int>()) + ": " +
                        fmt((last["k"].get<int>() + 1) * last["norm"].get<double>()));
  }
  return out;
}

Outcome module_map() {
  const auto rep = verify_rg_module_map(3, 2, kModuleMapSamples, 1, kModuleMapTol);
  return {rep.pass, std::to_string(kModuleMapSamples) + " random (f, h): max |r_g(fh) - r(f) r_g(h)| = " +
                        fmt(rep.computed.get<double>(), 3),
          {}};
}

Outcome asymptotic_orthogonality() {
  Outcome out{true, "", {}};
  const std::vector<std::pair<ThetaDirection, ThetaDirection>> pairs = {
      {ThetaDirection({1, 1, 1}), ThetaDirection({1, 1, -1})},
      {ThetaDirection({1, 1, 1}), ThetaDirection({1, Complex(0, 1), -1})},
      {ThetaDirection({1, 1}), ThetaDirection({1, -1})}};
  double worst = 0.0;
  double kernel_worst = 0.0;
  bool kernel = true;
  for (const auto& [a, b] : pairs) {
    const auto rep = verify_asymptotic_orthogonality(a, b, kOrthKMax, kOrthTol);
    out.pass = out.pass && rep.pass;
    worst = std::max(worst, rep.computed["max_rel_error"].get<double>());
    kernel = kernel && rep.details["kernel_identity_pass"].get<bool>();
    kernel_worst = std::max(kernel_worst, rep.details["kernel_identity_max_error"].get<double>());
  }
  out.summary = "<g_i^k, g_j^k> vs C(k+d-1,d-1)^-1 <theta_j,theta_i>^k, k <= 40: max rel error " +
                fmt(worst, 3);
  out.notes.push_back("<g_i^k, K_k(theta_j)> = <theta_j,theta_i>^k: max error " +
                      fmt(kernel_worst, 3) + (kernel ? " PASS" : " FAIL"));
  return out;
}

Outcome nonnormality_contrast() {
  const int d = 3;
  const int top = 25;
  HPoly line = z(d, 0);
  line -= z(d, 1);
  const auto demo = nonnormality_demo(GradedIdeal::from_generators(d, {line}), top, kNormFloor);
  const auto control = nonnormality_demo(j_theta(ThetaDirection::ones(d)), top, kNormFloor);
  const double min_line = demo.computed["min_block_norm"].get<double>();
  const double control_scaled = control.computed["max_k_times_norm"].get<double>();
  const auto& line_norms = demo.details["block_norms"];
  const auto& control_norms = control.details["block_norms"];
  bool ordered = true;
  for (std::size_t k = 1; k < std::min(line_norms.size(), control_norms.size()); ++k) {
    if (k >= line_norms.size() / 2) {
      ordered = ordered && line_norms[k].get<double>() > control_norms[k].get<double>();
    }
  }
  Outcome out;
  out.pass = min_line >= kNormFloor && control_scaled <= kControlConstant && ordered;
  out.summary = "(z1-z2): min block norm " + fmt(min_line) + " (>= " + fmt(kNormFloor) +
                "); control J: max k*norm " + fmt(control_scaled) + " (<= " +
                fmt(kControlConstant) + "); ordering " + (ordered ? "holds" : "violated");
  return out;
}

Outcome boundary_witness_criterion() {
  const int d = 3;
  const auto ideal = j_theta_power(ThetaDirection::ones(d), 2);
  GradedPoly f(d);
  f += w_basis(d)[1];
  const auto rep = boundary_witness({ideal}, f, 30);
  const double norm = rep.computed["norm"].get<double>();
  const double last = rep.computed.value("last_quartile_max", 0.0);
  Outcome out;
  out.pass = rep.pass && norm >= kWitnessNormMin && last <= kWitnessRatio * norm &&
             rep.verdict == "compact-consistent non-zero witness";
  out.summary = "||S_w2|| = " + fmt(norm) + ", last-quartile max block " + fmt(last) +
                " vs " + fmt(kWitnessRatio * norm) + " at D=30: " + rep.verdict;
  const auto later = boundary_witness({ideal}, f, 60);
  out.notes.push_back("D=60: last-quartile max block " +
                      fmt(later.computed.value("last_quartile_max", 0.0)) + ": " + later.verdict);
  return out;
}

Outcome spectrum_probe_criterion() {
  const auto ideal = j_theta_power(ThetaDirection::ones(3), 2);
  ProbeSettings s;
  s.tail_starts = {2, 5, 10, 15, 20, 25};
  s.reference_start = 20;
  s.near_threshold = kProbeNear;
  s.origin_margin = kProbeMargin;
  const auto rep = spectrum_probe(ideal, 30, s);
  Outcome out;
  out.pass = rep.pass;
  const double ref = rep.computed["boundary_at_reference"].get<double>();
  const double origin = rep.computed["origin_at_reference"].get<double>();
  out.summary = std::string("lambda=(1,1,1): ") +
                (rep.computed["boundary_decreasing"].get<bool>() ? "decreasing" : "not decreasing") +
                " in tail_start, " + fmt(ref) + " at tail_start 20 (<= " + fmt(kProbeNear) +
                "); lambda=0: " + fmt(origin) + " (>= " + fmt(3 - kProbeMargin) + ")";
  std::string row = "boundary probe by tail_start:";
  for (const auto& r : rep.details["rows"]) {
    row += " " + std::to_string(r["tail_start"].get<int>()) + ":" + fmt(r["boundary"].get<double>(), 3);
  }
  out.notes.push_back(row);
  std::string by_d = "boundary probe at tail_start 10 by D:";
  for (int top : {20, 30, 40}) {
    by_d += " " + std::to_string(top) + ":" +
            fmt(essential_spectrum_probe({1, 1, 1}, build_frame(ideal, top), 10), 3);
  }
  out.notes.push_back(by_d);
  return out;
}

// -------------------------------------------------------------- CLI contract

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + QML_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_timestamp(const fs::path& report) {
  Json doc = Json::parse(slurp(report));
  doc.erase("timestamp");
  return doc.dump();
}

Outcome cli_contract() {
  Outcome out{true, "", {}};
  const fs::path root = fs::temp_directory_path() / ("qml_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(root / name) << text;
    return (root / name).string();
  };
  const std::string cfg = write(
      "suite.json",
      R"({"degree": 12, "experiments": ["dims", "compress", "zero-blocks", "module-map"], "seed": 7})");
  const std::string bad_cfg = write("bad.json", R"({"degree": 12, "experiments": ["dims", "nope"]})");
  const std::string bad_spec = write(
      "bad_spec.json",
      R"({"d": 3, "components": [{"name": "a", "generators": [{"coefficients": [{"re": 1, "alpha": [1, 0, 0]}, {"re": 1, "alpha": [0, 1, 0]}, {"re": 1, "alpha": [1, 0]}]}]}]})");

  const int a = run_cli("suite --config " + cfg + " --out " + (root / "a").string());
  const int b = run_cli("suite --config " + cfg + " --out " + (root / "b").string());
  bool same = a == 0 && b == 0 && fs::exists(root / "a/report.json") &&
              without_timestamp(root / "a/report.json") == without_timestamp(root / "b/report.json");
  std::size_t csvs = 0;
  if (same) {
    for (const auto& e : fs::directory_iterator(root / "a/profiles")) {
      ++csvs;
      same = same && slurp(e.path()) == slurp(root / "b/profiles" / e.path().filename());
    }
  }
  const int fail = run_cli("boundary-witness -D 10 --f \"w2^2\" --out " + (root / "f").string());
  const int unknown = run_cli("suite --config " + bad_cfg + " --out " + (root / "u").string());
  const int spec_err = run_cli("dims --spec " + bad_spec + " --out " + (root / "s").string());
  const int bad_sub = run_cli("frobnicate --out " + (root / "x").string());
  const bool no_files = !fs::exists(root / "u") && !fs::exists(root / "s") && !fs::exists(root / "x");

  out.pass = same && csvs > 0 && fail == 1 && unknown == 2 && spec_err == 2 && bad_sub == 2 && no_files;
  out.summary = "repeat runs " + std::string(same ? "identical" : "differ") + " (report + " +
                std::to_string(csvs) + " CSV); exit codes pass/fail/unknown/bad-spec/bad-cmd = " +
                std::to_string(a) + "/" + std::to_string(fail) + "/" + std::to_string(unknown) + "/" +
                std::to_string(spec_err) + "/" + std::to_string(bad_sub) +
                (no_files ? "; no files on input error" : "; files written on input error");
  fs::remove_all(root);
  return out;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "trace formula", trace_formula},
      {2, "vanishing trace", vanishing_trace},
      {3, "shift coefficients", shift_coefficients},
      {4, "zero blocks", zero_blocks},
      {5, "quotient Hilbert function", hilbert_function},
      {6, "isometry plus (1,inf)", isometry_structure},
      {7, "module map", module_map},
      {8, "asymptotic orthogonality", asymptotic_orthogonality},
      {9, "non-normality contrast", nonnormality_contrast},
      {10, "boundary witness", boundary_witness_criterion},
      {11, "essential-spectrum probe", spectrum_probe_criterion},
      {12, "CLI determinism and exit codes", cli_contract},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: qml_acceptance [--criterion N]\n";
      return 2;
    }
  }
  bool all_pass = true;
  bool matched = false;
  for (const auto& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    matched = true;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what(), {}};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  C" << std::setw(2) << std::left << c.id << " "
              << c.name << ": " << o.summary << " [" << fmt(seconds_since(t0), 2) << "s]\n";
    for (const auto& n : o.notes) std::cout << "        " << n << "\n";
    std::cout.flush();
  }
  if (!matched) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
