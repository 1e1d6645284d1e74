#include "qml/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>

#include "qml/expr.hpp"

namespace qml {

namespace {

// ------------------------------------------------------------ json helpers

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw InputError(path.empty() ? what : path + ": " + what);
}

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, "missing field \"" + key + "\"");
  return *it;
}

void only_keys(const Json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) schema_error(path, "unknown field \"" + it.key() + "\"");
  }
}

int as_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) schema_error(path, "expected an integer");
  return v.get<int>();
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

const Json& as_array(const Json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array");
  return v;
}

const Json& as_object(const Json& v, const std::string& path) {
  if (!v.is_object()) schema_error(path, "expected an object");
  return v;
}

Json complex_json(Complex c) { return Json{{"re", c.real()}, {"im", c.imag()}}; }

Complex parse_complex(const Json& v, const std::string& path) {
  as_object(v, path);
  only_keys(v, {"re", "im"}, path);
  const double re = as_number(require(v, "re", path), path + ".re");
  const double im = v.contains("im") ? as_number(v["im"], path + ".im") : 0.0;
  return {re, im};
}

GeneratorSpec generator_from(const HPoly& p) {
  GeneratorSpec g;
  for (const auto& [alpha, c] : p.terms()) {
    g.coefficients.push_back({c.real(), c.imag(),
                              std::vector<int>(alpha.exponents().begin(), alpha.exponents().end())});
  }
  return g;
}

ComponentSpec expand_preset(const PresetSpec& preset, int d) {
  const ThetaDirection theta(preset.theta);
  const GradedIdeal ideal = preset.kind == "j_theta" ? j_theta(theta) : j_theta_power(theta, preset.power);
  ComponentSpec c;
  c.name = "preset:" + preset.kind;
  c.assumed = preset.kind == "j_theta" ? "prime" : "primary";
  for (const auto& g : ideal.generators()) {
    if (g.dim() != d) throw InputError("presets: dimension mismatch");
    c.generators.push_back(generator_from(g));
  }
  return c;
}

// --------------------------------------------------------------- formatting

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  }
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// ------------------------------------------------------------ experiments

struct Context {
  const RunConfig& config;
  const std::optional<IdealSpec>& spec;

  const Json& params() const { return config.params; }

  template <class T>
  T param(const char* key, T fallback) const {
    auto it = config.params.find(key);
    if (it == config.params.end() || it->is_null()) return fallback;
    try {
      return it->template get<T>();
    } catch (const std::exception&) {
      throw InputError(std::string("params.") + key + ": wrong type");
    }
  }

  double tol(const std::string& claim, double fallback) const {
    auto it = config.tolerances.find(claim);
    return it == config.tolerances.end() ? fallback : it->second;
  }

  int dim() const {
    if (spec) return spec->d;
    return param<int>("dim", 3);
  }

  // (d, N) of J^N with theta = (1,..,1)
  std::pair<int, int> j_power(const std::string& experiment) const {
    if (params().contains("dim") || params().contains("power") || !spec) {
      const int d = param<int>("dim", spec ? spec->d : 3);
      const int n = param<int>("power", 2);
      if (d < 2) throw InputError("params.dim: d must be >= 2");
      if (n < 1) throw InputError("params.power: N must be >= 1");
      return {d, n};
    }
    if (!spec->presets || !spec->components.empty()) {
      throw InputError(experiment + ": needs a j_theta / j_theta_power preset or --dim/--power");
    }
    for (Complex t : spec->presets->theta) {
      if (std::abs(t - Complex(1.0, 0.0)) > kUnitTol) {
        throw InputError(experiment + ": requires theta = (1,...,1)");
      }
    }
    return {spec->d, spec->presets->kind == "j_theta" ? 1 : spec->presets->power};
  }

  GradedIdeal ideal() const {
    if (spec) return build_ideal(*spec);
    const auto [d, n] = j_power("ideal");
    return j_theta_power(ThetaDirection::ones(d), n);
  }

  std::vector<GradedIdeal> components() const {
    if (spec) return build_components(*spec);
    return {ideal()};
  }

  GradedPoly poly(const char* key, const char* fallback) const {
    return parse_polynomial(param<std::string>(key, fallback), dim());
  }

  HPoly homogeneous(const char* key, const char* fallback) const {
    const GradedPoly p = poly(key, fallback);
    auto h = p.homogeneous();
    if (!h || h->is_zero()) throw InputError(std::string("params.") + key + ": must be a non-zero homogeneous polynomial");
    return *h;
  }

  ThetaDirection theta(const std::string& text, int d) const {
    std::vector<Complex> vals;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t comma = text.find(',', start);
      const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const GradedPoly c = parse_polynomial(item, 1);
      auto h = c.homogeneous();
      if (!h || (!h->is_zero() && *h->degree() != 0)) throw InputError("theta entry \"" + item + "\" is not a constant");
      vals.push_back(h->is_zero() ? Complex{} : h->terms().begin()->second);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (static_cast<int>(vals.size()) != d && d > 0) {
      throw InputError("theta \"" + text + "\" has " + std::to_string(vals.size()) +
                       " entries, expected " + std::to_string(d));
    }
    return ThetaDirection(std::move(vals));
  }
};

std::vector<VerificationReport> run_experiment(const std::string& name, const Context& ctx) {
  const int D = ctx.config.max_degree;
  std::vector<VerificationReport> out;
  if (name == "dims") {
    std::optional<int> stable;
    int from = 0;
    if (!ctx.spec || (ctx.spec->presets && ctx.spec->components.empty())) {
      const int d = ctx.dim();
      int n = ctx.spec ? (ctx.spec->presets->kind == "j_theta" ? 1 : ctx.spec->presets->power)
                       : ctx.param<int>("power", 2);
      if (!ctx.spec) n = ctx.j_power(name).second;
      stable = static_cast<int>(monomial_count(d, n - 1));
      from = n - 1;
    }
    out.push_back(dims_report(ctx.ideal(), D, stable, from));
  } else if (name == "compress") {
    out.push_back(compress_report(ctx.ideal(), ctx.poly("poly", "z1"), D));
  } else if (name == "commutator") {
    const int d = ctx.dim();
    const int i = ctx.param<int>("i", 1);
    const int j = ctx.param<int>("j", 1);
    if (i < 1 || i > d || j < 1 || j > d) throw InputError("params.i/j: coordinate outside 1..d");
    out.push_back(commutator_report(ctx.ideal(), i - 1, j - 1, D));
  } else if (name == "trace-formula") {
    const auto [d, n] = ctx.j_power(name);
    const HPoly f1 = parse_polynomial(ctx.param<std::string>("f1", "z1"), d).homogeneous().value_or(HPoly(d));
    const HPoly f2 = parse_polynomial(ctx.param<std::string>("f2", "z1"), d).homogeneous().value_or(HPoly(d));
    if (f1.is_zero() || f2.is_zero()) throw InputError("params.f1/f2: must be non-zero homogeneous");
    out.push_back(verify_trace_formula(d, n, f1, f2, D, ctx.tol("trace-formula", 1e-6)));
  } else if (name == "shift-coeffs") {
    const auto [d, n] = ctx.j_power(name);
    if (n < 2) throw InputError("shift-coeffs: needs N >= 2");
    out.push_back(verify_shift_coefficients_all(d, n, ctx.param<int>("k_max", 60),
                                                ctx.tol("shift-coeffs", 1e-8)));
    for (int m = 1; m < n; ++m) {
      for (int k = 0; k < m; ++k) {
        auto rep = verify_shift_decay(d, m, k, ctx.param<int>("decay_k_min", 20),
                                      ctx.param<int>("decay_k_max", 200));
        rep.claim = "shift-decay[m=" + std::to_string(m) + ",n=" + std::to_string(k) + "]";
        out.push_back(std::move(rep));
      }
    }
  } else if (name == "zero-blocks") {
    const auto [d, n] = ctx.j_power(name);
    for (int i = 0; i < d; ++i) {
      auto rep = verify_zero_blocks(d, n, i, D, ctx.tol("zero-blocks", 1e-9));
      rep.claim = "zero-blocks[i=" + std::to_string(i + 1) + "]";
      out.push_back(std::move(rep));
    }
  } else if (name == "module-map") {
    const auto [d, n] = ctx.j_power(name);
    out.push_back(verify_rg_module_map(d, n, ctx.param<int>("samples", 50), ctx.config.seed,
                                       ctx.tol("module-map", 1e-9)));
  } else if (name == "asym-orth") {
    const int k_max = ctx.param<int>("k_max_orth", 40);
    const double tol = ctx.tol("asym-orth", 1e-12);
    std::vector<std::pair<ThetaDirection, ThetaDirection>> pairs;
    if (ctx.params().contains("theta_i") || ctx.params().contains("theta_j")) {
      const auto ti = ctx.param<std::string>("theta_i", "");
      const auto tj = ctx.param<std::string>("theta_j", "");
      const ThetaDirection a = ctx.theta(ti, 0);
      pairs.emplace_back(a, ctx.theta(tj, a.dim()));
    } else {
      pairs.emplace_back(ctx.theta("1,1,1", 3), ctx.theta("1,1,-1", 3));
      pairs.emplace_back(ctx.theta("1,1,1", 3), ctx.theta("1,i,-1", 3));
      pairs.emplace_back(ctx.theta("1,1", 2), ctx.theta("1,-1", 2));
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      auto rep = verify_asymptotic_orthogonality(pairs[p].first, pairs[p].second, k_max, tol);
      if (pairs.size() > 1) rep.claim += "[pair=" + std::to_string(p + 1) + "]";
      out.push_back(std::move(rep));
    }
  } else if (name == "nonnormal-demo") {
    out.push_back(nonnormality_demo(ctx.ideal(), D, ctx.param<double>("floor", 0.1)));
  } else if (name == "boundary-witness") {
    out.push_back(boundary_witness(ctx.components(), ctx.poly("f", "w2"), D));
  } else if (name == "spectrum-probe") {
    ProbeSettings s;
    s.tail_starts = ctx.param<std::vector<int>>("tail_starts", {2, 5, 10, 15, 20, 25});
    s.reference_start = ctx.param<int>("reference_start", 20);
    const GradedPoly t = parse_polynomial(ctx.param<std::string>("t", "1"), 1);
    auto th = t.homogeneous();
    if (!th || th->is_zero() || *th->degree() != 0) throw InputError("params.t: must be a constant");
    s.boundary_point = th->terms().begin()->second;
    if (std::abs(std::abs(s.boundary_point) - 1.0) > kUnitTol) throw InputError("params.t: |t| must be 1");
    if (ctx.spec && ctx.spec->presets) s.direction = ctx.spec->presets->theta;
    if (s.reference_start + 2 > D) throw InputError("spectrum-probe: reference_start + 2 must be <= D");
    out.push_back(spectrum_probe(ctx.ideal(), D, s));
  } else if (name == "isometry-structure") {
    const auto [d, n] = ctx.j_power(name);
    out.push_back(verify_isometry_structure(d, n, D, ctx.tol("isometry-structure", 0.95)));
  } else {
    throw InputError("unknown experiment \"" + name + "\"");
  }
  return out;
}

const std::set<std::string>& tolerance_claims() {
  static const std::set<std::string> claims = {
      "trace-formula", "shift-coeffs", "zero-blocks", "module-map", "asym-orth",
      "isometry-structure"};
  return claims;
}

}  // namespace

// ---------------------------------------------------------------- ideal spec

std::vector<ComponentSpec> IdealSpec::all_components() const {
  std::vector<ComponentSpec> out = components;
  if (preset_component) out.push_back(*preset_component);
  return out;
}

IdealSpec parse_ideal_spec(const Json& doc) {
  as_object(doc, "spec");
  only_keys(doc, {"d", "components", "presets"}, "spec");
  IdealSpec spec;
  spec.d = as_int(require(doc, "d", "spec"), "d");
  if (spec.d < 1) schema_error("d", "must be >= 1");

  if (doc.contains("components")) {
    const Json& comps = as_array(doc["components"], "components");
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const std::string cpath = "components[" + std::to_string(c) + "]";
      const Json& cj = as_object(comps[c], cpath);
      only_keys(cj, {"name", "generators", "assumed"}, cpath);
      ComponentSpec comp;
      comp.name = as_string(require(cj, "name", cpath), cpath + ".name");
      if (cj.contains("assumed")) {
        comp.assumed = as_string(cj["assumed"], cpath + ".assumed");
        if (comp.assumed != "prime" && comp.assumed != "primary" && comp.assumed != "unknown") {
          schema_error(cpath + ".assumed", "must be \"prime\", \"primary\" or \"unknown\"");
        }
      }
      const Json& gens = as_array(require(cj, "generators", cpath), cpath + ".generators");
      if (gens.empty()) schema_error(cpath + ".generators", "empty generator list");
      for (std::size_t g = 0; g < gens.size(); ++g) {
        const std::string gpath = cpath + ".generators[" + std::to_string(g) + "]";
        const std::string gname = "generator " + std::to_string(g);
        const Json& gj = as_object(gens[g], gpath);
        only_keys(gj, {"coefficients"}, gpath);
        const Json& terms = as_array(require(gj, "coefficients", gpath), gpath + ".coefficients");
        if (terms.empty()) schema_error(cpath, gname + " has no terms");
        GeneratorSpec gen;
        std::optional<int> degree;
        for (std::size_t t = 0; t < terms.size(); ++t) {
          const std::string tpath = gpath + ".coefficients[" + std::to_string(t) + "]";
          const Json& tj = as_object(terms[t], tpath);
          only_keys(tj, {"re", "im", "alpha"}, tpath);
          TermSpec term;
          term.re = as_number(require(tj, "re", tpath), tpath + ".re");
          term.im = tj.contains("im") ? as_number(tj["im"], tpath + ".im") : 0.0;
          if (!std::isfinite(term.re) || !std::isfinite(term.im)) {
            schema_error(tpath, "non-finite coefficient");
          }
          const Json& alpha = as_array(require(tj, "alpha", tpath), tpath + ".alpha");
          if (static_cast<int>(alpha.size()) != spec.d) {
            schema_error(cpath, gname + " term " + std::to_string(t) + ": alpha length " +
                                    std::to_string(alpha.size()) + " ≠ d=" +
                                    std::to_string(spec.d));
          }
          int deg = 0;
          for (std::size_t a = 0; a < alpha.size(); ++a) {
            const int e = as_int(alpha[a], tpath + ".alpha[" + std::to_string(a) + "]");
            if (e < 0) schema_error(tpath + ".alpha", "negative exponent");
            term.alpha.push_back(e);
            deg += e;
          }
          if (degree && *degree != deg) {
            schema_error(cpath, gname + " is not homogeneous (term degrees " +
                                    std::to_string(*degree) + " and " + std::to_string(deg) + ")");
          }
          degree = deg;
          gen.coefficients.push_back(std::move(term));
        }
        if (build_generator(gen, spec.d).is_zero()) schema_error(cpath, gname + " is zero");
        comp.generators.push_back(std::move(gen));
      }
      spec.components.push_back(std::move(comp));
    }
  }

  if (doc.contains("presets")) {
    const Json& pj = as_object(doc["presets"], "presets");
    only_keys(pj, {"kind", "theta", "power"}, "presets");
    PresetSpec preset;
    preset.kind = as_string(require(pj, "kind", "presets"), "presets.kind");
    if (preset.kind != "j_theta" && preset.kind != "j_theta_power") {
      schema_error("presets.kind", "must be \"j_theta\" or \"j_theta_power\"");
    }
    const Json& theta = as_array(require(pj, "theta", "presets"), "presets.theta");
    if (static_cast<int>(theta.size()) != spec.d) {
      schema_error("presets.theta", "length " + std::to_string(theta.size()) + " ≠ d=" +
                                        std::to_string(spec.d));
    }
    for (std::size_t t = 0; t < theta.size(); ++t) {
      const std::string tpath = "presets.theta[" + std::to_string(t) + "]";
      const Complex c = parse_complex(theta[t], tpath);
      if (std::abs(std::abs(c) - 1.0) > kUnitTol) schema_error(tpath, "not unimodular");
      preset.theta.push_back(c);
    }
    if (pj.contains("power")) preset.power = as_int(pj["power"], "presets.power");
    if (preset.power < 1) schema_error("presets.power", "must be >= 1");
    if (preset.kind == "j_theta" && preset.power != 1) {
      schema_error("presets.power", "j_theta takes power 1");
    }
    if (spec.d < 2) schema_error("presets", "needs d >= 2");
    spec.preset_component = expand_preset(preset, spec.d);
    spec.presets = std::move(preset);
  }

  if (spec.components.empty() && !spec.presets) {
    schema_error("spec", "needs at least one component or a preset");
  }
  return spec;
}

IdealSpec parse_ideal_spec_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("spec: malformed JSON: ") + e.what());
  }
  return parse_ideal_spec(doc);
}

Json serialize_ideal_spec(const IdealSpec& spec) {
  Json doc = Json::object();
  doc["d"] = spec.d;
  Json comps = Json::array();
  for (const auto& c : spec.components) {
    Json gens = Json::array();
    for (const auto& g : c.generators) {
      Json terms = Json::array();
      for (const auto& t : g.coefficients) {
        terms.push_back({{"re", t.re}, {"im", t.im}, {"alpha", t.alpha}});
      }
      gens.push_back({{"coefficients", terms}});
    }
    comps.push_back({{"name", c.name}, {"generators", gens}, {"assumed", c.assumed}});
  }
  doc["components"] = comps;
  if (spec.presets) {
    Json theta = Json::array();
    for (Complex c : spec.presets->theta) theta.push_back(complex_json(c));
    doc["presets"] = {{"kind", spec.presets->kind}, {"theta", theta}, {"power", spec.presets->power}};
  }
  return doc;
}

HPoly build_generator(const GeneratorSpec& gen, int dim) {
  HPoly::TermMap terms;
  for (const auto& t : gen.coefficients) terms[MultiIndex(t.alpha)] += Complex(t.re, t.im);
  return HPoly(dim, std::move(terms));
}

GradedIdeal build_component(const ComponentSpec& comp, int dim) {
  std::vector<HPoly> gens;
  for (const auto& g : comp.generators) gens.push_back(build_generator(g, dim));
  return GradedIdeal::from_generators(dim, std::move(gens), comp.name);
}

std::vector<GradedIdeal> build_components(const IdealSpec& spec) {
  std::vector<GradedIdeal> out;
  for (const auto& c : spec.all_components()) out.push_back(build_component(c, spec.d));
  return out;
}

GradedIdeal build_ideal(const IdealSpec& spec) {
  return GradedIdeal::intersection(build_components(spec), "spec");
}

// ------------------------------------------------------------------ config

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "dims",         "compress",       "commutator",       "trace-formula",
      "shift-coeffs", "zero-blocks",    "module-map",       "asym-orth",
      "nonnormal-demo", "boundary-witness", "spectrum-probe", "isometry-structure"};
  return names;
}

std::map<std::string, double> parse_tolerances(std::string_view text) {
  std::map<std::string, double> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(start, comma - start);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("--tol: expected claim=value, got \"" + std::string(item) + "\"");
    }
    const std::string claim(item.substr(0, eq));
    const std::string_view num = item.substr(eq + 1);
    double v = 0.0;
    auto res = std::from_chars(num.data(), num.data() + num.size(), v);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size() || !(v >= 0.0)) {
      throw InputError("--tol: bad value for \"" + claim + "\"");
    }
    if (!tolerance_claims().count(claim)) {
      throw InputError("--tol: unknown claim \"" + claim + "\"");
    }
    out[claim] = v;
    start = comma + 1;
  }
  return out;
}

RunConfig parse_run_config(const Json& doc) {
  as_object(doc, "config");
  only_keys(doc, {"degree", "experiments", "seed", "tol", "params", "out"}, "config");
  RunConfig cfg;
  if (doc.contains("degree")) cfg.max_degree = as_int(doc["degree"], "config.degree");
  const Json& ex = as_array(require(doc, "experiments", "config"), "config.experiments");
  for (std::size_t i = 0; i < ex.size(); ++i) {
    cfg.experiments.push_back(as_string(ex[i], "config.experiments[" + std::to_string(i) + "]"));
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) schema_error("config.seed", "expected a u64");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("tol")) {
    const Json& tol = as_object(doc["tol"], "config.tol");
    for (auto it = tol.begin(); it != tol.end(); ++it) {
      if (!tolerance_claims().count(it.key())) schema_error("config.tol", "unknown claim \"" + it.key() + "\"");
      cfg.tolerances[it.key()] = as_number(it.value(), "config.tol." + it.key());
    }
  }
  if (doc.contains("params")) cfg.params = as_object(doc["params"], "config.params");
  if (doc.contains("out")) cfg.out_dir = as_string(doc["out"], "config.out");
  return cfg;
}

// --------------------------------------------------------------------- run

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string profile_csv(const SpectralProfile& prof) {
  std::string out = "degree,index,singular_value,trusted\n";
  for (std::size_t i = 0; i < prof.degrees.size(); ++i) {
    const auto& sv = prof.singular_values[i];
    for (std::size_t j = 0; j < sv.size(); ++j) {
      out += std::to_string(prof.degrees[i]) + "," + std::to_string(j) + "," +
             format_double(sv[j]) + "," + (prof.trusted[i] ? "true" : "false") + "\n";
    }
  }
  return out;
}

RunResult run(const RunConfig& config, const std::optional<IdealSpec>& spec, bool write_files) {
  RunResult result;
  try {
    if (config.experiments.empty()) throw InputError("no experiments selected");
    const auto& names = experiment_names();
    for (const auto& e : config.experiments) {
      if (std::find(names.begin(), names.end(), e) == names.end()) {
        throw InputError("unknown experiment \"" + e + "\"");
      }
    }
    if (config.max_degree < 3) throw InputError("degree: D must be >= 3");
    for (const auto& [claim, v] : config.tolerances) {
      if (!tolerance_claims().count(claim)) throw InputError("tol: unknown claim \"" + claim + "\"");
    }
    const Context ctx{config, spec};
    for (const auto& e : config.experiments) {
      auto reps = run_experiment(e, ctx);
      for (auto& r : reps) result.reports.push_back(std::move(r));
    }
  } catch (const InputError& e) {
    result.exit_code = kExitInput;
    result.error = e.what();
    return result;
  } catch (const DomainError& e) {
    result.exit_code = kExitInput;
    result.error = e.what();
    return result;
  }

  Json doc = Json::object();
  doc["schema"] = kReportSchema;
  doc["artifact"] = {{"name", "qml"}, {"version", QML_VERSION}};
  doc["timestamp"] = config.timestamp.empty() ? utc_now() : config.timestamp;
  Json tol = Json::object();
  for (const auto& [k, v] : config.tolerances) tol[k] = v;
  doc["config"] = {{"degree", config.max_degree},
                   {"experiments", config.experiments},
                   {"seed", config.seed},
                   {"tol", tol},
                   {"params", config.params}};
  doc["spec"] = spec ? serialize_ideal_spec(*spec) : Json(nullptr);
  if (spec) {
    Json assumed = Json::array();
    for (const auto& c : spec->all_components()) {
      assumed.push_back({{"name", c.name}, {"assumed", c.assumed},
                         {"note", "assumed " + c.assumed + " per input; not verified"}});
    }
    doc["components"] = assumed;
  }

  Json reports = Json::array();
  std::vector<std::pair<std::string, std::string>> files;
  std::set<std::string> used;
  for (const auto& r : result.reports) {
    Json rj = r.to_json();
    Json paths = Json::array();
    for (const auto& p : r.profiles) {
      std::string base = sanitize(r.claim + "__" + p.name);
      std::string file = base + ".csv";
      for (int k = 2; used.count(file); ++k) file = base + "_" + std::to_string(k) + ".csv";
      used.insert(file);
      paths.push_back("profiles/" + file);
      files.emplace_back(file, profile_csv(p.profile));
    }
    rj["profiles"] = paths;
    reports.push_back(std::move(rj));
    if (!r.pass) result.failed.push_back(r.claim);
  }
  doc["reports"] = reports;
  doc["summary"] = {{"pass", result.failed.empty()},
                    {"count", result.reports.size()},
                    {"failed", result.failed}};
  result.report = doc;
  result.exit_code = result.failed.empty() ? kExitPass : kExitFail;

  if (write_files) {
    std::filesystem::create_directories(config.out_dir / "profiles");
    for (const auto& [file, text] : files) write_atomic(config.out_dir / "profiles" / file, text);
    write_atomic(config.out_dir / "report.json", doc.dump(2) + "\n");
  }
  return result;
}

}  // namespace qml
