#include "qml/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace qml {

namespace {

Json complex_json(Complex c) { return Json{{"re", c.real()}, {"im", c.imag()}}; }

Json theta_json(const ThetaDirection& t) {
  Json a = Json::array();
  for (Complex c : t.values()) a.push_back(complex_json(c));
  return a;
}

Json ideal_json(const GradedIdeal& ideal) {
  Json j = Json::object();
  j["d"] = ideal.dim();
  if (!ideal.name().empty()) j["name"] = ideal.name();
  if (ideal.is_intersection()) {
    Json comps = Json::array();
    for (const auto& c : ideal.components()) comps.push_back(ideal_json(c));
    j["intersection_of"] = comps;
  } else {
    Json gens = Json::array();
    for (const auto& g : ideal.generators()) gens.push_back(g.to_string());
    j["generators"] = gens;
  }
  return j;
}

HPoly power_of(const HPoly& p, int k) {
  HPoly r = HPoly::constant(p.dim(), 1.0);
  for (int j = 0; j < k; ++j) r = multiply(r, p);
  return r;
}

std::vector<BlockOperator> coordinate_compressions(const QuotientFrame& frame) {
  std::vector<BlockOperator> out;
  for (int i = 0; i < frame.dim(); ++i) {
    out.push_back(compress_multiplier(HPoly::variable(frame.dim(), i), frame));
  }
  return out;
}

// Row/column position of (level, index) among ShiftBasis::slots(p).
int slot_position(const std::vector<ShiftBasis::Slot>& slots, int level, int index) {
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (slots[s].level == level && slots[s].index == index) return static_cast<int>(s);
  }
  return -1;
}

// Shift-basis matrices A_i(p) = C_{p+1}^* B_i(p) C_p for p = 0..D-1, and the
// largest deviation of any C_p from unitarity.
struct ShiftMatrices {
  std::vector<std::vector<Matrix>> a;  // [i][p]
  double unitarity_defect = 0.0;
  std::vector<Matrix> coords;
};

ShiftMatrices shift_matrices(const ShiftBasis& basis, const QuotientFrame& frame) {
  ShiftMatrices out;
  const int top = frame.max_degree();
  out.coords.resize(top + 1);
  for (int p = 0; p <= top; ++p) {
    out.coords[p] = basis.coordinates(frame, p);
    const Matrix& c = out.coords[p];
    if (c.rows() != c.cols()) {
      out.unitarity_defect = std::max(out.unitarity_defect, 1.0);
      continue;
    }
    const double dev =
        (c.adjoint() * c - Matrix::Identity(c.cols(), c.cols())).cwiseAbs().maxCoeff();
    out.unitarity_defect = std::max(out.unitarity_defect, dev);
  }
  const auto shifts = coordinate_compressions(frame);
  out.a.resize(frame.dim());
  for (int i = 0; i < frame.dim(); ++i) {
    out.a[i].resize(top);
    for (int p = 0; p < top; ++p) {
      out.a[i][p] = out.coords[p + 1].adjoint() * shifts[i].block(p) * out.coords[p];
    }
  }
  return out;
}

}  // namespace

// --------------------------------------------------------------- reports

void VerificationReport::judge(double abs_err, double scale, double tol) {
  abs_error = abs_err;
  rel_error = scale > 0.0 ? abs_err / scale : abs_err;
  tolerance = tol;
  pass = std::isfinite(abs_err) && abs_err <= tol;
}

Json VerificationReport::to_json() const {
  Json j = Json::object();
  j["claim"] = claim;
  j["pass"] = pass;
  j["verdict"] = verdict;
  j["predicted"] = predicted;
  j["computed"] = computed;
  j["abs_error"] = abs_error;
  j["rel_error"] = rel_error;
  j["tolerance"] = tolerance;
  j["config"] = config;
  j["details"] = details;
  Json names = Json::array();
  for (const auto& p : profiles) names.push_back(p.name);
  j["profiles"] = names;
  return j;
}

// ------------------------------------------------------------- shift basis

ShiftBasis::ShiftBasis(int dim, int power) : dim_(dim), power_(power) {
  if (dim < 2) throw DomainError("ShiftBasis: d must be >= 2");
  if (power < 1) throw DomainError("ShiftBasis: N must be >= 1");
  const auto w = w_basis(dim);
  for (int n = 0; n < power; ++n) {
    std::vector<HPoly> level;
    for (const auto& alpha : monomial_basis(dim, n).monomials()) {
      if (alpha[0] != 0) continue;
      HPoly v = HPoly::constant(dim, 1.0);
      for (int i = 1; i < dim; ++i) v = multiply(v, power_of(w[i], alpha[i]));
      for (const auto& u : level) v -= u * hardy_inner(v, u);
      const double nv = v.norm();
      if (nv <= kNumTol) throw Error("ShiftBasis: dependent w-monomials at degree " +
                                     std::to_string(n));
      level.push_back(v * (1.0 / nv));
    }
    std::vector<HPoly> ops;
    for (const auto& g : level) ops.push_back(make_pg(g));
    levels_.push_back(std::move(level));
    diff_ops_.push_back(std::move(ops));
  }
}

const std::vector<HPoly>& ShiftBasis::level(int n) const {
  if (n < 0 || n >= power_) throw DomainError("ShiftBasis: level out of range");
  return levels_[n];
}

int ShiftBasis::size() const {
  int s = 0;
  for (const auto& l : levels_) s += static_cast<int>(l.size());
  return s;
}

Vector ShiftBasis::e_vector(int n, int index, int k, double* raw_norm) const {
  const HPoly& pg = diff_ops_.at(n).at(index);
  const auto& basis = monomial_basis(dim_, n + k);
  Vector v(basis.size());
  // v_alpha = conj(coefficient of r(p_g(d) z^alpha))
  for (int j = 0; j < basis.size(); ++j) {
    const MultiIndex& alpha = basis[j];
    Complex phi{};
    for (const auto& [gamma, c] : pg.terms()) {
      if (alpha.contains(gamma)) phi += c * alpha.falling_factorial(gamma);
    }
    v(j) = std::conj(phi);
  }
  const double nv = v.norm();
  if (raw_norm) *raw_norm = nv;
  if (nv > 0.0) v /= nv;
  return v;
}

std::vector<ShiftBasis::Slot> ShiftBasis::slots(int p) const {
  std::vector<Slot> out;
  for (int n = 0; n <= std::min(p, power_ - 1); ++n) {
    for (int idx = 0; idx < static_cast<int>(levels_[n].size()); ++idx) out.push_back({n, idx});
  }
  return out;
}

Matrix ShiftBasis::coordinates(const QuotientFrame& frame, int p) const {
  const auto s = slots(p);
  const Matrix& q = frame.basis(p);
  Matrix c(q.cols(), static_cast<Eigen::Index>(s.size()));
  for (std::size_t j = 0; j < s.size(); ++j) {
    c.col(static_cast<Eigen::Index>(j)) = q.adjoint() * e_vector(s[j].level, s[j].index, p - s[j].level);
  }
  return c;
}

double shift_coefficient_a(int dim, int m, int n, int k) {
  if (k < 0) throw DomainError("shift_coefficient_a: negative k");
  const long double top = binomial(dim + 2 * n + k - 1, dim + m + n - 2).convert_to<long double>();
  const long double b1 = binomial(dim + 2 * n + k - 1, dim + 2 * n - 1).convert_to<long double>();
  const long double b2 = binomial(dim + n + m + k, dim + 2 * m - 1).convert_to<long double>();
  return static_cast<double>(-top / std::sqrt(b1) / std::sqrt(b2));
}

double shift_coefficient_b(int dim, int m, int n, int k) {
  if (k < 1) throw DomainError("shift_coefficient_b: k must be >= 1");
  const double t1 = shift_coefficient_a(dim, m, n, k) *
                    std::sqrt(static_cast<double>(k - m + n + 1) / (dim + m + n + k));
  const double t2 = shift_coefficient_a(dim, m, n, k - 1) *
                    std::sqrt(static_cast<double>(k) / (dim + 2 * n + k - 1));
  return t1 - t2;
}

// ------------------------------------------------------------ trace formula

VerificationReport verify_trace_formula(int dim, int power, const HPoly& f1, const HPoly& f2,
                                        int max_degree, double tol) {
  if (f1.is_zero() || f2.is_zero() || *f1.degree() < 1 || *f2.degree() < 1) {
    throw DomainError("verify_trace_formula: f1, f2 must be homogeneous of degree >= 1");
  }
  const int e1 = *f1.degree();
  const int e2 = *f2.degree();
  if (max_degree < e1 + e2 + 5) {
    throw DomainError("verify_trace_formula: need D >= deg f1 + deg f2 + 5 (got D=" +
                      std::to_string(max_degree) + ")");
  }
  VerificationReport rep;
  rep.claim = "trace-formula";
  rep.config = {{"d", dim}, {"N", power}, {"D", max_degree},
                {"theta", theta_json(ThetaDirection::ones(dim))},
                {"f1", f1.to_string()}, {"f2", f2.to_string()}};

  const Complex predicted =
      static_cast<double>(binomial(dim + power - 2, dim - 1).convert_to<double>()) *
      bergman_derivative_pairing(restrict_diagonal(f2), restrict_diagonal(f1));
  rep.predicted = complex_json(predicted);

  const QuotientFrame frame = build_frame(j_theta_power(ThetaDirection::ones(dim), power),
                                          max_degree);
  const auto s1 = compress_multiplier(f1, frame);
  const auto s2 = compress_multiplier(f2, frame);
  const auto comm = commutator(s1, s2);
  const int k_end = max_degree - std::max(e1, e2) - 1;

  if (!comm.degree_preserving()) {
    // blocks move between degrees, every diagonal block is zero
    rep.computed = complex_json(0.0);
    rep.details["note"] = "commutator shifts degree; trace is zero blockwise";
    rep.judge(std::abs(predicted), std::abs(predicted), tol);
    rep.verdict = rep.pass ? "trace matches" : "trace mismatch";
    return rep;
  }

  const SpectralProfile prof = profile(comm);
  if (prof.trusted_through() < k_end) throw Error("verify_trace_formula: untrusted blocks");
  std::vector<double> re(k_end + 1), im(k_end + 1);
  for (int k = 0; k <= k_end; ++k) {
    re[k] = prof.cumulative_trace[k].real();
    im[k] = prof.cumulative_trace[k].imag();
  }
  const Complex computed(richardson_extrapolate(re, k_end), richardson_extrapolate(im, k_end));
  const Complex earlier(richardson_extrapolate(re, k_end - 5),
                        richardson_extrapolate(im, k_end - 5));
  const double tail = std::abs(computed - earlier);
  rep.computed = complex_json(computed);
  rep.details["partial_trace_raw"] = complex_json(prof.cumulative_trace[k_end]);
  rep.details["partial_trace_degree"] = k_end;
  rep.details["extrapolation"] = {{"variable", "1/(K+1)"}, {"order", 8}, {"stride", 2}};
  rep.details["tail_estimate"] = tail;
  rep.details["base_tolerance"] = tol;
  Json partial = Json::array();
  for (int k = 0; k <= k_end; ++k) partial.push_back(re[k]);
  rep.details["partial_traces_re"] = partial;
  rep.judge(std::abs(predicted - computed), std::abs(predicted), tol + tail);
  rep.verdict = rep.pass ? "trace matches" : "trace mismatch";
  rep.profiles.push_back({"trace_commutator", prof});
  return rep;
}

// ----------------------------------------------------- shift coefficients

namespace {

struct ShiftCheck {
  double max_error = 0.0;       // parity-corrected prediction
  double literal_error = 0.0;   // display as printed
  double max_value = 0.0;
  double isometry_defect = 0.0; // relative, e-vector norms
  long long count = 0;
  Json worst = Json::object();
  Json samples = Json::array();
};

void check_pair(const ShiftBasis& basis, const ShiftMatrices& mats, int m, int n, int i,
                int f_index, int g_index, int k_max, ShiftCheck& acc, bool keep_samples) {
  const int d = basis.dim();
  const HPoly& f = basis.level(m)[f_index];
  const HPoly& g = basis.level(n)[g_index];
  std::vector<int> ex(d, 0);
  ex[i] = m - n;
  const Complex overlap = hardy_inner(multiply(HPoly::monomial(MultiIndex(ex)), g), f);
  const double parity = (m + n) % 2 == 0 ? 1.0 : -1.0;
  for (int k = std::max(0, m - n - 1); k <= k_max; ++k) {
    const int p = n + k;
    if (p + 1 >= static_cast<int>(mats.coords.size())) break;
    const int col = slot_position(basis.slots(p), n, g_index);
    const int row = slot_position(basis.slots(p + 1), m, f_index);
    const Complex brute = mats.a[i][p](row, col);
    const Complex literal = overlap * shift_coefficient_a(d, m, n, k);
    const Complex corrected = parity * literal;
    const double err = std::abs(brute - corrected);
    acc.literal_error = std::max(acc.literal_error, std::abs(brute - literal));
    acc.max_value = std::max(acc.max_value, std::abs(brute));
    ++acc.count;
    if (err >= acc.max_error) {
      acc.max_error = err;
      acc.worst = {{"m", m}, {"n", n}, {"i", i + 1}, {"f", f_index}, {"g", g_index}, {"k", k},
                   {"brute", complex_json(brute)}, {"predicted", complex_json(corrected)}};
    }
    if (keep_samples) {
      acc.samples.push_back({{"k", k}, {"brute", complex_json(brute)},
                             {"predicted", complex_json(corrected)},
                             {"literal", complex_json(literal)}});
    }
  }
}

double e_vector_isometry_defect(const ShiftBasis& basis, int k_max) {
  double worst = 0.0;
  for (int n = 0; n < basis.power(); ++n) {
    const int s = basis.dim() + 2 * n - 2;
    for (int idx = 0; idx < static_cast<int>(basis.level(n).size()); ++idx) {
      for (int k = 0; k <= k_max; k += std::max(1, k_max / 8)) {
        double raw = 0.0;
        basis.e_vector(n, idx, k, &raw);
        const double expected = std::sqrt(binomial(s + k + 1, s + 1).convert_to<double>());
        worst = std::max(worst, std::abs(raw - expected) / expected);
      }
    }
  }
  return worst;
}

}  // namespace

VerificationReport verify_shift_coefficients(int dim, int power, int m, int n, int coordinate,
                                             int f_index, int g_index, int k_max, double tol) {
  if (m <= n) throw DomainError("verify_shift_coefficients: m <= n is the zero-block claim");
  if (m > power - 1 || n < 0) throw DomainError("verify_shift_coefficients: need 0 <= n < m <= N-1");
  if (coordinate < 0 || coordinate >= dim) throw DomainError("verify_shift_coefficients: bad coordinate");
  const ShiftBasis basis(dim, power);
  if (f_index < 0 || f_index >= static_cast<int>(basis.level(m).size()) || g_index < 0 ||
      g_index >= static_cast<int>(basis.level(n).size())) {
    throw DomainError("verify_shift_coefficients: basis index out of range");
  }
  const QuotientFrame frame =
      build_frame(j_theta_power(ThetaDirection::ones(dim), power), n + k_max + 1);
  const ShiftMatrices mats = shift_matrices(basis, frame);
  ShiftCheck acc;
  check_pair(basis, mats, m, n, coordinate, f_index, g_index, k_max, acc, true);

  VerificationReport rep;
  rep.claim = "shift-coeffs";
  rep.config = {{"d", dim}, {"N", power}, {"m", m}, {"n", n}, {"i", coordinate + 1},
                {"f_index", f_index}, {"g_index", g_index}, {"k_max", k_max}};
  rep.predicted = "(-1)^(m+n) <z_i^(m-n) g, f> a_{m,n}(k)";
  rep.computed = acc.samples;
  rep.details["literal_max_error"] = acc.literal_error;
  rep.details["literal_pass"] = acc.literal_error <= tol;
  rep.details["frame_unitarity_defect"] = mats.unitarity_defect;
  rep.details["worst"] = acc.worst;
  rep.judge(acc.max_error, acc.max_value, tol);
  rep.verdict = rep.pass ? "matrix elements match" : "matrix elements differ";
  return rep;
}

VerificationReport verify_shift_coefficients_all(int dim, int power, int k_max, double tol) {
  if (power < 2) throw DomainError("verify_shift_coefficients_all: need N >= 2");
  const ShiftBasis basis(dim, power);
  const QuotientFrame frame =
      build_frame(j_theta_power(ThetaDirection::ones(dim), power), power - 2 + k_max + 1);
  const ShiftMatrices mats = shift_matrices(basis, frame);
  ShiftCheck acc;
  for (int m = 1; m < power; ++m) {
    for (int n = 0; n < m; ++n) {
      for (int i = 0; i < dim; ++i) {
        for (int f = 0; f < static_cast<int>(basis.level(m).size()); ++f) {
          for (int g = 0; g < static_cast<int>(basis.level(n).size()); ++g) {
            check_pair(basis, mats, m, n, i, f, g, k_max, acc, false);
          }
        }
      }
    }
  }
  acc.isometry_defect = e_vector_isometry_defect(basis, k_max);

  VerificationReport rep;
  rep.claim = "shift-coeffs";
  rep.config = {{"d", dim}, {"N", power}, {"k_max", k_max}};
  rep.predicted = "(-1)^(m+n) <z_i^(m-n) g, f> a_{m,n}(k)";
  rep.computed = {{"max_error", acc.max_error}, {"elements", acc.count}};
  rep.details["literal_max_error"] = acc.literal_error;
  rep.details["literal_pass"] = acc.literal_error <= tol;
  rep.details["frame_unitarity_defect"] = mats.unitarity_defect;
  rep.details["e_vector_norm_defect"] = acc.isometry_defect;
  rep.details["worst"] = acc.worst;
  rep.judge(acc.max_error, acc.max_value, tol);
  rep.verdict = rep.pass ? "matrix elements match" : "matrix elements differ";
  return rep;
}

VerificationReport verify_shift_decay(int dim, int m, int n, int k_min, int k_max) {
  std::map<int, double> a, b;
  for (int k = k_min; k <= k_max; ++k) {
    a[k] = std::abs(shift_coefficient_a(dim, m, n, k));
    b[k] = std::abs(shift_coefficient_b(dim, m, n, k));
  }
  const DecayFit fa = fit_decay(a, k_min, k_max);
  const DecayFit fb = fit_decay(b, k_min, k_max);
  VerificationReport rep;
  rep.claim = "shift-decay";
  rep.config = {{"d", dim}, {"m", m}, {"n", n}, {"k_min", k_min}, {"k_max", k_max}};
  rep.predicted = {{"a_exponent", 1.0}, {"b_exponent", 2.0}};
  rep.computed = {{"a_exponent", fa.exponent}, {"b_exponent", fb.exponent}};
  rep.details["a_r_squared"] = fa.r_squared;
  rep.details["b_r_squared"] = fb.r_squared;
  bool sign_ok = true;
  for (int k = 0; k <= k_max; ++k) sign_ok = sign_ok && shift_coefficient_a(dim, m, n, k) < 0.0;
  rep.details["a_negative"] = sign_ok;
  const double err = std::max(std::abs(fa.exponent - 1.0), std::abs(fb.exponent - 2.0));
  rep.judge(err, 1.0, 0.1);
  rep.pass = std::abs(fa.exponent - 1.0) <= 0.1 && std::abs(fb.exponent - 2.0) <= 0.2 && sign_ok;
  rep.tolerance = 0.1;
  rep.details["tolerance_b"] = 0.2;
  rep.verdict = rep.pass ? "decay rates match" : "decay rates differ";
  return rep;
}

// ------------------------------------------------------------ zero blocks

VerificationReport verify_zero_blocks(int dim, int power, int coordinate, int max_degree,
                                      double tol) {
  if (coordinate < 0 || coordinate >= dim) throw DomainError("verify_zero_blocks: bad coordinate");
  VerificationReport rep;
  rep.claim = "zero-blocks";
  rep.config = {{"d", dim}, {"N", power}, {"i", coordinate + 1}, {"D", max_degree}};
  rep.predicted = 0.0;
  if (power < 2) {
    rep.computed = 0.0;
    rep.judge(0.0, 1.0, tol);
    rep.verdict = "vacuous: single basis element";
    return rep;
  }
  const ShiftBasis basis(dim, power);
  const QuotientFrame frame =
      build_frame(j_theta_power(ThetaDirection::ones(dim), power), max_degree);
  const ShiftMatrices mats = shift_matrices(basis, frame);
  double worst = 0.0;
  Json where = Json::object();
  long long pairs = 0;
  for (int p = 0; p < max_degree; ++p) {
    const auto cols = basis.slots(p);
    const auto rows = basis.slots(p + 1);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const int m = rows[r].level;
        const int n = cols[c].level;
        if (m > n || (m == n && rows[r].index == cols[c].index)) continue;
        ++pairs;
        const double v = std::abs(mats.a[coordinate][p](r, c));
        if (v >= worst) {
          worst = v;
          where = {{"degree", p}, {"m", m}, {"f", rows[r].index}, {"n", n}, {"g", cols[c].index}};
        }
      }
    }
  }
  rep.computed = worst;
  rep.details["elements"] = pairs;
  rep.details["worst"] = where;
  rep.details["frame_unitarity_defect"] = mats.unitarity_defect;
  rep.judge(worst, 1.0, tol);
  rep.verdict = rep.pass ? "cross blocks vanish" : "non-zero cross block";
  return rep;
}

// ------------------------------------------------------------- module map

VerificationReport verify_rg_module_map(int dim, int power, int samples, std::uint64_t seed,
                                        double tol) {
  const ShiftBasis basis(dim, power);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto rand_c = [&] { return Complex(normal(rng), normal(rng)); };

  double worst = 0.0, scale = 0.0;
  Json cases = Json::array();
  for (int s = 0; s < samples; ++s) {
    const int n = pick(0, power - 1);
    const int gi = pick(0, static_cast<int>(basis.level(n).size()) - 1);
    const HPoly pg = make_pg(basis.level(n)[gi]);

    const int fdeg = pick(0, 3);
    HPoly::TermMap fterms;
    for (const auto& alpha : monomial_basis(dim, fdeg).monomials()) fterms[alpha] = rand_c();
    const HPoly f(dim, std::move(fterms));

    const int terms = pick(1, 4);
    UniPoly lhs, rg_h;
    for (int t = 0; t < terms; ++t) {
      const int k = pick(0, 5);
      const Complex c = rand_c();
      const HPoly h = from_vector(dim, n + k, basis.e_vector(n, gi, k)) * c;
      lhs += restrict_diagonal(apply_diff(pg, multiply(f, h)));
      rg_h += restrict_diagonal(apply_diff(pg, h));
    }
    const UniPoly rhs = restrict_diagonal(f) * rg_h;
    const double err = lhs.max_distance(rhs);
    for (Complex c : rhs.coefficients()) scale = std::max(scale, std::abs(c));
    worst = std::max(worst, err);
    cases.push_back({{"level", n}, {"g", gi}, {"deg_f", fdeg}, {"terms", terms}, {"error", err}});
  }
  VerificationReport rep;
  rep.claim = "module-map";
  rep.config = {{"d", dim}, {"N", power}, {"samples", samples}, {"seed", seed}};
  rep.predicted = "r_g(f h) = r(f) r_g(h)";
  rep.computed = worst;
  rep.details["cases"] = cases;
  rep.judge(worst, scale, tol);
  rep.verdict = rep.pass ? "module map identity holds" : "module map identity fails";
  return rep;
}

// ------------------------------------------------- asymptotic orthogonality

VerificationReport verify_asymptotic_orthogonality(const ThetaDirection& theta_i,
                                                   const ThetaDirection& theta_j, int k_max,
                                                   double tol) {
  const int d = theta_i.dim();
  if (theta_j.dim() != d) throw DomainError("verify_asymptotic_orthogonality: dimension mismatch");
  const Complex tji = theta_j.inner(theta_i);
  if (std::abs(std::abs(tji) - d) <= kNumTol) {
    throw DomainError("verify_asymptotic_orthogonality: identical lines (ratio is constant 1)");
  }
  // With u_l = conj(theta_i,l) theta_j,l and multinomials c_alpha = k!/alpha!:
  //   <g_i^k, g_j^k> = sum_alpha c_alpha^2 u^alpha,  ||g^k||^2 = sum_alpha c_alpha^2,
  //   <g_i^k, K_k(theta_j)> = sum_alpha c_alpha u^alpha.
  // The sums cancel from ~d^k down to O(1), so they run in 100-digit floats.
  using Wide = boost::multiprecision::cpp_bin_float_100;
  auto big_factorial = [](int n) {
    BigInt f = 1;
    for (int m = 2; m <= n; ++m) f *= m;
    return f;
  };
  struct WideComplex {
    Wide re, im;
  };
  auto mul = [](const WideComplex& a, const WideComplex& b) {
    return WideComplex{a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  };
  std::vector<WideComplex> u(d);
  for (int l = 0; l < d; ++l) {
    const Complex v = std::conj(theta_i[l]) * theta_j[l];
    u[l] = {Wide(v.real()), Wide(v.imag())};
  }
  Complex tpow = 1.0;
  double worst = 0.0, exact_worst = 0.0;
  Json rows = Json::array();
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) tpow *= tji;
    WideComplex brute_w{0, 0}, mixed_w{0, 0};
    Wide norm_sq = 0;
    const BigInt k_fact = big_factorial(k);
    for (const auto& alpha : monomial_basis(d, k).monomials()) {
      BigInt denom = 1;
      for (int l = 0; l < d; ++l) denom *= big_factorial(alpha[l]);
      const Wide c(BigInt(k_fact / denom));
      WideComplex power{1, 0};
      for (int l = 0; l < d; ++l) {
        for (int j = 0; j < alpha[l]; ++j) power = mul(power, u[l]);
      }
      brute_w.re += c * c * power.re;
      brute_w.im += c * c * power.im;
      mixed_w.re += c * power.re;
      mixed_w.im += c * power.im;
      norm_sq += c * c;
    }
    const Complex brute(brute_w.re.convert_to<double>(), brute_w.im.convert_to<double>());
    const Complex mixed(mixed_w.re.convert_to<double>(), mixed_w.im.convert_to<double>());
    const Complex predicted = tpow / binomial(k + d - 1, d - 1).convert_to<double>();
    const double scale = std::max({1.0, std::abs(brute), std::abs(predicted)});
    const double err = std::abs(brute - predicted) / scale;
    worst = std::max(worst, err);

    const double exact_err = std::abs(mixed - tpow) / std::max(1.0, std::abs(tpow));
    exact_worst = std::max(exact_worst, exact_err);

    const double ratio = std::abs(brute) / norm_sq.convert_to<double>();
    rows.push_back({{"k", k}, {"brute", complex_json(brute)},
                    {"predicted", complex_json(predicted)}, {"rel_error", err},
                    {"kernel_pairing", complex_json(mixed)},
                    {"normalized_ratio", ratio},
                    {"rate", std::pow(std::abs(tji) / d, k)}});
  }
  VerificationReport rep;
  rep.claim = "asym-orth";
  rep.config = {{"d", d}, {"theta_i", theta_json(theta_i)}, {"theta_j", theta_json(theta_j)},
                {"k_max", k_max}};
  rep.predicted = "C(k+d-1,d-1)^-1 <theta_j,theta_i>^k";
  rep.computed = {{"max_rel_error", worst}};
  rep.details["rows"] = rows;
  rep.details["kernel_identity"] = "<g_i^k, K_k(theta_j)> = <theta_j,theta_i>^k";
  rep.details["kernel_identity_max_error"] = exact_worst;
  rep.details["kernel_identity_pass"] = exact_worst <= tol;
  rep.judge(worst, 1.0, tol);
  rep.verdict = rep.pass ? "closed form holds" : "closed form differs from brute force";
  return rep;
}

// -------------------------------------------------------- isometry structure

VerificationReport verify_isometry_structure(int dim, int power, int max_degree,
                                             double min_quality) {
  const ShiftBasis basis(dim, power);
  const QuotientFrame frame =
      build_frame(j_theta_power(ThetaDirection::ones(dim), power), max_degree);
  const ShiftMatrices mats = shift_matrices(basis, frame);
  const auto shifts = coordinate_compressions(frame);
  const int k_lo = 5;
  const int k_hi = max_degree - 2;
  if (k_hi <= k_lo) throw DomainError("verify_isometry_structure: D too small");
  std::map<int, double> defect, iso;
  for (int p = k_lo; p <= k_hi; ++p) {
    const auto from = basis.slots(p);
    const auto to = basis.slots(p + 1);
    Matrix j = Matrix::Zero(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()));
    for (std::size_t c = 0; c < from.size(); ++c) {
      j(slot_position(to, from[c].level, from[c].index), static_cast<Eigen::Index>(c)) = 1.0;
    }
    const Matrix s = mats.coords[p + 1] * j * mats.coords[p].adjoint();
    double worst = 0.0, worst_iso = 0.0;
    for (int i = 0; i < dim; ++i) {
      const Matrix& b = shifts[i].block(p);
      worst = std::max(worst, spectral_norm(s - b));
      worst_iso = std::max(worst_iso, spectral_norm(b.adjoint() * b -
                                                    Matrix::Identity(b.cols(), b.cols())));
    }
    defect[p] = worst;
    iso[p] = worst_iso;
  }
  const InverseFit fit = fit_inverse(defect, k_lo, k_hi);
  VerificationReport rep;
  rep.claim = "isometry-structure";
  rep.config = {{"d", dim}, {"N", power}, {"D", max_degree}, {"k_min", k_lo}, {"k_max", k_hi}};
  rep.predicted = "||S - S_{z_i}|| on degree k <= c/(k+1)";
  rep.computed = {{"c", fit.envelope}, {"c_least_squares", fit.constant},
                  {"fit_quality", fit.r_squared}};
  Json seq = Json::array();
  for (const auto& [k, v] : defect) seq.push_back({{"k", k}, {"norm", v}, {"isometry_defect", iso[k]}});
  rep.details["sequence"] = seq;
  if (k_hi - 10 > 10) {
    const DecayFit f = fit_decay(iso, 10, k_hi);
    rep.details["isometry_defect_exponent"] = f.exponent;
  }
  rep.details["frame_unitarity_defect"] = mats.unitarity_defect;
  rep.abs_error = std::max(0.0, min_quality - fit.r_squared);
  rep.tolerance = min_quality;
  rep.pass = fit.r_squared >= min_quality;
  rep.verdict = rep.pass ? "compact perturbation of a shift with 1/(k+1) decay"
                         : "decay does not fit c/(k+1)";
  return rep;
}

// ------------------------------------------------------- non-normality demo

VerificationReport nonnormality_demo(const GradedIdeal& ideal, int max_degree, double floor) {
  const QuotientFrame frame = build_frame(ideal, max_degree);
  VerificationReport rep;
  rep.claim = "nonnormal-demo";
  rep.config = {{"ideal", ideal_json(ideal)}, {"D", max_degree}, {"floor", floor}};
  rep.predicted = "block norms of [S_1^*, S_1] bounded below";

  const auto dims = frame.dims();
  if (std::find(dims.begin() + 1, dims.end(), 0) != dims.end()) {
    rep.computed = nullptr;
    rep.pass = false;
    rep.verdict = "not applicable: finite-dimensional quotient";
    return rep;
  }
  const BlockOperator comm = commutator_blocks(0, 0, frame);
  const SpectralProfile prof = profile(comm);
  const int through = prof.trusted_through();
  double min_norm = std::numeric_limits<double>::infinity();
  double max_scaled = 0.0;
  Json norms = Json::array();
  for (int k = 0; k <= through; ++k) {
    const double v = prof.singular_values[k].empty() ? 0.0 : prof.singular_values[k][0];
    norms.push_back(v);
    min_norm = std::min(min_norm, v);
    if (k >= 1) max_scaled = std::max(max_scaled, k * v);
  }
  // cumulative singular-value sums against log: ratio must keep growing
  bool growing = true;
  const SchattenIndicator ind = schatten_1inf_indicator(prof);
  for (std::size_t r = ind.table.size() / 2 + 1; r < ind.table.size(); ++r) {
    growing = growing && ind.table[r].ratio > ind.table[r - 1].ratio;
  }
  rep.computed = {{"min_block_norm", min_norm}, {"max_k_times_norm", max_scaled}};
  rep.details["block_norms"] = norms;
  rep.details["indicator_growing_top_half"] = growing;
  rep.details["indicator_final"] = ind.table.empty() ? 0.0 : ind.table.back().ratio;
  rep.tolerance = floor;
  rep.abs_error = std::max(0.0, floor - min_norm);
  rep.pass = min_norm >= floor && growing;
  rep.verdict = rep.pass ? "divergence evidence" : "no divergence evidence (norms decay)";
  rep.profiles.push_back({"commutator_z1", prof});
  return rep;
}

// -------------------------------------------------------- boundary witness

VerificationReport boundary_witness(const std::vector<GradedIdeal>& components,
                                    const GradedPoly& f, int max_degree) {
  if (components.empty()) throw DomainError("boundary_witness: no components");
  const GradedIdeal ideal = GradedIdeal::intersection(components);
  VerificationReport rep;
  rep.claim = "boundary-witness";
  Json comps = Json::array();
  for (const auto& c : components) comps.push_back(ideal_json(c));
  Json fparts = Json::array();
  for (const auto& [deg, part] : f.parts()) fparts.push_back(part.to_string());
  rep.config = {{"components", comps}, {"f", fparts}, {"D", max_degree}};
  rep.predicted = "||S_f|| > 0 with block norms decaying to 0";

  bool in_ideal = true;
  for (const auto& [deg, part] : f.parts()) in_ideal = in_ideal && membership(part, ideal).member;
  if (in_ideal) {
    rep.computed = {{"norm", 0.0}};
    rep.pass = false;
    rep.verdict = "witness fails: S_f = 0";
    return rep;
  }
  const QuotientFrame frame = build_frame(ideal, max_degree);
  const OperatorSum sf = compress_general(f, frame);
  const double norm = sf.norm();
  const auto cols = sf.column_norms();
  const int top = cols.empty() ? -1 : cols.rbegin()->first;
  const int quarter = (top + 1) / 4;
  const int q_start = top - std::max(quarter, 1) + 1;
  bool monotone = true, small = true;
  double last_max = 0.0;
  Json seq = Json::array();
  for (const auto& [n, v] : cols) {
    seq.push_back(v);
    if (n < q_start) continue;
    last_max = std::max(last_max, v);
    small = small && v <= 0.1 * norm;
    if (n > q_start) monotone = monotone && v <= cols.at(n - 1);
  }
  rep.computed = {{"norm", norm}, {"last_quartile_max", last_max}};
  rep.details["block_norms"] = seq;
  rep.details["last_quartile_start"] = q_start;
  rep.details["monotone"] = monotone;
  rep.details["threshold"] = 0.1 * norm;
  rep.tolerance = 0.1 * norm;
  rep.abs_error = last_max;
  rep.rel_error = norm > 0.0 ? last_max / norm : 0.0;
  rep.pass = norm >= 1e-3 && monotone && small;
  if (rep.pass) {
    rep.verdict = "compact-consistent non-zero witness";
  } else if (norm < 1e-3) {
    rep.verdict = "witness fails: S_f = 0";
  } else {
    rep.verdict = "no witness at this truncation: last-quartile block norms exceed 0.1*||S_f||";
  }
  for (const auto& [shift, op] : sf.parts()) {
    rep.profiles.push_back({"S_f_shift" + std::to_string(shift), profile(op)});
  }
  return rep;
}

// ------------------------------------------------------------ spectrum probe

VerificationReport spectrum_probe(const GradedIdeal& ideal, int max_degree,
                                  const ProbeSettings& settings) {
  const int d = ideal.dim();
  const QuotientFrame frame = build_frame(ideal, max_degree);
  const auto shifts = coordinate_compressions(frame);
  std::vector<int> starts;
  for (int s : settings.tail_starts) {
    if (s + 2 <= max_degree) starts.push_back(s);
  }
  if (starts.empty()) throw DomainError("spectrum_probe: no admissible tail_start");
  if (settings.reference_start + 2 > max_degree) {
    throw DomainError("spectrum_probe: reference tail_start + 2 exceeds D");
  }
  std::vector<Complex> boundary(d, settings.boundary_point);
  if (!settings.direction.empty()) {
    if (static_cast<int>(settings.direction.size()) != d) {
      throw DomainError("spectrum_probe: direction has wrong dimension");
    }
    for (int l = 0; l < d; ++l) boundary[l] = settings.direction[l] * settings.boundary_point;
  }
  const std::vector<Complex> origin(d, 0.0);
  std::vector<Complex> far(d, 0.0);
  far[0] = 3.0;

  Json rows = Json::array();
  std::vector<double> values;
  for (int s : starts) {
    const double vb = essential_spectrum_probe(boundary, shifts, s);
    const double v0 = essential_spectrum_probe(origin, shifts, s);
    const double vf = essential_spectrum_probe(far, shifts, s);
    values.push_back(vb);
    rows.push_back({{"tail_start", s}, {"boundary", vb}, {"origin", v0}, {"far", vf}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) decreasing = decreasing && values[i] <= values[i - 1];
  const double at_ref = essential_spectrum_probe(boundary, shifts, settings.reference_start);
  const double origin_ref = essential_spectrum_probe(origin, shifts, settings.reference_start);

  VerificationReport rep;
  rep.claim = "spectrum-probe";
  rep.config = {{"ideal", ideal_json(ideal)}, {"D", max_degree},
                {"boundary_point", complex_json(settings.boundary_point)},
                {"lambda", [&] {
                   Json a = Json::array();
                   for (Complex c : boundary) a.push_back(complex_json(c));
                   return a;
                 }()},
                {"reference_start", settings.reference_start}};
  rep.predicted = {{"boundary_at_reference_max", settings.near_threshold},
                   {"origin_min", d - settings.origin_margin}};
  rep.computed = {{"boundary_at_reference", at_ref}, {"origin_at_reference", origin_ref},
                  {"boundary_decreasing", decreasing}};
  rep.details["rows"] = rows;
  rep.tolerance = settings.near_threshold;
  rep.abs_error = at_ref;
  rep.pass = decreasing && at_ref <= settings.near_threshold &&
             origin_ref >= d - settings.origin_margin;
  rep.verdict = rep.pass ? "boundary point in essential spectrum surrogate"
                         : "probe criteria not met at this truncation";
  return rep;
}

// ----------------------------------------------------------- diagnostics

VerificationReport dims_report(const GradedIdeal& ideal, int max_degree,
                               std::optional<int> expected_stable, int stable_from) {
  const auto rows = hilbert_dims(ideal, max_degree);
  VerificationReport rep;
  rep.claim = "dims";
  rep.config = {{"ideal", ideal_json(ideal)}, {"D", max_degree}};
  Json table = Json::array();
  int mismatches = 0;
  bool complementary = true;
  for (const auto& r : rows) {
    Json row = {{"degree", r.degree}, {"ideal", r.ideal_dim}, {"quotient", r.quotient_dim}};
    if (monomial_count(ideal.dim(), r.degree) <= 1500) {
      const int direct = ideal.degree_component(r.degree).dim();
      row["ideal_direct"] = direct;
      complementary = complementary && direct == r.ideal_dim;
    }
    if (expected_stable && r.degree >= stable_from && r.quotient_dim != *expected_stable) {
      ++mismatches;
    }
    table.push_back(row);
  }
  rep.computed = table;
  rep.details["complementary"] = complementary;
  if (expected_stable) {
    rep.predicted = {{"stable_quotient_dim", *expected_stable}, {"from_degree", stable_from}};
  } else {
    rep.predicted = nullptr;
  }
  rep.abs_error = mismatches;
  rep.pass = complementary && mismatches == 0;
  rep.verdict = rep.pass ? "dimensions consistent" : "dimension mismatch";
  return rep;
}

VerificationReport compress_report(const GradedIdeal& ideal, const GradedPoly& p, int max_degree) {
  const QuotientFrame frame = build_frame(ideal, max_degree);
  const OperatorSum op = compress_general(p, frame);
  VerificationReport rep;
  rep.claim = "compress";
  Json parts = Json::array();
  for (const auto& [deg, part] : p.parts()) parts.push_back(part.to_string());
  rep.config = {{"ideal", ideal_json(ideal)}, {"D", max_degree}, {"p", parts}};
  rep.predicted = nullptr;
  double smax = 0.0;
  for (const auto& [shift, part] : op.parts()) {
    auto prof = profile(part);
    for (const auto& sv : prof.singular_values) {
      if (!sv.empty()) smax = std::max(smax, sv[0]);
    }
    rep.profiles.push_back({"S_p_shift" + std::to_string(shift), std::move(prof)});
  }
  rep.computed = {{"norm", op.norm()}, {"max_block_singular_value", smax}};
  Json dims = Json::array();
  for (int v : frame.dims()) dims.push_back(v);
  rep.details["frame_dims"] = dims;
  rep.pass = true;
  rep.verdict = "compressed";
  return rep;
}

VerificationReport commutator_report(const GradedIdeal& ideal, int i, int j, int max_degree) {
  const QuotientFrame frame = build_frame(ideal, max_degree);
  const BlockOperator comm = commutator_blocks(i, j, frame);
  const SpectralProfile prof = profile(comm);
  const SchattenIndicator ind = schatten_1inf_indicator(prof);
  VerificationReport rep;
  rep.claim = "commutator";
  rep.config = {{"ideal", ideal_json(ideal)}, {"D", max_degree}, {"i", i + 1}, {"j", j + 1}};
  rep.predicted = nullptr;
  const int through = prof.trusted_through();
  Json table = Json::array();
  for (const auto& r : ind.table) {
    table.push_back({{"K", r.degree}, {"sum", r.partial_sum}, {"count", r.count}, {"ratio", r.ratio}});
  }
  rep.computed = {{"trusted_through", through},
                  {"partial_trace", through >= 0 ? complex_json(prof.cumulative_trace[through])
                                                 : complex_json(0.0)},
                  {"indicator", ind.indicator}};
  rep.details["indicator_table"] = table;
  bool bounded = true;
  if (ind.table.size() >= 4) {
    bounded = ind.table.back().ratio <= 1.1 * ind.table[ind.table.size() / 2].ratio;
  }
  rep.pass = true;
  rep.verdict = bounded ? "consistent with (1,inf) at D = " + std::to_string(max_degree)
                        : "not (1,inf)-consistent at this truncation";
  rep.profiles.push_back({"commutator_z" + std::to_string(i + 1) + "_z" + std::to_string(j + 1),
                          prof});
  return rep;
}

}  // namespace qml
