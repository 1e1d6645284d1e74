#include "qml/poly.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>

namespace qml {

namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw DomainError(std::string(what) + ": dimension mismatch (" +
                      std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

std::string format_complex(Complex c) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(12);
  if (c.imag() == 0.0) {
    os << c.real();
  } else if (c.real() == 0.0) {
    os << c.imag() << "i";
  } else {
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag())
       << "i)";
  }
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- MultiIndex

MultiIndex::MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
  if (exps_.empty()) throw DomainError("MultiIndex: dimension must be >= 1");
  for (int e : exps_) {
    if (e < 0) throw DomainError("MultiIndex: negative exponent");
    degree_ += e;
  }
}

MultiIndex MultiIndex::zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }

MultiIndex MultiIndex::unit(int dim, int i) {
  if (i < 0 || i >= dim) throw DomainError("MultiIndex::unit: coordinate out of range");
  std::vector<int> e(dim, 0);
  e[i] = 1;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  require_same_dim(dim(), other.dim(), "MultiIndex::operator+");
  std::vector<int> e(exps_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exps_[i];
  return MultiIndex(std::move(e));
}

bool MultiIndex::contains(const MultiIndex& other) const {
  require_same_dim(dim(), other.dim(), "MultiIndex::contains");
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (other.exps_[i] > exps_[i]) return false;
  }
  return true;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (!contains(other)) throw DomainError("MultiIndex::operator-: negative exponent");
  std::vector<int> e(exps_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= other.exps_[i];
  return MultiIndex(std::move(e));
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : exps_) {
    for (int j = 2; j <= e; ++j) f *= j;
  }
  return f;
}

double MultiIndex::falling_factorial(const MultiIndex& gamma) const {
  double f = 1.0;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    for (int j = 0; j < gamma.exps_[i]; ++j) f *= exps_[i] - j;
  }
  return f;
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(exps_[i]);
  }
  return s + ")";
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
  if (auto c = degree_ <=> other.degree_; c != 0) return c;
  if (auto c = dim() <=> other.dim(); c != 0) return c;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    // larger leading exponent sorts first
    if (auto c = other.exps_[i] <=> exps_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// ------------------------------------------------------------ MonomialBasis

BigInt binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int j = 1; j <= k; ++j) {
    r *= n - k + j;
    r /= j;
  }
  return r;
}

double binomial_value(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r < 9e15 ? std::round(r) : r;
}

std::int64_t monomial_count(int dim, int degree) {
  if (dim < 1 || degree < 0) return 0;
  return binomial(degree + dim - 1, dim - 1).convert_to<std::int64_t>();
}

namespace {

void enumerate(int dim, int remaining, std::vector<int>& prefix,
               std::vector<MultiIndex>& out) {
  if (static_cast<int>(prefix.size()) == dim - 1) {
    prefix.push_back(remaining);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    prefix.push_back(e);
    enumerate(dim, remaining - e, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 1) throw DomainError("MonomialBasis: dimension must be >= 1");
  if (degree < 0) throw DomainError("MonomialBasis: negative degree");
  monomials_.reserve(static_cast<std::size_t>(monomial_count(dim, degree)));
  std::vector<int> prefix;
  prefix.reserve(dim);
  enumerate(dim, degree, prefix, monomials_);
}

int MonomialBasis::index_of(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != dim_) {
    throw DomainError("MonomialBasis::index_of: dimension mismatch");
  }
  // Count the monomials that precede alpha: at each coordinate, those that
  // agree so far and carry a larger exponent here.
  std::int64_t rank = 0;
  int rem = degree_;
  for (int i = 0; i + 1 < dim_; ++i) {
    rem -= alpha[i];
    if (rem < 0) throw DomainError("MonomialBasis::index_of: degree mismatch");
    rank += monomial_count(dim_ - i, rem - 1);
  }
  if (rem != alpha[dim_ - 1]) {
    throw DomainError("MonomialBasis::index_of: degree mismatch");
  }
  return static_cast<int>(rank);
}

int MonomialBasis::index_of(const MultiIndex& alpha) const {
  return index_of(alpha.exponents());
}

const MonomialBasis& monomial_basis(int dim, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<MonomialBasis>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{dim, degree}];
  if (!slot) slot = std::make_unique<MonomialBasis>(dim, degree);
  return *slot;
}

// -------------------------------------------------------------------- HPoly

HPoly::HPoly(int dim) : dim_(dim) {
  if (dim < 1) throw DomainError("HPoly: dimension must be >= 1");
}

HPoly::HPoly(int dim, TermMap terms) : dim_(dim), terms_(std::move(terms)) {
  if (dim < 1) throw DomainError("HPoly: dimension must be >= 1");
  std::optional<int> deg;
  for (const auto& [alpha, c] : terms_) {
    if (alpha.dim() != dim_) throw DomainError("HPoly: term dimension mismatch");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw DomainError("HPoly: non-finite coefficient");
    }
    if (deg && *deg != alpha.degree()) {
      throw DomainError("HPoly: terms of different degree (" + std::to_string(*deg) +
                        " and " + std::to_string(alpha.degree()) + ")");
    }
    deg = alpha.degree();
  }
  prune();
}

HPoly HPoly::monomial(const MultiIndex& alpha, Complex c) {
  return HPoly(alpha.dim(), TermMap{{alpha, c}});
}

HPoly HPoly::constant(int dim, Complex c) { return monomial(MultiIndex::zero(dim), c); }

HPoly HPoly::variable(int dim, int i) { return monomial(MultiIndex::unit(dim, i)); }

void HPoly::prune() {
  double mx = 0.0;
  for (const auto& [alpha, c] : terms_) mx = std::max(mx, std::abs(c));
  const double cut = kCoeffTol * mx;
  std::erase_if(terms_, [cut](const auto& kv) {
    const double a = std::abs(kv.second);
    return a == 0.0 || a <= cut;
  });
  if (terms_.empty()) {
    degree_.reset();
  } else {
    degree_ = terms_.begin()->first.degree();
  }
}

Complex HPoly::coefficient(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Complex{} : it->second;
}

double HPoly::norm() const { return std::sqrt(std::abs(hardy_inner(*this, *this))); }

HPoly HPoly::operator-() const {
  HPoly r(*this);
  for (auto& [alpha, c] : r.terms_) c = -c;
  return r;
}

HPoly& HPoly::operator+=(const HPoly& other) {
  require_same_dim(dim_, other.dim_, "HPoly::operator+=");
  if (other.is_zero()) return *this;
  if (degree_ && *degree_ != *other.degree_) {
    throw DomainError("HPoly::operator+=: sum of different degrees is not homogeneous");
  }
  for (const auto& [alpha, c] : other.terms_) terms_[alpha] += c;
  prune();
  return *this;
}

HPoly& HPoly::operator-=(const HPoly& other) { return *this += -other; }

HPoly& HPoly::operator*=(Complex s) {
  for (auto& [alpha, c] : terms_) c *= s;
  prune();
  return *this;
}

Complex HPoly::evaluate(std::span<const Complex> point) const {
  if (static_cast<int>(point.size()) != dim_) {
    throw DomainError("HPoly::evaluate: point dimension mismatch");
  }
  Complex sum{};
  for (const auto& [alpha, c] : terms_) {
    Complex term = c;
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < alpha[i]; ++j) term *= point[i];
    }
    sum += term;
  }
  return sum;
}

std::vector<Complex> HPoly::coefficients_in(const MonomialBasis& basis) const {
  require_same_dim(dim_, basis.dim(), "HPoly::coefficients_in");
  std::vector<Complex> v(basis.size());
  if (is_zero()) return v;
  if (*degree_ != basis.degree()) {
    throw DomainError("HPoly::coefficients_in: degree mismatch");
  }
  for (const auto& [alpha, c] : terms_) v[basis.index_of(alpha)] = c;
  return v;
}

HPoly HPoly::from_coefficients(const MonomialBasis& basis,
                               std::span<const Complex> coeffs) {
  if (static_cast<int>(coeffs.size()) != basis.size()) {
    throw DomainError("HPoly::from_coefficients: length mismatch");
  }
  TermMap terms;
  for (int i = 0; i < basis.size(); ++i) {
    if (coeffs[i] != Complex{}) terms.emplace(basis[i], coeffs[i]);
  }
  return HPoly(basis.dim(), std::move(terms));
}

std::string HPoly::to_string() const {
  if (is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [alpha, c] : terms_) {
    if (!first) s += " + ";
    first = false;
    s += format_complex(c);
    for (int i = 0; i < dim_; ++i) {
      if (alpha[i] == 0) continue;
      s += "*z" + std::to_string(i + 1);
      if (alpha[i] > 1) s += "^" + std::to_string(alpha[i]);
    }
  }
  return s;
}

// --------------------------------------------------------------- GradedPoly

GradedPoly::GradedPoly(const HPoly& p) : dim_(p.dim()) {
  if (!p.is_zero()) parts_.emplace(*p.degree(), p);
}

std::optional<HPoly> GradedPoly::homogeneous() const {
  if (parts_.empty()) return HPoly(dim_);
  if (parts_.size() == 1) return parts_.begin()->second;
  return std::nullopt;
}

GradedPoly& GradedPoly::operator+=(const GradedPoly& other) {
  require_same_dim(dim_, other.dim_, "GradedPoly::operator+=");
  for (const auto& [deg, p] : other.parts_) {
    auto it = parts_.find(deg);
    if (it == parts_.end()) {
      parts_.emplace(deg, p);
    } else {
      it->second += p;
      if (it->second.is_zero()) parts_.erase(it);
    }
  }
  return *this;
}

GradedPoly& GradedPoly::operator*=(Complex s) {
  for (auto it = parts_.begin(); it != parts_.end();) {
    it->second *= s;
    it = it->second.is_zero() ? parts_.erase(it) : std::next(it);
  }
  return *this;
}

GradedPoly operator*(const GradedPoly& a, const GradedPoly& b) {
  require_same_dim(a.dim_, b.dim_, "GradedPoly::operator*");
  GradedPoly r(a.dim_);
  for (const auto& [da, pa] : a.parts_) {
    for (const auto& [db, pb] : b.parts_) r += GradedPoly(multiply(pa, pb));
  }
  return r;
}

GradedPoly GradedPoly::operator-() const {
  GradedPoly r(*this);
  r *= -1.0;
  return r;
}

// ------------------------------------------------------------------ UniPoly

UniPoly::UniPoly(std::vector<Complex> coefficients) : coeffs_(std::move(coefficients)) {
  trim();
}

UniPoly UniPoly::monomial(int power, Complex c) {
  if (power < 0) throw DomainError("UniPoly::monomial: negative power");
  std::vector<Complex> v(power + 1);
  v[power] = c;
  return UniPoly(std::move(v));
}

void UniPoly::trim() {
  double mx = 0.0;
  for (Complex c : coeffs_) mx = std::max(mx, std::abs(c));
  const double cut = kCoeffTol * mx;
  while (!coeffs_.empty() &&
         (coeffs_.back() == Complex{} || std::abs(coeffs_.back()) <= cut)) {
    coeffs_.pop_back();
  }
}

Complex UniPoly::coefficient(int power) const {
  if (power < 0 || power >= static_cast<int>(coeffs_.size())) return {};
  return coeffs_[power];
}

UniPoly& UniPoly::operator+=(const UniPoly& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size());
  for (std::size_t i = 0; i < other.coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  trim();
  return *this;
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Complex> v(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return UniPoly(std::move(v));
}

UniPoly& UniPoly::operator*=(Complex s) {
  for (Complex& c : coeffs_) c *= s;
  trim();
  return *this;
}

double UniPoly::max_distance(const UniPoly& other) const {
  const std::size_t n = std::max(coeffs_.size(), other.coeffs_.size());
  double mx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx = std::max(mx, std::abs(coefficient(static_cast<int>(i)) -
                               other.coefficient(static_cast<int>(i))));
  }
  return mx;
}

// ----------------------------------------------------------- ThetaDirection

ThetaDirection::ThetaDirection(std::vector<Complex> theta) : theta_(std::move(theta)) {
  if (theta_.empty()) throw InputError("theta: dimension must be >= 1");
  for (std::size_t i = 0; i < theta_.size(); ++i) {
    if (std::abs(std::abs(theta_[i]) - 1.0) > kUnitTol) {
      throw InputError("theta[" + std::to_string(i) + "]: |theta| = " +
                       std::to_string(std::abs(theta_[i])) + " is not 1");
    }
  }
}

ThetaDirection ThetaDirection::ones(int dim) {
  return ThetaDirection(std::vector<Complex>(dim, 1.0));
}

ThetaDirection ThetaDirection::conjugate() const {
  std::vector<Complex> c(theta_);
  for (Complex& x : c) x = std::conj(x);
  return ThetaDirection(std::move(c));
}

Complex ThetaDirection::inner(const ThetaDirection& other) const {
  require_same_dim(dim(), other.dim(), "ThetaDirection::inner");
  Complex s{};
  for (std::size_t i = 0; i < theta_.size(); ++i) s += theta_[i] * std::conj(other.theta_[i]);
  return s;
}

// --------------------------------------------------------------- operations

Complex hardy_inner(const HPoly& p, const HPoly& q) {
  require_same_dim(p.dim(), q.dim(), "hardy_inner");
  if (p.is_zero() || q.is_zero() || p.degree() != q.degree()) return {};
  const auto& small = p.terms().size() <= q.terms().size() ? p.terms() : q.terms();
  const auto& large = &small == &p.terms() ? q.terms() : p.terms();
  const bool small_is_p = &small == &p.terms();
  Complex s{};
  for (const auto& [alpha, c] : small) {
    auto it = large.find(alpha);
    if (it == large.end()) continue;
    s += small_is_p ? c * std::conj(it->second) : it->second * std::conj(c);
  }
  return s;
}

HPoly multiply(const HPoly& p, const HPoly& q) {
  require_same_dim(p.dim(), q.dim(), "multiply");
  HPoly::TermMap terms;
  for (const auto& [a, ca] : p.terms()) {
    for (const auto& [b, cb] : q.terms()) terms[a + b] += ca * cb;
  }
  return HPoly(p.dim(), std::move(terms));
}

HPoly apply_diff(const HPoly& p, const HPoly& f) {
  require_same_dim(p.dim(), f.dim(), "apply_diff");
  HPoly::TermMap terms;
  for (const auto& [gamma, cg] : p.terms()) {
    for (const auto& [alpha, ca] : f.terms()) {
      if (!alpha.contains(gamma)) continue;
      terms[alpha - gamma] += cg * ca * alpha.falling_factorial(gamma);
    }
  }
  return HPoly(p.dim(), std::move(terms));
}

HPoly make_pg(const HPoly& g) {
  if (g.is_zero()) throw DomainError("make_pg: zero polynomial");
  HPoly::TermMap terms;
  for (const auto& [gamma, c] : g.terms()) terms.emplace(gamma, std::conj(c) / gamma.factorial());
  return HPoly(g.dim(), std::move(terms));
}

UniPoly restrict_diagonal(const HPoly& f) {
  if (f.is_zero()) return {};
  Complex s{};
  for (const auto& [alpha, c] : f.terms()) s += c;
  // cancellation relative to the input scale counts as zero
  double mx = 0.0;
  for (const auto& [alpha, c] : f.terms()) mx = std::max(mx, std::abs(c));
  if (std::abs(s) <= kCoeffTol * mx * static_cast<double>(f.terms().size())) return {};
  return UniPoly::monomial(*f.degree(), s);
}

Complex root_of_unity_power(int dim, long long k) {
  if (dim < 1) throw DomainError("root_of_unity_power: dim must be >= 1");
  const long long r = ((k % dim) + dim) % dim;
  if (r == 0) return 1.0;
  if (2 * r == dim) return -1.0;
  if (4 * r == dim) return {0.0, 1.0};
  if (4 * r == 3LL * dim) return {0.0, -1.0};
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / dim;
  return {std::cos(angle), std::sin(angle)};
}

std::vector<HPoly> w_basis(int dim) {
  if (dim < 2) throw DomainError("w_basis: d must be >= 2");
  std::vector<HPoly> w;
  w.reserve(dim);
  for (int i = 0; i < dim; ++i) {
    HPoly::TermMap terms;
    for (int j = 0; j < dim; ++j) {
      terms.emplace(MultiIndex::unit(dim, j), root_of_unity_power(dim, 1LL * i * j));
    }
    w.emplace_back(dim, std::move(terms));
  }
  return w;
}

HPoly rotate(const HPoly& f, const ThetaDirection& theta) {
  require_same_dim(f.dim(), theta.dim(), "rotate");
  HPoly::TermMap terms;
  for (const auto& [alpha, c] : f.terms()) {
    Complex factor = 1.0;
    for (int i = 0; i < f.dim(); ++i) {
      for (int j = 0; j < alpha[i]; ++j) factor *= theta[i];
    }
    terms.emplace(alpha, c * factor);
  }
  return HPoly(f.dim(), std::move(terms));
}

Rational bergman_norm_sq(int k, int s) {
  if (k < 0 || s < 0) throw DomainError("bergman_norm_sq: negative argument");
  return Rational(BigInt(1), binomial(s + k + 1, s + 1));
}

double bergman_norm_sq_value(int k, int s) {
  return bergman_norm_sq(k, s).convert_to<double>();
}

Complex bergman_derivative_pairing(const UniPoly& u, const UniPoly& v) {
  // (z^j)' = j z^{j-1} and ||z^{j-1}||^2 = 1/j
  Complex s{};
  const int n = std::min(u.degree(), v.degree());
  for (int j = 1; j <= n; ++j) {
    s += static_cast<double>(j) * u.coefficient(j) * std::conj(v.coefficient(j));
  }
  return s;
}

}  // namespace qml
