#pragma once

// Sparse homogeneous polynomials over C with the Hardy-space pairing of the
// polydisc, restriction to the diagonal, the p_g construction, and the
// one-variable weighted Bergman norms used by the quotient identifications.

#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qml/error.hpp"

namespace qml {

using Complex = std::complex<double>;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Relative prune threshold for stored coefficients.
inline constexpr double kCoeffTol = 1e-12;
/// Absolute tolerance for numerical comparisons at desk-scale degrees.
inline constexpr double kNumTol = 1e-9;
/// Allowed deviation of |theta_i| from 1.
inline constexpr double kUnitTol = 1e-9;

/// Exponent vector alpha in Z_+^d.
///
/// Ordered graded-lexicographically: lower total degree first, then the
/// exponent vectors compared left to right with the larger leading exponent
/// first (z1^n precedes z1^(n-1) z2, ...). Every deterministic enumeration in
/// the library uses this order.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  static MultiIndex zero(int dim);
  /// z_i as an exponent vector; `i` is zero-based.
  static MultiIndex unit(int dim, int i);

  int dim() const { return static_cast<int>(exps_.size()); }
  int degree() const { return degree_; }
  int operator[](std::size_t i) const { return exps_[i]; }
  std::span<const int> exponents() const { return exps_; }

  MultiIndex operator+(const MultiIndex& other) const;
  /// Componentwise `other <= *this`.
  bool contains(const MultiIndex& other) const;
  MultiIndex operator-(const MultiIndex& other) const;

  /// alpha! as a double (exact for the degrees used here).
  double factorial() const;
  /// alpha!/(alpha-gamma)!; requires contains(gamma).
  double falling_factorial(const MultiIndex& gamma) const;

  std::string to_string() const;

  bool operator==(const MultiIndex& other) const = default;
  std::strong_ordering operator<=>(const MultiIndex& other) const;

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

/// Number of monomials of degree n in d variables, C(n+d-1, d-1).
std::int64_t monomial_count(int dim, int degree);

/// Graded-lex enumeration of the monomials of one degree, with O(d) ranking.
class MonomialBasis {
 public:
  MonomialBasis(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(monomials_.size()); }
  const MultiIndex& operator[](int i) const { return monomials_[i]; }
  const std::vector<MultiIndex>& monomials() const { return monomials_; }

  /// Position of alpha in the enumeration; alpha must have this degree.
  int index_of(const MultiIndex& alpha) const;
  int index_of(std::span<const int> alpha) const;

 private:
  int dim_;
  int degree_;
  std::vector<MultiIndex> monomials_;
};

/// Shared, lazily built basis for (dim, degree). Thread-safe.
const MonomialBasis& monomial_basis(int dim, int degree);

/// Homogeneous polynomial stored as a sparse map alpha -> coefficient.
///
/// All stored coefficients are non-zero after pruning (relative kCoeffTol)
/// and every stored multi-index has the same degree. The zero polynomial has
/// no degree.
class HPoly {
 public:
  using TermMap = std::map<MultiIndex, Complex>;

  explicit HPoly(int dim);
  HPoly(int dim, TermMap terms);

  static HPoly monomial(const MultiIndex& alpha, Complex c = 1.0);
  static HPoly constant(int dim, Complex c);
  /// z_i, zero-based i.
  static HPoly variable(int dim, int i);

  int dim() const { return dim_; }
  std::optional<int> degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  Complex coefficient(const MultiIndex& alpha) const;
  double norm() const;

  HPoly operator-() const;
  HPoly& operator+=(const HPoly& other);
  HPoly& operator-=(const HPoly& other);
  HPoly& operator*=(Complex s);
  friend HPoly operator+(HPoly a, const HPoly& b) { return a += b; }
  friend HPoly operator-(HPoly a, const HPoly& b) { return a -= b; }
  friend HPoly operator*(HPoly a, Complex s) { return a *= s; }
  friend HPoly operator*(Complex s, HPoly a) { return a *= s; }

  /// Complex value at a point of C^d.
  Complex evaluate(std::span<const Complex> point) const;

  /// Dense coefficient vector over monomial_basis(dim, degree).
  std::vector<Complex> coefficients_in(const MonomialBasis& basis) const;
  /// Inverse of coefficients_in; prunes.
  static HPoly from_coefficients(const MonomialBasis& basis,
                                 std::span<const Complex> coeffs);

  std::string to_string() const;

  /// Exact structural equality (same terms, same coefficients).
  bool operator==(const HPoly& other) const = default;

 private:
  void prune();

  int dim_;
  TermMap terms_;
  std::optional<int> degree_;
};

/// A finite sum of homogeneous parts of different degrees.
class GradedPoly {
 public:
  explicit GradedPoly(int dim) : dim_(dim) {}
  GradedPoly(const HPoly& p);  // NOLINT(google-explicit-constructor)

  int dim() const { return dim_; }
  const std::map<int, HPoly>& parts() const { return parts_; }
  bool is_zero() const { return parts_.empty(); }
  /// The single part when homogeneous (zero yields the zero HPoly).
  std::optional<HPoly> homogeneous() const;

  GradedPoly& operator+=(const GradedPoly& other);
  GradedPoly& operator*=(Complex s);
  friend GradedPoly operator+(GradedPoly a, const GradedPoly& b) { return a += b; }
  friend GradedPoly operator*(const GradedPoly& a, const GradedPoly& b);
  GradedPoly operator-() const;

 private:
  int dim_;
  std::map<int, HPoly> parts_;
};

/// One-variable polynomial c_0 + c_1 z + ... ; trailing coefficient non-zero.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Complex> coefficients);
  static UniPoly monomial(int power, Complex c = 1.0);

  const std::vector<Complex>& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  Complex coefficient(int power) const;

  UniPoly& operator+=(const UniPoly& other);
  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
  UniPoly& operator*=(Complex s);

  /// Largest coefficientwise distance to `other`.
  double max_distance(const UniPoly& other) const;

 private:
  void trim();
  std::vector<Complex> coeffs_;
};

/// Unit-modulus direction theta in T^d.
class ThetaDirection {
 public:
  explicit ThetaDirection(std::vector<Complex> theta);
  static ThetaDirection ones(int dim);

  int dim() const { return static_cast<int>(theta_.size()); }
  const std::vector<Complex>& values() const { return theta_; }
  Complex operator[](std::size_t i) const { return theta_[i]; }
  ThetaDirection conjugate() const;
  /// <this, other> = sum this_i * conj(other_i).
  Complex inner(const ThetaDirection& other) const;

 private:
  std::vector<Complex> theta_;
};

/// <p, q> = sum_alpha p_alpha conj(q_alpha).
Complex hardy_inner(const HPoly& p, const HPoly& q);
HPoly multiply(const HPoly& p, const HPoly& q);
/// p(d)f with d^gamma z^alpha = alpha!/(alpha-gamma)! z^(alpha-gamma).
HPoly apply_diff(const HPoly& p, const HPoly& f);
/// The unique p_g with p_g(d)^* 1 = g, so apply_diff(f, p_g) = <f, g>.
HPoly make_pg(const HPoly& g);
/// (r f)(z) = f(z, ..., z).
UniPoly restrict_diagonal(const HPoly& f);
/// w_i(z) = sum_j omega^{(i-1)(j-1)} z_j with omega = e^{2 pi i / d}.
std::vector<HPoly> w_basis(int dim);
/// omega^k evaluated from its exact angle.
Complex root_of_unity_power(int dim, long long k);
/// Coefficient at alpha multiplied by theta^alpha (f o L_theta).
HPoly rotate(const HPoly& f, const ThetaDirection& theta);

/// ||z^k||^2 in the disc space with kernel (1 - conj(l) m)^{-(s+2)}:
/// exactly 1 / C(s+k+1, s+1).
Rational bergman_norm_sq(int k, int s);
double bergman_norm_sq_value(int k, int s);
/// <u', v'> under the normalized Bergman pairing <z^m, z^n> = delta_mn/(m+1).
Complex bergman_derivative_pairing(const UniPoly& u, const UniPoly& v);

/// Exact binomial coefficient; zero outside 0 <= k <= n.
BigInt binomial(int n, int k);
double binomial_value(int n, int k);

}  // namespace qml
