#pragma once

// Homogeneous ideals of C[z_1..z_d] as graded subspaces of the Hardy space:
// per-degree orthonormal bases of I_n and of its orthocomplement.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qml/linalg.hpp"
#include "qml/poly.hpp"

namespace qml {

/// Membership threshold relative to ||h||.
inline constexpr double kMemberTol = 1e-9;

/// Orthonormal coefficient vectors (columns) over monomial_basis(dim, degree).
struct DegreeBasis {
  int degree = 0;
  Eigen::Index ambient = 0;
  Matrix columns;

  int dim() const { return static_cast<int>(columns.cols()); }
};

/// A homogeneous ideal with write-once per-degree caches.
///
/// Either generated by a list of homogeneous polynomials, or an intersection
/// of such ideals (then only the per-degree components are known). Copies
/// share the cache. All methods are safe to call concurrently.
class GradedIdeal {
 public:
  static GradedIdeal from_generators(int dim, std::vector<HPoly> generators,
                                     std::string name = {});
  /// Per-degree intersection of the components.
  static GradedIdeal intersection(std::vector<GradedIdeal> components,
                                  std::string name = {});

  int dim() const;
  const std::string& name() const;
  bool is_intersection() const;
  /// Generators (empty for an intersection).
  const std::vector<HPoly>& generators() const;
  const std::vector<GradedIdeal>& components() const;

  /// Orthonormal basis of I_n = span{g z^beta : deg g + |beta| = n}.
  const DegreeBasis& degree_component(int n) const;
  /// Orthonormal basis of the orthocomplement of I_n in degree n.
  const DegreeBasis& quotient_component(int n) const;

  /// Identity of the shared state; equal for copies of the same ideal.
  const void* identity() const { return state_.get(); }

 private:
  struct State;
  explicit GradedIdeal(std::shared_ptr<State> state) : state_(std::move(state)) {}

  DegreeBasis compute_degree_component(int n) const;
  DegreeBasis compute_quotient_component(int n) const;

  std::shared_ptr<State> state_;
};

/// Generators are the pairwise products.
GradedIdeal ideal_product(const GradedIdeal& a, const GradedIdeal& b);
/// Generators are the N-fold products (with repetition) of the generators.
GradedIdeal ideal_power(const GradedIdeal& ideal, int power);
/// Orthonormal basis of (a_n cap b_n).
DegreeBasis ideal_intersection_per_degree(const GradedIdeal& a, const GradedIdeal& b,
                                          int n);

/// The prime ideal of the line {(theta_1 t, ..., theta_d t)}: generated by
/// w_2..w_d composed with the inverse rotation.
GradedIdeal j_theta(const ThetaDirection& theta);
GradedIdeal j_theta_power(const ThetaDirection& theta, int power);

struct MembershipResult {
  bool member = false;
  double residual = 0.0;
};

/// h in I iff the distance of h to I_{deg h} is at most kMemberTol * ||h||.
MembershipResult membership(const HPoly& h, const GradedIdeal& ideal);

struct HilbertRow {
  int degree = 0;
  int ideal_dim = 0;
  int quotient_dim = 0;
};

/// Rows for n = 0..max_degree.
std::vector<HilbertRow> hilbert_dims(const GradedIdeal& ideal, int max_degree);

/// Coefficient vector of a homogeneous polynomial as an Eigen vector.
Vector to_vector(const HPoly& p, int degree);
HPoly from_vector(int dim, int degree, const Vector& v);

/// Matrix of M_p from degree n to degree n + deg p over graded-lex bases.
Eigen::SparseMatrix<Complex> multiplication_matrix(const HPoly& p, int n);

}  // namespace qml
