#pragma once

// Closed-form predictions checked against brute-force computations on the
// quotient frames.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qml/spectral.hpp"

namespace qml {

using Json = nlohmann::ordered_json;

/// A named per-degree singular value table, written as one CSV.
struct NamedProfile {
  std::string name;
  SpectralProfile profile;
};

struct VerificationReport {
  std::string claim;
  Json predicted;
  Json computed;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string verdict;
  Json config = Json::object();
  Json details = Json::object();
  std::vector<NamedProfile> profiles;

  /// Sets abs/rel error and pass = abs_error <= tolerance.
  void judge(double abs_err, double scale, double tol);
  Json to_json() const;
};

// ------------------------------------------------------------- shift basis

/// Orthonormal bases B_n of span{w^alpha : |alpha| = n, alpha_1 = 0} for
/// n < N, and the vectors e_{g,k} spanning ker(r_g)^perp degree by degree.
class ShiftBasis {
 public:
  ShiftBasis(int dim, int power);

  int dim() const { return dim_; }
  int power() const { return power_; }
  /// B_n, Gram-Schmidt in graded-lex order of alpha.
  const std::vector<HPoly>& level(int n) const;
  /// Total number of elements, C(N+d-2, d-1).
  int size() const;

  /// Degree n+k coefficient vector of e_{g,k} for g = level(n)[index],
  /// normalized; `raw_norm` receives the norm before normalization.
  Vector e_vector(int n, int index, int k, double* raw_norm = nullptr) const;

  struct Slot {
    int level;
    int index;
  };
  /// Slots present at frame degree p (levels n <= min(p, N-1)), level-major.
  std::vector<Slot> slots(int p) const;
  /// C_p = Q_p^* E_p where E_p holds the e-vectors of degree p.
  Matrix coordinates(const QuotientFrame& frame, int p) const;

 private:
  int dim_;
  int power_;
  std::vector<std::vector<HPoly>> levels_;
  std::vector<std::vector<HPoly>> diff_ops_;  // p_g per element
};

/// a_{m,n}(k) exactly as displayed (negative sign, binomial ratios).
double shift_coefficient_a(int dim, int m, int n, int k);
/// a(k) sqrt((k-m+n+1)/(d+m+n+k)) - a(k-1) sqrt(k/(d+2n+k-1)).
double shift_coefficient_b(int dim, int m, int n, int k);

// ------------------------------------------------------------ verifications

VerificationReport verify_trace_formula(int dim, int power, const HPoly& f1, const HPoly& f2,
                                        int max_degree, double tol = 1e-6);

/// Single (m, n, i, f, g) shift-coefficient check. The prediction carries
/// the parity factor (-1)^{m+n}; the literal display is reported alongside.
VerificationReport verify_shift_coefficients(int dim, int power, int m, int n, int coordinate,
                                             int f_index, int g_index, int k_max,
                                             double tol = 1e-8);

/// All (m > n, f, g, i) combinations for one (d, N) at once.
VerificationReport verify_shift_coefficients_all(int dim, int power, int k_max,
                                                 double tol = 1e-8);

/// Decay exponents of |a_{m,n}(k)| and |b_{m,n}(k)| over [k_min, k_max].
VerificationReport verify_shift_decay(int dim, int m, int n, int k_min, int k_max);

VerificationReport verify_zero_blocks(int dim, int power, int coordinate, int max_degree,
                                      double tol = 1e-9);

VerificationReport verify_rg_module_map(int dim, int power, int samples, std::uint64_t seed,
                                        double tol = 1e-9);

VerificationReport verify_asymptotic_orthogonality(const ThetaDirection& theta_i,
                                                   const ThetaDirection& theta_j, int k_max,
                                                   double tol = 1e-12);

/// ||S - S_{z_i}|| on degree k against c/(k+1), S the direct-sum shift.
VerificationReport verify_isometry_structure(int dim, int power, int max_degree,
                                             double min_quality = 0.95);

VerificationReport nonnormality_demo(const GradedIdeal& ideal, int max_degree,
                                     double floor = 0.1);

VerificationReport boundary_witness(const std::vector<GradedIdeal>& components,
                                    const GradedPoly& f, int max_degree);

struct ProbeSettings {
  std::vector<int> tail_starts;
  int reference_start = 20;
  double near_threshold = 0.05;
  double origin_margin = 0.2;
  /// Probe point lambda_l = direction_l * t; empty direction means all ones.
  Complex boundary_point{1.0, 0.0};
  std::vector<Complex> direction;
};

VerificationReport spectrum_probe(const GradedIdeal& ideal, int max_degree,
                                  const ProbeSettings& settings);

/// Hilbert-function table of the quotient with the stable value check.
VerificationReport dims_report(const GradedIdeal& ideal, int max_degree,
                               std::optional<int> expected_stable = std::nullopt,
                               int stable_from = 0);

/// Singular-value profile of S_p.
VerificationReport compress_report(const GradedIdeal& ideal, const GradedPoly& p,
                                   int max_degree);

/// Profile of [S_{z_i}^*, S_{z_j}] with trace and (1,inf) indicator.
VerificationReport commutator_report(const GradedIdeal& ideal, int i, int j, int max_degree);

}  // namespace qml
