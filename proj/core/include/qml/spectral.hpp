#pragma once

// Per-degree singular values, partial traces, power-law fits, a weak trace
// class indicator and an essential spectrum probe.

#include <map>
#include <vector>

#include "qml/frame.hpp"

namespace qml {

struct SpectralProfile {
  int shift = 0;
  std::vector<int> degrees;
  /// Descending, one list per degree.
  std::vector<std::vector<double>> singular_values;
  /// Ascending eigenvalues of Hermitian degree-preserving blocks, else empty.
  std::vector<std::vector<double>> eigenvalues;
  std::vector<bool> trusted;
  /// Block traces (degree-preserving operators only, else zero).
  std::vector<Complex> block_trace;
  /// Prefix sums over trusted degrees; entries past the first untrusted
  /// degree repeat the last trusted value.
  std::vector<Complex> cumulative_trace;
  std::vector<double> cumulative_abs;
  std::vector<long long> cumulative_count;

  /// Largest degree K such that every degree <= K is trusted; -1 if none.
  int trusted_through() const;
};

SpectralProfile profile(const BlockOperator& op);

struct DecayFit {
  double exponent = 0.0;  // p in value ~ C k^{-p}
  double prefactor = 0.0;
  double r_squared = 0.0;
  int k_min = 0;
  int k_max = 0;
};

/// Least-squares slope of log(value) against log(k) over [k_min, k_max].
/// Every value in the window must be positive; k_min must be >= 5.
DecayFit fit_decay(const std::map<int, double>& sequence, int k_min, int k_max);

struct Window {
  int k_min = 0;
  int k_max = 0;
};

/// [max(5, D/4), D-2].
Window default_window(int max_degree);

struct InverseFit {
  double constant = 0.0;   // least-squares c in value ~ c/(k+1)
  double envelope = 0.0;   // smallest c with value <= c/(k+1) on the window
  double r_squared = 0.0;  // of the least-squares model
};

/// Fits value_k ~ c/(k+1) on [k_min, k_max].
InverseFit fit_inverse(const std::map<int, double>& sequence, int k_min, int k_max);

struct IndicatorRow {
  int degree = 0;
  double partial_sum = 0.0;
  long long count = 0;
  double ratio = 0.0;
};

struct SchattenIndicator {
  double indicator = 0.0;  // max ratio over trusted degrees
  std::vector<IndicatorRow> table;
};

/// Table K -> (sum of singular values over degrees <= K) / log(2 + count).
SchattenIndicator schatten_1inf_indicator(const SpectralProfile& profile);

/// Smallest eigenvalue of sum_i (lambda_i - S_i)(lambda_i - S_i)^* compressed
/// to degrees [tail_start, D-1]. `shifts` are the compressed coordinates.
double essential_spectrum_probe(const std::vector<Complex>& lambda,
                                const std::vector<BlockOperator>& shifts, int tail_start);
double essential_spectrum_probe(const std::vector<Complex>& lambda, const QuotientFrame& frame,
                                int tail_start);

/// Value at h = 0 of the interpolating polynomial through (1/(K+1), values[K])
/// for K = k_end, k_end - stride, ..., k_end - order*stride (Neville).
/// The order is reduced when the sequence is too short.
double richardson_extrapolate(const std::vector<double>& values, int k_end, int order = 8,
                              int stride = 2);

}  // namespace qml
