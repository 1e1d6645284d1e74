#pragma once

// Reference computations that share no code with the library: plain maps of
// exponent vectors, explicit enumeration and Eigen's JacobiSVD.

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qml/poly.hpp"

namespace oracle {

using C = std::complex<double>;
using Exps = std::vector<int>;
using Poly = std::map<Exps, C>;

inline void enumerate(int d, int n, Exps& cur, int pos, std::vector<Exps>& out) {
  if (pos == d - 1) {
    cur[pos] = n;
    out.push_back(cur);
    return;
  }
  for (int e = n; e >= 0; --e) {
    cur[pos] = e;
    enumerate(d, n - e, cur, pos + 1, out);
  }
}

/// Every exponent vector of length d summing to n (first coordinate largest first).
inline std::vector<Exps> monomials(int d, int n) {
  std::vector<Exps> out;
  Exps cur(d, 0);
  enumerate(d, n, cur, 0, out);
  return out;
}

inline Poly from(const qml::HPoly& p) {
  Poly out;
  for (const auto& [alpha, c] : p.terms()) out[Exps(alpha.exponents().begin(), alpha.exponents().end())] = c;
  return out;
}

inline C inner(const Poly& p, const Poly& q) {
  C s = 0.0;
  for (const auto& [a, c] : p) {
    auto it = q.find(a);
    if (it != q.end()) s += c * std::conj(it->second);
  }
  return s;
}

inline Poly multiply(const Poly& p, const Poly& q) {
  Poly out;
  for (const auto& [a, x] : p) {
    for (const auto& [b, y] : q) {
      Exps s(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
      out[s] += x * y;
    }
  }
  return out;
}

inline double distance(const Poly& p, const Poly& q) {
  double worst = 0.0;
  for (const auto& [a, c] : p) {
    auto it = q.find(a);
    worst = std::max(worst, std::abs(c - (it == q.end() ? C(0.0) : it->second)));
  }
  for (const auto& [a, c] : q) {
    if (!p.count(a)) worst = std::max(worst, std::abs(c));
  }
  return worst;
}

/// z_j coefficient of w_i is exp(2 pi i (i-1)(j-1)/d).
inline Poly w(int d, int i) {
  Poly out;
  for (int j = 0; j < d; ++j) {
    Exps a(d, 0);
    a[j] = 1;
    const double angle = 2.0 * M_PI * static_cast<double>((i - 1) * j) / d;
    out[a] = C(std::cos(angle), std::sin(angle));
  }
  return out;
}

/// Beta-integral value of ||z^k||^2 for the kernel (1 - conj(l) m)^{-(s+2)}:
/// (s+1) * B(k+1, s+1).
inline double bergman_norm_sq(int k, int s) { return (s + 1) * std::beta(k + 1.0, s + 1.0); }

inline int rank(const Eigen::MatrixXcd& m, double rel = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  while (r < s.size() && s(r) > rel * s(0)) ++r;
  return r;
}

/// dim of span{g z^beta : deg g + |beta| = n} by direct assembly.
inline int ideal_dim(const std::vector<Poly>& gens, int d, int n) {
  const auto target = monomials(d, n);
  std::map<Exps, int> index;
  for (std::size_t i = 0; i < target.size(); ++i) index[target[i]] = static_cast<int>(i);
  std::vector<Eigen::VectorXcd> cols;
  for (const auto& g : gens) {
    int deg = 0;
    for (int e : g.begin()->first) deg += e;
    if (deg > n) continue;
    for (const auto& beta : monomials(d, n - deg)) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(target.size()));
      Poly zb{{beta, 1.0}};
      for (const auto& [a, c] : multiply(g, zb)) v(index.at(a)) += c;
      cols.push_back(v);
    }
  }
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(target.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = cols[c];
  return rank(m);
}

/// Random homogeneous polynomial with Gaussian complex coefficients.
inline qml::HPoly random_hpoly(int d, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  qml::HPoly::TermMap terms;
  for (const auto& a : monomials(d, n)) terms[qml::MultiIndex(a)] = C(g(rng), g(rng));
  return qml::HPoly(d, std::move(terms));
}

/// Closed-form 1x1 block of S_{z_1} on [J]^perp from degree k to k+1.
inline double line_shift_weight(int d, int k) { return std::sqrt((k + 1.0) / (d + k)); }

}  // namespace oracle
