#include "qml/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qml {

int SpectralProfile::trusted_through() const {
  int k = -1;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (!trusted[i] || degrees[i] != k + 1) break;
    k = degrees[i];
  }
  return k;
}

SpectralProfile profile(const BlockOperator& op) {
  SpectralProfile out;
  out.shift = op.shift();
  Complex trace_sum{};
  double abs_sum = 0.0;
  long long count = 0;
  bool prefix_trusted = true;
  for (const auto& [n, m] : op.blocks()) {
    out.degrees.push_back(n);
    const Eigen::VectorXd s = singular_values(m);
    out.singular_values.emplace_back(s.data(), s.data() + s.size());
    const bool trusted = op.trusted(n);
    out.trusted.push_back(trusted);

    std::vector<double> eig;
    Complex tr{};
    if (op.degree_preserving() && m.size() > 0) {
      tr = m.trace();
      const double scale = std::max(1.0, s.size() ? s(0) : 0.0);
      if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * scale) {
        const Matrix herm = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        eig.assign(ev.data(), ev.data() + ev.size());
        double t = 0.0;
        for (double v : eig) t += v;
        tr = Complex(t, 0.0);
      }
    }
    out.eigenvalues.push_back(std::move(eig));
    out.block_trace.push_back(tr);

    prefix_trusted = prefix_trusted && trusted;
    if (prefix_trusted) {
      trace_sum += tr;
      for (Eigen::Index i = 0; i < s.size(); ++i) abs_sum += s(i);
      count += s.size();
    }
    out.cumulative_trace.push_back(trace_sum);
    out.cumulative_abs.push_back(abs_sum);
    out.cumulative_count.push_back(count);
  }
  return out;
}

DecayFit fit_decay(const std::map<int, double>& sequence, int k_min, int k_max) {
  if (k_min < 5) throw DomainError("fit_decay: window must start at k >= 5");
  if (k_max <= k_min) throw DomainError("fit_decay: empty window");
  std::vector<double> xs, ys;
  for (int k = k_min; k <= k_max; ++k) {
    auto it = sequence.find(k);
    if (it == sequence.end()) {
      throw DomainError("fit_decay: missing value at k=" + std::to_string(k));
    }
    if (!(it->second > 0.0)) {
      throw DomainError("fit_decay: non-positive value at k=" + std::to_string(k));
    }
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(it->second));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
  }
  DecayFit fit;
  fit.exponent = -slope;
  fit.prefactor = std::exp(intercept);
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.k_min = k_min;
  fit.k_max = k_max;
  return fit;
}

Window default_window(int max_degree) {
  return {std::max(5, max_degree / 4), max_degree - 2};
}

InverseFit fit_inverse(const std::map<int, double>& sequence, int k_min, int k_max) {
  if (k_max < k_min) throw DomainError("fit_inverse: empty window");
  std::vector<double> xs, ys;
  for (int k = k_min; k <= k_max; ++k) {
    auto it = sequence.find(k);
    if (it == sequence.end()) {
      throw DomainError("fit_inverse: missing value at k=" + std::to_string(k));
    }
    xs.push_back(1.0 / (k + 1.0));
    ys.push_back(it->second);
  }
  double sxx = 0.0, sxy = 0.0, mean = 0.0;
  InverseFit fit;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    mean += ys[i];
    fit.envelope = std::max(fit.envelope, ys[i] / xs[i]);
  }
  mean /= static_cast<double>(ys.size());
  fit.constant = sxy / sxx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.constant * xs[i];
    ss_res += r * r;
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

SchattenIndicator schatten_1inf_indicator(const SpectralProfile& prof) {
  SchattenIndicator out;
  const int through = prof.trusted_through();
  for (std::size_t i = 0; i < prof.degrees.size(); ++i) {
    if (prof.degrees[i] > through) break;
    IndicatorRow row;
    row.degree = prof.degrees[i];
    row.partial_sum = prof.cumulative_abs[i];
    row.count = prof.cumulative_count[i];
    row.ratio = row.partial_sum / std::log(2.0 + static_cast<double>(row.count));
    out.indicator = std::max(out.indicator, row.ratio);
    out.table.push_back(row);
  }
  return out;
}

double essential_spectrum_probe(const std::vector<Complex>& lambda,
                                const std::vector<BlockOperator>& shifts, int tail_start) {
  if (shifts.empty()) throw DomainError("essential_spectrum_probe: no operators");
  const QuotientFrame& frame = shifts.front().frame();
  const int d = frame.dim();
  const int top = frame.max_degree();
  if (static_cast<int>(lambda.size()) != d) {
    throw DomainError("essential_spectrum_probe: lambda has " + std::to_string(lambda.size()) +
                      " coordinates, expected " + std::to_string(d));
  }
  if (static_cast<int>(shifts.size()) != d) {
    throw DomainError("essential_spectrum_probe: need one operator per coordinate");
  }
  if (tail_start < 0 || tail_start + 2 > top) {
    throw DomainError("essential_spectrum_probe: tail_start + 2 must be <= D");
  }
  // window degrees [tail_start, D-1]; (conj(lambda_i) - S_i^*) lands in
  // degrees [tail_start-1, D-1]
  const int lo = tail_start;
  const int hi = top - 1;
  std::vector<Eigen::Index> col_off{0};
  for (int n = lo; n <= hi; ++n) col_off.push_back(col_off.back() + frame.block_dim(n));
  const int rlo = std::max(0, lo - 1);
  std::vector<Eigen::Index> row_off{0};
  for (int n = rlo; n <= hi; ++n) row_off.push_back(row_off.back() + frame.block_dim(n));

  Matrix form = Matrix::Zero(col_off.back(), col_off.back());
  for (int i = 0; i < d; ++i) {
    const BlockOperator& s = shifts[i];
    if (s.shift() != 1 || !s.frame().same_as(frame)) {
      throw DomainError("essential_spectrum_probe: operators must be degree-one compressions");
    }
    Matrix a = Matrix::Zero(row_off.back(), col_off.back());
    for (int n = lo; n <= hi; ++n) {
      const Eigen::Index c = col_off[n - lo];
      const int dn = frame.block_dim(n);
      a.block(row_off[n - rlo], c, dn, dn) += std::conj(lambda[i]) * Matrix::Identity(dn, dn);
      if (n >= 1) {
        const Matrix& blk = s.block(n - 1);
        a.block(row_off[n - 1 - rlo], c, blk.cols(), blk.rows()) -= blk.adjoint();
      }
    }
    form += a.adjoint() * a;
  }
  if (form.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(form, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double essential_spectrum_probe(const std::vector<Complex>& lambda, const QuotientFrame& frame,
                                int tail_start) {
  std::vector<BlockOperator> shifts;
  for (int i = 0; i < frame.dim(); ++i) {
    shifts.push_back(compress_multiplier(HPoly::variable(frame.dim(), i), frame));
  }
  return essential_spectrum_probe(lambda, shifts, tail_start);
}

double richardson_extrapolate(const std::vector<double>& values, int k_end, int order,
                              int stride) {
  if (k_end < 0 || k_end >= static_cast<int>(values.size())) {
    throw DomainError("richardson_extrapolate: k_end outside the sequence");
  }
  if (stride < 1 || order < 0) throw DomainError("richardson_extrapolate: bad order/stride");
  // keep the smallest sample index at 1 or more
  while (order > 0 && k_end - order * stride < 1) --order;
  std::vector<double> xs, ps;
  for (int j = 0; j <= order; ++j) {
    const int k = k_end - j * stride;
    xs.push_back(1.0 / (k + 1.0));
    ps.push_back(values[k]);
  }
  const int n = static_cast<int>(xs.size());
  for (int m = 1; m < n; ++m) {
    for (int i = 0; i < n - m; ++i) {
      ps[i] = (-xs[i + m] * ps[i] + xs[i] * ps[i + 1]) / (xs[i] - xs[i + m]);
    }
  }
  return ps[0];
}

}  // namespace qml
