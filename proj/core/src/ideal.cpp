#include "qml/ideal.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace qml {

struct GradedIdeal::State {
  int dim = 0;
  std::string name;
  std::vector<HPoly> generators;
  std::vector<GradedIdeal> components;
  bool intersection = false;

  std::mutex mu;
  std::map<int, std::unique_ptr<DegreeBasis>> ideal_cache;
  std::map<int, std::unique_ptr<DegreeBasis>> quotient_cache;
};

namespace {

using SpMat = Eigen::SparseMatrix<Complex>;

// Insert unless another thread got there first; return the stored value.
const DegreeBasis& store(std::mutex& mu, std::map<int, std::unique_ptr<DegreeBasis>>& cache,
                         int n, DegreeBasis value) {
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<DegreeBasis>(std::move(value));
  return *slot;
}

const DegreeBasis* lookup(std::mutex& mu,
                          const std::map<int, std::unique_ptr<DegreeBasis>>& cache, int n) {
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  return it == cache.end() ? nullptr : it->second.get();
}

// M_{z_i} from degree n to n+1.
SpMat coordinate_shift(int dim, int i, int n) {
  const auto& src = monomial_basis(dim, n);
  const auto& dst = monomial_basis(dim, n + 1);
  SpMat m(dst.size(), src.size());
  m.reserve(Eigen::VectorXi::Constant(src.size(), 1));
  std::vector<int> e;
  for (int j = 0; j < src.size(); ++j) {
    auto ex = src[j].exponents();
    e.assign(ex.begin(), ex.end());
    e[i] += 1;
    m.insert(dst.index_of(e), j) = 1.0;
  }
  m.makeCompressed();
  return m;
}

}  // namespace

GradedIdeal GradedIdeal::from_generators(int dim, std::vector<HPoly> generators,
                                         std::string name) {
  if (dim < 1) throw DomainError("GradedIdeal: dimension must be >= 1");
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].dim() != dim) {
      throw DomainError("GradedIdeal: generator " + std::to_string(i) +
                        " has dimension " + std::to_string(generators[i].dim()) +
                        ", expected " + std::to_string(dim));
    }
    if (generators[i].is_zero()) {
      throw DomainError("GradedIdeal: generator " + std::to_string(i) + " is zero");
    }
  }
  auto s = std::make_shared<State>();
  s->dim = dim;
  s->name = std::move(name);
  s->generators = std::move(generators);
  return GradedIdeal(std::move(s));
}

GradedIdeal GradedIdeal::intersection(std::vector<GradedIdeal> components, std::string name) {
  if (components.empty()) throw DomainError("GradedIdeal::intersection: no components");
  const int dim = components.front().dim();
  for (const auto& c : components) {
    if (c.dim() != dim) throw DomainError("GradedIdeal::intersection: dimension mismatch");
  }
  if (components.size() == 1) return components.front();
  auto s = std::make_shared<State>();
  s->dim = dim;
  s->name = std::move(name);
  s->components = std::move(components);
  s->intersection = true;
  return GradedIdeal(std::move(s));
}

int GradedIdeal::dim() const { return state_->dim; }
const std::string& GradedIdeal::name() const { return state_->name; }
bool GradedIdeal::is_intersection() const { return state_->intersection; }
const std::vector<HPoly>& GradedIdeal::generators() const { return state_->generators; }
const std::vector<GradedIdeal>& GradedIdeal::components() const { return state_->components; }

const DegreeBasis& GradedIdeal::degree_component(int n) const {
  if (n < 0) throw DomainError("degree_component: negative degree");
  if (auto* hit = lookup(state_->mu, state_->ideal_cache, n)) return *hit;
  return store(state_->mu, state_->ideal_cache, n, compute_degree_component(n));
}

const DegreeBasis& GradedIdeal::quotient_component(int n) const {
  if (n < 0) throw DomainError("quotient_component: negative degree");
  if (auto* hit = lookup(state_->mu, state_->quotient_cache, n)) return *hit;
  // the recursion needs every lower degree; fill them bottom-up
  int start = 0;
  {
    std::lock_guard lock(state_->mu);
    while (start < n && state_->quotient_cache.count(start)) ++start;
  }
  for (int p = start; p < n; ++p) {
    if (!lookup(state_->mu, state_->quotient_cache, p)) {
      store(state_->mu, state_->quotient_cache, p, compute_quotient_component(p));
    }
  }
  return store(state_->mu, state_->quotient_cache, n, compute_quotient_component(n));
}

DegreeBasis GradedIdeal::compute_degree_component(int n) const {
  const int d = dim();
  const Eigen::Index ambient = monomial_count(d, n);
  DegreeBasis out{n, ambient, Matrix(ambient, 0)};
  if (is_intersection()) {
    out.columns = complement(quotient_component(n).columns, ambient);
    return out;
  }
  const auto& target = monomial_basis(d, n);
  Eigen::Index cols = 0;
  for (const auto& g : generators()) {
    if (*g.degree() <= n) cols += monomial_count(d, n - *g.degree());
  }
  if (cols == 0) return out;
  Matrix a = Matrix::Zero(ambient, cols);
  Eigen::Index c = 0;
  for (const auto& g : generators()) {
    const int e = *g.degree();
    if (e > n) continue;
    for (const auto& beta : monomial_basis(d, n - e).monomials()) {
      for (const auto& [alpha, coef] : g.terms()) a(target.index_of(alpha + beta), c) += coef;
      ++c;
    }
  }
  out.columns = orth_range(a);
  return out;
}

DegreeBasis GradedIdeal::compute_quotient_component(int p) const {
  const int d = dim();
  const Eigen::Index ambient = monomial_count(d, p);
  DegreeBasis out{p, ambient, Matrix(ambient, 0)};

  if (is_intersection()) {
    // (A cap B)^perp = A^perp + B^perp inside one degree
    Eigen::Index cols = 0;
    for (const auto& comp : components()) cols += comp.quotient_component(p).dim();
    Matrix stacked(ambient, cols);
    Eigen::Index c = 0;
    for (const auto& comp : components()) {
      const auto& q = comp.quotient_component(p).columns;
      stacked.middleCols(c, q.cols()) = q;
      c += q.cols();
    }
    out.columns = orth_range(stacked);
    return out;
  }

  const auto& basis = monomial_basis(d, p);
  std::vector<Vector> gens_here;
  for (const auto& g : generators()) {
    if (*g.degree() == p) gens_here.push_back(to_vector(g, p));
  }

  if (p == 0) {
    Matrix full = Matrix::Identity(1, 1);
    if (gens_here.empty()) {
      out.columns = full;
    } else {
      Matrix rows(static_cast<Eigen::Index>(gens_here.size()), 1);
      for (std::size_t r = 0; r < gens_here.size(); ++r) rows.row(r) = gens_here[r].adjoint();
      out.columns = null_space(rows);
    }
    return out;
  }

  const Matrix& prev = quotient_component(p - 1).columns;
  const Eigen::Index prev_ambient = monomial_count(d, p - 1);
  if (prev.cols() == 0) return out;
  if (gens_here.empty() && prev.cols() == prev_ambient) {
    out.columns = Matrix::Identity(ambient, ambient);
    return out;
  }

  std::vector<SpMat> shifts;
  shifts.reserve(d);
  for (int i = 0; i < d; ++i) shifts.push_back(coordinate_shift(d, i, p - 1));

  // Candidates: v = D^{-1} sum_i z_i (z_i^* v) with every z_i^* v in Q_{p-1},
  // where D counts the non-zero exponents of each monomial.
  Eigen::VectorXd inv_support(ambient);
  for (Eigen::Index j = 0; j < ambient; ++j) {
    int nz = 0;
    for (int e : basis[static_cast<int>(j)].exponents()) nz += e > 0;
    inv_support(j) = 1.0 / nz;
  }
  const Eigen::Index q = prev.cols();
  Matrix y(ambient, d * q);
  for (int i = 0; i < d; ++i) {
    y.middleCols(i * q, q) = inv_support.asDiagonal() * (shifts[i] * prev);
  }
  const Matrix w = orth_range(y);
  if (w.cols() == 0) return out;

  // Constraints: (I - Q Q^*) z_i^* w = 0 for all i, and <w, g> = 0.
  const Eigen::Index wc = w.cols();
  Matrix constraints(d * prev_ambient + static_cast<Eigen::Index>(gens_here.size()), wc);
  for (int i = 0; i < d; ++i) {
    Matrix back = shifts[i].adjoint() * w;
    back -= prev * (prev.adjoint() * back);
    constraints.middleRows(i * prev_ambient, prev_ambient) = back;
  }
  for (std::size_t r = 0; r < gens_here.size(); ++r) {
    constraints.row(d * prev_ambient + static_cast<Eigen::Index>(r)) = gens_here[r].adjoint() * w;
  }
  // exactly satisfied systems would otherwise be ranked on rounding noise
  if (constraints.cwiseAbs().maxCoeff() <= kRankTol) {
    out.columns = w;
    return out;
  }
  Matrix kernel = null_space(constraints);
  out.columns = w * kernel;
  return out;
}

GradedIdeal ideal_product(const GradedIdeal& a, const GradedIdeal& b) {
  if (a.dim() != b.dim()) throw DomainError("ideal_product: dimension mismatch");
  if (a.is_intersection() || b.is_intersection()) {
    throw DomainError("ideal_product: generators of an intersection are not available");
  }
  std::vector<HPoly> gens;
  for (const auto& g : a.generators()) {
    for (const auto& h : b.generators()) {
      HPoly p = multiply(g, h);
      if (!p.is_zero()) gens.push_back(std::move(p));
    }
  }
  return GradedIdeal::from_generators(a.dim(), std::move(gens));
}

GradedIdeal ideal_power(const GradedIdeal& ideal, int power) {
  if (power < 1) throw DomainError("ideal_power: power must be >= 1 (unit ideal not supported)");
  if (ideal.is_intersection()) {
    throw DomainError("ideal_power: generators of an intersection are not available");
  }
  if (power == 1) return ideal;
  const auto& g = ideal.generators();
  const int m = static_cast<int>(g.size());
  std::vector<HPoly> gens;
  // non-decreasing index tuples, first tuple (0,...,0)
  std::vector<int> idx(power, 0);
  while (m > 0) {
    HPoly p = g[idx[0]];
    for (int k = 1; k < power; ++k) p = multiply(p, g[idx[k]]);
    if (!p.is_zero()) gens.push_back(std::move(p));
    int k = power - 1;
    while (k >= 0 && idx[k] == m - 1) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < power; ++j) idx[j] = idx[k];
  }
  return GradedIdeal::from_generators(ideal.dim(), std::move(gens), ideal.name());
}

DegreeBasis ideal_intersection_per_degree(const GradedIdeal& a, const GradedIdeal& b, int n) {
  if (a.dim() != b.dim()) throw DomainError("ideal_intersection_per_degree: dimension mismatch");
  const auto& qa = a.quotient_component(n).columns;
  const auto& qb = b.quotient_component(n).columns;
  const Eigen::Index ambient = monomial_count(a.dim(), n);
  Matrix stacked(qa.cols() + qb.cols(), ambient);
  stacked << qa.adjoint(), qb.adjoint();
  DegreeBasis out{n, ambient, Matrix(ambient, 0)};
  out.columns = stacked.rows() == 0 ? Matrix(Matrix::Identity(ambient, ambient))
                                    : null_space(stacked);
  return out;
}

GradedIdeal j_theta(const ThetaDirection& theta) {
  const int d = theta.dim();
  if (d < 2) throw InputError("j_theta: d must be >= 2");
  const auto w = w_basis(d);
  const ThetaDirection inv = theta.conjugate();
  std::vector<HPoly> gens;
  for (int i = 1; i < d; ++i) gens.push_back(rotate(w[i], inv));
  return GradedIdeal::from_generators(d, std::move(gens), "J_theta");
}

GradedIdeal j_theta_power(const ThetaDirection& theta, int power) {
  return ideal_power(j_theta(theta), power);
}

MembershipResult membership(const HPoly& h, const GradedIdeal& ideal) {
  if (h.dim() != ideal.dim()) throw DomainError("membership: dimension mismatch");
  if (h.is_zero()) return {true, 0.0};
  const int n = *h.degree();
  const Vector v = to_vector(h, n);
  const auto& q = ideal.quotient_component(n).columns;
  const double residual = q.cols() == 0 ? 0.0 : (q.adjoint() * v).norm();
  return {residual <= kMemberTol * v.norm(), residual};
}

std::vector<HilbertRow> hilbert_dims(const GradedIdeal& ideal, int max_degree) {
  if (max_degree < 0) throw DomainError("hilbert_dims: negative degree");
  std::vector<HilbertRow> rows;
  for (int n = 0; n <= max_degree; ++n) {
    const int q = ideal.quotient_component(n).dim();
    rows.push_back({n, static_cast<int>(monomial_count(ideal.dim(), n)) - q, q});
  }
  return rows;
}

Vector to_vector(const HPoly& p, int degree) {
  const auto& basis = monomial_basis(p.dim(), degree);
  const auto c = p.coefficients_in(basis);
  return Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
}

HPoly from_vector(int dim, int degree, const Vector& v) {
  const auto& basis = monomial_basis(dim, degree);
  return HPoly::from_coefficients(basis, std::span<const Complex>(v.data(), v.size()));
}

Eigen::SparseMatrix<Complex> multiplication_matrix(const HPoly& p, int n) {
  if (p.is_zero()) throw DomainError("multiplication_matrix: zero polynomial has no degree");
  const int d = p.dim();
  const int e = *p.degree();
  const auto& src = monomial_basis(d, n);
  const auto& dst = monomial_basis(d, n + e);
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(src.size() * p.terms().size());
  for (int j = 0; j < src.size(); ++j) {
    for (const auto& [alpha, c] : p.terms()) trips.emplace_back(dst.index_of(src[j] + alpha), j, c);
  }
  SpMat m(dst.size(), src.size());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace qml
