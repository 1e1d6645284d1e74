#include "qml/linalg.hpp"

#include <algorithm>

namespace qml {

namespace {

Eigen::Index rank_of(const Eigen::VectorXd& s, double rel_tol) {
  if (s.size() == 0 || !(s(0) > 0.0)) return 0;
  const double cut = rel_tol * s(0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return r;
}

// BDCSVD occasionally returns non-finite values on exactly triangular input;
// JacobiSVD is slower but does not.
struct Svd {
  Eigen::VectorXd values;
  Matrix u;
  Matrix v;
};

Svd svd_of(const Matrix& m, unsigned int options) {
  Eigen::BDCSVD<Matrix> bdc(m, options);
  if (bdc.info() == Eigen::Success && bdc.singularValues().allFinite()) {
    Svd out{bdc.singularValues(), Matrix(), Matrix()};
    if (options & (Eigen::ComputeThinU | Eigen::ComputeFullU)) out.u = bdc.matrixU();
    if (options & (Eigen::ComputeThinV | Eigen::ComputeFullV)) out.v = bdc.matrixV();
    if (out.u.allFinite() && out.v.allFinite()) return out;
  }
  Eigen::JacobiSVD<Matrix> jac(m, options);
  Svd out{jac.singularValues(), Matrix(), Matrix()};
  if (options & (Eigen::ComputeThinU | Eigen::ComputeFullU)) out.u = jac.matrixU();
  if (options & (Eigen::ComputeThinV | Eigen::ComputeFullV)) out.v = jac.matrixV();
  return out;
}

}  // namespace

Matrix orth_range(const Matrix& m, double rel_tol) {
  if (m.cols() == 0 || m.rows() == 0) return Matrix(m.rows(), 0);
  if (m.rows() > 2 * m.cols()) {
    // thin QR first, then an SVD of the small triangular factor
    Eigen::HouseholderQR<Matrix> qr(m);
    const Eigen::Index k = m.cols();
    Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const Svd svd = svd_of(r, Eigen::ComputeThinU);
    const Eigen::Index rank = rank_of(svd.values, rel_tol);
    Matrix thin_q = qr.householderQ() * Matrix::Identity(m.rows(), k);
    return thin_q * svd.u.leftCols(rank);
  }
  const Svd svd = svd_of(m, Eigen::ComputeThinU);
  const Eigen::Index rank = rank_of(svd.values, rel_tol);
  return svd.u.leftCols(rank);
}

Matrix null_space(const Matrix& m, double rel_tol) {
  const Eigen::Index n = m.cols();
  if (n == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(n, n);
  if (m.rows() > 2 * n) {
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    const Svd svd = svd_of(r, Eigen::ComputeFullV);
    const Eigen::Index rank = rank_of(svd.values, rel_tol);
    return svd.v.rightCols(n - rank);
  }
  const Svd svd = svd_of(m, Eigen::ComputeFullV);
  const Eigen::Index rank = rank_of(svd.values, rel_tol);
  return svd.v.rightCols(n - rank);
}

Matrix complement(const Matrix& q, Eigen::Index ambient) {
  if (q.cols() == 0) return Matrix::Identity(ambient, ambient);
  if (q.cols() == ambient) return Matrix(ambient, 0);
  return null_space(q.adjoint());
}

double subspace_distance(const Matrix& a, const Matrix& b) {
  const Matrix diff = a * a.adjoint() - b * b.adjoint();
  return spectral_norm(diff);
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::VectorXd s = singular_values(m);
  return s.size() ? s(0) : 0.0;
}

Eigen::VectorXd singular_values(const Matrix& m) {
  if (m.size() == 0) return Eigen::VectorXd(0);
  if (m.rows() == 1 || m.cols() == 1) {
    Eigen::VectorXd s(1);
    s(0) = m.norm();
    return s;
  }
  return svd_of(m, 0).values;
}

}  // namespace qml
