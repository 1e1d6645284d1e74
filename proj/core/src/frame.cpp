#include "qml/frame.hpp"

#include <algorithm>
#include <string>

#include "qml/parallel.hpp"

namespace qml {

// ------------------------------------------------------------ QuotientFrame

QuotientFrame::QuotientFrame(GradedIdeal ideal, int max_degree) {
  if (max_degree < 1) throw DomainError("build_frame: truncation degree must be >= 1");
  std::vector<Matrix> bases;
  bases.reserve(max_degree + 1);
  for (int n = 0; n <= max_degree; ++n) bases.push_back(ideal.quotient_component(n).columns);
  data_ = std::make_shared<const Data>(Data{std::move(ideal), max_degree, std::move(bases)});
}

const Matrix& QuotientFrame::basis(int n) const {
  if (n < 0 || n > max_degree()) {
    throw DomainError("QuotientFrame: degree " + std::to_string(n) + " outside [0, " +
                      std::to_string(max_degree()) + "]");
  }
  return data_->bases[n];
}

std::vector<int> QuotientFrame::dims() const {
  std::vector<int> out;
  for (const auto& b : data_->bases) out.push_back(static_cast<int>(b.cols()));
  return out;
}

QuotientFrame build_frame(const GradedIdeal& ideal, int max_degree) {
  return QuotientFrame(ideal, max_degree);
}

// ------------------------------------------------------------ BlockOperator

BlockOperator::BlockOperator(QuotientFrame frame, int shift)
    : frame_(std::move(frame)), shift_(shift) {
  for (int n = 0; n <= frame_.max_degree(); ++n) trusted_[n] = false;
}

const Matrix& BlockOperator::block(int n) const {
  auto it = blocks_.find(n);
  if (it == blocks_.end()) {
    throw DomainError("BlockOperator: no block at degree " + std::to_string(n));
  }
  return it->second;
}

bool BlockOperator::trusted(int n) const {
  auto it = trusted_.find(n);
  return it != trusted_.end() && it->second && blocks_.count(n);
}

void BlockOperator::set_block(int n, Matrix m, bool is_trusted) {
  const int target = n + shift_;
  if (n < 0 || n > frame_.max_degree() || target < 0 || target > frame_.max_degree()) {
    throw DomainError("BlockOperator: block " + std::to_string(n) + " leaves the frame");
  }
  if (m.rows() != frame_.block_dim(target) || m.cols() != frame_.block_dim(n)) {
    throw DomainError("BlockOperator: block " + std::to_string(n) + " has shape " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(frame_.block_dim(target)) + "x" +
                      std::to_string(frame_.block_dim(n)));
  }
  blocks_[n] = std::move(m);
  trusted_[n] = is_trusted;
}

double BlockOperator::norm() const {
  double mx = 0.0;
  for (const auto& [n, m] : blocks_) {
    if (trusted(n)) mx = std::max(mx, spectral_norm(m));
  }
  return mx;
}

double BlockOperator::block_norm(int n) const {
  auto it = blocks_.find(n);
  return it == blocks_.end() ? 0.0 : spectral_norm(it->second);
}

BlockOperator BlockOperator::adjoint() const {
  BlockOperator out(frame_, -shift_);
  for (const auto& [n, m] : blocks_) out.set_block(n + shift_, m.adjoint(), trusted(n));
  return out;
}

BlockOperator& BlockOperator::operator*=(Complex s) {
  for (auto& [n, m] : blocks_) m *= s;
  return *this;
}

BlockOperator& BlockOperator::operator+=(const BlockOperator& other) {
  if (!frame_.same_as(other.frame_)) throw DomainError("BlockOperator: frames differ");
  if (shift_ != other.shift_) throw DomainError("BlockOperator: shifts differ");
  for (const auto& [n, m] : other.blocks_) {
    auto it = blocks_.find(n);
    if (it == blocks_.end()) {
      blocks_[n] = m;
      trusted_[n] = other.trusted(n);
    } else {
      it->second += m;
      trusted_[n] = trusted_[n] && other.trusted(n);
    }
  }
  return *this;
}

// --------------------------------------------------------------- compression

BlockOperator compress_multiplier(const HPoly& p, const QuotientFrame& frame) {
  if (p.is_zero()) throw DomainError("compress_multiplier: zero polynomial has no degree");
  if (p.dim() != frame.dim()) throw DomainError("compress_multiplier: dimension mismatch");
  const int e = *p.degree();
  const int top = frame.max_degree() - e;
  BlockOperator op(frame, e);
  if (top < 0) return op;
  std::vector<Matrix> blocks(top + 1);
  parallel_for(0, top + 1, [&](int n) {
    const Matrix& src = frame.basis(n);
    const Matrix& dst = frame.basis(n + e);
    if (src.cols() == 0 || dst.cols() == 0) {
      blocks[n] = Matrix(dst.cols(), src.cols());
      return;
    }
    if (e == 0) {
      blocks[n] = p.terms().begin()->second * Matrix::Identity(dst.cols(), src.cols());
      return;
    }
    const Matrix image = multiplication_matrix(p, n) * src;
    blocks[n] = dst.adjoint() * image;
  });
  // target degree n + e <= D is computed exactly, so every stored block is trusted
  for (int n = 0; n <= top; ++n) op.set_block(n, std::move(blocks[n]), true);
  return op;
}

void OperatorSum::add(BlockOperator op) {
  if (!frame_.same_as(op.frame())) throw DomainError("OperatorSum: frames differ");
  auto it = parts_.find(op.shift());
  if (it == parts_.end()) {
    parts_.emplace(op.shift(), std::move(op));
  } else {
    it->second += op;
  }
}

double OperatorSum::norm() const {
  if (parts_.size() == 1) return parts_.begin()->second.norm();
  const auto dims = frame_.dims();
  std::vector<Eigen::Index> offset(dims.size() + 1, 0);
  for (std::size_t n = 0; n < dims.size(); ++n) offset[n + 1] = offset[n] + dims[n];
  Matrix full = Matrix::Zero(offset.back(), offset.back());
  for (const auto& [shift, op] : parts_) {
    for (const auto& [n, m] : op.blocks()) {
      if (!op.trusted(n)) continue;
      full.block(offset[n + shift], offset[n], m.rows(), m.cols()) += m;
    }
  }
  return spectral_norm(full);
}

std::map<int, double> OperatorSum::column_norms() const {
  std::map<int, double> out;
  for (int n = 0; n <= frame_.max_degree(); ++n) {
    Eigen::Index rows = 0;
    bool any = false;
    for (const auto& [shift, op] : parts_) {
      if (op.trusted(n)) {
        rows += op.block(n).rows();
        any = true;
      }
    }
    if (!any) continue;
    Matrix stacked(rows, frame_.block_dim(n));
    Eigen::Index r = 0;
    for (const auto& [shift, op] : parts_) {
      if (!op.trusted(n)) continue;
      const Matrix& m = op.block(n);
      stacked.middleRows(r, m.rows()) = m;
      r += m.rows();
    }
    out[n] = spectral_norm(stacked);
  }
  return out;
}

OperatorSum compress_general(const GradedPoly& f, const QuotientFrame& frame) {
  if (f.dim() != frame.dim()) throw DomainError("compress_general: dimension mismatch");
  std::string over;
  for (const auto& [deg, part] : f.parts()) {
    if (deg > frame.max_degree()) over += (over.empty() ? "" : ", ") + std::to_string(deg);
  }
  if (!over.empty()) {
    throw DomainError("compress_general: parts of degree " + over +
                      " exceed the frame truncation " + std::to_string(frame.max_degree()));
  }
  OperatorSum sum(frame);
  for (const auto& [deg, part] : f.parts()) sum.add(compress_multiplier(part, frame));
  return sum;
}

BlockOperator commutator(const BlockOperator& a, const BlockOperator& b) {
  if (!a.frame().same_as(b.frame())) throw DomainError("commutator: frames differ");
  const QuotientFrame& frame = a.frame();
  const int ea = a.shift();
  const int eb = b.shift();
  const int shift = eb - ea;
  const int top = frame.max_degree();
  BlockOperator out(frame, shift);
  std::vector<int> degrees;
  for (int n = 0; n <= top; ++n) {
    if (n + shift >= 0 && n + shift <= top) degrees.push_back(n);
  }
  std::vector<Matrix> blocks(degrees.size());
  std::vector<char> ok(degrees.size(), 0);
  parallel_for(0, static_cast<int>(degrees.size()), [&](int idx) {
    const int n = degrees[idx];
    Matrix m = Matrix::Zero(frame.block_dim(n + shift), frame.block_dim(n));
    bool exact = true;
    // A^* B : n -> n + eb -> n + eb - ea
    const int ka = n + eb - ea;
    if (b.has_block(n) && a.has_block(ka)) {
      m += a.block(ka).adjoint() * b.block(n);
      exact = exact && b.trusted(n) && a.trusted(ka);
    } else {
      exact = false;
    }
    // B A^* : n -> n - ea -> n - ea + eb
    const int kb = n - ea;
    if (kb >= 0) {
      if (a.has_block(kb) && b.has_block(kb)) {
        m -= b.block(kb) * a.block(kb).adjoint();
        exact = exact && a.trusted(kb) && b.trusted(kb);
      } else {
        exact = false;
      }
    }
    blocks[idx] = std::move(m);
    ok[idx] = exact;
  });
  for (std::size_t idx = 0; idx < degrees.size(); ++idx) {
    out.set_block(degrees[idx], std::move(blocks[idx]), ok[idx] != 0);
  }
  return out;
}

BlockOperator commutator_blocks(int i, int j, const QuotientFrame& frame) {
  const int d = frame.dim();
  if (i < 0 || i >= d || j < 0 || j >= d) {
    throw DomainError("commutator_blocks: coordinate out of range");
  }
  const auto si = compress_multiplier(HPoly::variable(d, i), frame);
  if (i == j) return commutator(si, si);
  return commutator(si, compress_multiplier(HPoly::variable(d, j), frame));
}

}  // namespace qml
