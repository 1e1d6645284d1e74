#pragma once

// Truncated quotient frames and compressed multipliers as graded block
// operators.

#include <map>
#include <memory>
#include <vector>

#include "qml/ideal.hpp"

namespace qml {

/// Orthonormal quotient bases for degrees 0..D of one ideal. Copies share
/// identity; operators built on different frames never mix.
class QuotientFrame {
 public:
  QuotientFrame(GradedIdeal ideal, int max_degree);

  const GradedIdeal& ideal() const { return data_->ideal; }
  int dim() const { return data_->ideal.dim(); }
  int max_degree() const { return data_->max_degree; }
  const Matrix& basis(int n) const;
  int block_dim(int n) const { return static_cast<int>(basis(n).cols()); }
  std::vector<int> dims() const;

  bool same_as(const QuotientFrame& other) const { return data_ == other.data_; }

 private:
  struct Data {
    GradedIdeal ideal;
    int max_degree;
    std::vector<Matrix> bases;
  };
  std::shared_ptr<const Data> data_;
};

QuotientFrame build_frame(const GradedIdeal& ideal, int max_degree);

/// Block n maps frame degree n into degree n + shift. Blocks whose target
/// lies beyond the truncation are absent; trusted(n) says whether block n is
/// an exact block of the untruncated operator.
class BlockOperator {
 public:
  BlockOperator(QuotientFrame frame, int shift);

  const QuotientFrame& frame() const { return frame_; }
  int shift() const { return shift_; }
  bool degree_preserving() const { return shift_ == 0; }

  bool has_block(int n) const { return blocks_.count(n) > 0; }
  const Matrix& block(int n) const;
  bool trusted(int n) const;
  const std::map<int, Matrix>& blocks() const { return blocks_; }

  void set_block(int n, Matrix m, bool trusted);

  /// Largest trusted-block singular value.
  double norm() const;
  /// Largest singular value of block n (0 when absent).
  double block_norm(int n) const;

  BlockOperator adjoint() const;
  BlockOperator& operator*=(Complex s);
  /// Blockwise sum; operands must share frame and shift.
  BlockOperator& operator+=(const BlockOperator& other);

 private:
  QuotientFrame frame_;
  int shift_;
  std::map<int, Matrix> blocks_;
  std::map<int, bool> trusted_;
};

/// S_p = P M_p restricted to the quotient, for homogeneous p.
BlockOperator compress_multiplier(const HPoly& p, const QuotientFrame& frame);

/// Sum of compressions of the homogeneous parts, one operator per shift.
class OperatorSum {
 public:
  explicit OperatorSum(QuotientFrame frame) : frame_(std::move(frame)) {}
  const QuotientFrame& frame() const { return frame_; }
  const std::map<int, BlockOperator>& parts() const { return parts_; }
  void add(BlockOperator op);
  /// Largest singular value of the assembled trusted truncation.
  double norm() const;
  /// Per source degree: spectral norm of the column block of all parts.
  std::map<int, double> column_norms() const;

 private:
  QuotientFrame frame_;
  std::map<int, BlockOperator> parts_;
};

/// Compression of a sum of homogeneous parts. Parts of degree above the frame
/// budget raise an error naming the offending degrees.
OperatorSum compress_general(const GradedPoly& f, const QuotientFrame& frame);

/// [A^*, B] as a graded operator of shift B.shift - A.shift.
BlockOperator commutator(const BlockOperator& a, const BlockOperator& b);

/// [S_{z_i}^*, S_{z_j}]; coordinates zero-based.
BlockOperator commutator_blocks(int i, int j, const QuotientFrame& frame);

}  // namespace qml
