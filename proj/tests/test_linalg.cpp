#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qml/linalg.hpp"

using namespace qml;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

TEST(OrthRange, RankAndOrthonormality) {
  std::mt19937_64 rng(1);
  for (auto [rows, cols, rank] : {std::tuple{30, 8, 5}, std::tuple{8, 30, 6}, std::tuple{200, 12, 12},
                                  std::tuple{40, 40, 17}}) {
    const Matrix m = random_matrix(rows, rank, rng) * random_matrix(rank, cols, rng);
    const Matrix q = orth_range(m);
    EXPECT_EQ(q.cols(), rank);
    EXPECT_EQ(q.cols(), oracle::rank(m));
    EXPECT_LT((q.adjoint() * q - Matrix::Identity(q.cols(), q.cols())).norm(), 1e-12);
    EXPECT_LT((m - q * (q.adjoint() * m)).norm(), 1e-10 * m.norm());
  }
}

TEST(NullSpace, AnnihilatesAndCompletesRank) {
  std::mt19937_64 rng(2);
  for (auto [rows, cols, rank] : {std::tuple{30, 8, 5}, std::tuple{5, 12, 5}, std::tuple{234, 35, 22}}) {
    const Matrix m = random_matrix(rows, rank, rng) * random_matrix(rank, cols, rng);
    const Matrix k = null_space(m);
    EXPECT_EQ(k.cols(), cols - rank);
    EXPECT_LT((m * k).norm(), 1e-10 * m.norm());
    EXPECT_LT((k.adjoint() * k - Matrix::Identity(k.cols(), k.cols())).norm(), 1e-12);
  }
  EXPECT_EQ(null_space(Matrix(0, 4)).cols(), 4);
  EXPECT_EQ(null_space(Matrix::Zero(3, 4)).cols(), 4);
}

TEST(NullSpace, ExactTriangularFactorStaysFinite) {
  // structured input with exact zeros; the result must be finite and exact
  Matrix m = Matrix::Zero(80, 30);
  for (int j = 0; j < 30; ++j) {
    for (int i = 0; i <= j && i < 80; ++i) m(i, j) = (i + j) % 3 == 0 ? 0.0 : 1.0 / (1 + i + j);
  }
  const Matrix k = null_space(m);
  EXPECT_TRUE(k.allFinite());
  EXPECT_EQ(k.cols(), 30 - oracle::rank(m));
}

TEST(Complement, IsOrthogonalAndSquare) {
  std::mt19937_64 rng(3);
  const Matrix q = orth_range(random_matrix(10, 4, rng));
  const Matrix c = complement(q, 10);
  ASSERT_EQ(c.cols(), 6);
  Matrix u(10, 10);
  u << q, c;
  EXPECT_LT((u.adjoint() * u - Matrix::Identity(10, 10)).norm(), 1e-12);
  EXPECT_EQ(complement(Matrix(5, 0), 5).cols(), 5);
}

TEST(SubspaceDistance, BasisIndependent) {
  std::mt19937_64 rng(4);
  const Matrix q = orth_range(random_matrix(9, 3, rng));
  const Matrix rot = orth_range(random_matrix(3, 3, rng));
  EXPECT_LT(subspace_distance(q, q * rot), 1e-12);
  const Matrix other = orth_range(random_matrix(9, 3, rng));
  EXPECT_GT(subspace_distance(q, other), 0.1);
}

TEST(SingularValues, DescendingAndMatchSpectralNorm) {
  std::mt19937_64 rng(5);
  const Matrix m = random_matrix(7, 4, rng);
  const Eigen::VectorXd s = singular_values(m);
  for (Eigen::Index i = 1; i < s.size(); ++i) EXPECT_GE(s(i - 1), s(i));
  EXPECT_DOUBLE_EQ(spectral_norm(m), s(0));
  EXPECT_DOUBLE_EQ(spectral_norm(Matrix(0, 0)), 0.0);
}
