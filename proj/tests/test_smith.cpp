#include <gtest/gtest.h>

#include "nilext/smith.hpp"
#include "test_support.hpp"

using namespace nilext;

namespace {

void expect_valid_smith(const IntMatrix& A) {
  SmithForm s = smith_normal_form(A);
  EXPECT_EQ(s.U * A * s.V, s.D);
  EXPECT_EQ(s.U * s.U_inv, IntMatrix::identity(A.rows()));
  EXPECT_EQ(s.V * s.V_inv, IntMatrix::identity(A.cols()));
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j)
      if (i != j) EXPECT_EQ(s.D(i, j), 0);
  for (std::size_t i = 0; i + 1 < s.rank; ++i) EXPECT_EQ(s.diag(i + 1) % s.diag(i), 0);
  for (std::size_t i = 0; i < s.rank; ++i) EXPECT_GT(s.diag(i), 0);
  for (std::size_t i = s.rank; i < std::min(A.rows(), A.cols()); ++i) EXPECT_EQ(s.diag(i), 0);
}

}  // namespace

TEST(Smith, DiagonalSixFour) {
  SmithForm s = smith_normal_form(IntMatrix{{6, 0}, {0, 4}});
  EXPECT_EQ(s.diag(0), 2);
  EXPECT_EQ(s.diag(1), 12);
}

TEST(Smith, RandomMatricesSatisfyTheDecomposition) {
  nilext::testing::Rng rng(11);
  for (int it = 0; it < 300; ++it) {
    std::size_t m = nilext::testing::uniform(rng, 0, 5), n = nilext::testing::uniform(rng, 0, 5);
    IntMatrix A(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) A(i, j) = nilext::testing::uniform(rng, -9, 9);
    expect_valid_smith(A);
  }
}

TEST(Smith, SolveAndKernel) {
  IntMatrix A{{2, 4}, {6, 8}};
  auto y = solve_integer(A, {2, 6});
  ASSERT_TRUE(y);
  EXPECT_EQ(A.apply(*y), (std::vector<Int>{2, 6}));
  EXPECT_FALSE(solve_integer(IntMatrix{{2, 4}}, {1}));
  IntMatrix K = integer_kernel(IntMatrix{{1, 2, 3}});
  EXPECT_EQ(K.cols(), 2u);
  EXPECT_EQ((IntMatrix{{1, 2, 3}} * K), IntMatrix(1, 2));
}

TEST(Smith, LatticeExponentMode) {
  // rowspan{(4, 2)} + 6 Z^2: invariants gcd(4, 2, 6) = 2 and 6.
  SmithForm s = smith_normal_form(IntMatrix{{4, 2}}, false, 6);
  EXPECT_EQ(s.rank, 2u);
  EXPECT_EQ(s.diag(0), 2);
  EXPECT_EQ(s.diag(1), 6);
  EXPECT_THROW(smith_normal_form(IntMatrix{{1}}, true, 6), PreconditionError);

  // Same invariants as the plain reduction with the exponent rows appended.
  nilext::testing::Rng rng(29);
  for (int it = 0; it < 200; ++it) {
    std::size_t m = nilext::testing::uniform(rng, 0, 6), n = nilext::testing::uniform(rng, 1, 4);
    Int N = nilext::testing::uniform(rng, 1, 60);
    IntMatrix A(m + n, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) A(i, j) = nilext::testing::uniform(rng, -100, 100);
    for (std::size_t j = 0; j < n; ++j) A(m + j, j) = N;
    IntMatrix top(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) top(i, j) = A(i, j);
    SmithForm plain = smith_normal_form(A);
    SmithForm fast = smith_normal_form(top, false, N);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(fast.diag(i), plain.diag(i));
  }
}
