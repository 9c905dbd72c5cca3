#include <gtest/gtest.h>

#include "dampex/multi_index.hpp"

using dampex::MultiIndex;

TEST(MultiIndex, OrderFactorialAndParity) {
  const MultiIndex a{2, 0, 3};
  EXPECT_EQ(a.order(), 5);
  EXPECT_DOUBLE_EQ(a.factorial(), 12.0);
  EXPECT_FALSE(a.all_even());
  EXPECT_TRUE(MultiIndex({2, 4}).all_even());
  EXPECT_EQ(a.doubled(), MultiIndex({4, 0, 6}));
  EXPECT_TRUE(MultiIndex({1, 0, 2}).fits_in(a));
  EXPECT_FALSE(MultiIndex({0, 1, 0}).fits_in(a));
}

TEST(MultiIndex, CountsMatchBinomials) {
  // #{|alpha| = m} in n variables is C(m + n - 1, n - 1).
  EXPECT_EQ(dampex::indices_of_order(1, 7).size(), 1u);
  EXPECT_EQ(dampex::indices_of_order(2, 7).size(), 8u);
  EXPECT_EQ(dampex::indices_of_order(3, 4).size(), 15u);
  EXPECT_EQ(dampex::indices_up_to(3, 2).size(), 10u);
  EXPECT_TRUE(dampex::indices_of_order(2, -1).empty());
  for (const auto& a : dampex::indices_of_order(3, 6)) EXPECT_EQ(a.order(), 6);
}

TEST(MultiIndex, MonomialAndIPower) {
  const double x[] = {2.0, -1.0};
  EXPECT_DOUBLE_EQ(dampex::monomial(MultiIndex{3, 1}, x), -8.0);
  EXPECT_DOUBLE_EQ(dampex::monomial(MultiIndex{0, 0}, x), 1.0);
  EXPECT_EQ(dampex::i_power(0), std::complex<double>(1, 0));
  EXPECT_EQ(dampex::i_power(1), std::complex<double>(0, 1));
  EXPECT_EQ(dampex::i_power(2), std::complex<double>(-1, 0));
  EXPECT_EQ(dampex::i_power(7), std::complex<double>(0, -1));
}

TEST(MultiIndex, IntegerPartFloors) {
  EXPECT_EQ(dampex::integer_part(2.5), 2);
  EXPECT_EQ(dampex::integer_part(3.0), 3);
  EXPECT_EQ(dampex::integer_part(0.0), 0);
}

TEST(MultiIndex, RejectsBadDimension) {
  EXPECT_ANY_THROW(MultiIndex(4));
  EXPECT_ANY_THROW(MultiIndex(0));
}
