#include <gtest/gtest.h>

#include "cdpp/metrics.hpp"
#include "cdpp/rng.hpp"
#include "oracles.hpp"

using namespace cdpp;

namespace {

bool fractions_agree(const AriFraction& lib, const oracle::Fraction& ref) {
  if (ref.den == 0 || lib.denominator == 0) return ref.den == 0 && lib.denominator == 0;
  return lib.numerator * ref.den == ref.num * lib.denominator;
}

std::vector<int> random_labels(std::size_t n, int k, RngStream& rng) {
  std::vector<int> v(n);
  for (auto& x : v) x = static_cast<int>(rng.uniform_int(0, static_cast<std::uint64_t>(k - 1)));
  return v;
}

}  // namespace

TEST(Ari, IdenticalUpToRelabelling) {
  EXPECT_DOUBLE_EQ(ari(std::vector<int>{0, 0, 1, 1, 2}, std::vector<int>{7, 7, 3, 3, 1}), 1.0);
}

TEST(Ari, CrossedPairsGiveMinusHalf) {
  EXPECT_DOUBLE_EQ(ari(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 0, 1}), -0.5);
}

TEST(Ari, DegenerateDenominatorIsOne) {
  EXPECT_DOUBLE_EQ(ari(std::vector<int>{0, 0, 0}, std::vector<int>{1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(ari(std::vector<int>{0, 1, 2}, std::vector<int>{2, 0, 1}), 1.0);
}

TEST(Ari, LengthMismatchThrows) {
  try {
    ari(std::vector<int>{0, 1}, std::vector<int>{0, 1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(Ari, StringLabelsWork) {
  const std::vector<std::string> a{"x", "x", "y"};
  const std::vector<long> b{4, 4, 9};
  EXPECT_DOUBLE_EQ(ari(std::span<const std::string>(a), std::span<const long>(b)), 1.0);
}

TEST(Ari, MatchesPairCountOracleExactly) {
  RngStream rng(77, 0);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 2 + rng.uniform_int(0, 120);
    const auto a = random_labels(n, 1 + static_cast<int>(rng.uniform_int(0, 6)), rng);
    const auto b = random_labels(n, 1 + static_cast<int>(rng.uniform_int(0, 6)), rng);
    const auto lib = ari_fraction(contingency(std::span<const int>(a), std::span<const int>(b)));
    EXPECT_TRUE(fractions_agree(lib, oracle::pair_count_ari(a, b))) << "trial " << t;
  }
}

TEST(Ari, SymmetricAndBounded) {
  RngStream rng(78, 0);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_labels(50, 4, rng);
    const auto b = random_labels(50, 3, rng);
    EXPECT_DOUBLE_EQ(ari(a, b), ari(b, a));
    EXPECT_LE(ari(a, b), 1.0);
  }
}

TEST(Rn, Cases) {
  EXPECT_DOUBLE_EQ(rn(3, 3), 0.0);
  EXPECT_DOUBLE_EQ(rn(4, 1), 1.0);
  EXPECT_DOUBLE_EQ(rn(1, 4), -0.5);
  EXPECT_THROW(rn(0, 3), Error);
}
