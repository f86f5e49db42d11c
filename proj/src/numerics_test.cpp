#include "speedlab/numerics.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "speedlab/error.hpp"

namespace speedlab {
namespace {

Rational q(const char* s) { return Rational::parse(s); }

TEST(Rational, ParsesEveryNotation) {
  EXPECT_EQ(q("3/4"), Rational(3, 4));
  EXPECT_EQ(q("-6/8"), Rational(-3, 4));
  EXPECT_EQ(q("5/2^3"), Rational(5, 8));
  EXPECT_EQ(q("0.375"), Rational(3, 8));
  EXPECT_EQ(q("7"), Rational(7));
  EXPECT_THROW(q("1/0"), Error);
  EXPECT_THROW(q("abc"), Error);
  EXPECT_THROW(q(""), Error);
}

TEST(Rational, DyadicDetection) {
  EXPECT_TRUE(q("5/8").is_dyadic());
  EXPECT_TRUE(q("3").is_dyadic());
  EXPECT_FALSE(q("1/3").is_dyadic());
  EXPECT_TRUE(q("3/12").is_dyadic());
}

TEST(Rational, Helpers) {
  EXPECT_EQ(abs(q("-1/3")), q("1/3"));
  EXPECT_EQ(clamp_unit(q("5/4")), Rational(1));
  EXPECT_EQ(clamp_unit(q("-1/4")), Rational(0));
  EXPECT_EQ(pow2(-3), q("1/8"));
  EXPECT_EQ(pow2(4), Rational(16));
  EXPECT_EQ(floor_scaled(q("1/3"), 4), 5);  // 16/3
  EXPECT_EQ(floor_scaled(q("-1/3"), 2), -2);
}

TEST(Dyadic, CanonicalForm) {
  Dyadic d = Dyadic::from_rational(q("6/16"));
  EXPECT_EQ(d.numerator(), 3);
  EXPECT_EQ(d.exponent(), 3u);
  EXPECT_EQ(d.str(), "3/2^3");
  EXPECT_EQ(d.decimal(), "0.375");
  EXPECT_EQ(Dyadic::parse("12/2^5"), Dyadic(3, 3));
  EXPECT_EQ(Dyadic(4, 2), Dyadic(1, 0));
  EXPECT_THROW(Dyadic::from_rational(q("1/3")), Error);
}

TEST(BitString, DyadicRoundTrip) {
  EXPECT_EQ(BitString::from_dyadic(Dyadic::parse("11/16")).str(), "1011");
  EXPECT_EQ(BitString("1011").to_dyadic(), Dyadic::parse("11/16"));
  EXPECT_EQ(BitString("0100").to_dyadic(), Dyadic::parse("1/4"));
  EXPECT_EQ(BitString("101").measure(), Dyadic::parse("1/8"));
  EXPECT_THROW(BitString("102"), Error);
}

TEST(BitString, Expansion) {
  EXPECT_EQ(BitString::expansion(q("1/3"), 6).str(), "010101");
  EXPECT_EQ(BitString::expansion(q("1/2"), 3).str(), "100");
  EXPECT_EQ(BitString::expansion(q("2/7"), 6).str(), "010010");
  EXPECT_TRUE(BitString("0101").is_prefix_of_real(q("1/3")));
  EXPECT_FALSE(BitString("011").is_prefix_of_real(q("1/3")));
  EXPECT_TRUE(BitString("10").is_prefix_of_real(q("1/2")));
  EXPECT_FALSE(BitString("01").is_prefix_of_real(q("1/2")));
}

TEST(BitString, PrefixesAndExtensions) {
  EXPECT_TRUE(BitString("01").is_prefix_of(BitString("011")));
  EXPECT_TRUE(BitString("01").is_prefix_of(BitString("01")));
  EXPECT_FALSE(BitString("011").is_prefix_of(BitString("01")));
  auto ext = BitString("1").extensions(3);
  ASSERT_EQ(ext.size(), 4u);
  EXPECT_EQ(ext.front().str(), "100");
  EXPECT_EQ(ext.back().str(), "111");
  EXPECT_EQ(BitString("10").extensions(2), std::vector<BitString>{BitString("10")});
}

TEST(Interval, RejectsReversedEndpoints) {
  EXPECT_THROW(Interval(q("1/2"), q("1/4")), Error);
  Interval I(q("1/4"), q("1/2"));
  EXPECT_TRUE(I.contains(q("1/4")));
  EXPECT_TRUE(I.contains(q("1/2")));
  EXPECT_FALSE(I.contains(q("3/4")));
  EXPECT_EQ(I.length(), q("1/4"));
}

TEST(MsbDiff, Examples) {
  EXPECT_EQ(msb_diff(Dyadic::parse("10/16"), Dyadic::parse("8/16")), 3u);
  EXPECT_EQ(msb_diff(Dyadic::parse("1/2"), Dyadic::parse("0")), 1u);
  EXPECT_EQ(msb_diff(Dyadic::parse("11/16"), Dyadic::parse("5/8")), 4u);
  EXPECT_THROW(msb_diff(Dyadic::parse("1/4"), Dyadic::parse("1/4")), Error);
}

TEST(MsbDiff, AgreesWithBitScan) {
  for (long x = 0; x < 64; ++x) {
    for (long y = 0; y < 64; ++y) {
      if (x == y) continue;
      std::string bx = BitString::expansion(Rational(x, 64), 6).str();
      std::string by = BitString::expansion(Rational(y, 64), 6).str();
      std::size_t h = 1;
      while (bx[h - 1] == by[h - 1]) ++h;
      EXPECT_EQ(msb_diff(Dyadic(x, 6), Dyadic(y, 6)), h) << x << ' ' << y;
    }
  }
}

TEST(StringSets, Measure) {
  std::vector<BitString> one{BitString("0")};
  std::vector<BitString> halves{BitString("00"), BitString("01")};
  std::vector<BitString> three{BitString("0"), BitString("10"), BitString("110")};
  EXPECT_EQ(string_set_measure(one), Dyadic::parse("1/2"));
  EXPECT_EQ(string_set_measure(halves), Dyadic::parse("1/2"));
  EXPECT_EQ(string_set_measure(three), Dyadic::parse("7/8"));
  std::vector<BitString> bad{BitString("0"), BitString("01")};
  EXPECT_THROW(string_set_measure(bad), Error);
}

TEST(StringSets, PrefixFree) {
  std::vector<BitString> ok{BitString("0"), BitString("1")};
  std::vector<BitString> nested{BitString("0"), BitString("01")};
  std::vector<BitString> dup{BitString("10"), BitString("10")};
  std::vector<BitString> none;
  EXPECT_TRUE(is_prefix_free(ok));
  EXPECT_FALSE(is_prefix_free(nested));
  EXPECT_FALSE(is_prefix_free(dup));
  EXPECT_TRUE(is_prefix_free(none));
}

}  // namespace
}  // namespace speedlab
