#include "speedlab/approximations.hpp"

#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "speedlab/corpus.hpp"
#include "speedlab/error.hpp"

namespace speedlab {
namespace {

Rational q(const char* s) { return Rational::parse(s); }

std::vector<Rational> qs(std::initializer_list<const char*> items) {
  std::vector<Rational> out;
  for (const char* s : items) out.push_back(q(s));
  return out;
}

TEST(ClassTag, ParseAndPrint) {
  EXPECT_EQ(parse_class_tag("LeftCE"), ClassTag::left_ce);
  EXPECT_EQ(parse_class_tag("dce"), ClassTag::dce);
  EXPECT_EQ(parse_class_tag("rce"), ClassTag::right_ce);
  EXPECT_EQ(parse_class_tag("ca"), ClassTag::ca);
  EXPECT_EQ(to_string(ClassTag::left_ce), "LeftCE");
  EXPECT_THROW(parse_class_tag("LeftCEE"), Error);
}

TEST(Approximation, FiniteStopsAtItsEnd) {
  auto a = Approximation::finite(ClassTag::ca, qs({"0", "1/2"}));
  EXPECT_EQ(a.term(1), q("1/2"));
  EXPECT_FALSE(a.has_term(2));
  try {
    a.term(2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::horizon_exhausted);
  }
}

TEST(Approximation, ExtenderRunsInOrderOnce) {
  std::vector<std::size_t> calls;
  Approximation a(ClassTag::ca, [&calls](std::size_t s) {
    calls.push_back(s);
    return Rational(static_cast<long>(s), 100);
  });
  a.term(3);
  a.term(1);
  a.term(5);
  EXPECT_EQ(calls, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(a.materialized(), 6u);
}

TEST(Approximation, RejectsTermsOutsideUnitInterval) {
  auto a = Approximation::finite(ClassTag::ca, qs({"1/2", "3/2"}));
  EXPECT_THROW(a.term(1), Error);
}

TEST(VerifyClass, Examples) {
  auto ok = verify_class(Approximation::finite(ClassTag::left_ce, qs({"0", "1/4", "1/4", "1/2"})), 3);
  EXPECT_TRUE(ok.ok);
  EXPECT_EQ(ok.variation, q("1/2"));

  auto bad = verify_class(Approximation::finite(ClassTag::left_ce, qs({"0", "1/2", "1/4"})), 2);
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.first_violation, 2u);

  auto dce = verify_class(
      Approximation::finite(ClassTag::dce, qs({"1/2", "1/4", "1/2", "1/4"}), std::nullopt, Rational(2)), 3);
  EXPECT_TRUE(dce.ok);
  EXPECT_EQ(dce.variation, q("3/4"));

  auto right = verify_class(Approximation::finite(ClassTag::right_ce, qs({"1", "1/2", "3/4"})), 2);
  EXPECT_EQ(right.first_violation, 2u);

  auto over = verify_class(
      Approximation::finite(ClassTag::dce, qs({"0", "1", "0"}), std::nullopt, Rational(3, 2)), 2);
  EXPECT_FALSE(over.ok);
  EXPECT_EQ(over.first_violation, 2u);
}

TEST(Normalize, DistinctDyadicInputUnchanged) {
  auto a = corpus_real("geometric-half");
  auto n = normalize_distinct_dyadic(a);
  for (std::size_t s = 0; s < 30; ++s) EXPECT_EQ(n.term(s), a.term(s));
  EXPECT_EQ(n.class_tag(), ClassTag::left_ce);
}

TEST(Normalize, LeftCeRationalInput) {
  // 1/3, 1/3, 5/12, ... towards 1/2
  auto a = Approximation(
      ClassTag::left_ce,
      [](std::size_t s) { return s == 0 ? q("1/3") : Rational(1, 2) - Rational(1, 6) * pow2(-static_cast<long>(s - 1)); },
      q("1/2"));
  auto n = normalize_distinct_dyadic(a);
  EXPECT_EQ(n.declared_limit(), q("1/2"));
  for (std::size_t s = 0; s < 40; ++s) {
    EXPECT_TRUE(n.term(s).is_dyadic());
    if (s > 0) EXPECT_LT(n.term(s - 1), n.term(s));
    EXPECT_LT(n.term(s), q("1/2"));
  }
  EXPECT_TRUE(verify_class(n, 39).ok);
  EXPECT_LT(q("1/2") - n.term(39), pow2(-30));
}

TEST(Normalize, ConstantInputBecomesDistinct) {
  auto a = corpus_real("constant-third");
  auto n = normalize_distinct_dyadic(a);
  std::set<Rational> seen;
  for (std::size_t s = 0; s < 40; ++s) {
    EXPECT_TRUE(n.term(s).is_dyadic());
    EXPECT_TRUE(seen.insert(n.term(s)).second) << s;
  }
  EXPECT_LT(abs(n.term(39) - q("1/3")), pow2(-30));
}

TEST(Normalize, DceBoundGrowsByTwo) {
  auto a = corpus_real("oscillate-third");
  auto n = normalize_distinct_dyadic(a);
  ASSERT_TRUE(n.variation_bound());
  EXPECT_EQ(*n.variation_bound(), *a.variation_bound() + Rational(2));
  EXPECT_TRUE(verify_class(n, 60).ok);
}

TEST(ComputableOrder, BuiltIns) {
  EXPECT_EQ(ComputableOrder::identity()(7), 7u);
  EXPECT_EQ(ComputableOrder::successor()(7), 8u);
  EXPECT_EQ(ComputableOrder::affine(2, 1)(7), 15u);
  auto t = ComputableOrder::table("t", {0, 0, 3});
  EXPECT_EQ(t.values(5), (std::vector<std::size_t>{0, 0, 3, 4, 5, 6}));
  EXPECT_TRUE(t.verify(10).nondecreasing);
  EXPECT_TRUE(t.verify(10).unbounded_witness);
}

TEST(ComputableOrder, DecreasingRuleReported) {
  auto bad = ComputableOrder::table("bad", {0, 5, 3});
  auto rep = bad.verify(5);
  EXPECT_FALSE(rep.nondecreasing);
  EXPECT_EQ(rep.first_violation, 2u);
}

TEST(Compose, Examples) {
  auto a = corpus_real("geometric-half");
  auto b = compose_order(a, ComputableOrder::affine(2, 0));
  for (std::size_t s = 0; s < 10; ++s) EXPECT_EQ(b.term(s), Rational(1, 2) - pow2(-2 * static_cast<long>(s) - 1));
  auto same = compose_order(a, ComputableOrder::identity());
  for (std::size_t s = 0; s < 10; ++s) EXPECT_EQ(same.term(s), a.term(s));
  auto fin = compose_order(Approximation::finite(ClassTag::left_ce, qs({"0", "1/4", "3/8", "7/16"})),
                           ComputableOrder::successor());
  EXPECT_EQ(fin.term(0), q("1/4"));
  EXPECT_EQ(fin.term(2), q("7/16"));
  EXPECT_EQ(b.class_tag(), ClassTag::left_ce);
  EXPECT_EQ(b.declared_limit(), q("1/2"));
}

TEST(TwoSided, TruncationsOfOneThird) {
  auto a = Approximation::finite(ClassTag::left_ce, qs({"1/4", "5/16", "21/64"}), q("1/3"));
  auto t = two_sided(a);
  EXPECT_EQ(t.term(0), q("1/4"));
  EXPECT_EQ(t.term(1), q("3/8"));
  EXPECT_LT(t.term(0), q("1/3"));
  EXPECT_GT(t.term(1), q("1/3"));
}

TEST(TwoSided, ClampsAtZero) {
  auto a = Approximation::finite(ClassTag::ca, qs({"1/2", "1/16"}));
  auto t = two_sided(a);
  EXPECT_EQ(t.term(0), Rational(0));  // h = 1, 1/16 - 1/2 clamps
}

TEST(TwoSided, RejectsRepeatedTerms) {
  auto a = Approximation::finite(ClassTag::ca, qs({"1/2", "1/2"}));
  EXPECT_THROW(two_sided(a).term(0), Error);
}

TEST(TwoSided, StableStagesBracket) {
  for (const char* name : {"truncation-third", "geometric-third", "series-linear"}) {
    auto a = normalize_distinct_dyadic(corpus_real(name));
    auto rep = two_sided_report(a, 50);
    EXPECT_FALSE(rep.stable.empty()) << name;
    std::size_t bracketing = 0;
    for (const auto& st : rep.stable) bracketing += st.brackets ? 1 : 0;
    EXPECT_GE(bracketing, rep.stable.size()) << name;
    EXPECT_TRUE(rep.all_stable_bracket) << name;
  }
}

}  // namespace
}  // namespace speedlab
