#include "speedlab/corpus.hpp"

#include <gtest/gtest.h>

#include "speedlab/error.hpp"

namespace speedlab {
namespace {

Rational q(const char* s) { return Rational::parse(s); }

TEST(Corpus, EveryEntrySatisfiesItsClass) {
  for (const auto& e : builtin_corpus()) {
    Approximation a = corpus_real(e.name);
    auto rep = verify_class(a, 60);
    EXPECT_TRUE(rep.ok) << e.name << " violates at " << rep.first_violation.value_or(0);
    for (std::size_t s = 0; s <= 60; ++s) {
      EXPECT_GE(a.term(s), Rational(0)) << e.name;
      EXPECT_LE(a.term(s), Rational(1)) << e.name;
    }
  }
}

TEST(Corpus, DeclaredLimitsAreApproached) {
  for (const auto& e : builtin_corpus()) {
    Approximation a = corpus_real(e.name);
    if (!a.declared_limit()) continue;
    std::size_t far = e.spec.family == "slowed" ? 400 : 80;
    EXPECT_LT(abs(*a.declared_limit() - a.term(far)), pow2(-8)) << e.name;
  }
}

TEST(Corpus, GeometricQuarter) {
  Approximation a = corpus_real("geometric-quarter");
  EXPECT_EQ(a.class_tag(), ClassTag::left_ce);
  EXPECT_EQ(a.declared_limit(), q("1/2"));
  for (std::size_t s = 0; s < 20; ++s) {
    EXPECT_EQ(a.term(s), Rational(1, 2) - pow2(-2 * static_cast<long>(s) - 1));
  }
}

TEST(Corpus, OscillatorAlternatesAroundLimit) {
  Approximation a = corpus_real("oscillate-half");
  EXPECT_EQ(a.class_tag(), ClassTag::dce);
  EXPECT_EQ(a.variation_bound(), Rational(4));
  for (std::size_t s = 1; s < 30; ++s) {
    bool above = a.term(s) > q("1/2");
    EXPECT_EQ(above, s % 2 == 0) << s;
  }
  EXPECT_LE(variation(a, 200), Rational(4));
}

TEST(Corpus, DifferenceBoundCoversBothParts) {
  Approximation a = corpus_real("difference-basic");
  ASSERT_TRUE(a.variation_bound());
  EXPECT_EQ(a.declared_limit(), q("3/4"));
  EXPECT_LE(variation(a, 300), *a.variation_bound());
}

TEST(Corpus, TruncationTerms) {
  Approximation a = corpus_real("truncation-third");
  EXPECT_EQ(a.term(0), q("1/4"));
  EXPECT_EQ(a.term(1), q("5/16"));
  EXPECT_EQ(a.term(2), q("21/64"));
}

TEST(Corpus, ParametrizedFamilies) {
  CorpusSpec spec{"geometric", {{"alpha", "3/4"}, {"q", "1/3"}, {"c", "1/2"}}};
  Approximation a = make_corpus_real(spec);
  EXPECT_EQ(a.term(0), q("1/4"));
  EXPECT_EQ(a.term(1), q("3/4") - q("1/6"));
  EXPECT_EQ(a.provenance().family, "geometric");

  CorpusSpec stalled{"stalled", {{"base", "geometric-half"}, {"repeat", "3"}}};
  Approximation b = make_corpus_real(stalled);
  EXPECT_EQ(b.term(2), b.term(0));
  EXPECT_NE(b.term(3), b.term(2));
}

TEST(Corpus, UnknownNamesAreReported) {
  try {
    corpus_real("no-such-real");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_family);
  }
  EXPECT_THROW(make_corpus_real(CorpusSpec{"spiral", {}}), Error);
  EXPECT_EQ(corpus_families().size(), 8u);
}

TEST(Corpus, SquaresSeriesHasNoDeclaredLimit) {
  Approximation a = corpus_real("series-squares");
  EXPECT_FALSE(a.declared_limit());
  EXPECT_EQ(a.term(0), Rational(0));
  EXPECT_EQ(a.term(1), q("1/2"));
  EXPECT_EQ(a.term(2), q("1/2") + q("1/4"));
}

}  // namespace
}  // namespace speedlab
