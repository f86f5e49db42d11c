#include "speedlab/constructions.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <string>

#include "speedlab/corpus.hpp"
#include "speedlab/error.hpp"

namespace speedlab {
namespace {

Rational q(const char* s) { return Rational::parse(s); }

std::string field(const StageRecord& rec, const std::string& key) {
  for (const auto& [k, v] : rec.fields) {
    if (k == key) return v;
  }
  return "";
}

const Assertion* find(const StageTrace& tr, const std::string& name) {
  for (const auto& a : tr.assertions) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

SolovayTest nested(const Rational& center, long count) {
  SolovayTest t;
  for (long i = 1; i <= count; ++i) {
    t.intervals.emplace_back(clamp_unit(center - pow2(-i)), clamp_unit(center + pow2(-i)));
  }
  t.budget = t.measure();
  return t;
}

TEST(StageTrace, Bookkeeping) {
  StageTrace tr;
  tr.record(3).set("x", q("1/2")).set("flag", true);
  EXPECT_TRUE(tr.check("ok", q("1/4"), Relation::lt, q("1/2")).holds);
  EXPECT_FALSE(tr.check("bad", q("1/2"), Relation::lt, q("1/2")).holds);
  EXPECT_TRUE(tr.check("ge", q("1/2"), Relation::ge, q("1/2")).holds);
  tr.note("k", std::size_t{7});
  EXPECT_FALSE(tr.all_hold());
  ASSERT_EQ(tr.failures().size(), 1u);
  EXPECT_EQ(tr.failures()[0]->name, "bad");
  EXPECT_EQ(tr.value("k"), "7");
  EXPECT_FALSE(tr.value("missing"));
  EXPECT_EQ(field(tr.records[0], "x"), "1/2");
  EXPECT_EQ(field(tr.records[0], "flag"), "true");
}

TEST(WeakSpeedTest, IdenticalPairBlocks) {
  auto a = corpus_real("geometric-half");
  auto out = weak_speed_test(a, a, q("1/2"), 8);
  ASSERT_GE(out.test.intervals.size(), 6u);
  for (std::size_t r = 0; r < 6; ++r) {
    EXPECT_EQ(out.f[r], r + 1);
    EXPECT_EQ(out.test.intervals[r].left(), a.term(r));
    EXPECT_EQ(out.test.intervals[r].right(), q("1/2"));
    EXPECT_TRUE(out.test.intervals[r].contains(q("1/2")));
  }
  EXPECT_TRUE(out.trace.all_hold());
  EXPECT_EQ(out.covering_blocks, out.test.intervals.size());
}

TEST(WeakSpeedTest, SmallRhoBarelyStretches) {
  auto a = corpus_real("geometric-half");
  auto b = compose_order(a, ComputableOrder::affine(2, 0));
  auto out = weak_speed_test(a, b, q("1/1000"), 40);
  for (const auto& rec : out.trace.records) {
    Rational width = Rational::parse(field(rec, "d")) - Rational::parse(field(rec, "c"));
    Rational length = Rational::parse(field(rec, "right")) - Rational::parse(field(rec, "left"));
    EXPECT_EQ(length, width * q("1000/999"));
  }
}

TEST(WeakSpeedTest, FasterPairCovers) {
  auto a = corpus_real("geometric-half");
  auto b = compose_order(a, ComputableOrder::affine(2, 0));
  auto out = weak_speed_test(a, b, q("1/2"), 200);
  EXPECT_TRUE(out.trace.all_hold());
  EXPECT_GE(4 * out.covering_blocks, out.test.intervals.size());
  for (std::size_t s = 1; s < out.f.size(); ++s) {
    EXPECT_GT(out.f[s], out.f[s - 1]);
    EXPECT_GE(a.term(out.f[s]), b.term(s));
  }
}

TEST(WeakSpeedTest, RejectsTermsAboveLimit) {
  auto osc = corpus_real("oscillate-half");
  EXPECT_THROW(weak_speed_test(osc, osc, q("1/2"), 10), Error);
}

SpeedupFromMlResult run_third(std::size_t horizon) {
  return speedup_from_ml(corpus_real("truncation-third"), disjointify(ml_test_for(q("1/3"), 60)), horizon);
}

TEST(SpeedupFromMl, FirstStage) {
  auto out = run_third(1);
  ASSERT_EQ(out.stages, 1u);
  const auto& rec = out.trace.records.at(0);
  EXPECT_EQ(rec.stage, 1u);
  EXPECT_EQ(field(rec, "j"), "1");
  EXPECT_EQ(field(rec, "i"), "1");
  EXPECT_EQ(field(rec, "sigma"), "010");
  EXPECT_EQ(field(rec, "k"), "1");
  EXPECT_EQ(field(rec, "delta"), "1/4");
  EXPECT_EQ(out.c.term(0), q("1/4"));
  EXPECT_EQ(out.c.term(1), q("1/4"));
  EXPECT_EQ(out.c.term(2), q("9/16"));
  EXPECT_EQ(out.c.term(3), q("5/16"));
}

TEST(SpeedupFromMl, DeltaAccountingAndTrueStages) {
  auto out = run_third(40);
  EXPECT_GE(out.stages, 20u);
  EXPECT_TRUE(out.trace.all_hold());
  Rational sum;
  std::set<std::string> ks;
  const Rational gamma = q("1/3");
  for (const auto& rec : out.trace.records) {
    sum += Rational::parse(field(rec, "delta"));
    if (field(rec, "true") != "true") continue;
    EXPECT_TRUE(ks.insert(field(rec, "k")).second);
    std::size_t s = rec.stage;
    long k = std::stol(field(rec, "k"));
    if (k == 0) continue;
    Rational ratio = abs(gamma - out.c.term(2 * s + 1)) / abs(gamma - out.c.term(2 * s));
    EXPECT_LE(ratio, Rational(1) / (pow2(k) - Rational(1)));
  }
  EXPECT_EQ(sum, out.delta_sum);
  EXPECT_LE(out.delta_sum, Rational(2));
}

TEST(SpeedupFromMl, StallsWhenStringsRunOut) {
  auto out = speedup_from_ml(corpus_real("truncation-third"), ml_test_for(q("1/3"), 4), 10);
  EXPECT_TRUE(out.stalled);
  EXPECT_LT(out.stages, 10u);
  EXPECT_TRUE(out.trace.value("stalled_at_stage"));
  EXPECT_TRUE(out.trace.all_hold());
}

TEST(SpeedupFromMl, RejectsRepeatedTerms) {
  EXPECT_THROW(speedup_from_ml(corpus_real("stalled-geometric"), ml_test_for(q("1/2"), 10), 5), Error);
}

TEST(ZeroSpeedup, GeometricSettles) {
  auto a = normalize_distinct_dyadic(corpus_real("geometric-half"));
  auto out = zero_speedup(a, 200, 6);
  EXPECT_TRUE(out.trace.all_hold());
  const Rational alpha = q("1/2");
  for (std::size_t s = 1; s <= 6; ++s) {
    const auto& info = out.indices.at(s);
    ASSERT_TRUE(info.ratio);
    EXPECT_EQ(*info.ratio, abs(alpha - a.term(info.g)) / abs(alpha - a.term(s)));
    EXPECT_LE(*info.ratio, Rational(1) / Rational(static_cast<long>(s)));
    ASSERT_TRUE(find(out.trace, "strict_pair_s" + std::to_string(s)));
    EXPECT_TRUE(find(out.trace, "strict_pair_s" + std::to_string(s))->holds);
  }
  EXPECT_EQ(out.b.term(0), a.term(0));
  EXPECT_EQ(out.b.term(1), a.term(0));
}

TEST(ZeroSpeedup, OutputPairsFollowAttention) {
  auto a = normalize_distinct_dyadic(corpus_real("geometric-half"));
  auto out = zero_speedup(a, 60, 3);
  for (const auto& rec : out.trace.records) {
    std::size_t i = rec.stage;
    std::size_t s = std::stoul(field(rec, "attended"));
    std::size_t g = std::stoul(field(rec, "g"));
    EXPECT_LE(s, i);
    EXPECT_EQ(out.b.term(2 * i), a.term(s));
    EXPECT_EQ(out.b.term(2 * i + 1), a.term(g));
  }
}

TEST(ZeroSpeedup, OccurrencesBoundedByAttention) {
  auto a = normalize_distinct_dyadic(corpus_real("geometric-third"));
  auto out = zero_speedup(a, 120, 4);
  std::map<Rational, std::size_t> occurrences;
  for (std::size_t n = 0; n < 2 * 121; ++n) ++occurrences[out.b.term(n)];
  for (std::size_t t = 0; t < out.indices.size(); ++t) {
    std::size_t allowed = out.indices[t].attention + t + (t == 0 ? 2 : 0);
    EXPECT_LE(occurrences[a.term(t)], allowed) << t;
  }
}

TEST(AppendedTests, ConvergingReplay) {
  auto a = corpus_real("geometric-half");
  SolovayTest t = nested(q("1/2"), 8);
  auto out = converging_test_from(t, a, 30);
  EXPECT_TRUE(out.trace.all_hold());
  std::set<std::size_t> used;
  for (std::size_t s = 0; s <= 30; ++s) {
    std::optional<std::size_t> expected;
    for (std::size_t i = 0; i <= s && i < t.intervals.size(); ++i) {
      if (!used.count(i) && t.intervals[i].contains(a.term(s))) {
        expected = i;
        break;
      }
    }
    if (expected) used.insert(*expected);
  }
  EXPECT_EQ(out.origin.size(), used.size());
  for (std::size_t n = 1; n < out.origin.size(); ++n) EXPECT_LT(out.origin[n - 1], out.origin[n]);
}

TEST(AppendedTests, ConstantInsideOneInterval) {
  auto a = corpus_real("constant-third");
  SolovayTest t{{Interval(q("0"), q("1/8")), Interval(q("1/4"), q("1/2")), Interval(q("3/4"), q("1"))}, q("1")};
  auto out = converging_test_from(t, a, 10);
  ASSERT_EQ(out.origin.size(), 1u);
  EXPECT_EQ(out.origin[0], 1u);
  EXPECT_EQ(out.stage[0], 1u);
}

TEST(AppendedTests, NothingContainsTheTerms) {
  SolovayTest t{{Interval(q("7/8"), q("1"))}, q("1/8")};
  auto out = converging_test_from(t, corpus_real("geometric-half"), 10);
  EXPECT_TRUE(out.test.intervals.empty());
  auto dce = dce_test_from(t, corpus_real("oscillate-third"), 10);
  EXPECT_TRUE(dce.test.intervals.empty());
  EXPECT_TRUE(dce.trace.all_hold());
}

TEST(AppendedTests, DceBoundOnOscillator) {
  auto a = corpus_real("oscillate-third");
  auto out = dce_test_from(nested(q("1/3"), 30), a, 60);
  EXPECT_TRUE(out.trace.all_hold());
  const auto* bound = find(out.trace, "endpoint_variation_bound");
  ASSERT_TRUE(bound);
  Rational lengths, gaps;
  for (std::size_t i = 0; i < out.test.intervals.size(); ++i) {
    lengths += out.test.intervals[i].length();
    if (i + 1 < out.test.intervals.size()) gaps += abs(out.test.intervals[i + 1].left() - out.test.intervals[i].right());
  }
  EXPECT_EQ(bound->lhs, lengths + gaps);
  EXPECT_EQ(bound->rhs, Rational(3) * lengths + variation(a, 60));
}

TEST(AppendedTests, DceRejectsPlainApproximation) {
  EXPECT_THROW(dce_test_from(nested(q("1/3"), 4), corpus_real("constant-third"), 5), Error);
}

TEST(AppendedTests, ClipLeft) {
  Interval I(q("1/4"), q("1/2"));
  EXPECT_EQ(clip_left(I, q("3/8")), Interval(q("3/8"), q("1/2")));
  EXPECT_EQ(clip_left(I, q("0")), I);
  EXPECT_FALSE(clip_left(I, q("3/4")));
  EXPECT_EQ(clip_left(I, q("1/2")), Interval(q("1/2"), q("1/2")));
}

TEST(AppendedTests, LceRunIsLce) {
  auto a = corpus_real("geometric-half");
  auto out = lce_test_from(nested(q("1/2"), 30), a, 60);
  EXPECT_TRUE(out.trace.all_hold());
  auto cls = classify_test(out.test, out.test.intervals.size() - 1);
  EXPECT_TRUE(cls.lce.holds);
  for (std::size_t n = 0; n < out.origin.size(); ++n) EXPECT_EQ(out.test.intervals[n].left(), a.term(out.stage[n]));
  EXPECT_THROW(lce_test_from(nested(q("1/2"), 4), corpus_real("oscillate-half"), 5), Error);
}

TEST(BoundedIncrements, QuarterFamily) {
  auto a = corpus_real("geometric-quarter");
  auto out = bounded_inc_test_from_speedup(a, 30);
  EXPECT_TRUE(out.trace.all_hold());
  ASSERT_EQ(out.test.intervals.size(), 31u);
  for (std::size_t s = 0; s <= 30; ++s) {
    const auto& I = out.test.intervals[s];
    EXPECT_EQ(I.left(), a.term(s));
    EXPECT_EQ(I.length(), q("3/4") * pow2(-2 * static_cast<long>(s)));
    EXPECT_TRUE(I.contains(q("1/2")));
    if (s < 30) EXPECT_EQ(out.test.intervals[s + 1].left() - I.left(), I.length() / Rational(2));
  }
  EXPECT_EQ(out.test.measure(), Rational(2) * (a.term(31) - a.term(0)));
}

TEST(BoundedIncrements, StallGivesPointInterval) {
  auto a = corpus_real("stalled-geometric");
  auto out = bounded_inc_test_from_speedup(a, 6);
  EXPECT_EQ(out.test.intervals[0].length(), Rational(0));
  EXPECT_TRUE(out.trace.all_hold());
}

TEST(BoundedIncrements, ReverseDirection) {
  auto a = corpus_real("geometric-quarter");
  auto forward = bounded_inc_test_from_speedup(a, 30);
  auto back = speedup_from_bounded_inc_test(forward.test, q("1/2"), 29, q("1/2"));
  EXPECT_TRUE(back.trace.all_hold());
  EXPECT_EQ(back.rho, q("1/2"));
  EXPECT_EQ(back.trace.value("max_ratio"), "1/4");
  EXPECT_EQ(back.trace.value("covering_indices"), "29");  // i + 1 <= horizon
  EXPECT_EQ(back.approximation.class_tag(), ClassTag::left_ce);
  EXPECT_EQ(back.approximation.term(3), a.term(3));
}

TEST(BoundedIncrements, ExtremeConstant) {
  SolovayTest t{{Interval(q("1/4"), q("1/2")), Interval(q("1/2"), q("1/2")), Interval(q("1/2"), q("1/2"))}, q("1/4")};
  auto out = speedup_from_bounded_inc_test(t, Rational(1), 1, q("1/2"));
  EXPECT_EQ(out.trace.value("max_ratio"), "0");
  EXPECT_EQ(out.rho, Rational(0));
}

TEST(BoundedIncrements, ViolationNamesIndex) {
  SolovayTest t{{Interval(q("0"), q("1/2")), Interval(q("1/8"), q("1/4")), Interval(q("1/4"), q("1/4"))}, q("1")};
  try {
    speedup_from_bounded_inc_test(t, q("1/2"), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::precondition_failed);
    EXPECT_EQ(e.index(), 0u);
  }
}

}  // namespace
}  // namespace speedlab
