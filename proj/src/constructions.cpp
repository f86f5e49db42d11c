#include "speedlab/constructions.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "speedlab/config.hpp"
#include "speedlab/error.hpp"

namespace speedlab {

// ---------------------------------------------------------------- StageTrace

StageRecord& StageRecord::set(std::string key, std::string value) {
  fields.emplace_back(std::move(key), std::move(value));
  return *this;
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::le: return "<=";
    case Relation::lt: return "<";
    case Relation::eq: return "=";
    case Relation::ge: return ">=";
  }
  return "?";
}

StageRecord& StageTrace::record(std::size_t stage) {
  records.push_back(StageRecord{stage, {}});
  return records.back();
}

const Assertion& StageTrace::check(std::string name, const Rational& lhs, Relation rel, const Rational& rhs) {
  bool holds = false;
  switch (rel) {
    case Relation::le: holds = lhs <= rhs; break;
    case Relation::lt: holds = lhs < rhs; break;
    case Relation::eq: holds = lhs == rhs; break;
    case Relation::ge: holds = lhs >= rhs; break;
  }
  assertions.push_back(Assertion{std::move(name), lhs, rel, rhs, holds});
  return assertions.back();
}

const Assertion& StageTrace::check(std::string name, bool ok) {
  return check(std::move(name), Rational(ok ? 1 : 0), Relation::eq, Rational(1));
}

void StageTrace::note(std::string key, std::string value) { summary.emplace_back(std::move(key), std::move(value)); }

bool StageTrace::all_hold() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.holds; });
}

std::vector<const Assertion*> StageTrace::failures() const {
  std::vector<const Assertion*> out;
  for (const auto& a : assertions) {
    if (!a.holds) out.push_back(&a);
  }
  return out;
}

std::optional<std::string> StageTrace::value(std::string_view key) const {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  return std::nullopt;
}

namespace {

const Rational& limit_of(const Approximation& a, const char* who) {
  if (!a.declared_limit()) throw Error(Errc::missing_limit, std::string(who) + " needs a declared limit");
  return *a.declared_limit();
}

void check_distinct_terms(const Approximation& a, std::size_t upto, const char* who) {
  std::set<Rational> seen;
  for (std::size_t s = 0; s <= upto && a.has_term(s); ++s) {
    if (!seen.insert(a.term(s)).second) {
      throw Error(Errc::precondition_failed, std::string(who) + ": terms are not pairwise distinct", s);
    }
  }
}

}  // namespace

// ------------------------------------------------------- weak_speed_test

WeakSpeedTestResult weak_speed_test(const Approximation& a, const Approximation& b, const Rational& rho,
                                    std::size_t horizon) {
  if (rho.sign() <= 0 || rho >= Rational(1)) throw Error(Errc::invalid_argument, "rho must lie in (0,1)");
  const Rational& alpha = limit_of(a, "weak_speed_test");
  if (b.declared_limit() && *b.declared_limit() != alpha) {
    throw Error(Errc::precondition_failed, "weak_speed_test: approximations have different limits");
  }
  for (std::size_t s = 0; s <= horizon; ++s) {
    if (a.term(s) > alpha) throw Error(Errc::precondition_failed, "first approximation not left-sided", s);
    if (b.term(s) > alpha) throw Error(Errc::precondition_failed, "second approximation not left-sided", s);
  }

  WeakSpeedTestResult out;
  out.trace.construction = "weak_speed_test";
  auto& f = out.f;
  f.push_back(1);
  const std::size_t cap = horizon_cap();
  auto f_at = [&](std::size_t s) {
    while (f.size() <= s) {
      std::size_t next = f.size();
      std::size_t i = f.back() + 1;
      while (a.term(i) < b.term(next)) {
        if (++i - f.back() > cap) {
          throw Error(Errc::horizon_exhausted, "search for f(" + std::to_string(next) + ") exhausted", next);
        }
      }
      f.push_back(i);
    }
    return f[s];
  };

  const Rational stretch = Rational(1) / (Rational(1) - rho);
  Rational width_sum(0);
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t last = 0;
  for (std::size_t r = 0;; ++r) {
    std::size_t next_hi = f_at(hi);
    if (next_hi > horizon) break;
    Rational c = a.term(lo);
    for (std::size_t s = lo; s <= hi; ++s) c = min(c, a.term(s));
    Rational d = c;
    for (std::size_t s = lo; s <= next_hi; ++s) d = max(d, a.term(s));
    Interval I(c, c + stretch * (d - c));
    bool hit = I.contains(alpha);
    out.covering_blocks += hit ? 1 : 0;
    width_sum += d - c;
    out.trace.record(r)
        .set("block_first", lo)
        .set("block_last", hi)
        .set("next_last", next_hi)
        .set("c", c)
        .set("d", d)
        .set("left", I.left())
        .set("right", I.right())
        .set("covers", hit);
    out.test.intervals.push_back(std::move(I));
    last = next_hi;
    lo = hi + 1;
    hi = next_hi;
  }

  bool f_ok = true;
  for (std::size_t s = 0; s < f.size(); ++s) {
    if (f[s] < s + 1 || (s > 0 && f[s] <= f[s - 1])) f_ok = false;
  }
  Rational var = variation(a, last + 1);
  out.test.budget = stretch * width_sum;
  auto& tr = out.trace;
  tr.check("f_strictly_increasing_above_identity", f_ok);
  tr.check("width_sum_vs_twice_variation", width_sum, Relation::le, Rational(2) * var);
  tr.note("blocks", out.test.intervals.size());
  tr.note("covering_blocks", out.covering_blocks);
  tr.note("width_sum", width_sum);
  tr.note("variation", var);
  tr.note("measure", out.test.budget);
  tr.note("last_index", last);
  return out;
}

// ------------------------------------------------------- speedup_from_ml

SpeedupFromMlResult speedup_from_ml(const Approximation& r, const MLTest& m, std::size_t horizon,
                                    std::size_t search_limit) {
  struct Sigma {
    BitString bits;
    std::size_t k;
  };
  std::vector<Sigma> sigma;
  for (const auto& ev : m.schedule()) {
    if (ev.level % 2 == 0) sigma.push_back({ev.bits, ev.level / 2});
  }
  std::vector<bool> used(sigma.size(), false);
  if (!sigma.empty()) used[0] = true;

  std::vector<BitString> tau;
  std::set<Rational> seen_terms;
  auto tau_at = [&](std::size_t j) -> const BitString& {
    while (tau.size() <= j) {
      std::size_t next = tau.size();
      const Rational& v = r.term(next);
      if (!seen_terms.insert(v).second) {
        throw Error(Errc::precondition_failed, "speedup_from_ml: terms are not pairwise distinct", next);
      }
      if (!v.is_dyadic() || v.sign() < 0 || v >= Rational(1)) {
        throw Error(Errc::precondition_failed, "speedup_from_ml: term is not a dyadic in [0,1)", next);
      }
      tau.push_back(BitString::from_dyadic(Dyadic::from_rational(v)));
    }
    return tau[j];
  };

  const std::optional<Rational>& gamma = r.declared_limit();
  SpeedupFromMlResult out{Approximation::finite(ClassTag::ca, {}), {}, 0, Rational(0), false};
  auto& tr = out.trace;
  tr.construction = "speedup_from_ml";
  std::vector<Rational> c{r.term(0), r.term(0)};
  tau_at(0);
  std::size_t prev_j = 0;
  Rational sub_variation(0);
  std::set<std::size_t> true_ks;
  bool ks_distinct = true;
  std::size_t true_stages = 0;

  for (std::size_t s = 1; s <= horizon; ++s) {
    std::optional<std::size_t> js, is;
    for (std::size_t j = prev_j + 1; j <= prev_j + search_limit && r.has_term(j); ++j) {
      const BitString& t = tau_at(j);
      for (std::size_t i = 0; i <= j && i < sigma.size(); ++i) {
        if (!used[i] && sigma[i].bits.is_prefix_of(t)) {
          is = i;
          break;
        }
      }
      if (is) {
        js = j;
        break;
      }
    }
    if (!js) {
      out.stalled = true;
      tr.note("stalled_at_stage", s);
      break;
    }
    used[*is] = true;
    const Sigma& sg = sigma[*is];
    Rational delta = pow2(static_cast<long>(sg.k) - static_cast<long>(sg.bits.size()));
    const Rational& rj = r.term(*js);
    sub_variation += abs(rj - r.term(prev_j));
    c.push_back(rj + delta);
    c.push_back(rj);
    out.delta_sum += delta;
    out.stages = s;
    prev_j = *js;

    auto& rec = tr.record(s);
    rec.set("j", *js).set("i", *is).set("sigma", sg.bits.str()).set("k", sg.k).set("delta", delta);
    rec.set("c_even", c[2 * s]).set("c_odd", c[2 * s + 1]);
    bool is_true = gamma && sg.bits.is_prefix_of_real(*gamma);
    rec.set("true", is_true);
    if (!is_true) continue;
    ++true_stages;
    if (!true_ks.insert(sg.k).second) ks_distinct = false;
    Rational num = abs(*gamma - c[2 * s + 1]);
    Rational den = abs(*gamma - c[2 * s]);
    if (sg.k == 0 || den.is_zero()) {
      rec.set("ratio", "vacuous");
      continue;
    }
    Rational ratio = num / den;
    rec.set("ratio", ratio);
    Rational bound = Rational(1) / (pow2(static_cast<long>(sg.k)) - Rational(1));
    tr.check("true_stage_ratio_s" + std::to_string(s), ratio, Relation::le, bound);
  }

  Rational bound = sub_variation + Rational(2) * out.delta_sum;
  out.c = Approximation::finite(ClassTag::dce, c, gamma, bound);
  out.c.allow_unbounded();
  out.c.set_provenance({"speedup_from_ml", {}});
  Rational c_variation = variation(out.c, c.size() - 1);

  tr.check("delta_sum", out.delta_sum, Relation::le, Rational(2));
  tr.check("variation_vs_subsequence_plus_twice_delta", c_variation, Relation::le, bound);
  if (gamma) tr.check("true_stage_k_distinct", ks_distinct);
  tr.note("stages", out.stages);
  tr.note("true_stages", true_stages);
  tr.note("delta_sum", out.delta_sum);
  tr.note("subsequence_variation", sub_variation);
  tr.note("output_variation", c_variation);
  tr.note("output_terms", c.size());
  tr.note("stalled", std::string(out.stalled ? "true" : "false"));
  return out;
}

// ---------------------------------------------------------- zero_speedup

ZeroSpeedupResult zero_speedup(const Approximation& a, std::size_t horizon, std::size_t check_upto) {
  check_distinct_terms(a, horizon, "zero_speedup");
  std::vector<std::size_t> g(horizon + 1);
  for (std::size_t s = 0; s <= horizon; ++s) g[s] = s;
  std::vector<AttentionSummary> idx(horizon + 1);
  for (std::size_t s = 0; s <= horizon; ++s) idx[s].index = s;

  ZeroSpeedupResult out{Approximation::finite(ClassTag::ca, {}), {}, {}};
  auto& tr = out.trace;
  tr.construction = "zero_speedup";
  std::vector<Rational> b{a.term(0), a.term(0)};
  std::vector<std::size_t> occurrences(1, 2);
  auto count = [&](std::size_t t) {
    if (occurrences.size() <= t) occurrences.resize(t + 1, 0);
    ++occurrences[t];
  };

  auto requires_attention = [&](std::size_t s, std::size_t i) {
    const Rational& ai = a.term(i);
    Rational den = abs(ai - a.term(s));
    if (den.is_zero()) return true;
    return abs(ai - a.term(g[s])) * Rational(static_cast<long>(s)) >= den;
  };

  for (std::size_t i = 1; i <= horizon; ++i) {
    std::optional<std::size_t> chosen;
    for (std::size_t s = 1; s <= i; ++s) {
      if (requires_attention(s, i)) {
        chosen = s;
        break;
      }
    }
    if (!chosen) {
      throw Error(Errc::invariant_violation, "no index requires attention at stage " + std::to_string(i), i);
    }
    std::size_t s = *chosen;
    ++g[s];
    ++idx[s].attention;
    idx[s].last_stage = i;
    b.push_back(a.term(s));
    b.push_back(a.term(g[s]));
    count(s);
    count(g[s]);
    tr.record(i).set("attended", s).set("g", g[s]).set("b_even", b[2 * i]).set("b_odd", b[2 * i + 1]);
  }

  bool occ_ok = true;
  for (std::size_t t = 0; t < occurrences.size(); ++t) {
    std::size_t att = t < idx.size() ? idx[t].attention : 0;
    // a_0 is emitted twice as b_0, b_1.
    std::size_t allowance = att + t + (t == 0 ? 2 : 0);
    if (occurrences[t] > allowance) occ_ok = false;
  }

  const auto& alpha = a.declared_limit();
  std::size_t total_attention = 0;
  std::size_t max_attention = 0;
  for (std::size_t s = 0; s <= horizon; ++s) {
    auto& rec = idx[s];
    rec.g = g[s];
    total_attention += rec.attention;
    max_attention = std::max(max_attention, rec.attention);
    if (alpha && s >= 1) {
      Rational den = abs(*alpha - a.term(s));
      if (!den.is_zero()) rec.ratio = abs(*alpha - a.term(g[s])) / den;
    }
  }
  if (alpha) {
    for (std::size_t s = 1; s <= std::min(check_upto, horizon); ++s) {
      const auto& rec = idx[s];
      bool settled = rec.last_stage.has_value() && !requires_attention(s, horizon);
      tr.check("settled_s" + std::to_string(s), settled);
      Rational threshold = Rational(1) / Rational(static_cast<long>(s));
      if (rec.ratio) tr.check("settled_ratio_s" + std::to_string(s), *rec.ratio, Relation::le, threshold);
      // Least emitted pair ratio; a strict witness below 1/s must exist.
      std::optional<Rational> best;
      std::size_t best_stage = 0;
      for (std::size_t i = 1; i <= horizon; ++i) {
        Rational den = abs(*alpha - b[2 * i]);
        if (den.is_zero()) continue;
        Rational q = abs(*alpha - b[2 * i + 1]) / den;
        if (!best || q < *best) {
          best = q;
          best_stage = i;
        }
        if (*best < threshold) break;
      }
      if (best) {
        tr.check("strict_pair_s" + std::to_string(s), *best, Relation::lt, threshold);
        tr.note("strict_pair_stage_s" + std::to_string(s), best_stage);
      }
    }
  }
  tr.check("occurrences_bounded_by_attention", occ_ok);
  tr.note("stages", horizon);
  tr.note("total_attention", total_attention);
  tr.note("max_attention", max_attention);
  tr.note("output_terms", b.size());
  out.b = Approximation::finite(ClassTag::ca, std::move(b), alpha);
  out.b.set_provenance({"zero_speedup", {}});
  out.indices = std::move(idx);
  return out;
}

// ------------------------------------------- appended Solovay tests

std::optional<Interval> clip_left(const Interval& I, const Rational& x) {
  Rational left = max(I.left(), x);
  Rational right = min(I.right(), Rational(1));
  if (left > right) return std::nullopt;
  return Interval(left, right);
}

namespace {

enum class AppendMode { plain, clip };

AppendedTest append_run(const SolovayTest& t, const Approximation& a, std::size_t horizon, AppendMode mode,
                        const char* name) {
  std::set<std::pair<Rational, Rational>> distinct;
  for (std::size_t i = 0; i < t.intervals.size(); ++i) {
    if (!distinct.insert({t.intervals[i].left(), t.intervals[i].right()}).second) {
      throw Error(Errc::precondition_failed, std::string(name) + ": input intervals are not pairwise distinct", i);
    }
  }
  AppendedTest out;
  out.trace.construction = name;
  out.test.budget = t.budget;
  std::vector<bool> used(t.intervals.size(), false);
  std::size_t empty_clips = 0;
  for (std::size_t s = 0; s <= horizon && a.has_term(s); ++s) {
    const Rational& as = a.term(s);
    for (std::size_t i = 0; i <= s && i < t.intervals.size(); ++i) {
      if (used[i] || !t.intervals[i].contains(as)) continue;
      used[i] = true;
      std::optional<Interval> I = t.intervals[i];
      if (mode == AppendMode::clip) I = clip_left(*I, as);
      if (!I) {
        ++empty_clips;
        out.trace.record(s).set("origin", i).set("skipped", "empty clip");
        break;
      }
      out.trace.record(s).set("origin", i).set("left", I->left()).set("right", I->right());
      out.test.intervals.push_back(*I);
      out.origin.push_back(i);
      out.stage.push_back(s);
      break;
    }
  }

  auto& tr = out.trace;
  bool subset = true;
  for (std::size_t n = 0; n < out.origin.size(); ++n) {
    const Interval& src = t.intervals[out.origin[n]];
    const Interval& got = out.test.intervals[n];
    if (got.left() < src.left() || got.right() > src.right()) subset = false;
  }
  std::set<std::size_t> origins(out.origin.begin(), out.origin.end());
  tr.check("subset_of_input", subset);
  tr.check("appended_once", origins.size() == out.origin.size());
  tr.note("appended", out.test.intervals.size());
  if (mode == AppendMode::clip) tr.note("empty_clips", empty_clips);
  if (const auto& alpha = a.declared_limit()) {
    std::size_t containing = 0;
    std::size_t appended = 0;
    for (std::size_t i = 0; i < t.intervals.size() && i <= horizon; ++i) {
      if (!t.intervals[i].contains(*alpha)) continue;
      ++containing;
      if (used[i]) ++appended;
    }
    tr.note("limit_intervals", containing);
    tr.note("limit_intervals_appended", appended);
    tr.note("covering_output", covers(out.test, *alpha, out.test.intervals.size()).size());
  }
  if (out.test.intervals.size() >= 3) {
    auto cls = classify_test(out.test, out.test.intervals.size() - 1);
    tr.note("tail_spread", cls.converging.tail_spread);
  }
  return out;
}

}  // namespace

AppendedTest converging_test_from(const SolovayTest& t, const Approximation& a, std::size_t horizon) {
  return append_run(t, a, horizon, AppendMode::plain, "converging_test_from");
}

AppendedTest dce_test_from(const SolovayTest& t, const Approximation& a, std::size_t horizon) {
  if (a.class_tag() == ClassTag::ca) {
    throw Error(Errc::precondition_failed, "dce_test_from needs an approximation of bounded variation");
  }
  AppendedTest out = append_run(t, a, horizon, AppendMode::plain, "dce_test_from");
  const auto& iv = out.test.intervals;
  Rational lengths(0);
  Rational gaps(0);
  for (std::size_t i = 0; i < iv.size(); ++i) {
    lengths += iv[i].length();
    if (i + 1 < iv.size()) gaps += abs(iv[i + 1].left() - iv[i].right());
  }
  Rational var = variation(a, horizon);
  out.trace.check("endpoint_variation_bound", lengths + gaps, Relation::le, Rational(3) * lengths + var);
  out.trace.note("lengths", lengths);
  out.trace.note("gaps", gaps);
  out.trace.note("variation", var);
  out.trace.note("slack", Rational(3) * lengths + var - lengths - gaps);
  return out;
}

AppendedTest lce_test_from(const SolovayTest& t, const Approximation& a, std::size_t horizon) {
  if (a.class_tag() != ClassTag::left_ce) {
    throw Error(Errc::precondition_failed, "lce_test_from needs a left-c.e. approximation");
  }
  AppendedTest out = append_run(t, a, horizon, AppendMode::clip, "lce_test_from");
  bool lce = true;
  for (std::size_t i = 0; i + 1 < out.test.intervals.size(); ++i) {
    if (out.test.intervals[i + 1].left() < out.test.intervals[i].left()) lce = false;
  }
  out.trace.check("left_endpoints_nondecreasing", lce);
  if (const auto& alpha = a.declared_limit()) {
    bool same = true;
    for (std::size_t n = 0; n < out.origin.size(); ++n) {
      if (t.intervals[out.origin[n]].contains(*alpha) != out.test.intervals[n].contains(*alpha)) same = false;
    }
    out.trace.check("clip_keeps_limit_membership", same);
  }
  return out;
}

// -------------------------------------------- bounded increments round trip

BoundedIncTestResult bounded_inc_test_from_speedup(const Approximation& a, std::size_t horizon) {
  if (a.class_tag() != ClassTag::left_ce) {
    throw Error(Errc::precondition_failed, "bounded_inc_test_from_speedup needs a left-c.e. approximation");
  }
  auto report = verify_class(a, horizon + 1);
  if (!report.ok) {
    throw Error(Errc::precondition_failed, "approximation decreases", *report.first_violation);
  }
  BoundedIncTestResult out;
  auto& tr = out.trace;
  tr.construction = "bounded_inc_test_from_speedup";
  const auto& alpha = a.declared_limit();
  bool clamped = false;
  bool speedup_covered = true;
  std::size_t speedup_indices = 0;
  std::size_t covering = 0;
  for (std::size_t s = 0; s <= horizon; ++s) {
    const Rational& x = a.term(s);
    const Rational& y = a.term(s + 1);
    Rational right = x + Rational(2) * (y - x);
    if (right > Rational(1)) {
      right = Rational(1);
      clamped = true;
    }
    Interval I(x, right);
    auto& rec = tr.record(s).set("left", I.left()).set("right", I.right());
    if (alpha) {
      bool hit = I.contains(*alpha);
      covering += hit ? 1 : 0;
      rec.set("covers", hit);
      if (Rational(3) * (*alpha - y) <= *alpha - x) {
        ++speedup_indices;
        if (!hit) speedup_covered = false;
      }
    }
    out.test.intervals.push_back(std::move(I));
  }
  Rational expected = Rational(2) * (a.term(horizon + 1) - a.term(0));
  out.test.budget = expected;
  auto cls = classify_test(out.test, std::max<std::size_t>(horizon, 2), Rational(1, 2));
  tr.check("bounded_increments_half", cls.bounded_increments->holds);
  tr.check("measure", out.test.measure(), clamped ? Relation::le : Relation::eq, expected);
  if (alpha) {
    tr.check("third_ratio_indices_covered", speedup_covered);
    tr.note("third_ratio_indices", speedup_indices);
    tr.note("covering_indices", covering);
  }
  tr.note("intervals", out.test.intervals.size());
  tr.note("measure", out.test.measure());
  tr.note("clamped", std::string(clamped ? "true" : "false"));
  return out;
}

SpeedupFromTestResult speedup_from_bounded_inc_test(const SolovayTest& t, const Rational& d, std::size_t horizon,
                                                    std::optional<Rational> limit) {
  if (d.sign() <= 0 || d > Rational(1)) throw Error(Errc::invalid_argument, "d must lie in (0,1]");
  auto cls = classify_test(t, std::max<std::size_t>(horizon, 2), d);
  if (!cls.bounded_increments->holds) {
    throw Error(Errc::precondition_failed, "test lacks bounded increments", *cls.bounded_increments->first_violation);
  }
  const std::size_t n = cls.checked;
  std::vector<Rational> lefts;
  for (std::size_t i = 0; i < n; ++i) lefts.push_back(t.intervals[i].left());
  SpeedupFromTestResult out{Approximation::finite(ClassTag::left_ce, lefts, limit), Rational(1) - d, {}};
  out.approximation.set_provenance({"speedup_from_bounded_inc_test", {}});
  auto& tr = out.trace;
  tr.construction = "speedup_from_bounded_inc_test";
  std::size_t covering = 0;
  std::optional<Rational> worst;
  if (limit) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!t.intervals[i].contains(*limit)) continue;
      ++covering;
      auto& rec = tr.record(i);
      Rational den = *limit - lefts[i];
      if (den.is_zero()) {
        rec.set("ratio", "skipped: limit attained");
        continue;
      }
      Rational ratio = (*limit - lefts[i + 1]) / den;
      rec.set("ratio", ratio);
      if (!worst || ratio > *worst) worst = ratio;
    }
    tr.check("covering_ratio_bound", worst.value_or(Rational(0)), Relation::le, out.rho);
    tr.note("covering_indices", covering);
    if (worst) tr.note("max_ratio", *worst);
  }
  tr.note("rho", out.rho);
  tr.note("terms", n);
  return out;
}

}  // namespace speedlab
