#include "speedlab/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "speedlab/corpus.hpp"
#include "speedlab/error.hpp"
#include "speedlab/speedability.hpp"

namespace speedlab {

namespace {

std::string yes(bool b) { return b ? "true" : "false"; }

class Inputs {
 public:
  explicit Inputs(const Json& j) : j_(j) {
    if (!j_.is_object()) throw Error(Errc::malformed_input, "inputs must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const Json& at(const char* key) const {
    if (!has(key)) throw Error(Errc::malformed_input, std::string("missing input '") + key + "'");
    return j_.at(key);
  }

  Rational rational(const char* key) const { return rational_from_json(at(key)); }
  Rational rational(const char* key, const Rational& fallback) const {
    return has(key) ? rational(key) : fallback;
  }
  std::optional<Rational> maybe_rational(const char* key) const {
    if (!has(key) || at(key).is_null()) return std::nullopt;
    return rational(key);
  }

  std::size_t size(const char* key) const {
    const Json& v = at(key);
    if (!v.is_number_unsigned()) throw Error(Errc::malformed_input, std::string("'") + key + "' must be a natural number");
    return v.get<std::size_t>();
  }
  std::size_t size(const char* key, std::size_t fallback) const { return has(key) ? size(key) : fallback; }

  std::vector<Rational> rationals(const char* key) const {
    const Json& v = at(key);
    if (!v.is_array()) throw Error(Errc::malformed_input, std::string("'") + key + "' must be an array");
    std::vector<Rational> out;
    for (const auto& x : v) out.push_back(rational_from_json(x));
    return out;
  }

  std::vector<std::size_t> sizes(const char* key) const {
    const Json& v = at(key);
    if (!v.is_array()) throw Error(Errc::malformed_input, std::string("'") + key + "' must be an array");
    std::vector<std::size_t> out;
    for (const auto& x : v) {
      if (!x.is_number_unsigned()) throw Error(Errc::malformed_input, std::string("'") + key + "' must hold naturals");
      out.push_back(x.get<std::size_t>());
    }
    return out;
  }

  bool flag(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!at(key).is_boolean()) throw Error(Errc::malformed_input, std::string("'") + key + "' must be a boolean");
    return at(key).get<bool>();
  }

 private:
  const Json& j_;
};

ComputableOrder order_from_json(const Json& j) {
  if (j.is_string()) {
    std::string name = j.get<std::string>();
    if (name == "identity") return ComputableOrder::identity();
    if (name == "successor") return ComputableOrder::successor();
    throw Error(Errc::malformed_input, "unknown order '" + name + "'");
  }
  if (j.is_object() && j.contains("affine")) {
    const Json& p = j.at("affine");
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() || !p[1].is_number_unsigned()) {
      throw Error(Errc::malformed_input, "affine order needs [mul, add]");
    }
    return ComputableOrder::affine(p[0].get<std::size_t>(), p[1].get<std::size_t>());
  }
  if (j.is_object() && j.contains("table")) {
    std::vector<std::size_t> values;
    for (const auto& v : j.at("table")) {
      if (!v.is_number_unsigned()) throw Error(Errc::malformed_input, "order table must hold naturals");
      values.push_back(v.get<std::size_t>());
    }
    return ComputableOrder::table("table", std::move(values));
  }
  throw Error(Errc::malformed_input, "order must be a name, {affine: [m, a]} or {table: [...]}");
}

Approximation approx_from_json(const Json& j) {
  if (j.is_string()) return corpus_real(j.get<std::string>());
  if (!j.is_object()) throw Error(Errc::malformed_input, "approximation must be a name or an object");
  Approximation a = j.contains("corpus") ? corpus_real(j.at("corpus").get<std::string>()) : approximation_from_json(j);
  if (j.contains("normalize") && j.at("normalize").get<bool>()) a = normalize_distinct_dyadic(a);
  if (j.contains("compose")) a = compose_order(a, order_from_json(j.at("compose")));
  return a;
}

SolovayTest test_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::malformed_input, "test must be an object");
  SolovayTest t;
  if (!j.contains("generator")) {
    t = solovay_from_json(j);
  } else {
    Inputs in(j);
    std::string gen = in.at("generator").get<std::string>();
    if (gen == "nested") {
      Rational center = in.rational("center");
      std::size_t start = in.size("start", 1);
      std::size_t count = in.size("count");
      for (std::size_t i = start; i < start + count; ++i) {
        Rational r = pow2(-static_cast<long>(i));
        t.intervals.emplace_back(max(center - r, Rational(0)), min(center + r, Rational(1)));
      }
      t.budget = t.measure();
    } else if (gen == "consecutive") {
      Approximation a = approx_from_json(in.at("approximation"));
      std::size_t n = in.size("horizon");
      for (std::size_t s = 0; s < n; ++s) t.intervals.emplace_back(a.term(s), a.term(s + 1));
      t.budget = t.measure();
    } else if (gen == "rettinger") {
      t = rettinger_test(approx_from_json(in.at("approximation")), in.size("horizon"));
    } else if (gen == "bounded_increments") {
      t = bounded_inc_test_from_speedup(approx_from_json(in.at("approximation")), in.size("horizon")).test;
    } else {
      throw Error(Errc::malformed_input, "unknown test generator '" + gen + "'");
    }
  }
  if (j.contains("permutation")) {
    std::vector<Interval> shuffled;
    for (const auto& idx : j.at("permutation")) {
      std::size_t i = idx.get<std::size_t>();
      if (i >= t.intervals.size()) throw Error(Errc::malformed_input, "permutation index out of range");
      shuffled.push_back(t.intervals[i]);
    }
    t.intervals = std::move(shuffled);
  }
  return t;
}

MLTest ml_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::malformed_input, "ML test must be an object");
  Inputs in(j);
  MLTest m = in.has("for") ? ml_test_for(in.rational("for"), in.size("levels")) : mltest_from_json(j);
  if (in.flag("disjointify", false)) m = disjointify(m);
  return m;
}

// ------------------------------------------------------------ operations

using Handler = std::function<StageTrace(const Inputs&, std::size_t)>;

StageTrace op_numerics(const Inputs& in, std::size_t) {
  StageTrace tr;
  tr.construction = "numerics";
  std::size_t n = 0;
  if (in.has("msb_pairs")) {
    for (const auto& p : in.at("msb_pairs")) {
      Dyadic a = Dyadic::from_rational(rational_from_json(p.at(0)));
      Dyadic b = Dyadic::from_rational(rational_from_json(p.at(1)));
      std::size_t h = msb_diff(a, b);
      std::size_t h2 = msb_diff(b, a);
      Rational gap = abs(a.value() - b.value());
      tr.record(n++).set("a", a.str()).set("b", b.str()).set("msb_diff", h);
      tr.check("msb_symmetric_" + std::to_string(n), h == h2);
      tr.check("msb_gap_bound_" + std::to_string(n), gap, Relation::lt, pow2(1 - static_cast<long>(h)));
    }
  }
  if (in.has("string_sets")) {
    for (const auto& set : in.at("string_sets")) {
      std::vector<BitString> strings;
      for (const auto& s : set) strings.emplace_back(s.get<std::string>());
      bool pf = is_prefix_free(strings);
      auto& rec = tr.record(n++).set("strings", set.dump()).set("prefix_free", pf);
      if (pf) {
        Dyadic mu = string_set_measure(strings);
        rec.set("measure", mu.str());
        tr.check("measure_at_most_one_" + std::to_string(n), mu.value(), Relation::le, Rational(1));
      }
    }
  }
  tr.note("items", n);
  return tr;
}

StageTrace op_verify_class(const Inputs& in, std::size_t horizon) {
  Approximation a = approx_from_json(in.at("approximation"));
  auto rep = verify_class(a, horizon);
  StageTrace tr;
  tr.construction = "verify_class";
  tr.note("class_tag", std::string(to_string(a.class_tag())));
  tr.note("ok", yes(rep.ok));
  tr.note("first_violation", rep.first_violation ? std::to_string(*rep.first_violation) : std::string("none"));
  tr.note("variation", rep.variation);
  tr.check("class_report_as_expected", rep.ok == in.flag("expect_ok", true));
  return tr;
}

StageTrace op_normalize(const Inputs& in, std::size_t horizon) {
  Approximation a = approx_from_json(in.at("approximation"));
  Approximation b = normalize_distinct_dyadic(a);
  StageTrace tr;
  tr.construction = "normalize_distinct_dyadic";
  std::set<Rational> seen;
  bool distinct = true;
  bool dyadic = true;
  for (std::size_t s = 0; s <= horizon; ++s) {
    const Rational& x = b.term(s);
    distinct = seen.insert(x).second && distinct;
    dyadic = dyadic && x.is_dyadic();
    tr.record(s).set("input", exact_string(a.term(s))).set("output", exact_string(x));
  }
  auto rep = verify_class(b, horizon);
  tr.check("pairwise_distinct", distinct);
  tr.check("dyadic_terms", dyadic);
  tr.check("class_preserved", rep.ok);
  tr.note("class_tag", std::string(to_string(b.class_tag())));
  tr.note("variation", rep.variation);
  if (b.declared_limit()) {
    Rational first = abs(b.term(0) - *b.declared_limit());
    Rational last = abs(b.term(horizon) - *b.declared_limit());
    tr.note("final_distance", last);
    tr.check("distance_shrinks", last, Relation::le, first);
  }
  return tr;
}

StageTrace op_compose_order(const Inputs& in, std::size_t horizon) {
  Approximation a = approx_from_json(in.at("approximation"));
  ComputableOrder f = order_from_json(in.at("order"));
  Approximation b = compose_order(a, f);
  StageTrace tr;
  tr.construction = "compose_order";
  for (std::size_t s = 0; s <= horizon; ++s) tr.record(s).set("f", f(s)).set("term", exact_string(b.term(s)));
  auto rep = verify_class(b, horizon);
  auto orep = f.verify(horizon);
  tr.check("order_nondecreasing", orep.nondecreasing);
  tr.check("order_unbounded_witness", orep.unbounded_witness.has_value());
  tr.check("class_preserved", rep.ok);
  tr.note("variation", rep.variation);
  return tr;
}

StageTrace op_two_sided(const Inputs& in, std::size_t horizon) {
  Approximation a = approx_from_json(in.at("approximation"));
  auto rep = two_sided_report(a, horizon);
  StageTrace tr;
  tr.construction = "two_sided";
  for (const auto& st : rep.stable) {
    tr.record(st.stage)
        .set("h", st.h)
        .set("lower", exact_string(st.lower))
        .set("upper", exact_string(st.upper))
        .set("brackets", st.brackets);
  }
  tr.check("stable_stages_bracket", rep.all_stable_bracket);
  tr.check("below_at_least_stable", Rational(static_cast<long>(rep.below)), Relation::ge,
           Rational(static_cast<long>(rep.stable.size())));
  tr.check("above_at_least_stable", Rational(static_cast<long>(rep.above)), Relation::ge,
           Rational(static_cast<long>(rep.stable.size())));
  tr.note("stable_stages", rep.stable.size());
  tr.note("below", rep.below);
  tr.note("above", rep.above);
  return tr;
}

StageTrace op_ratio_trace(const Inputs& in, std::size_t horizon) {
  Approximation a = approx_from_json(in.at("approximation"));
  ComputableOrder f = order_from_json(in.at("order"));
  RatioTrace trace = ratio_trace(a, f, horizon);
  Rational rho = in.rational("rho", Rational(1, 2));
  auto cert = certify(trace, rho, in.size("window", 10));
  StageTrace tr;
  tr.construction = "ratio_trace";
  for (const auto& r : trace) {
    auto& rec = tr.record(r.s).set("f", r.fs);
    if (r.ratio) {
      rec.set("ratio", *r.ratio);
    } else {
      rec.set("ratio", "skipped: a_s = limit");
    }
  }
  tr.note("verdict", cert.describe());
  tr.note("hits", cert.hits);
  tr.note("skipped", cert.skipped.size());
  if (cert.liminf_bound) tr.note("liminf_upper_bound", *cert.liminf_bound);
  if (in.has("min_hits")) {
    tr.check("certificate_hits", Rational(static_cast<long>(cert.hits)), Relation::ge,
             Rational(static_cast<long>(in.size("min_hits"))));
  }
  return tr;
}

StageTrace op_limitfree_ratio(const Inputs& in, std::size_t) {
  Approximation a = approx_from_json(in.at("approximation"));
  std::size_t s = in.size("s");
  std::size_t t = in.size("t");
  StageTrace tr;
  tr.construction = "limitfree_ratio";
  std::optional<Rational> last;
  for (std::size_t probe : in.sizes("probes")) {
    last = limitfree_ratio(a, s, t, probe);
    tr.record(probe).set("ratio", *last);
  }
  if (a.declared_limit() && last) {
    Rational den = abs(*a.declared_limit() - a.term(s));
    if (!den.is_zero()) {
      Rational limit_ratio = abs(*a.declared_limit() - a.term(t)) / den;
      tr.note("limit_ratio", limit_ratio);
      tr.check("last_probe_agreement", abs(limit_ratio - *last), Relation::le,
               in.rational("tolerance", pow2(-10)));
    }
  }
  return tr;
}

StageTrace op_weak_to_speedup(const Inputs& in, std::size_t horizon) {
  Approximation a = approx_from_json(in.at("a"));
  Approximation b = approx_from_json(in.at("b"));
  ComputableOrder f = weak_to_speedup(a, b, horizon);
  StageTrace tr;
  tr.construction = "weak_to_speedup";
  bool dominates = true;
  bool minimal = true;
  for (std::size_t n = 0; n <= horizon; ++n) {
    std::size_t fn = f(n);
    dominates = dominates && a.term(fn) >= b.term(n);
    minimal = minimal && (fn == 0 || a.term(fn - 1) < b.term(n));
    tr.record(n).set("f", fn);
  }
  auto rep = f.verify(horizon);
  tr.check("dominates", dominates);
  tr.check("least_index", minimal);
  tr.check("order_nondecreasing", rep.nondecreasing);
  return tr;
}

StageTrace shift_trace(const ShiftResult& res, const char* name, std::size_t horizon) {
  StageTrace tr;
  tr.construction = name;
  for (std::size_t s = 0; s <= horizon; ++s) {
    tr.record(s).set("index", res.index[s]).set("term", exact_string(res.approximation.term(s)));
  }
  tr.check("witness_inequality", !res.first_violation.has_value());
  tr.note("c", res.c);
  return tr;
}

StageTrace op_shift_left(const Inputs& in, std::size_t horizon) {
  auto res = solovay_shift_left(approx_from_json(in.at("a_ref")), approx_from_json(in.at("b_ref")), in.rational("c"),
                                approx_from_json(in.at("a_new")), horizon);
  return shift_trace(res, "solovay_shift_left", horizon);
}

StageTrace op_shift_right(const Inputs& in, std::size_t horizon) {
  auto res = solovay_shift_right(approx_from_json(in.at("a_ref")), approx_from_json(in.at("b_ref")),
                                 in.rational("c"), approx_from_json(in.at("b_new")), horizon);
  return shift_trace(res, "solovay_shift_right", horizon);
}

StageTrace op_nocover(const Inputs& in, std::size_t) {
  auto box = in.rationals("box");
  if (box.size() != 2) throw Error(Errc::malformed_input, "box must be [a, b]");
  Interval I(box[0], box[1]);
  auto centers = in.rationals("centers");
  auto radii = in.rationals("radii");
  std::size_t idx = nocover_witness(I, centers, radii);
  StageTrace tr;
  tr.construction = "nocover_witness";
  std::size_t escaping = 0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    bool inside = I.contains(centers[i]);
    escaping += inside ? 0 : 1;
    tr.record(i).set("center", centers[i]).set("radius", radii[i]).set("inside", inside);
  }
  tr.check("witness_escapes", !I.contains(centers[idx]));
  tr.note("witness", idx);
  tr.note("escaping", escaping);
  return tr;
}

StageTrace op_escape_order(const Inputs& in, std::size_t horizon) {
  Approximation a = approx_from_json(in.at("approximation"));
  EscapeState st = EscapeState::initial(in.rational("rho"), horizon);
  std::size_t limit = in.size("search_limit", 4096);
  for (std::size_t cutoff : in.sizes("cutoffs")) st = escape_order(a, st, cutoff, limit);
  StageTrace tr;
  tr.construction = "escape_order";
  bool above = true;
  bool escapes = true;
  bool least = true;
  for (std::size_t i = 1; i < st.orders.size(); ++i) {
    const auto& f = st.orders[i];
    std::size_t cutoff = st.cutoffs[i - 1];
    for (std::size_t n = 0; n <= horizon; ++n) {
      above = above && f[n] > n;
      tr.record(n).set("order", i).set("f", f[n]);
      if (n < cutoff || st.c.is_zero()) continue;
      auto blocked = [&](std::size_t m) {
        for (std::size_t j = 0; j < i; ++j) {
          for (std::size_t l = st.cutoffs[j]; l <= n; ++l) {
            if (forbidden_interval(a, st, j, l).contains(a.term(m))) return true;
          }
        }
        return false;
      };
      escapes = escapes && !blocked(f[n]);
      for (std::size_t m = n + 1; m < f[n] && least; ++m) least = blocked(m);
    }
    tr.note("strictly_increasing_f" + std::to_string(i), yes(st.strictly_increasing[i]));
  }
  tr.check("above_identity", above);
  tr.check("values_escape_forbidden_intervals", escapes);
  tr.check("least_escape", least);
  tr.note("c", st.c);
  tr.note("k", st.k ? std::to_string(*st.k) : std::string("none"));
  tr.note("orders", st.orders.size());
  return tr;
}

StageTrace op_classify_test(const Inputs& in, std::size_t horizon) {
  SolovayTest t = test_from_json(in.at("test"));
  auto cls = classify_test(t, horizon, in.maybe_rational("d"), in.maybe_rational("dce_bound"));
  StageTrace tr;
  tr.construction = "classify_test";
  tr.note("checked", cls.checked);
  tr.note("tail_spread", cls.converging.tail_spread);
  tr.note("dce_gap_sum", cls.dce.gap_sum);
  tr.note("dce_bound", cls.dce.bound);
  tr.note("dce", yes(cls.dce.within_bound));
  tr.note("lce", yes(cls.lce.holds));
  if (cls.lce.first_violation) tr.note("lce_first_violation", *cls.lce.first_violation);
  if (cls.bounded_increments) {
    tr.note("bounded_increments", yes(cls.bounded_increments->holds));
    if (cls.bounded_increments->first_violation) {
      tr.note("bounded_increments_first_violation", *cls.bounded_increments->first_violation);
    }
    tr.check("bounded_increments_implies_lce", !cls.bounded_increments->holds || cls.lce.holds);
  }
  tr.check("lce_implies_dce", !cls.lce.holds || cls.dce.within_bound);
  return tr;
}

StageTrace op_covers(const Inputs& in, std::size_t horizon) {
  SolovayTest t = test_from_json(in.at("test"));
  Rational x = in.rational("x");
  auto idx = covers(t, x, horizon);
  StageTrace tr;
  tr.construction = "covers";
  for (std::size_t i : idx) tr.record(i).set("left", t.intervals[i].left()).set("right", t.intervals[i].right());
  tr.note("covering", idx.size());
  if (in.has("min_covering")) {
    tr.check("min_covering", Rational(static_cast<long>(idx.size())), Relation::ge,
             Rational(static_cast<long>(in.size("min_covering"))));
  }
  return tr;
}

StageTrace op_disjointify(const Inputs& in, std::size_t) {
  MLTest m = ml_from_json(in.at("ml_test"));
  MLTest d = disjointify(m);
  StageTrace tr;
  tr.construction = "disjointify";
  std::size_t e = 0;
  for (const auto& ev : d.schedule()) tr.record(e++).set("level", ev.level).set("bits", ev.bits.str());
  std::map<BitString, std::size_t> owner;
  bool disjoint = true;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (const auto& s : d.levels()[i]) {
      if (!owner.emplace(s, i).second) disjoint = false;
    }
  }
  bool same_measure = true;
  for (std::size_t i = 0; i < m.size(); ++i) {
    Dyadic before = string_set_measure(m.levels()[i]);
    Dyadic after = string_set_measure(d.levels()[i]);
    same_measure = same_measure && before == after;
    tr.note("measure_level_" + std::to_string(i), after.str());
  }
  tr.check("levels_disjoint", disjoint);
  tr.check("measure_preserved", same_measure);
  return tr;
}

StageTrace op_rettinger(const Inputs& in, std::size_t horizon) {
  Approximation a = approx_from_json(in.at("approximation"));
  SolovayTest t = rettinger_test(a, horizon);
  StageTrace tr;
  tr.construction = "rettinger_test";
  bool sign_change_covered = true;
  std::size_t sign_changes = 0;
  for (std::size_t s = 0; s < t.intervals.size(); ++s) {
    auto& rec = tr.record(s).set("left", t.intervals[s].left()).set("right", t.intervals[s].right());
    if (!a.declared_limit()) continue;
    const Rational& alpha = *a.declared_limit();
    bool change = (a.term(s) - alpha).sign() * (a.term(s + 1) - alpha).sign() <= 0;
    rec.set("sign_change", change);
    if (change) {
      ++sign_changes;
      sign_change_covered = sign_change_covered && t.intervals[s].contains(alpha);
    }
  }
  tr.check("measure_within_budget", t.measure(), Relation::le, t.budget);
  if (a.declared_limit()) tr.check("covered_at_sign_changes", sign_change_covered);
  tr.note("intervals", t.intervals.size());
  tr.note("sign_changes", sign_changes);
  tr.note("measure", t.measure());
  return tr;
}

StageTrace op_ml_test_for(const Inputs& in, std::size_t) {
  Rational x = in.rational("x");
  MLTest m = ml_test_for(x, in.size("levels"));
  StageTrace tr;
  tr.construction = "ml_test_for";
  bool member = true;
  bool exact = true;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const BitString& s = m.levels()[i].front();
    tr.record(i).set("string", s.str());
    member = member && s.is_prefix_of_real(x);
    exact = exact && string_set_measure(m.levels()[i]).value() == pow2(-static_cast<long>(i + 1));
  }
  tr.check("covers_x", member);
  tr.check("measure_exact", exact);
  return tr;
}

StageTrace op_weak_speed_test(const Inputs& in, std::size_t horizon) {
  auto res = weak_speed_test(approx_from_json(in.at("a")), approx_from_json(in.at("b")), in.rational("rho"), horizon);
  if (in.has("min_coverage") && !res.test.intervals.empty()) {
    Rational frac(static_cast<long>(res.covering_blocks), static_cast<long>(res.test.intervals.size()));
    res.trace.check("coverage_fraction", frac, Relation::ge, in.rational("min_coverage"));
  }
  return res.trace;
}

StageTrace op_speedup_from_ml(const Inputs& in, std::size_t horizon) {
  auto res = speedup_from_ml(approx_from_json(in.at("approximation")), ml_from_json(in.at("ml_test")), horizon,
                             in.size("search_limit", 4096));
  if (in.has("min_stages")) {
    res.trace.check("min_stages", Rational(static_cast<long>(res.stages)), Relation::ge,
                    Rational(static_cast<long>(in.size("min_stages"))));
  }
  return res.trace;
}

StageTrace op_zero_speedup(const Inputs& in, std::size_t horizon) {
  return zero_speedup(approx_from_json(in.at("approximation")), horizon, in.size("check_upto", 8)).trace;
}

StageTrace op_converging(const Inputs& in, std::size_t horizon) {
  return converging_test_from(test_from_json(in.at("test")), approx_from_json(in.at("approximation")), horizon).trace;
}

StageTrace op_dce(const Inputs& in, std::size_t horizon) {
  return dce_test_from(test_from_json(in.at("test")), approx_from_json(in.at("approximation")), horizon).trace;
}

StageTrace op_lce(const Inputs& in, std::size_t horizon) {
  return lce_test_from(test_from_json(in.at("test")), approx_from_json(in.at("approximation")), horizon).trace;
}

StageTrace op_bounded_inc(const Inputs& in, std::size_t horizon) {
  return bounded_inc_test_from_speedup(approx_from_json(in.at("approximation")), horizon).trace;
}

StageTrace op_speedup_from_test(const Inputs& in, std::size_t horizon) {
  return speedup_from_bounded_inc_test(test_from_json(in.at("test")), in.rational("d"), horizon,
                                       in.maybe_rational("limit"))
      .trace;
}

StageTrace op_strong_implies_weak(const Inputs& in, std::size_t horizon) {
  auto res = strong_implies_weak(approx_from_json(in.at("approximation")), in.rational("rho"), horizon,
                                 in.size("min_hits", 1));
  StageTrace tr;
  tr.construction = "strong_implies_weak";
  tr.note("strong_hits", res.strong_hits);
  tr.note("weak_hits", res.weak_hits);
  tr.note("strong_certified", yes(res.strong_certified));
  tr.check("consistent", res.consistent);
  return tr;
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"numerics", op_numerics},
      {"verify_class", op_verify_class},
      {"normalize_distinct_dyadic", op_normalize},
      {"compose_order", op_compose_order},
      {"two_sided", op_two_sided},
      {"ratio_trace", op_ratio_trace},
      {"limitfree_ratio", op_limitfree_ratio},
      {"weak_to_speedup", op_weak_to_speedup},
      {"solovay_shift_left", op_shift_left},
      {"solovay_shift_right", op_shift_right},
      {"nocover_witness", op_nocover},
      {"escape_order", op_escape_order},
      {"strong_implies_weak", op_strong_implies_weak},
      {"classify_test", op_classify_test},
      {"covers", op_covers},
      {"disjointify", op_disjointify},
      {"rettinger_test", op_rettinger},
      {"ml_test_for", op_ml_test_for},
      {"weak_speed_test", op_weak_speed_test},
      {"speedup_from_ml", op_speedup_from_ml},
      {"zero_speedup", op_zero_speedup},
      {"converging_test_from", op_converging},
      {"dce_test_from", op_dce},
      {"lce_test_from", op_lce},
      {"bounded_inc_test_from_speedup", op_bounded_inc},
      {"speedup_from_bounded_inc_test", op_speedup_from_test},
  };
  return table;
}

bool is_malformed(Errc code) {
  return code == Errc::malformed_input || code == Errc::unknown_family || code == Errc::invalid_argument ||
         code == Errc::missing_limit;
}

}  // namespace

std::vector<std::string> scenario_operations() {
  std::vector<std::string> out;
  for (const auto& [name, h] : handlers()) out.push_back(name);
  return out;
}

ScenarioOutcome run_scenario(const Json& doc) {
  ScenarioOutcome out;
  try {
    if (!doc.is_object()) throw Error(Errc::malformed_input, "scenario must be a JSON object");
    out.name = doc.value("name", std::string("scenario"));
    std::string op = doc.at("operation").get<std::string>();
    auto it = handlers().find(op);
    if (it == handlers().end()) throw Error(Errc::malformed_input, "unknown operation '" + op + "'");
    std::size_t horizon = doc.value("horizon", std::size_t{20});
    static const Json empty = Json::object();
    Inputs in(doc.contains("inputs") ? doc.at("inputs") : empty);
    out.trace = it->second(in, horizon);
  } catch (const Json::exception& e) {
    out.exit_code = exit_malformed;
    out.messages.push_back(std::string("malformed scenario: ") + e.what());
    return out;
  } catch (const Error& e) {
    out.exit_code = is_malformed(e.code()) ? exit_malformed : exit_assertion;
    out.messages.push_back(std::string(to_string(e.code())) + ": " + e.what());
    return out;
  }

  for (const Assertion* a : out.trace.failures()) {
    out.exit_code = exit_assertion;
    out.messages.push_back("assertion failed: " + a->name + ": " + a->lhs.str() + " " +
                           std::string(to_string(a->relation)) + " " + a->rhs.str());
  }
  if (doc.contains("expect") && doc.at("expect").contains("summary")) {
    for (const auto& [key, want] : doc.at("expect").at("summary").items()) {
      std::string expected = want.is_string() ? want.get<std::string>() : want.dump();
      auto got = out.trace.value(key);
      if (!got || *got != expected) {
        out.exit_code = exit_assertion;
        out.messages.push_back("golden mismatch: " + key + ": expected " + expected + ", got " +
                               (got ? *got : std::string("<missing>")));
      }
    }
  }
  return out;
}

ScenarioOutcome run_scenario_file(const std::filesystem::path& file, const std::filesystem::path& out_dir) {
  std::ifstream in(file);
  if (!in) {
    ScenarioOutcome out;
    out.exit_code = exit_malformed;
    out.messages.push_back("cannot read " + file.string());
    return out;
  }
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    ScenarioOutcome out;
    out.exit_code = exit_malformed;
    out.messages.push_back(std::string("malformed JSON: ") + e.what());
    return out;
  }
  ScenarioOutcome out = run_scenario(doc);
  if (out.exit_code == exit_malformed) return out;
  if (out.name.empty() || out.name == "scenario") out.name = file.stem().string();
  std::string trace_name = out.name + ".trace.jsonl";
  std::string summary_name = out.name + ".summary.csv";
  if (doc.contains("outputs")) {
    trace_name = doc.at("outputs").value("trace", trace_name);
    summary_name = doc.at("outputs").value("summary", summary_name);
  }
  std::filesystem::create_directories(out_dir);
  out.trace_path = out_dir / trace_name;
  out.summary_path = out_dir / summary_name;
  std::ofstream(out.trace_path, std::ios::binary) << stage_trace_jsonl(out.trace);
  std::ofstream(out.summary_path, std::ios::binary) << stage_summary_csv(out.trace);
  return out;
}

}  // namespace speedlab
