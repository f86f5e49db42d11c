#include "speedlab/approximations.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <string>

#include "speedlab/config.hpp"
#include "speedlab/error.hpp"

namespace speedlab {

std::string_view to_string(ClassTag tag) {
  switch (tag) {
    case ClassTag::ca: return "CA";
    case ClassTag::left_ce: return "LeftCE";
    case ClassTag::right_ce: return "RightCE";
    case ClassTag::dce: return "DCE";
  }
  return "CA";
}

ClassTag parse_class_tag(std::string_view text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "ca") return ClassTag::ca;
  if (lower == "leftce" || lower == "lce" || lower == "left-ce") return ClassTag::left_ce;
  if (lower == "rightce" || lower == "rce" || lower == "right-ce") return ClassTag::right_ce;
  if (lower == "dce") return ClassTag::dce;
  throw Error(Errc::malformed_input, "unknown class tag '" + std::string(text) + "'");
}

// ----------------------------------------------------------- Approximation

Approximation::Approximation(ClassTag tag, Extender extender, std::optional<Rational> declared_limit,
                             std::optional<Rational> variation_bound)
    : state_(std::make_shared<State>()) {
  if (!extender) throw Error(Errc::invalid_argument, "approximation needs an extender");
  if (tag == ClassTag::dce && !variation_bound) {
    throw Error(Errc::invalid_argument, "DCE approximation needs a variation bound");
  }
  state_->tag = tag;
  state_->extender = std::move(extender);
  state_->limit = std::move(declared_limit);
  state_->bound = std::move(variation_bound);
}

Approximation Approximation::finite(ClassTag tag, std::vector<Rational> terms,
                                    std::optional<Rational> declared_limit,
                                    std::optional<Rational> variation_bound) {
  auto shared = std::make_shared<std::vector<Rational>>(std::move(terms));
  std::size_t n = shared->size();
  Approximation a(
      tag, [shared](std::size_t s) { return (*shared)[s]; }, std::move(declared_limit),
      std::move(variation_bound));
  a.state_->length = n;
  a.state_->provenance.family = "inline";
  return a;
}

const Rational& Approximation::term(std::size_t s) const {
  State& st = *state_;
  if (st.length && s >= *st.length) {
    throw Error(Errc::horizon_exhausted,
                "approximation has only " + std::to_string(*st.length) + " terms; asked for index " +
                    std::to_string(s),
                s);
  }
  while (st.cache.size() <= s) {
    std::size_t next = st.cache.size();
    Rational v = st.extender(next);
    if (st.unit_bounded && (v.sign() < 0 || v > Rational(1))) {
      throw Error(Errc::invalid_argument,
                  "approximation term " + std::to_string(next) + " = " + v.str() + " leaves [0,1]",
                  next);
    }
    st.cache.push_back(std::move(v));
  }
  return st.cache[s];
}

std::vector<Rational> Approximation::prefix(std::size_t count) const {
  std::vector<Rational> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) out.push_back(term(s));
  return out;
}

Approximation& Approximation::allow_unbounded() {
  state_->unit_bounded = false;
  return *this;
}

Approximation& Approximation::set_provenance(Provenance p) {
  state_->provenance = std::move(p);
  return *this;
}

// --------------------------------------------------------- ComputableOrder

ComputableOrder::ComputableOrder(std::string name, Rule rule) : state_(std::make_shared<State>()) {
  if (!rule) throw Error(Errc::invalid_argument, "order needs a rule");
  state_->name = std::move(name);
  state_->rule = std::move(rule);
}

ComputableOrder ComputableOrder::identity() {
  return ComputableOrder("identity", [](std::size_t s) { return s; });
}

ComputableOrder ComputableOrder::successor() {
  return ComputableOrder("successor", [](std::size_t s) { return s + 1; });
}

ComputableOrder ComputableOrder::affine(std::size_t mul, std::size_t add) {
  if (mul == 0) throw Error(Errc::invalid_argument, "affine order needs a positive slope");
  return ComputableOrder("affine(" + std::to_string(mul) + "," + std::to_string(add) + ")",
                         [mul, add](std::size_t s) { return mul * s + add; });
}

ComputableOrder ComputableOrder::table(std::string name, std::vector<std::size_t> values) {
  if (values.empty()) throw Error(Errc::invalid_argument, "order table is empty");
  auto shared = std::make_shared<std::vector<std::size_t>>(std::move(values));
  return ComputableOrder(std::move(name), [shared](std::size_t s) {
    const auto& v = *shared;
    if (s < v.size()) return v[s];
    return v.back() + (s - v.size() + 1);
  });
}

std::size_t ComputableOrder::operator()(std::size_t s) const {
  State& st = *state_;
  while (st.cache.size() <= s) st.cache.push_back(st.rule(st.cache.size()));
  return st.cache[s];
}

std::vector<std::size_t> ComputableOrder::values(std::size_t horizon) const {
  std::vector<std::size_t> out;
  out.reserve(horizon + 1);
  for (std::size_t s = 0; s <= horizon; ++s) out.push_back((*this)(s));
  return out;
}

ComputableOrder::Report ComputableOrder::verify(std::size_t horizon) const {
  Report r;
  auto v = values(horizon);
  for (std::size_t s = 1; s < v.size(); ++s) {
    if (v[s] < v[s - 1]) {
      r.nondecreasing = false;
      r.first_violation = s;
      break;
    }
  }
  std::size_t top = *std::max_element(v.begin(), v.end());
  r.unbounded_witness = unbounded_witness(top + 1, horizon_cap());
  return r;
}

std::optional<std::size_t> ComputableOrder::unbounded_witness(std::size_t bound,
                                                              std::size_t search_limit) const {
  for (std::size_t s = 0; s < search_limit; ++s) {
    if ((*this)(s) > bound) return s;
  }
  return std::nullopt;
}

// ------------------------------------------------------------ verification

Rational variation(const Approximation& a, std::size_t horizon) {
  Rational total(0);
  for (std::size_t s = 0; s < horizon && a.has_term(s + 1); ++s) {
    total += abs(a.term(s + 1) - a.term(s));
  }
  return total;
}

ClassReport verify_class(const Approximation& a, std::size_t horizon) {
  if (horizon == 0) throw Error(Errc::invalid_argument, "verify_class needs horizon >= 1");
  if (a.length()) horizon = std::min(horizon, *a.length() - 1);
  ClassReport r;
  r.variation = Rational(0);
  for (std::size_t s = 0; s < horizon; ++s) {
    const Rational& x = a.term(s);
    const Rational& y = a.term(s + 1);
    r.variation += abs(y - x);
    if (!r.ok) continue;
    bool violated = false;
    switch (a.class_tag()) {
      case ClassTag::left_ce: violated = y < x; break;
      case ClassTag::right_ce: violated = y > x; break;
      case ClassTag::dce: violated = r.variation > *a.variation_bound(); break;
      case ClassTag::ca: break;
    }
    if (violated) {
      r.ok = false;
      r.first_violation = s + 1;
    }
  }
  return r;
}

// ----------------------------------------------------------- normalization

namespace {

// Largest k/2^m strictly below x.
Rational dyadic_below(const Rational& x, unsigned long m) {
  mpz_class ceil_scaled = -floor_scaled(-x, m);
  return Rational(mpz_class(ceil_scaled - 1), mpz_class(1)) * pow2(-static_cast<long>(m));
}

// Monotone normalizer for nondecreasing input: strictly increasing dyadics
// b_s < M_s = max input seen, with M_s - b_s <= 2^{-(s+2)} unless the
// input term itself passes through.
class LeftNormalizer {
 public:
  explicit LeftNormalizer(std::function<Rational(std::size_t)> input) : input_(std::move(input)) {}

  Rational next(std::size_t s) {
    while (consumed_ <= s) fold();
    const Rational a_s = input_(s);
    if (a_s.is_dyadic() && a_s == running_max_ && (!prev_ || a_s > *prev_)) {
      prev_ = a_s;
      return a_s;
    }
    std::size_t budget = horizon_cap();
    while (running_max_.is_zero() || (prev_ && running_max_ <= *prev_)) {
      if (budget-- == 0) {
        throw Error(Errc::horizon_exhausted,
                    "normalization found no input above the previous output", s);
      }
      fold();
    }
    unsigned long m = static_cast<unsigned long>(s) + 2;
    Rational b = dyadic_below(running_max_, m);
    while (b.sign() < 0 || (prev_ && b <= *prev_)) b = dyadic_below(running_max_, ++m);
    prev_ = b;
    return b;
  }

 private:
  void fold() {
    Rational v = input_(consumed_++);
    if (consumed_ == 1 || v > running_max_) running_max_ = std::move(v);
  }

  std::function<Rational(std::size_t)> input_;
  std::size_t consumed_ = 0;
  Rational running_max_;
  std::optional<Rational> prev_;
};

// Round to denominator 2^{s+2}; separate repeats with offsets 2^{-(s+4+r)}.
class DistinctNormalizer {
 public:
  Rational next(std::size_t s, const Rational& a_s) {
    if (a_s.is_dyadic() && !emitted_.contains(a_s)) return emit(a_s);
    const long k = static_cast<long>(s) + 2;
    Rational scaled = a_s * pow2(k) + Rational(1, 2);
    Rational q = Rational(floor_scaled(scaled, 0), mpz_class(1)) * pow2(-k);
    if (!emitted_.contains(q)) return emit(q);
    for (long r = 1;; ++r) {
      Rational offset = pow2(-(k + 2 + r));
      Rational candidate = q + offset <= Rational(1) ? q + offset : q - offset;
      if (!emitted_.contains(candidate)) return emit(candidate);
    }
  }

 private:
  Rational emit(Rational v) {
    emitted_.insert(v);
    return v;
  }
  std::set<Rational> emitted_;
};

}  // namespace

Approximation normalize_distinct_dyadic(const Approximation& a) {
  Approximation::Extender ext;
  switch (a.class_tag()) {
    case ClassTag::left_ce: {
      auto norm = std::make_shared<LeftNormalizer>([a](std::size_t s) { return a.term(s); });
      ext = [norm](std::size_t s) { return norm->next(s); };
      break;
    }
    case ClassTag::right_ce: {
      auto norm = std::make_shared<LeftNormalizer>(
          [a](std::size_t s) { return Rational(1) - a.term(s); });
      ext = [norm](std::size_t s) { return Rational(1) - norm->next(s); };
      break;
    }
    case ClassTag::ca:
    case ClassTag::dce: {
      auto norm = std::make_shared<DistinctNormalizer>();
      ext = [norm, a](std::size_t s) { return norm->next(s, a.term(s)); };
      break;
    }
  }
  std::optional<Rational> bound = a.variation_bound();
  if (bound) *bound += Rational(2);
  Approximation out(a.class_tag(), std::move(ext), a.declared_limit(), bound);
  out.set_provenance({"normalize", {{"base", a.provenance().family}}});
  return out;
}

Approximation compose_order(const Approximation& a, const ComputableOrder& f) {
  Approximation out(
      a.class_tag(), [a, f](std::size_t s) { return a.term(f(s)); }, a.declared_limit(),
      a.variation_bound());
  if (!a.unit_bounded()) out.allow_unbounded();
  out.set_provenance({"compose", {{"base", a.provenance().family}, {"order", f.name()}}});
  return out;
}

// --------------------------------------------------------------- two-sided

namespace {

struct BracketPair {
  std::size_t h;
  Rational lower;
  Rational upper;
};

BracketPair bracket_at(const Approximation& a, std::size_t s) {
  Dyadic cur = Dyadic::from_rational(a.term(s));
  Dyadic prev = Dyadic::from_rational(a.term(s - 1));
  std::size_t h = msb_diff(cur, prev);
  Rational step = pow2(-static_cast<long>(h));
  return {h, max(a.term(s) - step, Rational(0)), min(a.term(s) + step, Rational(1))};
}

}  // namespace

Approximation two_sided(const Approximation& a) {
  struct Seen {
    std::set<Rational> values;
    std::size_t checked = 0;  // input terms 0..checked-1 are known distinct
  };
  auto seen = std::make_shared<Seen>();
  auto check_upto = [a, seen](std::size_t s) {
    while (seen->checked <= s) {
      const Rational& v = a.term(seen->checked);
      if (!v.is_dyadic()) {
        throw Error(Errc::invalid_argument,
                    "two-sided builder needs dyadic terms; term " + std::to_string(seen->checked) +
                        " = " + v.str(),
                    seen->checked);
      }
      if (!seen->values.insert(v).second) {
        throw Error(Errc::invalid_argument,
                    "input terms not pairwise distinct at index " + std::to_string(seen->checked),
                    seen->checked);
      }
      ++seen->checked;
    }
  };
  Approximation out(ClassTag::ca,
                    [a, check_upto](std::size_t k) {
                      std::size_t s = k / 2 + 1;
                      check_upto(s);
                      BracketPair p = bracket_at(a, s);
                      return k % 2 == 0 ? p.lower : p.upper;
                    },
                    a.declared_limit());
  out.set_provenance({"two_sided", {{"base", a.provenance().family}}});
  return out;
}

TwoSidedReport two_sided_report(const Approximation& a, std::size_t horizon) {
  if (!a.declared_limit()) throw Error(Errc::missing_limit, "two-sided report needs a declared limit");
  const Rational& alpha = *a.declared_limit();
  TwoSidedReport r;
  r.h.assign(horizon + 1, 0);
  std::vector<BracketPair> pairs;
  pairs.reserve(horizon);
  std::set<Rational> distinct{a.term(0)};
  for (std::size_t s = 1; s <= horizon; ++s) {
    if (!distinct.insert(a.term(s)).second) {
      throw Error(Errc::invalid_argument,
                  "input terms not pairwise distinct at index " + std::to_string(s), s);
    }
    pairs.push_back(bracket_at(a, s));
    r.h[s] = pairs.back().h;
    const BracketPair& p = pairs.back();
    for (const Rational* v : {&p.lower, &p.upper}) {
      if (*v < alpha) ++r.below;
      if (*v > alpha) ++r.above;
    }
  }
  std::size_t suffix_min = std::numeric_limits<std::size_t>::max();
  std::vector<StableStage> reversed;
  for (std::size_t s = horizon; s >= 1; --s) {
    if (r.h[s] < suffix_min) {
      const BracketPair& p = pairs[s - 1];
      StableStage st{s, p.h, p.lower, p.upper, p.lower < alpha && alpha < p.upper};
      r.all_stable_bracket = r.all_stable_bracket && st.brackets;
      reversed.push_back(std::move(st));
    }
    suffix_min = std::min(suffix_min, r.h[s]);
  }
  r.stable.assign(reversed.rbegin(), reversed.rend());
  return r;
}

}  // namespace speedlab
