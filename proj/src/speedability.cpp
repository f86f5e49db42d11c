#include "speedlab/speedability.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "speedlab/config.hpp"

namespace speedlab {

namespace {

const Rational& require_limit(const Approximation& a, const char* who) {
  if (!a.declared_limit()) {
    throw Error(Errc::missing_limit, std::string(who) + ": ratio requires a limit source");
  }
  return *a.declared_limit();
}

void require_left_ce(const Approximation& a, const char* who) {
  if (a.class_tag() != ClassTag::left_ce) {
    throw Error(Errc::precondition_failed, std::string(who) + " needs left-c.e. approximations");
  }
}

}  // namespace

RatioTrace ratio_trace(const Approximation& a, const ComputableOrder& f, std::size_t horizon) {
  const Rational& alpha = require_limit(a, "ratio_trace");
  RatioTrace trace;
  trace.reserve(horizon + 1);
  for (std::size_t s = 0; s <= horizon; ++s) {
    RatioRecord rec{s, f(s), std::nullopt};
    Rational den = abs(alpha - a.term(s));
    if (!den.is_zero()) rec.ratio = abs(alpha - a.term(rec.fs)) / den;
    trace.push_back(std::move(rec));
  }
  return trace;
}

RatioTrace pair_ratio_trace(const Approximation& a, const Approximation& b, std::size_t horizon) {
  const Rational& alpha = require_limit(a, "pair_ratio_trace");
  if (b.declared_limit() && *b.declared_limit() != alpha) {
    throw Error(Errc::precondition_failed, "pair_ratio_trace: approximations have different limits");
  }
  RatioTrace trace;
  for (std::size_t s = 0; s <= horizon; ++s) {
    RatioRecord rec{s, s, std::nullopt};
    Rational den = abs(alpha - a.term(s));
    if (!den.is_zero()) rec.ratio = abs(alpha - b.term(s)) / den;
    trace.push_back(std::move(rec));
  }
  return trace;
}

Rational limitfree_ratio(const Approximation& a, std::size_t s, std::size_t t, std::size_t probe) {
  if (t < s || probe <= t) {
    throw Error(Errc::invalid_argument, "limitfree_ratio needs probe > t >= s");
  }
  const Rational& ai = a.term(probe);
  Rational den = abs(ai - a.term(s));
  if (den.is_zero()) throw Error(Errc::degenerate_probe, "degenerate probe: a_i = a_s", probe);
  return abs(ai - a.term(t)) / den;
}

Rational liminf_upper_bound(const RatioTrace& trace, std::size_t window) {
  if (window == 0) throw Error(Errc::invalid_argument, "liminf_upper_bound needs window >= 1");
  std::optional<Rational> best;
  std::size_t seen = 0;
  for (auto it = trace.rbegin(); it != trace.rend() && seen < window; ++it) {
    if (!it->ratio) continue;
    ++seen;
    if (!best || *it->ratio < *best) best = *it->ratio;
  }
  if (!best) throw Error(Errc::invalid_argument, "liminf_upper_bound needs a nonempty trace");
  return *best;
}

std::string SpeedupCertificate::describe() const {
  std::ostringstream os;
  if (verdict == Verdict::speedable_by_definition) {
    os << "speedable-by-definition (rational limit attained at " << skipped.size() << " indices)";
    return os.str();
  }
  os << "ratio <= " << rho << " at " << hits << " distinct indices within horizon " << horizon;
  if (liminf_bound) os << "; liminf upper bound " << *liminf_bound;
  return os.str();
}

SpeedupCertificate certify(const RatioTrace& trace, const Rational& rho, std::size_t window) {
  SpeedupCertificate cert;
  cert.rho = rho;
  cert.horizon = trace.empty() ? 0 : trace.back().s;
  for (const auto& rec : trace) {
    if (!rec.ratio) {
      cert.skipped.push_back(rec.s);
    } else if (*rec.ratio <= rho) {
      ++cert.hits;
    }
  }
  if (!cert.skipped.empty()) cert.verdict = Verdict::speedable_by_definition;
  bool any_ratio = std::any_of(trace.begin(), trace.end(), [](const RatioRecord& r) { return r.ratio.has_value(); });
  if (any_ratio && window > 0) cert.liminf_bound = liminf_upper_bound(trace, window);
  return cert;
}

SpeedupWitness make_witness(const Approximation& a, const ComputableOrder& f, const Rational& rho,
                            std::size_t horizon) {
  if (rho.sign() < 0 || rho >= Rational(1)) {
    throw Error(Errc::invalid_argument, "rho must lie in [0,1)");
  }
  return SpeedupWitness{a, f, rho, ratio_trace(a, f, horizon)};
}

StrongWeakConsistency strong_implies_weak(const Approximation& a, const Rational& rho,
                                          std::size_t horizon, std::size_t min_hits) {
  StrongWeakConsistency out;
  auto succ = ComputableOrder::successor();
  auto strong = ratio_trace(a, succ, horizon);
  auto weak = pair_ratio_trace(a, compose_order(a, succ), horizon);
  for (const auto& r : strong) out.strong_hits += (r.ratio && *r.ratio <= rho) ? 1 : 0;
  for (const auto& r : weak) out.weak_hits += (r.ratio && *r.ratio <= rho) ? 1 : 0;
  out.strong_certified = out.strong_hits >= min_hits;
  out.consistent = !out.strong_certified || out.weak_hits >= min_hits;
  return out;
}

ComputableOrder weak_to_speedup(const Approximation& a, const Approximation& b, std::size_t horizon) {
  require_left_ce(a, "weak_to_speedup");
  require_left_ce(b, "weak_to_speedup");
  if (a.declared_limit() && b.declared_limit() && *a.declared_limit() != *b.declared_limit()) {
    throw Error(Errc::precondition_failed, "weak_to_speedup: approximations have different limits");
  }
  // b is nondecreasing, so each search may resume where the previous ended.
  struct Search {
    Approximation a;
    Approximation b;
    std::size_t last = 0;
  };
  auto st = std::make_shared<Search>(Search{a, b, 0});
  ComputableOrder f("weak_to_speedup", [st](std::size_t n) {
    std::size_t cap = horizon_cap();
    std::size_t j = st->last;
    const Rational& target = st->b.term(n);
    while (!(st->a.term(j) >= target)) {
      if (++j >= cap || !st->a.has_term(j)) {
        throw Error(Errc::horizon_exhausted,
                    "horizon exhausted searching f(" + std::to_string(n) + ")", n);
      }
    }
    st->last = j;
    return j;
  });
  for (std::size_t n = 0; n <= horizon; ++n) f(n);
  return f;
}

namespace {

void check_shift_inputs(const Approximation& a_ref, const Approximation& b_ref, const Approximation& other,
                        const Approximation& same_limit_as, const Rational& c) {
  require_left_ce(a_ref, "solovay shift");
  require_left_ce(b_ref, "solovay shift");
  require_left_ce(other, "solovay shift");
  if (!a_ref.declared_limit() || !b_ref.declared_limit()) {
    throw Error(Errc::missing_limit, "solovay shift needs declared limits for both reals");
  }
  if (c.sign() <= 0) throw Error(Errc::invalid_argument, "solovay shift needs c > 0");
  if (other.declared_limit() && *other.declared_limit() != *same_limit_as.declared_limit()) {
    throw Error(Errc::precondition_failed, "solovay shift: new approximation has a different limit");
  }
}

std::optional<std::size_t> first_witness_failure(const Rational& alpha, const Rational& beta,
                                                 const Rational& c, const Approximation& a,
                                                 const Approximation& b, std::size_t horizon) {
  for (std::size_t s = 0; s <= horizon; ++s) {
    if (alpha - a.term(s) > c * (beta - b.term(s))) return s;
  }
  return std::nullopt;
}

}  // namespace

ShiftResult solovay_shift_left(const Approximation& a_ref, const Approximation& b_ref, const Rational& c,
                               const Approximation& a_new, std::size_t horizon) {
  check_shift_inputs(a_ref, b_ref, a_new, a_ref, c);
  if (!a_ref.term(0).is_zero()) {
    throw Error(Errc::precondition_failed, "solovay_shift_left needs a_ref(0) = 0");
  }
  struct Search {
    Approximation a_ref;
    Approximation a_new;
    std::size_t last = 0;
  };
  auto st = std::make_shared<Search>(Search{a_ref, a_new, 0});
  ComputableOrder f("shift_left", [st](std::size_t s) {
    std::size_t cap = horizon_cap();
    const Rational& target = st->a_new.term(s);
    std::size_t j = st->last;
    while (st->a_ref.term(j + 1) <= target) {
      if (++j >= cap) {
        throw Error(Errc::horizon_exhausted, "horizon exhausted searching f(" + std::to_string(s) + ")", s);
      }
    }
    st->last = j;
    return j;
  });
  Approximation b_new(
      ClassTag::left_ce, [b_ref, f](std::size_t s) { return b_ref.term(f(s)); }, b_ref.declared_limit());
  b_new.set_provenance({"shift_left", {{"base", b_ref.provenance().family}}});
  ShiftResult out{b_new, f.values(horizon), c, std::nullopt};
  out.first_violation = first_witness_failure(*a_ref.declared_limit(), *b_ref.declared_limit(), c, a_new,
                                              b_new, horizon);
  return out;
}

ShiftResult solovay_shift_right(const Approximation& a_ref, const Approximation& b_ref, const Rational& c,
                                const Approximation& b_new, std::size_t horizon) {
  check_shift_inputs(a_ref, b_ref, b_new, b_ref, c);
  struct Search {
    Approximation b_ref;
    Approximation b_new;
    std::size_t last = 0;
  };
  auto st = std::make_shared<Search>(Search{b_ref, b_new, 0});
  ComputableOrder g("shift_right", [st](std::size_t s) {
    std::size_t cap = horizon_cap();
    const Rational& target = st->b_new.term(s);
    std::size_t j = st->last;
    while (st->b_ref.term(j) < target) {
      if (++j >= cap) {
        throw Error(Errc::horizon_exhausted, "horizon exhausted searching g(" + std::to_string(s) + ")", s);
      }
    }
    st->last = j;
    return j;
  });
  Approximation a_new(
      ClassTag::left_ce, [a_ref, g](std::size_t s) { return a_ref.term(g(s)); }, a_ref.declared_limit());
  a_new.set_provenance({"shift_right", {{"base", a_ref.provenance().family}}});
  ShiftResult out{a_new, g.values(horizon), c, std::nullopt};
  out.first_violation = first_witness_failure(*a_ref.declared_limit(), *b_ref.declared_limit(), c, a_new,
                                              b_new, horizon);
  return out;
}

std::size_t nocover_witness(const Interval& box, std::span<const Rational> centers,
                            std::span<const Rational> radii) {
  if (centers.size() != radii.size()) {
    throw Error(Errc::invalid_argument, "nocover_witness: centers and radii differ in length");
  }
  if (centers.size() < 2) throw Error(Errc::invalid_argument, "nocover_witness needs m >= 1");
  const std::size_t m = centers.size() - 1;
  const Rational min_radius = box.length() / Rational(static_cast<long>(m));
  for (std::size_t i = 0; i <= m; ++i) {
    if (radii[i] < min_radius) {
      throw NoCoverError("radius " + std::to_string(i) + " below (b-a)/m", std::nullopt, i);
    }
  }
  for (std::size_t j = 1; j <= m; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (abs(centers[j] - centers[i]) <= radii[i]) {
        throw NoCoverError("violated pair (" + std::to_string(i) + "," + std::to_string(j) + ")",
                           std::make_pair(i, j), std::nullopt);
      }
    }
  }
  std::vector<std::size_t> order(centers.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return centers[x] < centers[y]; });
  if (!box.contains(centers[order.front()])) return order.front();
  if (!box.contains(centers[order.back()])) return order.back();
  throw Error(Errc::invariant_violation, "nocover_witness: both extreme centers inside the box");
}

EscapeState EscapeState::initial(const Rational& rho, std::size_t horizon) {
  if (rho.sign() < 0 || rho >= Rational(1)) throw Error(Errc::invalid_argument, "rho must lie in [0,1)");
  EscapeState st;
  st.rho = rho;
  st.c = rho / (Rational(1) + rho);
  if (!st.c.is_zero()) {
    Rational bound = Rational(1) + Rational(1) / (st.c * st.c);
    mpz_class ceil_bound = -floor_scaled(-bound, 0);
    st.k = static_cast<std::size_t>(ceil_bound.get_ui());
  }
  st.horizon = horizon;
  std::vector<std::size_t> f0(horizon + 1);
  std::iota(f0.begin(), f0.end(), 1);
  st.orders.push_back(std::move(f0));
  st.strictly_increasing.push_back(true);
  return st;
}

Interval forbidden_interval(const Approximation& a, const EscapeState& state, std::size_t j, std::size_t l) {
  const Rational& center = a.term(state.orders.at(j).at(l));
  Rational radius = state.c * abs(center - a.term(l));
  return Interval(center - radius, center + radius);
}

EscapeState escape_order(const Approximation& a, const EscapeState& state, std::size_t cutoff,
                         std::size_t search_limit) {
  if (!state.cutoffs.empty() && cutoff < state.cutoffs.back()) {
    throw Error(Errc::invalid_argument, "escape_order cutoffs must be nondecreasing");
  }
  EscapeState next = state;
  next.cutoffs.push_back(cutoff);
  const std::size_t prior = state.orders.size();  // f_0..f_i
  const std::size_t cap = std::min(search_limit, horizon_cap());
  std::vector<Interval> forbidden;
  std::vector<std::size_t> f(state.horizon + 1);
  for (std::size_t n = 0; n <= state.horizon; ++n) {
    if (!state.c.is_zero()) {
      for (std::size_t j = 0; j < prior; ++j) {
        if (next.cutoffs[j] <= n) forbidden.push_back(forbidden_interval(a, state, j, n));
      }
    }
    if (n < cutoff) {
      f[n] = n + 1;
      continue;
    }
    std::size_t m = n + 1;
    auto blocked = [&](std::size_t idx) {
      const Rational& v = a.term(idx);
      return std::any_of(forbidden.begin(), forbidden.end(), [&](const Interval& I) { return I.contains(v); });
    };
    while (blocked(m)) {
      if (++m - n > cap) {
        throw Error(Errc::horizon_exhausted,
                    "escape search exhausted at n = " + std::to_string(n) + " with " +
                        std::to_string(forbidden.size()) + " forbidden intervals",
                    n);
      }
    }
    f[n] = m;
  }
  bool strict = true;
  for (std::size_t n = 1; n < f.size(); ++n) {
    if (f[n] < f[n - 1]) {
      throw Error(Errc::invariant_violation, "escape order decreased at n = " + std::to_string(n), n);
    }
    strict = strict && f[n] > f[n - 1];
  }
  next.orders.push_back(std::move(f));
  next.strictly_increasing.push_back(strict);
  return next;
}

}  // namespace speedlab
