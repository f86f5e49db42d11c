#pragma once

// Computable approximations of reals and computable orders. Infinite objects
// are a cached prefix plus a total extender; every query names its horizon.

#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "speedlab/numerics.hpp"

namespace speedlab {

enum class ClassTag { ca, left_ce, right_ce, dce };

std::string_view to_string(ClassTag tag);
/// Accepts "CA", "LeftCE", "RightCE", "DCE" (case-insensitive) and the short
/// forms "ca", "lce", "rce", "dce".
ClassTag parse_class_tag(std::string_view text);

/// Where an approximation came from; only used for serialization.
struct Provenance {
  std::string family;
  std::vector<std::pair<std::string, std::string>> params;
};

class Approximation {
 public:
  /// Called with s = 0, 1, 2, ... in order, exactly once per index, so
  /// extenders may keep state.
  using Extender = std::function<Rational(std::size_t)>;

  Approximation(ClassTag tag, Extender extender, std::optional<Rational> declared_limit = {},
                std::optional<Rational> variation_bound = {});

  /// Finite approximation; querying beyond the last term throws
  /// Errc::horizon_exhausted.
  static Approximation finite(ClassTag tag, std::vector<Rational> terms,
                              std::optional<Rational> declared_limit = {},
                              std::optional<Rational> variation_bound = {});

  ClassTag class_tag() const { return state_->tag; }
  const std::optional<Rational>& declared_limit() const { return state_->limit; }
  const std::optional<Rational>& variation_bound() const { return state_->bound; }
  /// Number of terms for finite approximations.
  std::optional<std::size_t> length() const { return state_->length; }
  bool has_term(std::size_t s) const { return !state_->length || s < *state_->length; }

  /// Term a_s; materializes a_0..a_s. References stay valid for the lifetime
  /// of the approximation.
  const Rational& term(std::size_t s) const;
  /// Copy of a_0..a_{count-1}.
  std::vector<Rational> prefix(std::size_t count) const;
  std::size_t materialized() const { return state_->cache.size(); }

  /// Terms may leave [0,1] only when this is false.
  bool unit_bounded() const { return state_->unit_bounded; }
  Approximation& allow_unbounded();

  const Provenance& provenance() const { return state_->provenance; }
  Approximation& set_provenance(Provenance p);

 private:
  struct State {
    ClassTag tag;
    Extender extender;
    std::optional<Rational> limit;
    std::optional<Rational> bound;
    std::optional<std::size_t> length;
    bool unit_bounded = true;
    Provenance provenance;
    std::deque<Rational> cache;
  };
  std::shared_ptr<State> state_;
};

/// Nondecreasing unbounded map N -> N given by a total rule.
class ComputableOrder {
 public:
  using Rule = std::function<std::size_t(std::size_t)>;

  ComputableOrder(std::string name, Rule rule);

  static ComputableOrder identity();
  static ComputableOrder successor();
  /// s -> mul * s + add
  static ComputableOrder affine(std::size_t mul, std::size_t add);
  /// Explicit table; beyond the table the order continues with slope one
  /// from the last value.
  static ComputableOrder table(std::string name, std::vector<std::size_t> values);

  std::size_t operator()(std::size_t s) const;
  std::vector<std::size_t> values(std::size_t horizon) const;  // f(0..horizon)
  const std::string& name() const { return state_->name; }

  struct Report {
    bool nondecreasing = true;
    std::optional<std::size_t> first_violation;
    std::optional<std::size_t> unbounded_witness;  // s with f(s) > max materialized value
  };
  /// Checks monotonicity on f(0..horizon) and searches (up to the horizon
  /// cap) for a point above the largest materialized value.
  Report verify(std::size_t horizon) const;

  /// Least s with f(s) > bound, searching s < search_limit.
  std::optional<std::size_t> unbounded_witness(std::size_t bound, std::size_t search_limit) const;

 private:
  struct State {
    std::string name;
    Rule rule;
    std::vector<std::size_t> cache;
  };
  std::shared_ptr<State> state_;
};

struct ClassReport {
  bool ok = true;
  std::optional<std::size_t> first_violation;
  Rational variation;  // sum of |a_{s+1} - a_s| over 0..horizon
};

/// Checks the class invariant exactly on a_0..a_horizon.
ClassReport verify_class(const Approximation& a, std::size_t horizon);

/// Variation of a_0..a_horizon.
Rational variation(const Approximation& a, std::size_t horizon);

/// Same real and class tag, pairwise distinct dyadic terms. Already distinct
/// dyadic input passes through unchanged; DCE bounds grow by 2.
Approximation normalize_distinct_dyadic(const Approximation& a);

/// b_s = a_{f(s)}; tag, limit and variation bound carry over.
Approximation compose_order(const Approximation& a, const ComputableOrder& f);

/// Interleaves a_1^-, a_1^+, a_2^-, a_2^+, ... where
/// a_s^{-/+} = clamp(a_s -/+ 2^{-h(s)}) and h(s) = msb_diff(a_s, a_{s-1}).
/// Input terms must be pairwise distinct dyadics in [0,1); the check runs
/// as terms are materialized.
Approximation two_sided(const Approximation& a);

struct StableStage {
  std::size_t stage;
  std::size_t h;
  Rational lower;
  Rational upper;
  bool brackets = false;  // lower < limit < upper
};

struct TwoSidedReport {
  std::vector<std::size_t> h;  // h[s] for s = 1..horizon, h[0] unused
  std::vector<StableStage> stable;
  std::size_t below = 0;  // output terms strictly below the limit
  std::size_t above = 0;  // output terms strictly above the limit
  bool all_stable_bracket = true;
};

/// Stable stages s in 1..horizon (h(t) > h(s) for every materialized
/// t in (s, horizon]) and whether each brackets the declared limit.
TwoSidedReport two_sided_report(const Approximation& a, std::size_t horizon);

}  // namespace speedlab
