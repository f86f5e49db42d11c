#pragma once

// Speed-up diagnostics. Nothing here decides speedability: liminf is not
// computable, so every verdict is a finite certificate over a stated horizon.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "speedlab/approximations.hpp"
#include "speedlab/error.hpp"
#include "speedlab/numerics.hpp"

namespace speedlab {

/// One row of a ratio trace. `ratio` is empty when a_s equals the limit.
struct RatioRecord {
  std::size_t s = 0;
  std::size_t fs = 0;
  std::optional<Rational> ratio;
};

using RatioTrace = std::vector<RatioRecord>;

/// |alpha - a_{f(s)}| / |alpha - a_s| for s = 0..horizon.
/// Throws Errc::missing_limit without a declared limit.
RatioTrace ratio_trace(const Approximation& a, const ComputableOrder& f, std::size_t horizon);

/// |alpha - b_s| / |alpha - a_s|, the weak-speedability ratio of two
/// approximations of the same limit. fs is set to s.
RatioTrace pair_ratio_trace(const Approximation& a, const Approximation& b, std::size_t horizon);

/// |a_i - a_t| / |a_i - a_s|, the limit-free proxy for the ratio at (s, t).
/// Needs probe > t >= s; throws Errc::degenerate_probe when a_i = a_s.
Rational limitfree_ratio(const Approximation& a, std::size_t s, std::size_t t, std::size_t probe);

/// Minimum ratio over the last `window` non-skipped records. This bounds the
/// liminf from above on the horizon; it is not the liminf.
Rational liminf_upper_bound(const RatioTrace& trace, std::size_t window);

enum class Verdict { certificate, speedable_by_definition };

/// "ratio <= rho at `hits` indices within the horizon". When the trace
/// witnesses a_s = alpha the verdict is speedable_by_definition (rational
/// limit) and no ratio is computed at those indices.
struct SpeedupCertificate {
  Rational rho;
  std::size_t horizon = 0;
  std::size_t hits = 0;
  std::vector<std::size_t> skipped;
  std::optional<Rational> liminf_bound;
  Verdict verdict = Verdict::certificate;

  std::string describe() const;
};

SpeedupCertificate certify(const RatioTrace& trace, const Rational& rho, std::size_t window);

/// Base approximation, order, rho in [0,1) and the trace on a horizon.
struct SpeedupWitness {
  Approximation base;
  ComputableOrder order;
  Rational rho;
  RatioTrace trace;
};

SpeedupWitness make_witness(const Approximation& a, const ComputableOrder& f, const Rational& rho,
                            std::size_t horizon);

/// Strong speedability via s -> s+1 certified at >= min_hits indices implies
/// the weak check on (a, a o (s+1)) passes with the same rho.
struct StrongWeakConsistency {
  std::size_t strong_hits = 0;
  std::size_t weak_hits = 0;
  bool strong_certified = false;
  bool consistent = true;
};

StrongWeakConsistency strong_implies_weak(const Approximation& a, const Rational& rho,
                                          std::size_t horizon, std::size_t min_hits);

/// f(n) = least index with a_{f(n)} >= b_n, for two left-c.e. approximations
/// of the same limit. Values up to `horizon` are computed eagerly; later
/// values on demand. Throws Errc::horizon_exhausted naming the failing n.
ComputableOrder weak_to_speedup(const Approximation& a, const Approximation& b, std::size_t horizon);

struct ShiftResult {
  Approximation approximation;     // b_new for a left shift, a_new for a right shift
  std::vector<std::size_t> index;  // f(s) or g(s) for s = 0..horizon
  Rational c;
  std::optional<std::size_t> first_violation;  // alpha - a_new(s) > c (beta - b_new(s))
};

/// Given alpha - a_ref(s) <= c (beta - b_ref(s)) and a new left-c.e.
/// approximation a_new of alpha, builds b_new(s) = b_ref(f(s)) with f(s) the
/// largest index where a_new(s) >= a_ref(f(s)). Requires a_ref(0) = 0.
ShiftResult solovay_shift_left(const Approximation& a_ref, const Approximation& b_ref, const Rational& c,
                               const Approximation& a_new, std::size_t horizon);

/// Mirror: a_new(s) = a_ref(g(s)) with g(s) the smallest index where
/// b_new(s) <= b_ref(g(s)).
ShiftResult solovay_shift_right(const Approximation& a_ref, const Approximation& b_ref, const Rational& c,
                                const Approximation& b_new, std::size_t horizon);

/// Raised by nocover_witness when its hypotheses fail.
class NoCoverError : public Error {
 public:
  NoCoverError(const std::string& what, std::optional<std::pair<std::size_t, std::size_t>> pair,
               std::optional<std::size_t> radius)
      : Error(Errc::precondition_failed, what), pair_(pair), radius_(radius) {}

  const std::optional<std::pair<std::size_t, std::size_t>>& pair() const { return pair_; }
  const std::optional<std::size_t>& radius() const { return radius_; }

 private:
  std::optional<std::pair<std::size_t, std::size_t>> pair_;
  std::optional<std::size_t> radius_;
};

/// With d_i >= (b-a)/m for all i and z_j outside [z_i - d_i, z_i + d_i] for
/// all i < j, some center escapes [a,b]. Returns the index of the smallest
/// center if it escapes, else the index of the largest.
std::size_t nocover_witness(const Interval& box, std::span<const Rational> centers,
                            std::span<const Rational> radii);

/// State of the escape-order family: c = rho/(1+rho), k = ceil(1 + c^-2),
/// orders f_0..f_i materialized on 0..horizon and cutoffs n_0..n_{i-1}.
struct EscapeState {
  Rational rho;
  Rational c;
  std::optional<std::size_t> k;  // empty when c = 0
  std::size_t horizon = 0;
  std::vector<std::vector<std::size_t>> orders;
  std::vector<std::size_t> cutoffs;
  std::vector<bool> strictly_increasing;

  /// f_0(n) = n + 1.
  static EscapeState initial(const Rational& rho, std::size_t horizon);
};

/// Forbidden interval I_j(l) = a_{f_j(l)} -/+ c |a_{f_j(l)} - a_l|.
Interval forbidden_interval(const Approximation& a, const EscapeState& state, std::size_t j, std::size_t l);

/// Appends f_{i+1} given the caller's cutoff n_i: n+1 below the cutoff,
/// otherwise the least m > n with a_m outside every I_j(l), j <= i,
/// n_j <= l <= n. With c = 0 there are no forbidden intervals.
/// Each search looks at most `search_limit` indices past n (and never past
/// the horizon cap). Throws Errc::horizon_exhausted with the failing n.
EscapeState escape_order(const Approximation& a, const EscapeState& state, std::size_t cutoff,
                         std::size_t search_limit = 4096);

}  // namespace speedlab
