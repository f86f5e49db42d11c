#pragma once

// Stage machines for the proof constructions. Each run returns its output
// together with a StageTrace: one record per stage, terminal assertions
// checked exactly, and summary values.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "speedlab/approximations.hpp"
#include "speedlab/numerics.hpp"
#include "speedlab/randomness_tests.hpp"

namespace speedlab {

struct StageRecord {
  std::size_t stage = 0;
  std::vector<std::pair<std::string, std::string>> fields;

  StageRecord& set(std::string key, std::string value);
  StageRecord& set(std::string key, const Rational& value) { return set(std::move(key), value.str()); }
  StageRecord& set(std::string key, std::size_t value) { return set(std::move(key), std::to_string(value)); }
  StageRecord& set(std::string key, bool value) { return set(std::move(key), std::string(value ? "true" : "false")); }
  StageRecord& set(std::string key, const char* value) { return set(std::move(key), std::string(value)); }
};

enum class Relation { le, lt, eq, ge };

std::string_view to_string(Relation r);

struct Assertion {
  std::string name;
  Rational lhs;
  Relation relation = Relation::le;
  Rational rhs;
  bool holds = false;
};

struct StageTrace {
  std::string construction;
  std::vector<StageRecord> records;
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, std::string>> summary;

  StageRecord& record(std::size_t stage);
  const Assertion& check(std::string name, const Rational& lhs, Relation rel, const Rational& rhs);
  /// Boolean assertion stored as 1 = 1 or 0 = 1.
  const Assertion& check(std::string name, bool ok);
  void note(std::string key, std::string value);
  void note(std::string key, const Rational& value) { note(std::move(key), value.str()); }
  void note(std::string key, std::size_t value) { note(std::move(key), std::to_string(value)); }

  bool all_hold() const;
  std::vector<const Assertion*> failures() const;
  /// Summary value by key.
  std::optional<std::string> value(std::string_view key) const;
};

// --- Weakly speedable pair -> Solovay test -------------------------------

struct WeakSpeedTestResult {
  SolovayTest test;
  StageTrace trace;
  std::vector<std::size_t> f;  // f(0..) up to the last value used
  std::size_t covering_blocks = 0;
};

/// f(0) = 1, f(s+1) = least i > f(s) with a_i >= b_{s+1}; blocks J_0 = {0},
/// J_{r+1} = (max J_r, f(max J_r)]; I_r = [c_r, c_r + (d_r - c_r)/(1 - rho)]
/// with c_r = min a over J_r and d_r = max a over J_r and J_{r+1}. Blocks are
/// emitted while J_{r+1} ends at or below the horizon. Both inputs must stay
/// at or below the declared limit on the horizon.
WeakSpeedTestResult weak_speed_test(const Approximation& a, const Approximation& b, const Rational& rho,
                                    std::size_t horizon);

// --- ML test -> 0-speedable d.c.e. approximation -------------------------

struct SpeedupFromMlResult {
  Approximation c;
  StageTrace trace;
  std::size_t stages = 0;  // completed stages s >= 1
  Rational delta_sum;
  bool stalled = false;  // the string search ran out before `horizon` stages
};

/// Runs stages 1..horizon. sigma_0, sigma_1, ... is the schedule of `m`
/// restricted to even levels; sigma_0 counts as used at stage 0 and
/// c_0 = c_1 = r_0. At stage s the search for j(s) looks at most
/// `search_limit` indices past j(s-1); running out stops the construction
/// and sets `stalled`. The declared limit of r, if present, is used only to
/// detect true stages.
SpeedupFromMlResult speedup_from_ml(const Approximation& r, const MLTest& m, std::size_t horizon,
                                    std::size_t search_limit = 4096);

// --- Finite-injury 0-speedup ---------------------------------------------

struct AttentionSummary {
  std::size_t index = 0;
  std::size_t attention = 0;
  std::optional<std::size_t> last_stage;  // t_s
  std::size_t g = 0;                      // final value of g(s)
  std::optional<Rational> ratio;          // |alpha - a_g| / |alpha - a_s| at the final g
};

struct ZeroSpeedupResult {
  Approximation b;
  StageTrace trace;
  std::vector<AttentionSummary> indices;  // s = 0..horizon
};

/// Stages 1..horizon. Index s in 1..i requires attention at stage i when
/// a_i = a_s or |a_i - a_{g(s)}| / |a_i - a_s| >= 1/s; the least such s has
/// g(s) incremented and b_{2i} = a_s, b_{2i+1} = a_{g(s)}. b_0 = b_1 = a_0.
/// With a declared limit, indices 1..`check_upto` must end with an exact
/// ratio below 1/s.
ZeroSpeedupResult zero_speedup(const Approximation& a, std::size_t horizon, std::size_t check_upto = 8);

// --- Solovay test + approximation -> restricted Solovay test ----------------

struct AppendedTest {
  SolovayTest test;
  StageTrace trace;
  std::vector<std::size_t> origin;  // index in the input test of each appended interval
  std::vector<std::size_t> stage;   // stage s at which it was appended
};

/// At stage s <= horizon, appends the least-index unused interval I_i (i <= s)
/// containing a_s. Input intervals must be pairwise distinct.
AppendedTest converging_test_from(const SolovayTest& t, const Approximation& a, std::size_t horizon);

/// As converging_test_from for a d.c.e. approximation, asserting
/// sum (|r_i - l_i| + |l_{i+1} - r_i|) <= 3 sum |J_i| + sum |a_{s+1} - a_s|.
AppendedTest dce_test_from(const SolovayTest& t, const Approximation& a, std::size_t horizon);

/// As converging_test_from for a left-c.e. approximation, appending
/// I cap [a_s, 1] instead of I.
AppendedTest lce_test_from(const SolovayTest& t, const Approximation& a, std::size_t horizon);

/// I cap [x, 1], or nothing when empty.
std::optional<Interval> clip_left(const Interval& I, const Rational& x);

// --- Bounded increments <-> left-c.e. speedability -------------------------

struct BoundedIncTestResult {
  SolovayTest test;
  StageTrace trace;
};

/// I_s = [a_s, a_s + 2 (a_{s+1} - a_s)] for s = 0..horizon, right endpoints
/// clamped to 1.
BoundedIncTestResult bounded_inc_test_from_speedup(const Approximation& a, std::size_t horizon);

struct SpeedupFromTestResult {
  Approximation approximation;  // left endpoints l_0..l_N
  Rational rho;                 // 1 - d
  StageTrace trace;
};

/// Requires bounded increments with constant d in (0,1] on intervals
/// 0..horizon; otherwise throws Errc::precondition_failed with the first
/// violating index. With a limit, checks (alpha - l_{i+1}) / (alpha - l_i) <= 1 - d
/// at each covering index.
SpeedupFromTestResult speedup_from_bounded_inc_test(const SolovayTest& t, const Rational& d, std::size_t horizon,
                                                    std::optional<Rational> limit = {});

}  // namespace speedlab
