#pragma once

// JSON and CSV forms of approximations, tests and traces. All numbers are
// exact strings: dyadics as "n/2^k", other rationals as "p/q".

#include <cstddef>
#include <string>

#include <json.hpp>

#include "speedlab/approximations.hpp"
#include "speedlab/constructions.hpp"
#include "speedlab/randomness_tests.hpp"
#include "speedlab/speedability.hpp"

namespace speedlab {

using Json = nlohmann::ordered_json;

/// "n/2^k" for dyadics, "p/q" otherwise.
std::string exact_string(const Rational& r);
/// Parses a JSON string or integer as a rational; throws Errc::malformed_input.
Rational rational_from_json(const Json& j);

/// {family, params, class_tag, declared_limit, variation_bound?, prefix}
Json approximation_to_json(const Approximation& a, std::size_t count);
/// Either an inline object with "prefix" (finite approximation) or a corpus
/// spec {family, params}. Throws Errc::malformed_input.
Approximation approximation_from_json(const Json& j);

/// {intervals: [["l","r"], ...], budget}
Json solovay_to_json(const SolovayTest& t);
SolovayTest solovay_from_json(const Json& j);

/// {levels: [["010", ...], ...], schedule: [[level, "bits"], ...]}
Json mltest_to_json(const MLTest& m);
MLTest mltest_from_json(const Json& j);

/// Header s,f_s,ratio_num,ratio_den,skipped_flag.
std::string ratio_trace_csv(const RatioTrace& trace);

/// One JSON object per record, newline terminated.
std::string stage_trace_jsonl(const StageTrace& trace);
/// Header kind,name,value,relation,bound,holds; summary rows first, then
/// one row per assertion.
std::string stage_summary_csv(const StageTrace& trace);

}  // namespace speedlab
