#include "speedlab/io.hpp"

#include <sstream>

#include "speedlab/corpus.hpp"
#include "speedlab/error.hpp"

namespace speedlab {

std::string exact_string(const Rational& r) {
  if (r.is_dyadic() && !r.is_integer()) return Dyadic::from_rational(r).str();
  return r.str();
}

Rational rational_from_json(const Json& j) {
  if (j.is_string()) {
    try {
      return Rational::parse(j.get<std::string>());
    } catch (const Error& e) {
      throw Error(Errc::malformed_input, e.what());
    }
  }
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw Error(Errc::malformed_input, "expected an exact number, got " + j.dump());
}

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(Errc::malformed_input, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::string text_value(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long>());
  throw Error(Errc::malformed_input, "parameter values must be strings or integers: " + v.dump());
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

Json approximation_to_json(const Approximation& a, std::size_t count) {
  Json j;
  j["family"] = a.provenance().family;
  Json params = Json::object();
  for (const auto& [k, v] : a.provenance().params) params[k] = v;
  j["params"] = params;
  j["class_tag"] = std::string(to_string(a.class_tag()));
  j["declared_limit"] = a.declared_limit() ? Json(a.declared_limit()->str()) : Json(nullptr);
  if (a.variation_bound()) j["variation_bound"] = a.variation_bound()->str();
  Json prefix = Json::array();
  for (std::size_t s = 0; s < count && a.has_term(s); ++s) prefix.push_back(exact_string(a.term(s)));
  j["prefix"] = prefix;
  return j;
}

Approximation approximation_from_json(const Json& j) {
  if (!j.is_object()) throw Error(Errc::malformed_input, "approximation must be a JSON object");
  if (j.contains("prefix")) {
    ClassTag tag = parse_class_tag(text_value(field(j, "class_tag")));
    std::vector<Rational> terms;
    const Json& prefix = field(j, "prefix");
    if (!prefix.is_array()) throw Error(Errc::malformed_input, "prefix must be an array");
    for (const auto& t : prefix) terms.push_back(rational_from_json(t));
    std::optional<Rational> limit;
    if (j.contains("declared_limit") && !j.at("declared_limit").is_null()) {
      limit = rational_from_json(j.at("declared_limit"));
    }
    std::optional<Rational> bound;
    if (j.contains("variation_bound")) bound = rational_from_json(j.at("variation_bound"));
    if (tag == ClassTag::dce && !bound) throw Error(Errc::malformed_input, "DCE approximation needs variation_bound");
    return Approximation::finite(tag, std::move(terms), limit, bound);
  }
  CorpusSpec spec;
  spec.family = text_value(field(j, "family"));
  if (j.contains("params")) {
    const Json& p = j.at("params");
    if (!p.is_object()) throw Error(Errc::malformed_input, "params must be an object");
    for (const auto& [k, v] : p.items()) spec.params.emplace_back(k, text_value(v));
  }
  return make_corpus_real(spec);
}

Json solovay_to_json(const SolovayTest& t) {
  Json intervals = Json::array();
  for (const auto& I : t.intervals) intervals.push_back(Json::array({exact_string(I.left()), exact_string(I.right())}));
  Json j;
  j["intervals"] = intervals;
  j["budget"] = exact_string(t.budget);
  return j;
}

SolovayTest solovay_from_json(const Json& j) {
  SolovayTest t;
  const Json& intervals = field(j, "intervals");
  if (!intervals.is_array()) throw Error(Errc::malformed_input, "intervals must be an array");
  for (const auto& pair : intervals) {
    if (!pair.is_array() || pair.size() != 2) throw Error(Errc::malformed_input, "interval must be [l, r]");
    Rational l = rational_from_json(pair[0]);
    Rational r = rational_from_json(pair[1]);
    if (l > r) throw Error(Errc::malformed_input, "interval with left > right");
    t.intervals.emplace_back(l, r);
  }
  t.budget = j.contains("budget") ? rational_from_json(j.at("budget")) : t.measure();
  return t;
}

Json mltest_to_json(const MLTest& m) {
  Json levels = Json::array();
  for (const auto& level : m.levels()) {
    Json l = Json::array();
    for (const auto& s : level) l.push_back(s.str());
    levels.push_back(l);
  }
  Json schedule = Json::array();
  for (const auto& ev : m.schedule()) schedule.push_back(Json::array({ev.level, ev.bits.str()}));
  Json j;
  j["levels"] = levels;
  j["schedule"] = schedule;
  return j;
}

MLTest mltest_from_json(const Json& j) {
  const Json& levels = field(j, "levels");
  if (!levels.is_array()) throw Error(Errc::malformed_input, "levels must be an array");
  std::vector<std::vector<BitString>> out;
  try {
    for (const auto& level : levels) {
      std::vector<BitString> strings;
      for (const auto& s : level) strings.emplace_back(s.get<std::string>());
      out.push_back(std::move(strings));
    }
    std::optional<std::vector<Enumeration>> schedule;
    if (j.contains("schedule")) {
      schedule.emplace();
      for (const auto& ev : j.at("schedule")) {
        schedule->push_back({ev.at(0).get<std::size_t>(), BitString(ev.at(1).get<std::string>())});
      }
    }
    return MLTest(std::move(out), std::move(schedule));
  } catch (const Json::exception& e) {
    throw Error(Errc::malformed_input, std::string("malformed ML test: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_argument) throw Error(Errc::malformed_input, e.what());
    throw;
  }
}

std::string ratio_trace_csv(const RatioTrace& trace) {
  std::ostringstream os;
  os << "s,f_s,ratio_num,ratio_den,skipped_flag\n";
  for (const auto& r : trace) {
    os << r.s << ',' << r.fs << ',';
    if (r.ratio) {
      os << r.ratio->numerator().get_str() << ',' << r.ratio->denominator().get_str() << ",0\n";
    } else {
      os << ",,1\n";
    }
  }
  return os.str();
}

std::string stage_trace_jsonl(const StageTrace& trace) {
  std::string out;
  for (const auto& rec : trace.records) {
    Json j;
    j["stage"] = rec.stage;
    for (const auto& [k, v] : rec.fields) j[k] = v;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string stage_summary_csv(const StageTrace& trace) {
  std::ostringstream os;
  os << "kind,name,value,relation,bound,holds\n";
  os << "summary,construction," << csv_cell(trace.construction) << ",,,\n";
  for (const auto& [k, v] : trace.summary) os << "summary," << csv_cell(k) << ',' << csv_cell(v) << ",,,\n";
  for (const auto& a : trace.assertions) {
    os << "assertion," << csv_cell(a.name) << ',' << a.lhs.str() << ',' << csv_cell(std::string(to_string(a.relation)))
       << ',' << a.rhs.str() << ',' << (a.holds ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace speedlab
