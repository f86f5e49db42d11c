// speedlab: scenario runner and diagnostics.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "speedlab/corpus.hpp"
#include "speedlab/error.hpp"
#include "speedlab/io.hpp"
#include "speedlab/randomness_tests.hpp"
#include "speedlab/scenario.hpp"
#include "speedlab/speedability.hpp"

using namespace speedlab;

namespace {

int exit_for(const Error& e) {
  switch (e.code()) {
    case Errc::malformed_input:
    case Errc::unknown_family:
    case Errc::invalid_argument:
    case Errc::missing_limit:
      return exit_malformed;
    default:
      return exit_assertion;
  }
}

// A path to a JSON file, or the name of a built-in corpus entry.
Json load_input(const std::string& input) {
  if (std::filesystem::exists(input)) {
    std::ifstream in(input);
    try {
      return Json::parse(in);
    } catch (const Json::exception& e) {
      throw Error(Errc::malformed_input, std::string("malformed JSON in ") + input + ": " + e.what());
    }
  }
  const CorpusEntry& entry = corpus_entry(input);
  Json j;
  j["family"] = entry.spec.family;
  Json params = Json::object();
  for (const auto& [k, v] : entry.spec.params) params[k] = v;
  j["params"] = params;
  return j;
}

ComputableOrder parse_order(const std::string& text) {
  if (text == "identity") return ComputableOrder::identity();
  if (text == "successor") return ComputableOrder::successor();
  auto colon = text.find(':');
  std::string kind = text.substr(0, colon);
  std::vector<std::size_t> values;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      std::size_t comma = rest.find(',', pos);
      std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        values.push_back(std::stoul(item));
      } catch (const std::exception&) {
        throw Error(Errc::malformed_input, "bad order value '" + item + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (kind == "affine" && values.size() == 2) return ComputableOrder::affine(values[0], values[1]);
  if (kind == "table" && !values.empty()) return ComputableOrder::table("table", values);
  throw Error(Errc::malformed_input, "order must be identity, successor, affine:M,A or table:v0,v1,...");
}

int cmd_run(const std::vector<std::string>& files, const std::string& out_dir) {
  int worst = exit_ok;
  for (const auto& f : files) {
    ScenarioOutcome out = run_scenario_file(f, out_dir);
    if (out.exit_code == exit_ok) {
      std::cout << "PASS " << out.name << '\n';
    } else {
      std::cout << "FAIL " << (out.name.empty() ? f : out.name) << " (exit " << out.exit_code << ")\n";
      for (const auto& m : out.messages) std::cerr << "  " << m << '\n';
    }
    worst = std::max(worst, out.exit_code);
  }
  return worst;
}

int cmd_verify(const std::string& input, const std::string& cls, const std::string& bi, std::size_t horizon,
               const std::string& bound) {
  Json doc = load_input(input);
  if (doc.contains("intervals") || doc.contains("generator")) {
    SolovayTest t = solovay_from_json(doc);
    std::optional<Rational> d;
    if (!bi.empty()) d = Rational::parse(bi);
    auto c = classify_test(t, horizon, d);
    std::cout << "checked " << c.checked << " intervals\n";
    std::cout << "converging tail_spread " << c.converging.tail_spread << '\n';
    std::cout << "dce gap_sum " << c.dce.gap_sum << " bound " << c.dce.bound << ' '
              << (c.dce.within_bound ? "ok" : "exceeded") << '\n';
    std::cout << "lce " << (c.lce.holds ? "ok" : "violated at " + std::to_string(*c.lce.first_violation)) << '\n';
    bool ok = true;
    if (c.bounded_increments) {
      const auto& b = *c.bounded_increments;
      std::cout << "bounded_increments " << b.d << ' '
                << (b.holds ? "ok" : "violated at " + std::to_string(*b.first_violation)) << '\n';
      ok = ok && b.holds;
    }
    if (cls == "lce" || cls == "LeftCE") ok = ok && c.lce.holds;
    if (cls == "dce" || cls == "DCE") ok = ok && c.dce.within_bound;
    return ok ? exit_ok : exit_assertion;
  }
  Approximation a = approximation_from_json(doc);
  if (!cls.empty()) {
    ClassTag tag = parse_class_tag(cls);
    std::optional<Rational> vb = bound.empty() ? a.variation_bound() : std::optional<Rational>(Rational::parse(bound));
    if (tag == ClassTag::dce && !vb) throw Error(Errc::malformed_input, "--class dce needs a variation bound");
    Approximation base = a;
    a = Approximation(tag, [base](std::size_t s) { return base.term(s); }, base.declared_limit(), vb);
    if (base.length()) horizon = std::min(horizon, *base.length() - 1);
  }
  auto rep = verify_class(a, horizon);
  std::cout << "class " << to_string(a.class_tag()) << ' ' << (rep.ok ? "ok" : "violated") << '\n';
  if (rep.first_violation) std::cout << "first_violation " << *rep.first_violation << '\n';
  std::cout << "variation " << rep.variation << '\n';
  return rep.ok ? exit_ok : exit_assertion;
}

int cmd_trace_ratio(const std::string& input, const std::string& order, std::size_t horizon, std::size_t window,
                    const std::string& rho) {
  Approximation a = approximation_from_json(load_input(input));
  RatioTrace trace = ratio_trace(a, parse_order(order), horizon);
  std::cout << ratio_trace_csv(trace);
  auto cert = certify(trace, Rational::parse(rho), window);
  std::cout << "# certificate: " << cert.describe() << '\n';
  return exit_ok;
}

int cmd_corpus_list() {
  for (const auto& e : builtin_corpus()) std::cout << e.name << '\t' << e.spec.family << '\t' << e.description << '\n';
  return exit_ok;
}

int cmd_corpus_emit(const std::string& name, std::size_t count) {
  Approximation a = corpus_real(name);
  std::cout << approximation_to_json(a, count).dump(2) << '\n';
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speedlab: speed-up diagnostics and proof constructions for approximable reals"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  std::string out_dir = "speedlab-out";
  auto* run = app.add_subcommand("run", "Run scenario files and write trace/summary artifacts");
  run->add_option("scenarios", files, "Scenario JSON files")->required();
  run->add_option("-o,--out-dir", out_dir, "Directory for artifacts");

  std::string verify_input, cls, bi, bound;
  std::size_t verify_horizon = 50;
  auto* verify = app.add_subcommand("verify", "Check an approximation class or classify a Solovay test");
  verify->add_option("input", verify_input, "JSON file or corpus name")->required();
  verify->add_option("--class", cls, "CA, LeftCE, RightCE, DCE (or lce, dce for tests)");
  verify->add_option("--bounded-increments", bi, "Constant d for bounded increments");
  verify->add_option("--variation-bound", bound, "Bound used with --class dce");
  verify->add_option("--horizon", verify_horizon, "Last index to check");

  std::string trace_input, order = "successor", rho = "1/2";
  std::size_t trace_horizon = 20, window = 5;
  auto* trace = app.add_subcommand("trace-ratio", "Emit the ratio trace CSV and a liminf certificate");
  trace->add_option("input", trace_input, "JSON file or corpus name")->required();
  trace->add_option("--order", order, "identity, successor, affine:M,A or table:v0,v1,...");
  trace->add_option("--horizon", trace_horizon, "Last index");
  trace->add_option("--window", window, "Records used for the liminf upper bound");
  trace->add_option("--rho", rho, "Threshold counted by the certificate");

  auto* corpus = app.add_subcommand("corpus", "Built-in sample reals");
  corpus->require_subcommand(1);
  auto* list = corpus->add_subcommand("list", "List corpus entries");
  std::string emit_name;
  std::size_t emit_count = 16;
  auto* emit = corpus->add_subcommand("emit", "Print an entry as JSON");
  emit->add_option("name", emit_name, "Corpus entry")->required();
  emit->add_option("--count", emit_count, "Prefix length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : exit_malformed;
  }

  try {
    if (*run) return cmd_run(files, out_dir);
    if (*verify) return cmd_verify(verify_input, cls, bi, verify_horizon, bound);
    if (*trace) return cmd_trace_ratio(trace_input, order, trace_horizon, window, rho);
    if (*list) return cmd_corpus_list();
    if (*emit) return cmd_corpus_emit(emit_name, emit_count);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_for(e);
  }
  return exit_ok;
}
