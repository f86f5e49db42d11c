#include "speedlab/corpus.hpp"

#include <algorithm>
#include <string>

#include "speedlab/error.hpp"

namespace speedlab {

std::string CorpusSpec::param(std::string_view key, std::string_view fallback) const {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  return std::string(fallback);
}

bool CorpusSpec::has(std::string_view key) const {
  return std::any_of(params.begin(), params.end(), [&](const auto& kv) { return kv.first == key; });
}

namespace {

Rational required_rational(const CorpusSpec& spec, std::string_view key) {
  if (!spec.has(key)) {
    throw Error(Errc::malformed_input,
                spec.family + " needs parameter '" + std::string(key) + "'");
  }
  return Rational::parse(spec.param(key));
}

std::size_t size_param(const CorpusSpec& spec, std::string_view key, std::size_t fallback) {
  if (!spec.has(key)) return fallback;
  Rational r = Rational::parse(spec.param(key));
  if (!r.is_integer() || r.sign() < 0 || !r.numerator().fits_ulong_p()) {
    throw Error(Errc::malformed_input, "parameter '" + std::string(key) + "' must be a natural number");
  }
  return r.numerator().get_ui();
}

void require(bool cond, const std::string& what) {
  if (!cond) throw Error(Errc::malformed_input, what);
}

// q^s with cached powers; extenders run in order so a running product works.
struct PowerSeq {
  explicit PowerSeq(Rational q) : q(std::move(q)), cur(1) {}
  Rational next(std::size_t s) {
    if (s > 0) cur *= q;
    return cur;
  }
  Rational q;
  Rational cur;
};

Approximation geometric(const CorpusSpec& spec) {
  Rational alpha = required_rational(spec, "alpha");
  Rational q = required_rational(spec, "q");
  Rational c = spec.has("c") ? required_rational(spec, "c") : alpha;
  require(q.sign() > 0 && q < Rational(1), "geometric needs 0 < q < 1");
  require(c.sign() >= 0 && alpha - c >= Rational(0) && alpha <= Rational(1),
          "geometric needs 0 <= alpha - c and alpha <= 1");
  auto pw = std::make_shared<PowerSeq>(q);
  return Approximation(
      ClassTag::left_ce, [pw, alpha, c](std::size_t s) { return alpha - c * pw->next(s); }, alpha);
}

Approximation series(const CorpusSpec& spec) {
  std::string shape = spec.param("shape", "linear");
  std::size_t k = size_param(spec, "k", 1);
  std::size_t b = size_param(spec, "b", 1);
  std::optional<Rational> limit;
  std::function<std::size_t(std::size_t)> g;
  if (shape == "linear") {
    require(k >= 1, "series needs k >= 1");
    require(b >= 1 || k >= 2, "series limit must stay below 1");
    g = [k, b](std::size_t n) { return k * n + b; };
    limit = pow2(-static_cast<long>(b)) / (Rational(1) - pow2(-static_cast<long>(k)));
  } else if (shape == "square") {
    g = [b](std::size_t n) { return n * n + b; };
    require(b >= 1, "square series needs b >= 1");
  } else {
    throw Error(Errc::malformed_input, "series shape must be linear or square");
  }
  auto sum = std::make_shared<Rational>(0);
  return Approximation(
      ClassTag::left_ce,
      [sum, g](std::size_t s) {
        if (s > 0) *sum += pow2(-static_cast<long>(g(s - 1)));
        return *sum;
      },
      limit);
}

Approximation truncation(const CorpusSpec& spec) {
  Rational x = required_rational(spec, "x");
  require(x.sign() > 0 && x < Rational(1), "truncation needs x in (0,1)");
  std::size_t start = size_param(spec, "start", 1);
  std::size_t step = size_param(spec, "step", 1);
  require(step >= 1, "truncation needs step >= 1");
  return Approximation(
      ClassTag::left_ce,
      [x, start, step](std::size_t s) { return BitString::expansion(x, start + step * s).to_dyadic().value(); },
      x);
}

Approximation oscillate(const CorpusSpec& spec) {
  Rational alpha = required_rational(spec, "alpha");
  Rational scale = spec.has("scale") ? required_rational(spec, "scale") : Rational(1);
  Rational q = spec.has("q") ? required_rational(spec, "q") : Rational(1, 2);
  require(q.sign() > 0 && q < Rational(1), "oscillate needs 0 < q < 1");
  require(scale.sign() > 0, "oscillate needs scale > 0");
  require(alpha.sign() > 0 && alpha < Rational(1), "oscillate needs alpha in (0,1)");
  auto pw = std::make_shared<PowerSeq>(q);
  Rational bound = Rational(2) * scale / (Rational(1) - q);
  return Approximation(
      ClassTag::dce,
      [pw, alpha, scale](std::size_t s) {
        Rational eps = scale * pw->next(s);
        return clamp_unit(s % 2 == 0 ? alpha + eps : alpha - eps);
      },
      alpha, bound);
}

Approximation difference(const CorpusSpec& spec) {
  Rational beta = required_rational(spec, "beta");
  Rational beta_q = required_rational(spec, "beta_q");
  Rational gamma = required_rational(spec, "gamma");
  Rational gamma_q = required_rational(spec, "gamma_q");
  for (const Rational* v : {&beta, &gamma}) require(v->sign() > 0 && *v < Rational(1), "difference needs beta, gamma in (0,1)");
  for (const Rational* v : {&beta_q, &gamma_q}) require(v->sign() > 0 && *v < Rational(1), "difference needs ratios in (0,1)");
  auto pb = std::make_shared<PowerSeq>(beta_q);
  auto pg = std::make_shared<PowerSeq>(gamma_q);
  Rational limit = (Rational(1) + beta - gamma) / Rational(2);
  // Each geometric component has total variation equal to its limit; the
  // rescaling halves both.
  Rational bound = (beta + gamma) / Rational(2);
  return Approximation(
      ClassTag::dce,
      [pb, pg, beta, gamma](std::size_t s) {
        Rational b = beta - beta * pb->next(s);
        Rational g = gamma - gamma * pg->next(s);
        return (Rational(1) + b - g) / Rational(2);
      },
      limit, bound);
}

std::size_t isqrt(std::size_t s) {
  std::size_t r = 0;
  while ((r + 1) * (r + 1) <= s) ++r;
  return r;
}

Approximation reindexed(const CorpusSpec& spec, bool stalled) {
  Approximation base = corpus_real(spec.param("base"));
  std::size_t repeat = stalled ? size_param(spec, "repeat", 2) : 1;
  require(repeat >= 1, "stalled needs repeat >= 1");
  std::function<std::size_t(std::size_t)> index;
  if (stalled) {
    index = [repeat](std::size_t s) { return s / repeat; };
  } else {
    index = isqrt;
  }
  return Approximation(
      base.class_tag(), [base, index](std::size_t s) { return base.term(index(s)); },
      base.declared_limit(), base.variation_bound());
}

Approximation constant(const CorpusSpec& spec) {
  Rational v = required_rational(spec, "value");
  require(v.sign() >= 0 && v <= Rational(1), "constant needs value in [0,1]");
  return Approximation(ClassTag::ca, [v](std::size_t) { return v; }, v);
}

}  // namespace

std::vector<std::string> corpus_families() {
  return {"geometric", "series", "truncation", "oscillate", "difference", "stalled", "slowed", "constant"};
}

Approximation make_corpus_real(const CorpusSpec& spec) {
  Approximation a = [&] {
    if (spec.family == "geometric") return geometric(spec);
    if (spec.family == "series") return series(spec);
    if (spec.family == "truncation") return truncation(spec);
    if (spec.family == "oscillate") return oscillate(spec);
    if (spec.family == "difference") return difference(spec);
    if (spec.family == "stalled") return reindexed(spec, true);
    if (spec.family == "slowed") return reindexed(spec, false);
    if (spec.family == "constant") return constant(spec);
    throw Error(Errc::unknown_family, "unknown family '" + spec.family + "'");
  }();
  a.set_provenance({spec.family, spec.params});
  return a;
}

const std::vector<CorpusEntry>& builtin_corpus() {
  static const std::vector<CorpusEntry> entries = {
      {"geometric-half", {"geometric", {{"alpha", "1/2"}, {"q", "1/2"}}}, "1/2 - 2^{-s-1}"},
      {"geometric-quarter", {"geometric", {{"alpha", "1/2"}, {"q", "1/4"}}}, "(1 - 4^{-s})/2"},
      {"geometric-third", {"geometric", {{"alpha", "1/3"}, {"q", "1/2"}}}, "1/3 - 2^{-s}/3"},
      {"geometric-two-fifths", {"geometric", {{"alpha", "2/5"}, {"q", "1/8"}}}, "2/5 (1 - 8^{-s})"},
      {"series-linear", {"series", {{"k", "2"}, {"b", "1"}}}, "sum 2^{-(2n+1)} -> 2/3"},
      {"series-squares", {"series", {{"shape", "square"}, {"b", "1"}}}, "sum 2^{-(n^2+1)}, no declared limit"},
      {"truncation-third", {"truncation", {{"x", "1/3"}, {"start", "2"}, {"step", "2"}}}, "1/3 cut to 2s+2 bits"},
      {"truncation-fifth", {"truncation", {{"x", "1/5"}, {"start", "4"}, {"step", "4"}}}, "1/5 cut to 4s+4 bits"},
      {"truncation-two-sevenths", {"truncation", {{"x", "2/7"}, {"start", "3"}, {"step", "3"}}}, "2/7 cut to 3s+3 bits"},
      {"oscillate-half", {"oscillate", {{"alpha", "1/2"}, {"scale", "1"}, {"q", "1/2"}}}, "1/2 + (-1)^s 2^{-s}, clamped"},
      {"oscillate-third", {"oscillate", {{"alpha", "1/3"}, {"scale", "1/4"}, {"q", "1/2"}}}, "1/3 + (-1)^s 2^{-s-2}"},
      {"difference-basic", {"difference", {{"beta", "3/4"}, {"beta_q", "1/2"}, {"gamma", "1/4"}, {"gamma_q", "1/3"}}}, "(1 + b_s - g_s)/2 -> 3/4"},
      {"stalled-geometric", {"stalled", {{"base", "geometric-half"}, {"repeat", "2"}}}, "geometric-half with every term doubled"},
      {"slowed-geometric", {"slowed", {{"base", "geometric-quarter"}}}, "geometric-quarter at floor(sqrt s)"},
      {"constant-third", {"constant", {{"value", "1/3"}}}, "constant 1/3 (limit attained)"},
  };
  return entries;
}

const CorpusEntry& corpus_entry(std::string_view name) {
  for (const auto& e : builtin_corpus()) {
    if (e.name == name) return e;
  }
  throw Error(Errc::unknown_family, "no corpus entry named '" + std::string(name) + "'");
}

Approximation corpus_real(std::string_view name) { return make_corpus_real(corpus_entry(name).spec); }

}  // namespace speedlab
