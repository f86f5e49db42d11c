#pragma once

// Built-in families of sample reals with exact declared limits.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "speedlab/approximations.hpp"

namespace speedlab {

struct CorpusSpec {
  std::string family;
  std::vector<std::pair<std::string, std::string>> params;

  /// Parameter value or `fallback` when absent.
  std::string param(std::string_view key, std::string_view fallback = "") const;
  bool has(std::string_view key) const;
};

/// Families:
///   geometric    alpha, q, c=alpha        a_s = alpha - c q^s            LeftCE
///   series       k, b | shape=square      a_s = sum_{n<s} 2^{-g(n)}      LeftCE
///   truncation   x, start, step           a_s = x cut to start+step*s bits LeftCE
///   oscillate    alpha, scale, q          clamp(alpha + (-1)^s scale q^s)  DCE
///   difference   beta, beta_q, gamma, gamma_q  (1 + b_s - g_s)/2       DCE
///   stalled      base, repeat             a_s = base_{floor(s/repeat)}
///   slowed       base                     a_s = base_{floor(sqrt s)}
///   constant     value                    a_s = value                    CA
/// `base` names a built-in corpus entry. Throws Errc::unknown_family.
Approximation make_corpus_real(const CorpusSpec& spec);

std::vector<std::string> corpus_families();

struct CorpusEntry {
  std::string name;
  CorpusSpec spec;
  std::string description;
};

const std::vector<CorpusEntry>& builtin_corpus();
/// Looks up a built-in entry by name; throws Errc::unknown_family.
Approximation corpus_real(std::string_view name);
const CorpusEntry& corpus_entry(std::string_view name);

}  // namespace speedlab
