#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace speedlab {

enum class Errc {
  invalid_argument,
  identical_values,
  not_prefix_free,
  horizon_exhausted,
  degenerate_probe,
  missing_limit,
  precondition_failed,
  invariant_violation,
  unknown_family,
  malformed_input,
};

const char* to_string(Errc code) noexcept;

/// Library-wide exception. `index()` carries the offending stage or element
/// when one exists.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), code_(code), index_(index) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  Errc code_;
  std::optional<std::size_t> index_;
};

}  // namespace speedlab
