#include "speedlab/error.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "speedlab/config.hpp"

namespace speedlab {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::identical_values: return "identical values";
    case Errc::not_prefix_free: return "not prefix-free";
    case Errc::horizon_exhausted: return "horizon exhausted";
    case Errc::degenerate_probe: return "degenerate probe";
    case Errc::missing_limit: return "ratio requires a limit source";
    case Errc::precondition_failed: return "precondition failed";
    case Errc::invariant_violation: return "invariant violation";
    case Errc::unknown_family: return "unknown family";
    case Errc::malformed_input: return "malformed input";
  }
  return "unknown error";
}

namespace {

constexpr std::size_t kDefaultCap = 1'000'000;

std::size_t cap_from_env() {
  const char* raw = std::getenv("SPEEDLAB_HORIZON_CAP");
  if (raw == nullptr || *raw == '\0') return kDefaultCap;
  char* end = nullptr;
  unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || v == 0) return kDefaultCap;
  return static_cast<std::size_t>(v);
}

std::atomic<std::size_t>& cap_storage() {
  static std::atomic<std::size_t> cap{cap_from_env()};
  return cap;
}

}  // namespace

std::size_t horizon_cap() { return cap_storage().load(std::memory_order_relaxed); }

void set_horizon_cap(std::size_t cap) {
  cap_storage().store(cap == 0 ? kDefaultCap : cap, std::memory_order_relaxed);
}

}  // namespace speedlab
