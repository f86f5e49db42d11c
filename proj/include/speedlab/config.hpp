#pragma once

#include <cstddef>

namespace speedlab {

/// Upper bound on the number of probes any unbounded search may take.
/// Read once from SPEEDLAB_HORIZON_CAP; defaults to 1'000'000.
std::size_t horizon_cap();

/// Overrides the cap for the current process (tests use this).
void set_horizon_cap(std::size_t cap);

}  // namespace speedlab
