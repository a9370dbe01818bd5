#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace specbound {

/// Runs the randomized property sweeps with the given seed, printing one
/// line per property. `scale` multiplies the default case counts.
/// Returns the number of failed properties.
int run_selftest(std::uint64_t seed, double scale, std::ostream& out);

} // namespace specbound
