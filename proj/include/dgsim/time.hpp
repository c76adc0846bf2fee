#pragma once

#include <cstdint>

namespace dgsim {

// Simulated time is an integer count of picoseconds. Nanosecond-scale
// hardware parameters convert exactly; CPU cycles round to the nearest ps.
using Tick = std::uint64_t;

constexpr Tick kTicksPerNs = 1000;

constexpr Tick ns_to_ticks(std::uint64_t ns) { return ns * kTicksPerNs; }

constexpr double ticks_to_ns(Tick t) { return static_cast<double>(t) / 1000.0; }

// round(10^12 / frequency); 3.6 GHz -> 278 ps per cycle.
constexpr Tick cycle_ticks(double frequency_hz) {
  return static_cast<Tick>(1e12 / frequency_hz + 0.5);
}

constexpr double kDefaultCoreFrequencyHz = 3.6e9;
constexpr Tick kDefaultCycleTicks = cycle_ticks(kDefaultCoreFrequencyHz);

static_assert(kDefaultCycleTicks == 278);

// Serialization time of `bytes` at `bandwidth` bytes/s, rounded up to a tick.
constexpr Tick serialization_ticks(std::uint64_t bytes, std::uint64_t bandwidth_bytes_per_s) {
  // bytes * 1e12 stays below 2^63 for every payload this simulator moves.
  return (bytes * 1'000'000'000'000ULL + bandwidth_bytes_per_s - 1) / bandwidth_bytes_per_s;
}

}  // namespace dgsim
