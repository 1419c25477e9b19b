#pragma once

#include <cstdint>
#include <random>

namespace keb {

/// Seeded 64-bit linear congruential generator (Knuth's MMIX constants).
/// Doubles come from the top 53 bits so samples are identical on every
/// standard library.
class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

    /// uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::linear_congruential_engine<std::uint64_t, 6364136223846793005ULL, 1442695040888963407ULL, 0> engine_;
};

} // namespace keb
