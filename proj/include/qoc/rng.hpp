#pragma once

#include <array>
#include <cstdint>

namespace qoc {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).  Every output
// is a pure function of (key, counter), so draws are reproducible across
// platforms and may be generated in any order from any thread.  The 64-bit
// key is the user seed; the 128-bit counter is split into a sample index and
// a draw index so each ensemble sample owns an independent substream.
class Philox {
public:
    explicit Philox(uint64_t seed) : key0_(static_cast<uint32_t>(seed)),
                                     key1_(static_cast<uint32_t>(seed >> 32)) {}

    // Raw 4x32-bit block for counter words (c0,c1,c2,c3).
    std::array<uint32_t, 4> block(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3) const;

    // Uniform double in [0, 1) built from the top 53 bits of one block,
    // with counter = (draw, sample).
    double uniform01(uint64_t sample, uint64_t draw) const;

    // Uniform double in [lo, hi).
    double uniform(uint64_t sample, uint64_t draw, double lo, double hi) const;

private:
    uint32_t key0_;
    uint32_t key1_;
};

} // namespace qoc
