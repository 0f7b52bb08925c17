#include "qoc/rng.hpp"

namespace qoc {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53u;
constexpr uint32_t kMul1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(uint32_t& c0, uint32_t& c1, uint32_t& c2, uint32_t& c3,
                       uint32_t k0, uint32_t k1) {
    const uint64_t p0 = static_cast<uint64_t>(kMul0) * c0;
    const uint64_t p1 = static_cast<uint64_t>(kMul1) * c2;
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    const uint32_t n0 = hi1 ^ c1 ^ k0;
    const uint32_t n1 = lo1;
    const uint32_t n2 = hi0 ^ c3 ^ k1;
    const uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
}

} // namespace

std::array<uint32_t, 4> Philox::block(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3) const {
    uint32_t k0 = key0_;
    uint32_t k1 = key1_;
    for (int r = 0; r < 10; ++r) {
        round_once(c0, c1, c2, c3, k0, k1);
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return {c0, c1, c2, c3};
}

double Philox::uniform01(uint64_t sample, uint64_t draw) const {
    const auto out = block(static_cast<uint32_t>(draw), static_cast<uint32_t>(draw >> 32),
                           static_cast<uint32_t>(sample), static_cast<uint32_t>(sample >> 32));
    const uint64_t bits = (static_cast<uint64_t>(out[0]) << 32) | out[1];
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double Philox::uniform(uint64_t sample, uint64_t draw, double lo, double hi) const {
    return lo + (hi - lo) * uniform01(sample, draw);
}

} // namespace qoc
