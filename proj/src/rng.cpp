#include "pphi2/rng.hpp"

#include <cmath>

namespace pphi2 {

namespace {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox::Block Philox::block(std::uint64_t key, std::uint64_t ctr_hi, std::uint64_t ctr_lo) {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    Block b{{static_cast<std::uint32_t>(ctr_lo), static_cast<std::uint32_t>(ctr_lo >> 32),
             static_cast<std::uint32_t>(ctr_hi), static_cast<std::uint32_t>(ctr_hi >> 32)}};
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, b.x[0], hi0, lo0);
        mulhilo(kMul1, b.x[2], hi1, lo1);
        Block nb{{hi1 ^ b.x[1] ^ k0, lo1, hi0 ^ b.x[3] ^ k1, lo0}};
        b = nb;
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return b;
}

std::pair<double, double> normal_pair(std::uint64_t key, std::uint64_t ctr_hi,
                                      std::uint64_t ctr_lo) {
    Philox::Block b = Philox::block(key, ctr_hi, ctr_lo);
    // 53-bit uniforms; u1 shifted away from 0 so log() is safe.
    std::uint64_t w0 = (static_cast<std::uint64_t>(b.x[0]) << 32) | b.x[1];
    std::uint64_t w1 = (static_cast<std::uint64_t>(b.x[2]) << 32) | b.x[3];
    double u1 = ((w0 >> 11) + 0.5) * 0x1.0p-53;
    double u2 = (w1 >> 11) * 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

double uniform01(std::uint64_t key, std::uint64_t ctr_hi, std::uint64_t ctr_lo) {
    Philox::Block b = Philox::block(key, ctr_hi, ctr_lo);
    std::uint64_t w = (static_cast<std::uint64_t>(b.x[0]) << 32) | b.x[1];
    return (w >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    auto [a, b] = normal_pair(key_, 1, ctr_++);
    spare_ = b;
    have_spare_ = true;
    return a;
}

}  // namespace pphi2
