#pragma once

#include <cstdint>
#include <utility>

namespace pphi2 {

/// Philox4x32-10 counter-based generator.
///
/// Streams are addressed, not stateful: block(key, ctr) returns the same four
/// 32-bit words for the same (key, ctr) on every platform, which is what makes
/// sampling reproducible independently of thread count.  The key holds
/// (seed, stream) and the counter (sample index, draw index).
struct Philox {
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;

    struct Block {
        std::uint32_t x[4];
    };

    static Block block(std::uint64_t key, std::uint64_t ctr_hi, std::uint64_t ctr_lo);
};

/// Two iid standard normals from one Philox block (Box-Muller).
std::pair<double, double> normal_pair(std::uint64_t key, std::uint64_t ctr_hi,
                                      std::uint64_t ctr_lo);

/// Uniform in [0,1) from the first word of a block.
double uniform01(std::uint64_t key, std::uint64_t ctr_hi, std::uint64_t ctr_lo);

/// Small stateful convenience wrapper for sequential consumers (Metropolis
/// chains, bootstrap).  Internally walks a Philox counter.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : key_(seed ^ (stream * 0x9E3779B97F4A7C15ull)) {}

    double uniform() { return uniform01(key_, 0, ctr_++); }
    double normal();

  private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace pphi2
