#pragma once

// Philox4x32-10 counter-based generator. Each Monte Carlo trial gets its own
// stream by placing the trial index in the upper counter words, so results
// never depend on how trials are scheduled.

#include <array>
#include <cstdint>
#include <limits>

namespace noma {

class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          counter_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (index_ == 4) {
            block_ = generate(counter_, key_);
            if (++counter_[0] == 0) ++counter_[1];
            index_ = 0;
        }
        return block_[index_++];
    }

    /// Ten rounds of the Philox S-box over one counter block.
    static Counter generate(Counter ctr, Key key) {
        constexpr std::uint32_t m0 = 0xD2511F53, m1 = 0xCD9E8D57;
        constexpr std::uint32_t w0 = 0x9E3779B9, w1 = 0xBB67AE85;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += w0;
                key[1] += w1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    Key key_;
    Counter counter_;
    Counter block_{};
    int index_ = 4;
};

}  // namespace noma
