#pragma once

#include <cstdint>
#include <limits>

namespace dicke {

/// Counter-based generator: the k-th output of stream (seed, stream) is a
/// fixed bijective mix of key + k * golden, so every trajectory owns an
/// independent, reproducible stream regardless of which thread draws it.
class StreamRng
{
  public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(mix(seed + kGolden) ^ (stream * 0xD1B54A32D192ED03ull)))
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max()
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()()
    {
        ++counter_;
        return mix(key_ + counter_ * kGolden);
    }

    std::uint64_t counter() const { return counter_; }

  private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    // SplitMix64 finaliser
    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace dicke
