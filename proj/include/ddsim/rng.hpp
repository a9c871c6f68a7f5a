#pragma once

// Counter-based generator: output k of stream s is splitmix64(seed, s, k).
// derive() gives independent streams, so parallel cells stay reproducible.

#include <cstdint>
#include <limits>

namespace ddsim {

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        return mix(seed_ ^ mix(stream_ + 0x632be59bd9b4e019ULL) ^ (counter_++ * 0x9e3779b97f4a7c15ULL));
    }

    Rng derive(std::uint64_t sub) const { return Rng(seed_, mix(stream_ ^ (sub + 0xd1b54a32d192ed03ULL))); }

    double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace ddsim
