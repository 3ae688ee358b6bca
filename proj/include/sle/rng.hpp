#pragma once

#include <cstdint>
#include <random>

namespace sle {

/// SplitMix64 finalizer; used to derive independent engine seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Random stream for one Monte Carlo replica.
///
/// Splitting rule: replica `stream` of run `seed` seeds a 64-bit Mersenne
/// twister with eight 32-bit words taken from successive SplitMix64 outputs
/// starting at state `splitmix64(seed) ^ (stream * 0x9E3779B97F4A7C15)`.
/// Identical (seed, stream) pairs give identical sequences regardless of how
/// many replicas run or on which thread.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    double normal() { return normal_(engine_); }
    /// Uniform on [0, 1).
    double uniform() { return uniform_(engine_); }
    /// Uniform on (0, 1].
    double uniform_open_left() { return 1.0 - uniform_(engine_); }
    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace sle
