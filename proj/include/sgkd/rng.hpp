#pragma once

#include <cstdint>
#include <string_view>

namespace sgkd {

// Deterministic RNG with named, independently seeded streams. Every source
// of randomness in the project derives its stream from one master seed plus
// a stream name (and optional index), so e.g. data generation, parameter
// initialization, and epoch shuffling can be reproduced in isolation.
class RngStream {
public:
    RngStream() : RngStream(0, "default", 0) {}
    RngStream(std::uint64_t master_seed, std::string_view stream_name,
              std::uint64_t index = 0);

    std::uint64_t next_u64();

    // Uniform in [0, 1).
    double u01();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi);
    // Standard Box-Muller normal.
    double normal(double mean = 0.0, double stddev = 1.0);
    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t state_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sgkd
