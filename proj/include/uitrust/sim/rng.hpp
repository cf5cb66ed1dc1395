#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace uitrust::sim {

// Seeded random stream for one simulation run.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The std:: distributions are not (their algorithms are
// implementation-defined), so the mappings to uniform/normal/index values are
// done here to keep runs byte-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t index(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via the Marsaglia polar method.
    double normal();

    // Derives an independent seed for a sub-stream (placement retries, etc.).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t salt);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace uitrust::sim
