#include "uitrust/sim/rng.hpp"
#include "uitrust/sim/time.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace uitrust::sim {

std::string SimTime::to_string() const {
    const bool neg = us_ < 0;
    const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-us_) : static_cast<std::uint64_t>(us_);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%llu.%06llu", neg ? "-" : "",
                  static_cast<unsigned long long>(mag / 1000000),
                  static_cast<unsigned long long>(mag % 1000000));
    return buf;
}

std::uint64_t Rng::index(std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("Rng::index: empty range");
    }
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return x % n;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = uniform(-1.0, 1.0);
        v = uniform(-1.0, 1.0);
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finalizer over the combined input
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace uitrust::sim
