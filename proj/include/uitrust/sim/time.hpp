#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

namespace uitrust::sim {

// Fixed-point simulated time in microseconds. Integer arithmetic keeps event
// ordering identical across compilers and platforms.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_micros(std::int64_t us) { return SimTime{us}; }
    static SimTime from_seconds(double s) {
        return SimTime{static_cast<std::int64_t>(std::llround(s * 1e6))};
    }

    constexpr std::int64_t micros() const { return us_; }
    constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }

    // "<seconds>.<6 digits>", exact for every representable value.
    std::string to_string() const;

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime{us_ + o.us_}; }
    constexpr SimTime operator-(SimTime o) const { return SimTime{us_ - o.us_}; }
    constexpr SimTime& operator+=(SimTime o) {
        us_ += o.us_;
        return *this;
    }

private:
    constexpr explicit SimTime(std::int64_t us) : us_(us) {}
    std::int64_t us_ = 0;
};

inline SimTime seconds(double s) { return SimTime::from_seconds(s); }

}  // namespace uitrust::sim
