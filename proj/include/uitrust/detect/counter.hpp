#pragma once

#include "uitrust/sim/time.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace uitrust::detect {

enum class CounterVerdict { Normal, Alarm };

// Alarm iff c_t - c_t_minus_n > th_c (strict).
CounterVerdict counter_check(std::uint64_t c_t, std::uint64_t c_t_minus_n, double th_c);

// Root-side tally of control frames in fixed buckets. C(t) is the number of
// frames recorded strictly before t, for t on a bucket boundary.
class MessageCounter {
public:
    MessageCounter(sim::SimTime bucket, sim::SimTime window_n, double th_c);

    // Appends `count` frames at `t`. Buckets are append-only, so `t` may not
    // precede the last recorded bucket.
    void record(sim::SimTime t, std::uint64_t count = 1);

    std::uint64_t total_before(sim::SimTime t) const;
    // C(t) - C(t - n).
    std::uint64_t delta(sim::SimTime t) const;
    // Normal while less than one window of history exists.
    CounterVerdict check(sim::SimTime t) const;

    double threshold() const { return th_c_; }
    void set_threshold(double th_c) { th_c_ = th_c; }
    sim::SimTime window() const { return window_; }
    sim::SimTime bucket() const { return bucket_; }

    // Every delta(t) for t on bucket boundaries with t - n >= from and t <= to.
    std::vector<double> deltas(sim::SimTime from, sim::SimTime to) const;

private:
    std::size_t bucket_of(sim::SimTime t) const;

    sim::SimTime bucket_;
    sim::SimTime window_;
    double th_c_;
    std::vector<std::uint64_t> prefix_;  // prefix_[k] = frames before bucket k
};

// mean + 3 * population stddev of the samples, never below `floor`.
double calibrate_threshold(std::span<const double> deltas, double floor);

}  // namespace uitrust::detect
