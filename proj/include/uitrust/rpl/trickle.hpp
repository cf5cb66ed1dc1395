#pragma once

#include "uitrust/sim/rng.hpp"
#include "uitrust/sim/time.hpp"

#include <cstdint>

namespace uitrust::rpl {

struct TrickleConfig {
    sim::SimTime i_min = sim::SimTime::from_micros(4'000'000);
    unsigned i_max_doublings = 8;
    unsigned redundancy_k = 10;  // 0 disables suppression
};

// RFC 6206 trickle state. The owner schedules the fire and interval-end
// events; `generation()` changes whenever previously scheduled events become
// stale.
class TrickleTimer {
public:
    explicit TrickleTimer(TrickleConfig cfg = {});

    const TrickleConfig& config() const { return cfg_; }
    sim::SimTime interval() const { return interval_; }
    sim::SimTime i_max() const { return i_max_; }
    unsigned counter() const { return counter_; }
    std::uint64_t generation() const { return generation_; }

    // Starts a fresh interval of the current length and returns the offset of
    // the fire point, uniform in [I/2, I).
    sim::SimTime begin_interval(sim::Rng& rng);

    // Interval expired: doubles I up to the maximum.
    void on_interval_end();

    void on_consistent() { ++counter_; }

    // Inconsistency (e.g. a DIS). Collapses I to i_min and returns true; when
    // I already equals i_min nothing changes and false is returned.
    bool on_inconsistent();

    // Suppression check at the fire point.
    bool should_transmit() const { return cfg_.redundancy_k == 0 || counter_ < cfg_.redundancy_k; }

private:
    TrickleConfig cfg_;
    sim::SimTime interval_;
    sim::SimTime i_max_;
    unsigned counter_ = 0;
    std::uint64_t generation_ = 0;
};

}  // namespace uitrust::rpl
