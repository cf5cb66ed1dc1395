#pragma once

#include "uitrust/sim/time.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace uitrust::sim {

using EventId = std::uint64_t;

class CausalityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Discrete-event scheduler. Events run in timestamp order; events sharing a
// timestamp run in the order they were scheduled.
class EventQueue {
public:
    using Handler = std::function<void()>;

    SimTime now() const { return now_; }

    // Throws CausalityError when `at` lies in the past.
    EventId schedule(SimTime at, Handler handler);

    EventId schedule_in(SimTime delay, Handler handler) { return schedule(now_ + delay, std::move(handler)); }

    // Runs events with timestamp <= `until`, then advances the clock to `until`.
    void run_until(SimTime until);

    // Runs a single event. Returns false when the queue is empty.
    bool step();

    bool empty() const { return heap_.empty(); }
    std::size_t pending() const { return heap_.size(); }
    std::uint64_t executed() const { return executed_; }

private:
    struct Entry {
        SimTime at;
        EventId id;
        Handler handler;
    };
    static bool later(const Entry& a, const Entry& b) {
        return a.at != b.at ? a.at > b.at : a.id > b.id;
    }

    std::vector<Entry> heap_;
    SimTime now_{};
    EventId next_id_ = 0;
    std::uint64_t executed_ = 0;
};

}  // namespace uitrust::sim
