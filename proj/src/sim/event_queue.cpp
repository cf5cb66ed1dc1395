#include "uitrust/sim/event_queue.hpp"

#include <algorithm>

namespace uitrust::sim {

EventId EventQueue::schedule(SimTime at, Handler handler) {
    if (at < now_) {
        throw CausalityError("event scheduled at " + at.to_string() + " before now " + now_.to_string());
    }
    const EventId id = next_id_++;
    heap_.push_back(Entry{at, id, std::move(handler)});
    std::push_heap(heap_.begin(), heap_.end(), later);
    return id;
}

bool EventQueue::step() {
    if (heap_.empty()) {
        return false;
    }
    std::pop_heap(heap_.begin(), heap_.end(), later);
    Entry e = std::move(heap_.back());
    heap_.pop_back();
    now_ = e.at;
    ++executed_;
    e.handler();
    return true;
}

void EventQueue::run_until(SimTime until) {
    while (!heap_.empty() && heap_.front().at <= until) {
        step();
    }
    if (now_ < until) {
        now_ = until;
    }
}

}  // namespace uitrust::sim
