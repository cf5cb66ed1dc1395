#include "uitrust/rpl/trickle.hpp"

#include <algorithm>
#include <stdexcept>

namespace uitrust::rpl {

TrickleTimer::TrickleTimer(TrickleConfig cfg)
    : cfg_(cfg),
      interval_(cfg.i_min),
      i_max_(sim::SimTime::from_micros(cfg.i_min.micros() << cfg.i_max_doublings)) {
    if (cfg.i_min.micros() <= 0 || cfg.i_max_doublings > 20) {
        throw std::invalid_argument("invalid trickle configuration");
    }
}

sim::SimTime TrickleTimer::begin_interval(sim::Rng& rng) {
    counter_ = 0;
    ++generation_;
    const std::int64_t half = interval_.micros() / 2;
    const auto span = static_cast<std::uint64_t>(interval_.micros() - half);
    return sim::SimTime::from_micros(half + static_cast<std::int64_t>(rng.index(span)));
}

void TrickleTimer::on_interval_end() { interval_ = std::min(sim::SimTime::from_micros(interval_.micros() * 2), i_max_); }

bool TrickleTimer::on_inconsistent() {
    if (interval_ == cfg_.i_min) {
        return false;
    }
    interval_ = cfg_.i_min;
    counter_ = 0;
    return true;
}

}  // namespace uitrust::rpl
