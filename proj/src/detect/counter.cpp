#include "uitrust/detect/counter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uitrust::detect {

CounterVerdict counter_check(std::uint64_t c_t, std::uint64_t c_t_minus_n, double th_c) {
    if (c_t < c_t_minus_n) {
        throw std::invalid_argument("counter_check: totals are cumulative");
    }
    const double delta = static_cast<double>(c_t - c_t_minus_n);
    return delta > th_c ? CounterVerdict::Alarm : CounterVerdict::Normal;
}

MessageCounter::MessageCounter(sim::SimTime bucket, sim::SimTime window_n, double th_c)
    : bucket_(bucket), window_(window_n), th_c_(th_c), prefix_{0} {
    if (bucket.micros() <= 0 || window_n.micros() <= 0 || window_n.micros() % bucket.micros() != 0) {
        throw std::invalid_argument("MessageCounter: window must be a positive multiple of the bucket");
    }
}

std::size_t MessageCounter::bucket_of(sim::SimTime t) const {
    if (t.micros() < 0) {
        throw std::invalid_argument("MessageCounter: negative time");
    }
    return static_cast<std::size_t>(t.micros() / bucket_.micros());
}

void MessageCounter::record(sim::SimTime t, std::uint64_t count) {
    const std::size_t k = bucket_of(t);
    // prefix_ has one entry per started bucket plus the running total
    if (k + 2 < prefix_.size()) {
        throw std::logic_error("MessageCounter: buckets are append-only");
    }
    while (prefix_.size() < k + 2) {
        prefix_.push_back(prefix_.back());
    }
    prefix_.back() += count;
}

std::uint64_t MessageCounter::total_before(sim::SimTime t) const {
    const std::size_t k = bucket_of(t);
    if (k < prefix_.size()) {
        return prefix_[k];
    }
    return prefix_.back();
}

std::uint64_t MessageCounter::delta(sim::SimTime t) const {
    if (t < window_) {
        return total_before(t);
    }
    return total_before(t) - total_before(t - window_);
}

CounterVerdict MessageCounter::check(sim::SimTime t) const {
    if (t < window_) {
        return CounterVerdict::Normal;
    }
    return counter_check(total_before(t), total_before(t - window_), th_c_);
}

std::vector<double> MessageCounter::deltas(sim::SimTime from, sim::SimTime to) const {
    std::vector<double> out;
    for (sim::SimTime t = from + window_; t <= to; t += bucket_) {
        out.push_back(static_cast<double>(delta(t)));
    }
    return out;
}

double calibrate_threshold(std::span<const double> deltas, double floor) {
    if (deltas.empty()) {
        return floor;
    }
    double mean = 0.0;
    for (double d : deltas) {
        mean += d;
    }
    mean /= static_cast<double>(deltas.size());
    double var = 0.0;
    for (double d : deltas) {
        var += (d - mean) * (d - mean);
    }
    var /= static_cast<double>(deltas.size());
    return std::max(floor, mean + 3.0 * std::sqrt(var));
}

}  // namespace uitrust::detect
