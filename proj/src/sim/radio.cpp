#include "uitrust/sim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uitrust::sim {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

void RadioConfig::validate() const {
    if (!(tx_range_m > 0.0)) {
        throw std::invalid_argument("tx_range_m must be > 0");
    }
    if (!(forwarding_error_rate >= 0.0 && forwarding_error_rate <= 1.0)) {
        throw std::invalid_argument("forwarding_error_rate must lie in [0,1]");
    }
    if (!(bitrate_bps > 0.0)) {
        throw std::invalid_argument("bitrate_bps must be > 0");
    }
    if (shadowing_sigma_db < 0.0) {
        throw std::invalid_argument("shadowing_sigma_db must be >= 0");
    }
}

double rssi_at(double tx_power_dbm, double distance_m, const RadioConfig& cfg) {
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("rssi_at: distance must be > 0");
    }
    return tx_power_dbm - cfg.ref_loss_db - 10.0 * cfg.path_loss_exponent * std::log10(distance_m);
}

SimTime airtime(std::size_t bytes, const RadioConfig& cfg) {
    return SimTime::from_seconds(static_cast<double>(bytes) * 8.0 / cfg.bitrate_bps);
}

const char* to_string(DeliveryStatus s) {
    switch (s) {
        case DeliveryStatus::Delivered: return "delivered";
        case DeliveryStatus::OutOfRange: return "out_of_range";
        case DeliveryStatus::Loss: return "loss";
    }
    return "?";
}

Channel::Channel(RadioConfig cfg, std::vector<Position> positions)
    : cfg_(cfg), positions_(std::move(positions)), neighbors_(positions_.size()) {
    cfg_.validate();
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        for (std::size_t j = 0; j < positions_.size(); ++j) {
            if (i != j && distance(positions_[i], positions_[j]) <= cfg_.tx_range_m) {
                neighbors_[i].push_back(j);
            }
        }
    }
}

DeliveryOutcome Channel::deliver(std::size_t tx, std::size_t rx, double tx_power_dbm, SimTime now,
                                 std::size_t bytes, Rng& rng) const {
    if (tx == rx) {
        throw std::invalid_argument("deliver: tx and rx must differ");
    }
    const double d = distance(positions_.at(tx), positions_.at(rx));
    DeliveryOutcome out;
    if (d > cfg_.tx_range_m) {
        out.status = DeliveryStatus::OutOfRange;
        return out;
    }
    if (rng.bernoulli(cfg_.forwarding_error_rate)) {
        out.status = DeliveryStatus::Loss;
        return out;
    }
    out.status = DeliveryStatus::Delivered;
    out.rx_time = now + airtime(bytes, cfg_);
    // co-located nodes are clamped to the 1 m reference distance
    out.rssi_dbm = rssi_at(tx_power_dbm, std::max(d, 1.0), cfg_);
    if (cfg_.shadowing_sigma_db > 0.0) {
        out.rssi_dbm += cfg_.shadowing_sigma_db * rng.normal();
    }
    return out;
}

bool Channel::connected(std::size_t root) const {
    std::vector<bool> seen(positions_.size(), false);
    std::vector<std::size_t> stack{root};
    seen.at(root) = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const std::size_t n = stack.back();
        stack.pop_back();
        for (std::size_t m : neighbors_[n]) {
            if (!seen[m]) {
                seen[m] = true;
                ++count;
                stack.push_back(m);
            }
        }
    }
    return count == positions_.size();
}

}  // namespace uitrust::sim
