#pragma once

#include "uitrust/sim/rng.hpp"
#include "uitrust/sim/time.hpp"

#include <cstddef>
#include <vector>

namespace uitrust::sim {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

double distance(Position a, Position b);

struct RadioConfig {
    double tx_range_m = 30.0;
    double forwarding_error_rate = 0.05;
    double path_loss_exponent = 2.0;
    double ref_loss_db = 40.0;      // loss at 1 m
    double shadowing_sigma_db = 2.0;  // 0 disables shadowing
    double bitrate_bps = 250'000.0;

    // Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

// Log-distance path loss without shadowing. Throws for distance <= 0.
double rssi_at(double tx_power_dbm, double distance_m, const RadioConfig& cfg);

// Time on air for `bytes` at the configured bitrate.
SimTime airtime(std::size_t bytes, const RadioConfig& cfg);

enum class DeliveryStatus { Delivered, OutOfRange, Loss };

const char* to_string(DeliveryStatus s);

struct DeliveryOutcome {
    DeliveryStatus status = DeliveryStatus::OutOfRange;
    SimTime rx_time{};
    double rssi_dbm = 0.0;
};

// Unit-disk channel with independent per-frame Bernoulli loss.
class Channel {
public:
    Channel(RadioConfig cfg, std::vector<Position> positions);

    const RadioConfig& config() const { return cfg_; }
    std::size_t size() const { return positions_.size(); }
    Position position(std::size_t node) const { return positions_.at(node); }

    // Nodes within tx range of `node`, ascending index.
    const std::vector<std::size_t>& neighbors(std::size_t node) const { return neighbors_.at(node); }

    // Draws loss (and shadowing, when enabled) from `rng`. No draws are made
    // for out-of-range pairs. Throws std::invalid_argument when tx == rx.
    DeliveryOutcome deliver(std::size_t tx, std::size_t rx, double tx_power_dbm, SimTime now,
                            std::size_t bytes, Rng& rng) const;

    // True when every node reaches node `root` over in-range hops.
    bool connected(std::size_t root) const;

private:
    RadioConfig cfg_;
    std::vector<Position> positions_;
    std::vector<std::vector<std::size_t>> neighbors_;
};

}  // namespace uitrust::sim
