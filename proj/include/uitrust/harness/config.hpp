#pragma once

#include "uitrust/adversary/attacker.hpp"
#include "uitrust/trust/engine.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uitrust::harness {

enum class Defense { UITrust, RssiProfile, IdCount, NoneMrhof };

const char* to_string(Defense d);
Defense parse_defense(std::string_view s);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    std::string scenario_id = "default";

    // topology
    std::uint32_t node_count = 100;  // physical devices besides the root
    double sybil_ratio = 0.0;
    double tx_range_m = 30.0;
    double forwarding_error_rate = 0.05;
    double path_loss_exponent = 2.0;
    double ref_loss_db = 40.0;
    double shadowing_sigma_db = 2.0;
    double honest_tx_power_dbm = 0.0;
    double target_degree = 10.0;
    std::optional<double> field_side_m;  // derived from target_degree if unset

    // timing
    double duration_s = 3600.0;
    double attack_start_s = 900.0;
    double calibration_start_s = 300.0;
    double boot_spread_s = 5.0;
    double dis_retry_s = 20.0;
    double data_period_s = 60.0;
    std::uint64_t seed = 1;

    // RPL
    double trickle_imin_s = 4.0;
    std::uint32_t trickle_doublings = 8;
    std::uint32_t trickle_k = 10;
    std::uint32_t rank_unit = 128;
    std::uint32_t hysteresis = 64;
    double etx_alpha = 0.2;
    std::uint32_t pending_capacity = 64;
    double candidate_expiry_s = 300.0;

    // defense
    Defense defense = Defense::UITrust;
    double query_interval_s = 30.0;
    double th_r_s = 2.0;
    double counter_window_s = 10.0;
    std::optional<double> th_c;  // calibrated during warm-up if unset
    double th_c_floor = 20.0;
    double neighbor_window_s = 90.0;
    double active_subject_window_s = 120.0;
    double report_min_change = 0.05;  // LTO drift that triggers a re-report
    trust::TrustParams trust;

    // baselines
    double rssi_epsilon_db = 3.0;
    double rssi_proximity_s = 3.0;
    std::uint32_t rssi_min_samples = 3;
    std::uint32_t rssi_min_common_observers = 2;
    double rssi_min_observer_overlap = 0.8;
    double idcount_window_s = 60.0;
    double idcount_factor = 3.0;

    // adversary
    adversary::AttackerConfig attacker;
    bool forced_uid_collision = false;

    // Attacker devices for this node count and ratio.
    std::uint32_t attacker_count() const;
    double field_side() const;

    void validate() const;
};

// "key = value" lines; '#' starts a comment. Unknown or repeated keys and
// malformed values throw ConfigError.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const ScenarioConfig& c);

// Comma-separated lists for sweep arguments.
std::vector<double> parse_double_list(std::string_view s);
std::vector<Defense> parse_defense_list(std::string_view s);

}  // namespace uitrust::harness
