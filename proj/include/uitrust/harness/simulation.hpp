#pragma once

#include "uitrust/harness/config.hpp"
#include "uitrust/harness/metrics.hpp"
#include "uitrust/wire.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace uitrust::harness {

// No connected placement found within the retry budget.
class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::ostream* trace = nullptr;  // NDJSON event trace, one record per delivery
    bool keep_last_trust_report = false;
};

struct DeviceOutcome {
    bool attacker = false;
    bool verdict_malicious = false;
    std::size_t identities_observed = 0;
    std::size_t identities_flagged = 0;
    // UIDs stored about this device's identities across every ledger.
    std::array<std::set<wire::UidValue>, wire::kUidTypeCount> observed_uids;
};

struct RunDetails {
    MetricsReport report;
    std::vector<DeviceOutcome> devices;  // physical devices, root excluded
    std::optional<std::string> last_trust_report;
    std::size_t forced_collision_attacker = SIZE_MAX;  // index into devices
};

// Full deterministic run. Throws ConfigError or TopologyError.
RunDetails run_scenario_detailed(const ScenarioConfig& cfg, const RunOptions& options = {});
MetricsReport run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

}  // namespace uitrust::harness
