#pragma once

#include "uitrust/sim/rng.hpp"
#include "uitrust/sim/time.hpp"
#include "uitrust/wire.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace uitrust::adversary {

using wire::Mac;
using wire::UidValue;

// Per-device hardware identifiers, one per UidType. Fixed for the lifetime
// of the device.
using UidSet = std::array<UidValue, wire::kUidTypeCount>;

struct NodeIdentity {
    UidSet uids{};
    Mac mac = 0;
    double tx_power_dbm = 0.0;
};

// How a compromised device treats UID queries addressed to its identities.
struct QueryBehavior {
    enum class Mode { Answer, Delay, Ignore, AnswerThenIgnoreAltUid };

    Mode mode = Mode::Answer;
    double delay_factor = 1.0;  // Delay: respond after factor * TH_R
    double ignore_prob = 0.0;   // Ignore: stay silent with this probability

    // "answer", "delay:<f>", "ignore:<p>", "answer_then_ignore_alt_uid"
    static QueryBehavior parse(const std::string& text);
    std::string to_string() const;
};

struct AttackerConfig {
    double dis_rate_hz = 1.0;
    std::uint64_t mac_pool_size = 1ULL << 16;
    double identity_switch_period_s = 10.0;
    std::vector<double> power_levels_dbm{-10.0, -5.0, 0.0};
    QueryBehavior query_behavior;
    // Identities used this recently still answer queries.
    double response_memory_s = 60.0;

    void validate() const;
};

struct EmittedDis {
    sim::SimTime at;
    Mac mac = 0;
    double tx_power_dbm = 0.0;
};

struct ScheduledResponse {
    sim::SimTime at;
    wire::ResponseField field;
};

// One compromised physical device running a power-controlled Sybil attack.
// Before activation it behaves as the node it hijacked (home identity).
class Attacker {
public:
    static constexpr std::uint64_t kMaxPoolSize = 1ULL << 24;

    Attacker(AttackerConfig cfg, std::uint32_t attacker_index, UidSet uids, Mac home_mac, double home_power_dbm);

    const AttackerConfig& config() const { return cfg_; }
    const NodeIdentity& current() const { return current_; }
    bool active() const { return active_; }
    std::uint64_t pool_reuses() const { return reuses_; }
    std::size_t identities_used() const { return usage_.size(); }

    // Starts the attack at `now` with a first fake identity.
    void activate(sim::SimTime now, sim::Rng& rng);
    void deactivate() { active_ = false; }

    // Draws a MAC uniformly from the unused part of the pool (uniformly from
    // the whole pool once exhausted) and a transmit power from the configured
    // levels other than the one in use. Applies both to later frames.
    NodeIdentity next_fake_identity(sim::Rng& rng, sim::SimTime now);

    // One flood tick at `now`: rotates the identity when the switch period
    // has elapsed and returns the DIS to emit. Empty while inactive.
    std::vector<EmittedDis> attack_tick(sim::SimTime now, sim::Rng& rng);

    // All flood ticks in [from, to) at 1/dis_rate_hz spacing.
    std::vector<EmittedDis> attack_window(sim::SimTime from, sim::SimTime to, sim::Rng& rng);

    sim::SimTime dis_period() const;

    // Marks `mac` as used at `now` (DIO/DAO emission under it).
    void touch(Mac mac, sim::SimTime now);

    // Identities used at or after `since`, ascending MAC.
    std::vector<Mac> identities_since(sim::SimTime since) const;

    bool owns(Mac mac) const { return usage_.contains(mac); }
    std::optional<double> power_of(Mac mac) const;

    // Response to a UID query received as `identity` at `query_time`.
    // `answer_delay` is the delay an honest node would use. The UID reported
    // is always the device's true one.
    std::optional<ScheduledResponse> respond_to_query(const wire::QueryField& query, Mac identity,
                                                      sim::SimTime query_time, sim::SimTime answer_delay,
                                                      sim::SimTime th_r, sim::Rng& rng) const;

private:
    struct Usage {
        double tx_power_dbm = 0.0;
        sim::SimTime last_used{};
    };

    Mac pool_mac(std::uint64_t index) const;

    AttackerConfig cfg_;
    std::uint32_t index_;
    NodeIdentity current_;
    bool active_ = false;
    sim::SimTime last_switch_{};
    std::unordered_set<std::uint64_t> used_pool_;
    std::map<Mac, Usage> usage_;
    std::uint64_t reuses_ = 0;
};

}  // namespace uitrust::adversary
