#pragma once

#include "uitrust/detect/ledger.hpp"
#include "uitrust/sim/time.hpp"
#include "uitrust/wire.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace uitrust::detect {

struct DetectorParams {
    sim::SimTime query_interval = sim::SimTime::from_seconds(30.0);  // omega
    sim::SimTime th_r = sim::SimTime::from_seconds(2.0);
    // Pending entries are dropped after this many consecutive misses.
    std::uint32_t pending_miss_limit = 2;
    // Send-time jitter of the caller; the omega spacing check allows for it.
    sim::SimTime query_jitter{};

    void validate() const;
};

struct RoundSummary {
    std::uint16_t nonce = 0;
    UidType queried_type = UidType::SiliconSerial;
    UidType next_type = UidType::SiliconSerial;
    std::size_t queried = 0;
    std::size_t responded = 0;  // among the queried identities
    std::size_t silent = 0;
    std::size_t late = 0;
    // Identities the pending table no longer needs to hold.
    std::vector<Mac> resolved;
};

// Node-side query/response state: one collective query round at a time.
class Observer {
public:
    explicit Observer(DetectorParams params = {});

    const DetectorParams& params() const { return params_; }
    EvidenceLedger& ledger() { return ledger_; }
    const EvidenceLedger& ledger() const { return ledger_; }
    UidType uid_type() const { return uid_type_; }

    bool round_open() const { return round_.has_value(); }
    std::size_t outstanding() const;
    std::optional<sim::SimTime> last_query() const { return last_query_; }

    // True when omega has passed since the previous query (or none was sent).
    bool can_query(sim::SimTime now) const;

    // Opens a round over the union of `pending` and `neighbours` and returns
    // the field to piggyback on one DIO multicast. Nothing is emitted when
    // both lists are empty, a round is still open, or omega has not elapsed.
    // Nonces count up per query unless the caller supplies a shared one.
    std::optional<wire::QueryField> issue_collective_query(sim::SimTime now, std::span<const Mac> pending,
                                                           std::span<const Mac> neighbours,
                                                           std::optional<std::uint16_t> nonce = std::nullopt);

    // First response per MAC counts. Rejected (false) without an open round
    // or when nonce or uid type do not match it.
    bool on_response(Mac from, const wire::ResponseField& field, sim::SimTime at);

    // Scores the open round (Cases 1 to 4) and closes it.
    std::optional<RoundSummary> close_round(sim::SimTime now);

private:
    struct Round {
        wire::QueryField query;
        sim::SimTime sent_at;
        std::vector<Mac> targets;  // ascending, unique
        std::map<Mac, std::pair<UidValue, sim::SimTime>> responses;
    };

    DetectorParams params_;
    EvidenceLedger ledger_;
    UidType uid_type_ = UidType::SiliconSerial;
    std::uint16_t next_nonce_ = 0;
    std::optional<sim::SimTime> last_query_;
    std::optional<Round> round_;
};

}  // namespace uitrust::detect
