#pragma once

#include "uitrust/sim/time.hpp"
#include "uitrust/wire.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace uitrust::detect {

using wire::Mac;
using wire::UidType;
using wire::UidValue;

// p / (p + n); nullopt when there is no evidence at all.
std::optional<double> compute_lto(std::uint32_t p, std::uint32_t n);

// What one observer holds about one claimed identity.
struct Evidence {
    std::uint32_t p = 0;
    std::uint32_t n = 0;
    std::array<std::optional<UidValue>, wire::kUidTypeCount> uid_seen{};
    std::optional<sim::SimTime> last_query_t;
    std::optional<sim::SimTime> last_response_t;
    std::uint32_t consecutive_misses = 0;
    std::optional<double> reported_lto;  // value carried by the last report

    std::optional<double> lto() const { return compute_lto(p, n); }
};

// Per-observer evidence tallies. Counts only grow.
class EvidenceLedger {
public:
    Evidence& at(Mac subject);
    const Evidence* find(Mac subject) const;

    void add_positive(Mac subject, std::uint32_t amount);
    void add_negative(Mac subject, std::uint32_t amount);
    void record_uid(Mac subject, UidType type, UidValue uid);

    const std::map<Mac, Evidence>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    // Entries changed since the last call, as report triples; clears the
    // changed set. With min_change > 0, a changed entry already reported is
    // left out unless its LTO moved by at least min_change since then.
    std::vector<wire::LtoEntry> take_report(double min_change = 0.0);
    // Re-queues a subject, e.g. after its report was lost in transit. Its
    // next report goes out whatever the change.
    void mark_dirty(Mac subject);
    bool has_changes() const { return !dirty_.empty(); }

private:
    std::map<Mac, Evidence> entries_;
    std::set<Mac> dirty_;
};

// Case 1 / Case 2 on one unordered pair: different UID and MAC gives +3
// positive to both, same UID under different MACs gives +3 negative to both.
// A MAC paired with itself is ignored.
void score_pair(EvidenceLedger& ledger, Mac u, UidValue uid_u, Mac k, UidValue uid_k);

struct RoundResponse {
    Mac mac = 0;
    UidValue uid = 0;
};

// Case 1 / Case 2 over one closed round, counted once per identity: an
// identity whose UID also came back under another MAC gets +3 negative,
// every other responder +3 positive. Responses must share one uid type.
void score_round_pairs(EvidenceLedger& ledger, const std::vector<RoundResponse>& responses);

// Case 3 for one queried identity at round close. `rtt` is nullopt when no
// response arrived. A late answer (rtt > th_r) costs 1; a miss costs 1 and
// every further consecutive miss 2.
void score_timeout(EvidenceLedger& ledger, Mac subject, std::optional<sim::SimTime> rtt, sim::SimTime th_r);

// Case 4: next query type after a round where `silent` of `queried`
// identities stayed quiet. Rotates only when strictly more than half were
// silent, and stays on the last type once the rotation is exhausted.
UidType rotate_uid_type(UidType current, std::size_t silent, std::size_t queried);

}  // namespace uitrust::detect
