#include "uitrust/detect/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace uitrust::detect {

std::optional<double> compute_lto(std::uint32_t p, std::uint32_t n) {
    if (p + n == 0) {
        return std::nullopt;
    }
    return static_cast<double>(p) / static_cast<double>(p + n);
}

Evidence& EvidenceLedger::at(Mac subject) { return entries_[subject]; }

const Evidence* EvidenceLedger::find(Mac subject) const {
    const auto it = entries_.find(subject);
    return it == entries_.end() ? nullptr : &it->second;
}

void EvidenceLedger::add_positive(Mac subject, std::uint32_t amount) {
    if (amount == 0) {
        return;
    }
    entries_[subject].p += amount;
    dirty_.insert(subject);
}

void EvidenceLedger::add_negative(Mac subject, std::uint32_t amount) {
    if (amount == 0) {
        return;
    }
    entries_[subject].n += amount;
    dirty_.insert(subject);
}

void EvidenceLedger::record_uid(Mac subject, UidType type, UidValue uid) {
    entries_[subject].uid_seen[static_cast<std::size_t>(type)] = uid;
}

std::vector<wire::LtoEntry> EvidenceLedger::take_report(double min_change) {
    std::vector<wire::LtoEntry> out;
    out.reserve(dirty_.size());
    for (Mac m : dirty_) {
        auto& e = entries_.at(m);
        const auto lto = e.lto();
        if (min_change > 0.0 && lto && e.reported_lto && std::fabs(*lto - *e.reported_lto) < min_change) {
            continue;
        }
        e.reported_lto = lto;
        out.push_back(wire::LtoEntry{m, static_cast<std::uint16_t>(std::min<std::uint32_t>(e.p, 0xFFFF)),
                                     static_cast<std::uint16_t>(std::min<std::uint32_t>(e.n, 0xFFFF))});
    }
    dirty_.clear();
    return out;
}

void EvidenceLedger::mark_dirty(Mac subject) {
    dirty_.insert(subject);
    if (auto it = entries_.find(subject); it != entries_.end()) {
        it->second.reported_lto.reset();
    }
}

void score_pair(EvidenceLedger& ledger, Mac u, UidValue uid_u, Mac k, UidValue uid_k) {
    if (u == k) {
        return;
    }
    if (uid_u != uid_k) {
        ledger.add_positive(u, 3);
        ledger.add_positive(k, 3);
    } else {
        ledger.add_negative(u, 3);
        ledger.add_negative(k, 3);
    }
}

void score_round_pairs(EvidenceLedger& ledger, const std::vector<RoundResponse>& responses) {
    // distinct MACs per uid
    std::unordered_map<UidValue, std::vector<Mac>> by_uid;
    std::vector<RoundResponse> distinct;
    for (const auto& r : responses) {
        const bool dup = std::any_of(distinct.begin(), distinct.end(), [&](const RoundResponse& d) { return d.mac == r.mac; });
        if (dup) {
            continue;
        }
        distinct.push_back(r);
        by_uid[r.uid].push_back(r.mac);
    }
    if (distinct.size() < 2) {
        return;  // nothing to pair with
    }
    for (const auto& r : distinct) {
        if (by_uid[r.uid].size() > 1) {
            ledger.add_negative(r.mac, 3);
        } else {
            ledger.add_positive(r.mac, 3);
        }
    }
}

void score_timeout(EvidenceLedger& ledger, Mac subject, std::optional<sim::SimTime> rtt, sim::SimTime th_r) {
    auto& e = ledger.at(subject);
    if (rtt) {
        e.consecutive_misses = 0;
        if (*rtt > th_r) {
            ledger.add_negative(subject, 1);
        }
        return;
    }
    ++e.consecutive_misses;
    ledger.add_negative(subject, e.consecutive_misses >= 2 ? 2 : 1);
}

UidType rotate_uid_type(UidType current, std::size_t silent, std::size_t queried) {
    if (silent > queried) {
        throw std::invalid_argument("rotate_uid_type: more silent than queried");
    }
    if (silent * 2 <= queried) {
        return current;
    }
    return wire::next_uid_type(current).value_or(current);
}

}  // namespace uitrust::detect
