#include "uitrust/rpl/dodag.hpp"

#include <algorithm>
#include <stdexcept>

namespace uitrust::rpl {

bool PendingTable::insert(Mac mac) {
    if (contains(mac)) {
        return false;
    }
    if (capacity_ == 0) {
        return false;
    }
    if (entries_.size() == capacity_) {
        entries_.pop_front();
        ++evictions_;
    }
    entries_.push_back(mac);
    return true;
}

bool PendingTable::erase(Mac mac) {
    const auto it = std::find(entries_.begin(), entries_.end(), mac);
    if (it == entries_.end()) {
        return false;
    }
    entries_.erase(it);
    return true;
}

bool PendingTable::contains(Mac mac) const { return std::find(entries_.begin(), entries_.end(), mac) != entries_.end(); }

std::vector<DisAction> handle_dis(DodagState& state, TrickleTimer& trickle, NodeMode mode, const ControlMessage& dis) {
    if (dis.kind != MessageKind::DIS) {
        throw std::invalid_argument("handle_dis: not a DIS");
    }
    std::vector<DisAction> actions;
    if (!state.joined()) {
        return actions;
    }
    if (mode == NodeMode::Normal) {
        if (trickle.on_inconsistent()) {
            actions.push_back(DisAction::TrickleReset);
            actions.push_back(DisAction::EmitDio);
        }
        return actions;
    }
    const auto evicted_before = state.pending.evictions();
    if (state.pending.insert(dis.src_mac)) {
        actions.push_back(DisAction::QueuePending);
        if (state.pending.evictions() != evicted_before) {
            actions.push_back(DisAction::EvictPending);
        }
    }
    return actions;
}

}  // namespace uitrust::rpl
