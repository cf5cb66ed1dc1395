#pragma once

#include "uitrust/rpl/message.hpp"
#include "uitrust/rpl/objective.hpp"
#include "uitrust/rpl/trickle.hpp"
#include "uitrust/sim/time.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

namespace uitrust::rpl {

enum class NodeMode { Normal, AttackDetection };

// Bounded FIFO set of MACs that solicited a DIO while attack detection was
// active. Inserting into a full table evicts the oldest entry.
class PendingTable {
public:
    explicit PendingTable(std::size_t capacity = 64) : capacity_(capacity) {}

    // False when `mac` is already present (the table is left unchanged).
    bool insert(Mac mac);
    bool erase(Mac mac);
    bool contains(Mac mac) const;

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::uint64_t evictions() const { return evictions_; }
    const std::deque<Mac>& entries() const { return entries_; }

private:
    std::size_t capacity_;
    std::deque<Mac> entries_;
    std::uint64_t evictions_ = 0;
};

struct Candidate {
    std::uint16_t rank = kInfiniteRank;
    std::uint8_t version = 0;
    std::uint8_t hops = 0;
    sim::SimTime last_heard{};
    LinkStats link;
};

struct DodagState {
    std::uint16_t rank = kInfiniteRank;  // only decreases within one version
    std::optional<Mac> parent;
    std::uint8_t version = 0;
    std::uint8_t hops = 0;
    std::map<Mac, Candidate> candidates;
    PendingTable pending;

    bool joined() const { return rank != kInfiniteRank; }
};

enum class DisAction { TrickleReset, EmitDio, QueuePending, EvictPending };

// DIS handling. Normal mode collapses the trickle interval, which brings the
// next DIO forward. Attack-detection mode leaves trickle alone and parks the
// sender in the pending table instead. Nodes that have not joined ignore DIS.
std::vector<DisAction> handle_dis(DodagState& state, TrickleTimer& trickle, NodeMode mode, const ControlMessage& dis);

}  // namespace uitrust::rpl
