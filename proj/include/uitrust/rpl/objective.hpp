#pragma once

#include "uitrust/rpl/message.hpp"

#include <limits>
#include <optional>
#include <span>

namespace uitrust::rpl {

inline constexpr double kUnusableLink = std::numeric_limits<double>::infinity();

// Delivery ratios of a link in both directions.
struct LinkStats {
    double d_fwd = 1.0;
    double d_rev = 1.0;

    // EWMA over unicast outcomes toward the neighbor.
    void observe_forward(bool delivered, double alpha);
};

// 1 / (d_fwd * d_rev); kUnusableLink when either ratio is zero.
double compute_etx(const LinkStats& stats);

struct MrhofParams {
    std::uint16_t rank_unit = 128;
    std::uint16_t hysteresis = 64;
    double etx_alpha = 0.2;
};

struct ParentCandidate {
    Mac mac = 0;
    std::uint16_t rank = kInfiniteRank;
    LinkStats link;
};

// Advertised rank plus ETX scaled to rank units; kUnusableLink for unusable
// links and infinite ranks.
double path_rank(const ParentCandidate& c, const MrhofParams& params);

// Lowest path rank wins (ties: lowest MAC). A current parent is kept unless
// the best challenger beats it by more than the hysteresis. Returns nullopt
// when no candidate offers a usable path.
std::optional<Mac> mrhof_select_parent(std::span<const ParentCandidate> candidates, std::optional<Mac> current,
                                       const MrhofParams& params);

}  // namespace uitrust::rpl
