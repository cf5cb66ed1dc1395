#include "uitrust/rpl/objective.hpp"

namespace uitrust::rpl {

void LinkStats::observe_forward(bool delivered, double alpha) {
    d_fwd = (1.0 - alpha) * d_fwd + alpha * (delivered ? 1.0 : 0.0);
}

double compute_etx(const LinkStats& stats) {
    if (!(stats.d_fwd > 0.0) || !(stats.d_rev > 0.0)) {
        return kUnusableLink;
    }
    return 1.0 / (stats.d_fwd * stats.d_rev);
}

double path_rank(const ParentCandidate& c, const MrhofParams& params) {
    if (c.rank == kInfiniteRank) {
        return kUnusableLink;
    }
    const double etx = compute_etx(c.link);
    if (etx == kUnusableLink) {
        return kUnusableLink;
    }
    return static_cast<double>(c.rank) + etx * params.rank_unit;
}

std::optional<Mac> mrhof_select_parent(std::span<const ParentCandidate> candidates, std::optional<Mac> current,
                                       const MrhofParams& params) {
    const ParentCandidate* best = nullptr;
    double best_path = kUnusableLink;
    double current_path = kUnusableLink;
    for (const auto& c : candidates) {
        const double p = path_rank(c, params);
        if (current && c.mac == *current) {
            current_path = p;
        }
        if (p == kUnusableLink) {
            continue;
        }
        if (best == nullptr || p < best_path || (p == best_path && c.mac < best->mac)) {
            best = &c;
            best_path = p;
        }
    }
    if (best == nullptr) {
        return std::nullopt;
    }
    if (current && current_path != kUnusableLink && current_path - best_path <= params.hysteresis) {
        return current;
    }
    return best->mac;
}

}  // namespace uitrust::rpl
