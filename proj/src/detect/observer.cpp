#include "uitrust/detect/observer.hpp"

#include <algorithm>
#include <stdexcept>

namespace uitrust::detect {

void DetectorParams::validate() const {
    if (query_interval.micros() <= 0) {
        throw std::invalid_argument("query interval must be > 0");
    }
    if (th_r.micros() <= 0) {
        throw std::invalid_argument("TH_R must be > 0");
    }
    if (query_jitter.micros() < 0 || query_jitter >= query_interval) {
        throw std::invalid_argument("query jitter must lie in [0, query interval)");
    }
    if (pending_miss_limit == 0) {
        throw std::invalid_argument("pending miss limit must be >= 1");
    }
}

Observer::Observer(DetectorParams params) : params_(params) { params_.validate(); }

std::size_t Observer::outstanding() const {
    if (!round_) {
        return 0;
    }
    std::size_t n = 0;
    for (Mac t : round_->targets) {
        n += round_->responses.contains(t) ? 0 : 1;
    }
    return n;
}

bool Observer::can_query(sim::SimTime now) const {
    return !last_query_ || now - *last_query_ + params_.query_jitter >= params_.query_interval;
}

std::optional<wire::QueryField> Observer::issue_collective_query(sim::SimTime now, std::span<const Mac> pending,
                                                                 std::span<const Mac> neighbours,
                                                                 std::optional<std::uint16_t> nonce) {
    if (round_ || !can_query(now)) {
        return std::nullopt;
    }
    std::vector<Mac> targets(pending.begin(), pending.end());
    targets.insert(targets.end(), neighbours.begin(), neighbours.end());
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    if (targets.empty()) {
        return std::nullopt;
    }
    Round r;
    r.query = wire::QueryField{uid_type_, nonce ? *nonce : next_nonce_};
    ++next_nonce_;
    r.sent_at = now;
    r.targets = std::move(targets);
    for (Mac t : r.targets) {
        ledger_.at(t).last_query_t = now;
    }
    last_query_ = now;
    round_ = std::move(r);
    return round_->query;
}

bool Observer::on_response(Mac from, const wire::ResponseField& field, sim::SimTime at) {
    if (!round_ || field.nonce != round_->query.nonce || field.uid_type != round_->query.uid_type) {
        return false;
    }
    if (at < round_->sent_at) {
        throw std::logic_error("response precedes its query");
    }
    round_->responses.try_emplace(from, field.uid, at);
    return true;
}

std::optional<RoundSummary> Observer::close_round(sim::SimTime now) {
    if (!round_) {
        return std::nullopt;
    }
    Round r = std::move(*round_);
    round_.reset();

    RoundSummary s;
    s.nonce = r.query.nonce;
    s.queried_type = r.query.uid_type;
    s.queried = r.targets.size();

    for (const auto& [mac, resp] : r.responses) {
        ledger_.record_uid(mac, r.query.uid_type, resp.first);
        ledger_.at(mac).last_response_t = resp.second;
    }

    // Case 3
    for (Mac t : r.targets) {
        const auto it = r.responses.find(t);
        std::optional<sim::SimTime> rtt;
        if (it != r.responses.end() && it->second.second <= now) {
            rtt = it->second.second - r.sent_at;
            ++s.responded;
            if (*rtt > params_.th_r) {
                ++s.late;
            }
        } else {
            ++s.silent;
        }
        score_timeout(ledger_, t, rtt, params_.th_r);
        if (rtt || ledger_.at(t).consecutive_misses >= params_.pending_miss_limit) {
            s.resolved.push_back(t);
        }
    }

    // Cases 1 and 2
    std::vector<RoundResponse> responses;
    responses.reserve(r.responses.size());
    for (const auto& [mac, resp] : r.responses) {
        if (resp.second <= now) {
            responses.push_back(RoundResponse{mac, resp.first});
        }
    }
    score_round_pairs(ledger_, responses);

    // Case 4
    uid_type_ = rotate_uid_type(uid_type_, s.silent, s.queried);
    s.next_type = uid_type_;
    return s;
}

}  // namespace uitrust::detect
