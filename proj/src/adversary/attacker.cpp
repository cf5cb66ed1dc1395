#include "uitrust/adversary/attacker.hpp"

#include <cmath>
#include <stdexcept>

namespace uitrust::adversary {

QueryBehavior QueryBehavior::parse(const std::string& text) {
    QueryBehavior b;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const auto arg = [&]() {
        if (colon == std::string::npos) {
            throw std::invalid_argument("query_behavior '" + text + "' needs a parameter");
        }
        std::size_t used = 0;
        const double v = std::stod(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) {
            throw std::invalid_argument("query_behavior '" + text + "': bad number");
        }
        return v;
    };
    if (head == "answer" && colon == std::string::npos) {
        b.mode = Mode::Answer;
    } else if (head == "delay") {
        b.mode = Mode::Delay;
        b.delay_factor = arg();
        if (!(b.delay_factor >= 0.0)) {
            throw std::invalid_argument("delay factor must be >= 0");
        }
    } else if (head == "ignore") {
        b.mode = Mode::Ignore;
        b.ignore_prob = arg();
        if (!(b.ignore_prob >= 0.0 && b.ignore_prob <= 1.0)) {
            throw std::invalid_argument("ignore probability must lie in [0,1]");
        }
    } else if (head == "answer_then_ignore_alt_uid" && colon == std::string::npos) {
        b.mode = Mode::AnswerThenIgnoreAltUid;
    } else {
        throw std::invalid_argument("unknown query_behavior '" + text + "'");
    }
    return b;
}

std::string QueryBehavior::to_string() const {
    switch (mode) {
        case Mode::Answer: return "answer";
        case Mode::Delay: return "delay:" + std::to_string(delay_factor);
        case Mode::Ignore: return "ignore:" + std::to_string(ignore_prob);
        case Mode::AnswerThenIgnoreAltUid: return "answer_then_ignore_alt_uid";
    }
    return "?";
}

void AttackerConfig::validate() const {
    if (!(dis_rate_hz > 0.0)) {
        throw std::invalid_argument("dis_rate_hz must be > 0");
    }
    if (mac_pool_size < 1 || mac_pool_size > Attacker::kMaxPoolSize) {
        throw std::invalid_argument("mac_pool_size must lie in [1, 2^24]");
    }
    if (!(identity_switch_period_s > 0.0)) {
        throw std::invalid_argument("identity_switch_period_s must be > 0");
    }
    if (power_levels_dbm.empty()) {
        throw std::invalid_argument("power_levels_dbm must not be empty");
    }
    if (!(response_memory_s >= 0.0)) {
        throw std::invalid_argument("response_memory_s must be >= 0");
    }
}

Attacker::Attacker(AttackerConfig cfg, std::uint32_t attacker_index, UidSet uids, Mac home_mac, double home_power_dbm)
    : cfg_(std::move(cfg)), index_(attacker_index) {
    cfg_.validate();
    current_.uids = uids;
    current_.mac = home_mac;
    current_.tx_power_dbm = home_power_dbm;
    usage_[home_mac] = Usage{home_power_dbm, {}};
}

Mac Attacker::pool_mac(std::uint64_t index) const {
    // locally administered prefix, one 2^24 block per attacker
    return (0x06'0000'000000ULL | (static_cast<Mac>(index_ & 0xFFFF) << 24) | index) & wire::kMacMask;
}

void Attacker::activate(sim::SimTime now, sim::Rng& rng) {
    active_ = true;
    next_fake_identity(rng, now);
}

NodeIdentity Attacker::next_fake_identity(sim::Rng& rng, sim::SimTime now) {
    const std::uint64_t pool = cfg_.mac_pool_size;
    std::uint64_t idx = 0;
    if (used_pool_.size() >= pool) {
        idx = rng.index(pool);
        ++reuses_;
    } else if (used_pool_.size() * 2 < pool) {
        do {
            idx = rng.index(pool);
        } while (used_pool_.contains(idx));
    } else {
        std::vector<std::uint64_t> free;
        free.reserve(pool - used_pool_.size());
        for (std::uint64_t i = 0; i < pool; ++i) {
            if (!used_pool_.contains(i)) {
                free.push_back(i);
            }
        }
        idx = free[rng.index(free.size())];
    }
    used_pool_.insert(idx);

    const auto& levels = cfg_.power_levels_dbm;
    double power = levels.front();
    if (levels.size() > 1) {
        std::vector<double> others;
        for (double l : levels) {
            if (l != current_.tx_power_dbm) {
                others.push_back(l);
            }
        }
        power = others.empty() ? levels[rng.index(levels.size())] : others[rng.index(others.size())];
    }

    current_.mac = pool_mac(idx);
    current_.tx_power_dbm = power;
    last_switch_ = now;
    auto& u = usage_[current_.mac];
    u.tx_power_dbm = power;
    u.last_used = now;
    return current_;
}

sim::SimTime Attacker::dis_period() const { return sim::SimTime::from_seconds(1.0 / cfg_.dis_rate_hz); }

std::vector<EmittedDis> Attacker::attack_tick(sim::SimTime now, sim::Rng& rng) {
    if (!active_) {
        return {};
    }
    if (now - last_switch_ >= sim::SimTime::from_seconds(cfg_.identity_switch_period_s)) {
        next_fake_identity(rng, now);
    }
    touch(current_.mac, now);
    return {EmittedDis{now, current_.mac, current_.tx_power_dbm}};
}

std::vector<EmittedDis> Attacker::attack_window(sim::SimTime from, sim::SimTime to, sim::Rng& rng) {
    std::vector<EmittedDis> out;
    const auto period = dis_period();
    for (sim::SimTime t = from; t < to; t += period) {
        for (auto& d : attack_tick(t, rng)) {
            out.push_back(d);
        }
    }
    return out;
}

void Attacker::touch(Mac mac, sim::SimTime now) {
    auto it = usage_.find(mac);
    if (it != usage_.end() && it->second.last_used < now) {
        it->second.last_used = now;
    }
}

std::vector<Mac> Attacker::identities_since(sim::SimTime since) const {
    std::vector<Mac> out;
    for (const auto& [mac, u] : usage_) {
        if (u.last_used >= since) {
            out.push_back(mac);
        }
    }
    return out;
}

std::optional<double> Attacker::power_of(Mac mac) const {
    const auto it = usage_.find(mac);
    if (it == usage_.end()) {
        return std::nullopt;
    }
    return it->second.tx_power_dbm;
}

std::optional<ScheduledResponse> Attacker::respond_to_query(const wire::QueryField& query, Mac identity,
                                                            sim::SimTime query_time, sim::SimTime answer_delay,
                                                            sim::SimTime th_r, sim::Rng& rng) const {
    if (!owns(identity)) {
        return std::nullopt;
    }
    ScheduledResponse r;
    r.field.uid_type = query.uid_type;
    r.field.uid = current_.uids[static_cast<std::size_t>(query.uid_type)];
    r.field.nonce = query.nonce;
    r.at = query_time + answer_delay;
    switch (cfg_.query_behavior.mode) {
        case QueryBehavior::Mode::Answer:
            break;
        case QueryBehavior::Mode::Delay:
            r.at = query_time + sim::SimTime::from_micros(
                                    std::llround(cfg_.query_behavior.delay_factor * static_cast<double>(th_r.micros())));
            break;
        case QueryBehavior::Mode::Ignore:
            if (rng.bernoulli(cfg_.query_behavior.ignore_prob)) {
                return std::nullopt;
            }
            break;
        case QueryBehavior::Mode::AnswerThenIgnoreAltUid:
            if (query.uid_type != wire::UidType::SiliconSerial) {
                return std::nullopt;
            }
            break;
    }
    return r;
}

}  // namespace uitrust::adversary
