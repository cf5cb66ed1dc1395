#include "uitrust/harness/simulation.hpp"

#include "uitrust/adversary/attacker.hpp"
#include "uitrust/detect/counter.hpp"
#include "uitrust/detect/observer.hpp"
#include "uitrust/harness/baselines.hpp"
#include "uitrust/rpl/dodag.hpp"
#include "uitrust/rpl/message.hpp"
#include "uitrust/rpl/objective.hpp"
#include "uitrust/rpl/trickle.hpp"
#include "uitrust/sim/energy.hpp"
#include "uitrust/sim/event_queue.hpp"
#include "uitrust/sim/radio.hpp"
#include "uitrust/sim/rng.hpp"
#include "uitrust/sim/trace.hpp"
#include "uitrust/trust/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <unordered_map>
#include <unordered_set>

namespace uitrust::harness {

namespace {

using rpl::ControlMessage;
using rpl::MessageKind;
using sim::SimTime;
using wire::Mac;

constexpr Mac kHomePrefix = 0x02'0000'000000ULL;
constexpr std::size_t kRoot = 0;
constexpr unsigned kMaxHops = 64;
constexpr std::size_t kVerdictEntryBytes = 6;
constexpr std::uint32_t kMaxPlacementAttempts = 10;

// Salts for derived streams.
constexpr std::uint64_t kSaltMain = 1;
constexpr std::uint64_t kSaltPlacement = 100;
constexpr std::uint64_t kSaltRoles = 200;
constexpr std::uint64_t kSaltUids = 300;

std::int8_t version_diff(std::uint8_t a, std::uint8_t b) { return static_cast<std::int8_t>(static_cast<std::uint8_t>(a - b)); }

struct Device {
    std::size_t idx = 0;
    bool root = false;
    bool attacker = false;
    Mac home_mac = 0;
    double power_dbm = 0.0;
    adversary::UidSet uids{};
    bool booted = false;

    rpl::DodagState dodag;
    std::unique_ptr<rpl::TrickleTimer> trickle;
    std::uint64_t trickle_epoch = 0;
    rpl::NodeMode mode = rpl::NodeMode::Normal;

    std::optional<detect::Observer> observer;
    std::unordered_map<Mac, SimTime> heard;
    std::optional<std::size_t> attacker_slot;

    // last round answered: nonce plus a bit per uid type
    std::optional<std::uint16_t> answered_nonce;
    unsigned answered_types = 0;
    std::set<std::tuple<Mac, std::uint8_t>> answered_identities;

    std::unordered_map<Mac, double> link_cost;  // from the last trust epoch
    sim::EnergyAccount energy;
};

class World {
public:
    World(const ScenarioConfig& cfg, const RunOptions& opts);
    RunDetails run();

private:
    // setup
    void place();
    void assign_roles_and_uids();

    // identities
    Mac current_mac(const Device& d) const;
    double current_power(const Device& d) const;
    bool accounted(const Device& d) const { return !d.attacker; }
    bool blackholing(const Device& d) const;
    std::optional<std::size_t> owner(Mac mac) const;

    // radio
    void broadcast(Device& tx, const ControlMessage& msg, Mac src, double power);
    bool unicast_hop(Device& tx, Device& rx, MessageKind kind, Mac src, Mac dst, std::size_t bytes, SimTime at,
                     bool control);
    void account_control(Device& tx, const ControlMessage& msg, std::size_t bytes);
    void receive(Device& rx, const ControlMessage& msg, double rssi);

    // RPL
    void boot(Device& d);
    void send_dis_until_joined(std::size_t idx);
    void start_interval(Device& d);
    void trickle_reset(Device& d);
    void send_dio(Device& d, std::optional<wire::QueryField> query = std::nullopt);
    void on_dio(Device& d, const ControlMessage& msg);
    void select_parent(Device& d);
    void send_route_dao(std::size_t idx);
    void enter_attack_mode(Device& d);

    // data
    void data_tick(std::size_t idx);

    // attack
    void attack_tick(std::size_t idx);

    // detection
    void counter_tick();
    void round_start(std::uint64_t k);
    void issue_query(std::size_t idx, std::uint16_t nonce);
    void on_query(Device& d, const wire::QueryField& q, SimTime query_time);
    void send_response(std::size_t idx, Mac identity, double power, wire::ResponseField field);
    void relay_report(Device& origin, const std::vector<wire::LtoEntry>& entries);
    void trust_epoch();
    void sample();

    // verdicts
    std::vector<bool> device_verdicts(std::vector<DeviceOutcome>* details) const;

    const ScenarioConfig& cfg_;
    RunOptions opts_;
    sim::Rng rng_;
    sim::EventQueue q_;
    sim::TraceSink trace_;
    sim::EnergyModel energy_model_;
    std::unique_ptr<sim::Channel> channel_;
    std::vector<sim::Position> positions_;
    std::uint32_t placement_attempts_ = 0;

    std::vector<Device> dev_;
    std::vector<adversary::Attacker> attackers_;
    std::vector<std::size_t> attacker_devices_;
    std::unordered_map<Mac, std::size_t> owner_;
    std::size_t forced_collision_attacker_ = SIZE_MAX;

    rpl::TrickleConfig trickle_cfg_;
    rpl::MrhofParams mrhof_;
    SimTime attack_start_;
    SimTime end_;
    SimTime omega_;

    // root state
    detect::MessageCounter counter_;
    std::optional<SimTime> alarm_time_;
    bool rounds_running_ = false;
    struct Stored {
        std::uint16_t p = 0;
        std::uint16_t n = 0;
        SimTime t;
    };
    std::map<std::size_t, std::map<Mac, Stored>> reports_;
    std::unordered_map<std::size_t, double> prev_gr_;
    std::unordered_map<Mac, trust::Verdict> verdicts_;
    bool verdicts_published_ = false;
    std::map<Mac, Mac> parent_map_;
    std::set<Mac> bad_parents_seen_;
    std::optional<std::string> last_trust_json_;

    // baselines
    RssiProfileDetector rssi_;
    IdCountDetector idcount_;

    // metrics
    std::uint64_t overhead_bytes_ = 0;
    std::uint64_t piggyback_bytes_ = 0;
    std::uint64_t control_frames_ = 0;
    std::set<std::string> kinds_;
    std::uint64_t data_sent_ = 0;
    std::uint64_t data_delivered_ = 0;
    std::uint32_t trust_epochs_ = 0;
    std::uint32_t version_bumps_ = 0;
    std::vector<std::pair<double, double>> ratio_series_;
    std::vector<std::pair<double, bool>> all_flagged_;
};

World::World(const ScenarioConfig& cfg, const RunOptions& opts)
    : cfg_(cfg),
      opts_(opts),
      rng_(sim::Rng::derive(cfg.seed, kSaltMain)),
      trace_(opts.trace),
      counter_(SimTime::from_seconds(1.0), SimTime::from_seconds(cfg.counter_window_s), cfg.th_c.value_or(0.0)),
      rssi_(RssiProfileParams{cfg.rssi_epsilon_db, cfg.rssi_proximity_s, cfg.rssi_min_samples,
                              cfg.rssi_min_common_observers, cfg.rssi_min_observer_overlap}),
      idcount_(SimTime::from_seconds(cfg.idcount_window_s),
               IdCountDetector::default_threshold(cfg.idcount_factor, cfg.trickle_imin_s, cfg.idcount_window_s)) {
    cfg_.validate();
    trickle_cfg_.i_min = SimTime::from_seconds(cfg.trickle_imin_s);
    trickle_cfg_.i_max_doublings = cfg.trickle_doublings;
    trickle_cfg_.redundancy_k = cfg.trickle_k;
    mrhof_.rank_unit = static_cast<std::uint16_t>(cfg.rank_unit);
    mrhof_.hysteresis = static_cast<std::uint16_t>(cfg.hysteresis);
    mrhof_.etx_alpha = cfg.etx_alpha;
    attack_start_ = SimTime::from_seconds(cfg.attack_start_s);
    end_ = SimTime::from_seconds(cfg.duration_s);
    omega_ = SimTime::from_seconds(cfg.query_interval_s);
    place();
    assign_roles_and_uids();
}

void World::place() {
    const double side = cfg_.field_side();
    const std::size_t n = cfg_.node_count + 1;
    sim::RadioConfig radio;
    radio.tx_range_m = cfg_.tx_range_m;
    radio.forwarding_error_rate = cfg_.forwarding_error_rate;
    radio.path_loss_exponent = cfg_.path_loss_exponent;
    radio.ref_loss_db = cfg_.ref_loss_db;
    radio.shadowing_sigma_db = cfg_.shadowing_sigma_db;
    for (std::uint32_t attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
        ++placement_attempts_;
        sim::Rng prng(sim::Rng::derive(cfg_.seed, kSaltPlacement + attempt));
        std::vector<sim::Position> pos(n);
        pos[kRoot] = {side / 2.0, side / 2.0};
        for (std::size_t i = 1; i < n; ++i) {
            pos[i].x = prng.uniform(0.0, side);
            pos[i].y = prng.uniform(0.0, side);
        }
        auto ch = std::make_unique<sim::Channel>(radio, pos);
        if (ch->connected(kRoot)) {
            positions_ = std::move(pos);
            channel_ = std::move(ch);
            return;
        }
    }
    throw TopologyError("no connected placement after " + std::to_string(kMaxPlacementAttempts) + " attempts");
}

void World::assign_roles_and_uids() {
    const std::size_t n = cfg_.node_count + 1;
    dev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& d = dev_[i];
        d.idx = i;
        d.root = i == kRoot;
        d.home_mac = kHomePrefix | static_cast<Mac>(i);
        d.power_dbm = cfg_.honest_tx_power_dbm;
        d.dodag.pending = rpl::PendingTable(cfg_.pending_capacity);
        d.trickle = std::make_unique<rpl::TrickleTimer>(trickle_cfg_);
        owner_[d.home_mac] = i;
    }

    // attacker devices: a uniform subset of the non-root devices
    sim::Rng roles(sim::Rng::derive(cfg_.seed, kSaltRoles));
    std::vector<std::size_t> order(cfg_.node_count);
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i + 1;
    }
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[roles.index(i)]);
    }
    const std::uint32_t count = std::min(cfg_.attacker_count(), cfg_.node_count);
    attacker_devices_.assign(order.begin(), order.begin() + count);
    std::sort(attacker_devices_.begin(), attacker_devices_.end());

    // hardware identifiers, unique per type across devices
    sim::Rng uid_rng(sim::Rng::derive(cfg_.seed, kSaltUids));
    std::array<std::unordered_set<wire::UidValue>, wire::kUidTypeCount> used;
    for (auto& d : dev_) {
        for (std::size_t t = 0; t < wire::kUidTypeCount; ++t) {
            const unsigned bits = wire::uid_bits(static_cast<wire::UidType>(t));
            wire::UidValue v;
            do {
                v = uid_rng.next_u64() & ((1ULL << bits) - 1);
            } while (used[t].contains(v));
            used[t].insert(v);
            d.uids[t] = v;
        }
    }

    if (cfg_.forced_uid_collision && !attacker_devices_.empty()) {
        // Prefer an attacker with an honest radio neighbour and collide the
        // two, so the same observers hear both holders of the UID.
        const auto is_honest = [&](std::size_t i) {
            return i != kRoot && !std::binary_search(attacker_devices_.begin(), attacker_devices_.end(), i);
        };
        std::size_t attacker = attacker_devices_.front();
        std::size_t honest = 0;
        for (std::size_t a : attacker_devices_) {
            for (std::size_t nb : channel_->neighbors(a)) {
                if (is_honest(nb)) {
                    attacker = a;
                    honest = nb;
                    break;
                }
            }
            if (honest != 0) {
                break;
            }
        }
        for (std::size_t i = 1; i < n && honest == 0; ++i) {
            if (is_honest(i)) {
                honest = i;
            }
        }
        if (honest != 0) {
            forced_collision_attacker_ = attacker;
            dev_[forced_collision_attacker_].uids = dev_[honest].uids;
        }
    }

    for (std::size_t slot = 0; slot < attacker_devices_.size(); ++slot) {
        auto& d = dev_[attacker_devices_[slot]];
        d.attacker = true;
        d.attacker_slot = slot;
        attackers_.emplace_back(cfg_.attacker, static_cast<std::uint32_t>(slot), d.uids, d.home_mac, d.power_dbm);
    }

    if (cfg_.defense == Defense::UITrust) {
        detect::DetectorParams p;
        p.query_interval = omega_;
        p.th_r = SimTime::from_seconds(cfg_.th_r_s);
        p.query_jitter = SimTime::from_seconds(0.2);
        for (auto& d : dev_) {
            if (!d.root && !d.attacker) {
                d.observer.emplace(p);
            }
        }
    }
}

Mac World::current_mac(const Device& d) const {
    if (d.attacker_slot) {
        return attackers_[*d.attacker_slot].current().mac;
    }
    return d.home_mac;
}

double World::current_power(const Device& d) const {
    if (d.attacker_slot) {
        return attackers_[*d.attacker_slot].current().tx_power_dbm;
    }
    return d.power_dbm;
}

bool World::blackholing(const Device& d) const { return d.attacker_slot && attackers_[*d.attacker_slot].active(); }

std::optional<std::size_t> World::owner(Mac mac) const {
    const auto it = owner_.find(mac);
    if (it == owner_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void World::account_control(Device& tx, const ControlMessage& msg, std::size_t bytes) {
    overhead_bytes_ += bytes;
    piggyback_bytes_ += msg.piggyback_bytes();
    ++control_frames_;
    kinds_.insert(std::string(rpl::to_string(msg.kind)));
    counter_.record(q_.now());
    if (accounted(tx)) {
        sim::account_energy(tx.energy, energy_model_, sim::EnergyAction::TxBytes, static_cast<double>(bytes));
    }
}

void World::broadcast(Device& tx, const ControlMessage& msg, Mac src, double power) {
    msg.validate();
    const std::size_t bytes = msg.bytes();
    account_control(tx, msg, bytes);
    if (cfg_.defense == Defense::IdCount && msg.kind != MessageKind::DAO) {
        idcount_.observe(src, q_.now());
    }
    const auto kind = rpl::to_string(msg.kind);
    for (std::size_t r : channel_->neighbors(tx.idx)) {
        auto& rx = dev_[r];
        const auto out = channel_->deliver(tx.idx, r, power, q_.now(), bytes, rng_);
        trace_.record({out.rx_time.micros() ? out.rx_time : q_.now(), kind, src, current_mac(rx), bytes,
                       sim::to_string(out.status)});
        if (out.status != sim::DeliveryStatus::Delivered || !rx.booted) {
            continue;
        }
        receive(rx, msg, out.rssi_dbm);
    }
}

bool World::unicast_hop(Device& tx, Device& rx, MessageKind kind, Mac src, Mac dst, std::size_t bytes, SimTime at,
                        bool control) {
    if (control) {
        overhead_bytes_ += bytes;
        ++control_frames_;
        kinds_.insert(std::string(rpl::to_string(kind)));
        counter_.record(q_.now());
    } else {
        kinds_.insert("DATA");
    }
    if (accounted(tx)) {
        sim::account_energy(tx.energy, energy_model_, sim::EnergyAction::TxBytes, static_cast<double>(bytes));
    }
    const auto out = channel_->deliver(tx.idx, rx.idx, current_power(tx), at, bytes, rng_);
    const bool ok = out.status == sim::DeliveryStatus::Delivered && rx.booted;
    const bool dropped = ok && !control && blackholing(rx);
    trace_.record({ok ? out.rx_time : at, control ? rpl::to_string(kind) : std::string_view("DATA"), src, dst, bytes,
                   dropped ? "dropped" : (ok ? "delivered" : sim::to_string(out.status))});
    if (ok && accounted(rx)) {
        sim::account_energy(rx.energy, energy_model_, sim::EnergyAction::RxBytes, static_cast<double>(bytes));
    }
    // link estimate from the unicast outcome
    if (auto it = tx.dodag.candidates.find(dst); it != tx.dodag.candidates.end()) {
        it->second.link.observe_forward(out.status == sim::DeliveryStatus::Delivered, mrhof_.etx_alpha);
    }
    return ok && !dropped;
}

void World::receive(Device& rx, const ControlMessage& msg, double rssi) {
    if (accounted(rx)) {
        sim::account_energy(rx.energy, energy_model_, sim::EnergyAction::RxBytes, static_cast<double>(msg.bytes()));
    }
    if (cfg_.defense == Defense::RssiProfile && !rx.attacker) {
        rssi_.observe(rx.idx, msg.src_mac, rssi, q_.now());
    }
    rx.heard[msg.src_mac] = q_.now();
    switch (msg.kind) {
        case MessageKind::DIS: {
            if (rx.attacker_slot && attackers_[*rx.attacker_slot].owns(msg.src_mac)) {
                break;
            }
            const auto actions = rpl::handle_dis(rx.dodag, *rx.trickle, rx.mode, msg);
            for (auto a : actions) {
                if (a == rpl::DisAction::TrickleReset) {
                    start_interval(rx);
                }
            }
            break;
        }
        case MessageKind::DIO:
            on_dio(rx, msg);
            if (msg.has_query()) {
                on_query(rx, std::get<wire::QueryField>(msg.piggyback), q_.now());
            }
            break;
        case MessageKind::DAO:
            if (msg.has_response() && rx.observer) {
                rx.observer->on_response(msg.src_mac, std::get<wire::ResponseField>(msg.piggyback), q_.now());
            }
            break;
    }
}

void World::boot(Device& d) {
    d.booted = true;
    if (d.root) {
        d.dodag.rank = mrhof_.rank_unit;
        d.dodag.hops = 0;
        start_interval(d);
        return;
    }
    send_dis_until_joined(d.idx);
    if (!d.attacker) {
        const SimTime first = q_.now() + SimTime::from_seconds(rng_.uniform(0.0, cfg_.data_period_s));
        if (first < end_) {
            q_.schedule(first, [this, i = d.idx] { data_tick(i); });
        }
    }
}

void World::send_dis_until_joined(std::size_t idx) {
    auto& d = dev_[idx];
    if (d.dodag.joined()) {
        return;
    }
    broadcast(d, rpl::make_dis(current_mac(d)), current_mac(d), current_power(d));
    const SimTime next = q_.now() + SimTime::from_seconds(cfg_.dis_retry_s);
    if (next < end_) {
        q_.schedule(next, [this, idx] { send_dis_until_joined(idx); });
    }
}

void World::start_interval(Device& d) {
    const std::uint64_t epoch = ++d.trickle_epoch;
    const SimTime offset = d.trickle->begin_interval(rng_);
    const SimTime interval = d.trickle->interval();
    const std::size_t idx = d.idx;
    q_.schedule(q_.now() + offset, [this, idx, epoch] {
        auto& n = dev_[idx];
        if (n.trickle_epoch == epoch && n.trickle->should_transmit()) {
            send_dio(n);
        }
    });
    q_.schedule(q_.now() + interval, [this, idx, epoch] {
        auto& n = dev_[idx];
        if (n.trickle_epoch == epoch) {
            n.trickle->on_interval_end();
            start_interval(n);
        }
    });
}

void World::trickle_reset(Device& d) {
    if (d.trickle->on_inconsistent()) {
        start_interval(d);
    }
}

void World::send_dio(Device& d, std::optional<wire::QueryField> query) {
    const Mac src = current_mac(d);
    auto msg = rpl::make_dio(src, d.dodag.rank, d.dodag.version, d.dodag.hops,
                             d.mode == rpl::NodeMode::AttackDetection);
    if (query) {
        msg.piggyback = *query;
    }
    std::vector<wire::LtoEntry> report;
    if (d.observer && d.observer->ledger().has_changes()) {
        report = d.observer->ledger().take_report(cfg_.report_min_change);
        msg.lto_report = report;
    }
    if (d.attacker_slot) {
        attackers_[*d.attacker_slot].touch(src, q_.now());
    }
    broadcast(d, msg, src, current_power(d));
    if (!report.empty()) {
        relay_report(d, report);
    }
}

void World::on_dio(Device& d, const ControlMessage& msg) {
    if (msg.alarm && d.mode == rpl::NodeMode::Normal && cfg_.defense == Defense::UITrust) {
        enter_attack_mode(d);
    }
    if (d.root) {
        if (msg.version == d.dodag.version) {
            d.trickle->on_consistent();
        }
        return;
    }
    if (d.attacker_slot && attackers_[*d.attacker_slot].owns(msg.src_mac)) {
        return;
    }
    const auto diff = version_diff(msg.version, d.dodag.version);
    if (diff < 0) {
        return;
    }
    const bool rejoin = diff > 0 && d.dodag.joined();
    if (diff > 0) {
        // global repair: forget the old DODAG and restart trickle at i_min
        d.dodag.version = msg.version;
        d.dodag.rank = rpl::kInfiniteRank;
        d.dodag.parent.reset();
        d.dodag.candidates.clear();
        d.trickle->on_inconsistent();
        ++d.trickle_epoch;
    }
    auto& c = d.dodag.candidates[msg.src_mac];
    c.rank = msg.rank;
    c.version = msg.version;
    c.hops = msg.hops;
    c.last_heard = q_.now();
    d.trickle->on_consistent();
    select_parent(d);
    if (rejoin && !d.dodag.joined()) {
        q_.schedule(q_.now() + SimTime::from_seconds(cfg_.dis_retry_s), [this, i = d.idx] { send_dis_until_joined(i); });
    }
}

void World::select_parent(Device& d) {
    if (d.root || !d.booted) {
        return;
    }
    auto& st = d.dodag;
    const SimTime expiry = SimTime::from_seconds(cfg_.candidate_expiry_s);
    for (auto it = st.candidates.begin(); it != st.candidates.end();) {
        const bool stale = q_.now() - it->second.last_heard > expiry && st.parent != it->first;
        it = stale ? st.candidates.erase(it) : std::next(it);
    }

    const bool trust_routing = cfg_.defense == Defense::UITrust && verdicts_published_ && !d.attacker &&
                               d.mode == rpl::NodeMode::AttackDetection;
    const auto eligible = [&](Mac mac, const rpl::Candidate& c) {
        if (c.version != st.version || c.rank == rpl::kInfiniteRank) {
            return false;
        }
        if (st.joined() && c.rank >= st.rank) {
            return false;
        }
        if (rpl::compute_etx(c.link) == rpl::kUnusableLink) {
            return false;
        }
        if (trust_routing && mac != dev_[kRoot].home_mac) {
            const auto v = verdicts_.find(mac);
            return v != verdicts_.end() && v->second == trust::Verdict::Honest;
        }
        return true;
    };

    std::optional<Mac> chosen;
    if (trust_routing) {
        const auto score = [&](Mac mac, const rpl::Candidate& c) {
            double l = 0.5;
            if (mac == dev_[kRoot].home_mac) {
                l = 0.0;
            } else if (auto it = d.link_cost.find(mac); it != d.link_cost.end()) {
                l = it->second;
            }
            return trust::trust_rank(static_cast<double>(c.rank) / mrhof_.rank_unit, rpl::compute_etx(c.link), l,
                                     cfg_.trust.lambda);
        };
        std::optional<Mac> best;
        double best_r = 0.0;
        for (const auto& [mac, c] : st.candidates) {
            if (!eligible(mac, c)) {
                continue;
            }
            const double r = score(mac, c);
            if (!best || r < best_r) {
                best = mac;
                best_r = r;
            }
        }
        if (!best) {
            return;  // nothing eligible: keep what we have
        }
        chosen = best;
        if (st.parent && *st.parent != *best) {
            const auto cur = st.candidates.find(*st.parent);
            if (cur != st.candidates.end() && eligible(cur->first, cur->second) &&
                trust::maybe_switch_parent(score(cur->first, cur->second), best_r) == trust::ParentDecision::Keep) {
                chosen = st.parent;
            }
        }
    } else {
        std::vector<rpl::ParentCandidate> cands;
        cands.reserve(st.candidates.size());
        for (const auto& [mac, c] : st.candidates) {
            if (eligible(mac, c) || (st.parent && mac == *st.parent && c.version == st.version)) {
                cands.push_back({mac, c.rank, c.link});
            }
        }
        chosen = rpl::mrhof_select_parent(cands, st.parent, mrhof_);
        if (!chosen) {
            return;
        }
    }

    const auto& pc = st.candidates.at(*chosen);
    const double path = rpl::path_rank({*chosen, pc.rank, pc.link}, mrhof_);
    const auto path_rank = static_cast<std::uint16_t>(std::min(path, static_cast<double>(rpl::kInfiniteRank - 1)));
    const bool first_join = !st.joined();
    const bool changed = st.parent != chosen;
    st.parent = chosen;
    st.rank = std::min(st.rank, path_rank);
    if (changed) {
        st.hops = static_cast<std::uint8_t>(std::min<unsigned>(pc.hops + 1U, 255U));
        q_.schedule(q_.now(), [this, i = d.idx] { send_route_dao(i); });
    }
    if (first_join) {
        start_interval(d);
    }
}

void World::send_route_dao(std::size_t idx) {
    auto& d = dev_[idx];
    if (!d.dodag.parent) {
        return;
    }
    const Mac target = current_mac(d);
    const Mac parent = *d.dodag.parent;
    auto msg = rpl::make_dao(target, parent, target, parent);
    const std::size_t bytes = msg.bytes();
    std::size_t cur = idx;
    SimTime at = q_.now();
    for (unsigned hop = 0; hop < kMaxHops; ++hop) {
        auto& tx = dev_[cur];
        if (tx.root) {
            parent_map_[target] = parent;
            return;
        }
        if (!tx.dodag.parent) {
            return;
        }
        const auto next = owner(*tx.dodag.parent);
        if (!next) {
            return;
        }
        if (!unicast_hop(tx, dev_[*next], MessageKind::DAO, current_mac(tx), *tx.dodag.parent, bytes, at, true)) {
            return;
        }
        at += sim::airtime(bytes, channel_->config());
        cur = *next;
    }
}

void World::enter_attack_mode(Device& d) {
    d.mode = rpl::NodeMode::AttackDetection;
    if (d.dodag.joined()) {
        trickle_reset(d);
    }
    if (!rounds_running_) {
        rounds_running_ = true;
        const std::uint64_t k = static_cast<std::uint64_t>(q_.now().micros() / omega_.micros()) + 1;
        const SimTime at = SimTime::from_micros(static_cast<std::int64_t>(k) * omega_.micros());
        if (at < end_) {
            q_.schedule(at, [this, k] { round_start(k); });
        }
    }
}

void World::data_tick(std::size_t idx) {
    const SimTime next = q_.now() + SimTime::from_seconds(cfg_.data_period_s);
    if (next < end_) {
        q_.schedule(next, [this, idx] { data_tick(idx); });
    }
    const bool counted = q_.now() >= attack_start_;
    if (counted) {
        ++data_sent_;
    }
    const std::size_t bytes = rpl::kLinkOverheadBytes + rpl::kDataPayloadBytes;
    std::size_t cur = idx;
    SimTime at = q_.now();
    for (unsigned hop = 0; hop < kMaxHops; ++hop) {
        auto& tx = dev_[cur];
        if (tx.root) {
            if (counted) {
                ++data_delivered_;
            }
            return;
        }
        if (!tx.dodag.parent) {
            return;
        }
        const auto next = owner(*tx.dodag.parent);
        if (!next) {
            return;
        }
        if (!unicast_hop(tx, dev_[*next], MessageKind::DAO, current_mac(tx), *tx.dodag.parent, bytes, at, false)) {
            return;
        }
        at += sim::airtime(bytes, channel_->config());
        cur = *next;
    }
}

void World::attack_tick(std::size_t idx) {
    auto& d = dev_[idx];
    auto& a = attackers_[*d.attacker_slot];
    const Mac before = a.current().mac;
    if (!a.active()) {
        a.touch(before, q_.now());
        a.activate(q_.now(), rng_);
        for (Mac m : {a.current().mac}) {
            owner_[m] = idx;
        }
    }
    const auto frames = a.attack_tick(q_.now(), rng_);
    owner_[a.current().mac] = idx;
    const SimTime next = q_.now() + a.dis_period();
    if (next < end_) {
        q_.schedule(next, [this, idx] { attack_tick(idx); });
    }
    for (const auto& f : frames) {
        broadcast(d, rpl::make_dis(f.mac), f.mac, f.tx_power_dbm);
    }
    // a fresh identity announces itself
    if (a.current().mac != before && d.dodag.joined()) {
        send_dio(d);
    }
}

void World::counter_tick() {
    const SimTime now = q_.now();
    if (now == attack_start_ && !cfg_.th_c) {
        const auto samples = counter_.deltas(SimTime::from_seconds(cfg_.calibration_start_s), now);
        counter_.set_threshold(detect::calibrate_threshold(samples, cfg_.th_c_floor));
    }
    if (cfg_.defense == Defense::UITrust && !alarm_time_ && now > attack_start_ &&
        counter_.check(now) == detect::CounterVerdict::Alarm) {
        alarm_time_ = now;
        auto& root = dev_[kRoot];
        enter_attack_mode(root);
        send_dio(root);
    }
    const SimTime next = now + SimTime::from_seconds(1.0);
    if (next < end_) {
        q_.schedule(next, [this] { counter_tick(); });
    }
}

void World::round_start(std::uint64_t k) {
    const auto nonce = static_cast<std::uint16_t>(k & 0xFFFF);
    for (auto& d : dev_) {
        if (d.observer && d.booted && d.mode == rpl::NodeMode::AttackDetection) {
            const SimTime at = q_.now() + SimTime::from_seconds(rng_.uniform(0.0, 0.2));
            q_.schedule(at, [this, i = d.idx, nonce] { issue_query(i, nonce); });
        }
    }
    q_.schedule(q_.now() + SimTime::from_seconds(1.0), [this] { trust_epoch(); });
    const SimTime next = q_.now() + omega_;
    if (next < end_) {
        q_.schedule(next, [this, k] { round_start(k + 1); });
    }
}

void World::issue_query(std::size_t idx, std::uint16_t nonce) {
    auto& d = dev_[idx];
    const SimTime now = q_.now();
    const SimTime window = SimTime::from_seconds(cfg_.neighbor_window_s);
    std::vector<Mac> neighbours;
    for (auto it = d.heard.begin(); it != d.heard.end();) {
        if (now - it->second > window) {
            it = d.heard.erase(it);
        } else {
            neighbours.push_back(it->first);
            ++it;
        }
    }
    const auto& pend = d.dodag.pending.entries();
    const std::vector<Mac> pending(pend.begin(), pend.end());
    const auto query = d.observer->issue_collective_query(now, pending, neighbours, nonce);
    if (!query) {
        return;
    }
    send_dio(d, query);
    q_.schedule(now + SimTime::from_seconds(2.0 * cfg_.th_r_s), [this, idx] {
        auto& n = dev_[idx];
        const auto summary = n.observer->close_round(q_.now());
        if (summary) {
            for (Mac m : summary->resolved) {
                n.dodag.pending.erase(m);
            }
        }
    });
}

void World::on_query(Device& d, const wire::QueryField& q, SimTime query_time) {
    const SimTime base = SimTime::from_micros(query_time.micros() / omega_.micros() * omega_.micros());
    const auto answer_at = [&] {
        const SimTime at = base + SimTime::from_seconds(0.5 + rng_.uniform(0.0, 0.5));
        return std::max(at, query_time);
    };
    const auto type_bit = 1U << static_cast<unsigned>(q.uid_type);
    if (d.answered_nonce != q.nonce) {
        d.answered_nonce = q.nonce;
        d.answered_types = 0;
        d.answered_identities.clear();
    }
    const std::size_t idx = d.idx;

    if (!blackholing(d)) {
        if (d.answered_types & type_bit) {
            return;
        }
        d.answered_types |= type_bit;
        const Mac mac = current_mac(d);
        wire::ResponseField f{q.uid_type, d.uids[static_cast<std::size_t>(q.uid_type)], q.nonce};
        const double power = current_power(d);
        q_.schedule(answer_at(), [this, idx, mac, power, f] { send_response(idx, mac, power, f); });
        return;
    }

    auto& a = attackers_[*d.attacker_slot];
    const SimTime since = query_time - SimTime::from_seconds(cfg_.attacker.response_memory_s);
    const SimTime th_r = SimTime::from_seconds(cfg_.th_r_s);
    for (Mac identity : a.identities_since(since.micros() < 0 ? SimTime{} : since)) {
        const auto key = std::make_tuple(identity, static_cast<std::uint8_t>(q.uid_type));
        if (!d.answered_identities.insert(key).second) {
            continue;
        }
        const SimTime delay = answer_at() - query_time;
        const auto rsp = a.respond_to_query(q, identity, query_time, delay, th_r, rng_);
        if (!rsp) {
            continue;
        }
        const double power = a.power_of(identity).value_or(d.power_dbm);
        q_.schedule(rsp->at, [this, idx, identity, power, f = rsp->field] { send_response(idx, identity, power, f); });
    }
}

void World::send_response(std::size_t idx, Mac identity, double power, wire::ResponseField field) {
    auto& d = dev_[idx];
    auto msg = rpl::make_dao(identity, sim::kBroadcast, identity, d.dodag.parent.value_or(0));
    msg.piggyback = field;
    broadcast(d, msg, identity, power);
}

void World::relay_report(Device& origin, const std::vector<wire::LtoEntry>& entries) {
    // The report rode on the DIO just sent; relays add it to their own DIOs
    // hop by hop toward the root.
    const std::size_t bytes = entries.size() * wire::LtoEntry::kBytes;
    std::size_t cur = origin.idx;
    bool delivered = false;
    for (unsigned hop = 0; hop < kMaxHops; ++hop) {
        auto& tx = dev_[cur];
        if (tx.root) {
            delivered = true;
            break;
        }
        if (!tx.dodag.parent) {
            break;
        }
        const auto next = owner(*tx.dodag.parent);
        if (!next) {
            break;
        }
        if (cur != origin.idx) {
            overhead_bytes_ += bytes;
            piggyback_bytes_ += bytes;
            if (accounted(tx)) {
                sim::account_energy(tx.energy, energy_model_, sim::EnergyAction::TxBytes, static_cast<double>(bytes));
            }
        }
        if (rng_.bernoulli(cfg_.forwarding_error_rate)) {
            break;
        }
        if (accounted(dev_[*next])) {
            sim::account_energy(dev_[*next].energy, energy_model_, sim::EnergyAction::RxBytes,
                                static_cast<double>(bytes));
        }
        cur = *next;
    }
    if (!delivered) {
        for (const auto& e : entries) {
            origin.observer->ledger().mark_dirty(e.mac);
        }
        return;
    }
    auto& store = reports_[origin.idx];
    for (const auto& e : entries) {
        store[e.mac] = Stored{e.p, e.n, q_.now()};
    }
}

void World::trust_epoch() {
    if (reports_.empty()) {
        return;
    }
    const SimTime now = q_.now();
    const SimTime active = SimTime::from_seconds(cfg_.active_subject_window_s);

    std::vector<std::size_t> observers;
    std::set<Mac> subject_set;
    for (const auto& [obs, entries] : reports_) {
        observers.push_back(obs);
        subject_set.insert(dev_[obs].home_mac);
        for (const auto& [mac, s] : entries) {
            if (now - s.t <= active) {
                subject_set.insert(mac);
            }
        }
    }
    const std::vector<Mac> subjects(subject_set.begin(), subject_set.end());
    std::unordered_map<Mac, std::size_t> subject_index;
    for (std::size_t u = 0; u < subjects.size(); ++u) {
        subject_index[subjects[u]] = u;
    }

    trust::TrustMatrix m(observers.size(), subjects.size());
    std::vector<double> prev(observers.size(), trust::kNull);
    for (std::size_t w = 0; w < observers.size(); ++w) {
        const auto& d = dev_[observers[w]];
        m.set_hr(w, trust::hierarchical_rank(d.dodag.hops));
        m.set_observer_subject(w, subject_index.at(d.home_mac));
        if (auto it = prev_gr_.find(observers[w]); it != prev_gr_.end()) {
            prev[w] = it->second;
        }
        for (const auto& [mac, s] : reports_.at(observers[w])) {
            const auto si = subject_index.find(mac);
            if (si != subject_index.end()) {
                m.set(w, si->second, detect::compute_lto(s.p, s.n));
            }
        }
    }

    trust::TrustEvaluation eval(m, cfg_.trust, prev);
    ++trust_epochs_;

    std::size_t changed = 0;
    for (std::size_t u = 0; u < subjects.size(); ++u) {
        const auto& st = eval.subject(u);
        if (st.raters.empty()) {
            continue;
        }
        // Parent eligibility needs only the honest set, so only entries
        // entering or leaving it are pushed to the nodes.
        auto [it, fresh] = verdicts_.try_emplace(subjects[u], st.verdict);
        const bool was_honest = !fresh && it->second == trust::Verdict::Honest;
        it->second = st.verdict;
        if (was_honest != (st.verdict == trust::Verdict::Honest)) {
            ++changed;
        }
    }
    for (std::size_t w = 0; w < observers.size(); ++w) {
        prev_gr_[observers[w]] = eval.observer_gr(w);
        auto& d = dev_[observers[w]];
        d.link_cost.clear();
        for (const auto& [mac, c] : d.dodag.candidates) {
            const auto si = subject_index.find(mac);
            if (si != subject_index.end() && !trust::is_null(eval.sr(w, si->second))) {
                d.link_cost[mac] = eval.pair(w, si->second).link_cost;
            }
        }
    }
    if (opts_.keep_last_trust_report) {
        last_trust_json_ = eval.to_json();
    }

    // verdict dissemination, abstracted as a flood of the changed entries
    std::size_t listeners = 0;
    for (const auto& d : dev_) {
        listeners += d.booted && !d.root ? 1 : 0;
    }
    const std::size_t dissem = changed * kVerdictEntryBytes;
    overhead_bytes_ += dissem * listeners;
    piggyback_bytes_ += dissem * listeners;
    if (dissem > 0) {
        sim::account_energy(dev_[kRoot].energy, energy_model_, sim::EnergyAction::TxBytes, static_cast<double>(dissem));
        for (auto& d : dev_) {
            if (d.booted && !d.root && accounted(d)) {
                sim::account_energy(d.energy, energy_model_, sim::EnergyAction::RxBytes, static_cast<double>(dissem));
            }
        }
    }
    verdicts_published_ = true;

    for (auto& d : dev_) {
        if (!d.root && !d.attacker && d.booted) {
            select_parent(d);
        }
    }

    // global repair when routes still run through an identity now rated
    // malicious
    bool fresh_bad = false;
    const auto rated = [&](Mac mac, trust::Verdict want) {
        const auto v = verdicts_.find(mac);
        return v != verdicts_.end() && v->second == want;
    };
    for (const auto& [child, parent] : parent_map_) {
        if (rated(child, trust::Verdict::Honest) && rated(parent, trust::Verdict::Malicious)) {
            fresh_bad = bad_parents_seen_.insert(parent).second || fresh_bad;
        }
    }
    if (fresh_bad) {
        auto& root = dev_[kRoot];
        ++root.dodag.version;
        ++version_bumps_;
        parent_map_.clear();
        root.trickle = std::make_unique<rpl::TrickleTimer>(trickle_cfg_);
        start_interval(root);
        send_dio(root);
    }
}

std::vector<bool> World::device_verdicts(std::vector<DeviceOutcome>* details) const {
    const std::size_t n = dev_.size();
    std::vector<std::size_t> observed(n, 0), flagged(n, 0);
    const auto tally = [&](Mac mac, bool bad) {
        const auto o = owner(mac);
        if (!o) {
            return;
        }
        ++observed[*o];
        flagged[*o] += bad ? 1 : 0;
    };
    switch (cfg_.defense) {
        case Defense::UITrust:
            for (const auto& [mac, v] : verdicts_) {
                tally(mac, v == trust::Verdict::Malicious);
            }
            break;
        case Defense::RssiProfile: {
            const auto bad = rssi_.flagged();
            for (Mac mac : rssi_.observed()) {
                tally(mac, bad.contains(mac));
            }
            break;
        }
        case Defense::IdCount:
            for (Mac mac : idcount_.observed()) {
                tally(mac, idcount_.flagged().contains(mac));
            }
            break;
        case Defense::NoneMrhof:
            break;
    }
    std::vector<bool> out(n, false);
    for (std::size_t i = 1; i < n; ++i) {
        out[i] = observed[i] > 0 && 2 * flagged[i] >= observed[i];
        if (details) {
            (*details)[i - 1].identities_observed = observed[i];
            (*details)[i - 1].identities_flagged = flagged[i];
        }
    }
    return out;
}

void World::sample() {
    if (!attacker_devices_.empty()) {
        const auto v = device_verdicts(nullptr);
        std::size_t hit = 0;
        for (std::size_t i : attacker_devices_) {
            hit += v[i] ? 1 : 0;
        }
        const double frac = static_cast<double>(hit) / static_cast<double>(attacker_devices_.size());
        ratio_series_.emplace_back(q_.now().seconds(), frac);
        all_flagged_.emplace_back(q_.now().seconds(), hit == attacker_devices_.size());
    }
    const SimTime next = q_.now() + omega_;
    if (next <= end_) {
        q_.schedule(next, [this] { sample(); });
    }
}

RunDetails World::run() {
    // boots
    for (auto& d : dev_) {
        const SimTime at = d.root ? SimTime{} : SimTime::from_seconds(rng_.uniform(0.0, cfg_.boot_spread_s));
        q_.schedule(at, [this, i = d.idx] { boot(dev_[i]); });
    }
    // attackers start together, each at its own phase
    if (attack_start_ < end_) {
        for (std::size_t idx : attacker_devices_) {
            const double phase = rng_.uniform(0.0, 1.0 / cfg_.attacker.dis_rate_hz);
            q_.schedule(attack_start_ + SimTime::from_seconds(phase), [this, idx] { attack_tick(idx); });
        }
    }
    // root counter: calibration ends and checks begin at the attack start
    if (attack_start_ < end_) {
        q_.schedule(attack_start_, [this] { counter_tick(); });
        // samples just after each trust epoch
        const auto k0 = attack_start_.micros() / omega_.micros() + 1;
        const SimTime first = SimTime::from_micros(k0 * omega_.micros()) + SimTime::from_seconds(1.0);
        if (first <= end_) {
            q_.schedule(first, [this] { sample(); });
        }
    }
    q_.run_until(end_);

    RunDetails det;
    auto& r = det.report;
    r.scenario_id = cfg_.scenario_id;
    r.seed = cfg_.seed;
    r.defense = cfg_.defense;
    r.sybil_ratio = cfg_.sybil_ratio;
    r.devices = cfg_.node_count;
    r.attackers = static_cast<std::uint32_t>(attacker_devices_.size());

    det.devices.resize(dev_.size() - 1);
    const auto verdict = device_verdicts(&det.devices);
    std::vector<bool> truth(dev_.size() - 1), pred(dev_.size() - 1);
    for (std::size_t i = 1; i < dev_.size(); ++i) {
        truth[i - 1] = dev_[i].attacker;
        pred[i - 1] = verdict[i];
        det.devices[i - 1].attacker = dev_[i].attacker;
        det.devices[i - 1].verdict_malicious = verdict[i];
        r.false_positives += (!truth[i - 1] && pred[i - 1]) ? 1 : 0;
        r.false_negatives += (truth[i - 1] && !pred[i - 1]) ? 1 : 0;
    }
    {
        const std::size_t n = truth.size();
        auto t = std::make_unique<bool[]>(n);
        auto p = std::make_unique<bool[]>(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = truth[i];
            p[i] = pred[i];
        }
        r.misdetection_rate = misdetection_rate(std::span<const bool>(p.get(), n), std::span<const bool>(t.get(), n));
    }

    r.data_sent = data_sent_;
    r.data_delivered = data_delivered_;
    r.pdr = pdr(data_delivered_, data_sent_);
    if (!attacker_devices_.empty() && cfg_.defense != Defense::NoneMrhof) {
        r.detection_latency_s = detection_latency(all_flagged_, cfg_.attack_start_s);
    }
    if (alarm_time_) {
        r.alarm_time_s = alarm_time_->seconds();
    }
    r.th_c = counter_.threshold();
    r.overhead_bytes = overhead_bytes_;
    r.piggyback_bytes = piggyback_bytes_;
    r.control_frames = control_frames_;
    double energy = 0.0;
    for (const auto& d : dev_) {
        if (accounted(d)) {
            energy += d.energy.total();
        }
    }
    r.energy_j = energy;
    if (cfg_.defense != Defense::NoneMrhof) {
        r.detection_ratio_timeseries = ratio_series_;
    }
    r.message_kinds.assign(kinds_.begin(), kinds_.end());
    r.trust_epochs = trust_epochs_;
    r.version_bumps = version_bumps_;
    for (const auto& d : dev_) {
        r.pending_evictions += d.dodag.pending.evictions();
    }

    // UIDs as seen by every ledger, per physical device
    for (const auto& d : dev_) {
        if (!d.observer) {
            continue;
        }
        for (const auto& [mac, e] : d.observer->ledger().entries()) {
            const auto o = owner(mac);
            if (!o || *o == kRoot) {
                continue;
            }
            for (std::size_t t = 0; t < wire::kUidTypeCount; ++t) {
                if (e.uid_seen[t]) {
                    det.devices[*o - 1].observed_uids[t].insert(*e.uid_seen[t]);
                }
            }
        }
    }
    for (const auto& dv : det.devices) {
        for (const auto& s : dv.observed_uids) {
            r.uid_constancy_violations += s.size() > 1 ? 1 : 0;
        }
    }
    r.trace_records = trace_.records();
    r.trace_digest = trace_.digest();
    r.placement_attempts = placement_attempts_;
    det.last_trust_report = last_trust_json_;
    if (forced_collision_attacker_ != SIZE_MAX) {
        det.forced_collision_attacker = forced_collision_attacker_ - 1;
    }
    return det;
}

}  // namespace

RunDetails run_scenario_detailed(const ScenarioConfig& cfg, const RunOptions& options) {
    World w(cfg, options);
    return w.run();
}

MetricsReport run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
    return run_scenario_detailed(cfg, options).report;
}

}  // namespace uitrust::harness
