#include "uitrust/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace uitrust::harness {

const char* to_string(Defense d) {
    switch (d) {
        case Defense::UITrust: return "uitrust";
        case Defense::RssiProfile: return "rssi_profile";
        case Defense::IdCount: return "id_count";
        case Defense::NoneMrhof: return "none";
    }
    return "?";
}

Defense parse_defense(std::string_view s) {
    if (s == "uitrust") return Defense::UITrust;
    if (s == "rssi_profile") return Defense::RssiProfile;
    if (s == "id_count") return Defense::IdCount;
    if (s == "none") return Defense::NoneMrhof;
    throw ConfigError("unknown defense '" + std::string(s) + "' (uitrust, rssi_profile, id_count, none)");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(std::string_view v) {
    // std::from_chars for double is available in libstdc++ 11
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end || !std::isfinite(out)) {
        throw ConfigError("expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t to_u64(std::string_view v) {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) {
        throw ConfigError("expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint32_t to_u32(std::string_view v) {
    const auto x = to_u64(v);
    if (x > UINT32_MAX) {
        throw ConfigError("integer out of range: '" + std::string(v) + "'");
    }
    return static_cast<std::uint32_t>(x);
}

bool to_bool(std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("expected true or false, got '" + std::string(v) + "'");
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Field {
    const char* key;
    std::function<void(ScenarioConfig&, std::string_view)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

#define UITRUST_DOUBLE(name, member)                                            \
    Field {                                                                     \
        name, [](ScenarioConfig& c, std::string_view v) { c.member = to_double(v); }, \
            [](const ScenarioConfig& c) { return fmt(c.member); }               \
    }
#define UITRUST_U32(name, member)                                               \
    Field {                                                                     \
        name, [](ScenarioConfig& c, std::string_view v) { c.member = to_u32(v); },  \
            [](const ScenarioConfig& c) { return std::to_string(c.member); }    \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"scenario_id", [](ScenarioConfig& c, std::string_view v) { c.scenario_id = std::string(v); },
         [](const ScenarioConfig& c) { return c.scenario_id; }},
        UITRUST_U32("node_count", node_count),
        UITRUST_DOUBLE("sybil_ratio", sybil_ratio),
        UITRUST_DOUBLE("tx_range_m", tx_range_m),
        UITRUST_DOUBLE("forwarding_error_rate", forwarding_error_rate),
        UITRUST_DOUBLE("path_loss_exponent", path_loss_exponent),
        UITRUST_DOUBLE("ref_loss_db", ref_loss_db),
        UITRUST_DOUBLE("shadowing_sigma_db", shadowing_sigma_db),
        UITRUST_DOUBLE("honest_tx_power_dbm", honest_tx_power_dbm),
        UITRUST_DOUBLE("target_degree", target_degree),
        {"field_side_m",
         [](ScenarioConfig& c, std::string_view v) {
             if (v == "auto") {
                 c.field_side_m.reset();
             } else {
                 c.field_side_m = to_double(v);
             }
         },
         [](const ScenarioConfig& c) { return c.field_side_m ? fmt(*c.field_side_m) : std::string("auto"); }},
        UITRUST_DOUBLE("duration_s", duration_s),
        UITRUST_DOUBLE("attack_start_s", attack_start_s),
        UITRUST_DOUBLE("calibration_start_s", calibration_start_s),
        UITRUST_DOUBLE("boot_spread_s", boot_spread_s),
        UITRUST_DOUBLE("dis_retry_s", dis_retry_s),
        UITRUST_DOUBLE("data_period_s", data_period_s),
        {"seed", [](ScenarioConfig& c, std::string_view v) { c.seed = to_u64(v); },
         [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
        UITRUST_DOUBLE("trickle_imin_s", trickle_imin_s),
        UITRUST_U32("trickle_doublings", trickle_doublings),
        UITRUST_U32("trickle_k", trickle_k),
        UITRUST_U32("rank_unit", rank_unit),
        UITRUST_U32("hysteresis", hysteresis),
        UITRUST_DOUBLE("etx_alpha", etx_alpha),
        UITRUST_U32("pending_capacity", pending_capacity),
        UITRUST_DOUBLE("candidate_expiry_s", candidate_expiry_s),
        {"defense", [](ScenarioConfig& c, std::string_view v) { c.defense = parse_defense(v); },
         [](const ScenarioConfig& c) { return std::string(to_string(c.defense)); }},
        UITRUST_DOUBLE("query_interval_s", query_interval_s),
        UITRUST_DOUBLE("th_r_s", th_r_s),
        UITRUST_DOUBLE("counter_window_s", counter_window_s),
        {"th_c",
         [](ScenarioConfig& c, std::string_view v) {
             if (v == "auto") {
                 c.th_c.reset();
             } else {
                 c.th_c = to_double(v);
             }
         },
         [](const ScenarioConfig& c) { return c.th_c ? fmt(*c.th_c) : std::string("auto"); }},
        UITRUST_DOUBLE("th_c_floor", th_c_floor),
        UITRUST_DOUBLE("neighbor_window_s", neighbor_window_s),
        UITRUST_DOUBLE("active_subject_window_s", active_subject_window_s),
        UITRUST_DOUBLE("report_min_change", report_min_change),
        UITRUST_DOUBLE("gamma", trust.gamma),
        UITRUST_DOUBLE("theta", trust.theta),
        UITRUST_DOUBLE("lambda", trust.lambda),
        UITRUST_DOUBLE("quorum_cut", trust.quorum_cut),
        {"credibility_reference",
         [](ScenarioConfig& c, std::string_view v) {
             if (v == "br_j") {
                 c.trust.credibility_uses_br_u = false;
             } else if (v == "br_u") {
                 c.trust.credibility_uses_br_u = true;
             } else {
                 throw ConfigError("credibility_reference must be br_j or br_u");
             }
         },
         [](const ScenarioConfig& c) { return std::string(c.trust.credibility_uses_br_u ? "br_u" : "br_j"); }},
        UITRUST_DOUBLE("rssi_epsilon_db", rssi_epsilon_db),
        UITRUST_DOUBLE("rssi_proximity_s", rssi_proximity_s),
        UITRUST_U32("rssi_min_samples", rssi_min_samples),
        UITRUST_U32("rssi_min_common_observers", rssi_min_common_observers),
        UITRUST_DOUBLE("rssi_min_observer_overlap", rssi_min_observer_overlap),
        UITRUST_DOUBLE("idcount_window_s", idcount_window_s),
        UITRUST_DOUBLE("idcount_factor", idcount_factor),
        UITRUST_DOUBLE("dis_rate_hz", attacker.dis_rate_hz),
        {"mac_pool_size", [](ScenarioConfig& c, std::string_view v) { c.attacker.mac_pool_size = to_u64(v); },
         [](const ScenarioConfig& c) { return std::to_string(c.attacker.mac_pool_size); }},
        UITRUST_DOUBLE("identity_switch_period_s", attacker.identity_switch_period_s),
        {"power_levels_dbm",
         [](ScenarioConfig& c, std::string_view v) { c.attacker.power_levels_dbm = parse_double_list(v); },
         [](const ScenarioConfig& c) {
             std::string s;
             for (double p : c.attacker.power_levels_dbm) {
                 s += (s.empty() ? "" : ",") + fmt(p);
             }
             return s;
         }},
        {"query_behavior",
         [](ScenarioConfig& c, std::string_view v) {
             try {
                 c.attacker.query_behavior = adversary::QueryBehavior::parse(std::string(v));
             } catch (const std::invalid_argument& e) {
                 throw ConfigError(e.what());
             }
         },
         [](const ScenarioConfig& c) {
             const auto& b = c.attacker.query_behavior;
             switch (b.mode) {
                 case adversary::QueryBehavior::Mode::Delay: return "delay:" + fmt(b.delay_factor);
                 case adversary::QueryBehavior::Mode::Ignore: return "ignore:" + fmt(b.ignore_prob);
                 default: return b.to_string();
             }
         }},
        UITRUST_DOUBLE("response_memory_s", attacker.response_memory_s),
        {"forced_uid_collision", [](ScenarioConfig& c, std::string_view v) { c.forced_uid_collision = to_bool(v); },
         [](const ScenarioConfig& c) { return std::string(c.forced_uid_collision ? "true" : "false"); }},
    };
    return table;
}

#undef UITRUST_DOUBLE
#undef UITRUST_U32

}  // namespace

std::uint32_t ScenarioConfig::attacker_count() const {
    return static_cast<std::uint32_t>(std::llround(sybil_ratio * static_cast<double>(node_count)));
}

double ScenarioConfig::field_side() const {
    if (field_side_m) {
        return *field_side_m;
    }
    // average degree ~ N * pi r^2 / side^2, ignoring border effects
    return tx_range_m * std::sqrt(M_PI * static_cast<double>(node_count) / target_degree);
}

void ScenarioConfig::validate() const {
    const auto need = [](bool ok, const char* what) {
        if (!ok) {
            throw ConfigError(what);
        }
    };
    need(node_count >= 1, "node_count must be >= 1");
    need(sybil_ratio >= 0.0 && sybil_ratio <= 1.0, "sybil_ratio must lie in [0,1]");
    need(tx_range_m > 0.0, "tx_range_m must be > 0");
    need(forwarding_error_rate >= 0.0 && forwarding_error_rate <= 1.0, "forwarding_error_rate must lie in [0,1]");
    need(shadowing_sigma_db >= 0.0, "shadowing_sigma_db must be >= 0");
    need(target_degree > 0.0, "target_degree must be > 0");
    need(!field_side_m || *field_side_m > 0.0, "field_side_m must be > 0");
    need(duration_s > 0.0, "duration_s must be > 0");
    need(calibration_start_s >= 0.0, "calibration_start_s must be >= 0");
    need(attack_start_s >= calibration_start_s + counter_window_s,
         "attack_start_s must leave at least one counter window after calibration_start_s");
    need(boot_spread_s >= 0.0, "boot_spread_s must be >= 0");
    need(dis_retry_s > 0.0, "dis_retry_s must be > 0");
    need(data_period_s > 0.0, "data_period_s must be > 0");
    need(trickle_imin_s > 0.0, "trickle_imin_s must be > 0");
    need(trickle_doublings <= 20, "trickle_doublings must be <= 20");
    need(rank_unit >= 1 && rank_unit <= 4096, "rank_unit must lie in [1,4096]");
    need(etx_alpha > 0.0 && etx_alpha <= 1.0, "etx_alpha must lie in (0,1]");
    need(candidate_expiry_s > 0.0, "candidate_expiry_s must be > 0");
    need(query_interval_s > 0.0, "query_interval_s must be > 0");
    need(th_r_s > 0.0 && 2.0 * th_r_s < query_interval_s, "th_r_s must be > 0 and 2*th_r_s < query_interval_s");
    need(counter_window_s >= 1.0 && std::floor(counter_window_s) == counter_window_s,
         "counter_window_s must be a whole number of seconds >= 1");
    need(!th_c || *th_c >= 0.0, "th_c must be >= 0");
    need(neighbor_window_s > 0.0, "neighbor_window_s must be > 0");
    need(report_min_change >= 0.0 && report_min_change <= 1.0, "report_min_change must lie in [0,1]");
    need(active_subject_window_s > 0.0, "active_subject_window_s must be > 0");
    need(rssi_epsilon_db >= 0.0, "rssi_epsilon_db must be >= 0");
    need(rssi_proximity_s >= 0.0, "rssi_proximity_s must be >= 0");
    need(rssi_min_observer_overlap >= 0.0 && rssi_min_observer_overlap <= 1.0, "rssi_min_observer_overlap must lie in [0,1]");
    need(rssi_min_common_observers >= 1, "rssi_min_common_observers must be >= 1");
    need(idcount_window_s > 0.0 && idcount_factor > 0.0, "idcount window and factor must be > 0");
    try {
        trust.validate();
        attacker.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ScenarioConfig parse_config(std::string_view text) {
    ScenarioConfig c;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const auto where = "line " + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos) {
            throw ConfigError(where + "expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto& table = fields();
        const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return key == f.key; });
        if (it == table.end()) {
            throw ConfigError(where + "unknown key '" + std::string(key) + "'");
        }
        if (!seen.emplace(key).second) {
            throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
        }
        if (value.empty()) {
            throw ConfigError(where + "missing value for '" + std::string(key) + "'");
        }
        try {
            it->set(c, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + std::string(key) + ": " + e.what());
        }
    }
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_text(const ScenarioConfig& c) {
    std::string out;
    for (const auto& f : fields()) {
        out += f.key;
        out += " = ";
        out += f.get(c);
        out += '\n';
    }
    return out;
}

std::vector<double> parse_double_list(std::string_view s) {
    std::vector<double> out;
    while (true) {
        const auto comma = s.find(',');
        const auto item = trim(s.substr(0, comma));
        if (item.empty()) {
            throw ConfigError("empty item in list");
        }
        out.push_back(to_double(item));
        if (comma == std::string_view::npos) {
            break;
        }
        s = s.substr(comma + 1);
    }
    return out;
}

std::vector<Defense> parse_defense_list(std::string_view s) {
    std::vector<Defense> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(parse_defense(trim(s.substr(0, comma))));
        if (comma == std::string_view::npos) {
            break;
        }
        s = s.substr(comma + 1);
    }
    return out;
}

}  // namespace uitrust::harness
