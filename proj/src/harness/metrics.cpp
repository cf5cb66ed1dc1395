#include "uitrust/harness/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

namespace uitrust::harness {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

}  // namespace

double misdetection_rate(std::span<const bool> verdict_malicious, std::span<const bool> truth_malicious) {
    if (verdict_malicious.size() != truth_malicious.size()) {
        throw std::invalid_argument("misdetection_rate: size mismatch");
    }
    if (truth_malicious.empty()) {
        return 0.0;
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth_malicious.size(); ++i) {
        wrong += verdict_malicious[i] != truth_malicious[i] ? 1 : 0;
    }
    return static_cast<double>(wrong) / static_cast<double>(truth_malicious.size());
}

double pdr(std::uint64_t delivered, std::uint64_t originated) {
    if (delivered > originated) {
        throw std::invalid_argument("pdr: delivered exceeds originated");
    }
    return originated == 0 ? 0.0 : static_cast<double>(delivered) / static_cast<double>(originated);
}

std::optional<double> detection_latency(std::span<const std::pair<double, bool>> samples, double attack_start_s) {
    for (const auto& [t, all] : samples) {
        if (all && t >= attack_start_s) {
            return t - attack_start_s;
        }
    }
    return std::nullopt;
}

std::string csv_header() {
    return "scenario_id,seed,defense,sybil_ratio,misdetection_rate,pdr,detection_latency_s,overhead_bytes,energy_j";
}

void write_csv(std::ostream& out, std::span<const MetricsReport> reports) {
    out << csv_header() << '\n';
    for (const auto& r : reports) {
        out << csv_field(r.scenario_id) << ',' << r.seed << ',' << to_string(r.defense) << ',' << num(r.sybil_ratio)
            << ',' << num(r.misdetection_rate) << ',' << num(r.pdr) << ','
            << (r.detection_latency_s ? num(*r.detection_latency_s) : std::string()) << ',' << r.overhead_bytes
            << ',' << num(r.energy_j) << '\n';
    }
}

std::string to_json(const MetricsReport& r) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["scenario_id"] = r.scenario_id;
    j["seed"] = r.seed;
    j["defense"] = to_string(r.defense);
    j["sybil_ratio"] = r.sybil_ratio;
    j["devices"] = r.devices;
    j["attackers"] = r.attackers;
    j["false_positives"] = r.false_positives;
    j["false_negatives"] = r.false_negatives;
    j["misdetection_rate"] = r.misdetection_rate;
    j["data_sent"] = r.data_sent;
    j["data_delivered"] = r.data_delivered;
    j["pdr"] = r.pdr;
    j["detection_latency_s"] = r.detection_latency_s ? ordered_json(*r.detection_latency_s) : ordered_json(nullptr);
    j["alarm_time_s"] = r.alarm_time_s ? ordered_json(*r.alarm_time_s) : ordered_json(nullptr);
    j["th_c"] = r.th_c;
    j["overhead_bytes"] = r.overhead_bytes;
    j["piggyback_bytes"] = r.piggyback_bytes;
    j["control_frames"] = r.control_frames;
    j["energy_j"] = r.energy_j;
    ordered_json ts = ordered_json::array();
    for (const auto& [t, f] : r.detection_ratio_timeseries) {
        ts.push_back({t, f});
    }
    j["detection_ratio_timeseries"] = std::move(ts);
    j["message_kinds"] = r.message_kinds;
    j["trust_epochs"] = r.trust_epochs;
    j["version_bumps"] = r.version_bumps;
    j["pending_evictions"] = r.pending_evictions;
    j["uid_constancy_violations"] = r.uid_constancy_violations;
    j["trace_records"] = r.trace_records;
    j["trace_digest"] = r.trace_digest;
    j["placement_attempts"] = r.placement_attempts;
    return j.dump();
}

void write_jsonl(std::ostream& out, std::span<const MetricsReport> reports) {
    for (const auto& r : reports) {
        out << to_json(r) << '\n';
    }
}

MetricsReport report_from_json(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    MetricsReport r;
    const auto opt = [&](const char* k) -> std::optional<double> {
        if (!j.contains(k) || j[k].is_null()) {
            return std::nullopt;
        }
        return j[k].get<double>();
    };
    r.scenario_id = j.at("scenario_id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.defense = parse_defense(j.at("defense").get<std::string>());
    r.sybil_ratio = j.at("sybil_ratio").get<double>();
    r.devices = j.value("devices", 0U);
    r.attackers = j.value("attackers", 0U);
    r.false_positives = j.value("false_positives", 0U);
    r.false_negatives = j.value("false_negatives", 0U);
    r.misdetection_rate = j.at("misdetection_rate").get<double>();
    r.data_sent = j.value("data_sent", std::uint64_t{0});
    r.data_delivered = j.value("data_delivered", std::uint64_t{0});
    r.pdr = j.at("pdr").get<double>();
    r.detection_latency_s = opt("detection_latency_s");
    r.alarm_time_s = opt("alarm_time_s");
    r.th_c = j.value("th_c", 0.0);
    r.overhead_bytes = j.at("overhead_bytes").get<std::uint64_t>();
    r.piggyback_bytes = j.value("piggyback_bytes", std::uint64_t{0});
    r.control_frames = j.value("control_frames", std::uint64_t{0});
    r.energy_j = j.at("energy_j").get<double>();
    if (j.contains("detection_ratio_timeseries")) {
        for (const auto& p : j["detection_ratio_timeseries"]) {
            r.detection_ratio_timeseries.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        }
    }
    if (j.contains("message_kinds")) {
        r.message_kinds = j["message_kinds"].get<std::vector<std::string>>();
    }
    r.trust_epochs = j.value("trust_epochs", 0U);
    r.version_bumps = j.value("version_bumps", 0U);
    r.pending_evictions = j.value("pending_evictions", std::uint64_t{0});
    r.uid_constancy_violations = j.value("uid_constancy_violations", 0U);
    r.trace_records = j.value("trace_records", std::uint64_t{0});
    r.trace_digest = j.value("trace_digest", std::uint64_t{0});
    r.placement_attempts = j.value("placement_attempts", 0U);
    return r;
}

void sort_reports(std::vector<MetricsReport>& reports) {
    std::stable_sort(reports.begin(), reports.end(), [](const MetricsReport& a, const MetricsReport& b) {
        return std::tuple(a.scenario_id, static_cast<int>(a.defense), a.sybil_ratio, a.seed) <
               std::tuple(b.scenario_id, static_cast<int>(b.defense), b.sybil_ratio, b.seed);
    });
}

std::vector<SummaryRow> summarize(std::vector<MetricsReport> reports) {
    sort_reports(reports);
    std::vector<SummaryRow> rows;
    for (const auto& r : reports) {
        if (rows.empty() || rows.back().scenario_id != r.scenario_id || rows.back().defense != r.defense ||
            rows.back().sybil_ratio != r.sybil_ratio) {
            SummaryRow s;
            s.scenario_id = r.scenario_id;
            s.defense = r.defense;
            s.sybil_ratio = r.sybil_ratio;
            rows.push_back(s);
        }
        auto& s = rows.back();
        ++s.runs;
        s.misdetection_rate += r.misdetection_rate;
        s.pdr += r.pdr;
        s.overhead_bytes += static_cast<double>(r.overhead_bytes);
        s.energy_j += r.energy_j;
        if (r.detection_latency_s) {
            s.detection_latency_s = s.detection_latency_s.value_or(0.0) + *r.detection_latency_s;
            ++s.detected_runs;
        }
    }
    for (auto& s : rows) {
        const double n = static_cast<double>(s.runs);
        s.misdetection_rate /= n;
        s.pdr /= n;
        s.overhead_bytes /= n;
        s.energy_j /= n;
        if (s.detection_latency_s) {
            *s.detection_latency_s /= static_cast<double>(s.detected_runs);
        }
    }
    return rows;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
    out << "scenario_id,defense,sybil_ratio,runs,misdetection_rate,pdr,detection_latency_s,detected_runs,"
           "overhead_bytes,energy_j\n";
    for (const auto& s : rows) {
        out << csv_field(s.scenario_id) << ',' << to_string(s.defense) << ',' << num(s.sybil_ratio) << ',' << s.runs
            << ',' << num(s.misdetection_rate) << ',' << num(s.pdr) << ','
            << (s.detection_latency_s ? num(*s.detection_latency_s) : std::string()) << ',' << s.detected_runs
            << ',' << num(s.overhead_bytes) << ',' << num(s.energy_j) << '\n';
    }
}

}  // namespace uitrust::harness
