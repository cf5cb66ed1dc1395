#pragma once

#include "uitrust/harness/config.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace uitrust::harness {

struct MetricsReport {
    std::string scenario_id;
    std::uint64_t seed = 0;
    Defense defense = Defense::NoneMrhof;
    double sybil_ratio = 0.0;

    std::uint32_t devices = 0;
    std::uint32_t attackers = 0;
    std::uint32_t false_positives = 0;
    std::uint32_t false_negatives = 0;
    double misdetection_rate = 0.0;

    std::uint64_t data_sent = 0;
    std::uint64_t data_delivered = 0;
    double pdr = 0.0;

    std::optional<double> detection_latency_s;
    std::optional<double> alarm_time_s;
    double th_c = 0.0;

    std::uint64_t overhead_bytes = 0;
    std::uint64_t piggyback_bytes = 0;
    std::uint64_t control_frames = 0;
    double energy_j = 0.0;

    std::vector<std::pair<double, double>> detection_ratio_timeseries;
    std::vector<std::string> message_kinds;

    std::uint32_t trust_epochs = 0;
    std::uint32_t version_bumps = 0;
    std::uint64_t pending_evictions = 0;
    std::uint32_t uid_constancy_violations = 0;
    std::uint64_t trace_records = 0;
    std::uint64_t trace_digest = 0;
    std::uint32_t placement_attempts = 0;
};

// (FP + FN) / devices; truth and verdict are per physical device, true
// meaning malicious.
double misdetection_rate(std::span<const bool> verdict_malicious, std::span<const bool> truth_malicious);

double pdr(std::uint64_t delivered, std::uint64_t originated);

// First sample where every attacker device is flagged, relative to the
// attack start. Samples are (time, all_flagged) in time order.
std::optional<double> detection_latency(std::span<const std::pair<double, bool>> samples, double attack_start_s);

// One row per report, in the order given.
void write_csv(std::ostream& out, std::span<const MetricsReport> reports);
void write_jsonl(std::ostream& out, std::span<const MetricsReport> reports);

std::string csv_header();
std::string to_json(const MetricsReport& r);
MetricsReport report_from_json(const std::string& line);

// Stable order for aggregation: scenario, defense, ratio, seed.
void sort_reports(std::vector<MetricsReport>& reports);

struct SummaryRow {
    std::string scenario_id;
    Defense defense = Defense::NoneMrhof;
    double sybil_ratio = 0.0;
    std::size_t runs = 0;
    double misdetection_rate = 0.0;
    double pdr = 0.0;
    std::optional<double> detection_latency_s;  // mean over runs that detected
    std::size_t detected_runs = 0;
    double overhead_bytes = 0.0;
    double energy_j = 0.0;
};
std::vector<SummaryRow> summarize(std::vector<MetricsReport> reports);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace uitrust::harness
