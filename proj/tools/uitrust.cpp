#include "uitrust/harness/config.hpp"
#include "uitrust/harness/metrics.hpp"
#include "uitrust/harness/simulation.hpp"
#include "uitrust/harness/sweep.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace {

namespace fs = std::filesystem;
using namespace uitrust::harness;

enum Exit { kOk = 0, kConfig = 2, kTopology = 3, kIo = 4 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int cmd_run(const std::string& config, std::uint64_t seed, const std::string& out_path, const std::string& trace_path) {
    ScenarioConfig cfg = parse_config(read_file(config));
    cfg.seed = seed;
    cfg.validate();

    std::ofstream trace;
    RunOptions opts;
    if (!trace_path.empty()) {
        trace = open_out(trace_path);
        opts.trace = &trace;
    }
    std::ofstream out = open_out(out_path);
    const MetricsReport r = run_scenario(cfg, opts);
    if (ends_with(out_path, ".csv")) {
        write_csv(out, std::span(&r, 1));
    } else {
        out << to_json(r) << '\n';
    }
    finish(out, out_path);
    if (opts.trace) {
        finish(trace, trace_path);
    }
    return kOk;
}

int cmd_sweep(const std::string& config, std::uint32_t seeds, const std::string& ratios, const std::string& defenses,
              const std::string& out_dir) {
    SweepPlan plan;
    plan.base = parse_config(read_file(config));
    plan.seeds = seeds;
    plan.ratios = parse_double_list(ratios);
    plan.defenses = parse_defense_list(defenses);
    plan.base.validate();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create '" + out_dir + "': " + ec.message());
    }
    const fs::path jsonl = fs::path(out_dir) / "runs.jsonl";
    const fs::path csv = fs::path(out_dir) / "results.csv";
    // fail before the long part if the directory is not writable
    std::ofstream jl = open_out(jsonl);
    std::ofstream cs = open_out(csv);

    const auto total = plan.seeds * plan.ratios.size() * plan.defenses.size();
    std::size_t done = 0;
    const auto reports = run_sweep(plan, [&](const MetricsReport& r) {
        ++done;
        std::fprintf(stderr, "[%zu/%zu] ratio=%g defense=%s seed=%llu misdetection=%.3f pdr=%.3f\n", done, total,
                     r.sybil_ratio, to_string(r.defense), static_cast<unsigned long long>(r.seed), r.misdetection_rate,
                     r.pdr);
    });
    write_jsonl(jl, reports);
    write_csv(cs, reports);
    finish(jl, jsonl);
    finish(cs, csv);
    return kOk;
}

int cmd_report(const std::string& in_dir, const std::string& format, bool summary) {
    const fs::path jsonl = fs::path(in_dir) / "runs.jsonl";
    std::istringstream in(read_file(jsonl.string()));
    std::vector<MetricsReport> reports;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) {
            continue;
        }
        try {
            reports.push_back(report_from_json(line));
        } catch (const std::exception& e) {
            throw IoError(jsonl.string() + ":" + std::to_string(n) + ": malformed record: " + e.what());
        }
    }
    sort_reports(reports);
    if (summary) {
        write_summary_csv(std::cout, summarize(reports));
    } else if (format == "csv") {
        write_csv(std::cout, reports);
    } else {
        write_jsonl(std::cout, reports);
    }
    std::cout.flush();
    if (!std::cout) {
        throw IoError("write to stdout failed");
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic RPL simulator for power-controlled Sybil attacks and trust-based defenses"};
    app.require_subcommand(1);

    std::string config, out, trace, ratios, defenses, in_dir, format = "csv";
    std::uint64_t seed = 0;
    std::uint32_t seeds = 1;
    bool summary = false;

    auto* run = app.add_subcommand("run", "Run one scenario and write its metrics");
    run->add_option("--config", config, "Scenario config file")->required();
    run->add_option("--seed", seed, "Seed (replaces the one in the config)")->required();
    run->add_option("--out", out, "Output file (.csv for CSV, JSON otherwise)")->required();
    run->add_option("--trace", trace, "Optional NDJSON event trace");

    auto* sweep = app.add_subcommand("sweep", "Run seeds x ratios x defenses");
    sweep->add_option("--config", config, "Base scenario config file")->required();
    sweep->add_option("--seeds", seeds, "Number of seeds, counting up from the config seed")->required();
    sweep->add_option("--ratios", ratios, "Comma-separated Sybil ratios")->required();
    sweep->add_option("--defenses", defenses, "Comma-separated defenses")->required();
    sweep->add_option("--out", out, "Output directory")->required();

    auto* report = app.add_subcommand("report", "Print the runs of a sweep directory");
    report->add_option("--in", in_dir, "Sweep output directory")->required();
    report->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    report->add_flag("--summary", summary, "Per (defense, ratio) means as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*run) {
            return cmd_run(config, seed, out, trace);
        }
        if (*sweep) {
            return cmd_sweep(config, seeds, ratios, defenses, out);
        }
        return cmd_report(in_dir, format, summary);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const TopologyError& e) {
        std::cerr << "topology error: " << e.what() << '\n';
        return kTopology;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    }
}
