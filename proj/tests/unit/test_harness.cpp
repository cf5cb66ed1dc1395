#include "uitrust/harness/baselines.hpp"
#include "uitrust/harness/config.hpp"
#include "uitrust/harness/metrics.hpp"
#include "uitrust/harness/simulation.hpp"
#include "uitrust/harness/sweep.hpp"
#include "uitrust/sim/radio.hpp"

#include <doctest.h>

#include <sstream>

using namespace uitrust;
using namespace uitrust::harness;
using sim::seconds;

namespace {

ScenarioConfig small(double ratio, Defense d) {
    auto c = parse_config(
        "node_count = 20\n"
        "duration_s = 600\n"
        "calibration_start_s = 100\n"
        "attack_start_s = 300\n");
    c.sybil_ratio = ratio;
    c.defense = d;
    return c;
}

}  // namespace

TEST_CASE("config: defaults, round trip, rejection") {
    const auto c = parse_config("# comment\nsybil_ratio = 0.3\ndefense = rssi_profile\n");
    CHECK(c.sybil_ratio == 0.3);
    CHECK(c.defense == Defense::RssiProfile);
    CHECK(c.node_count == 100);
    CHECK(parse_config(to_text(c)).sybil_ratio == 0.3);
    CHECK(to_text(parse_config(to_text(c))) == to_text(c));

    CHECK_THROWS_AS(parse_config("colour = blue\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("seed = 1\nseed = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("sybil_ratio = lots\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("sybil_ratio = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("defense = moat\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/dir/x.conf"), std::exception);

    CHECK(parse_double_list("0.1,0.3") == std::vector<double>{0.1, 0.3});
    CHECK(parse_defense_list("uitrust,none") == std::vector<Defense>{Defense::UITrust, Defense::NoneMrhof});
}

TEST_CASE("config: attacker count follows the ratio") {
    auto c = parse_config("node_count = 100\nsybil_ratio = 0.3\n");
    CHECK(c.attacker_count() == 30);
    c.sybil_ratio = 0.0;
    CHECK(c.attacker_count() == 0);
}

TEST_CASE("metrics: misdetection, pdr, latency") {
    const bool all_ok[] = {true, false, false};
    CHECK(misdetection_rate(all_ok, all_ok) == 0.0);
    bool truth[10] = {true};
    bool verdict[10] = {};
    CHECK(misdetection_rate(verdict, truth) == doctest::Approx(0.1));
    CHECK(pdr(0, 10) == 0.0);
    CHECK(pdr(10, 10) == 1.0);

    CHECK_FALSE(detection_latency({}, 100).has_value());
    const std::vector<std::pair<double, bool>> one{{200, false}, {300, true}};
    CHECK(detection_latency(one, 100) == 200.0);
    // attackers flagged at 300 and 400: all-flagged first holds at 400
    const std::vector<std::pair<double, bool>> two{{300, false}, {400, true}, {500, true}};
    CHECK(detection_latency(two, 100) == 300.0);
}

TEST_CASE("metrics: csv export") {
    std::ostringstream empty;
    write_csv(empty, {});
    CHECK(empty.str() == csv_header() + "\n");

    MetricsReport a, b;
    a.seed = 2;
    b.seed = 1;
    b.detection_latency_s = 12.5;
    const std::vector<MetricsReport> rows{a, b};
    std::ostringstream out;
    write_csv(out, rows);
    std::istringstream in(out.str());
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    REQUIRE(lines.size() == 3);
    CHECK(lines[1].rfind(",2,", 0) == 0);
    CHECK(lines[2].rfind(",1,", 0) == 0);

    const auto back = report_from_json(to_json(b));
    CHECK(back.detection_latency_s == 12.5);
    CHECK(to_json(back) == to_json(b));
}

TEST_CASE("rssi profile baseline") {
    sim::RadioConfig radio;
    const auto feed = [&](RssiProfileDetector& d, Mac id, double t0, double power, double d0, double d1) {
        for (int k = 0; k < 5; ++k) {
            const auto t = seconds(t0 + k);
            d.observe(0, id, sim::rssi_at(power, d0, radio), t);
            d.observe(1, id, sim::rssi_at(power, d1, radio), t);
        }
    };
    RssiProfileDetector constant;
    feed(constant, 0xA, 0, 0.0, 10, 20);
    feed(constant, 0xB, 5, 0.0, 10, 20);
    CHECK(constant.flagged() == std::set<Mac>{0xA, 0xB});

    RssiProfileDetector shifting;
    feed(shifting, 0xA, 0, 0.0, 10, 20);
    feed(shifting, 0xB, 5, -10.0, 10, 20);
    CHECK(shifting.flagged().empty());
    CHECK(shifting.observed().size() == 2);

    RssiProfileDetector honest;
    feed(honest, 0xA, 0, 0.0, 10, 15);
    feed(honest, 0xB, 5, 0.0, 30, 5);
    CHECK(honest.flagged().empty());
}

TEST_CASE("id count baseline") {
    const double th = IdCountDetector::default_threshold(3.0, 4.0, 60.0);
    CHECK(th == 45.0);
    IdCountDetector d(seconds(60), th);
    for (int k = 0; k < 150; ++k) {
        d.observe(0xBAD, seconds(k * 0.4));
    }
    for (int k = 0; k < 15; ++k) {
        d.observe(0x600D, seconds(k * 4.0));
    }
    for (int k = 0; k < 60; ++k) {
        d.observe(0x1000 + k / 10, seconds(k));
    }
    CHECK(d.flagged() == std::set<Mac>{0xBAD});
    CHECK(d.observed().size() == 8);
}

TEST_CASE("simulation: no attackers, no defense") {
    const auto r = run_scenario(small(0.0, Defense::NoneMrhof));
    CHECK(r.attackers == 0);
    CHECK(r.misdetection_rate == 0.0);
    CHECK_FALSE(r.detection_latency_s.has_value());
    CHECK(r.pdr > 0.5);
    CHECK(r.trace_records > 0);
}

TEST_CASE("simulation: lossless and attack-free delivers every packet") {
    auto c = small(0.0, Defense::NoneMrhof);
    c.forwarding_error_rate = 0.0;
    const auto r = run_scenario(c);
    CHECK(r.data_sent > 0);
    CHECK(r.pdr == 1.0);
}

TEST_CASE("simulation: same seed, same report") {
    const auto c = small(0.2, Defense::UITrust);
    const auto a = run_scenario(c);
    const auto b = run_scenario(c);
    CHECK(to_json(a) == to_json(b));
    CHECK(a.trace_digest == b.trace_digest);
    auto other = c;
    other.seed = 2;
    CHECK(run_scenario(other).trace_digest != a.trace_digest);
}

TEST_CASE("simulation: undefended attackers all go undetected") {
    const auto r = run_scenario(small(0.2, Defense::NoneMrhof));
    CHECK(r.attackers == 4);
    CHECK(r.false_negatives == r.attackers);
    CHECK_FALSE(r.detection_latency_s.has_value());
}

TEST_CASE("simulation: impossible topology") {
    auto c = small(0.0, Defense::NoneMrhof);
    c.tx_range_m = 1.0;
    c.field_side_m = 500.0;
    CHECK_THROWS_AS(run_scenario(c), TopologyError);
}

TEST_CASE("sweep: run order and rejection of empty plans") {
    SweepPlan plan;
    plan.base = small(0.0, Defense::NoneMrhof);
    plan.base.duration_s = 400;
    plan.seeds = 2;
    plan.ratios = {0.0};
    plan.defenses = {Defense::NoneMrhof};
    int calls = 0;
    const auto rows = run_sweep(plan, [&](const MetricsReport&) { ++calls; });
    CHECK(calls == 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].seed == 1);
    CHECK(rows[1].seed == 2);
    plan.ratios.clear();
    CHECK_THROWS_AS(run_sweep(plan), ConfigError);
}
