#include "uitrust/sim/energy.hpp"
#include "uitrust/sim/event_queue.hpp"
#include "uitrust/sim/radio.hpp"
#include "uitrust/sim/rng.hpp"
#include "uitrust/sim/trace.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

using namespace uitrust::sim;

TEST_CASE("event queue: first id, stable tie-break, causality") {
    EventQueue q;
    std::vector<int> order;
    CHECK(q.schedule(SimTime{}, [&] { order.push_back(0); }) == 0);
    q.schedule(seconds(1), [&] { order.push_back(1); });
    q.schedule(seconds(1), [&] { order.push_back(2); });
    q.schedule(seconds(0.5), [&] { order.push_back(3); });
    q.run_until(seconds(10));
    CHECK(order == std::vector<int>{0, 3, 1, 2});
    CHECK(q.now() == seconds(10));
    CHECK_THROWS_AS(q.schedule(seconds(9.999), [] {}), CausalityError);
}

TEST_CASE("event queue: run_until leaves later events pending") {
    EventQueue q;
    int fired = 0;
    q.schedule(seconds(1), [&] { ++fired; });
    q.schedule(seconds(5), [&] { ++fired; });
    q.run_until(seconds(2));
    CHECK(fired == 1);
    CHECK(q.pending() == 1);
}

TEST_CASE("sim time is fixed-point microseconds") {
    CHECK(seconds(1.5).micros() == 1'500'000);
    CHECK(seconds(0.000001).micros() == 1);
    CHECK(seconds(2.25).to_string() == "2.250000");
}

TEST_CASE("rng: seeded streams repeat and derived streams differ") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    CHECK(Rng::derive(1, 1) != Rng::derive(1, 2));
    CHECK(Rng::derive(1, 1) == Rng::derive(1, 1));
    Rng c(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(c.index(5) < 5);
    }
}

TEST_CASE("deliver: range, zero loss, and seeded loss rate") {
    RadioConfig cfg;
    cfg.forwarding_error_rate = 0.0;
    Channel ch(cfg, {{0, 0}, {50, 0}, {10, 0}});
    Rng rng(1);
    CHECK(ch.deliver(0, 1, 0.0, SimTime{}, 40, rng).status == DeliveryStatus::OutOfRange);
    const auto ok = ch.deliver(0, 2, 0.0, seconds(1), 125, rng);
    CHECK(ok.status == DeliveryStatus::Delivered);
    CHECK(ok.rx_time == seconds(1.004));
    CHECK_THROWS(ch.deliver(0, 0, 0.0, SimTime{}, 40, rng));

    cfg.forwarding_error_rate = 0.05;
    Channel lossy(cfg, {{0, 0}, {10, 0}});
    Rng r2(99);
    int lost = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        lost += lossy.deliver(0, 1, 0.0, SimTime{}, 40, r2).status == DeliveryStatus::Loss ? 1 : 0;
    }
    CHECK(std::fabs(lost / double(trials) - 0.05) <= 0.01);
}

TEST_CASE("channel neighbours never exceed range") {
    RadioConfig cfg;
    std::vector<Position> pos;
    Rng rng(3);
    for (int i = 0; i < 60; ++i) {
        pos.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
    }
    Channel ch(cfg, pos);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        for (std::size_t j : ch.neighbors(i)) {
            CHECK(distance(pos[i], pos[j]) <= cfg.tx_range_m);
        }
    }
}

TEST_CASE("rssi_at: log-distance examples") {
    RadioConfig cfg;
    CHECK(rssi_at(0.0, 1.0, cfg) == doctest::Approx(-40.0));
    CHECK(rssi_at(0.0, 10.0, cfg) == doctest::Approx(-60.0));
    CHECK(rssi_at(0.0, 7.0, cfg) - rssi_at(-10.0, 7.0, cfg) == doctest::Approx(10.0));
    CHECK(rssi_at(0.0, 5.0, cfg) > rssi_at(0.0, 6.0, cfg));
    CHECK(rssi_at(-5.0, 5.0, cfg) < rssi_at(0.0, 5.0, cfg));
    CHECK_THROWS(rssi_at(0.0, 0.0, cfg));
}

TEST_CASE("energy: zero, additivity, hand example") {
    EnergyModel m;
    m.tx_current_a = 0.0195;
    EnergyAccount a;
    account_energy(a, m, EnergyAction::TxBytes, 0);
    CHECK(a.total() == 0.0);
    account_energy(a, m, EnergyAction::TxBytes, 125);
    CHECK(a.tx_joules == doctest::Approx(2.34e-4).epsilon(1e-12));
    EnergyAccount one, two;
    account_energy(one, m, EnergyAction::TxBytes, 100);
    account_energy(two, m, EnergyAction::TxBytes, 100);
    account_energy(two, m, EnergyAction::TxBytes, 100);
    CHECK(two.tx_joules == doctest::Approx(2 * one.tx_joules));
    account_energy(two, m, EnergyAction::RxBytes, 10);
    CHECK(two.total() == doctest::Approx(two.tx_joules + two.rx_joules + two.idle_joules));
    CHECK_THROWS(account_energy(a, m, EnergyAction::RxBytes, -1));
    CHECK(airtime(125, RadioConfig{}) == seconds(0.004));
}

TEST_CASE("trace: NDJSON record layout and digest") {
    std::ostringstream out;
    TraceSink sink(&out);
    sink.record({seconds(1.5), "DIS", 0x020000000001ULL, kBroadcast, 27, "delivered"});
    CHECK(out.str() == "{\"t\":1.500000,\"kind\":\"DIS\",\"src\":\"02:00:00:00:00:01\",\"dst\":\"*\",\"bytes\":27,"
                       "\"outcome\":\"delivered\"}\n");
    TraceSink silent;
    silent.record({seconds(1.5), "DIS", 0x020000000001ULL, kBroadcast, 27, "delivered"});
    CHECK(silent.digest() == sink.digest());
    CHECK(silent.records() == 1);
    silent.record({seconds(1.5), "DIS", 0x020000000001ULL, kBroadcast, 27, "loss"});
    CHECK(silent.digest() != sink.digest());
}
