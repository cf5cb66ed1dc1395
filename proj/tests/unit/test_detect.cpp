#include "uitrust/detect/counter.hpp"
#include "uitrust/detect/ledger.hpp"
#include "uitrust/detect/observer.hpp"

#include <doctest.h>

#include <vector>

using namespace uitrust;
using namespace uitrust::detect;
using sim::seconds;

TEST_CASE("counter check is a strict threshold on the difference") {
    CHECK(counter_check(40, 35, 10) == CounterVerdict::Normal);
    CHECK(counter_check(35, 35, 0.5) == CounterVerdict::Normal);
    CHECK(counter_check(46, 35, 10) == CounterVerdict::Alarm);
    CHECK(counter_check(45, 35, 10) == CounterVerdict::Normal);
    CHECK_THROWS(counter_check(1, 2, 10));
}

TEST_CASE("message counter windows") {
    MessageCounter c(seconds(1), seconds(10), 10);
    for (int s = 0; s < 30; ++s) {
        c.record(seconds(s + 0.5), s < 20 ? 1 : 3);
    }
    CHECK(c.total_before(seconds(10)) == 10);
    CHECK(c.delta(seconds(20)) == 10);
    CHECK(c.check(seconds(20)) == CounterVerdict::Normal);
    CHECK(c.delta(seconds(25)) == 20);
    CHECK(c.check(seconds(25)) == CounterVerdict::Alarm);
    CHECK(c.check(seconds(5)) == CounterVerdict::Normal);
    CHECK_THROWS(c.record(seconds(3)));
}

TEST_CASE("threshold calibration") {
    const std::vector<double> flat{10, 10, 10};
    CHECK(calibrate_threshold(flat, 0) == 10.0);
    CHECK(calibrate_threshold(flat, 20) == 20.0);
    const std::vector<double> spread{8, 12};
    CHECK(calibrate_threshold(spread, 0) == doctest::Approx(10 + 3 * 2));
}

TEST_CASE("local trust opinion") {
    CHECK(compute_lto(3, 0) == 1.0);
    CHECK(compute_lto(3, 3) == 0.5);
    CHECK(*compute_lto(6, 3) == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(compute_lto(0, 0).has_value());
}

TEST_CASE("case 1 and case 2 pair scoring") {
    EvidenceLedger l;
    score_pair(l, 0x11, 100, 0x22, 200);
    CHECK(l.at(0x11).p == 3);
    CHECK(l.at(0x22).p == 3);
    score_pair(l, 0x33, 100, 0x44, 100);
    CHECK(l.at(0x33).n == 3);
    CHECK(l.at(0x44).n == 3);
    CHECK(l.at(0x33).p == 0);
    score_pair(l, 0x55, 1, 0x55, 1);
    CHECK(l.find(0x55) == nullptr);
}

TEST_CASE("round scoring counts each identity once") {
    EvidenceLedger l;
    score_round_pairs(l, {{0xA, 7}, {0xB, 7}, {0xC, 7}, {0xD, 8}});
    for (Mac m : {0xA, 0xB, 0xC}) {
        CHECK(l.at(m).n == 3);
        CHECK(l.at(m).p == 0);
    }
    CHECK(l.at(0xD).p == 3);
    CHECK(l.at(0xD).n == 0);
}

TEST_CASE("case 3 timeouts") {
    EvidenceLedger l;
    const auto th = seconds(2);
    score_timeout(l, 1, seconds(3), th);
    CHECK(l.at(1).n == 1);
    score_timeout(l, 2, seconds(1), th);
    CHECK(l.at(2).n == 0);
    score_timeout(l, 3, std::nullopt, th);
    CHECK(l.at(3).n == 1);
    score_timeout(l, 3, std::nullopt, th);
    CHECK(l.at(3).n == 3);
    score_timeout(l, 3, seconds(1), th);
    CHECK(l.at(3).consecutive_misses == 0);
}

TEST_CASE("case 4 rotation") {
    CHECK(rotate_uid_type(UidType::SiliconSerial, 3, 4) == UidType::RadioTransceiver);
    CHECK(rotate_uid_type(UidType::SiliconSerial, 2, 4) == UidType::SiliconSerial);
    CHECK(rotate_uid_type(UidType::SiliconSerial, 0, 4) == UidType::SiliconSerial);
    CHECK(rotate_uid_type(UidType::RadioTransceiver, 4, 4) == UidType::PartNumber);
    CHECK(rotate_uid_type(UidType::PartNumber, 4, 4) == UidType::PartNumber);
    CHECK_THROWS(rotate_uid_type(UidType::PartNumber, 5, 4));
}

TEST_CASE("reports carry changed entries and respect the drift threshold") {
    EvidenceLedger l;
    l.add_positive(1, 3);
    l.add_negative(2, 3);
    auto r = l.take_report();
    REQUIRE(r.size() == 2);
    CHECK(r[0] == wire::LtoEntry{1, 3, 0});
    CHECK(l.take_report().empty());

    l.add_positive(1, 3);  // LTO still 1.0
    CHECK(l.take_report(0.05).empty());
    l.add_negative(1, 3);  // 6/9
    CHECK(l.take_report(0.05).size() == 1);
    l.mark_dirty(1);
    CHECK(l.take_report(0.05).size() == 1);
}

TEST_CASE("collective query: union of pending and neighbours") {
    Observer o;
    const std::vector<Mac> pending{0x51, 0x52};
    const std::vector<Mac> neighbours{0x61};
    const auto q = o.issue_collective_query(seconds(100), pending, neighbours);
    REQUIRE(q);
    CHECK(o.outstanding() == 3);

    Observer idle;
    CHECK_FALSE(idle.issue_collective_query(seconds(100), {}, {}));
}

TEST_CASE("a second alarm within omega is deferred") {
    Observer o;
    const std::vector<Mac> n{0x61};
    REQUIRE(o.issue_collective_query(seconds(100), {}, n));
    o.close_round(seconds(104));
    CHECK_FALSE(o.can_query(seconds(110)));
    CHECK_FALSE(o.issue_collective_query(seconds(110), {}, n));
    CHECK(o.can_query(seconds(130)));
    CHECK(o.issue_collective_query(seconds(130), {}, n));
}

TEST_CASE("observer round scores all four cases") {
    Observer o;
    const std::vector<Mac> ids{0x1, 0x2, 0x3, 0x4};
    auto q = o.issue_collective_query(seconds(0), {}, ids);
    REQUIRE(q);
    CHECK_FALSE(o.on_response(0x1, {q->uid_type, 77, static_cast<std::uint16_t>(q->nonce + 1)}, seconds(1)));
    CHECK(o.on_response(0x1, {q->uid_type, 77, q->nonce}, seconds(1)));
    CHECK(o.on_response(0x2, {q->uid_type, 77, q->nonce}, seconds(1)));
    auto s = o.close_round(seconds(4));
    REQUIRE(s);
    CHECK(s->silent == 2);
    CHECK(s->next_type == UidType::SiliconSerial);
    CHECK(o.ledger().at(0x1).n == 3);
    CHECK(o.ledger().at(0x3).n == 1);

    q = o.issue_collective_query(seconds(30), {}, ids);
    REQUIRE(q);
    CHECK(o.on_response(0x1, {q->uid_type, 77, q->nonce}, seconds(31)));
    s = o.close_round(seconds(34));
    CHECK(s->silent == 3);
    CHECK(s->next_type == UidType::RadioTransceiver);
    CHECK(o.ledger().at(0x3).n == 3);
    CHECK(o.ledger().at(0x1).uid_seen[0] == 77);
}
