#include "uitrust/rpl/dodag.hpp"
#include "uitrust/rpl/message.hpp"
#include "uitrust/rpl/objective.hpp"
#include "uitrust/rpl/trickle.hpp"

#include <doctest.h>

#include <vector>

using namespace uitrust;
using namespace uitrust::rpl;
using sim::seconds;

namespace {

TrickleTimer timer_at_max() {
    TrickleTimer t;
    for (unsigned i = 0; i < t.config().i_max_doublings + 2; ++i) {
        t.on_interval_end();
    }
    return t;
}

}  // namespace

TEST_CASE("trickle: reset to i_min, floor, doubling cap") {
    TrickleTimer t = timer_at_max();
    CHECK(t.interval() == t.i_max());
    CHECK(t.on_inconsistent());
    CHECK(t.interval() == t.config().i_min);
    CHECK_FALSE(t.on_inconsistent());
    CHECK(t.interval() == t.config().i_min);

    for (int i = 0; i < 5; ++i) {
        t.on_interval_end();
    }
    CHECK(t.interval().micros() == t.config().i_min.micros() * 32);

    TrickleConfig small;
    small.i_max_doublings = 3;
    TrickleTimer capped(small);
    for (int i = 0; i < 5; ++i) {
        capped.on_interval_end();
    }
    CHECK(capped.interval().micros() == small.i_min.micros() * 8);
}

TEST_CASE("trickle: fire point in [I/2, I) and suppression") {
    TrickleTimer t;
    sim::Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto off = t.begin_interval(rng);
        CHECK(off.micros() * 2 >= t.interval().micros());
        CHECK(off < t.interval());
    }
    for (unsigned i = 0; i < t.config().redundancy_k; ++i) {
        CHECK(t.should_transmit());
        t.on_consistent();
    }
    CHECK_FALSE(t.should_transmit());
}

TEST_CASE("handle_dis: normal mode resets trickle and emits a DIO") {
    DodagState s;
    s.rank = 512;
    TrickleTimer t = timer_at_max();
    const auto actions = handle_dis(s, t, NodeMode::Normal, make_dis(0xA));
    CHECK(actions == std::vector<DisAction>{DisAction::TrickleReset, DisAction::EmitDio});
    CHECK(t.interval() == t.config().i_min);
}

TEST_CASE("handle_dis: attack mode parks the sender without a DIO") {
    DodagState s;
    s.rank = 512;
    TrickleTimer t = timer_at_max();
    const auto before = t.interval();
    CHECK(handle_dis(s, t, NodeMode::AttackDetection, make_dis(0xA)) ==
          std::vector<DisAction>{DisAction::QueuePending});
    CHECK(s.pending.contains(0xA));
    CHECK(t.interval() == before);
    CHECK(handle_dis(s, t, NodeMode::AttackDetection, make_dis(0xA)).empty());
    CHECK(s.pending.size() == 1);
}

TEST_CASE("handle_dis: unjoined node ignores, overflow evicts oldest") {
    DodagState lone;
    TrickleTimer t;
    CHECK(handle_dis(lone, t, NodeMode::Normal, make_dis(1)).empty());

    DodagState s;
    s.rank = 256;
    s.pending = PendingTable(2);
    handle_dis(s, t, NodeMode::AttackDetection, make_dis(1));
    handle_dis(s, t, NodeMode::AttackDetection, make_dis(2));
    const auto a = handle_dis(s, t, NodeMode::AttackDetection, make_dis(3));
    CHECK(a == std::vector<DisAction>{DisAction::QueuePending, DisAction::EvictPending});
    CHECK_FALSE(s.pending.contains(1));
    CHECK(s.pending.evictions() == 1);
    CHECK_THROWS(handle_dis(s, t, NodeMode::Normal, make_dio(1, 256, 0, 1, false)));
}

TEST_CASE("etx") {
    CHECK(compute_etx({1.0, 1.0}) == 1.0);
    CHECK(compute_etx({0.5, 1.0}) == 2.0);
    CHECK(compute_etx({0.0, 0.7}) == kUnusableLink);
    CHECK(compute_etx({0.7, 0.0}) == kUnusableLink);
}

TEST_CASE("link stats EWMA") {
    LinkStats l;
    l.observe_forward(false, 0.2);
    CHECK(l.d_fwd == doctest::Approx(0.8));
    l.observe_forward(true, 0.2);
    CHECK(l.d_fwd == doctest::Approx(0.84));
}

TEST_CASE("mrhof parent selection") {
    MrhofParams p;
    const ParentCandidate only{7, 256, {}};
    CHECK(mrhof_select_parent(std::span(&only, 1), std::nullopt, p) == Mac{7});

    const std::vector<ParentCandidate> ab{{0xA, 256, {1.0, 1.0}}, {0xB, 128, {1.0 / 3.0, 1.0}}};
    CHECK(path_rank(ab[0], p) == doctest::Approx(384));
    CHECK(path_rank(ab[1], p) == doctest::Approx(512));
    CHECK(mrhof_select_parent(ab, std::nullopt, p) == Mac{0xA});

    // current at 384, challenger at 380
    const std::vector<ParentCandidate> hyst{{0xC, 256, {1.0, 1.0}}, {0xD, 252, {1.0, 1.0}}};
    CHECK(mrhof_select_parent(hyst, Mac{0xC}, p) == Mac{0xC});
    CHECK(mrhof_select_parent(hyst, std::nullopt, p) == Mac{0xD});

    CHECK_FALSE(mrhof_select_parent({}, std::nullopt, p).has_value());
    const std::vector<ParentCandidate> dead{{1, 256, {0.0, 1.0}}, {2, kInfiniteRank, {}}};
    CHECK_FALSE(mrhof_select_parent(dead, std::nullopt, p).has_value());
}

TEST_CASE("message sizes and piggyback placement") {
    auto dio = make_dio(1, 256, 0, 1, false);
    const auto plain = dio.bytes();
    CHECK(plain == kLinkOverheadBytes + kDioBodyBytes);
    dio.piggyback = wire::QueryField{wire::UidType::SiliconSerial, 3};
    CHECK(dio.bytes() == plain + wire::QueryField::kBytes);
    CHECK(dio.piggyback_bytes() == wire::QueryField::kBytes);
    CHECK_NOTHROW(dio.validate());

    auto dis = make_dis(1);
    dis.piggyback = wire::QueryField{};
    CHECK_THROWS_AS(dis.validate(), std::logic_error);
}
