#include "uitrust/trust/engine.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace uitrust::trust;

TEST_CASE("similarity") {
    const std::vector<double> a{0.8, 0.6}, b{0.6, 0.8}, x{1, 0}, y{0, 1};
    CHECK(similarity(a, a) == doctest::Approx(1.0));
    CHECK(similarity(a, b) == doctest::Approx(0.96));
    CHECK(similarity(x, y) == 0.0);
    const std::vector<double> sparse{0.3, kNull}, zero{0, 0};
    CHECK(similarity(sparse, a) == 1.0);
    CHECK(similarity(zero, a) == 1.0);
}

TEST_CASE("subjective reputation") {
    TrustMatrix m(2, 1);
    m.set(0, 0, 1.0);
    m.set(1, 0, 0.0);
    m.set_hr(0, 3);
    const std::vector<double> sim{1, 1};
    const std::vector<std::size_t> both{0, 1}, one{0};
    CHECK(subjective_reputation(m, sim, 0, both).value == doctest::Approx(0.75));
    m.set(0, 0, 0.7);
    CHECK(subjective_reputation(m, sim, 0, one).value == doctest::Approx(0.7));
    m.set(1, 0, 0.7);
    CHECK(subjective_reputation(m, sim, 0, both).value == doctest::Approx(0.7));
    const std::vector<double> none{0, 0};
    const auto fb = subjective_reputation(m, none, 0, both);
    CHECK(fb.unweighted_fallback);
    CHECK(fb.value == doctest::Approx(0.7));
    CHECK_THROWS(subjective_reputation(m, sim, 0, std::vector<std::size_t>{}));
}

TEST_CASE("trusted quorum") {
    const std::vector<std::vector<double>> same(4, {0.9, 0.1});
    CHECK(trusted_quorum(same, {}, 0.3) == std::vector<std::size_t>{0, 1, 2, 3});

    std::vector<std::vector<double>> crowd;
    for (int i = 0; i < 9; ++i) {
        crowd.push_back({0.9 + 0.005 * i, 0.8});
    }
    crowd.push_back({0.0, 0.0});
    const auto q = trusted_quorum(crowd, {}, 0.3);
    CHECK(q.size() == 9);
    CHECK(q.back() == 8);

    const std::vector<std::vector<double>> halves{{0.0}, {0.0}, {1.0}, {1.0}};
    CHECK(trusted_quorum(halves, {}, 0.3) == std::vector<std::size_t>{0, 1});
    const std::vector<double> prev{0.1, 0.1, 0.9, 0.9};
    CHECK(trusted_quorum(halves, prev, 0.3) == std::vector<std::size_t>{2, 3});
    CHECK(trusted_quorum({{0.4}}, {}, 0.3) == std::vector<std::size_t>{0});
}

TEST_CASE("behavioral, credibility, global reputation and verdicts") {
    const std::vector<double> col{0.4, kNull, 0.9, 0.7};
    CHECK(behavioral_reputation(col, std::vector<std::size_t>{0}) == doctest::Approx(0.4));
    CHECK(behavioral_reputation(col, std::vector<std::size_t>{2, 3}) == doctest::Approx(0.8));
    CHECK(is_null(behavioral_reputation(col, std::vector<std::size_t>{1})));

    const std::vector<double> br{0.7, 0.2};
    CHECK(credibility_reputation(br, br) == 1.0);
    CHECK(credibility_reputation(std::vector<double>{0.8, kNull}, br) == doctest::Approx(0.9));
    CHECK(credibility_reputation(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0, 0.0}) == 0.0);
    CHECK(credibility_reputation(std::vector<double>{kNull, kNull}, br) == 0.5);

    CHECK(global_reputation(0.8, 0.6, 1.0) == 0.8);
    CHECK(global_reputation(0.8, 0.6, 0.0) == 0.6);
    CHECK(global_reputation(0.8, 0.6, 0.5) == doctest::Approx(0.7));
    CHECK(classify(0.9, 0.5) == Verdict::Honest);
    CHECK(classify(0.5, 0.5) == Verdict::Honest);
    CHECK(classify(0.1, 0.5) == Verdict::Malicious);
}

TEST_CASE("directional weight and trust") {
    const std::vector<double> col{0.2, 0.6, kNull};
    CHECK(directional_weight(0.4, col) == 1.0);
    CHECK(directional_weight(0.6, col) == doctest::Approx(std::exp(-0.5)));
    CHECK(directional_weight(0.3, std::vector<double>{0.5, 0.5}) == 1.0);

    CHECK(directional_global_trust(1, 1, 1).link_cost == 0.0);
    CHECK(directional_global_trust(0.7, 0.4, 0).link_cost == 1.0);
    const auto t = directional_global_trust(0.8, 0.9, 0.9);
    CHECK(t.t_d == doctest::Approx(0.72));
    CHECK(t.t_dg == doctest::Approx(0.648));
    CHECK(t.link_cost == doctest::Approx(0.352));
}

TEST_CASE("trust rank and parent switch") {
    CHECK(trust_rank(3.0, 2.0, 0.5, 1.0) == 3.0);
    CHECK(trust_rank(3.0, 2.0, 0.5, 0.0) == 1.0);
    CHECK(trust_rank(3.0, 1.0, 0.0, 0.0) == 0.0);
    CHECK(std::isinf(trust_rank(3.0, INFINITY, 0.0, 0.5)));
    CHECK(maybe_switch_parent(2.0, 1.5) == ParentDecision::Switch);
    CHECK(maybe_switch_parent(1.5, 1.5) == ParentDecision::Keep);
    CHECK(maybe_switch_parent(1.0, 3.0) == ParentDecision::Keep);
}

TEST_CASE("full evaluation flags the colluding identities") {
    // three honest observers, subjects 0..2 are their identities, 3 and 4 are fakes
    TrustMatrix m(3, 5);
    for (std::size_t w = 0; w < 3; ++w) {
        m.set_observer_subject(w, w);
        for (std::size_t u = 0; u < 3; ++u) {
            if (u != w) {
                m.set(w, u, 1.0);
            }
        }
        m.set(w, 3, 0.1);
        m.set(w, 4, 0.2);
    }
    TrustEvaluation ev(m, TrustParams{});
    CHECK(ev.quorum().size() == 3);
    for (std::size_t u = 0; u < 3; ++u) {
        CHECK(ev.subject(u).verdict == Verdict::Honest);
    }
    CHECK(ev.subject(3).verdict == Verdict::Malicious);
    CHECK(ev.subject(4).verdict == Verdict::Malicious);
    CHECK(ev.operations() > 0);
    const auto p = ev.pair(0, 3);
    CHECK(p.link_cost == doctest::Approx(1.0 - p.t_dg));
    CHECK(ev.to_json().find("\"quorum\":[0,1,2]") != std::string::npos);
}

TEST_CASE("parameter validation and matrix bounds") {
    TrustParams p;
    p.gamma = 1.5;
    CHECK_THROWS(p.validate());
    TrustMatrix m(1, 1);
    CHECK_THROWS(m.set(0, 0, 1.2));
    CHECK_THROWS(m.set(1, 0, 0.5));
    CHECK_THROWS(m.set_hr(0, 0.0));
    CHECK(hierarchical_rank(1) == 0.5);
}

TEST_CASE("shortest trust paths") {
    std::vector<std::vector<WeightedEdge>> g(4);
    g[0] = {{1, 1.0}, {2, 4.0}};
    g[1] = {{2, 1.0}, {3, 5.0}};
    g[2] = {{3, 1.0}};
    const auto r = trust_paths(g, 0);
    CHECK(r.dist[3] == 3.0);
    CHECK(r.prev[3] == std::size_t{2});
    CHECK(r.prev[2] == std::size_t{1});
    CHECK(r.operations > 0);
}
