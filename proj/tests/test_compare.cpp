#include <doctest.h>

#include <algorithm>

#include "linkrank/compare.hpp"
#include "linkrank/errors.hpp"
#include "test_util.hpp"

using namespace linkrank;
namespace tu = testutil;

namespace {

ScoreVector scores_of(const LinkGraph& g, const std::vector<std::pair<std::uint64_t, double>>& v) {
    ScoreVector s;
    s.values.resize(g.node_count());
    for (const auto& [id, val] : v) s.values[*g.internal_index(id)] = val;
    return s;
}

// Independent tau: sort ids by each vector with the same tie-break rule,
// then count pair inversions directly.
double brute_force_tau(const LinkGraph& g, const ScoreVector& a, const ScoreVector& b,
                       const std::vector<std::uint64_t>& universe) {
    auto order_pos = [&](const ScoreVector& s) {
        std::vector<std::uint64_t> ids = g.external_ids();
        std::sort(ids.begin(), ids.end(), [&](std::uint64_t x, std::uint64_t y) {
            double sx = s.values[*g.internal_index(x)];
            double sy = s.values[*g.internal_index(y)];
            if (sx != sy) return sx > sy;
            return x < y;
        });
        std::unordered_map<std::uint64_t, std::size_t> pos;
        for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = i;
        return pos;
    };
    auto pa = order_pos(a);
    auto pb = order_pos(b);
    long long con = 0, dis = 0;
    for (std::size_t i = 0; i < universe.size(); ++i)
        for (std::size_t j = i + 1; j < universe.size(); ++j) {
            bool la = pa[universe[i]] < pa[universe[j]];
            bool lb = pb[universe[i]] < pb[universe[j]];
            (la == lb ? con : dis) += 1;
        }
    return static_cast<double>(con - dis) /
           (static_cast<double>(universe.size()) * (universe.size() - 1) / 2.0);
}

} // namespace

TEST_CASE("top_k basics") {
    LinkGraph g = LinkGraph::build({{10, 11}, {11, 12}});
    ScoreVector s = scores_of(g, {{10, 3.0}, {11, 1.0}, {12, 2.0}});

    auto t2 = top_k(g, s, 2);
    REQUIRE(t2.entries.size() == 2);
    CHECK(t2.entries[0] == std::pair<std::uint64_t, double>{10, 3.0});
    CHECK(t2.entries[1] == std::pair<std::uint64_t, double>{12, 2.0});

    CHECK(top_k(g, s, 0).entries.empty());
    CHECK(top_k(g, s, 99).entries.size() == 3); // k beyond N returns all

    // ties resolve by ascending external id
    ScoreVector tied = scores_of(g, {{10, 1.0}, {11, 1.0}, {12, 1.0}});
    auto tt = top_k(g, tied, 3);
    CHECK(tt.entries[0].first == 10);
    CHECK(tt.entries[1].first == 11);
    CHECK(tt.entries[2].first == 12);
}

TEST_CASE("top_k is a prefix of top_(k+1) and invariant under positive rescaling") {
    auto g = tu::random_graph({.n = 30, .seed = 5, .id_offset = 100});
    ScoreVector s;
    for (std::uint32_t i = 0; i < g.node_count(); ++i)
        s.values.push_back(tu::hash_unit(g.external_id(i) * 31));

    for (std::size_t k = 0; k < g.node_count(); ++k) {
        auto a = top_k(g, s, k);
        auto b = top_k(g, s, k + 1);
        for (std::size_t i = 0; i < a.entries.size(); ++i)
            CHECK(a.entries[i].first == b.entries[i].first);
    }

    ScoreVector scaled{s.values, s.kind};
    for (double& v : scaled.values) v *= 7.25;
    auto t1 = top_k(g, s, 10);
    auto t2 = top_k(g, scaled, 10);
    for (std::size_t i = 0; i < t1.entries.size(); ++i)
        CHECK(t1.entries[i].first == t2.entries[i].first);
}

TEST_CASE("identical vectors agree perfectly") {
    auto g = tu::random_graph({.n = 20, .seed = 6});
    ScoreVector s;
    for (std::uint32_t i = 0; i < g.node_count(); ++i)
        s.values.push_back(tu::hash_unit(i * 977));
    auto ag = rank_agreement(g, s, s, 10);
    CHECK(ag.top_k_overlap == 1.0);
    CHECK(ag.kendall_tau == 1.0);
}

TEST_CASE("reversed ordering gives tau -1 at full depth") {
    LinkGraph g = LinkGraph::build({{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    ScoreVector a = scores_of(g, {{0, 5.0}, {1, 4.0}, {2, 3.0}, {3, 2.0}, {4, 1.0}});
    ScoreVector b = scores_of(g, {{0, 1.0}, {1, 2.0}, {2, 3.0}, {3, 4.0}, {4, 5.0}});
    auto ag = rank_agreement(g, a, b, g.node_count());
    CHECK(ag.kendall_tau == -1.0);
    CHECK(ag.top_k_overlap == 1.0); // same universe at full depth
}

TEST_CASE("tau matches brute-force pair counting on random vectors") {
    for (std::uint64_t seed : {41, 42, 43, 44, 45}) {
        auto g = tu::random_graph({.n = 40, .seed = seed});
        ScoreVector a, b;
        for (std::uint32_t i = 0; i < g.node_count(); ++i) {
            a.values.push_back(tu::hash_unit(seed * 1000 + i));
            b.values.push_back(tu::hash_unit(seed * 2000 + i));
        }
        for (std::size_t k : {std::size_t{5}, std::size_t{15}, std::size_t{40}}) {
            auto ag = rank_agreement(g, a, b, k);

            // rebuild the union of both top-k sets independently
            std::vector<std::uint64_t> uni;
            for (const auto& e : top_k(g, a, k).entries) uni.push_back(e.first);
            for (const auto& e : top_k(g, b, k).entries)
                if (std::find(uni.begin(), uni.end(), e.first) == uni.end())
                    uni.push_back(e.first);
            CHECK(ag.union_size == uni.size());
            CHECK(ag.kendall_tau == doctest::Approx(brute_force_tau(g, a, b, uni)).epsilon(1e-15));
        }
    }
}

TEST_CASE("overlap counts shared ids regardless of order") {
    LinkGraph g = LinkGraph::build({{0, 1}, {1, 2}, {2, 3}});
    ScoreVector a = scores_of(g, {{0, 4.0}, {1, 3.0}, {2, 2.0}, {3, 1.0}});
    ScoreVector b = scores_of(g, {{0, 3.0}, {1, 4.0}, {2, 1.0}, {3, 2.0}});
    auto ag = rank_agreement(g, a, b, 2);
    CHECK(ag.top_k_overlap == 1.0); // {0,1} both times, swapped order
    CHECK(ag.kendall_tau < 1.0);
}

TEST_CASE("universe mismatch is rejected") {
    LinkGraph g = LinkGraph::build({{0, 1}});
    ScoreVector ok{std::vector<double>{1.0, 2.0}, ScoreKind::Authority};
    ScoreVector bad{std::vector<double>{1.0, 2.0, 3.0}, ScoreKind::Authority};
    CHECK_THROWS_AS(rank_agreement(g, ok, bad, 2), ValidationError);
    CHECK_THROWS_AS(top_k(g, bad, 1), ValidationError);
}
