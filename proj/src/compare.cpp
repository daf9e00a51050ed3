#include "linkrank/compare.hpp"

#include <algorithm>
#include <unordered_set>

#include "linkrank/errors.hpp"

namespace linkrank {

namespace {

// Full ordering: descending score, ascending external id on ties.
std::vector<std::pair<std::uint64_t, double>> ordered_entries(const LinkGraph& g,
                                                              const ScoreVector& s) {
    std::vector<std::pair<std::uint64_t, double>> v;
    v.reserve(g.node_count());
    for (std::uint32_t i = 0; i < g.node_count(); ++i)
        v.emplace_back(g.external_id(i), s.values[i]);
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return v;
}

} // namespace

RankList top_k(const LinkGraph& g, const ScoreVector& s, std::size_t k) {
    if (s.values.size() != g.node_count())
        throw ValidationError("score vector size does not match graph");
    auto all = ordered_entries(g, s);
    if (k < all.size()) all.resize(k);
    return RankList{std::move(all)};
}

RankAgreement rank_agreement(const LinkGraph& g, const ScoreVector& a, const ScoreVector& b,
                             std::size_t k) {
    if (a.values.size() != g.node_count() || b.values.size() != g.node_count())
        throw ValidationError("score vectors must cover the same node universe as the graph");

    auto ta = top_k(g, a, k);
    auto tb = top_k(g, b, k);

    std::unordered_set<std::uint64_t> set_a, set_b;
    for (const auto& [id, sc] : ta.entries) set_a.insert(id);
    for (const auto& [id, sc] : tb.entries) set_b.insert(id);

    std::size_t k_eff = std::min<std::size_t>(k, g.node_count());
    std::size_t inter = 0;
    for (auto id : set_a)
        if (set_b.count(id)) ++inter;

    RankAgreement out;
    out.top_k_overlap = k_eff == 0 ? 1.0 : static_cast<double>(inter) / k_eff;

    // Kendall tau over the union of both top-k sets, by brute-force pair
    // counting on the deterministic total orders. O(|U|^2) is fine at desk
    // scale.
    std::vector<std::uint64_t> uni(set_a.begin(), set_a.end());
    for (auto id : set_b)
        if (!set_a.count(id)) uni.push_back(id);
    out.union_size = uni.size();

    if (uni.size() < 2) {
        out.kendall_tau = 1.0;
        return out;
    }

    auto rank_positions = [&](const ScoreVector& s) {
        auto all = ordered_entries(g, s);
        std::unordered_map<std::uint64_t, std::size_t> pos;
        pos.reserve(all.size());
        for (std::size_t i = 0; i < all.size(); ++i) pos[all[i].first] = i;
        return pos;
    };
    auto pos_a = rank_positions(a);
    auto pos_b = rank_positions(b);

    long long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < uni.size(); ++i) {
        for (std::size_t j = i + 1; j < uni.size(); ++j) {
            bool a_less = pos_a[uni[i]] < pos_a[uni[j]];
            bool b_less = pos_b[uni[i]] < pos_b[uni[j]];
            if (a_less == b_less)
                ++concordant;
            else
                ++discordant;
        }
    }
    out.kendall_tau = static_cast<double>(concordant - discordant) /
                      (static_cast<double>(uni.size()) * (uni.size() - 1) / 2.0);
    return out;
}

} // namespace linkrank
