#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "linkrank/graph.hpp"
#include "linkrank/ranking.hpp"

namespace linkrank {

/// (external_id, score) pairs, descending by score, ties broken by
/// ascending external id. The same rule everywhere keeps rankings
/// deterministic.
struct RankList {
    std::vector<std::pair<std::uint64_t, double>> entries;
};

/// First k entries of the full deterministic ordering of s over g's
/// nodes. k larger than the node count returns everything.
RankList top_k(const LinkGraph& g, const ScoreVector& s, std::size_t k);

/// Agreement between two score vectors over the same node universe.
/// overlap is |top_k(a) intersect top_k(b)| / min(k, N); tau is Kendall's
/// tau over the union of both top-k sets, computed on the deterministic
/// total orders. Both default to 1 when the compared sets are too small
/// to distinguish (k = 0 or a single-node union).
struct RankAgreement {
    double top_k_overlap = 1.0;
    double kendall_tau = 1.0;
    std::size_t union_size = 0;
};

/// Throws ValidationError if a and b are not over the same graph size.
RankAgreement rank_agreement(const LinkGraph& g, const ScoreVector& a, const ScoreVector& b,
                             std::size_t k);

} // namespace linkrank
