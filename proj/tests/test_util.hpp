#pragma once

// Shared helpers for the test suites: deterministic random instances and
// small independent oracles. Everything here must stay independent of the
// library's iteration internals so oracle comparisons mean something.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "linkrank/graph.hpp"
#include "linkrank/ranking.hpp"

namespace testutil {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// [0,1) from a hash; used to key values off external structure so the
// same node/edge gets the same value on every graph that contains it.
inline double hash_unit(std::uint64_t x) {
    return static_cast<double>(splitmix64(x) >> 11) * 0x1.0p-53;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

struct RandomGraphSpec {
    std::uint32_t n = 50;
    double avg_out_degree = 3.0;
    double dangling_fraction = 0.2;
    std::uint64_t seed = 1;
    std::uint64_t id_offset = 0;
    bool allow_self_loops = true;
};

inline linkrank::LinkGraph random_graph(const RandomGraphSpec& spec) {
    Rng rng(spec.seed);
    std::vector<std::uint64_t> nodes(spec.n);
    for (std::uint32_t i = 0; i < spec.n; ++i) nodes[i] = spec.id_offset + i;

    std::vector<std::uint8_t> dangling(spec.n, 0);
    auto dangling_count = static_cast<std::uint32_t>(spec.dangling_fraction * spec.n);
    // choose dangling nodes by partial shuffle
    std::vector<std::uint32_t> order(spec.n);
    for (std::uint32_t i = 0; i < spec.n; ++i) order[i] = i;
    for (std::uint32_t i = 0; i < dangling_count && i < spec.n; ++i) {
        std::uint32_t j = i + static_cast<std::uint32_t>(rng.below(spec.n - i));
        std::swap(order[i], order[j]);
        dangling[order[i]] = 1;
    }

    std::vector<linkrank::ExtEdge> edges;
    for (std::uint32_t i = 0; i < spec.n; ++i) {
        if (dangling[i]) continue;
        auto deg_max = static_cast<std::uint64_t>(std::max(1.0, 2.0 * spec.avg_out_degree - 1.0));
        std::uint64_t deg = 1 + rng.below(deg_max);
        std::set<std::uint32_t> targets;
        for (std::uint64_t t = 0; t < deg; ++t) {
            auto j = static_cast<std::uint32_t>(rng.below(spec.n));
            if (!spec.allow_self_loops && j == i) continue;
            targets.insert(j);
        }
        if (targets.empty()) targets.insert((i + 1) % spec.n);
        for (auto j : targets) edges.emplace_back(nodes[i], nodes[j]);
    }
    return linkrank::LinkGraph::build(std::move(edges), nodes);
}

// Overlay of k collision-free random permutations: every node has
// out-degree and in-degree exactly k, so the uniform policy is doubly
// stochastic and its transpose cannot expand the L2 norm. Optionally a
// fraction of nodes then loses all out-edges (dangling), which only
// removes column mass and keeps the matrix doubly substochastic. This is
// the instance class on which the per-iteration L2 contraction rate is a
// theorem rather than a heuristic; see the contraction tests.
inline linkrank::LinkGraph balanced_graph(std::uint32_t n, std::uint32_t k,
                                          double dangling_fraction, std::uint64_t seed,
                                          std::uint64_t id_offset = 0) {
    Rng rng(seed);
    std::set<std::pair<std::uint32_t, std::uint32_t>> used;
    std::vector<std::vector<std::uint32_t>> perms;
    for (std::uint32_t m = 0; m < k; ++m) {
        std::vector<std::uint32_t> perm(n);
        for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
        for (std::uint32_t i = 0; i + 1 < n; ++i) {
            auto j = i + static_cast<std::uint32_t>(rng.below(n - i));
            std::swap(perm[i], perm[j]);
        }
        // resolve duplicate edges against earlier permutations by swapping
        // two images; a handful of collisions is expected, correction is
        // quick
        for (std::size_t guard = 0; guard < 100 * static_cast<std::size_t>(n); ++guard) {
            bool clean = true;
            for (std::uint32_t i = 0; i < n; ++i) {
                if (used.count({i, perm[i]})) {
                    auto j = static_cast<std::uint32_t>(rng.below(n));
                    std::swap(perm[i], perm[j]);
                    clean = false;
                }
            }
            if (clean) break;
        }
        for (std::uint32_t i = 0; i < n; ++i) used.insert({i, perm[i]});
        if (used.size() != static_cast<std::size_t>(m + 1) * n)
            throw std::logic_error("balanced_graph: unresolved edge collision");
        perms.push_back(std::move(perm));
    }

    std::vector<std::uint8_t> dangling(n, 0);
    auto dangling_count = static_cast<std::uint32_t>(dangling_fraction * n);
    for (std::uint32_t c = 0; c < dangling_count; ++c) {
        std::uint32_t i;
        do {
            i = static_cast<std::uint32_t>(rng.below(n));
        } while (dangling[i]);
        dangling[i] = 1;
    }

    std::vector<std::uint64_t> nodes(n);
    for (std::uint32_t i = 0; i < n; ++i) nodes[i] = id_offset + i;
    std::vector<linkrank::ExtEdge> edges;
    for (const auto& perm : perms)
        for (std::uint32_t i = 0; i < n; ++i)
            if (!dangling[i]) edges.emplace_back(nodes[i], nodes[perm[i]]);
    return linkrank::LinkGraph::build(std::move(edges), nodes);
}

// Random row-stochastic policy keyed by external edge identity, so
// disjoint subgraphs and post-deletion rebuilds see consistent weights.
inline linkrank::Policy hash_policy(const linkrank::LinkGraph& g, std::uint64_t seed) {
    std::vector<double> w(g.edge_count());
    auto off = g.forward_offsets();
    auto tgt = g.forward_targets();
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        double sum = 0.0;
        for (std::uint32_t k = off[i]; k < off[i + 1]; ++k) {
            std::uint64_t key = splitmix64(g.external_id(i) * 0x51ed2701u) ^
                                splitmix64(g.external_id(tgt[k]) + seed);
            w[k] = 0.25 + hash_unit(key);
            sum += w[k];
        }
        for (std::uint32_t k = off[i]; k < off[i + 1]; ++k) w[k] /= sum;
    }
    return linkrank::Policy(g, std::move(w));
}

inline linkrank::RewardVector hash_rewards(const linkrank::LinkGraph& g, std::uint64_t seed,
                                           bool allow_negative = false) {
    std::vector<double> r(g.node_count());
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        double u = hash_unit(splitmix64(g.external_id(i)) ^ seed);
        r[i] = allow_negative ? 2.0 * u - 1.0 : 0.1 + u;
    }
    return linkrank::RewardVector{std::move(r)};
}

inline double linf_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double l2_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

inline double l2_diff(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// Component labels by brute-force transitive closure of the symmetrized
// adjacency; O(n^3), oracle only.
inline std::vector<std::uint32_t> closure_components(const linkrank::LinkGraph& g) {
    std::uint32_t n = g.node_count();
    std::vector<std::vector<std::uint8_t>> reach(n, std::vector<std::uint8_t>(n, 0));
    for (std::uint32_t i = 0; i < n; ++i) {
        reach[i][i] = 1;
        for (auto j : g.successors(i)) {
            reach[i][j] = 1;
            reach[j][i] = 1;
        }
    }
    for (std::uint32_t k = 0; k < n; ++k)
        for (std::uint32_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::uint32_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = 1;

    std::vector<std::uint32_t> label(n, n);
    std::uint32_t next = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (label[i] != n) continue;
        for (std::uint32_t j = 0; j < n; ++j)
            if (reach[i][j]) label[j] = next;
        ++next;
    }
    return label;
}

// Unique scratch directory per call, under the system temp root.
inline std::filesystem::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    auto p = std::filesystem::temp_directory_path() /
             ("linkrank_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
    std::filesystem::create_directories(p);
    return p;
}

inline std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                        const std::string& content) {
    auto p = dir / name;
    std::ofstream out(p);
    out << content;
    return p;
}

} // namespace testutil
