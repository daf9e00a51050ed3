#include "linkrank/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <random>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "linkrank/csv.hpp"
#include "linkrank/errors.hpp"

namespace linkrank {

namespace {

// Engine-only use of <random>: distributions are hand-rolled so sequences
// do not depend on the standard library implementation.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t below(std::uint64_t n) {
        // modulo rejection, unbiased
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

struct EdgeHash {
    std::size_t operator()(const ExtEdge& e) const {
        std::uint64_t h = e.first * 0x9E3779B97F4A7C15ull;
        h ^= e.second + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};
using EdgeSet = std::unordered_set<ExtEdge, EdgeHash>;

double l1_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

std::vector<double> uniform_vector(std::uint32_t n) {
    return std::vector<double>(n, n ? 1.0 / n : 0.0);
}

// Sample k distinct elements by partial Fisher-Yates; order is part of the
// deterministic contract.
template <class T>
std::vector<T> sample_distinct(std::vector<T> items, std::size_t k, DetRng& rng) {
    k = std::min(k, items.size());
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + rng.below(items.size() - i);
        std::swap(items[i], items[j]);
    }
    items.resize(k);
    return items;
}

std::size_t pct_count(std::size_t base, double pct) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(base) * pct / 100.0));
}

// Mutable generator state between snapshots.
struct EvoState {
    std::vector<std::uint64_t> nodes;
    std::vector<ExtEdge> edges;
    EdgeSet edge_keys;
    std::uint64_t next_id = 0;
};

// Preferential-attachment sampler: every node once plus one entry per
// received in-link, so picks are biased toward high in-degree.
struct AttachmentPool {
    std::vector<std::uint64_t> entries;

    std::uint64_t sample(DetRng& rng) const { return entries[rng.below(entries.size())]; }
};

bool try_add_edge(EvoState& st, AttachmentPool& pool, std::vector<ExtEdge>& out,
                  const EdgeSet& forbidden, std::uint64_t src, std::uint64_t dst) {
    if (src == dst) return false;
    ExtEdge e{src, dst};
    if (forbidden.count(e) || st.edge_keys.count(e)) return false;
    out.push_back(e);
    st.edge_keys.insert(e);
    pool.entries.push_back(dst);
    return true;
}

GraphDelta evolve_step(EvoState& st, const EvolutionStep& step, double edge_factor, DetRng& rng) {
    const std::size_t n_before = st.nodes.size();
    const std::size_t e_before = st.edges.size();

    const std::size_t del_n = pct_count(n_before, step.del_nodes_pct);
    const std::size_t add_n = pct_count(n_before, step.add_nodes_pct);
    const std::size_t del_l = pct_count(e_before, step.del_links_pct);
    const std::size_t add_l = pct_count(e_before, step.add_links_pct);

    if (n_before - std::min(del_n, n_before) + add_n == 0)
        throw ConfigError("evolution step would empty the graph");

    GraphDelta d;
    d.removed_nodes = sample_distinct(st.nodes, del_n, rng);
    std::unordered_set<std::uint64_t> removed_nodes(d.removed_nodes.begin(),
                                                    d.removed_nodes.end());

    // Edges incident to a removed node must be listed; they count toward
    // the link-deletion budget.
    std::vector<ExtEdge> survivors;
    survivors.reserve(st.edges.size());
    for (const auto& e : st.edges) {
        if (removed_nodes.count(e.first) || removed_nodes.count(e.second))
            d.removed_edges.push_back(e);
        else
            survivors.push_back(e);
    }
    if (d.removed_edges.size() < del_l) {
        auto extra = sample_distinct(survivors, del_l - d.removed_edges.size(), rng);
        EdgeSet extra_set(extra.begin(), extra.end());
        d.removed_edges.insert(d.removed_edges.end(), extra.begin(), extra.end());
        std::erase_if(survivors, [&](const ExtEdge& e) { return extra_set.count(e) > 0; });
    }

    for (std::size_t i = 0; i < add_n; ++i) d.added_nodes.push_back(st.next_id++);

    // Added edges must avoid every pre-step edge, removed ones included.
    EdgeSet pre_step_edges = st.edge_keys;

    std::vector<std::uint64_t> live;
    for (auto id : st.nodes)
        if (!removed_nodes.count(id)) live.push_back(id);

    AttachmentPool pool;
    pool.entries = live;
    for (const auto& e : survivors) pool.entries.push_back(e.second);

    EvoState scratch; // accumulates the post-step edge keys for dedup
    scratch.edge_keys = EdgeSet(survivors.begin(), survivors.end());

    std::size_t budget = add_l;
    auto pa_target = [&](std::span<const std::uint64_t> candidates) {
        if (rng.unit() < 0.25 || pool.entries.empty())
            return candidates[rng.below(candidates.size())];
        return pool.sample(rng);
    };

    std::vector<std::uint64_t> all_current = live;
    for (auto v : d.added_nodes) {
        // Each new node tries one out-link to a preferential target and
        // one in-link from a random existing node.
        if (budget > 0 && !all_current.empty()) {
            for (int tries = 0; tries < 32; ++tries) {
                std::uint64_t t = pa_target(all_current);
                if (try_add_edge(scratch, pool, d.added_edges, pre_step_edges, v, t)) {
                    --budget;
                    break;
                }
            }
        }
        if (budget > 0 && !all_current.empty()) {
            for (int tries = 0; tries < 32; ++tries) {
                std::uint64_t s = all_current[rng.below(all_current.size())];
                if (try_add_edge(scratch, pool, d.added_edges, pre_step_edges, s, v)) {
                    --budget;
                    break;
                }
            }
        }
        all_current.push_back(v);
        pool.entries.push_back(v);
    }

    while (budget > 0 && all_current.size() > 1) {
        bool placed = false;
        for (int tries = 0; tries < 64 && !placed; ++tries) {
            std::uint64_t s = all_current[rng.below(all_current.size())];
            std::uint64_t t = pa_target(all_current);
            placed = try_add_edge(scratch, pool, d.added_edges, pre_step_edges, s, t);
        }
        if (!placed) break; // graph saturated
        --budget;
    }
    (void)edge_factor;

    // Commit to the state.
    st.nodes = all_current;
    st.edges = survivors;
    st.edges.insert(st.edges.end(), d.added_edges.begin(), d.added_edges.end());
    st.edge_keys = EdgeSet(st.edges.begin(), st.edges.end());
    return d;
}

} // namespace

std::string to_string(RankMethod m) {
    return m == RankMethod::PageRank ? "pagerank" : "reinforcement";
}

std::string to_string(InitKind k) { return k == InitKind::Default ? "default" : "warm"; }

PolicyBuilder uniform_policy_builder() {
    return [](const LinkGraph& g) { return uniform_policy(g); };
}

RewardBuilder uniform_reward_builder(double value) {
    return [value](const LinkGraph& g) { return uniform_rewards(g, value); };
}

Evolution generate_evolution(const EvolutionSpec& spec) {
    if (spec.base_nodes == 0) throw ConfigError("base_nodes must be positive");
    if (!(spec.base_edge_factor >= 0.0)) throw ConfigError("base_edge_factor must be nonnegative");
    for (const auto& s : spec.steps)
        for (double p :
             {s.add_nodes_pct, s.del_nodes_pct, s.add_links_pct, s.del_links_pct})
            if (!(p >= 0.0) || !(p <= 100.0))
                throw ConfigError("step percentages must lie in [0,100]");

    DetRng rng(spec.seed);
    EvoState st;
    st.next_id = spec.base_nodes;
    st.nodes.resize(spec.base_nodes);
    for (std::uint32_t i = 0; i < spec.base_nodes; ++i) st.nodes[i] = i;

    AttachmentPool pool;
    pool.entries = st.nodes;
    const std::size_t base_edges =
        static_cast<std::size_t>(std::llround(spec.base_nodes * spec.base_edge_factor));
    EdgeSet no_forbidden;
    for (std::size_t e = 0; e < base_edges; ++e) {
        for (int tries = 0; tries < 32; ++tries) {
            std::uint64_t s = st.nodes[rng.below(st.nodes.size())];
            std::uint64_t t = (rng.unit() < 0.25) ? st.nodes[rng.below(st.nodes.size())]
                                                  : pool.sample(rng);
            if (try_add_edge(st, pool, st.edges, no_forbidden, s, t)) break;
        }
    }

    Evolution evo;
    evo.snapshots.push_back(LinkGraph::build(st.edges, st.nodes));
    for (const auto& step : spec.steps) {
        GraphDelta d = evolve_step(st, step, spec.base_edge_factor, rng);
        evo.snapshots.push_back(apply_delta(evo.snapshots.back(), d));
        evo.deltas.push_back(std::move(d));
    }
    return evo;
}

EvolutionSpec load_evolution_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open evolution spec: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad evolution spec " + path.string() + ": " + e.what());
    }
    EvolutionSpec spec;
    try {
        spec.seed = j.value("seed", spec.seed);
        spec.base_nodes = j.value("base_nodes", spec.base_nodes);
        spec.base_edge_factor = j.value("base_edge_factor", spec.base_edge_factor);
        for (const auto& js : j.value("steps", nlohmann::json::array())) {
            EvolutionStep s;
            s.add_nodes_pct = js.value("add_nodes_pct", 0.0);
            s.del_nodes_pct = js.value("del_nodes_pct", 0.0);
            s.add_links_pct = js.value("add_links_pct", 0.0);
            s.del_links_pct = js.value("del_links_pct", 0.0);
            spec.steps.push_back(s);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("bad evolution spec " + path.string() + ": " + e.what());
    }
    return spec;
}

std::vector<std::pair<std::size_t, std::size_t>> default_experiment_pairs(std::size_t count) {
    if (count < 2) throw ValidationError("need at least 2 snapshots");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    auto push_unique = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        std::pair<std::size_t, std::size_t> p{a, b};
        if (std::find(pairs.begin(), pairs.end(), p) == pairs.end()) pairs.push_back(p);
    };
    push_unique(count - 2, count - 1);
    if (count >= 3) {
        push_unique(count - 3, count - 2);
        push_unique(count - 3, count - 1);
    }
    push_unique(0, count - 1);
    return pairs;
}

std::vector<UpdateExperimentResult> run_update_experiment(
    std::span<const LinkGraph> snapshots, RankMethod method, double discount, double tol,
    std::vector<std::pair<std::size_t, std::size_t>> pairs, std::size_t max_iterations) {
    if (snapshots.size() < 2) throw ValidationError("need at least 2 snapshots");
    if (pairs.empty()) pairs = default_experiment_pairs(snapshots.size());
    for (const auto& [a, b] : pairs)
        if (a >= snapshots.size() || b >= snapshots.size() || a == b)
            throw ValidationError("bad snapshot pair " + std::to_string(a) + "->" +
                                  std::to_string(b));

    std::vector<UpdateExperimentResult> results;
    for (const auto& [a, b] : pairs) {
        const LinkGraph& init_g = snapshots[a];
        const LinkGraph& target = snapshots[b];
        const std::string label = std::to_string(a) + "->" + std::to_string(b);

        IterationConfig ref_cfg{discount, 1e-12, max_iterations, std::nullopt, 1};
        IterationConfig run_cfg{discount, tol, max_iterations, std::nullopt, 1};

        std::vector<double> reference;
        std::vector<double> default_init;
        std::vector<double> warm_init;

        if (method == RankMethod::Reinforcement) {
            Policy pol_t = uniform_policy(target);
            RewardVector rew_t = uniform_rewards(target);
            reference = reinforcement_rank(target, pol_t, rew_t, ref_cfg).scores.values;
            default_init = rew_t.values;

            Policy pol_i = uniform_policy(init_g);
            RewardVector rew_i = uniform_rewards(init_g);
            auto prev = reinforcement_rank(init_g, pol_i, rew_i, run_cfg).scores.values;
            warm_init.resize(target.node_count());
            for (std::uint32_t i = 0; i < target.node_count(); ++i) {
                auto idx = init_g.internal_index(target.external_id(i));
                warm_init[i] = idx ? prev[*idx] : rew_t.values[i];
            }

            for (InitKind kind : {InitKind::Default, InitKind::Warm}) {
                IterationConfig cfg = run_cfg;
                if (kind == InitKind::Warm) cfg.init_scores = warm_init;
                auto res = reinforcement_rank(target, pol_t, rew_t, cfg, &reference);
                const auto& x0 = kind == InitKind::Warm ? warm_init : default_init;
                results.push_back({method, kind, label, res.trace.iterations_used,
                                   res.trace.converged,
                                   l1_distance(x0, reference) / l1_norm(reference),
                                   std::move(res.trace)});
            }
        } else {
            auto v_t = uniform_vector(target.node_count());
            reference = pagerank(target, ref_cfg, v_t).scores.values;
            default_init = v_t;

            auto v_i = uniform_vector(init_g.node_count());
            auto prev = pagerank(init_g, run_cfg, v_i).scores.values;
            warm_init.resize(target.node_count());
            for (std::uint32_t i = 0; i < target.node_count(); ++i) {
                auto idx = init_g.internal_index(target.external_id(i));
                warm_init[i] = idx ? prev[*idx] : 1.0 / target.node_count();
            }
            double sum = l1_norm(warm_init);
            if (sum > 0.0)
                for (double& x : warm_init) x /= sum;

            for (InitKind kind : {InitKind::Default, InitKind::Warm}) {
                IterationConfig cfg = run_cfg;
                if (kind == InitKind::Warm) cfg.init_scores = warm_init;
                auto res = pagerank(target, cfg, v_t, nullptr, &reference);
                const auto& x0 = kind == InitKind::Warm ? warm_init : default_init;
                results.push_back({method, kind, label, res.trace.iterations_used,
                                   res.trace.converged,
                                   l1_distance(x0, reference) / l1_norm(reference),
                                   std::move(res.trace)});
            }
        }
    }
    return results;
}

void write_experiment_summary_csv(std::span<const UpdateExperimentResult> results,
                                  const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write summary: " + path.string());
    out << "method,init_kind,pair,iterations_to_tol,initial_rel_error\n";
    for (const auto& r : results)
        out << to_string(r.method) << "," << to_string(r.init_kind) << "," << r.pair << ","
            << r.iterations_to_tol << "," << format_double(r.initial_rel_error) << "\n";
}

LinkGraph merge_disjoint(const LinkGraph& g1, const LinkGraph& g2) {
    std::vector<std::uint64_t> overlap;
    for (auto id : g2.external_ids())
        if (g1.internal_index(id)) overlap.push_back(id);
    if (!overlap.empty())
        throw ValidationError("graphs share " + std::to_string(overlap.size()) +
                              " external id(s), first: " + std::to_string(overlap.front()));

    auto edges = g1.external_edges();
    auto e2 = g2.external_edges();
    edges.insert(edges.end(), e2.begin(), e2.end());
    std::vector<std::uint64_t> nodes = g1.external_ids();
    nodes.insert(nodes.end(), g2.external_ids().begin(), g2.external_ids().end());
    return LinkGraph::build(std::move(edges), nodes);
}

namespace {

std::vector<double> rank_with(const LinkGraph& g, RankMethod method, double gamma, double tol,
                              const PolicyBuilder& policy, const RewardBuilder& rewards) {
    IterationConfig cfg{gamma, tol, 100000, std::nullopt, 1};
    if (method == RankMethod::Reinforcement)
        return reinforcement_rank(g, policy(g), rewards(g), cfg).scores.values;
    return pagerank(g, cfg, uniform_vector(g.node_count())).scores.values;
}

} // namespace

DisjointIndependenceReport check_disjoint_independence(const LinkGraph& g1, const LinkGraph& g2,
                                                       RankMethod method, double gamma,
                                                       const PolicyBuilder& policy,
                                                       const RewardBuilder& rewards, double tol) {
    LinkGraph uni = merge_disjoint(g1, g2);
    auto r1 = rank_with(g1, method, gamma, tol, policy, rewards);
    auto r2 = rank_with(g2, method, gamma, tol, policy, rewards);
    auto ru = rank_with(uni, method, gamma, tol, policy, rewards);

    DisjointIndependenceReport rep;
    rep.union_nodes = uni.node_count();
    for (std::uint32_t i = 0; i < uni.node_count(); ++i) {
        std::uint64_t ext = uni.external_id(i);
        double local;
        if (auto idx = g1.internal_index(ext))
            local = r1[*idx];
        else
            local = r2[*g2.internal_index(ext)];
        rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(ru[i] - local));
    }
    return rep;
}

AltruismReport check_altruistic_independence(const LinkGraph& g,
                                             std::span<const std::uint64_t> altruistic_nodes,
                                             const GraphDelta& d, RankMethod method, double gamma,
                                             const PolicyBuilder& policy,
                                             const RewardBuilder& rewards, double tol) {
    AltruismReport rep;
    std::unordered_set<std::uint64_t> inside(altruistic_nodes.begin(), altruistic_nodes.end());

    for (auto id : altruistic_nodes)
        if (!g.internal_index(id))
            throw ValidationError("altruistic node " + std::to_string(id) + " not in graph");

    auto check_incoming = [&](const LinkGraph& graph, const char* which) {
        for (auto id : altruistic_nodes) {
            auto idx = graph.internal_index(id);
            if (!idx) continue;
            for (std::uint32_t p : graph.predecessors(*idx)) {
                if (!inside.count(graph.external_id(p)))
                    rep.violations.push_back("incoming link " +
                                             std::to_string(graph.external_id(p)) + "->" +
                                             std::to_string(id) + " in " + which + " graph");
            }
        }
    };
    check_incoming(g, "base");

    for (auto id : d.removed_nodes)
        if (inside.count(id))
            rep.violations.push_back("delta removes altruistic node " + std::to_string(id));
    auto check_edges = [&](const std::vector<ExtEdge>& edges, const char* verb) {
        for (const auto& [a, b] : edges)
            if (inside.count(b))
                rep.violations.push_back(std::string("delta ") + verb + " link " +
                                         std::to_string(a) + "->" + std::to_string(b) +
                                         " into the altruistic set");
    };
    check_edges(d.added_edges, "adds");
    check_edges(d.removed_edges, "removes");

    LinkGraph after = apply_delta(g, d);
    check_incoming(after, "updated");
    rep.altruism_preserved = rep.violations.empty();

    auto before_scores = rank_with(g, method, gamma, tol, policy, rewards);
    auto after_scores = rank_with(after, method, gamma, tol, policy, rewards);
    for (auto id : altruistic_nodes) {
        auto bi = g.internal_index(id);
        auto ai = after.internal_index(id);
        if (!bi || !ai) continue; // removal already flagged above
        rep.max_change =
            std::max(rep.max_change, std::abs(before_scores[*bi] - after_scores[*ai]));
    }
    return rep;
}

LocalityReport link_deletion_locality(const LinkGraph& g, ExtEdge edge, double gamma,
                                      const PolicyBuilder& policy, const RewardBuilder& rewards,
                                      double tol) {
    auto src = g.internal_index(edge.first);
    auto dst = g.internal_index(edge.second);
    if (!src || !dst || !g.has_edge(*src, *dst))
        throw ValidationError("edge " + std::to_string(edge.first) + "->" +
                              std::to_string(edge.second) + " not in graph");

    GraphDelta d;
    d.removed_edges.push_back(edge);
    LinkGraph after = apply_delta(g, d);

    auto before_scores = rank_with(g, RankMethod::Reinforcement, gamma, tol, policy, rewards);
    auto after_scores = rank_with(after, RankMethod::Reinforcement, gamma, tol, policy, rewards);

    // Forward reachability from the source in one or more steps, over the
    // base graph (the deleted edge included: its old downstream may lose
    // mass). The source joins the set only when a cycle returns to it.
    std::vector<std::uint8_t> reachable(g.node_count(), 0);
    std::queue<std::uint32_t> q;
    for (std::uint32_t j : g.successors(*src)) {
        if (!reachable[j]) {
            reachable[j] = 1;
            q.push(j);
        }
    }
    while (!q.empty()) {
        std::uint32_t i = q.front();
        q.pop();
        for (std::uint32_t j : g.successors(i)) {
            if (!reachable[j]) {
                reachable[j] = 1;
                q.push(j);
            }
        }
    }

    LocalityReport rep;
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        std::uint64_t ext = g.external_id(i);
        double change = std::abs(before_scores[i] - after_scores[*after.internal_index(ext)]);
        rep.change_by_id.emplace_back(ext, change);
        if (reachable[i]) {
            rep.may_change.push_back(ext);
            rep.max_change_reachable = std::max(rep.max_change_reachable, change);
        } else {
            rep.max_change_unreachable = std::max(rep.max_change_unreachable, change);
        }
    }
    std::sort(rep.may_change.begin(), rep.may_change.end());
    return rep;
}

} // namespace linkrank
