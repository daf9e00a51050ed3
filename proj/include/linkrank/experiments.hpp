#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "linkrank/graph.hpp"
#include "linkrank/ranking.hpp"

namespace linkrank {

enum class RankMethod { PageRank, Reinforcement };
enum class InitKind { Default, Warm };

std::string to_string(RankMethod m);
std::string to_string(InitKind k);

/// The harness functions recompute scores on several related graphs, so
/// they take builders rather than fixed Policy/RewardVector objects: the
/// builder is applied to each graph, which also realizes the row
/// renormalization an edge deletion implies. Builders must key off
/// external structure (uniform weights, or hashes of external ids) so the
/// same nodes get the same treatment on every graph.
using PolicyBuilder = std::function<Policy(const LinkGraph&)>;
using RewardBuilder = std::function<RewardVector(const LinkGraph&)>;

PolicyBuilder uniform_policy_builder();
RewardBuilder uniform_reward_builder(double value = 1.0);

/// One evolution step, all percentages relative to the pre-step snapshot.
struct EvolutionStep {
    double add_nodes_pct = 0.0;
    double del_nodes_pct = 0.0;
    double add_links_pct = 0.0;
    double del_links_pct = 0.0;
};

/// Synthetic stand-in for a sequence of crawl snapshots: a preferential-
/// attachment base graph followed by percentage-sized add/delete steps.
struct EvolutionSpec {
    std::uint64_t seed = 1;
    std::uint32_t base_nodes = 1000;
    double base_edge_factor = 4.0; // average out-degree of the base graph
    std::vector<EvolutionStep> steps;
};

struct Evolution {
    std::vector<LinkGraph> snapshots; // steps.size() + 1 entries
    std::vector<GraphDelta> deltas;   // deltas[i]: snapshots[i] -> snapshots[i+1]
};

/// Deterministic given the seed. Realized add/delete counts land within
/// one item of the requested percentages (forced deletions of edges
/// incident to removed nodes can push link deletions above the request).
/// New nodes attach with preferential-attachment-biased targets, so
/// in-degrees stay skewed the way real webs are.
Evolution generate_evolution(const EvolutionSpec& spec);

/// Loads {seed, base_nodes, base_edge_factor, steps:[{add_nodes_pct,...}]}
/// from JSON.
EvolutionSpec load_evolution_spec(const std::filesystem::path& path);

struct UpdateExperimentResult {
    RankMethod method = RankMethod::Reinforcement;
    InitKind init_kind = InitKind::Default;
    std::string pair; // "initializer->target" snapshot indices
    std::size_t iterations_to_tol = 0;
    bool converged = false;
    double initial_rel_error = 0.0;
    ConvergenceTrace trace;
};

/// The (initializer, target) pairs measured for a given snapshot count:
/// the two most recent consecutive pairs, second-newest to newest, and
/// oldest to newest — four pairs from four snapshots, deduplicated for
/// shorter histories.
std::vector<std::pair<std::size_t, std::size_t>> default_experiment_pairs(std::size_t count);

/// For every (initializer, target) pair: solve the target to tol 1e-12 as
/// the reference, then run the method from the default init and from the
/// initializer's converged scores (mapped by external id; unmatched new
/// nodes start at the default init value, and a warm PageRank vector is
/// renormalized to sum 1). Traces carry the per-iteration relative error
/// against the reference. Non-convergence is recorded, not fatal.
std::vector<UpdateExperimentResult> run_update_experiment(
    std::span<const LinkGraph> snapshots, RankMethod method, double discount, double tol,
    std::vector<std::pair<std::size_t, std::size_t>> pairs = {},
    std::size_t max_iterations = 100000);

/// "method,init_kind,pair,iterations_to_tol,initial_rel_error" rows.
void write_experiment_summary_csv(std::span<const UpdateExperimentResult> results,
                                  const std::filesystem::path& path);

/// Scores of a disjoint union against the concatenation of per-component
/// scores. Reinforcement ranking decomposes exactly; PageRank does not,
/// teleportation couples the components.
struct DisjointIndependenceReport {
    double max_discrepancy = 0.0;
    std::uint32_t union_nodes = 0;
};

/// Throws ValidationError if the two graphs share external ids.
DisjointIndependenceReport check_disjoint_independence(
    const LinkGraph& g1, const LinkGraph& g2, RankMethod method, double gamma,
    const PolicyBuilder& policy = uniform_policy_builder(),
    const RewardBuilder& rewards = uniform_reward_builder(), double tol = 1e-12);

/// Score movement of a node set with no incoming links under a delta that
/// is supposed to touch only the outside world.
struct AltruismReport {
    bool altruism_preserved = true;       // precondition verdict
    std::vector<std::string> violations;  // why it is not altruism-preserving
    double max_change = 0.0;              // L-inf over the altruistic set
};

AltruismReport check_altruistic_independence(
    const LinkGraph& g, std::span<const std::uint64_t> altruistic_nodes, const GraphDelta& d,
    RankMethod method, double gamma, const PolicyBuilder& policy = uniform_policy_builder(),
    const RewardBuilder& rewards = uniform_reward_builder(), double tol = 1e-12);

/// Effect of deleting one edge. The deletion renormalizes the source
/// row's remaining out-weights, so every node forward-reachable from the
/// source (in one or more steps) may move; the complement must not.
struct LocalityReport {
    std::vector<std::uint64_t> may_change; // external ids, sorted
    double max_change_reachable = 0.0;
    double max_change_unreachable = 0.0;
    std::vector<std::pair<std::uint64_t, double>> change_by_id;
};

LocalityReport link_deletion_locality(const LinkGraph& g, ExtEdge edge, double gamma,
                                      const PolicyBuilder& policy = uniform_policy_builder(),
                                      const RewardBuilder& rewards = uniform_reward_builder(),
                                      double tol = 1e-12);

/// Disjoint union of two graphs with non-overlapping external id sets.
LinkGraph merge_disjoint(const LinkGraph& g1, const LinkGraph& g2);

} // namespace linkrank
