// Command-line front door: rank, oracle, update-experiment, compare.
//
// Exit codes: 0 success/converged, 1 usage or input errors,
// 2 max-iterations hit without convergence, 3 dense-solve cap exceeded.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linkrank/compare.hpp"
#include "linkrank/csv.hpp"
#include "linkrank/errors.hpp"
#include "linkrank/experiments.hpp"
#include "linkrank/graph.hpp"
#include "linkrank/manifest.hpp"
#include "linkrank/ranking.hpp"

namespace lr = linkrank;
namespace fs = std::filesystem;

namespace {

std::uint32_t dense_cap_from_env(std::uint32_t fallback) {
    if (const char* s = std::getenv("LINKRANK_DENSE_CAP")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(s, &end, 10);
        if (end != s && *end == '\0' && v > 0) return static_cast<std::uint32_t>(v);
        std::cerr << "warning: ignoring bad LINKRANK_DENSE_CAP value \"" << s << "\"\n";
    }
    return fallback;
}

struct RankArgs {
    std::string graph;
    std::string nodes;
    std::string method = "rr";
    double discount = 0.85;
    std::string rewards;
    std::string teleport;
    std::string dangling_dist;
    std::uint32_t depth = 3;
    std::string init_scores;
    double tol = 1e-10;
    std::size_t max_iters = 10000;
    unsigned threads = 1;
    bool deterministic = false;
    std::string scores_out = "scores.csv";
    std::string trace_out;
    std::string ref_scores;
    std::string idmap_out;
};

struct OracleArgs {
    std::string graph;
    std::string nodes;
    std::string method = "rr";
    double discount = 0.85;
    std::string rewards;
    std::string teleport;
    std::string dangling_dist;
    std::uint32_t dense_cap = dense_cap_from_env(lr::kDefaultDenseCap);
    std::string scores_out = "scores.csv";
    std::string idmap_out;
};

struct UpdateArgs {
    std::vector<std::string> snapshots;
    std::string synthetic;
    std::string method = "both";
    double discount = 0.85;
    double tol = 1e-10;
    std::size_t max_iters = 100000;
    std::string out_dir = "experiment-out";
};

struct CompareArgs {
    std::string graph;
    std::string nodes;
    std::string a;
    std::string b;
    std::size_t k = 20;
    std::string a_top_out;
    std::string b_top_out;
};

lr::LinkGraph load_graph_arg(const std::string& graph, const std::string& nodes,
                             lr::RunManifest& man) {
    man.add_input(graph);
    std::optional<fs::path> manifest_path;
    if (!nodes.empty()) {
        manifest_path = nodes;
        man.add_input(nodes);
    }
    return lr::load_graph(graph, manifest_path);
}

// Reads a per-node value CSV; absent nodes take default_value.
std::vector<double> read_values(const lr::LinkGraph& g, const std::string& path,
                                double default_value, lr::RunManifest& man) {
    man.add_input(path);
    return lr::values_for_graph(g, lr::read_value_map_csv(path), default_value);
}

// Reference scores must cover every node: a partial reference would make
// the reported relative errors meaningless.
std::vector<double> read_full_scores(const lr::LinkGraph& g, const std::string& path,
                                     lr::RunManifest& man) {
    man.add_input(path);
    auto by_id = lr::read_value_map_csv(path);
    std::vector<double> out(g.node_count());
    std::size_t missing = 0;
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        auto it = by_id.find(g.external_id(i));
        if (it == by_id.end()) {
            ++missing;
            continue;
        }
        out[i] = it->second;
    }
    if (missing > 0)
        throw lr::ValidationError(path + " is missing scores for " + std::to_string(missing) +
                                  " node(s)");
    return out;
}

int run_rank(const RankArgs& a) {
    lr::RunManifest man;
    man.subcommand = "rank";
    man.flags = {{"method", a.method},
                 {"gamma", lr::format_double(a.discount)},
                 {"depth", std::to_string(a.depth)},
                 {"tol", lr::format_double(a.tol)},
                 {"max-iters", std::to_string(a.max_iters)},
                 {"threads", std::to_string(a.threads)},
                 {"deterministic", a.deterministic ? "true" : "false"},
                 {"graph", a.graph},
                 {"scores-out", a.scores_out}};
    if (!a.nodes.empty()) man.flags["nodes"] = a.nodes;
    if (!a.rewards.empty()) man.flags["rewards"] = a.rewards;
    if (!a.teleport.empty()) man.flags["teleport"] = a.teleport;
    if (!a.dangling_dist.empty()) man.flags["dangling-dist"] = a.dangling_dist;
    if (!a.init_scores.empty()) man.flags["init-scores"] = a.init_scores;
    if (!a.trace_out.empty()) man.flags["trace-out"] = a.trace_out;
    if (!a.ref_scores.empty()) man.flags["ref-scores"] = a.ref_scores;
    if (!a.idmap_out.empty()) man.flags["idmap-out"] = a.idmap_out;

    lr::LinkGraph g = load_graph_arg(a.graph, a.nodes, man);

    lr::IterationConfig cfg;
    cfg.discount = a.discount;
    cfg.tolerance = a.tol;
    cfg.max_iterations = a.max_iters;
    cfg.threads = a.deterministic ? 1 : a.threads;

    std::optional<std::vector<double>> reference;
    if (!a.ref_scores.empty()) reference = read_full_scores(g, a.ref_scores, man);
    const std::vector<double>* ref_ptr = reference ? &*reference : nullptr;

    lr::ScoreVector scores;
    lr::ConvergenceTrace trace;
    bool iterative = true;

    if (a.method == "pagerank") {
        std::vector<double> v = a.teleport.empty()
                                    ? std::vector<double>(g.node_count(), 1.0 / g.node_count())
                                    : read_values(g, a.teleport, 0.0, man);
        std::optional<std::vector<double>> u;
        if (!a.dangling_dist.empty()) u = read_values(g, a.dangling_dist, 0.0, man);
        if (!a.init_scores.empty()) {
            auto init = read_values(g, a.init_scores, 0.0, man);
            double sum = 0.0;
            for (double x : init) sum += x;
            if (sum <= 0.0) throw lr::ConfigError("init scores must have positive total mass");
            for (double& x : init) x /= sum;
            cfg.init_scores = std::move(init);
        }
        auto res = lr::pagerank(g, cfg, v, u ? &*u : nullptr, ref_ptr);
        scores = std::move(res.scores);
        trace = std::move(res.trace);
    } else {
        lr::Policy pol = lr::uniform_policy(g);
        lr::RewardVector rew{a.rewards.empty() ? std::vector<double>(g.node_count(), 1.0)
                                               : read_values(g, a.rewards, 1.0, man)};
        if (a.method == "rr-truncated") {
            scores = lr::truncated_rank(g, pol, rew, a.discount, a.depth);
            trace.converged = true;
            iterative = false;
        } else {
            if (!a.init_scores.empty()) {
                auto by_id = lr::read_value_map_csv(a.init_scores);
                man.add_input(a.init_scores);
                auto init = rew.values;
                for (std::uint32_t i = 0; i < g.node_count(); ++i) {
                    auto it = by_id.find(g.external_id(i));
                    if (it != by_id.end()) init[i] = it->second;
                }
                cfg.init_scores = std::move(init);
            }
            auto res = lr::reinforcement_rank(g, pol, rew, cfg, ref_ptr);
            scores = std::move(res.scores);
            trace = std::move(res.trace);
        }
    }

    lr::write_scores_csv(g, scores, a.scores_out);
    man.write_beside(a.scores_out);
    if (!a.trace_out.empty()) {
        lr::write_trace_csv(trace, a.trace_out);
        man.write_beside(a.trace_out);
    }
    if (!a.idmap_out.empty()) {
        lr::save_id_map(g, a.idmap_out);
        man.write_beside(a.idmap_out);
    }

    if (iterative && !trace.converged) {
        std::cerr << "not converged after " << trace.iterations_used << " iterations\n";
        return 2;
    }
    std::cerr << "wrote " << a.scores_out << " (" << g.node_count() << " nodes, "
              << trace.iterations_used << " iterations)\n";
    return 0;
}

int run_oracle(const OracleArgs& a) {
    lr::RunManifest man;
    man.subcommand = "oracle";
    man.flags = {{"method", a.method},
                 {"gamma", lr::format_double(a.discount)},
                 {"dense-cap", std::to_string(a.dense_cap)},
                 {"graph", a.graph},
                 {"scores-out", a.scores_out}};
    if (!a.nodes.empty()) man.flags["nodes"] = a.nodes;
    if (!a.rewards.empty()) man.flags["rewards"] = a.rewards;
    if (!a.teleport.empty()) man.flags["teleport"] = a.teleport;
    if (!a.dangling_dist.empty()) man.flags["dangling-dist"] = a.dangling_dist;

    lr::LinkGraph g = load_graph_arg(a.graph, a.nodes, man);

    lr::ScoreVector scores;
    if (a.method == "pagerank") {
        std::vector<double> v = a.teleport.empty()
                                    ? std::vector<double>(g.node_count(), 1.0 / g.node_count())
                                    : read_values(g, a.teleport, 0.0, man);
        std::optional<std::vector<double>> u;
        if (!a.dangling_dist.empty()) u = read_values(g, a.dangling_dist, 0.0, man);
        scores = lr::exact_solve_pagerank(g, a.discount, v, u ? &*u : nullptr, a.dense_cap);
    } else {
        lr::Policy pol = lr::uniform_policy(g);
        lr::RewardVector rew{a.rewards.empty() ? std::vector<double>(g.node_count(), 1.0)
                                               : read_values(g, a.rewards, 1.0, man)};
        scores = lr::exact_solve_rr(g, pol, rew, a.discount, a.dense_cap);
    }

    lr::write_scores_csv(g, scores, a.scores_out);
    man.write_beside(a.scores_out);
    if (!a.idmap_out.empty()) {
        lr::save_id_map(g, a.idmap_out);
        man.write_beside(a.idmap_out);
    }
    std::cerr << "wrote " << a.scores_out << " (exact, " << g.node_count() << " nodes)\n";
    return 0;
}

std::string pair_slug(const std::string& pair) {
    std::string s = pair;
    auto pos = s.find("->");
    if (pos != std::string::npos) s.replace(pos, 2, "-");
    return s;
}

int run_update(const UpdateArgs& a) {
    if (a.snapshots.empty() == a.synthetic.empty())
        throw lr::ConfigError("provide either --snapshots (two or more) or --synthetic");

    lr::RunManifest man;
    man.subcommand = "update-experiment";
    man.flags = {{"method", a.method},
                 {"gamma", lr::format_double(a.discount)},
                 {"tol", lr::format_double(a.tol)},
                 {"max-iters", std::to_string(a.max_iters)},
                 {"out-dir", a.out_dir}};

    std::vector<lr::LinkGraph> snapshots;
    if (!a.synthetic.empty()) {
        man.flags["synthetic"] = a.synthetic;
        man.add_input(a.synthetic);
        lr::EvolutionSpec spec = lr::load_evolution_spec(a.synthetic);
        man.seed = spec.seed;
        auto evo = lr::generate_evolution(spec);
        snapshots = std::move(evo.snapshots);
    } else {
        if (a.snapshots.size() < 2)
            throw lr::ConfigError("need at least 2 snapshot files, got " +
                                  std::to_string(a.snapshots.size()));
        for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
            man.flags["snapshot." + std::to_string(i)] = a.snapshots[i];
            man.add_input(a.snapshots[i]);
            snapshots.push_back(lr::load_graph(a.snapshots[i]));
        }
    }

    std::vector<lr::UpdateExperimentResult> results;
    auto run_method = [&](lr::RankMethod m) {
        auto r = lr::run_update_experiment(snapshots, m, a.discount, a.tol, {}, a.max_iters);
        results.insert(results.end(), std::make_move_iterator(r.begin()),
                       std::make_move_iterator(r.end()));
    };
    if (a.method == "both" || a.method == "rr") run_method(lr::RankMethod::Reinforcement);
    if (a.method == "both" || a.method == "pagerank") run_method(lr::RankMethod::PageRank);

    fs::create_directories(a.out_dir);
    fs::path summary = fs::path(a.out_dir) / "summary.csv";
    lr::write_experiment_summary_csv(results, summary);
    man.write_beside(summary);
    for (const auto& r : results) {
        fs::path trace = fs::path(a.out_dir) / ("trace_" + lr::to_string(r.method) + "_" +
                                                lr::to_string(r.init_kind) + "_" +
                                                pair_slug(r.pair) + ".csv");
        lr::write_trace_csv(r.trace, trace);
        man.write_beside(trace);
    }

    std::cout << "method,init_kind,pair,iterations_to_tol,initial_rel_error\n";
    for (const auto& r : results)
        std::cout << lr::to_string(r.method) << "," << lr::to_string(r.init_kind) << "," << r.pair
                  << "," << r.iterations_to_tol << "," << lr::format_double(r.initial_rel_error)
                  << "\n";
    std::cerr << "wrote " << summary.string() << " and " << results.size() << " trace files\n";
    return 0;
}

int run_compare(const CompareArgs& a) {
    lr::RunManifest man;
    man.subcommand = "compare";
    man.flags = {{"graph", a.graph}, {"a", a.a}, {"b", a.b}, {"k", std::to_string(a.k)}};
    if (!a.nodes.empty()) man.flags["nodes"] = a.nodes;

    lr::LinkGraph g = load_graph_arg(a.graph, a.nodes, man);
    lr::ScoreVector sa{read_full_scores(g, a.a, man), lr::ScoreKind::Authority};
    lr::ScoreVector sb{read_full_scores(g, a.b, man), lr::ScoreKind::Authority};

    auto agreement = lr::rank_agreement(g, sa, sb, a.k);
    std::cout << "top_k_overlap," << lr::format_double(agreement.top_k_overlap) << "\n"
              << "kendall_tau," << lr::format_double(agreement.kendall_tau) << "\n"
              << "union_size," << agreement.union_size << "\n";

    if (!a.a_top_out.empty()) {
        lr::write_rank_list_csv(lr::top_k(g, sa, a.k), a.a_top_out);
        man.write_beside(a.a_top_out);
    }
    if (!a.b_top_out.empty()) {
        lr::write_rank_list_csv(lr::top_k(g, sb, a.k), a.b_top_out);
        man.write_beside(a.b_top_out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"link-graph authority ranking engine"};
    app.set_version_flag("--version", lr::kToolVersion);
    app.require_subcommand(1);

    RankArgs rank_args;
    auto* rank = app.add_subcommand("rank", "iterative scores for a graph");
    rank->add_option("--graph", rank_args.graph, "edge-list file")->required();
    rank->add_option("--nodes", rank_args.nodes, "node manifest for isolated nodes");
    rank->add_option("--method", rank_args.method, "rr | pagerank | rr-truncated")
        ->check(CLI::IsMember({"rr", "pagerank", "rr-truncated"}));
    rank->add_option("--gamma,--damping", rank_args.discount, "discount/damping in (0,1)");
    rank->add_option("--rewards", rank_args.rewards, "per-node rewards CSV (default 1.0)");
    rank->add_option("--teleport", rank_args.teleport, "teleportation vector CSV");
    rank->add_option("--dangling-dist", rank_args.dangling_dist, "dangling distribution CSV");
    rank->add_option("--depth", rank_args.depth, "history depth for rr-truncated");
    rank->add_option("--init-scores", rank_args.init_scores, "warm-start scores CSV");
    rank->add_option("--tol", rank_args.tol, "relative L1 stopping threshold");
    rank->add_option("--max-iters", rank_args.max_iters, "iteration cap");
    rank->add_option("--threads", rank_args.threads, "parallelism cap");
    rank->add_flag("--deterministic", rank_args.deterministic,
                   "single-threaded, fixed accumulation order");
    rank->add_option("--scores-out", rank_args.scores_out, "output scores CSV");
    rank->add_option("--trace-out", rank_args.trace_out, "output convergence trace CSV");
    rank->add_option("--ref-scores", rank_args.ref_scores, "reference scores for trace rel-error");
    rank->add_option("--idmap-out", rank_args.idmap_out, "write external/internal id map CSV");

    OracleArgs oracle_args;
    auto* oracle = app.add_subcommand("oracle", "exact dense-solve scores for small graphs");
    oracle->add_option("--graph", oracle_args.graph, "edge-list file")->required();
    oracle->add_option("--nodes", oracle_args.nodes, "node manifest for isolated nodes");
    oracle->add_option("--method", oracle_args.method, "rr | pagerank")
        ->check(CLI::IsMember({"rr", "pagerank"}));
    oracle->add_option("--gamma,--damping", oracle_args.discount, "discount/damping");
    oracle->add_option("--rewards", oracle_args.rewards, "per-node rewards CSV");
    oracle->add_option("--teleport", oracle_args.teleport, "teleportation vector CSV");
    oracle->add_option("--dangling-dist", oracle_args.dangling_dist, "dangling distribution CSV");
    oracle->add_option("--dense-cap", oracle_args.dense_cap,
                       "node cap for dense solves (env LINKRANK_DENSE_CAP)");
    oracle->add_option("--scores-out", oracle_args.scores_out, "output scores CSV");
    oracle->add_option("--idmap-out", oracle_args.idmap_out, "write id map CSV");

    UpdateArgs update_args;
    auto* update = app.add_subcommand("update-experiment",
                                      "warm vs default initialization across snapshots");
    update->add_option("--snapshots", update_args.snapshots, "two or more edge-list files");
    update->add_option("--synthetic", update_args.synthetic, "evolution spec JSON");
    update->add_option("--method", update_args.method, "rr | pagerank | both")
        ->check(CLI::IsMember({"rr", "pagerank", "both"}));
    update->add_option("--gamma,--damping", update_args.discount, "discount/damping");
    update->add_option("--tol", update_args.tol, "stopping threshold");
    update->add_option("--max-iters", update_args.max_iters, "iteration cap");
    update->add_option("--out-dir", update_args.out_dir, "output directory");

    CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "top-k agreement between two score files");
    compare->add_option("--graph", compare_args.graph, "edge-list file")->required();
    compare->add_option("--nodes", compare_args.nodes, "node manifest");
    compare->add_option("--a", compare_args.a, "first scores CSV")->required();
    compare->add_option("--b", compare_args.b, "second scores CSV")->required();
    compare->add_option("--k", compare_args.k, "list depth");
    compare->add_option("--a-top-out", compare_args.a_top_out, "write top-k of --a");
    compare->add_option("--b-top-out", compare_args.b_top_out, "write top-k of --b");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*rank) return run_rank(rank_args);
        if (*oracle) return run_oracle(oracle_args);
        if (*update) return run_update(update_args);
        if (*compare) return run_compare(compare_args);
    } catch (const lr::DenseCapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
