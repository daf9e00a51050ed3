#include "linkrank/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "linkrank/errors.hpp"

namespace linkrank {

namespace {

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

// Jacobi-style sweep: each node's update reads only the previous iterate,
// so chunks are independent. Per-node accumulation stays in ascending
// predecessor order, which keeps results identical for any thread count.
template <class Body>
void for_each_node(std::uint32_t n, unsigned threads, Body&& body) {
    if (threads <= 1 || n < 4096) {
        for (std::uint32_t i = 0; i < n; ++i) body(i);
        return;
    }
    unsigned t = std::min<unsigned>(threads, (n + 4095) / 4096);
    std::uint32_t chunk = (n + t - 1) / t;
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned w = 0; w < t; ++w) {
        std::uint32_t lo = w * chunk;
        std::uint32_t hi = std::min<std::uint32_t>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::uint32_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

void IterationConfig::validate() const {
    if (!(discount > 0.0) || !(discount < 1.0))
        throw ConfigError("discount/damping must lie in (0,1), got " + std::to_string(discount));
    if (!(tolerance > 0.0))
        throw ConfigError("tolerance must be positive, got " + std::to_string(tolerance));
    if (max_iterations == 0) throw ConfigError("max_iterations must be positive");
    if (threads == 0) throw ConfigError("threads must be at least 1");
}

void validate_probability_vector(std::span<const double> v, std::size_t n, const char* name) {
    if (v.size() != n)
        throw ConfigError(std::string(name) + " has " + std::to_string(v.size()) +
                          " entries, graph has " + std::to_string(n) + " nodes");
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw ConfigError(std::string(name) + " has a negative or non-finite entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ConfigError(std::string(name) + " must sum to 1 within 1e-12, sums to " +
                          std::to_string(sum));
}

Policy::Policy(const LinkGraph& g, std::vector<double> forward_weights)
    : graph_(&g), fwd_weights_(std::move(forward_weights)) {
    if (fwd_weights_.size() != g.edge_count())
        throw ConfigError("policy weight count " + std::to_string(fwd_weights_.size()) +
                          " does not match edge count " + std::to_string(g.edge_count()));

    auto off = g.forward_offsets();
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        double sum = 0.0;
        for (std::uint32_t k = off[i]; k < off[i + 1]; ++k) {
            double w = fwd_weights_[k];
            if (!(w >= 0.0) || !std::isfinite(w))
                throw ConfigError("policy weight on edge from node " +
                                  std::to_string(g.external_id(i)) + " is negative or non-finite");
            sum += w;
        }
        // Dangling rows have no slots and therefore sum 0 by construction.
        if (g.out_degree(i) > 0 && std::abs(sum - 1.0) > 1e-12)
            throw ConfigError("policy row for node " + std::to_string(g.external_id(i)) +
                              " sums to " + std::to_string(sum) + ", expected 1");
    }

    // Scatter forward weights onto the reverse CSR. Walking sources in
    // ascending order fills each reverse row front to back, matching its
    // sorted layout.
    rev_weights_.resize(fwd_weights_.size());
    auto roff = g.reverse_offsets();
    std::vector<std::uint32_t> cursor(roff.begin(), roff.end() - 1);
    auto tgt = g.forward_targets();
    for (std::uint32_t i = 0; i < g.node_count(); ++i)
        for (std::uint32_t k = off[i]; k < off[i + 1]; ++k)
            rev_weights_[cursor[tgt[k]]++] = fwd_weights_[k];
}

double Policy::weight(std::uint32_t src, std::uint32_t dst) const {
    auto slot = graph_->forward_slot(src, dst);
    return slot ? fwd_weights_[*slot] : 0.0;
}

Policy uniform_policy(const LinkGraph& g) {
    std::vector<double> w(g.edge_count());
    auto off = g.forward_offsets();
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        std::uint32_t deg = g.out_degree(i);
        for (std::uint32_t k = off[i]; k < off[i + 1]; ++k) w[k] = 1.0 / deg;
    }
    return Policy(g, std::move(w));
}

RewardVector uniform_rewards(const LinkGraph& g, double value) {
    if (!std::isfinite(value)) throw ConfigError("reward value must be finite");
    return RewardVector{std::vector<double>(g.node_count(), value)};
}

RankResult reinforcement_rank(const LinkGraph& g, const Policy& p, const RewardVector& r,
                              const IterationConfig& cfg, const std::vector<double>* reference,
                              const IterationObserver& observer) {
    cfg.validate();
    const std::uint32_t n = g.node_count();
    if (&p.graph() != &g) throw ConfigError("policy was built for a different graph");
    if (r.values.size() != n)
        throw ConfigError("reward vector has " + std::to_string(r.values.size()) +
                          " entries, graph has " + std::to_string(n) + " nodes");
    if (cfg.init_scores && cfg.init_scores->size() != n)
        throw ConfigError("init scores size does not match graph");
    if (reference && reference->size() != n)
        throw ConfigError("reference scores size does not match graph");

    const double gamma = cfg.discount;
    std::vector<double> prev = cfg.init_scores ? *cfg.init_scores : r.values;
    std::vector<double> next(n);

    const double ref_norm = reference ? l1_norm(*reference) : 0.0;
    auto rel_error = [&](std::span<const double> x) -> std::optional<double> {
        if (!reference) return std::nullopt;
        return l1_distance(x, *reference) / (ref_norm > 0.0 ? ref_norm : 1.0);
    };

    RankResult out;
    out.trace.rows.reserve(std::min<std::size_t>(cfg.max_iterations, 1024));
    if (observer) observer(0, prev);

    auto roff = g.reverse_offsets();
    auto rsrc = g.reverse_sources();
    auto rw = p.reverse_weights();

    for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
        for_each_node(n, cfg.threads, [&](std::uint32_t s) {
            double acc = 0.0;
            for (std::uint32_t k = roff[s]; k < roff[s + 1]; ++k)
                acc += rw[k] * prev[rsrc[k]];
            next[s] = gamma * acc + r.values[s];
        });

        double step = l1_distance(next, prev);
        if (!std::isfinite(step))
            throw NumericalError("non-finite value at iteration " + std::to_string(iter));
        double prev_norm = l1_norm(prev);

        out.trace.rows.push_back({iter, step, rel_error(next)});
        if (observer) observer(iter, next);
        prev.swap(next);

        if (step <= cfg.tolerance * prev_norm) {
            out.trace.converged = true;
            out.trace.iterations_used = iter;
            break;
        }
    }
    if (!out.trace.converged) out.trace.iterations_used = cfg.max_iterations;

    out.scores = ScoreVector{std::move(prev), ScoreKind::Authority};
    return out;
}

RankResult pagerank(const LinkGraph& g, const IterationConfig& cfg,
                    const std::vector<double>& teleport, const std::vector<double>* dangling,
                    const std::vector<double>* reference, const IterationObserver& observer) {
    cfg.validate();
    const std::uint32_t n = g.node_count();
    validate_probability_vector(teleport, n, "teleportation vector");
    if (dangling) validate_probability_vector(*dangling, n, "dangling distribution");
    if (cfg.init_scores && cfg.init_scores->size() != n)
        throw ConfigError("init scores size does not match graph");
    if (reference && reference->size() != n)
        throw ConfigError("reference scores size does not match graph");

    const double c = cfg.discount;
    const bool omega_form = dangling == nullptr || *dangling == teleport;

    std::vector<std::uint32_t> dangling_nodes;
    if (!omega_form)
        for (std::uint32_t i = 0; i < n; ++i)
            if (g.is_dangling(i)) dangling_nodes.push_back(i);

    // Reverse-aligned H weights: 1/out_degree of the source.
    std::vector<double> rev_h(g.edge_count());
    {
        auto rsrc = g.reverse_sources();
        for (std::size_t k = 0; k < rev_h.size(); ++k) rev_h[k] = 1.0 / g.out_degree(rsrc[k]);
    }

    std::vector<double> x = cfg.init_scores ? *cfg.init_scores : teleport;
    std::vector<double> y(n);

    const double ref_norm = reference ? l1_norm(*reference) : 0.0;
    auto rel_error = [&](std::span<const double> v) -> std::optional<double> {
        if (!reference) return std::nullopt;
        return l1_distance(v, *reference) / (ref_norm > 0.0 ? ref_norm : 1.0);
    };

    RankResult out;
    if (observer) observer(0, x);

    auto roff = g.reverse_offsets();
    auto rsrc = g.reverse_sources();

    for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
        for_each_node(n, cfg.threads, [&](std::uint32_t s) {
            double acc = 0.0;
            for (std::uint32_t k = roff[s]; k < roff[s + 1]; ++k)
                acc += rev_h[k] * x[rsrc[k]];
            y[s] = c * acc;
        });

        double x_norm = l1_norm(x);
        if (omega_form) {
            double omega = x_norm - l1_norm(y);
            for (std::uint32_t s = 0; s < n; ++s) y[s] += omega * teleport[s];
        } else {
            double dangling_mass = 0.0;
            for (std::uint32_t i : dangling_nodes) dangling_mass += x[i];
            double teleport_mass = (1.0 - c) * x_norm;
            for (std::uint32_t s = 0; s < n; ++s)
                y[s] += c * dangling_mass * (*dangling)[s] + teleport_mass * teleport[s];
        }

        double step = l1_distance(y, x);
        if (!std::isfinite(step))
            throw NumericalError("non-finite value at iteration " + std::to_string(iter));

        out.trace.rows.push_back({iter, step, rel_error(y)});
        if (observer) observer(iter, y);
        x.swap(y);

        if (step <= cfg.tolerance * x_norm) {
            out.trace.converged = true;
            out.trace.iterations_used = iter;
            break;
        }
    }
    if (!out.trace.converged) out.trace.iterations_used = cfg.max_iterations;

    double sum = 0.0;
    for (double v : x) sum += v;
    if (sum > 0.0)
        for (double& v : x) v /= sum;

    out.scores = ScoreVector{std::move(x), ScoreKind::PageRank};
    return out;
}

ScoreVector truncated_rank(const LinkGraph& g, const Policy& p, const RewardVector& r,
                           double gamma, std::uint32_t depth) {
    if (!(gamma >= 0.0) || !(gamma < 1.0))
        throw ConfigError("gamma must lie in [0,1), got " + std::to_string(gamma));
    const std::uint32_t n = g.node_count();
    if (&p.graph() != &g) throw ConfigError("policy was built for a different graph");
    if (r.values.size() != n) throw ConfigError("reward vector size does not match graph");

    std::vector<double> acc = r.values; // j = 0 term
    std::vector<double> hist = r.values;
    std::vector<double> next(n);

    auto roff = g.reverse_offsets();
    auto rsrc = g.reverse_sources();
    auto rw = p.reverse_weights();

    double scale = 1.0;
    for (std::uint32_t j = 1; j <= depth; ++j) {
        for (std::uint32_t s = 0; s < n; ++s) {
            double a = 0.0;
            for (std::uint32_t k = roff[s]; k < roff[s + 1]; ++k) a += rw[k] * hist[rsrc[k]];
            next[s] = a;
        }
        hist.swap(next);
        scale *= gamma;
        for (std::uint32_t s = 0; s < n; ++s) acc[s] += scale * hist[s];
    }
    return ScoreVector{std::move(acc), ScoreKind::Truncated};
}

double residual(const LinkGraph& g, const Policy& p, const RewardVector& r, double gamma,
                const ScoreVector& scores) {
    const std::uint32_t n = g.node_count();
    if (&p.graph() != &g) throw ConfigError("policy was built for a different graph");
    if (r.values.size() != n || scores.values.size() != n)
        throw ConfigError("dimension mismatch in residual");

    auto roff = g.reverse_offsets();
    auto rsrc = g.reverse_sources();
    auto rw = p.reverse_weights();

    double worst = 0.0;
    for (std::uint32_t s = 0; s < n; ++s) {
        double acc = 0.0;
        for (std::uint32_t k = roff[s]; k < roff[s + 1]; ++k)
            acc += rw[k] * scores.values[rsrc[k]];
        worst = std::max(worst, std::abs(scores.values[s] - (gamma * acc + r.values[s])));
    }
    return worst;
}

} // namespace linkrank
