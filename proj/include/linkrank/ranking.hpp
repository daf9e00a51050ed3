#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "linkrank/graph.hpp"

namespace linkrank {

/// Row-(sub)stochastic transition weights over a graph's out-links.
///
/// Every non-dangling row sums to 1 within 1e-12; dangling rows stay empty
/// with sum 0 and receive no patching. Weights are kept twice: aligned
/// with the forward CSR (for row operations) and scattered onto the
/// reverse CSR (what the backward iteration actually reads).
class Policy {
public:
    /// forward_weights[k] belongs to the k-th forward CSR slot of g.
    /// Throws ConfigError if a non-dangling row misses the sum-1 contract.
    Policy(const LinkGraph& g, std::vector<double> forward_weights);

    const LinkGraph& graph() const { return *graph_; }
    std::span<const double> out_weights(std::uint32_t i) const {
        auto off = graph_->forward_offsets();
        return {fwd_weights_.data() + off[i], fwd_weights_.data() + off[i + 1]};
    }
    std::span<const double> forward_weights() const { return fwd_weights_; }
    /// Weights aligned with the reverse CSR: reverse_weights()[k] is
    /// P(p, s) for the k-th reverse slot (s <- p).
    std::span<const double> reverse_weights() const { return rev_weights_; }

    double weight(std::uint32_t src, std::uint32_t dst) const;

private:
    const LinkGraph* graph_;
    std::vector<double> fwd_weights_;
    std::vector<double> rev_weights_;
};

/// Uniform random-surfer policy: 1/out_degree on every out-link.
Policy uniform_policy(const LinkGraph& g);

/// Per-node intrinsic reward. All entries must be finite; sign is free.
struct RewardVector {
    std::vector<double> values;
};

/// Constant reward vector, 1.0 per node by default.
RewardVector uniform_rewards(const LinkGraph& g, double value = 1.0);

enum class ScoreKind { Authority, PageRank, Truncated };

/// Per-node scores: authority fixed point, PageRank stationary
/// distribution, or a truncated k-step partial sum.
struct ScoreVector {
    std::vector<double> values;
    ScoreKind kind = ScoreKind::Authority;
};

struct IterationConfig {
    double discount = 0.85;      // gamma for authority, damping c for PageRank
    double tolerance = 1e-10;    // relative L1 step threshold
    std::size_t max_iterations = 10000;
    std::optional<std::vector<double>> init_scores; // default init when absent
    unsigned threads = 1;

    void validate() const; // throws ConfigError
};

struct TraceRow {
    std::size_t iteration = 0;
    double l1_residual = 0.0;
    std::optional<double> rel_error; // vs supplied reference, L1-relative
};

struct ConvergenceTrace {
    std::vector<TraceRow> rows;
    bool converged = false;
    std::size_t iterations_used = 0;
};

struct RankResult {
    ScoreVector scores;
    ConvergenceTrace trace;
};

/// Called with the initial vector (iteration 0) and after every update.
using IterationObserver = std::function<void(std::size_t iteration, std::span<const double>)>;

inline constexpr std::uint32_t kDefaultDenseCap = 2000;

/// Backward fixed-point iteration for the authority score:
///   R_{k+1}(s) = discount * sum over predecessors p of P(p,s) R_k(p) + r(s)
/// computed through the reverse adjacency; dangling rows need no special
/// treatment. Default init R_0 = r. Stops when the L1 step falls below
/// tolerance * ||R_k||_1. With a reference, each trace row records
/// ||R_k - ref||_1 / ||ref||_1.
RankResult reinforcement_rank(const LinkGraph& g, const Policy& p, const RewardVector& r,
                              const IterationConfig& cfg,
                              const std::vector<double>* reference = nullptr,
                              const IterationObserver& observer = {});

/// Structured PageRank power iteration on G = cS + (1-c)ev^T, S = H + au^T:
///   x_{k+1} = c H^T x_k;  omega = ||x_k||_1 - ||x_{k+1}||_1;  x_{k+1} += omega v
/// when u == v (pass dangling == nullptr). With a distinct u, the dangling
/// mass c(a^T x_k) goes to u and the teleport mass (1-c)||x_k||_1 to v, so
/// the iterate equals G^T x_k exactly either way. Default init x_0 = v.
/// The returned vector is normalized to sum 1.
RankResult pagerank(const LinkGraph& g, const IterationConfig& cfg,
                    const std::vector<double>& teleport,
                    const std::vector<double>* dangling = nullptr,
                    const std::vector<double>* reference = nullptr,
                    const IterationObserver& observer = {});

/// Partial sum R_k = sum_{j=0..depth} gamma^j r^(j), where r^(j) is one
/// reverse propagation of r^(j-1).
ScoreVector truncated_rank(const LinkGraph& g, const Policy& p, const RewardVector& r,
                           double gamma, std::uint32_t depth);

/// Dense direct solve of (I - gamma P^T) R = r. Ground-truth oracle for
/// desk-scale graphs; refuses node counts above dense_cap.
ScoreVector exact_solve_rr(const LinkGraph& g, const Policy& p, const RewardVector& r,
                           double gamma, std::uint32_t dense_cap = kDefaultDenseCap);

/// Dense stationary distribution of the explicit G matrix, sum 1.
ScoreVector exact_solve_pagerank(const LinkGraph& g, double damping,
                                 const std::vector<double>& teleport,
                                 const std::vector<double>* dangling = nullptr,
                                 std::uint32_t dense_cap = kDefaultDenseCap);

/// Fixed-point defect ||R - (gamma P^T R + r)||_inf.
double residual(const LinkGraph& g, const Policy& p, const RewardVector& r, double gamma,
                const ScoreVector& scores);

/// Throws ConfigError unless v has n nonnegative entries summing to 1
/// within 1e-12.
void validate_probability_vector(std::span<const double> v, std::size_t n, const char* name);

} // namespace linkrank
