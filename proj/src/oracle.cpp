#include <Eigen/Dense>

#include "linkrank/errors.hpp"
#include "linkrank/ranking.hpp"

namespace linkrank {

namespace {

void check_cap(std::uint32_t n, std::uint32_t cap) {
    if (n > cap)
        throw DenseCapError("dense solve refused: " + std::to_string(n) + " nodes exceeds cap " +
                            std::to_string(cap));
}

} // namespace

ScoreVector exact_solve_rr(const LinkGraph& g, const Policy& p, const RewardVector& r,
                           double gamma, std::uint32_t dense_cap) {
    if (!(gamma >= 0.0) || !(gamma < 1.0))
        throw ConfigError("gamma must lie in [0,1), got " + std::to_string(gamma));
    const std::uint32_t n = g.node_count();
    check_cap(n, dense_cap);
    if (&p.graph() != &g) throw ConfigError("policy was built for a different graph");
    if (r.values.size() != n) throw ConfigError("reward vector size does not match graph");

    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    auto off = g.forward_offsets();
    auto tgt = g.forward_targets();
    auto w = p.forward_weights();
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t k = off[i]; k < off[i + 1]; ++k) a(tgt[k], i) -= gamma * w[k];

    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(r.values.data(), n);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    Eigen::VectorXd x = lu.solve(b);
    // One step of iterative refinement; the system is strictly column
    // diagonally dominant, so this drives the defect to machine level.
    x += lu.solve(b - a * x);

    return ScoreVector{std::vector<double>(x.data(), x.data() + n), ScoreKind::Authority};
}

ScoreVector exact_solve_pagerank(const LinkGraph& g, double damping,
                                 const std::vector<double>& teleport,
                                 const std::vector<double>* dangling, std::uint32_t dense_cap) {
    if (!(damping > 0.0) || !(damping < 1.0))
        throw ConfigError("damping must lie in (0,1), got " + std::to_string(damping));
    const std::uint32_t n = g.node_count();
    check_cap(n, dense_cap);
    validate_probability_vector(teleport, n, "teleportation vector");
    const std::vector<double>& u = dangling ? *dangling : teleport;
    if (dangling) validate_probability_vector(u, n, "dangling distribution");

    // G = c(H + a u^T) + (1-c) e v^T, built explicitly.
    Eigen::MatrixXd gmat(n, n);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (g.is_dangling(i)) {
            for (std::uint32_t j = 0; j < n; ++j)
                gmat(i, j) = damping * u[j] + (1.0 - damping) * teleport[j];
        } else {
            double h = damping / g.out_degree(i);
            for (std::uint32_t j = 0; j < n; ++j) gmat(i, j) = (1.0 - damping) * teleport[j];
            for (std::uint32_t j : g.successors(i)) gmat(i, j) += h;
        }
    }

    // Stationary distribution: (I - G^T) pi = 0 with sum(pi) = 1, solved as
    // a stacked least-squares system (exact, the constraint removes the
    // nullspace).
    Eigen::MatrixXd sys(n + 1, n);
    sys.topRows(n) = Eigen::MatrixXd::Identity(n, n) - gmat.transpose();
    sys.bottomRows(1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    Eigen::VectorXd pi = sys.colPivHouseholderQr().solve(rhs);

    double sum = pi.sum();
    if (sum != 0.0) pi /= sum;
    return ScoreVector{std::vector<double>(pi.data(), pi.data() + n), ScoreKind::PageRank};
}

} // namespace linkrank
