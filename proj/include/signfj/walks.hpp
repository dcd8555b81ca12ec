#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "signfj/rng.hpp"
#include "signfj/signed_graph.hpp"
#include "signfj/solver.hpp"

namespace signfj {

struct WalkOutcome {
    int absorbed_at = 0; // base node whose copy absorbed the walk
    int sign = 1;        // product of edge signs along the walk; +1 for the empty walk
};

/// One absorbing walk on the augmented graph: at node u, absorb into u's
/// copy with probability 1/(1+d_u), otherwise step to a uniformly random
/// neighbor, multiplying the running sign by the edge sign.
inline WalkOutcome sample_walk(const SignedGraph& g, int start, SplitMix64& rng) {
    if (start < 0 || start >= g.node_count()) throw std::invalid_argument("sample_walk: start out of range");
    constexpr std::uint64_t kStepCap = 1'000'000'000ULL; // absorption is almost sure; guards a broken RNG
    int node = start;
    int sign = 1;
    for (std::uint64_t step = 0; step < kStepCap; ++step) {
        const auto nbrs = g.neighbors(node);
        const std::uint64_t pick = rng.below(nbrs.size() + 1);
        if (pick == nbrs.size()) return WalkOutcome{node, sign};
        const SignedGraph::Neighbor& nb = nbrs[static_cast<size_t>(pick)];
        sign *= nb.sign;
        node = nb.node;
    }
    throw std::runtime_error("sample_walk: step cap exceeded; RNG looks broken");
}

/// Monte Carlo estimate of the absorbing probabilities p (positive walks)
/// and q (negative walks) out of one source node. Integer counts are kept
/// so absorption completeness is exact; per-walk RNG substreams make the
/// result independent of the worker count.
struct WalkEstimate {
    int source = 0;
    std::int64_t walks = 0;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> positive_counts;
    std::vector<std::int64_t> negative_counts;

    std::vector<double> p_hat() const { return scaled(positive_counts); }
    std::vector<double> q_hat() const { return scaled(negative_counts); }

private:
    std::vector<double> scaled(const std::vector<std::int64_t>& counts) const {
        std::vector<double> out(counts.size());
        for (size_t j = 0; j < counts.size(); ++j) {
            out[j] = static_cast<double>(counts[j]) / static_cast<double>(walks);
        }
        return out;
    }
};

inline WalkEstimate estimate_pq(const SignedGraph& g, int source, std::int64_t walks,
                                std::uint64_t seed, int workers = 1) {
    if (walks < 1) throw std::invalid_argument("estimate_pq: need at least one walk");
    if (workers < 1) workers = 1;
    const size_t n = static_cast<size_t>(g.node_count());

    WalkEstimate est;
    est.source = source;
    est.walks = walks;
    est.seed = seed;
    est.positive_counts.assign(n, 0);
    est.negative_counts.assign(n, 0);

    auto run_range = [&](std::int64_t begin, std::int64_t end, std::vector<std::int64_t>& pos,
                         std::vector<std::int64_t>& neg) {
        for (std::int64_t w = begin; w < end; ++w) {
            SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(w));
            const WalkOutcome outcome = sample_walk(g, source, rng);
            auto& counts = outcome.sign > 0 ? pos : neg;
            ++counts[static_cast<size_t>(outcome.absorbed_at)];
        }
    };

    if (workers == 1 || walks < 4 * workers) {
        run_range(0, walks, est.positive_counts, est.negative_counts);
        return est;
    }

    std::vector<std::vector<std::int64_t>> pos(static_cast<size_t>(workers), std::vector<std::int64_t>(n, 0));
    std::vector<std::vector<std::int64_t>> neg(static_cast<size_t>(workers), std::vector<std::int64_t>(n, 0));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(workers));
    const std::int64_t chunk = (walks + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
        const std::int64_t begin = t * chunk;
        const std::int64_t end = std::min(walks, begin + chunk);
        threads.emplace_back([&, t, begin, end] {
            run_range(begin, end, pos[static_cast<size_t>(t)], neg[static_cast<size_t>(t)]);
        });
    }
    for (auto& th : threads) th.join();
    for (int t = 0; t < workers; ++t) {
        for (size_t j = 0; j < n; ++j) {
            est.positive_counts[j] += pos[static_cast<size_t>(t)][j];
            est.negative_counts[j] += neg[static_cast<size_t>(t)][j];
        }
    }
    return est;
}

/// Closed forms for the absorbing probabilities:
///   p = (M1^-1 + M2^-1)/2,  q = (M1^-1 - M2^-1)/2
/// with M1 = I + D - A+ + A- (the shifted Laplacian of the underlying
/// unsigned graph) and M2 = I + L, so p - q = (I+L)^-1.
struct ExactAbsorption {
    Eigen::MatrixXd p;
    Eigen::MatrixXd q;
};

namespace detail {

// I + D - A+ + A-: the shifted Laplacian of the underlying unsigned graph.
inline Eigen::MatrixXd dense_unsigned_shifted(const SignedGraph& g) {
    const int n = g.node_count();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) m(i, i) += static_cast<double>(g.degree(i));
    for (const Edge& e : g.edges()) {
        m(e.u, e.v) -= 1.0;
        m(e.v, e.u) -= 1.0;
    }
    return m;
}

} // namespace detail

inline ExactAbsorption exact_pq(const SignedGraph& g, int dense_limit = kDenseLimit) {
    const int n = g.node_count();
    if (n > dense_limit) {
        throw DenseLimitError("exact_pq: graph exceeds the dense limit " + std::to_string(dense_limit));
    }
    const Eigen::MatrixXd unsigned_shifted = detail::dense_unsigned_shifted(g);
    const Eigen::MatrixXd signed_shifted = detail::dense_shifted_laplacian(g);
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd inv_unsigned = unsigned_shifted.llt().solve(identity);
    const Eigen::MatrixXd inv_signed = signed_shifted.llt().solve(identity);
    return ExactAbsorption{0.5 * (inv_unsigned + inv_signed), 0.5 * (inv_unsigned - inv_signed)};
}

/// One row of (p, q): two dense solves instead of two dense inverses.
/// Both matrices are symmetric, so the source row equals the column.
inline std::pair<std::vector<double>, std::vector<double>> exact_pq_row(const SignedGraph& g, int source,
                                                                        int dense_limit = kDenseLimit) {
    const int n = g.node_count();
    if (n > dense_limit) {
        throw DenseLimitError("exact_pq_row: graph exceeds the dense limit " + std::to_string(dense_limit));
    }
    if (source < 0 || source >= n) throw std::invalid_argument("exact_pq_row: source out of range");
    Eigen::VectorXd basis = Eigen::VectorXd::Zero(n);
    basis(source) = 1.0;
    const Eigen::VectorXd col_unsigned = detail::dense_unsigned_shifted(g).llt().solve(basis);
    const Eigen::VectorXd col_signed = detail::dense_shifted_laplacian(g).llt().solve(basis);
    std::vector<double> p_row(static_cast<size_t>(n)), q_row(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        p_row[static_cast<size_t>(j)] = 0.5 * (col_unsigned(j) + col_signed(j));
        q_row[static_cast<size_t>(j)] = 0.5 * (col_unsigned(j) - col_signed(j));
    }
    return {std::move(p_row), std::move(q_row)};
}

struct WalkInterpretationCheck {
    double z_mc = 0.0;
    double z_exact = 0.0;
    double standard_error = 0.0;
    std::int64_t walks = 0;
};

/// Estimates z_source = sum_j (p_j - q_j) s_j by simulation and compares
/// it against the dense solve. The standard error is that of the per-walk
/// signed payoff sign * s_{absorbed}, recovered from the integer counts.
inline WalkInterpretationCheck verify_walk_interpretation(const SignedGraph& g, std::span<const double> s,
                                                          int source, std::int64_t walks,
                                                          std::uint64_t seed, int workers = 1) {
    check_dimension(g, s, "verify_walk_interpretation");
    const WalkEstimate est = estimate_pq(g, source, walks, seed, workers);

    WalkInterpretationCheck check;
    check.walks = walks;
    double payoff_sum = 0.0;
    double payoff_sq_sum = 0.0;
    for (size_t j = 0; j < s.size(); ++j) {
        const double pos = static_cast<double>(est.positive_counts[j]);
        const double neg = static_cast<double>(est.negative_counts[j]);
        payoff_sum += (pos - neg) * s[j];
        payoff_sq_sum += (pos + neg) * s[j] * s[j];
    }
    const double w = static_cast<double>(walks);
    check.z_mc = payoff_sum / w;
    if (walks > 1) {
        const double variance = std::max(0.0, (payoff_sq_sum - payoff_sum * payoff_sum / w) / (w - 1.0));
        check.standard_error = std::sqrt(variance / w);
    }
    check.z_exact = dense_solve(g, s)[static_cast<size_t>(source)];
    return check;
}

/// Checks the block identities tying S^-1 on the lifted graph to (p, q):
///   S^-1[i, j] = S^-1[i+n, j+n] = p[i, j],
///   S^-1[i, j+n] = S^-1[i+n, j] = q[i, j].
/// Returns the maximum absolute deviation over all four blocks.
inline double verify_lifted_correspondence(const SignedGraph& g, int dense_limit = kDenseLimit) {
    const int n = g.node_count();
    if (n > dense_limit) {
        throw DenseLimitError("verify_lifted_correspondence: graph exceeds the dense limit");
    }
    const LiftedGraph lifted = lift(g);
    Eigen::MatrixXd dense_lift = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i) dense_lift(i, i) += static_cast<double>(lifted.degree(i));
    lifted.for_each_edge([&](int u, int v) {
        dense_lift(u, v) -= 1.0;
        dense_lift(v, u) -= 1.0;
    });
    const Eigen::MatrixXd inv = dense_lift.llt().solve(Eigen::MatrixXd::Identity(2 * n, 2 * n));
    const ExactAbsorption exact = exact_pq(g, dense_limit);

    double max_dev = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            max_dev = std::max(max_dev, std::abs(inv(i, j) - exact.p(i, j)));
            max_dev = std::max(max_dev, std::abs(inv(i + n, j + n) - exact.p(i, j)));
            max_dev = std::max(max_dev, std::abs(inv(i, j + n) - exact.q(i, j)));
            max_dev = std::max(max_dev, std::abs(inv(i + n, j) - exact.q(i, j)));
        }
    }
    return max_dev;
}

} // namespace signfj
