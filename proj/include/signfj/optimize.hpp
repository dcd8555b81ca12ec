#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "signfj/phenomena.hpp"
#include "signfj/rng.hpp"
#include "signfj/signed_graph.hpp"
#include "signfj/solver.hpp"

namespace signfj {

enum class CentralityMode { Exact, Approx };

/// Structure centrality h = (I+L)^-1 1: the weight of node i's internal
/// opinion in the overall opinion. Entries may be zero or negative.
struct CentralityVector {
    std::vector<double> values;
    CentralityMode mode = CentralityMode::Exact;
    double delta = 0.0; // approx only
};

inline CentralityVector structure_centrality(const SignedGraph& g, int dense_limit = kDenseLimit) {
    CentralityVector c;
    c.mode = CentralityMode::Exact;
    c.values = dense_solve(g, std::vector<double>(static_cast<size_t>(g.node_count()), 1.0), dense_limit);
    return c;
}

/// Approximation with entrywise error at most epsilon/(4k), from the
/// solver tolerance delta = epsilon / (4k sqrt(n + 4m)).
inline CentralityVector structure_centrality_approx(const SignedGraph& g, int k, double epsilon) {
    if (k < 1) throw std::invalid_argument("structure_centrality: k must be >= 1");
    if (!(epsilon > 0.0)) throw std::invalid_argument("structure_centrality: epsilon must be positive");
    const double n = static_cast<double>(g.node_count());
    const double m = static_cast<double>(g.edge_count());
    CentralityVector c;
    c.mode = CentralityMode::Approx;
    c.delta = std::max(epsilon / (4.0 * static_cast<double>(k) * std::sqrt(n + 4.0 * m)), kDeltaFloor);
    c.values = signed_solve(g, std::vector<double>(static_cast<size_t>(g.node_count()), 1.0), c.delta);
    return c;
}

/// Overall opinion g(s) = 1'(I+L)^-1 s = h's.
inline double overall_opinion(const CentralityVector& centrality, std::span<const double> s) {
    if (centrality.values.size() != s.size()) {
        throw std::invalid_argument("overall_opinion: centrality/opinion length mismatch");
    }
    return detail::dot(centrality.values, s);
}

inline double overall_opinion_exact(const SignedGraph& g, std::span<const double> s,
                                    int dense_limit = kDenseLimit) {
    const std::vector<double> z = dense_solve(g, s, dense_limit);
    return std::accumulate(z.begin(), z.end(), 0.0);
}

/// Largest increase of the overall opinion available by re-setting one
/// node's internal opinion: 0 when h_i = 0, else |h_i| (1 - s_i sign(h_i)),
/// attained at y_i = sign(h_i).
inline double max_gain(double h_i, double s_i) {
    if (h_i == 0.0) return 0.0;
    const double direction = h_i > 0.0 ? 1.0 : -1.0;
    return std::abs(h_i) * (1.0 - s_i * direction);
}

enum class OptimizeMethod { Optimal, Approx, Rand, Trust, InternalOpinion, ExpressedOpinion };

inline const char* to_string(OptimizeMethod m) {
    switch (m) {
        case OptimizeMethod::Optimal: return "optimal";
        case OptimizeMethod::Approx: return "approx";
        case OptimizeMethod::Rand: return "rand";
        case OptimizeMethod::Trust: return "trust";
        case OptimizeMethod::InternalOpinion: return "io";
        case OptimizeMethod::ExpressedOpinion: return "eo";
    }
    return "?";
}

struct OptimizationResult {
    std::vector<int> selected;          // in selection order
    std::vector<double> gains;          // marginal gain recorded per selection
    std::vector<double> modified_opinions;
    double overall_before = 0.0;
    double overall_after = 0.0;
    bool exact_objective = true; // whether overall_* came from the dense path
    OptimizeMethod method = OptimizeMethod::Optimal;
    int k = 0;
    double epsilon = 0.0; // approx only
    double delta = 0.0;   // approx only
};

namespace detail {

inline void check_optimize_inputs(const SignedGraph& g, std::span<const double> s, int k) {
    check_dimension(g, s, "optimize");
    if (k < 1 || k > g.node_count()) {
        throw std::invalid_argument("optimize: k must be in [1, n], got " + std::to_string(k));
    }
    for (double v : s) {
        if (!(v >= -1.0 && v <= 1.0)) throw std::invalid_argument("optimize: opinions must lie in [-1, 1]");
    }
}

/// Objective reporting: exact under the dense limit, otherwise through the
/// approximate centrality the run already holds.
inline void fill_objective(const SignedGraph& g, const CentralityVector& centrality,
                           std::span<const double> s, OptimizationResult& result,
                           int dense_limit = kDenseLimit) {
    if (g.node_count() <= dense_limit) {
        result.overall_before = overall_opinion_exact(g, s, dense_limit);
        result.overall_after = overall_opinion_exact(g, result.modified_opinions, dense_limit);
        result.exact_objective = true;
    } else {
        result.overall_before = overall_opinion(centrality, s);
        result.overall_after = overall_opinion(centrality, result.modified_opinions);
        result.exact_objective = false;
    }
}

inline OptimizationResult greedy_opinion_max(const SignedGraph& g, std::span<const double> s, int k,
                                             const CentralityVector& centrality, OptimizeMethod method,
                                             double epsilon, int dense_limit) {
    const std::vector<double>& h = centrality.values;
    // An analytically zero centrality entry comes back from the solver as
    // rounding noise; entries below this are treated as the h_i = 0 case.
    double h_scale = 1.0;
    for (double v : h) h_scale = std::max(h_scale, std::abs(v));
    const double zero_tol = 1e-12 * h_scale;
    std::vector<double> gain(h.size());
    for (size_t i = 0; i < h.size(); ++i) {
        gain[i] = std::abs(h[i]) <= zero_tol ? 0.0 : max_gain(h[i], s[i]);
    }

    OptimizationResult result;
    result.method = method;
    result.k = k;
    result.epsilon = epsilon;
    result.delta = centrality.delta;
    result.modified_opinions.assign(s.begin(), s.end());

    for (int step = 0; step < k; ++step) {
        size_t best = 0;
        for (size_t i = 1; i < gain.size(); ++i) {
            if (gain[i] > gain[best]) best = i; // ties keep the smallest id
        }
        if (gain[best] == 0.0) break; // every remaining move is worthless
        result.selected.push_back(static_cast<int>(best));
        result.gains.push_back(gain[best]);
        result.modified_opinions[best] = h[best] > 0.0 ? 1.0 : -1.0;
        gain[best] = 0.0;
    }
    fill_objective(g, centrality, s, result, dense_limit);
    return result;
}

} // namespace detail

/// Optimal greedy: with exact centrality, the k largest per-node gains are
/// exactly the optimum of the k-node opinion-change problem.
inline OptimizationResult optimize_max(const SignedGraph& g, std::span<const double> s, int k,
                                       int dense_limit = kDenseLimit) {
    detail::check_optimize_inputs(g, s, k);
    const CentralityVector centrality = structure_centrality(g, dense_limit);
    return detail::greedy_opinion_max(g, s, k, centrality, OptimizeMethod::Optimal, 0.0, dense_limit);
}

/// Approximate variant: centrality from the signed solver at the tolerance
/// that keeps the resulting overall opinion within epsilon of optimal.
inline OptimizationResult optimize_max(const SignedGraph& g, std::span<const double> s, int k,
                                       double epsilon, int dense_limit = kDenseLimit) {
    detail::check_optimize_inputs(g, s, k);
    const CentralityVector centrality = structure_centrality_approx(g, k, epsilon);
    return detail::greedy_opinion_max(g, s, k, centrality, OptimizeMethod::Approx, epsilon, dense_limit);
}

namespace detail {

inline OptimizationResult negate_result(OptimizationResult r) {
    for (double& y : r.modified_opinions) y = -y;
    r.overall_before = -r.overall_before;
    r.overall_after = -r.overall_after;
    return r;
}

} // namespace detail

/// OpinionMin by sign inversion: minimize g over s == -(maximize g over -s).
inline OptimizationResult optimize_min(const SignedGraph& g, std::span<const double> s, int k,
                                       int dense_limit = kDenseLimit) {
    std::vector<double> negated(s.size());
    for (size_t i = 0; i < s.size(); ++i) negated[i] = -s[i];
    return detail::negate_result(optimize_max(g, negated, k, dense_limit));
}

inline OptimizationResult optimize_min(const SignedGraph& g, std::span<const double> s, int k,
                                       double epsilon, int dense_limit = kDenseLimit) {
    std::vector<double> negated(s.size());
    for (size_t i = 0; i < s.size(); ++i) negated[i] = -s[i];
    return detail::negate_result(optimize_max(g, negated, k, epsilon, dense_limit));
}

enum class BaselineKind { Rand, Trust, InternalOpinion, ExpressedOpinion };

/// The four comparison heuristics. All of them set the selected opinions
/// to +1; ties break toward the smallest node id; Rand is seeded.
inline OptimizationResult baseline_opinion_max(const SignedGraph& g, std::span<const double> s, int k,
                                               BaselineKind kind, std::uint64_t seed = 0,
                                               double epsilon = 1e-5, int dense_limit = kDenseLimit) {
    detail::check_optimize_inputs(g, s, k);
    const int n = g.node_count();
    std::vector<int> selected;
    selected.reserve(static_cast<size_t>(k));

    auto top_k_smallest = [&](const std::vector<double>& score) {
        std::vector<int> order(static_cast<size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return score[static_cast<size_t>(a)] < score[static_cast<size_t>(b)];
        });
        order.resize(static_cast<size_t>(k));
        return order;
    };

    OptimizationResult result;
    switch (kind) {
        case BaselineKind::Rand: {
            std::vector<int> pool(static_cast<size_t>(n));
            std::iota(pool.begin(), pool.end(), 0);
            SplitMix64 rng = SplitMix64::substream(seed, 0);
            for (int t = 0; t < k; ++t) {
                const auto pick = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - t)));
                std::swap(pool[static_cast<size_t>(t)], pool[static_cast<size_t>(pick)]);
                selected.push_back(pool[static_cast<size_t>(t)]);
            }
            result.method = OptimizeMethod::Rand;
            break;
        }
        case BaselineKind::Trust: {
            std::vector<double> score(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                score[static_cast<size_t>(i)] = -static_cast<double>(g.positive_degree(i) - g.negative_degree(i));
            }
            selected = top_k_smallest(score);
            result.method = OptimizeMethod::Trust;
            break;
        }
        case BaselineKind::InternalOpinion: {
            selected = top_k_smallest(std::vector<double>(s.begin(), s.end()));
            result.method = OptimizeMethod::InternalOpinion;
            break;
        }
        case BaselineKind::ExpressedOpinion: {
            std::vector<double> z;
            if (n <= dense_limit) {
                z = dense_solve(g, s, dense_limit);
            } else {
                const double delta = std::max(
                    epsilon / (4.0 * static_cast<double>(k) *
                               std::sqrt(static_cast<double>(n) + 4.0 * static_cast<double>(g.edge_count()))),
                    kDeltaFloor);
                z = signed_solve(g, s, delta);
            }
            selected = top_k_smallest(z);
            result.method = OptimizeMethod::ExpressedOpinion;
            break;
        }
    }

    result.k = k;
    result.modified_opinions.assign(s.begin(), s.end());
    CentralityVector centrality;
    if (n <= dense_limit) {
        centrality = structure_centrality(g, dense_limit);
    } else {
        centrality = structure_centrality_approx(g, k, epsilon);
        result.delta = centrality.delta;
    }
    for (int i : selected) {
        result.selected.push_back(i);
        result.gains.push_back(centrality.values[static_cast<size_t>(i)] * (1.0 - s[static_cast<size_t>(i)]));
        result.modified_opinions[static_cast<size_t>(i)] = 1.0;
    }
    detail::fill_objective(g, centrality, s, result, dense_limit);
    return result;
}

} // namespace signfj
