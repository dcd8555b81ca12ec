#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "signfj/signed_graph.hpp"
#include "signfj/solver.hpp"

namespace signfj {

enum class QuantifyMethod { Exact, Approx };

/// The five quantities of the equilibrium opinion vector z = (I+L)^-1 s:
///   internal conflict     sum_i (z_i - s_i)^2        = |L z|^2
///   disagreement          sum_E (z_i - A_ij z_j)^2   = |B z|^2
///   friend disagreement   sum_E+ (z_i - z_j)^2       = |B+ z|^2
///   opponent agreement    sum_E- (z_i + z_j)^2       = |B- z|^2
///   polarization          (1/n) sum_i z_i^2
struct PhenomenaReport {
    double internal_conflict = 0.0;
    double disagreement = 0.0;
    double friend_disagreement = 0.0;
    double opponent_agreement = 0.0;
    double polarization = 0.0;
    QuantifyMethod method = QuantifyMethod::Exact;
    double epsilon = 0.0;         // approx only
    double delta = 0.0;           // solver delta actually used (approx only)
    double delta_requested = 0.0; // value from the epsilon formula, before the FP floor
};

namespace detail {

inline double squared_norm(std::span<const double> v) { return dot(v, v); }

inline PhenomenaReport quantities_from_equilibrium(const SignedGraph& g, std::span<const double> z) {
    PhenomenaReport r;
    std::vector<double> lz = apply_laplacian(g, z);
    r.internal_conflict = squared_norm(lz);
    r.disagreement = squared_norm(apply_incidence(g, z, IncidenceKind::Full));
    r.friend_disagreement = squared_norm(apply_incidence(g, z, IncidenceKind::Positive));
    r.opponent_agreement = squared_norm(apply_incidence(g, z, IncidenceKind::Negative));
    r.polarization = squared_norm(z) / static_cast<double>(g.node_count());
    return r;
}

} // namespace detail

/// Exact quantities via the dense solve. Cross-checks the norm forms
/// against the definitional sums; they agree analytically, so any drift
/// beyond rounding means a broken operator.
inline PhenomenaReport exact_quantities(const SignedGraph& g, std::span<const double> s,
                                        int dense_limit = kDenseLimit) {
    check_dimension(g, s, "exact_quantities");
    std::vector<double> z = dense_solve(g, s, dense_limit);
    PhenomenaReport r = detail::quantities_from_equilibrium(g, z);
    r.method = QuantifyMethod::Exact;

    double conflict_sum = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        const double d = z[i] - s[i];
        conflict_sum += d * d;
    }
    double friend_sum = 0.0, opponent_sum = 0.0;
    for (const Edge& e : g.edges()) {
        const double zu = z[static_cast<size_t>(e.u)];
        const double zv = z[static_cast<size_t>(e.v)];
        const double d = e.sign > 0 ? zu - zv : zu + zv;
        (e.sign > 0 ? friend_sum : opponent_sum) += d * d;
    }
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b)); };
    if (!close(r.internal_conflict, conflict_sum) || !close(r.friend_disagreement, friend_sum) ||
        !close(r.opponent_agreement, opponent_sum) ||
        !close(r.disagreement, friend_sum + opponent_sum)) {
        throw std::logic_error("exact_quantities: norm forms disagree with definitional sums");
    }
    return r;
}

/// Solver tolerance for a target epsilon:
///   delta = min{ eps/(3 sqrt(2n)),
///                |s|_L eps/(6 sqrt(2) n^2),
///                |L s|_2 eps/(12 sqrt(2) n^3),
///                |s|_2 eps/(2 sqrt(2) n) }.
/// Costs O(m). Returns 0 when s (or Ls) vanishes; the approximation then
/// takes the closed-form path instead of solving.
inline double delta_for_epsilon(const SignedGraph& g, std::span<const double> s, double epsilon) {
    check_dimension(g, s, "delta_for_epsilon");
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw std::invalid_argument("delta_for_epsilon: epsilon must be in (0, 1/2), got " +
                                    std::to_string(epsilon));
    }
    const double n = static_cast<double>(g.node_count());
    const double sqrt2 = std::sqrt(2.0);
    const double s_laplacian_norm = std::sqrt(laplacian_quadratic(g, s));
    const double ls_norm = detail::norm2(apply_laplacian(g, s));
    const double s_norm = detail::norm2(s);
    double delta = epsilon / (3.0 * std::sqrt(2.0 * n));
    delta = std::min(delta, s_laplacian_norm * epsilon / (6.0 * sqrt2 * n * n));
    delta = std::min(delta, ls_norm * epsilon / (12.0 * sqrt2 * n * n * n));
    delta = std::min(delta, s_norm * epsilon / (2.0 * sqrt2 * n));
    return delta;
}

/// Below this, an energy-norm contract cannot be certified in binary64;
/// the formula value is kept in reports as delta_requested.
inline constexpr double kDeltaFloor = 1e-13;

/// Approximate quantities from one signed solve at the delta prescribed
/// for epsilon. I, D, P carry relative-epsilon guarantees; the friend and
/// opponent terms carry absolute-epsilon guarantees.
inline PhenomenaReport approx_quantities(const SignedGraph& g, std::span<const double> s, double epsilon) {
    check_dimension(g, s, "approx_quantities");
    for (double v : s) {
        if (!(v >= -1.0 && v <= 1.0)) {
            throw std::invalid_argument("approx_quantities: opinions must lie in [-1, 1]");
        }
    }
    const double delta = delta_for_epsilon(g, s, epsilon);

    if (delta == 0.0) {
        // Either s = 0 (all quantities vanish) or Ls = 0, in which case
        // (I+L)s = s makes z = s: only polarization survives.
        PhenomenaReport r;
        r.method = QuantifyMethod::Approx;
        r.epsilon = epsilon;
        if (detail::squared_norm(s) > 0.0) r.polarization = detail::squared_norm(s) / static_cast<double>(g.node_count());
        return r;
    }

    const double delta_used = std::max(delta, kDeltaFloor);
    const std::vector<double> q = signed_solve(g, s, delta_used);
    PhenomenaReport r = detail::quantities_from_equilibrium(g, q);
    r.method = QuantifyMethod::Approx;
    r.epsilon = epsilon;
    r.delta = delta_used;
    r.delta_requested = delta;
    return r;
}

/// r1 = |I + 2D + nP - sum s_i^2|, r2 = |F + E - D|; both are exact
/// conservation laws of the equilibrium.
inline std::pair<double, double> conservation_residuals(const PhenomenaReport& report,
                                                        std::span<const double> s) {
    double s_sq = 0.0;
    for (double v : s) s_sq += v * v;
    const double n = static_cast<double>(s.size());
    const double r1 = std::abs(report.internal_conflict + 2.0 * report.disagreement +
                               n * report.polarization - s_sq);
    const double r2 = std::abs(report.friend_disagreement + report.opponent_agreement - report.disagreement);
    return {r1, r2};
}

} // namespace signfj
