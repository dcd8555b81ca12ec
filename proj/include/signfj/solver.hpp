#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "signfj/lifted_system.hpp"
#include "signfj/signed_graph.hpp"

namespace signfj {

inline constexpr int kDenseLimit = 5000;

class DenseLimitError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operator usable by solve_sdd: symmetric, with all eigenvalues in
/// [1, spectral_bound()].
template <typename Op>
concept SddOperator = requires(const Op& op, std::span<const double> x, std::span<double> y) {
    { op.dim() } -> std::convertible_to<std::size_t>;
    { op.diagonal() } -> std::convertible_to<std::span<const double>>;
    { op.spectral_bound() } -> std::convertible_to<double>;
    op.apply(x, y);
};

struct SolveReport {
    std::vector<double> solution;
    double delta_requested = 0.0;
    int iterations = 0;
    /// A-posteriori bound on |a - K^-1 b|_K / |K^-1 b|_K actually certified.
    double certified_bound = 0.0;
};

class SolveFailure : public std::runtime_error {
public:
    SolveFailure(std::string message, SolveReport best)
        : std::runtime_error(std::move(message)), report(std::move(best)) {}
    SolveReport report;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline bool all_finite(std::span<const double> a) {
    for (double x : a) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

} // namespace detail

/// Jacobi-preconditioned conjugate gradients with a certified energy-norm
/// stopping rule. For K with eigenvalues in [1, lambda_max]:
///   |a - K^-1 b|_K = sqrt(r' K^-1 r)   <= |r|_2            (K^-1 <= I)
///   |K^-1 b|_K     = sqrt(b' K^-1 b)   >= |b|_2 / sqrt(lambda_max)
///                                       >= |a|_K - |r|_2   (reverse triangle)
/// so stopping once |r|_2 <= delta * max of the two lower bounds certifies
/// the contract |a - K^-1 b|_K <= delta |K^-1 b|_K. The residual used for
/// the certificate is always recomputed as b - K a, never the recurrence.
template <SddOperator Op>
SolveReport solve_sdd(const Op& op, std::span<const double> b, double delta) {
    const size_t n = op.dim();
    if (b.size() != n) throw std::invalid_argument("solve_sdd: rhs length mismatch");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("solve_sdd: delta must be in (0,1)");
    if (!detail::all_finite(b)) throw std::invalid_argument("solve_sdd: rhs has non-finite entries");

    SolveReport report;
    report.delta_requested = delta;
    report.solution.assign(n, 0.0);
    std::vector<double>& x = report.solution;

    const double b_norm = detail::norm2(b);
    if (b_norm == 0.0) return report;

    const double lambda_max = op.spectral_bound();
    const std::span<const double> diag = op.diagonal();
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> p(n), w(n);
    double rz = 0.0;
    for (size_t i = 0; i < n; ++i) {
        p[i] = r[i] / diag[i];
        rz += r[i] * p[i];
    }
    double r_norm = b_norm;

    // Monotone lower bound on |K^-1 b|_K. Seeded by |b| / sqrt(lambda_max);
    // any iterate adds the reverse-triangle bound |x|_K - |r|_2, where
    // x'Kx = x'(b - r). Both stay valid for the fixed true solution, so the
    // running max does too. |K^-1 b|_K <= |b|_2 bounds it from above, which
    // gates the (more expensive) refresh below.
    double lower_bound = b_norm / std::sqrt(lambda_max);
    auto refresh_lower_bound = [&](std::span<const double> res, double res_norm) {
        double x_energy_sq = 0.0;
        for (size_t i = 0; i < n; ++i) x_energy_sq += x[i] * (b[i] - res[i]);
        const double x_energy = std::sqrt(std::max(x_energy_sq, 0.0));
        lower_bound = std::max(lower_bound, x_energy - res_norm);
    };
    // Certify against a freshly computed residual; on failure restart the
    // recurrence from it (residual replacement).
    auto certify = [&]() {
        op.apply(x, w);
        for (size_t i = 0; i < n; ++i) w[i] = b[i] - w[i];
        const double true_norm = detail::norm2(w);
        refresh_lower_bound(w, true_norm);
        if (true_norm <= delta * lower_bound) {
            report.certified_bound = true_norm / lower_bound;
            return true;
        }
        r = w;
        rz = 0.0;
        for (size_t i = 0; i < n; ++i) {
            p[i] = r[i] / diag[i];
            rz += r[i] * p[i];
        }
        r_norm = true_norm;
        return false;
    };

    const long long cap = static_cast<long long>(
        std::ceil(10.0 * std::sqrt(2.0 * static_cast<double>(n)) * std::log(1.0 / delta))) + 100;

    for (long long it = 1; it <= cap; ++it) {
        op.apply(p, w);
        const double pw = detail::dot(p, w);
        if (!(pw > 0.0)) {
            report.iterations = static_cast<int>(it);
            if (certify()) return report;
            throw SolveFailure("solve_sdd: curvature breakdown before reaching delta", std::move(report));
        }
        const double alpha = rz / pw;
        double rr = 0.0;
        double rz_next = 0.0;
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            const double ri = r[i] - alpha * w[i];
            r[i] = ri;
            rr += ri * ri;
            rz_next += ri * ri / diag[i];
        }
        r_norm = std::sqrt(rr);
        report.iterations = static_cast<int>(it);

        if (r_norm <= delta * b_norm) {
            if (r_norm > delta * lower_bound) refresh_lower_bound(r, r_norm);
            if (r_norm <= delta * lower_bound) {
                if (certify()) return report;
                continue; // certify replaced r, p, rz; restart the recurrence
            }
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (size_t i = 0; i < n; ++i) p[i] = r[i] / diag[i] + beta * p[i];
    }

    op.apply(x, w);
    for (size_t i = 0; i < n; ++i) w[i] = b[i] - w[i];
    const double final_norm = detail::norm2(w);
    refresh_lower_bound(w, final_norm);
    report.certified_bound = final_norm / lower_bound;
    throw SolveFailure("solve_sdd: iteration cap " + std::to_string(cap) +
                           " reached with certified bound " + std::to_string(report.certified_bound) +
                           " > delta " + std::to_string(delta),
                       std::move(report));
}

/// Solves (I + L) f = y through the lifted system: stack b = [y; -y],
/// solve S c = b, return half the difference of the two n-blocks. The
/// returned f satisfies |f - (I+L)^-1 y|_{I+L} <= delta |(I+L)^-1 y|_{I+L}.
inline std::vector<double> signed_solve(const SignedGraph& g, std::span<const double> y, double delta) {
    check_dimension(g, y, "signed_solve");
    const size_t n = y.size();
    LiftedSystem system(g);
    std::vector<double> b(2 * n);
    for (size_t i = 0; i < n; ++i) {
        b[i] = y[i];
        b[i + n] = -y[i];
    }
    SolveReport report = solve_sdd(system, b, delta);
    std::vector<double> f(n);
    for (size_t i = 0; i < n; ++i) f[i] = 0.5 * (report.solution[i] - report.solution[i + n]);
    return f;
}

namespace detail {

inline Eigen::MatrixXd dense_shifted_laplacian(const SignedGraph& g) {
    const int n = g.node_count();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) m(i, i) += static_cast<double>(g.degree(i));
    for (const Edge& e : g.edges()) {
        m(e.u, e.v) -= static_cast<double>(e.sign);
        m(e.v, e.u) -= static_cast<double>(e.sign);
    }
    return m;
}

} // namespace detail

/// Exact (I+L)^-1 y by dense SPD factorization. Oracle path; refuses
/// graphs above the dense limit.
inline std::vector<double> dense_solve(const SignedGraph& g, std::span<const double> y,
                                       int dense_limit = kDenseLimit) {
    check_dimension(g, y, "dense_solve");
    if (g.node_count() > dense_limit) {
        throw DenseLimitError("dense_solve: " + std::to_string(g.node_count()) + " nodes exceed the dense limit " +
                              std::to_string(dense_limit) + "; use signed_solve");
    }
    if (!detail::all_finite(y)) throw std::invalid_argument("dense_solve: rhs has non-finite entries");
    const Eigen::MatrixXd m = detail::dense_shifted_laplacian(g);
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    const Eigen::VectorXd sol = m.llt().solve(rhs);
    return {sol.data(), sol.data() + sol.size()};
}

/// |x|_{I+L} = sqrt(x'x + x'Lx), accumulated edgewise.
inline double energy_norm(const SignedGraph& g, std::span<const double> x) {
    check_dimension(g, x, "energy_norm");
    return std::sqrt(detail::dot(x, x) + laplacian_quadratic(g, x));
}

} // namespace signfj
