#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "signfj/signed_graph.hpp"

namespace signfj {

/// Matrix-free operator S = I + L(G_lifted) on 2n coordinates.
/// S is symmetric, S >= I, and by Gershgorin every eigenvalue is at most
/// 1 + 2*max_degree (never materialized densely here).
class LiftedSystem {
public:
    explicit LiftedSystem(SignedGraph&&) = delete;
    explicit LiftedSystem(const SignedGraph& g) : g_(&g) {
        const int n = g.node_count();
        diagonal_.resize(static_cast<size_t>(2 * n));
        for (int i = 0; i < n; ++i) {
            const double d = 1.0 + static_cast<double>(g.degree(i));
            diagonal_[static_cast<size_t>(i)] = d;
            diagonal_[static_cast<size_t>(i + n)] = d;
        }
        spectral_bound_ = 1.0 + 2.0 * static_cast<double>(g.max_degree());
    }

    std::size_t dim() const { return diagonal_.size(); }
    std::span<const double> diagonal() const { return diagonal_; }
    double spectral_bound() const { return spectral_bound_; }
    const SignedGraph& graph() const { return *g_; }

    /// y = S x in O(m), iterating base edges once.
    void apply(std::span<const double> x, std::span<double> y) const {
        const size_t n = static_cast<size_t>(g_->node_count());
        for (size_t i = 0; i < 2 * n; ++i) y[i] = x[i];
        for (const Edge& e : g_->edges()) {
            const size_t u = static_cast<size_t>(e.u);
            const size_t v = static_cast<size_t>(e.v);
            if (e.sign > 0) {
                y[u] += x[u] - x[v];
                y[v] += x[v] - x[u];
                y[u + n] += x[u + n] - x[v + n];
                y[v + n] += x[v + n] - x[u + n];
            } else {
                y[u] += x[u] - x[v + n];
                y[v + n] += x[v + n] - x[u];
                y[u + n] += x[u + n] - x[v];
                y[v] += x[v] - x[u + n];
            }
        }
    }

private:
    const SignedGraph* g_;
    std::vector<double> diagonal_;
    double spectral_bound_ = 1.0;
};

} // namespace signfj
