#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "signfj/rng.hpp"

namespace signfj {

class ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class GraphError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One undirected signed edge, stored with u < v.
struct Edge {
    int u = 0;
    int v = 0;
    int sign = 1; // +1 or -1
};

/// Incidence row of an edge under the fixed orientation (head = lower id):
/// +1 at head, -sign at tail.
struct OrientedEdge {
    int index = 0;
    int head = 0;
    int tail = 0;
    int sign = 1;
};

enum class IncidenceKind { Full, Positive, Negative };

struct LoadOptions {
    char comment_prefix = '#';
    double flip_probability = 0.0; // each edge's sign is set to -1 with this probability
    std::uint64_t seed = 0;
};

/// Immutable undirected unweighted signed graph with per-node adjacency.
/// Node ids are dense and 0-based; the loader keeps the original labels.
class SignedGraph {
public:
    struct Neighbor {
        int node;
        int sign;
    };

    static SignedGraph from_edges(int n, std::vector<Edge> edges) {
        return SignedGraph(n, std::move(edges), {});
    }

    /// Parses `u v [w]` lines with w in {+1, 1, -1}; missing w means +1.
    /// Arbitrary node labels are remapped to dense 0-based ids in
    /// first-appearance order (so 0- and 1-indexed files both load as-is).
    static SignedGraph load_edge_list(std::istream& in, const LoadOptions& options = {}) {
        std::vector<Edge> edges;
        std::vector<std::string> labels;
        std::unordered_map<std::string, int> label_ids;
        SplitMix64 rng = SplitMix64::substream(options.seed, 0);

        auto intern = [&](const std::string& label) {
            auto [it, inserted] = label_ids.try_emplace(label, static_cast<int>(labels.size()));
            if (inserted) labels.push_back(label);
            return it->second;
        };

        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            if (line[first] == options.comment_prefix) continue;

            std::istringstream fields(line);
            std::string u_label, v_label, w_token, extra;
            if (!(fields >> u_label >> v_label)) {
                throw ParseError("line " + std::to_string(line_no) + ": expected `u v [w]`, got: " + line);
            }
            int sign = 1;
            if (fields >> w_token) {
                if (w_token == "+1" || w_token == "1") {
                    sign = 1;
                } else if (w_token == "-1") {
                    sign = -1;
                } else {
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": edge weight must be +1 or -1, got `" + w_token + "`");
                }
                if (fields >> extra) {
                    throw ParseError("line " + std::to_string(line_no) + ": trailing field `" + extra + "`");
                }
            }
            const int u = intern(u_label);
            const int v = intern(v_label);
            if (u == v) {
                throw ParseError("line " + std::to_string(line_no) + ": self-loop at node `" + u_label + "`");
            }
            if (options.flip_probability > 0.0 && rng.next_double() < options.flip_probability) {
                sign = -1;
            }
            edges.push_back(Edge{u, v, sign});
        }
        const int n = static_cast<int>(labels.size());
        return SignedGraph(n, std::move(edges), std::move(labels));
    }

    int node_count() const noexcept { return n_; }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    int positive_edge_count() const noexcept { return static_cast<int>(positive_edge_ids_.size()); }
    int negative_edge_count() const noexcept { return static_cast<int>(negative_edge_ids_.size()); }

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<int>& positive_edge_ids() const noexcept { return positive_edge_ids_; }
    const std::vector<int>& negative_edge_ids() const noexcept { return negative_edge_ids_; }

    int degree(int i) const { return degrees_[static_cast<size_t>(i)]; }
    const std::vector<int>& degrees() const noexcept { return degrees_; }
    int positive_degree(int i) const { return positive_degrees_[static_cast<size_t>(i)]; }
    int negative_degree(int i) const { return degrees_[static_cast<size_t>(i)] - positive_degrees_[static_cast<size_t>(i)]; }
    int max_degree() const noexcept { return max_degree_; }

    std::span<const Neighbor> neighbors(int i) const {
        const auto begin = offsets_[static_cast<size_t>(i)];
        const auto end = offsets_[static_cast<size_t>(i) + 1];
        return {adjacency_.data() + begin, adjacency_.data() + end};
    }

    OrientedEdge oriented_edge(int e) const {
        const Edge& edge = edges_[static_cast<size_t>(e)];
        return OrientedEdge{e, edge.u, edge.v, edge.sign};
    }

    bool connected() const noexcept { return connected_; }

    /// Original labels in dense-id order; empty when built via from_edges.
    const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    SignedGraph(int n, std::vector<Edge> edges, std::vector<std::string> labels)
        : n_(n), edges_(std::move(edges)), labels_(std::move(labels)) {
        if (n_ < 0) throw GraphError("negative node count");
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(edges_.size() * 2);
        for (Edge& e : edges_) {
            if (e.u < 0 || e.v < 0 || e.u >= n_ || e.v >= n_) {
                throw GraphError("edge endpoint out of range: (" + std::to_string(e.u) + ", " +
                                 std::to_string(e.v) + ")");
            }
            if (e.u == e.v) throw GraphError("self-loop at node " + std::to_string(e.u));
            if (e.sign != 1 && e.sign != -1) throw GraphError("edge sign must be +1 or -1");
            if (e.u > e.v) std::swap(e.u, e.v);
            const std::uint64_t key =
                (static_cast<std::uint64_t>(e.u) << 32) | static_cast<std::uint64_t>(e.v);
            if (!seen.insert(key).second) {
                throw GraphError("duplicate edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                                 "): sign would be ambiguous");
            }
        }
        // Sorted edge order keeps matvec access patterns local and makes the
        // edge enumeration independent of input permutation.
        std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
            return a.u != b.u ? a.u < b.u : a.v < b.v;
        });

        degrees_.assign(static_cast<size_t>(n_), 0);
        positive_degrees_.assign(static_cast<size_t>(n_), 0);
        for (size_t k = 0; k < edges_.size(); ++k) {
            const Edge& e = edges_[k];
            ++degrees_[static_cast<size_t>(e.u)];
            ++degrees_[static_cast<size_t>(e.v)];
            if (e.sign > 0) {
                ++positive_degrees_[static_cast<size_t>(e.u)];
                ++positive_degrees_[static_cast<size_t>(e.v)];
                positive_edge_ids_.push_back(static_cast<int>(k));
            } else {
                negative_edge_ids_.push_back(static_cast<int>(k));
            }
        }
        max_degree_ = degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());

        offsets_.assign(static_cast<size_t>(n_) + 1, 0);
        for (int i = 0; i < n_; ++i) {
            offsets_[static_cast<size_t>(i) + 1] = offsets_[static_cast<size_t>(i)] + degrees_[static_cast<size_t>(i)];
        }
        adjacency_.resize(edges_.size() * 2);
        std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
        for (const Edge& e : edges_) {
            adjacency_[cursor[static_cast<size_t>(e.u)]++] = Neighbor{e.v, e.sign};
            adjacency_[cursor[static_cast<size_t>(e.v)]++] = Neighbor{e.u, e.sign};
        }

        connected_ = compute_connected();
    }

    bool compute_connected() const {
        if (n_ <= 1) return true;
        std::vector<char> visited(static_cast<size_t>(n_), 0);
        std::vector<int> stack{0};
        visited[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const Neighbor& nb : neighbors(u)) {
                if (!visited[static_cast<size_t>(nb.node)]) {
                    visited[static_cast<size_t>(nb.node)] = 1;
                    ++reached;
                    stack.push_back(nb.node);
                }
            }
        }
        return reached == n_;
    }

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::string> labels_;
    std::vector<int> degrees_;
    std::vector<int> positive_degrees_;
    std::vector<int> positive_edge_ids_;
    std::vector<int> negative_edge_ids_;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> adjacency_;
    int max_degree_ = 0;
    bool connected_ = true;
};

/// View over one sign class of a graph's edges (shared node set).
class SubgraphView {
public:
    SubgraphView(const SignedGraph& g, int sign) : g_(&g), sign_(sign) {}

    int node_count() const { return g_->node_count(); }
    int edge_count() const {
        return sign_ > 0 ? g_->positive_edge_count() : g_->negative_edge_count();
    }
    const std::vector<int>& edge_ids() const {
        return sign_ > 0 ? g_->positive_edge_ids() : g_->negative_edge_ids();
    }
    int sign() const { return sign_; }
    const SignedGraph& base() const { return *g_; }

private:
    const SignedGraph* g_;
    int sign_;
};

inline std::pair<SubgraphView, SubgraphView> split_subgraphs(const SignedGraph& g) {
    return {SubgraphView(g, +1), SubgraphView(g, -1)};
}
// views must not outlive the graph
std::pair<SubgraphView, SubgraphView> split_subgraphs(SignedGraph&&) = delete;

inline void check_dimension(const SignedGraph& g, std::span<const double> x, const char* op) {
    if (static_cast<int>(x.size()) != g.node_count()) {
        throw std::invalid_argument(std::string(op) + ": vector length " + std::to_string(x.size()) +
                                    " does not match node count " + std::to_string(g.node_count()));
    }
}

/// y = L x computed edgewise in O(m); L = D - A with signed adjacency A.
inline std::vector<double> apply_laplacian(const SignedGraph& g, std::span<const double> x) {
    check_dimension(g, x, "apply_laplacian");
    std::vector<double> out(x.size(), 0.0);
    for (const Edge& e : g.edges()) {
        const double w = static_cast<double>(e.sign);
        out[static_cast<size_t>(e.u)] += x[static_cast<size_t>(e.u)] - w * x[static_cast<size_t>(e.v)];
        out[static_cast<size_t>(e.v)] += x[static_cast<size_t>(e.v)] - w * x[static_cast<size_t>(e.u)];
    }
    return out;
}

/// Rows of B (or B+, B-) applied to x: entry per selected edge, x_head - w x_tail.
inline std::vector<double> apply_incidence(const SignedGraph& g, std::span<const double> x,
                                           IncidenceKind which) {
    check_dimension(g, x, "apply_incidence");
    auto row = [&](const Edge& e) {
        return x[static_cast<size_t>(e.u)] - static_cast<double>(e.sign) * x[static_cast<size_t>(e.v)];
    };
    std::vector<double> out;
    if (which == IncidenceKind::Full) {
        out.reserve(g.edges().size());
        for (const Edge& e : g.edges()) out.push_back(row(e));
    } else {
        const auto& ids = which == IncidenceKind::Positive ? g.positive_edge_ids() : g.negative_edge_ids();
        out.reserve(ids.size());
        for (int id : ids) out.push_back(row(g.edges()[static_cast<size_t>(id)]));
    }
    return out;
}

/// x' L x accumulated edgewise; equals |B x|_2^2.
inline double laplacian_quadratic(const SignedGraph& g, std::span<const double> x) {
    check_dimension(g, x, "laplacian_quadratic");
    double total = 0.0;
    for (const Edge& e : g.edges()) {
        const double d = x[static_cast<size_t>(e.u)] - static_cast<double>(e.sign) * x[static_cast<size_t>(e.v)];
        total += d * d;
    }
    return total;
}

/// Unsigned 2n-node graph encoding the signed structure: a positive edge
/// (i,j) becomes (i,j) and (i+n,j+n); a negative edge becomes (i,j+n) and
/// (i+n,j). Edges are enumerated on the fly in base-edge order.
class LiftedGraph {
public:
    explicit LiftedGraph(const SignedGraph& base) : base_(&base) {}
    explicit LiftedGraph(SignedGraph&&) = delete;

    int node_count() const { return 2 * base_->node_count(); }
    int edge_count() const { return 2 * base_->edge_count(); }
    int degree(int i) const { return base_->degree(i % base_->node_count()); }
    const SignedGraph& base() const { return *base_; }

    template <typename Fn>
    void for_each_edge(Fn&& fn) const {
        const int n = base_->node_count();
        for (const Edge& e : base_->edges()) {
            if (e.sign > 0) {
                fn(e.u, e.v);
                fn(e.u + n, e.v + n);
            } else {
                fn(e.u, e.v + n);
                fn(e.u + n, e.v);
            }
        }
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(static_cast<size_t>(edge_count()));
        for_each_edge([&](int u, int v) { out.emplace_back(u, v); });
        return out;
    }

private:
    const SignedGraph* base_;
};

inline LiftedGraph lift(const SignedGraph& g) { return LiftedGraph(g); }
LiftedGraph lift(SignedGraph&&) = delete;

} // namespace signfj
