#include "conlab/graph.hpp"

#include "conlab/error.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace conlab {

Graph::Graph(int node_count, std::span<const std::pair<int, int>> edge_pairs) {
    build(node_count, edge_pairs);
}

Graph::Graph(int node_count, std::initializer_list<std::pair<int, int>> edge_pairs) {
    std::vector<std::pair<int, int>> pairs(edge_pairs);
    build(node_count, pairs);
}

void Graph::build(int node_count, std::span<const std::pair<int, int>> edge_pairs) {
    if (node_count < 0) {
        throw Error(ErrorCode::IndexOutOfRange, "negative node count");
    }
    n_ = node_count;
    adjacency_.assign(static_cast<std::size_t>(n_), {});
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : edge_pairs) {
        if (a < 0 || b < 0 || a >= n_ || b >= n_) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "edge (" + std::to_string(a) + "," + std::to_string(b) + ") with n=" +
                            std::to_string(n_));
        }
        if (a == b) {
            throw Error(ErrorCode::SelfLoop, "node " + std::to_string(a));
        }
        const Edge e{std::min(a, b), std::max(a, b)};
        if (!seen.insert({e.u, e.v}).second) {
            throw Error(ErrorCode::DuplicateEdge,
                        "(" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
        }
        const int index = static_cast<int>(edges_.size());
        edges_.push_back(e);
        adjacency_[static_cast<std::size_t>(e.u)].emplace_back(e.v, index);
        adjacency_[static_cast<std::size_t>(e.v)].emplace_back(e.u, index);
    }

    components_.assign(static_cast<std::size_t>(n_), -1);
    component_count_ = 0;
    for (int start = 0; start < n_; ++start) {
        if (components_[static_cast<std::size_t>(start)] >= 0) continue;
        std::vector<int> stack{start};
        components_[static_cast<std::size_t>(start)] = component_count_;
        while (!stack.empty()) {
            const int node = stack.back();
            stack.pop_back();
            for (const auto& [next, e] : adjacency_[static_cast<std::size_t>(node)]) {
                if (components_[static_cast<std::size_t>(next)] < 0) {
                    components_[static_cast<std::size_t>(next)] = component_count_;
                    stack.push_back(next);
                }
            }
        }
        ++component_count_;
    }
}

std::optional<int> Graph::edge_index(int a, int b) const {
    if (a < 0 || b < 0 || a >= n_ || b >= n_) return std::nullopt;
    for (const auto& [next, e] : neighbors(a)) {
        if (next == b) return e;
    }
    return std::nullopt;
}

bool Graph::is_cycle() const {
    if (n_ < 3 || !connected() || edge_count() != n_) return false;
    for (int i = 0; i < n_; ++i) {
        if (degree(i) != 2) return false;
    }
    return true;
}

void Graph::require_connected(const char* what) const {
    if (!connected()) {
        throw Error(ErrorCode::Disconnected,
                    std::string(what) + " requires a connected graph (" +
                        std::to_string(component_count_) + " components)");
    }
}

Graph path_graph(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
    return Graph(n, pairs);
}

Graph cycle_graph(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
    if (n >= 3) pairs.emplace_back(0, n - 1);
    return Graph(n, pairs);
}

Graph complete_graph(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return Graph(n, pairs);
}

Graph star_graph(int leaves) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i <= leaves; ++i) pairs.emplace_back(0, i);
    return Graph(leaves + 1, pairs);
}

Eigen::MatrixXd incidence_matrix(const Graph& g) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(g.node_count(), g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        d(g.edge(e).u, e) = -1.0;
        d(g.edge(e).v, e) = 1.0;
    }
    return d;
}

namespace {

// BFS tree: parent node and parent edge per node (root has -1).
struct TreeLinks {
    std::vector<int> parent;
    std::vector<int> parent_edge;
    std::vector<int> depth;
    std::vector<int> edges;
};

TreeLinks bfs_tree(const Graph& g) {
    g.require_connected("spanning_tree");
    const auto n = static_cast<std::size_t>(g.node_count());
    TreeLinks t{std::vector<int>(n, -1), std::vector<int>(n, -1), std::vector<int>(n, -1), {}};
    if (n == 0) return t;
    std::queue<int> queue;
    queue.push(0);
    t.depth[0] = 0;
    while (!queue.empty()) {
        const int node = queue.front();
        queue.pop();
        for (const auto& [next, e] : g.neighbors(node)) {
            if (t.depth[static_cast<std::size_t>(next)] >= 0) continue;
            t.depth[static_cast<std::size_t>(next)] = t.depth[static_cast<std::size_t>(node)] + 1;
            t.parent[static_cast<std::size_t>(next)] = node;
            t.parent_edge[static_cast<std::size_t>(next)] = e;
            t.edges.push_back(e);
            queue.push(next);
        }
    }
    std::sort(t.edges.begin(), t.edges.end());
    return t;
}

// Coefficient of edge e when traversed from node `from` to its other end.
double traversal_sign(const Graph& g, int e, int from) {
    return g.edge(e).u == from ? 1.0 : -1.0;
}

}  // namespace

std::vector<int> spanning_tree(const Graph& g) { return bfs_tree(g).edges; }

std::vector<Eigen::VectorXd> cycle_space_basis(const Graph& g) {
    const TreeLinks tree = bfs_tree(g);
    std::vector<char> in_tree(static_cast<std::size_t>(g.edge_count()), 0);
    for (int e : tree.edges) in_tree[static_cast<std::size_t>(e)] = 1;

    std::vector<Eigen::VectorXd> basis;
    for (int e = 0; e < g.edge_count(); ++e) {
        if (in_tree[static_cast<std::size_t>(e)]) continue;
        // Walk u -> v along e, then v back to u through the tree.
        Eigen::VectorXd c = Eigen::VectorXd::Zero(g.edge_count());
        c(e) = 1.0;
        int a = g.edge(e).v;  // walking forward from v
        int b = g.edge(e).u;  // walking backward towards u
        std::vector<std::pair<int, int>> tail;  // edges on the u side, reversed later
        while (a != b) {
            const auto ia = static_cast<std::size_t>(a);
            const auto ib = static_cast<std::size_t>(b);
            if (tree.depth[ia] >= tree.depth[ib]) {
                const int pe = tree.parent_edge[ia];
                c(pe) += traversal_sign(g, pe, a);
                a = tree.parent[ia];
            } else {
                const int pe = tree.parent_edge[ib];
                // traversed from parent(b) to b
                c(pe) += traversal_sign(g, pe, tree.parent[ib]);
                b = tree.parent[ib];
            }
        }
        basis.push_back(std::move(c));
    }
    return basis;
}

std::vector<Eigen::VectorXd> cut_space_basis(const Graph& g) {
    const TreeLinks tree = bfs_tree(g);
    const auto n = static_cast<std::size_t>(g.node_count());
    std::vector<std::vector<int>> children(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (tree.parent[i] >= 0) children[static_cast<std::size_t>(tree.parent[i])].push_back(static_cast<int>(i));
    }
    std::vector<Eigen::VectorXd> basis;
    for (int e : tree.edges) {
        // The child endpoint's subtree is one side of the fundamental cut.
        const Edge& edge = g.edge(e);
        const int child = tree.parent[static_cast<std::size_t>(edge.v)] == edge.u &&
                                  tree.parent_edge[static_cast<std::size_t>(edge.v)] == e
                              ? edge.v
                              : edge.u;
        Eigen::VectorXd side = Eigen::VectorXd::Zero(g.node_count());
        std::vector<int> stack{child};
        while (!stack.empty()) {
            const int node = stack.back();
            stack.pop_back();
            side(node) = 1.0;
            for (int c : children[static_cast<std::size_t>(node)]) stack.push_back(c);
        }
        Eigen::VectorXd cut = Eigen::VectorXd::Zero(g.edge_count());
        for (int f = 0; f < g.edge_count(); ++f) cut(f) = side(g.edge(f).v) - side(g.edge(f).u);
        basis.push_back(std::move(cut));
    }
    return basis;
}

std::vector<int> cycle_order(const Graph& g) {
    if (!g.is_cycle()) throw Error(ErrorCode::NotACycle, "graph is not a cycle");
    std::vector<int> order{0};
    int previous = -1;
    int current = 0;
    while (static_cast<int>(order.size()) < g.node_count()) {
        // Go towards the smaller-labelled neighbor first for a canonical direction.
        int next = -1;
        for (const auto& [nb, e] : g.neighbors(current)) {
            if (nb == previous) continue;
            if (next < 0 || (previous < 0 && nb < next)) next = nb;
        }
        previous = current;
        current = next;
        order.push_back(current);
    }
    return order;
}

const char* to_string(BlockKind kind) noexcept {
    switch (kind) {
        case BlockKind::TreeEdge: return "TreeEdge";
        case BlockKind::Cycle: return "Cycle";
        case BlockKind::Complete: return "Complete";
        case BlockKind::General: return "General";
    }
    return "General";
}

namespace {

BlockKind classify_block(const Graph& g, const std::vector<int>& nodes, const std::vector<int>& edges) {
    const auto k = static_cast<int>(nodes.size());
    const auto m = static_cast<int>(edges.size());
    if (m == 1) return BlockKind::TreeEdge;
    std::vector<int> degree(static_cast<std::size_t>(g.node_count()), 0);
    for (int e : edges) {
        ++degree[static_cast<std::size_t>(g.edge(e).u)];
        ++degree[static_cast<std::size_t>(g.edge(e).v)];
    }
    const bool two_regular = std::all_of(nodes.begin(), nodes.end(), [&](int v) {
        return degree[static_cast<std::size_t>(v)] == 2;
    });
    // K3 is reported as a cycle: the cycle analysis covers its continuum of equilibria.
    if (two_regular && m == k) return BlockKind::Cycle;
    if (m == k * (k - 1) / 2) return BlockKind::Complete;
    return BlockKind::General;
}

}  // namespace

BlockDecomposition block_decomposition(const Graph& g) {
    g.require_connected("block_decomposition");
    const auto n = static_cast<std::size_t>(g.node_count());
    std::vector<int> discovery(n, -1);
    std::vector<int> low(n, 0);
    std::vector<char> is_cut(n, 0);
    std::vector<int> edge_stack;
    std::vector<std::vector<int>> edge_groups;
    int timer = 0;

    std::function<void(int, int)> dfs = [&](int node, int via_edge) {
        const auto in = static_cast<std::size_t>(node);
        discovery[in] = low[in] = timer++;
        int children = 0;
        for (const auto& [next, e] : g.neighbors(node)) {
            if (e == via_edge) continue;
            const auto inext = static_cast<std::size_t>(next);
            if (discovery[inext] < 0) {
                edge_stack.push_back(e);
                ++children;
                dfs(next, e);
                low[in] = std::min(low[in], low[inext]);
                if (low[inext] >= discovery[in]) {
                    if (via_edge >= 0 || children > 1) is_cut[in] = 1;
                    std::vector<int> group;
                    while (true) {
                        const int top = edge_stack.back();
                        edge_stack.pop_back();
                        group.push_back(top);
                        if (top == e) break;
                    }
                    edge_groups.push_back(std::move(group));
                }
            } else if (discovery[inext] < discovery[in]) {
                edge_stack.push_back(e);
                low[in] = std::min(low[in], discovery[inext]);
            }
        }
        if (via_edge < 0 && children > 1) is_cut[in] = 1;
    };
    if (n > 0) dfs(0, -1);

    BlockDecomposition out;
    for (auto& group : edge_groups) {
        std::sort(group.begin(), group.end());
        std::set<int> nodes;
        for (int e : group) {
            nodes.insert(g.edge(e).u);
            nodes.insert(g.edge(e).v);
        }
        Block b;
        b.nodes.assign(nodes.begin(), nodes.end());
        b.edges = std::move(group);
        b.kind = classify_block(g, b.nodes, b.edges);
        out.blocks.push_back(std::move(b));
    }
    std::sort(out.blocks.begin(), out.blocks.end(),
              [](const Block& a, const Block& b) { return a.edges.front() < b.edges.front(); });
    for (std::size_t i = 0; i < n; ++i) {
        if (is_cut[i]) out.cut_nodes.push_back(static_cast<int>(i));
    }
    return out;
}

Subgraph extract_block(const Graph& g, const Block& block) {
    Subgraph sub;
    sub.nodes = block.nodes;
    sub.edges = block.edges;
    std::vector<int> local(static_cast<std::size_t>(g.node_count()), -1);
    for (std::size_t i = 0; i < block.nodes.size(); ++i) {
        local[static_cast<std::size_t>(block.nodes[i])] = static_cast<int>(i);
    }
    std::vector<std::pair<int, int>> pairs;
    for (int e : block.edges) {
        pairs.emplace_back(local[static_cast<std::size_t>(g.edge(e).u)],
                           local[static_cast<std::size_t>(g.edge(e).v)]);
    }
    sub.graph = Graph(static_cast<int>(block.nodes.size()), pairs);
    return sub;
}

bool blocks_form_tree(const Graph& g, const BlockDecomposition& decomposition) {
    // Block-cut tree: one vertex per block and per cut-node.
    const auto blocks = static_cast<int>(decomposition.blocks.size());
    std::vector<int> cut_vertex(static_cast<std::size_t>(g.node_count()), -1);
    int vertices = blocks;
    for (int c : decomposition.cut_nodes) cut_vertex[static_cast<std::size_t>(c)] = vertices++;
    std::vector<std::pair<int, int>> links;
    for (int b = 0; b < blocks; ++b) {
        for (int v : decomposition.blocks[static_cast<std::size_t>(b)].nodes) {
            if (cut_vertex[static_cast<std::size_t>(v)] >= 0) {
                links.emplace_back(b, cut_vertex[static_cast<std::size_t>(v)]);
            }
        }
    }
    const Graph tree(vertices, links);
    return tree.is_tree() || (vertices == 1 && links.empty());
}

std::string to_dot(const Graph& g, const BlockDecomposition* decomposition) {
    static constexpr std::array<const char*, 8> palette = {"red",    "blue",   "darkgreen", "orange",
                                                           "purple", "brown",  "magenta",   "cyan"};
    std::vector<int> block_of(static_cast<std::size_t>(g.edge_count()), -1);
    if (decomposition != nullptr) {
        for (std::size_t b = 0; b < decomposition->blocks.size(); ++b) {
            for (int e : decomposition->blocks[b].edges) block_of[static_cast<std::size_t>(e)] = static_cast<int>(b);
        }
    }
    std::ostringstream out;
    out << "graph G {\n";
    for (int i = 0; i < g.node_count(); ++i) out << "  " << i + 1 << ";\n";
    for (int e = 0; e < g.edge_count(); ++e) {
        out << "  " << g.edge(e).u + 1 << " -- " << g.edge(e).v + 1;
        const int b = block_of[static_cast<std::size_t>(e)];
        if (b >= 0) {
            out << " [color=" << palette[static_cast<std::size_t>(b) % palette.size()] << ", block=" << b + 1
                << "]";
        }
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace conlab
