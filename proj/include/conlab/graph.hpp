#pragma once

// Undirected simple graphs, the signed incidence (boundary) matrix, cycle and
// cut space bases built from a spanning tree, and the block decomposition
// used to split a network into motifs joined at cut-nodes.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace conlab {

/// Edge stored canonically with u < v. The edge coordinate is x[v] - x[u].
struct Edge {
    int u = 0;
    int v = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

class Graph {
public:
    Graph() = default;

    /// Throws SelfLoop, DuplicateEdge or IndexOutOfRange.
    Graph(int node_count, std::span<const std::pair<int, int>> edge_pairs);
    Graph(int node_count, std::initializer_list<std::pair<int, int>> edge_pairs);

    [[nodiscard]] int node_count() const noexcept { return n_; }
    [[nodiscard]] int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }

    /// (neighbor, edge index) pairs.
    [[nodiscard]] const std::vector<std::pair<int, int>>& neighbors(int node) const {
        return adjacency_.at(static_cast<std::size_t>(node));
    }
    [[nodiscard]] int degree(int node) const { return static_cast<int>(neighbors(node).size()); }

    [[nodiscard]] std::optional<int> edge_index(int a, int b) const;

    [[nodiscard]] bool connected() const noexcept { return component_count_ <= 1; }
    [[nodiscard]] int component_count() const noexcept { return component_count_; }
    [[nodiscard]] const std::vector<int>& component_labels() const noexcept { return components_; }

    [[nodiscard]] bool is_tree() const noexcept { return connected() && edge_count() == n_ - 1; }
    [[nodiscard]] bool is_cycle() const;
    [[nodiscard]] bool is_complete() const noexcept {
        return n_ >= 2 && edge_count() == n_ * (n_ - 1) / 2;
    }

    /// Throws Disconnected unless the graph is connected.
    void require_connected(const char* what) const;

private:
    void build(int node_count, std::span<const std::pair<int, int>> edge_pairs);

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, int>>> adjacency_;
    std::vector<int> components_;
    int component_count_ = 0;
};

/// Common small graphs; nodes 0..n-1.
Graph path_graph(int n);
Graph cycle_graph(int n);
Graph complete_graph(int n);
Graph star_graph(int leaves);

/// n x m matrix: column of edge {j,k}, j<k, has -1 at row j and +1 at row k.
Eigen::MatrixXd incidence_matrix(const Graph& g);

/// Edge indices of a BFS spanning tree rooted at node 0. Throws Disconnected.
std::vector<int> spanning_tree(const Graph& g);

/// Fundamental cycles of the non-tree edges (m - n + 1 vectors in ker d).
std::vector<Eigen::VectorXd> cycle_space_basis(const Graph& g);

/// Fundamental cut-sets of the tree edges (n - 1 vectors spanning im d^T).
std::vector<Eigen::VectorXd> cut_space_basis(const Graph& g);

/// Cyclic node order v_0, v_1, ..., v_{n-1} of a cycle graph. Throws NotACycle.
std::vector<int> cycle_order(const Graph& g);

enum class BlockKind { TreeEdge, Cycle, Complete, General };

[[nodiscard]] const char* to_string(BlockKind kind) noexcept;

struct Block {
    std::vector<int> nodes;  // ascending
    std::vector<int> edges;  // ascending edge indices of the parent graph
    BlockKind kind = BlockKind::General;
};

struct BlockDecomposition {
    std::vector<Block> blocks;
    std::vector<int> cut_nodes;  // ascending
};

/// Maximal 2-connected pieces and bridges via one low-link DFS.
/// Blocks are ordered by their smallest edge index. Throws Disconnected.
BlockDecomposition block_decomposition(const Graph& g);

/// A block (or any node subset) lifted out as a standalone graph. Local node
/// i corresponds to `nodes[i]`; local edge e corresponds to `edges[e]`, and
/// edge orientation is preserved because node order is preserved.
struct Subgraph {
    Graph graph;
    std::vector<int> nodes;
    std::vector<int> edges;
};

Subgraph extract_block(const Graph& g, const Block& block);

/// True when contracting every block leaves a tree (block-cut tree check).
bool blocks_form_tree(const Graph& g, const BlockDecomposition& decomposition);

/// Plain DOT text; with a decomposition each edge is colored by its block.
/// Node labels are 1-based.
std::string to_dot(const Graph& g, const BlockDecomposition* decomposition = nullptr);

}  // namespace conlab
