#include <doctest.h>

#include "conlab/error.hpp"
#include "conlab/graph.hpp"
#include "demos.hpp"

#include <Eigen/Dense>

#include <random>
#include <set>

using namespace conlab;

namespace {

int rank_of(const std::vector<Eigen::VectorXd>& vs, Eigen::Index rows) {
    if (vs.empty()) return 0;
    Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(vs.size()));
    for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vs[i];
    return static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(m).rank());
}

Graph random_connected(std::mt19937_64& rng, int n, double p) {
    std::vector<std::pair<int, int>> edges;
    std::set<std::pair<int, int>> seen;
    for (int v = 1; v < n; ++v) {
        const int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
        edges.emplace_back(u, v);
        seen.emplace(u, v);
    }
    std::bernoulli_distribution coin(p);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (!seen.count({a, b}) && coin(rng)) edges.emplace_back(a, b);
    return Graph(n, edges);
}

}  // namespace

TEST_CASE("graph construction and validation") {
    const Graph c3(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(c3.edge_count() == 3);
    CHECK(c3.is_cycle());
    CHECK(c3.connected());

    auto code_of = [](auto&& build) {
        try {
            build();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    CHECK(code_of([] { return Graph(2, {{0, 0}}); }) == ErrorCode::SelfLoop);
    CHECK(code_of([] { return Graph(3, {{0, 1}, {1, 0}}); }) == ErrorCode::DuplicateEdge);
    CHECK(code_of([] { return Graph(2, {{0, 5}}); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([] { Graph(4, {{0, 1}, {2, 3}}).require_connected("test"); }) == ErrorCode::Disconnected);
}

TEST_CASE("incidence matrix") {
    const Eigen::MatrixXd d1 = incidence_matrix(Graph(2, {{0, 1}}));
    CHECK(d1(0, 0) == -1.0);
    CHECK(d1(1, 0) == 1.0);

    const Eigen::MatrixXd d = incidence_matrix(cycle_graph(3));
    const Eigen::MatrixXd expected = 2.0 * Eigen::MatrixXd::Identity(3, 3) -
                                     (Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3));
    CHECK((d * d.transpose() - expected).norm() == doctest::Approx(0.0));

    const Eigen::MatrixXd dp = incidence_matrix(path_graph(3));
    const Eigen::VectorXd diag = (dp * dp.transpose()).diagonal();
    CHECK(diag(0) == 1.0);
    CHECK(diag(1) == 2.0);
    CHECK(diag(2) == 1.0);
}

TEST_CASE("spanning tree") {
    CHECK(spanning_tree(star_graph(3)).size() == 3);
    CHECK(spanning_tree(cycle_graph(3)).size() == 2);
    const Graph k4 = complete_graph(4);
    const auto tree = spanning_tree(k4);
    REQUIRE(tree.size() == 3);
    std::vector<std::pair<int, int>> pairs;
    for (int e : tree) pairs.emplace_back(k4.edge(e).u, k4.edge(e).v);
    CHECK(Graph(4, pairs).is_tree());
}

TEST_CASE("cycle and cut spaces") {
    CHECK(cycle_space_basis(path_graph(4)).empty());

    const Graph c3 = cycle_graph(3);
    const Eigen::MatrixXd d3 = incidence_matrix(c3);
    const auto cyc = cycle_space_basis(c3);
    REQUIRE(cyc.size() == 1);
    CHECK((d3 * cyc[0]).norm() == doctest::Approx(0.0));
    CHECK(cyc[0].cwiseAbs().minCoeff() == 1.0);
    const auto cuts3 = cut_space_basis(c3);
    REQUIRE(cuts3.size() == 2);
    for (const auto& c : cuts3) CHECK(c.dot(cyc[0]) == doctest::Approx(0.0));

    const Graph k4 = complete_graph(4);
    const auto cyc4 = cycle_space_basis(k4);
    CHECK(cyc4.size() == 3);
    CHECK(rank_of(cyc4, 6) == 3);
    for (const auto& v : cyc4) CHECK((incidence_matrix(k4) * v).norm() == doctest::Approx(0.0));

    const auto single = cut_space_basis(Graph(2, {{0, 1}}));
    REQUIRE(single.size() == 1);
    CHECK(std::abs(single[0](0)) == 1.0);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const Graph g = random_connected(rng, 3 + trial % 7, 0.4);
        auto all = cycle_space_basis(g);
        const auto cuts = cut_space_basis(g);
        all.insert(all.end(), cuts.begin(), cuts.end());
        CHECK(rank_of(all, g.edge_count()) == g.edge_count());
    }
}

TEST_CASE("cycle order walks the cycle") {
    const Graph g(5, {{0, 3}, {3, 1}, {1, 4}, {4, 2}, {0, 2}});
    const auto order = cycle_order(g);
    REQUIRE(order.size() == 5);
    CHECK(order[0] == 0);
    CHECK(order[1] == 2);
    for (std::size_t i = 0; i < order.size(); ++i) CHECK(g.edge_index(order[i], order[(i + 1) % 5]).has_value());
}

TEST_CASE("block decomposition of the motif example") {
    const Graph g = cli::motif_graph();
    const BlockDecomposition dec = block_decomposition(g);
    REQUIRE(dec.blocks.size() == 5);
    CHECK(dec.blocks[0].kind == BlockKind::Cycle);
    CHECK(dec.blocks[0].nodes == std::vector<int>{0, 1, 2});
    for (int b = 1; b <= 3; ++b) CHECK(dec.blocks[static_cast<std::size_t>(b)].kind == BlockKind::TreeEdge);
    CHECK(dec.blocks[1].nodes == std::vector<int>{2, 3});
    CHECK(dec.blocks[2].nodes == std::vector<int>{3, 4});
    CHECK(dec.blocks[3].nodes == std::vector<int>{3, 5});
    CHECK(dec.blocks[4].kind == BlockKind::Complete);
    CHECK(dec.blocks[4].nodes == std::vector<int>{5, 6, 7, 8});
    CHECK(dec.cut_nodes == std::vector<int>{2, 3, 5});
    CHECK(blocks_form_tree(g, dec));

    const auto dot = to_dot(g, &dec);
    CHECK(dot.find("graph") != std::string::npos);
    CHECK(dot.find("9 -- 8") == std::string::npos);
    CHECK(dot.find("8 -- 9") != std::string::npos);
}

TEST_CASE("block decomposition of trees and cliques") {
    const auto tree = block_decomposition(path_graph(5));
    CHECK(tree.blocks.size() == 4);
    for (const auto& b : tree.blocks) CHECK(b.kind == BlockKind::TreeEdge);

    const auto k4 = block_decomposition(complete_graph(4));
    REQUIRE(k4.blocks.size() == 1);
    CHECK(k4.blocks[0].kind == BlockKind::Complete);
    CHECK(k4.cut_nodes.empty());

    const auto theta = block_decomposition(Graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}}));
    REQUIRE(theta.blocks.size() == 1);
    CHECK(theta.blocks[0].kind == BlockKind::General);
}

TEST_CASE("extracted blocks keep orientation") {
    const Graph g = cli::motif_graph();
    const auto dec = block_decomposition(g);
    const Subgraph k4 = extract_block(g, dec.blocks[4]);
    CHECK(k4.graph.is_complete());
    for (int e = 0; e < k4.graph.edge_count(); ++e) {
        const Edge& local = k4.graph.edge(e);
        const Edge& parent = g.edge(k4.edges[static_cast<std::size_t>(e)]);
        CHECK(k4.nodes[static_cast<std::size_t>(local.u)] == parent.u);
        CHECK(k4.nodes[static_cast<std::size_t>(local.v)] == parent.v);
    }
}

TEST_CASE("random graphs: every edge in exactly one block, block-cut tree") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const Graph g = random_connected(rng, 4 + trial % 8, 0.15);
        const auto dec = block_decomposition(g);
        std::vector<int> hits(static_cast<std::size_t>(g.edge_count()), 0);
        for (const auto& b : dec.blocks)
            for (int e : b.edges) ++hits[static_cast<std::size_t>(e)];
        for (int h : hits) CHECK(h == 1);
        CHECK(blocks_form_tree(g, dec));
    }
}
