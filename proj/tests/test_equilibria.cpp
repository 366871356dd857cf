#include <doctest.h>

#include "commands.hpp"
#include "conlab/equilibria.hpp"
#include "conlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace conlab;

namespace {

System cubic_on(Graph g) { return System(std::move(g), CouplingAssignment::uniform(CouplingFunction::cubic())); }

std::vector<double> sorted(const Eigen::VectorXd& x) {
    std::vector<double> v(x.data(), x.data() + x.size());
    std::sort(v.begin(), v.end());
    return v;
}

std::set<std::vector<long>> edge_keys(const std::vector<Equilibrium>& list) {
    std::set<std::vector<long>> out;
    for (const auto& eq : list) {
        std::vector<long> k;
        for (Eigen::Index e = 0; e < eq.y.size(); ++e) k.push_back(std::lround(eq.y(e) * 1e6));
        out.insert(k);
    }
    return out;
}

}  // namespace

TEST_CASE("detailed balance on trees") {
    const auto star = detailed_balance(cubic_on(star_graph(3)));
    CHECK(star.size() == 27);
    for (const auto& eq : star) {
        CHECK(eq.residual <= 1e-12);
        for (Eigen::Index e = 0; e < 3; ++e) CHECK(std::min({std::abs(eq.y(e)), std::abs(eq.y(e) - 1), std::abs(eq.y(e) + 1)}) <= 1e-12);
    }
    const System mixed(path_graph(3), CouplingAssignment::per_edge({CouplingFunction::cubic(), CouplingFunction::linear(-1.0)}));
    CHECK(detailed_balance(mixed).size() == 3);
}

TEST_CASE("detailed balance on the triangle matches brute force") {
    const auto db = detailed_balance(cubic_on(cycle_graph(3)));
    // Brute force: y in {0,+-1}^3 with y0 + y1 - y2 = 0 for edges (0,1),(1,2),(0,2).
    int brute = 0;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c) brute += (a + b - c == 0) ? 1 : 0;
    CHECK(static_cast<int>(db.size()) == brute);
    CHECK(brute == 7);
}

TEST_CASE("tree equilibria") {
    CHECK(tree_equilibria(cubic_on(path_graph(2))).size() == 3);
    CHECK(tree_equilibria(cubic_on(path_graph(3))).size() == 9);
    CHECK(edge_keys(tree_equilibria(cubic_on(path_graph(4)))) == edge_keys(tree_equilibria(cubic_on(star_graph(3)))));
    CHECK_THROWS_AS((void)tree_equilibria(cubic_on(cycle_graph(3))), Error);
    const auto eqs = tree_equilibria(cubic_on(path_graph(2)));
    for (const auto& eq : eqs) {
        REQUIRE(eq.edge_signs.size() == 1);
        CHECK(eq.edge_signs[0] == (std::abs(eq.y(0)) < 0.5 ? 1 : -1));
    }
}

TEST_CASE("combinatorial blow-up") {
    EnumerationOptions opt;
    opt.max_states = 10;
    CHECK_THROWS_AS((void)detailed_balance(cubic_on(star_graph(3)), opt), Error);
}

TEST_CASE("cycle families") {
    const auto c3 = cycle_family(cubic_on(cycle_graph(3)));
    REQUIRE(c3.family);
    CHECK(c3.family->root_count() == 3);
    CHECK(c3.family->lambda_min() < 0.0);
    CHECK(c3.family->lambda_max() > 0.0);
    auto z = sorted(c3.family->z(0.0));
    CHECK(z[0] == doctest::Approx(-1.0));
    CHECK(z[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(z[2] == doctest::Approx(1.0));
    for (const auto& eq : c3.family->sample(25)) CHECK(eq.residual <= 1e-10);

    CHECK(cycle_family(cubic_on(cycle_graph(6))).family.has_value());
    const auto c4 = cycle_family(cubic_on(cycle_graph(4)));
    CHECK(!c4.family);
    CHECK(!c4.explanation.empty());
    CHECK_THROWS_AS((void)cycle_family(cubic_on(path_graph(3))), Error);
    CHECK_THROWS_AS((void)cycle_family(System(cycle_graph(3), CouplingAssignment::uniform(CouplingFunction::sine(1.0)))), Error);
}

TEST_CASE("clique equilibria") {
    const auto k4 = clique_equilibria(CouplingFunction::cubic(), 4);
    REQUIRE(k4.size() == 4);
    const std::vector<std::vector<double>> expected{
        {0, 0, 0, 0}, {-0.75, 0.25, 0.25, 0.25}, {-0.5, -0.5, 0.5, 0.5}, {-0.25, -0.25, -0.25, 0.75}};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto got = sorted(k4[i].x);
        for (std::size_t k = 0; k < 4; ++k) CHECK(got[k] == doctest::Approx(expected[i][k]).epsilon(1e-12));
        CHECK(k4[i].residual <= 1e-10);
        CHECK(!k4[i].incomplete);
    }
    CHECK(clique_equilibria(CouplingFunction::linear(-1.0), 3).size() == 1);
    // roots 1 and 2 are not additive-open
    const auto tagged = clique_equilibria(CouplingFunction::odd_polynomial({4.0, -5.0, 1.0}), 4);
    CHECK(std::all_of(tagged.begin(), tagged.end(), [](const Equilibrium& e) { return e.incomplete; }));
}

TEST_CASE("coalescence product") {
    // Two single-edge blocks against the tree enumeration.
    const Graph p = path_graph(3);
    const System s = cubic_on(p);
    const auto dec = block_decomposition(p);
    std::vector<std::vector<Eigen::VectorXd>> values(2);
    for (double y : {-1.0, 0.0, 1.0})
        for (auto& v : values) v.push_back(Eigen::VectorXd::Constant(1, y));
    const auto product = compose_coalescence(p, dec, values);
    CHECK(product.count() == 9);
    std::vector<Equilibrium> composed;
    for (std::uint64_t i = 0; i < product.count(); ++i) composed.push_back(product.equilibrium(s, i));
    CHECK(edge_keys(composed) == edge_keys(tree_equilibria(s)));
    CHECK(product.choice(5) == std::vector<int>{1, 2});

    values[1].clear();
    CHECK(compose_coalescence(p, dec, values).empty());
}

TEST_CASE("enumeration through blocks") {
    cli::GlobalOptions opt;
    const System motifs = cubic_on(Graph(9, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {3, 5}, {5, 6}, {5, 7}, {5, 8}, {6, 7}, {6, 8}, {7, 8}}));
    const auto all = cli::enumerate_equilibria(motifs, opt, 0);
    // 7 on the triangle, 27 on the star, 15 clique forms on K4.
    CHECK(all.size() == 7u * 27u * 15u);
    for (std::size_t i = 0; i < all.size(); i += 97) CHECK(all[i].residual <= 1e-10);

    const auto star = cli::enumerate_equilibria(cubic_on(star_graph(3)), opt, 5);
    CHECK(star.size() == 27);
    const auto c3 = cli::enumerate_equilibria(cubic_on(cycle_graph(3)), opt, 5);
    CHECK(std::count_if(c3.begin(), c3.end(), [](const Equilibrium& e) { return e.provenance == Provenance::CycleFamily; }) >= 5);
    const System lin(path_graph(4), CouplingAssignment::uniform(CouplingFunction::linear(-1.0)));
    CHECK(cli::enumerate_equilibria(lin, opt, 5).size() == 1);

    // K4 clique forms equal the detailed-balance set.
    const System k4 = cubic_on(complete_graph(4));
    CHECK(edge_keys(cli::block_equilibria(k4, opt, 0)) == edge_keys(detailed_balance(k4)));
}

TEST_CASE("refinement") {
    const System k4 = cubic_on(complete_graph(4));
    const Eigen::Vector4d exact(0.5, 0.5, -0.5, -0.5);
    const Equilibrium same = refine(k4, exact);
    CHECK((same.x - exact).norm() <= 1e-12);

    const double s = std::sqrt(2.0 / 5.0);
    const Equilibrium extra = refine(k4, Eigen::Vector4d(0.03, -0.02, 0.6, -0.66));
    const auto got = sorted(extra.x);
    CHECK(got[0] == doctest::Approx(-s));
    CHECK(got[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(got[3] == doctest::Approx(s));
    CHECK(extra.residual <= 1e-10);

    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    for (const auto& eq : detailed_balance(cubic_on(star_graph(3)))) {
        Eigen::VectorXd guess = eq.x;
        for (Eigen::Index i = 0; i < guess.size(); ++i) guess(i) += u(rng);
        CHECK((refine(cubic_on(star_graph(3)), guess).x - eq.x).norm() <= 1e-8);
    }
}

TEST_CASE("equilibrium predicates") {
    const System c3 = cubic_on(cycle_graph(3));
    CHECK(is_equilibrium(c3, Eigen::Vector3d::Constant(4.0)));
    const double r = std::sqrt(2.0 / 3.0);
    const Eigen::Vector3d on_circle = r * Eigen::Vector3d(-1, 1, 0) / std::sqrt(2.0);
    CHECK(is_equilibrium(c3, on_circle));
    CHECK(!is_equilibrium(c3, 1.1 * on_circle));

    CHECK(consensus_only_check(System(cycle_graph(4), CouplingAssignment::uniform(CouplingFunction::linear(-1.0)))));
    CHECK(!consensus_only_check(c3));
    CHECK(consensus_only_check(System(cycle_graph(4), CouplingAssignment::uniform(CouplingFunction::odd_polynomial({-1.0, -1.0})))));
}

TEST_CASE("deduplicate keeps first occurrences") {
    const System s = cubic_on(path_graph(2));
    std::vector<Equilibrium> list{make_equilibrium(s, Eigen::Vector2d(0, 1)), make_equilibrium(s, Eigen::Vector2d(3, 4)),
                                  make_equilibrium(s, Eigen::Vector2d(0, 0))};
    list[1].provenance = Provenance::Refined;
    const auto out = deduplicate(list);
    REQUIRE(out.size() == 2);
    CHECK(out[0].provenance == Provenance::DetailedBalance);
}
