#include <doctest.h>

#include "conlab/dynamics.hpp"
#include "conlab/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace conlab;

namespace {

System cubic_on(Graph g) { return System(std::move(g), CouplingAssignment::uniform(CouplingFunction::cubic())); }

Eigen::VectorXd circle_point(double theta) {
    const double r = std::sqrt(2.0 / 3.0);
    Eigen::Vector3d a(-1, 1, 0);
    Eigen::Vector3d b(1, 1, -2);
    return r * (std::cos(theta) * a / std::sqrt(2.0) + std::sin(theta) * b / std::sqrt(6.0));
}

Eigen::MatrixXd fd_jacobian(const System& s, const Eigen::VectorXd& x) {
    const double h = 1e-6;
    Eigen::MatrixXd j(x.size(), x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        Eigen::VectorXd p = x;
        Eigen::VectorXd m = x;
        p(k) += h;
        m(k) -= h;
        j.col(k) = (vector_field(s, p) - vector_field(s, m)) / (2 * h);
    }
    return j;
}

}  // namespace

TEST_CASE("systems need a coupling per edge") {
    CHECK_THROWS_AS(System(cycle_graph(3), CouplingAssignment::per_edge({CouplingFunction::cubic()})), Error);
}

TEST_CASE("vector field") {
    const System s = cubic_on(complete_graph(4));
    CHECK(vector_field(s, Eigen::VectorXd::Constant(4, 2.5)).norm() == 0.0);

    const System c3 = cubic_on(cycle_graph(3));
    for (double theta : {0.0, 0.7, 2.0, 4.5}) CHECK(vector_field(c3, circle_point(theta)).norm() <= 1e-12);

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<CouplingFunction> fs;
        const Graph g = complete_graph(5);
        for (int e = 0; e < g.edge_count(); ++e) fs.push_back(CouplingFunction::odd_polynomial({u(rng), u(rng)}));
        const System ps(g, CouplingAssignment::per_edge(fs));
        Eigen::VectorXd x(5);
        for (int i = 0; i < 5; ++i) x(i) = u(rng);
        CHECK((vector_field(ps, x) - vector_field_matrix(ps, x)).norm() <= 1e-12);
    }
}

TEST_CASE("edge vector field") {
    const System s = cubic_on(complete_graph(4));
    CHECK(edge_vector_field(s, Eigen::VectorXd::Zero(6)).norm() == 0.0);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = u(rng);
        const Eigen::VectorXd y = edge_coordinates(s.graph(), x);
        CHECK((edge_vector_field(s, y) - s.incidence().transpose() * vector_field(s, x)).norm() <= 1e-12);
    }
    Eigen::VectorXd cyc = Eigen::VectorXd::Zero(6);
    cyc(0) = 1.0;
    CHECK_THROWS_AS((void)edge_vector_field(s, cyc), Error);

    const System tree = cubic_on(star_graph(3));
    CHECK(edge_vector_field(tree, Eigen::Vector3d(1, 0, -1)).norm() == 0.0);
}

TEST_CASE("node states from edge coordinates") {
    const Graph g = complete_graph(4);
    Eigen::Vector4d x(0.3, -0.1, 0.5, -0.7);
    const Eigen::VectorXd back = node_from_edges(g, edge_coordinates(g, x));
    CHECK((back - mean_zero(x)).norm() <= 1e-12);
    CHECK(cut_space_residual(g, edge_coordinates(g, x)) <= 1e-12);
}

TEST_CASE("Jacobian") {
    const System lin(complete_graph(4), CouplingAssignment::uniform(CouplingFunction::linear(-1.0)));
    const Eigen::MatrixXd l = incidence_matrix(complete_graph(4)) * incidence_matrix(complete_graph(4)).transpose();
    CHECK((jacobian(lin, Eigen::Vector4d(1, 2, 3, 4)) + l).norm() <= 1e-12);

    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const System s(cycle_graph(3 + trial % 4),
                       CouplingAssignment::uniform(CouplingFunction::odd_polynomial({u(rng), u(rng), u(rng)})));
        Eigen::VectorXd x(s.node_count());
        for (int i = 0; i < x.size(); ++i) x(i) = u(rng);
        CHECK((jacobian(s, x) - fd_jacobian(s, x)).cwiseAbs().maxCoeff() <= 1e-5);
    }

    const System k4 = cubic_on(complete_graph(4));
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(jacobian(k4, Eigen::Vector4d(0.5, 0.5, -0.5, -0.5))).eigenvalues();
    CHECK(ev(0) == doctest::Approx(-8.0));
    CHECK(ev(1) == doctest::Approx(-2.0));
    CHECK(ev(2) == doctest::Approx(-2.0));
    CHECK(ev(3) == doctest::Approx(0.0));
}

TEST_CASE("signed split") {
    const System lin(cycle_graph(4), CouplingAssignment::uniform(CouplingFunction::linear(-2.0)));
    const SignedSplit all_minus = signed_split(lin, Eigen::VectorXd::Zero(4));
    CHECK(all_minus.plus_edges.empty());
    CHECK(all_minus.plus.matrix.norm() == 0.0);
    CHECK(all_minus.minus.component_count == 1);

    const System tree = cubic_on(path_graph(4));
    const SignedSplit one = signed_split(tree, Eigen::Vector4d(0, 1, 1, 2));
    CHECK(one.plus_edges == std::vector<int>{1});
    CHECK(one.minus_edges.size() == 2);

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const System s = cubic_on(complete_graph(5));
        Eigen::VectorXd x(5);
        for (int i = 0; i < 5; ++i) x(i) = u(rng);
        const SignedSplit sp = signed_split(s, x);
        CHECK((sp.jacobian() - jacobian(s, x)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("potential is a gradient of the field") {
    const System s = cubic_on(complete_graph(4));
    CHECK(potential(s, Eigen::VectorXd::Zero(4)) == 0.0);
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = u(rng);
        Eigen::VectorXd grad(4);
        for (int k = 0; k < 4; ++k) {
            Eigen::VectorXd p = x;
            Eigen::VectorXd m = x;
            p(k) += 1e-6;
            m(k) -= 1e-6;
            grad(k) = (potential(s, p) - potential(s, m)) / 2e-6;
        }
        CHECK((-grad - vector_field(s, x)).cwiseAbs().maxCoeff() <= 1e-6);
    }
    const System no_f(cycle_graph(3), CouplingAssignment::uniform(CouplingFunction::custom(
                                          "lin", [](double y) { return -y; }, [](double) { return -1.0; })));
    CHECK(!has_potential(no_f));
    CHECK_THROWS_AS((void)potential(no_f, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("integration: linear consensus rate") {
    const Graph g = path_graph(4);
    const System s(g, CouplingAssignment::uniform(CouplingFunction::linear(-1.0)));
    const Eigen::MatrixXd l = incidence_matrix(g) * incidence_matrix(g).transpose();
    const double lambda2 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(l).eigenvalues()(1);
    const Eigen::Vector4d x0(1.0, -0.5, 2.0, 0.1);
    const Eigen::VectorXd c0 = mean_zero(x0);
    IntegrateOptions opt;
    opt.dt = 1e-2;
    const Trajectory tr = integrate(s, x0, 5.0, opt);
    CHECK(!tr.blew_up);
    for (std::size_t k = 0; k < tr.t.size(); k += 50) {
        const Eigen::VectorXd c = mean_zero(tr.x[k]);
        CHECK(c.norm() <= c0.norm() * std::exp(-lambda2 * tr.t[k]) * (1 + 1e-3));
        CHECK(tr.x[k].mean() == doctest::Approx(x0.mean()).epsilon(1e-12));
    }
    CHECK(tr.max_potential_increase <= 1e-12);
}

TEST_CASE("integration: consensus-only coupling and the circle") {
    const System mono(complete_graph(5), CouplingAssignment::uniform(CouplingFunction::odd_polynomial({-1.0, -1.0})));
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd x0(5);
    for (int i = 0; i < 5; ++i) x0(i) = u(rng);
    IntegrateOptions opt;
    opt.dt = 1e-2;
    CHECK(mean_zero(integrate(mono, x0, 30.0, opt).final_state()).norm() <= 1e-6);

    const System c3 = cubic_on(cycle_graph(3));
    const Trajectory tr = integrate(c3, Eigen::Vector3d(0.3, -0.2, 0.05), 30.0, opt);
    CHECK(mean_zero(tr.final_state()).norm() == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-6));
    CHECK(tr.max_potential_increase <= 1e-8);
}

TEST_CASE("integration: blow-up guard") {
    const System anti(path_graph(3), CouplingAssignment::uniform(CouplingFunction::linear(1.0)));
    IntegrateOptions opt;
    opt.dt = 1e-2;
    const Trajectory tr = integrate(anti, Eigen::Vector3d(0.1, -0.3, 0.2), 50.0, opt);
    CHECK(tr.blew_up);
    CHECK(tr.t.back() < 50.0);
}
