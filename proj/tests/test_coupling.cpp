#include <doctest.h>

#include "conlab/coupling.hpp"
#include "conlab/dynamics.hpp"
#include "conlab/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace conlab;

namespace {

// Plain grid sign scan with bisection, independent of roots().
std::vector<double> grid_oracle(const CouplingFunction& f, double bound, int cells) {
    std::vector<double> out;
    double a = -bound;
    for (int i = 1; i <= cells; ++i) {
        const double b = -bound + 2.0 * bound * i / cells;
        double fa = f(a);
        const double fb = f(b);
        if (fa == 0.0) out.push_back(a);
        else if (fa * fb < 0.0) {
            double lo = a;
            double hi = b;
            for (int k = 0; k < 200; ++k) {
                const double mid = 0.5 * (lo + hi);
                if (f(lo) * f(mid) <= 0.0) hi = mid;
                else lo = mid;
            }
            out.push_back(0.5 * (lo + hi));
        }
        a = b;
    }
    return out;
}

}  // namespace

TEST_CASE("evaluation") {
    const auto cubic = CouplingFunction::cubic();
    CHECK(cubic(1.0) == 0.0);
    CHECK(cubic(0.0) == 0.0);
    CHECK(CouplingFunction::sine(1.0)(0.0) == 0.0);
    CHECK(CouplingFunction::sine(1.0)(std::numbers::pi / 2) == doctest::Approx(-1.0));
    CHECK(CouplingFunction::linear(-1.0)(0.0) == 0.0);
}

TEST_CASE("derivatives") {
    const auto cubic = CouplingFunction::cubic();
    CHECK(cubic.derivative(0.0) == 1.0);
    CHECK(cubic.derivative(1.0) == -2.0);
    CHECK(cubic.derivative(-1.0) == -2.0);
    CHECK(CouplingFunction::linear(-1.0).derivative(3.7) == -1.0);

    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    std::uniform_real_distribution<double> y(-1.5, 1.5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = trial % 5 == 0 ? CouplingFunction::sine(c(rng))
                                      : CouplingFunction::odd_polynomial({c(rng), c(rng), c(rng)});
        const double at = y(rng);
        const double h = 1e-5;
        CHECK(f.derivative(at) == doctest::Approx((f(at + h) - f(at - h)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("antiderivatives") {
    const auto cubic = CouplingFunction::cubic();
    for (double y : {-1.3, 0.0, 0.4, 2.0}) CHECK(cubic.antiderivative(y) == doctest::Approx(y * y / 2 - y * y * y * y / 4));
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto f = trial % 3 == 0 ? CouplingFunction::sine(c(rng)) : CouplingFunction::odd_polynomial({c(rng), c(rng)});
        const double y = c(rng);
        CHECK(f.antiderivative(-y) == doctest::Approx(f.antiderivative(y)));
        const double h = 1e-5;
        CHECK((f.antiderivative(y + h) - f.antiderivative(y - h)) / (2 * h) == doctest::Approx(f(y)).epsilon(1e-6));
    }
}

TEST_CASE("custom couplings are validated") {
    auto f = CouplingFunction::custom(
        "tanh", [](double y) { return -std::tanh(y); }, [](double y) { return -1.0 / (std::cosh(y) * std::cosh(y)); },
        [](double y) { return -std::log(std::cosh(y)); });
    CHECK(f.kind() == CouplingKind::Custom);
    CHECK(f.has_antiderivative());
    CHECK_THROWS_AS(CouplingFunction::custom("even", [](double y) { return y * y; }, [](double y) { return 2 * y; }), Error);
    CHECK_THROWS_AS(CouplingFunction::custom("bad", [](double y) { return y; }, [](double) { return 3.0; }), Error);
    auto no_anti = CouplingFunction::custom("lin", [](double y) { return -y; }, [](double) { return -1.0; });
    CHECK_THROWS_AS((void)no_anti.antiderivative(1.0), Error);
}

TEST_CASE("roots") {
    const auto r = roots(CouplingFunction::cubic(), 2.0);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(-1.0));
    CHECK(r[1] == 0.0);
    CHECK(r[2] == doctest::Approx(1.0));
    CHECK(roots(CouplingFunction::linear(-1.0), 10.0) == std::vector<double>{0.0});

    // (y^2 - 1)(y^2 - 4) y = y^5 - 5 y^3 + 4 y
    const auto quintic = CouplingFunction::odd_polynomial({4.0, -5.0, 1.0});
    const auto q = roots(quintic, 10.0);
    const auto oracle = grid_oracle(quintic, 10.0, 20001);
    REQUIRE(q.size() == 5);
    REQUIRE(oracle.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(q[i] == doctest::Approx(oracle[i]).epsilon(1e-9));

    const auto sine = roots(CouplingFunction::sine(1.0), 7.0);
    CHECK(sine.size() == 5);
    CHECK(sine.back() == doctest::Approx(2 * std::numbers::pi));

    // y^3 touches zero only at 0; y (y^2 - 1)^2 has tangent roots at +-1.
    const auto tangent = CouplingFunction::odd_polynomial({1.0, -2.0, 1.0});
    CHECK(roots(tangent, 3.0).size() == 3);
    CHECK(is_degenerate_root(tangent, 1.0));
    CHECK(!degenerate_root_warnings(tangent, roots(tangent, 3.0)).empty());
    CHECK(degenerate_root_warnings(CouplingFunction::cubic(), roots(CouplingFunction::cubic(), 3.0)).empty());
}

TEST_CASE("shifted roots") {
    const auto cubic = CouplingFunction::cubic();
    CHECK(roots_shifted(cubic, 0.0, 5.0).size() == 3);
    const auto small = roots_shifted(cubic, 0.2, 5.0);
    REQUIRE(small.size() == 3);
    CHECK(small[0] + small[1] + small[2] == doctest::Approx(0.0).epsilon(1e-12));
    // Local max of y - y^3 is 2/(3 sqrt 3) at y = 1/sqrt 3.
    CHECK(roots_shifted(cubic, 0.5, 5.0).size() == 1);
}

TEST_CASE("additive-open root sets") {
    CHECK(is_additive_open(std::vector<double>{1.0}));
    CHECK(!is_additive_open(std::vector<double>{1.0, 2.0}));
    CHECK(is_additive_open(std::vector<double>{1.0, 2.5}));
    CHECK(positive_roots(std::vector<double>{-1.0, 0.0, 1.0}) == std::vector<double>{1.0});
}

TEST_CASE("boundedness") {
    auto sys = [](CouplingFunction f) { return System(cycle_graph(3), CouplingAssignment::uniform(std::move(f))); };
    CHECK(boundedness_certificate(sys(CouplingFunction::cubic())) == Boundedness::NegativeTail);
    CHECK(boundedness_certificate(sys(CouplingFunction::linear(1.0))) == Boundedness::Unknown);
    CHECK(boundedness_certificate(sys(CouplingFunction::sine(1.0))) == Boundedness::Unknown);
}

TEST_CASE("identically zero coupling has no isolated roots") {
    CHECK_THROWS_AS((void)roots(CouplingFunction::linear(0.0), 1.0), Error);
}
