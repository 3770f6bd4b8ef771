#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "madel/grid.hpp"

using namespace madel;

TEST_CASE("grid construction and invariants") {
    Grid1D g(0.0, 1.0, 101);
    CHECK(g.spacing() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(g.x(0) == 0.0);
    CHECK(g.x(100) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 2), invalid_grid_error);
    CHECK_THROWS_AS(Grid1D(1.0, 0.0, 11), invalid_grid_error);
}

TEST_CASE("second derivative exact for quadratics") {
    Grid1D g(0.0, 1.0, 101);
    auto f = sample_real(g, [](double x) { return x * x; });
    auto d2 = second_derivative(f);
    for (int i = 0; i < g.n_points; ++i) CHECK(std::abs(d2[i] - 2.0) < 1e-9);
}

TEST_CASE("second derivative of a constant is zero") {
    Grid1D g(-2.0, 5.0, 51);
    auto f = sample_real(g, [](double) { return 3.7; });
    auto d2 = second_derivative(f);
    for (int i = 0; i < g.n_points; ++i) CHECK(std::abs(d2[i]) < 1e-11);
}

TEST_CASE("second derivative of sin on [0, pi]") {
    Grid1D g(0.0, M_PI, 1001);
    auto f = sample_real(g, [](double x) { return std::sin(x); });
    auto d2 = second_derivative(f);
    double worst = 0.0;
    for (int i = 1; i + 1 < g.n_points; ++i)
        worst = std::max(worst, std::abs(d2[i] + std::sin(g.x(i))));
    CHECK(worst < 1e-5);
}

TEST_CASE("second derivative is linear in its argument") {
    Grid1D g(0.0, 2.0, 201);
    auto f = sample_complex(g, [](double x) { return Complex(std::sin(x), x * x); });
    auto h = sample_complex(g, [](double x) { return Complex(std::exp(-x), std::cos(2 * x)); });
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int rep = 0; rep < 5; ++rep) {
        const Complex a(U(rng), U(rng)), b(U(rng), U(rng));
        ComplexField combo(g);
        for (int i = 0; i < g.n_points; ++i) combo[i] = a * f[i] + b * h[i];
        auto lhs = second_derivative(combo);
        auto df = second_derivative(f);
        auto dh = second_derivative(h);
        double worst = 0.0;
        for (int i = 0; i < g.n_points; ++i)
            worst = std::max(worst, std::abs(lhs[i] - (a * df[i] + b * dh[i])));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("schrodinger residual: plane wave") {
    const double k = 1.3, m = 1.0, hbar = 1.0;
    const double E = hbar * hbar * k * k / (2.0 * m);
    Grid1D g(0.0, 5.0, 4001);
    auto psi = sample_complex(g, [&](double x) { return std::exp(Complex(0.0, k * x)); });
    RealField V(g);
    auto res = schrodinger_residual(psi, V, E, m, hbar);
    CHECK(max_interior(res) < 1e-6);

    SUBCASE("wrong energy gives O(1) residual") {
        auto bad = schrodinger_residual(psi, V, 1e-9, m, hbar);
        CHECK(max_interior(bad) > 0.1);
    }
}

TEST_CASE("schrodinger residual rejects mismatched grids") {
    Grid1D g1(0.0, 1.0, 11), g2(0.0, 1.0, 12);
    ComplexField psi(g1);
    psi[0] = 1.0;
    RealField V(g2);
    CHECK_THROWS_AS(schrodinger_residual(psi, V, 1.0, 1.0, 1.0), grid_mismatch_error);
}

TEST_CASE("residual drops ~4x when the grid is refined 2x") {
    const double k = 1.0, E = 0.5;
    auto residual_at = [&](int n) {
        Grid1D g(0.0, 6.0, n);
        auto psi = sample_complex(g, [&](double x) { return std::exp(Complex(0.0, k * x)); });
        RealField V(g);
        return max_interior(schrodinger_residual(psi, V, E, 1.0, 1.0));
    };
    const double r1 = residual_at(501);
    const double r2 = residual_at(1001);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
}
