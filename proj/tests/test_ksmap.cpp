#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "madel/ksmap.hpp"

using namespace madel;
using namespace madel::ks;

TEST_CASE("ks_radius") {
    CHECK(ks_radius({0, 0, 0, 0}) == 0.0);
    CHECK(ks_radius({1, 0, 0, 0}) == 1.0);
    CHECK(ks_radius({1, 1, 1, 1}) == 4.0);
}

TEST_CASE("KSConfig frequency follows from M = 4m and stiffness 2|E|") {
    KSConfig b(1.0, -0.5, 1.0, 1.0);
    CHECK(b.bound());
    CHECK(b.M() == 4.0);
    CHECK(b.omega() == doctest::Approx(0.5));
    KSConfig inv(1.0, 0.5, 1.0, 1.0);
    CHECK(!inv.bound());
    CHECK_THROWS_AS(KSConfig(0.0, -0.5, 1.0, 1.0), out_of_domain_error);
}

TEST_CASE("pseudo-energy conservation along classical trajectories") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);

    SUBCASE("bound: p^2/8m + |E| q^2 = G") {
        KSConfig cfg(1.3, -0.4, 1.1, 1.0);
        for (int rep = 0; rep < 20; ++rep) {
            Vec4 q0{0.4 * U(rng), 0.4 * U(rng), 0.4 * U(rng), 0.4 * U(rng)};
            const double pot = std::abs(cfg.E) * ks_radius(q0);
            REQUIRE(pot < cfg.strength);
            const double pmag = std::sqrt(8.0 * cfg.m * (cfg.strength - pot));
            Vec4 p0{pmag, 0, 0, 0};
            CHECK(cfg.pseudo_energy(q0, p0) == doctest::Approx(cfg.strength).epsilon(1e-12));
            for (double t : {0.3, 1.7, 4.0, 9.2}) {
                auto ph = evolve(cfg, q0, p0, t);
                CHECK(std::abs(cfg.pseudo_energy(ph.q, ph.p) - cfg.strength) < 1e-8);
            }
        }
    }

    SUBCASE("inverted: p^2/8m - E q^2 = -G") {
        KSConfig cfg(1.3, 0.4, 1.1, 1.0);
        for (int rep = 0; rep < 20; ++rep) {
            // need E q0^2 >= G for real momentum on the shell
            const double qmin = std::sqrt(cfg.strength / cfg.E);
            Vec4 q0{qmin * (1.2 + 0.5 * std::abs(U(rng))), 0, 0, 0};
            const double pmag =
                std::sqrt(8.0 * cfg.m * (cfg.E * ks_radius(q0) - cfg.strength));
            Vec4 p0{0, pmag, 0, 0};
            CHECK(cfg.pseudo_energy(q0, p0) == doctest::Approx(-cfg.strength).epsilon(1e-12));
            for (double t : {0.2, 0.9, 2.0}) {
                auto ph = evolve(cfg, q0, p0, t);
                CHECK(std::abs(cfg.pseudo_energy(ph.q, ph.p) + cfg.strength) <
                      1e-8 * std::max(1.0, std::abs(cfg.pseudo_energy(ph.q, ph.p))));
            }
        }
    }
}

TEST_CASE("two-point action structure") {
    KSConfig cfg(1.0, -0.5, 1.0, 1.0);
    const double w = cfg.omega(), M = cfg.M();

    SUBCASE("short-time divergence M |q - q0|^2 / (2 t')") {
        const Vec4 q{1.0, 0, 0, 0}, q0{0.4, 0, 0, 0};
        for (double tp : {1e-3, 1e-4, 1e-5}) {
            const Complex S = two_point_action(M, Complex(w, 0.0), ks_radius(q), ks_radius(q0),
                                               dot(q, q0), tp);
            const double free = M * (1.0 - 0.4) * (1.0 - 0.4) / (2.0 * tp);
            CHECK(S.real() == doctest::Approx(free).epsilon(1e-4));
        }
    }

    SUBCASE("q = q0 stays finite as t' -> 0+") {
        const Vec4 q{0.7, 0, 0, 0};
        const Complex S = two_point_action(M, Complex(w, 0.0), ks_radius(q), ks_radius(q),
                                           dot(q, q), 1e-7);
        CHECK(std::abs(S) < 1e-3); // -> M w^2 q^2 t'-type smallness
    }

    SUBCASE("caustic at sin(w t') = 0") {
        CHECK_THROWS_AS(
            two_point_action(M, Complex(w, 0.0), 1.0, 1.0, 0.5, M_PI / w), caustic_error);
    }

    SUBCASE("quadratic homogeneity of the endpoint dependence") {
        const double tp = 0.8;
        auto action_q = [&](double lam) {
            const Vec4 q{1.1 * lam, 0, 0, 0}, q0{0.6 * lam, 0, 0, 0};
            return two_point_action(M, Complex(w, 0.0), ks_radius(q), ks_radius(q0), dot(q, q0),
                                    tp);
        };
        const Complex base = action_q(1.0);
        CHECK(std::abs(action_q(2.0) - 4.0 * base) < 1e-12 * std::abs(base) * 4.0);
        CHECK(std::abs(action_q(3.0) - 9.0 * base) < 1e-11 * std::abs(base) * 9.0);
    }
}

TEST_CASE("bound action continues analytically to the inverted action") {
    // evaluating the trigonometric form at w -> -i Omega must reproduce the
    // hyperbolic (inverted) form; for real arguments both are real
    KSConfig inv(1.0, 0.5, 1.0, 1.0);
    const double W = inv.omega(), M = inv.M();
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> U(0.2, 1.8);
    for (int rep = 0; rep < 20; ++rep) {
        const double q2 = U(rng), q02 = U(rng), qdq = 0.3 * U(rng), tp = U(rng);
        const Complex continued = two_point_action(M, Complex(0.0, -W), q2, q02, qdq, tp);
        const double sh = std::sinh(W * tp), ch = std::cosh(W * tp);
        const double hyperbolic = 0.5 * M * W * ((q2 + q02) * ch / sh - 2.0 * qdq / sh);
        CHECK(std::abs(continued - hyperbolic) < 1e-10 * std::max(1.0, std::abs(hyperbolic)));
        CHECK(std::abs(continued.imag()) < 1e-10 * std::max(1.0, std::abs(hyperbolic)));
    }
}

TEST_CASE("oscillator_action adds the pseudo-energy term with winding") {
    KSConfig cfg(1.0, -0.5, 1.0, 1.0);
    OscillatorBranch b = make_branch(cfg, Vec4{0.5, 0, 0, 0}, 0.9, 0);
    OscillatorBranch b1 = make_branch(cfg, Vec4{0.5, 0, 0, 0}, 0.9, 1);
    const Vec4 q{1.0, 0, 0, 0};
    const Complex s0 = oscillator_action(cfg, q, b);
    const Complex s1 = oscillator_action(cfg, q, b1);
    CHECK((s1 - s0).real() ==
          doctest::Approx(cfg.strength * 2.0 * M_PI / cfg.omega()).epsilon(1e-12));
    CHECK_THROWS_AS(oscillator_action(KSConfig(1.0, 0.5, 1.0, 1.0), q,
                                      OscillatorBranch{{0.5, 0, 0, 0}, -1.0, 0, {}, {}, ""}),
                    out_of_domain_error);
}

TEST_CASE("Gaussian branch quantum potential") {
    KSConfig cfg(1.0, -0.5, 1.0, 1.0);

    SUBCASE("constant amplitude: Q = 0") {
        CHECK(std::abs(branch_quantum_potential_4d(Complex(0, 0), Complex(0, 0), 0.7, cfg)) ==
              0.0);
    }

    SUBCASE("beta = 0, q = 0: Q = +(hbar^2/2M) 2 alpha d") {
        const Complex alpha(0.8, 0.0);
        const Complex Q = branch_quantum_potential_4d(alpha, Complex(0, 0), 0.0, cfg);
        CHECK(Q.real() == doctest::Approx(1.0 / (2.0 * cfg.M()) * 2.0 * 0.8 * 4.0));
        CHECK(Q.imag() == 0.0);
    }

    SUBCASE("generic coefficients match a finite-difference 4D radial Laplacian") {
        const Complex alpha(0.6, 0.0);
        const Complex beta(0.25, 0.0);
        auto amp = [&](double u) { return std::exp(-alpha.real() * u * u + beta.real() * u); };
        const double q = 0.9, h = 1e-4;
        // on the axis, the 4D Laplacian of f(q1) e^{0 q2..} with linear term
        // along the axis: d^2/dq1^2 + (3 off-axis second derivatives) where
        // the off-axis curvature of exp(-alpha sum qi^2) at qi=0 is -2 alpha f
        const double d2_axis = (amp(q + h) - 2.0 * amp(q) + amp(q - h)) / (h * h);
        const double lap = d2_axis + 3.0 * (-2.0 * alpha.real()) * amp(q);
        const double Qfd = -1.0 / (2.0 * cfg.M()) * lap / amp(q);
        const Complex Qan = branch_quantum_potential_4d(alpha, beta, q, cfg);
        CHECK(Qan.real() == doctest::Approx(Qfd).epsilon(1e-6));
    }
}

TEST_CASE("ground-state reconstruction") {
    KSConfig cfg(1.0, -0.5, 1.0, 1.0);
    const double alpha_star = cfg.M() * cfg.omega() / (2.0 * cfg.hbar);
    InitialGaussian psi0{alpha_star, 1.0};
    const double tp = 0.4 / cfg.omega();

    SUBCASE("log|psi| is affine in r with the stationary slope") {
        auto prof = reconstruct_ground_state(cfg, psi0, {}, tp, 0.1, 10.0, 80);
        CHECK(prof.max_fit_residual < 1e-6);
        CHECK(prof.slope == doctest::Approx(prof.predicted_slope).epsilon(0.01));
        CHECK(prof.predicted_slope == doctest::Approx(-alpha_star));
    }

    SUBCASE("linear in the initial amplitude") {
        auto a = reconstruct_psi_at(cfg, psi0, tp, 1.1, {});
        auto b = reconstruct_psi_at(cfg, InitialGaussian{alpha_star, 3.5}, tp, 1.1, {});
        CHECK(std::abs(b - 3.5 * a) < 1e-12 * std::abs(b));
    }

    SUBCASE("independent of the quadrature refinement beyond the closed form") {
        QuadratureSpec gh48{QuadratureSpec::Kind::gauss_hermite, 48};
        QuadratureSpec gh64{QuadratureSpec::Kind::gauss_hermite, 64};
        for (double qr : {0.4, 1.0, 2.2}) {
            const Complex c = reconstruct_psi_at(cfg, psi0, tp, qr, {});
            const Complex g1 = reconstruct_psi_at(cfg, psi0, tp, qr, gh48);
            const Complex g2 = reconstruct_psi_at(cfg, psi0, tp, qr, gh64);
            CHECK(std::abs(g1 - c) / std::abs(c) < 1e-10);
            CHECK(std::abs(g2 - g1) / std::abs(c) < 1e-10);
        }
    }

    SUBCASE("caustic and domain errors") {
        CHECK_THROWS_AS(
            reconstruct_ground_state(cfg, psi0, {}, M_PI / cfg.omega(), 0.1, 10.0, 10),
            caustic_error);
        CHECK_THROWS_AS(
            reconstruct_ground_state(KSConfig(1.0, 0.5, 1.0, 1.0), psi0, {}, tp, 0.1, 10.0, 10),
            out_of_domain_error);
    }
}

TEST_CASE("initial state parsing") {
    auto g = parse_initial_state("gaussian:0.75");
    CHECK(g.alpha0 == doctest::Approx(0.75));
    auto g2 = parse_initial_state("gaussian:0.5:2.0");
    CHECK(g2.amplitude == doctest::Approx(2.0));
    CHECK_THROWS_AS(parse_initial_state("plane_wave:1.0"), unsupported_initial_state_error);
    CHECK_THROWS_AS(parse_initial_state("gaussian:-1.0"), unsupported_initial_state_error);
}

TEST_CASE("inverted-branch interference") {
    KSConfig cfg(1.0, 0.5, 1.0, 1.0);
    auto rep = inverted_branch_interference_check(cfg, {0.5, 1.0, 2.0}, 0.8,
                                                  InitialGaussian{0.7, 1.0});

    SUBCASE("every individual branch has strictly nonzero quantum potential") {
        for (double q : rep.branch_max_Q) CHECK(q > 0.01);
    }

    SUBCASE("the integrated field satisfies its quantum HJ equation") {
        CHECK(rep.integrated_qhj_residual < 1e-6);
        CHECK(rep.q_fd_check < 1e-6);
    }

    SUBCASE("symmetric pair gives an even field with zero phase gradient at 0") {
        CHECK(rep.symmetric_pair_phase_gradient < 1e-10);
    }

    SUBCASE("bound configurations are rejected") {
        CHECK_THROWS_AS(inverted_branch_interference_check(KSConfig(1.0, -0.5, 1.0, 1.0), {1.0},
                                                           0.8, InitialGaussian{0.7, 1.0}),
                        out_of_domain_error);
    }
}

TEST_CASE("branch coefficients are complex for the inverted oscillator") {
    KSConfig cfg(1.0, 0.5, 1.0, 1.0);
    auto b = make_branch(cfg, Vec4{1.0, 0, 0, 0}, 0.8);
    CHECK(std::abs(b.gamma.imag()) > 0.0);
    CHECK(std::abs(b.delta[0].imag()) > 0.0);
}
