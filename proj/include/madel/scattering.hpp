#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "madel/errors.hpp"
#include "madel/grid.hpp"

namespace madel {

// Sub-barrier scattering setup shared by the step and the rectangular
// barrier. Only 0 < E < V0 is supported; above-barrier scattering is out of
// scope. For the step the width is +infinity.
struct ScatteringProblem {
    double m = 1.0;
    double hbar = 1.0;
    double E = 0.5;
    double V0 = 1.0;
    double a = INFINITY; // barrier width; INFINITY selects the step geometry

    // Opacity beyond which interior coefficients overflow doubles; callers
    // should use log_transmission past this point.
    static constexpr double kappa_a_overflow = 300.0;

    ScatteringProblem(double mass, double hbar_, double energy, double v0,
                      double width = INFINITY)
        : m(mass), hbar(hbar_), E(energy), V0(v0), a(width) {
        if (!(m > 0.0) || !(hbar > 0.0))
            throw out_of_domain_error("ScatteringProblem: m and hbar must be positive");
        if (!(E > 0.0))
            throw out_of_regime_error("ScatteringProblem: requires E > 0");
        if (!(E < V0))
            throw out_of_regime_error("ScatteringProblem: sub-barrier regime requires E < V0");
        if (!(a >= 0.0))
            throw invalid_geometry_error("ScatteringProblem: barrier width must be nonnegative");
    }

    static ScatteringProblem step(double m, double hbar, double E, double V0) {
        return ScatteringProblem(m, hbar, E, V0, INFINITY);
    }
    // a = 0 is allowed here (transmission degenerates to 1); solve_barrier
    // itself needs a strictly positive width.
    static ScatteringProblem barrier(double m, double hbar, double E, double V0, double a) {
        if (!(a >= 0.0) || !std::isfinite(a))
            throw invalid_geometry_error("barrier width must be finite and nonnegative");
        return ScatteringProblem(m, hbar, E, V0, a);
    }

    bool is_step() const { return std::isinf(a); }
    double k() const { return std::sqrt(2.0 * m * E) / hbar; }
    double kappa() const { return std::sqrt(2.0 * m * (V0 - E)) / hbar; }
};

// Exact solution of the potential step:
//   psi_I  = e^{ikx} + r e^{-ikx}   (x < 0)
//   psi_II = A e^{-kappa x}         (x >= 0)
struct StepSolution {
    ScatteringProblem problem;
    Complex r; // reflection amplitude, |r| = 1
    Complex A; // interior amplitude

    double theta() const { return std::arg(A); }
    double delta() const { return std::atan2(problem.kappa(), problem.k()); }

    Complex psi(double x, double t = 0.0) const {
        const double k = problem.k(), kap = problem.kappa();
        const Complex time = time_phase(t);
        if (x < 0.0) {
            const Complex e = std::exp(Complex(0.0, k * x));
            return (e + r / e) * time;
        }
        return A * std::exp(-kap * x) * time;
    }

    Complex psi_prime(double x, double t = 0.0) const {
        const double k = problem.k(), kap = problem.kappa();
        const Complex time = time_phase(t);
        if (x < 0.0) {
            const Complex ik(0.0, k);
            const Complex e = std::exp(ik * x);
            return (ik * e - ik * r / e) * time;
        }
        return -kap * A * std::exp(-kap * x) * time;
    }

    Complex time_phase(double t) const {
        if (t == 0.0) return Complex(1.0, 0.0);
        return std::exp(Complex(0.0, -problem.E * t / problem.hbar));
    }
};

// Exact solution of the rectangular barrier:
//   psi_I   = e^{ikx} + r e^{-ikx}               (x < 0)
//   psi_II  = A e^{-kappa x} + B e^{+kappa x}    (0 <= x <= a)
//   psi_III = t e^{ikx}                          (x > a)
struct BarrierSolution {
    ScatteringProblem problem;
    Complex r;
    Complex t;
    Complex A;
    Complex B;

    double alpha() const { return std::arg(A); }
    double beta() const { return std::arg(B); }
    double T() const { return std::norm(t); }
    double R() const { return std::norm(r); }

    Complex psi(double x, double tm = 0.0) const {
        const double k = problem.k(), kap = problem.kappa(), a = problem.a;
        const Complex time = time_phase(tm);
        if (x < 0.0) {
            const Complex e = std::exp(Complex(0.0, k * x));
            return (e + r / e) * time;
        }
        if (x <= a) return (A * std::exp(-kap * x) + B * std::exp(kap * x)) * time;
        return t * std::exp(Complex(0.0, k * x)) * time;
    }

    Complex psi_prime(double x, double tm = 0.0) const {
        const double k = problem.k(), kap = problem.kappa(), a = problem.a;
        const Complex time = time_phase(tm);
        if (x < 0.0) {
            const Complex ik(0.0, k);
            const Complex e = std::exp(ik * x);
            return (ik * e - ik * r / e) * time;
        }
        if (x <= a)
            return (-kap * A * std::exp(-kap * x) + kap * B * std::exp(kap * x)) * time;
        const Complex ik(0.0, k);
        return ik * t * std::exp(ik * x) * time;
    }

    Complex time_phase(double tm) const {
        if (tm == 0.0) return Complex(1.0, 0.0);
        return std::exp(Complex(0.0, -problem.E * tm / problem.hbar));
    }
};

// Matching at x = 0 gives r = (k - i kappa)/(k + i kappa), A = 2k/(k + i kappa).
inline StepSolution solve_step(const ScatteringProblem& p) {
    if (!p.is_step())
        throw invalid_geometry_error("solve_step: problem has a finite width, use solve_barrier");
    const double k = p.k(), kap = p.kappa();
    const Complex denom(k, kap);
    return StepSolution{p, Complex(k, -kap) / denom, 2.0 * k / denom};
}

// Solves the 4x4 matching system for {A, B, r, t} by block elimination in the
// scaled unknowns (r, A, B e^{kappa a}, t). The scaling keeps every pivot
// O(max(k, kappa)), so t and B retain full relative accuracy at any opacity
// up to the overflow threshold; a general-purpose LU on the raw system would
// lose them to the e^{+kappa a} condition number.
inline BarrierSolution solve_barrier(const ScatteringProblem& p) {
    if (p.is_step())
        throw invalid_geometry_error("solve_barrier: step geometry, use solve_step");
    if (!(p.a > 0.0))
        throw invalid_geometry_error("solve_barrier: requires a > 0");
    const double k = p.k(), kap = p.kappa(), a = p.a;
    if (kap * a > ScatteringProblem::kappa_a_overflow)
        throw thick_barrier_error(
            "solve_barrier: kappa*a = " + std::to_string(kap * a) +
            " overflows interior amplitudes; use transmission/log_transmission instead");

    const Complex ik(0.0, k);
    const double e2 = std::exp(-2.0 * kap * a);

    // Interface x = a relates the scaled interior amplitudes to t:
    //   A e^{-kappa a} = (1/2)(1 - ik/kappa) t e^{ika}
    //   B e^{+kappa a} = (1/2)(1 + ik/kappa) t e^{ika}
    // Substituting into the x = 0 equations leaves a 2x2 system in (r, A):
    //   A [ (kappa - ik) - (kappa + ik)^2/(kappa - ik) e^{-2 kappa a} ] = -2ik
    const Complex u(kap, -k); // kappa - ik
    const Complex v(kap, k);  // kappa + ik
    const Complex A = -2.0 * ik * u / (u * u - v * v * e2);
    const Complex t = 2.0 * kap * std::exp(-kap * a) * std::exp(-ik * a) * A / u;
    const Complex B = (v / u) * A * e2;
    const Complex r = A + B - 1.0;
    return BarrierSolution{p, r, t, A, B};
}

// Closed-form transmission coefficient
//   T = [1 + ((k^2+kappa^2)^2 / (4 k^2 kappa^2)) sinh^2(kappa a)]^{-1},
// evaluated in the log domain for opaque barriers so it never underflows
// before kappa*a ~ 350.
inline double log_transmission(const ScatteringProblem& p) {
    if (p.is_step()) return -INFINITY;
    const double k = p.k(), kap = p.kappa(), a = p.a;
    const double s = k * k + kap * kap;
    const double C = s * s / (4.0 * k * k * kap * kap);
    const double ka = kap * a;
    if (ka < 30.0) return -std::log1p(C * std::pow(std::sinh(ka), 2));
    // log sinh(x) = x - log 2 + log1p(-e^{-2x})
    const double log_sinh = ka - M_LN2 + std::log1p(-std::exp(-2.0 * ka));
    const double log_csinh2 = std::log(C) + 2.0 * log_sinh;
    // T^{-1} = 1 + C sinh^2; here C sinh^2 >> 1
    return -log_csinh2 - std::log1p(std::exp(-log_csinh2));
}

inline double transmission(const ScatteringProblem& p) {
    if (p.is_step()) return 0.0;
    return std::exp(log_transmission(p));
}

// Thick-barrier asymptote T ~ 16 k^2 kappa^2 / (k^2 + kappa^2)^2 e^{-2 kappa a}.
inline double transmission_thick_limit(const ScatteringProblem& p) {
    const double k = p.k(), kap = p.kappa();
    const double s = k * k + kap * kap;
    return 16.0 * k * k * kap * kap / (s * s) * std::exp(-2.0 * kap * p.a);
}

template <typename Solution>
ComplexField evaluate_wavefunction(const Solution& sol, const Grid1D& grid, double t = 0.0) {
    return sample_complex(grid, [&](double x) { return sol.psi(x, t); });
}

// Probability current j = (hbar/m) Im(psi* psi') from the analytic derivative.
template <typename Solution>
double probability_current(const Solution& sol, double x) {
    const double hbar = sol.problem.hbar, m = sol.problem.m;
    return hbar / m * std::imag(std::conj(sol.psi(x)) * sol.psi_prime(x));
}

// Numerical current of a sampled field, finite-difference derivative.
inline RealField probability_current(const ComplexField& psi, double m, double hbar) {
    const ComplexField d = first_derivative(psi);
    RealField out(psi.grid);
    for (int i = 0; i < psi.grid.n_points; ++i)
        out[i] = hbar / m * std::imag(std::conj(psi[i]) * d[i]);
    return out;
}

} // namespace madel
