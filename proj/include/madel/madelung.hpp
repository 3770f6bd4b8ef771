#pragma once

#include <cmath>
#include <vector>

#include "madel/errors.hpp"
#include "madel/grid.hpp"
#include "madel/scattering.hpp"

namespace madel {

// Polar decomposition psi = sqrt(rho) e^{iS/hbar} sampled on a grid, together
// with the Bohmian velocity v = dS/dx / m and the quantum potential
// Q = -(hbar^2/2m) (sqrt(rho))'' / sqrt(rho).
//
// S is unwrapped by accumulating principal-value phase increments along the
// grid; it is well defined only between density nodes. Points with
// rho < node_threshold * max(rho) are flagged in node_mask, where v and Q are
// reported as zero and must not be trusted.
struct MadelungField {
    Grid1D grid;
    std::vector<double> rho;
    std::vector<double> S;
    std::vector<double> v;
    std::vector<double> Q;
    std::vector<char> node_mask;
    double m = 1.0;
    double hbar = 1.0;
};

inline MadelungField decompose(const ComplexField& psi, double m, double hbar,
                               double node_threshold = 1e-12) {
    const int n = psi.grid.n_points;
    double amax = 0.0;
    for (const auto& z : psi.values) amax = std::max(amax, std::abs(z));
    if (amax == 0.0) throw degenerate_input_error("decompose: field is identically zero");

    MadelungField f;
    f.grid = psi.grid;
    f.m = m;
    f.hbar = hbar;
    f.rho.resize(n);
    f.S.resize(n);
    f.node_mask.resize(n);

    RealField sqrt_rho(psi.grid);
    for (int i = 0; i < n; ++i) {
        f.rho[i] = std::norm(psi[i]);
        sqrt_rho[i] = std::abs(psi[i]);
        f.node_mask[i] = f.rho[i] < node_threshold * amax * amax ? 1 : 0;
    }

    // Unwrap: accumulate phase increments wrapped to [-pi, pi].
    f.S[0] = hbar * std::arg(psi[0]);
    double prev = std::arg(psi[0]);
    for (int i = 1; i < n; ++i) {
        const double cur = std::arg(psi[i]);
        f.S[i] = f.S[i - 1] + hbar * std::remainder(cur - prev, 2.0 * M_PI);
        prev = cur;
    }

    RealField S_field(psi.grid, f.S);
    const RealField dS = first_derivative(S_field);
    const RealField d2s = second_derivative(sqrt_rho);
    f.v.resize(n);
    f.Q.resize(n);
    for (int i = 0; i < n; ++i) {
        if (f.node_mask[i]) {
            f.v[i] = 0.0;
            f.Q[i] = 0.0;
            continue;
        }
        f.v[i] = dS[i] / m;
        f.Q[i] = -hbar * hbar / (2.0 * m) * d2s[i] / sqrt_rho[i];
    }
    return f;
}

// Inverse of decompose up to a global phase: sqrt(rho) e^{iS/hbar}.
inline ComplexField recompose(const MadelungField& f) {
    ComplexField psi(f.grid);
    for (int i = 0; i < f.grid.n_points; ++i)
        psi[i] = std::sqrt(f.rho[i]) * std::exp(Complex(0.0, f.S[i] / f.hbar));
    return psi;
}

// Closed-form quantum potential inside the rectangular barrier,
//   Q_II(x) = -(hbar^2/2m) (1 / 2 rho^2) [ 4 kappa^2 (|A|^2 e^{-2kx} + |B|^2 e^{+2kx}) rho
//                                          - 2 kappa^2 (|A|^2 e^{-2kx} - |B|^2 e^{+2kx})^2 ],
// with rho(x) = |A|^2 e^{-2kx} + |B|^2 e^{+2kx} + 2|A||B| cos(alpha - beta).
// Reduces to the step value -(V0 - E) as B -> 0.
inline double barrier_quantum_potential(const BarrierSolution& sol, double x) {
    const ScatteringProblem& p = sol.problem;
    if (x < 0.0 || x > p.a)
        throw out_of_domain_error("barrier_quantum_potential: x outside [0, a]");
    const double kap = p.kappa();
    const double pa = std::norm(sol.A) * std::exp(-2.0 * kap * x);
    const double pb = std::norm(sol.B) * std::exp(2.0 * kap * x);
    const double cross = 2.0 * std::abs(sol.A) * std::abs(sol.B) *
                         std::cos(sol.alpha() - sol.beta());
    const double rho = pa + pb + cross;
    const double num = 4.0 * kap * kap * (pa + pb) * rho - 2.0 * kap * kap * (pa - pb) * (pa - pb);
    return -p.hbar * p.hbar / (2.0 * p.m) * num / (2.0 * rho * rho);
}

// Stationary continuity residual d/dx (rho v); vanishes for exact stationary
// states off nodes.
inline RealField continuity_residual(const MadelungField& f) {
    RealField flux(f.grid);
    for (int i = 0; i < f.grid.n_points; ++i) flux[i] = f.rho[i] * f.v[i];
    return first_derivative(flux);
}

// Stationary quantum Hamilton-Jacobi residual (dS/dx)^2/2m + V + Q - E,
// pointwise; zero for exact stationary states off nodes.
inline RealField quantum_hj_residual(const MadelungField& f, const RealField& V, double E) {
    if (!(f.grid == V.grid))
        throw grid_mismatch_error("quantum_hj_residual: fields on different grids");
    RealField out(f.grid);
    for (int i = 0; i < f.grid.n_points; ++i) {
        if (f.node_mask[i]) {
            out[i] = 0.0;
            continue;
        }
        out[i] = 0.5 * f.m * f.v[i] * f.v[i] + V[i] + f.Q[i] - E;
    }
    return out;
}

} // namespace madel
