#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "madel/errors.hpp"
#include "madel/grid.hpp"
#include "madel/scattering.hpp"

namespace madel {

// One classical-action branch of the multi-branch ansatz
//   psi = sum_j sqrt(rho_j) e^{i phi_j / hbar}.
// phase is the spatial part of the action phi_j(x); the common -E t is kept
// in `energy` once per branch. Both the amplitude and the phase may be
// complex: the module's purpose is to diagnose classicality, not enforce it.
struct ActionBranch {
    std::string label;
    double energy = 0.0;
    std::function<Complex(double)> phase;     // phi_j(x), spatial part
    std::function<Complex(double)> amplitude; // sqrt(rho_j)(x)
};

inline ComplexField sample_phase(const ActionBranch& b, const Grid1D& g) {
    return sample_complex(g, b.phase);
}
inline ComplexField sample_amplitude(const ActionBranch& b, const Grid1D& g) {
    return sample_complex(g, b.amplitude);
}

// Pointwise sum over branches of sqrt(rho_j) e^{i phi_j / hbar}. All branches
// must share the same energy (the stationary phase -Et is common).
inline ComplexField superpose(std::span<const ActionBranch> branches, const Grid1D& grid,
                              double hbar) {
    if (branches.empty())
        throw inconsistent_branch_error("superpose: needs at least one branch");
    const double E0 = branches.front().energy;
    for (const auto& b : branches)
        if (std::abs(b.energy - E0) > 1e-12 * std::max(1.0, std::abs(E0)))
            throw inconsistent_branch_error("superpose: branches have different energies");
    ComplexField out(grid);
    for (const auto& b : branches) {
        for (int i = 0; i < grid.n_points; ++i) {
            const double x = grid.x(i);
            out[i] += b.amplitude(x) * std::exp(Complex(0.0, 1.0) * b.phase(x) / hbar);
        }
    }
    return out;
}

// Stationary classical Hamilton-Jacobi residual of one branch,
//   (d phi/dx)^2 / 2m + V - E,
// pointwise on V's grid. Zero iff the branch's action solves the classical
// HJ equation; complex phases are allowed and evaluated as written.
inline ComplexField hj_residual(const ActionBranch& b, const RealField& V, double m) {
    const ComplexField dphi = first_derivative(sample_phase(b, V.grid));
    ComplexField out(V.grid);
    for (int i = 0; i < V.grid.n_points; ++i)
        out[i] = dphi[i] * dphi[i] / (2.0 * m) + V[i] - b.energy;
    return out;
}

// Branch quantum potential Q_j = -(hbar^2/2m) (sqrt(rho_j))'' / sqrt(rho_j).
inline ComplexField branch_quantum_potential(const ActionBranch& b, const Grid1D& grid,
                                             double m, double hbar) {
    const ComplexField amp = sample_amplitude(b, grid);
    double amax = max_abs(amp);
    if (amax == 0.0)
        throw degenerate_input_error("branch_quantum_potential: amplitude vanishes");
    for (const auto& z : amp.values)
        if (std::abs(z) < 1e-14 * amax)
            throw degenerate_input_error(
                "branch_quantum_potential: amplitude has zeros on the grid");
    const ComplexField d2 = second_derivative(amp);
    ComplexField out(grid);
    for (int i = 0; i < grid.n_points; ++i)
        out[i] = -hbar * hbar / (2.0 * m) * d2[i] / amp[i];
    return out;
}

struct HarmonicityReport {
    bool harmonic = false;
    double max_residual = 0.0; // max |(sqrt rho)''|
    double scale = 0.0;        // max |sqrt rho| / span^2
};

// A branch carries zero quantum potential iff its amplitude is harmonic
// (in 1D: affine). True iff max |(sqrt rho)''| < tol * max|sqrt rho| / span^2.
inline HarmonicityReport harmonicity_check(const ActionBranch& b, const Grid1D& grid,
                                           double tol = 1e-8) {
    const ComplexField amp = sample_amplitude(b, grid);
    const ComplexField d2 = second_derivative(amp);
    HarmonicityReport rep;
    const double span = grid.x_max - grid.x_min;
    rep.scale = max_abs(amp) / (span * span);
    rep.max_residual = max_abs(d2);
    rep.harmonic = rep.max_residual < tol * rep.scale;
    return rep;
}

// The obstruction to superposing HJ solutions: d(phi1)/dx * d(phi2)/dx / m,
// pointwise. Plain complex product, no conjugation; this is the convention
// under which hj_residual(phi1 + phi2) - hj_residual(phi1) - hj_residual(phi2)
// + (V - E) equals the cross term identically, also for imaginary actions.
inline ComplexField nonlinearity_cross_term(const ActionBranch& b1, const ActionBranch& b2,
                                            double m, const Grid1D& grid) {
    const ComplexField d1 = first_derivative(sample_phase(b1, grid));
    const ComplexField d2 = first_derivative(sample_phase(b2, grid));
    ComplexField out(grid);
    for (int i = 0; i < grid.n_points; ++i) out[i] = d1[i] * d2[i] / m;
    return out;
}

// A branch is "classical-real" when Im phi = 0, Im sqrt(rho) = 0 and
// sqrt(rho) >= 0 on the whole interval (1e-12 relative tolerance).
inline bool is_classical_real(const ActionBranch& b, const Grid1D& grid, double tol = 1e-12) {
    const ComplexField ph = sample_phase(b, grid);
    const ComplexField amp = sample_amplitude(b, grid);
    const double pscale = std::max(max_abs(ph), 1.0);
    const double ascale = std::max(max_abs(amp), 1.0);
    for (int i = 0; i < grid.n_points; ++i) {
        if (std::abs(ph[i].imag()) > tol * pscale) return false;
        if (std::abs(amp[i].imag()) > tol * ascale) return false;
        if (amp[i].real() < -tol * ascale) return false;
    }
    return true;
}

// ---- branch sets used by the step and barrier analyses -------------------

inline ActionBranch plane_wave_branch(const std::string& label, double amplitude_abs,
                                      double momentum, double extra_phase, double E,
                                      double hbar) {
    ActionBranch b;
    b.label = label;
    b.energy = E;
    b.phase = [momentum, extra_phase, hbar](double x) {
        return Complex(momentum * x + hbar * extra_phase, 0.0);
    };
    b.amplitude = [amplitude_abs](double) { return Complex(amplitude_abs, 0.0); };
    return b;
}

// Evanescent branch with imaginary action phi = i s hbar kappa x and a
// complex constant amplitude, as used inside barriers.
inline ActionBranch evanescent_branch(const std::string& label, Complex amplitude, double kappa,
                                      int sign, double E, double hbar) {
    ActionBranch b;
    b.label = label;
    b.energy = E;
    b.phase = [kappa, sign, hbar](double x) { return Complex(0.0, sign * hbar * kappa * x); };
    b.amplitude = [amplitude](double) { return amplitude; };
    return b;
}

// Region I of the step: two real branches, incident and reflected, with unit
// densities (|r| = 1).
inline std::vector<ActionBranch> step_region1_branches(const StepSolution& sol) {
    const double k = sol.problem.k(), hbar = sol.problem.hbar, E = sol.problem.E;
    return {plane_wave_branch("incident", 1.0, hbar * k, 0.0, E, hbar),
            plane_wave_branch("reflected", std::abs(sol.r), -hbar * k, std::arg(sol.r), E, hbar)};
}

// Region II of the step: the surviving decaying branch. The growing partner
// is discarded by normalizability, so its amplitude is exactly zero here.
inline std::vector<ActionBranch> step_region2_branches(const StepSolution& sol) {
    const double kap = sol.problem.kappa(), hbar = sol.problem.hbar, E = sol.problem.E;
    ActionBranch decay = evanescent_branch("decaying", Complex(std::abs(sol.A), 0.0), kap, +1,
                                           E, hbar);
    // fold the constant phase of A into the action so the branch reproduces psi_II
    const double theta = sol.theta();
    decay.phase = [kap, hbar, theta](double x) {
        return Complex(hbar * theta, hbar * kap * x);
    };
    return {decay};
}

inline std::vector<ActionBranch> barrier_region1_branches(const BarrierSolution& sol) {
    const double k = sol.problem.k(), hbar = sol.problem.hbar, E = sol.problem.E;
    return {plane_wave_branch("incident", 1.0, hbar * k, 0.0, E, hbar),
            plane_wave_branch("reflected", std::abs(sol.r), -hbar * k, std::arg(sol.r), E, hbar)};
}

// Region II of the barrier: the complex-density pair
// sqrt(rho_+) = A with phi_+ = +i hbar kappa x (decaying) and
// sqrt(rho_-) = B with phi_- = -i hbar kappa x (growing).
inline std::vector<ActionBranch> barrier_region2_branches(const BarrierSolution& sol) {
    const double kap = sol.problem.kappa(), hbar = sol.problem.hbar, E = sol.problem.E;
    return {evanescent_branch("decaying", sol.A, kap, +1, E, hbar),
            evanescent_branch("growing", sol.B, kap, -1, E, hbar)};
}

inline std::vector<ActionBranch> barrier_region3_branches(const BarrierSolution& sol) {
    const double k = sol.problem.k(), hbar = sol.problem.hbar, E = sol.problem.E;
    return {plane_wave_branch("transmitted", std::abs(sol.t), hbar * k, std::arg(sol.t), E,
                              hbar)};
}

// Per-branch diagnostics row for reporting.
struct BranchDiagnostics {
    std::string label;
    bool classical_real = false;
    double max_abs_Q = 0.0;
    double max_abs_hj_residual = 0.0;
};

inline BranchDiagnostics diagnose_branch(const ActionBranch& b, const Grid1D& grid,
                                         const RealField& V, double m, double hbar) {
    BranchDiagnostics d;
    d.label = b.label;
    d.classical_real = is_classical_real(b, grid);
    d.max_abs_Q = max_abs(branch_quantum_potential(b, grid, m, hbar));
    d.max_abs_hj_residual = max_abs(hj_residual(b, V, m));
    return d;
}

} // namespace madel
