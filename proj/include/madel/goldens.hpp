#pragma once

#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "madel/coulomb.hpp"
#include "madel/errors.hpp"
#include "madel/io.hpp"
#include "madel/oracle.hpp"
#include "madel/scattering.hpp"

// Golden regression corpus. Every record is regenerated by a documented
// command (`madel goldens --regenerate`) from the oracle or the closed forms;
// nothing is hand-entered. Generation is deterministic (fixed seeds, fixed
// formatting), so a healthy build reproduces the committed files byte for
// byte.

namespace madel::goldens {

// Barrier transmission sweep: E/V0 in {0.1..0.9}, a in {0.5, 1, 2, 5} at
// m = hbar = V0 = 1. T_transfer comes from the transfer-matrix oracle,
// T_closed from the closed form; both are recorded with the dual-path
// tolerance.
inline void write_barrier_corpus(std::ostream& os) {
    io::write_csv_row(os, {"case_id", "m", "hbar", "E", "V0", "a", "T_closed", "T_transfer",
                           "r_re", "r_im", "t_re", "t_im", "tolerance", "provenance"});
    int id = 0;
    for (int ie = 1; ie <= 9; ++ie) {
        for (double a : {0.5, 1.0, 2.0, 5.0}) {
            const double E = 0.1 * ie;
            auto p = ScatteringProblem::barrier(1.0, 1.0, E, 1.0, a);
            auto sol = solve_barrier(p);
            auto tm = oracle::transfer_matrix_transmission(
                oracle::PiecewisePotential::rectangular_barrier(1.0, a), E, 1.0, 1.0);
            io::write_csv_row(os, {std::to_string(id++), io::fmt(1.0), io::fmt(1.0), io::fmt(E),
                                   io::fmt(1.0), io::fmt(a), io::fmt(transmission(p)),
                                   io::fmt(tm.T), io::fmt(sol.r.real()), io::fmt(sol.r.imag()),
                                   io::fmt(sol.t.real()), io::fmt(sol.t.imag()), io::fmt(1e-10),
                                   "oracle"});
        }
    }
}

// Coulomb function sample over the validated box with the Wronskian column as
// the accuracy certificate.
inline void write_coulomb_corpus(std::ostream& os) {
    io::write_csv_row(os, {"case_id", "eta", "rho", "L", "F", "Fp", "G", "Gp",
                           "wronskian_minus_1", "tolerance", "provenance"});
    std::mt19937 rng(987654321u);
    std::uniform_real_distribution<double> Ueta(0.0, 30.0);
    std::uniform_real_distribution<double> Ulog(std::log(0.05), std::log(200.0));
    std::uniform_int_distribution<int> UL(0, 20);
    for (int id = 0; id < 50; ++id) {
        const double eta = Ueta(rng);
        const double rho = std::exp(Ulog(rng));
        const int L = UL(rng);
        auto s = coulomb_fg(eta, rho, L);
        io::write_csv_row(os, {std::to_string(id), io::fmt(eta), io::fmt(rho),
                               std::to_string(L), io::fmt(s.F), io::fmt(s.Fp), io::fmt(s.G),
                               io::fmt(s.Gp), io::fmt(s.wronskian() - 1.0), io::fmt(1e-8),
                               "closed-form"});
    }
}

// Quick oracle health gate run before any regeneration; throws on failure so
// a broken build can never overwrite the corpus.
inline void check_oracle_health() {
    auto p = ScatteringProblem::barrier(1.0, 1.0, 0.5, 1.0, 2.0);
    auto tm = oracle::transfer_matrix_transmission(
        oracle::PiecewisePotential::rectangular_barrier(1.0, 2.0), 0.5, 1.0, 1.0);
    if (std::abs(tm.T - transmission(p)) / transmission(p) > 1e-10)
        throw precision_failure_error("golden regeneration aborted: transfer-matrix mismatch",
                                      0.0);
    auto rad = oracle::radial_coulomb_integrate(0, 2.0, {1.0, 5.0, 20.0});
    for (const auto& s : rad.samples) {
        auto c = coulomb_fg(2.0, s.rho, 0);
        if (std::abs(c.F - s.F) > 1e-8 * std::abs(s.F) ||
            std::abs(c.G - s.G) > 1e-8 * std::abs(s.G))
            throw precision_failure_error("golden regeneration aborted: coulomb dual-path", 0.0);
    }
}

struct Corpus {
    std::string barrier_csv;
    std::string coulomb_csv;
};

inline Corpus generate() {
    check_oracle_health();
    Corpus c;
    std::ostringstream b, q;
    write_barrier_corpus(b);
    write_coulomb_corpus(q);
    c.barrier_csv = b.str();
    c.coulomb_csv = q.str();
    return c;
}

} // namespace madel::goldens
