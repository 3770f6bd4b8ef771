#pragma once

#include <cmath>
#include <string>

#include "madel/errors.hpp"

namespace madel {

// Unit system for the dimensional constants that enter the formulas.
// Everything in the library is written against these symbols, so switching
// the preset rescales all inputs/outputs consistently.
//
//   natural : hbar = 1, e^2 = 1, |e| = 1 (default; masses/energies O(1))
//   mev_fm  : energies in MeV, lengths in fm, masses as m*c^2 in MeV.
//             hbar stands for hbar*c = 197.327 MeV fm, e^2 = 1.44 MeV fm.
//   si      : SI values, mainly useful for the superconductivity formulas.
struct UnitSystem {
    std::string name = "natural";
    double hbar = 1.0;          // hbar (or hbar*c in the mev_fm preset)
    double e_squared = 1.0;     // Coulomb coupling e^2 in V = Z1 Z2 e^2 / r
    double e_charge = 1.0;      // elementary charge, for flux quanta
    double electron_mass = 1.0; // convenience for junction presets

    double planck_h() const { return 2.0 * M_PI * hbar; }
    // Superconducting flux quantum h / (2e).
    double flux_quantum() const { return planck_h() / (2.0 * e_charge); }

    static UnitSystem natural() { return UnitSystem{}; }

    static UnitSystem mev_fm() {
        UnitSystem u;
        u.name = "mev_fm";
        u.hbar = 197.327;      // MeV fm
        u.e_squared = 1.44;    // MeV fm
        u.e_charge = 1.0;
        u.electron_mass = 0.510998950; // MeV
        return u;
    }

    static UnitSystem si() {
        UnitSystem u;
        u.name = "si";
        u.hbar = 1.054571817e-34;        // J s
        u.e_charge = 1.602176634e-19;    // C
        u.e_squared = 2.307077552e-28;   // J m  (e^2 / (4 pi eps0))
        u.electron_mass = 9.1093837015e-31; // kg
        return u;
    }

    static UnitSystem from_name(const std::string& name) {
        if (name == "natural") return natural();
        if (name == "mev_fm") return mev_fm();
        if (name == "si") return si();
        throw out_of_domain_error("unknown unit system: " + name);
    }
};

} // namespace madel
