#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "madel/errors.hpp"
#include "madel/grid.hpp"
#include "madel/units.hpp"

namespace madel {

// ---------------------------------------------------------------------------
// Bloch-sphere loops, Berry holonomy and solid angle
// ---------------------------------------------------------------------------

// Closed discretized circuit on the Bloch sphere, (theta_i, phi_i) with the
// last sample repeating the first.
struct LoopPath {
    std::vector<double> theta;
    std::vector<double> phi;

    int n_points() const { return static_cast<int>(theta.size()); }

    void validate() const {
        if (theta.size() != phi.size() || n_points() < 4)
            throw loop_closure_error("LoopPath: needs >= 4 samples with matching arrays");
        if (std::abs(theta.front() - theta.back()) > 1e-12 ||
            std::abs(std::remainder(phi.front() - phi.back(), 2.0 * M_PI)) > 1e-12)
            throw loop_closure_error("LoopPath: loop is not closed");
    }

    static LoopPath latitude(double theta0, int n) {
        LoopPath lp;
        lp.theta.resize(n);
        lp.phi.resize(n);
        for (int i = 0; i < n; ++i) {
            lp.theta[i] = theta0;
            lp.phi[i] = 2.0 * M_PI * i / (n - 1.0);
        }
        lp.phi.back() = 2.0 * M_PI; // exact closure
        return lp;
    }

    // positively oriented octant: (x) -> (y) -> (z) -> (x) along great circles
    static LoopPath octant(int per_edge) {
        LoopPath lp;
        auto push = [&](double th, double ph) {
            lp.theta.push_back(th);
            lp.phi.push_back(ph);
        };
        for (int i = 0; i < per_edge; ++i) push(M_PI_2, M_PI_2 * i / per_edge); // equator x->y
        for (int i = 0; i < per_edge; ++i) push(M_PI_2 * (1.0 - static_cast<double>(i) / per_edge),
                                                M_PI_2); // meridian y->z
        for (int i = 0; i < per_edge; ++i) push(M_PI_2 * i / per_edge, 0.0);    // meridian z->x
        push(M_PI_2, 0.0);
        return lp;
    }

    std::array<double, 3> unit_vector(int i) const {
        return {std::sin(theta[i]) * std::cos(phi[i]), std::sin(theta[i]) * std::sin(phi[i]),
                std::cos(theta[i])};
    }
};

using SpinState = std::array<Complex, 2>;

// +1 eigenstate of n.sigma in the fixed gauge (cos th/2, e^{i phi} sin th/2).
inline SpinState spin_half_state(double theta, double phi) {
    return {Complex(std::cos(0.5 * theta), 0.0),
            std::exp(Complex(0.0, phi)) * std::sin(0.5 * theta)};
}

// -1 eigenstate, orthogonal gauge partner.
inline SpinState spin_half_state_minus(double theta, double phi) {
    return {Complex(std::sin(0.5 * theta), 0.0),
            -std::exp(Complex(0.0, phi)) * std::cos(0.5 * theta)};
}

inline Complex spin_overlap(const SpinState& a, const SpinState& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

enum class Band { plus, minus };

// Discrete Wilson-loop holonomy
//   gamma = -arg prod_i <n(R_i) | n(R_{i+1})>,
// reported in (-pi, pi]. The product runs over the unique points with cyclic
// wraparound, so per-point gauge phases cancel identically; converges to
// -+ Omega/2 for the two bands as the sampling refines. An optional gauge
// function multiplies each sample state by e^{i chi(i)} (for invariance
// tests).
inline double berry_phase_discrete(const LoopPath& loop, Band band,
                                   const std::function<double(int)>& gauge = nullptr) {
    loop.validate();
    const int n_unique = loop.n_points() - 1;
    std::vector<SpinState> states(static_cast<size_t>(n_unique));
    for (int i = 0; i < n_unique; ++i) {
        states[static_cast<size_t>(i)] = band == Band::plus
                                             ? spin_half_state(loop.theta[i], loop.phi[i])
                                             : spin_half_state_minus(loop.theta[i], loop.phi[i]);
        if (gauge) {
            const Complex ph = std::exp(Complex(0.0, gauge(i)));
            states[static_cast<size_t>(i)][0] *= ph;
            states[static_cast<size_t>(i)][1] *= ph;
        }
    }
    Complex prod(1.0, 0.0);
    double arg_acc = 0.0;
    for (int i = 0; i < n_unique; ++i) {
        prod *= spin_overlap(states[static_cast<size_t>(i)],
                             states[static_cast<size_t>((i + 1) % n_unique)]);
        if (std::abs(prod) < 1e-200) { // renormalize long products
            arg_acc += std::arg(prod);
            prod = 1.0;
        }
    }
    return std::remainder(-(std::arg(prod) + arg_acc), 2.0 * M_PI);
}

// Signed solid angle of the closed geodesic polygon through the samples, by
// the Gauss-Bonnet turning-angle sum Omega = 2 pi - sum_i tau_i. Positive for
// counterclockwise circulation viewed from outside the sphere; exact pi/2 for
// the octant, 2 pi (1 - cos theta) for latitude loops as n grows.
inline double solid_angle(const LoopPath& loop) {
    loop.validate();
    using V3 = std::array<double, 3>;
    auto cross = [](const V3& a, const V3& b) {
        return V3{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                  a[0] * b[1] - a[1] * b[0]};
    };
    auto dot3 = [](const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
    auto sub = [](const V3& a, const V3& b) { return V3{a[0] - b[0], a[1] - b[1], a[2] - b[2]}; };
    auto scale = [](const V3& a, double s) { return V3{a[0] * s, a[1] * s, a[2] * s}; };
    auto normalize = [&](const V3& a) {
        const double n = std::sqrt(dot3(a, a));
        return V3{a[0] / n, a[1] / n, a[2] / n};
    };

    // unique vertices, consecutive duplicates dropped
    std::vector<V3> v;
    for (int i = 0; i + 1 < loop.n_points(); ++i) {
        const V3 u = loop.unit_vector(i);
        if (!v.empty() && dot3(sub(u, v.back()), sub(u, v.back())) < 1e-28) continue;
        v.push_back(u);
    }
    if (v.size() >= 2 &&
        dot3(sub(v.front(), v.back()), sub(v.front(), v.back())) < 1e-28)
        v.pop_back();
    const int n = static_cast<int>(v.size());
    if (n < 3) return 0.0; // degenerate circuit sweeps nothing

    for (int i = 0; i < n; ++i)
        if (dot3(v[static_cast<size_t>(i)], v[static_cast<size_t>((i + 1) % n)]) < -1.0 + 1e-12)
            throw geodesic_error("solid_angle: consecutive antipodal samples");

    double turning = 0.0;
    for (int i = 0; i < n; ++i) {
        const V3& prev = v[static_cast<size_t>((i + n - 1) % n)];
        const V3& cur = v[static_cast<size_t>(i)];
        const V3& next = v[static_cast<size_t>((i + 1) % n)];
        // arrival and departure tangents at cur
        const V3 t_in = normalize(sub(scale(cur, dot3(prev, cur)), prev));
        const V3 t_out = normalize(sub(next, scale(cur, dot3(cur, next))));
        turning += std::atan2(dot3(cur, cross(t_in, t_out)), dot3(t_in, t_out));
    }
    // Gauss-Bonnet yields the area enclosed to the left of traversal; wrap
    // mod 4pi into (-2pi, 2pi] so reversing a simple loop flips the sign.
    double omega = 2.0 * M_PI - turning;
    while (omega > 2.0 * M_PI) omega -= 4.0 * M_PI;
    while (omega <= -2.0 * M_PI) omega += 4.0 * M_PI;
    return omega;
}

// ---------------------------------------------------------------------------
// superconductors: flux quantization, Josephson junction, dc SQUID
// ---------------------------------------------------------------------------

// Bulk ring state with integer winding of the order-parameter phase.
struct RingState {
    int n_winding = 0;
    double flux(const UnitSystem& u = UnitSystem::natural()) const {
        return n_winding * u.flux_quantum();
    }
};

inline double winding_to_flux(int n, const UnitSystem& u = UnitSystem::natural()) {
    return n * u.flux_quantum();
}

// Tunnel junction between two superconducting electrodes, modeled by a
// rectangular insulating barrier of thickness d with interior amplitudes a, b
// and gauge-invariant phase difference delta.
struct JunctionSpec {
    double Mstar = 2.0;  // Cooper-pair mass (2 m_e convention)
    double U0 = 1.0;     // barrier height
    double E = 0.5;      // pair energy
    double d = 1.0;      // barrier thickness
    double a_amp = 1.0;  // left interior amplitude
    double b_amp = 1.0;  // right interior amplitude
    double delta = 0.0;  // gauge-invariant phase difference theta_R - theta_L
    double hbar = 1.0;

    JunctionSpec() = default;
    JunctionSpec(double mstar, double u0, double e, double dd, double a, double b, double del,
                 double hb = 1.0)
        : Mstar(mstar), U0(u0), E(e), d(dd), a_amp(a), b_amp(b), delta(del), hbar(hb) {
        if (!(E < U0))
            throw out_of_regime_error("JunctionSpec: insulating barrier requires E < U0");
        if (!(Mstar > 0.0) || !(d > 0.0) || a_amp < 0.0 || b_amp < 0.0)
            throw out_of_domain_error("JunctionSpec: bad geometry or amplitudes");
    }

    double kappa() const { return std::sqrt(2.0 * Mstar * (U0 - E)) / hbar; }
    double j_c() const {
        return 2.0 * hbar * kappa() / Mstar * a_amp * b_amp * std::exp(-kappa() * d);
    }

    // modeled interior pair field Psi(x) = a e^{-kx} e^{i thL} + b e^{-k(d-x)} e^{i thR}
    Complex psi(double x, double theta_L = 0.0) const {
        const double k = kappa();
        return a_amp * std::exp(-k * x) * std::exp(Complex(0.0, theta_L)) +
               b_amp * std::exp(-k * (d - x)) * std::exp(Complex(0.0, theta_L + delta));
    }
    Complex psi_prime(double x, double theta_L = 0.0) const {
        const double k = kappa();
        return -k * a_amp * std::exp(-k * x) * std::exp(Complex(0.0, theta_L)) +
               k * b_amp * std::exp(-k * (d - x)) * std::exp(Complex(0.0, theta_L + delta));
    }
};

// Closed form j = j_c sin(delta), j_c = (2 hbar kappa / M*) a b e^{-kappa d}.
inline double josephson_current(const JunctionSpec& j) { return j.j_c() * std::sin(j.delta); }

// Same current from the definition j = (hbar / M*) Im(Psi* dPsi/dx) applied to
// the modeled interior field; x-independent, evaluated at x.
inline double josephson_current_from_field(const JunctionSpec& j, double x) {
    if (x < 0.0 || x > j.d)
        throw out_of_domain_error("josephson_current_from_field: x outside the barrier");
    return j.hbar / j.Mstar * std::imag(std::conj(j.psi(x)) * j.psi_prime(x));
}

// dc SQUID with two identical junctions and negligible loop inductance:
// I_c(Phi) = 2 I_c |cos(pi Phi / Phi_0)|.
inline double squid_critical_current(double Ic_single, double Phi,
                                     const UnitSystem& u = UnitSystem::natural()) {
    if (!(Ic_single > 0.0)) throw out_of_domain_error("squid: Ic must be positive");
    return 2.0 * Ic_single * std::abs(std::cos(M_PI * Phi / u.flux_quantum()));
}

// Cross-check by direct maximization of I = Ic sin(d1) + Ic sin(d1 + chi)
// over the common phase, chi = 2 pi Phi / Phi_0: coarse scan plus golden
// section refinement.
inline double squid_critical_current_maximized(double Ic_single, double Phi,
                                               const UnitSystem& u = UnitSystem::natural()) {
    if (!(Ic_single > 0.0)) throw out_of_domain_error("squid: Ic must be positive");
    const double chi = 2.0 * M_PI * Phi / u.flux_quantum();
    auto I = [&](double d1) { return Ic_single * (std::sin(d1) + std::sin(d1 + chi)); };
    const int n_scan = 4096;
    double best_x = 0.0, best = -INFINITY;
    for (int i = 0; i < n_scan; ++i) {
        const double x = 2.0 * M_PI * i / n_scan;
        const double val = I(x);
        if (val > best) {
            best = val;
            best_x = x;
        }
    }
    double lo = best_x - 2.0 * M_PI / n_scan, hi = best_x + 2.0 * M_PI / n_scan;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = I(x1), f2 = I(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = I(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = I(x1);
        }
    }
    return std::max(f1, f2);
}

// ---------------------------------------------------------------------------
// what kind of phase constraint produces flux quantization
// ---------------------------------------------------------------------------

enum class PhaseConstraint {
    single_valued_action,      // classical phi single-valued on the ring
    unconstrained_multivalued, // phi arbitrary multivalued
    single_valued_phase_factor // e^{i phi / hbar} single-valued (quantum)
};

struct FluxConstraintReport {
    PhaseConstraint constraint;
    bool flux_must_vanish = false; // only Phi = 0 allowed
    bool flux_continuous = false;  // any Phi allowed
    bool flux_quantized = false;   // Phi in {n Phi_0}
    double allowed_flux_unit = 0.0; // quantum of allowed flux (0 when continuous/vanishing)
};

// The trichotomy behind flux quantization: a single-valued classical action
// forces Phi = 0; an arbitrarily multivalued one leaves Phi continuous; only
// single-valuedness of the phase factor (Delta phi = n h) quantizes Phi in
// units of h/(2e).
inline FluxConstraintReport classical_flux_obstruction(
    PhaseConstraint c, const UnitSystem& u = UnitSystem::natural()) {
    FluxConstraintReport rep;
    rep.constraint = c;
    switch (c) {
    case PhaseConstraint::single_valued_action: rep.flux_must_vanish = true; break;
    case PhaseConstraint::unconstrained_multivalued: rep.flux_continuous = true; break;
    case PhaseConstraint::single_valued_phase_factor:
        rep.flux_quantized = true;
        rep.allowed_flux_unit = u.flux_quantum();
        break;
    }
    return rep;
}

} // namespace madel
