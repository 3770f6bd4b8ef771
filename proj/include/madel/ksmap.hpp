#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "madel/errors.hpp"
#include "madel/grid.hpp"

// Kustaanheimo-Stiefel picture of the Coulomb problem: r = q^T q maps the
// bound problem (E < 0) onto a 4D harmonic oscillator with pseudo-energy
//   p_q^2 / 8m + |E| q^2 = G,       G = Z e^2,
// and the repulsive problem (E > 0) onto a 4D inverted oscillator with
//   p_q^2 / 8m - E q^2 = -G.
// Only the radial relation r = q^2 is used; the full spinor fibration is not
// needed for any of the quantities computed here.

namespace madel::ks {

using madel::Complex;
using Vec4 = std::array<double, 4>;

inline double dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// r = q^T q = |q|^2.
inline double ks_radius(const Vec4& q) { return dot(q, q); }

struct KSConfig {
    double strength = 1.0; // G: Z e^2 (bound) or Z1 Z2 e^2 (repulsive)
    double E = -0.5;       // physical energy; sign selects bound vs inverted
    double m = 1.0;
    double hbar = 1.0;
    static constexpr int dim = 4;

    KSConfig(double G, double energy, double mass, double hbar_)
        : strength(G), E(energy), m(mass), hbar(hbar_) {
        if (!(strength > 0.0) || !(m > 0.0) || !(hbar > 0.0) || E == 0.0)
            throw out_of_domain_error("KSConfig: requires G, m, hbar > 0 and E != 0");
    }

    bool bound() const { return E < 0.0; }
    double M() const { return 4.0 * m; } // oscillator mass
    // oscillator frequency, from M = 4m and stiffness 2|E|
    double omega() const { return std::sqrt(std::abs(E) / (2.0 * m)); }

    // pseudo-energy p^2/8m +- |E| q^2 along a trajectory; equals G (bound)
    // or -G (inverted) on shell
    double pseudo_energy(const Vec4& q, const Vec4& p) const {
        const double kin = dot(p, p) / (8.0 * m);
        return bound() ? kin + std::abs(E) * dot(q, q) : kin - E * dot(q, q);
    }
};

// ---------------------------------------------------------------------------
// two-point oscillator action
// ---------------------------------------------------------------------------

// Hamilton principal function of the 4D oscillator between (q0, 0) and
// (q, t') with complex-capable frequency w:
//   S = (M w / 2) [ (q^2 + q0^2) cot(w t') - 2 q.q0 / sin(w t') ].
// Evaluating at imaginary w continues to the inverted oscillator
// (cot -> coth, sin -> sinh).
inline Complex two_point_action(double M, Complex w, double q2, double q02, double qdq0,
                                double tprime) {
    const Complex wt = w * tprime;
    const Complex s = std::sin(wt);
    if (std::abs(s) < 1e-12)
        throw caustic_error("two_point_action: sin(w t') = 0 (caustic)");
    const Complex c = std::cos(wt);
    return 0.5 * M * w * ((q2 + q02) * c / s - 2.0 * qdq0 / s);
}

// One oscillator branch: initial point q0, pseudo-time t', winding number k
// entering t'' = t' + 2 pi k / omega, and the Gaussian coefficients of the
// branch amplitude exp(-gamma q^2 + delta . q) read off the integrand.
struct OscillatorBranch {
    Vec4 q0{};
    double tprime = 1.0;
    int winding = 0;
    Complex gamma;
    std::array<Complex, 4> delta{};
    std::string label;
};

// Action of a branch at endpoint q: the oscillator two-point action plus the
// pseudo-energy term G t''. For the bound case w = omega (trigonometric); for
// the inverted case the continuation w -> -i omega turns the prefactor-odd
// pair cot/sin hyperbolic and the value stays real for real arguments.
inline Complex oscillator_action(const KSConfig& cfg, const Vec4& q, const OscillatorBranch& b) {
    if (!cfg.bound() && !(b.tprime > 0.0))
        throw out_of_domain_error("oscillator_action: inverted case needs t' > 0");
    const double w = cfg.omega();
    const Complex weff = cfg.bound() ? Complex(w, 0.0) : Complex(0.0, -w);
    const Complex S = two_point_action(cfg.M(), weff, ks_radius(q), ks_radius(b.q0),
                                       dot(q, b.q0), b.tprime);
    const double tpp = b.tprime + 2.0 * M_PI * b.winding / w;
    return S + cfg.strength * tpp;
}

// Branch Gaussian coefficients from the propagator integrand
// exp[(i/hbar) S(q, q0, t')], viewed as exp(-gamma q^2 + delta . q):
//   bound:    gamma = -(i/hbar)(M w/2) cot(w t'),  delta = -(i/hbar) M w q0 / sin(w t')
//   inverted: gamma = -(i/hbar)(M w/2) coth(w t'), delta = -(i/hbar) M w q0 / sinh(w t')
inline OscillatorBranch make_branch(const KSConfig& cfg, const Vec4& q0, double tprime,
                                    int winding = 0) {
    OscillatorBranch b;
    b.q0 = q0;
    b.tprime = tprime;
    b.winding = winding;
    const double w = cfg.omega(), M = cfg.M(), hbar = cfg.hbar;
    const Complex i_over_hbar(0.0, 1.0 / hbar);
    if (cfg.bound()) {
        const double s = std::sin(w * tprime);
        if (std::abs(s) < 1e-12) throw caustic_error("make_branch: caustic at sin(w t') = 0");
        b.gamma = -i_over_hbar * 0.5 * M * w * (std::cos(w * tprime) / s);
        for (int i = 0; i < 4; ++i) b.delta[i] = -i_over_hbar * M * w * q0[i] / s;
        b.label = "bound";
    } else {
        if (!(tprime > 0.0))
            throw out_of_domain_error("make_branch: inverted case needs t' > 0");
        const double sh = std::sinh(w * tprime);
        b.gamma = -i_over_hbar * 0.5 * M * w * (std::cosh(w * tprime) / sh);
        for (int i = 0; i < 4; ++i) b.delta[i] = -i_over_hbar * M * w * q0[i] / sh;
        b.label = "inverted";
    }
    return b;
}

// Quantum potential of a Gaussian branch amplitude exp(-alpha q^2 + beta . q)
// in d dimensions (d = 4 here):
//   Q = -(hbar^2 / 2M) [ sum_i (-2 alpha q_i + beta_i)^2 - 2 alpha d ].
inline Complex branch_quantum_potential_4d(Complex alpha, const std::array<Complex, 4>& beta,
                                           const Vec4& q, const KSConfig& cfg) {
    Complex grad2(0.0, 0.0);
    for (int i = 0; i < 4; ++i) {
        const Complex g = -2.0 * alpha * q[i] + beta[i];
        grad2 += g * g;
    }
    const double d = KSConfig::dim;
    return -cfg.hbar * cfg.hbar / (2.0 * cfg.M()) * (grad2 - 2.0 * alpha * d);
}

// scalar convenience for amplitude exp(-alpha u^2 + beta u) along one axis
inline Complex branch_quantum_potential_4d(Complex alpha, Complex beta, double u,
                                           const KSConfig& cfg) {
    return branch_quantum_potential_4d(alpha, {beta, 0.0, 0.0, 0.0}, Vec4{u, 0.0, 0.0, 0.0},
                                       cfg);
}

// ---------------------------------------------------------------------------
// classical trajectories (for the energy-identity checks)
// ---------------------------------------------------------------------------

struct PhasePoint {
    Vec4 q{};
    Vec4 p{};
};

inline PhasePoint evolve(const KSConfig& cfg, const Vec4& q0, const Vec4& p0, double tprime) {
    const double w = cfg.omega(), M = cfg.M();
    PhasePoint out;
    if (cfg.bound()) {
        const double c = std::cos(w * tprime), s = std::sin(w * tprime);
        for (int i = 0; i < 4; ++i) {
            out.q[i] = q0[i] * c + p0[i] / (M * w) * s;
            out.p[i] = p0[i] * c - M * w * q0[i] * s;
        }
    } else {
        const double c = std::cosh(w * tprime), s = std::sinh(w * tprime);
        for (int i = 0; i < 4; ++i) {
            out.q[i] = q0[i] * c + p0[i] / (M * w) * s;
            out.p[i] = p0[i] * c + M * w * q0[i] * s;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian evolution and the ground-state reconstruction
// ---------------------------------------------------------------------------

struct InitialGaussian {
    double alpha0 = 0.5; // psi0(q0) = amplitude * exp(-alpha0 q0^2)
    double amplitude = 1.0;
};

// "gaussian:<alpha0>[:<amplitude>]"; anything else is unsupported.
inline InitialGaussian parse_initial_state(const std::string& spec) {
    if (spec.rfind("gaussian:", 0) != 0)
        throw unsupported_initial_state_error("initial state must be gaussian:<alpha0>");
    InitialGaussian g;
    const std::string rest = spec.substr(9);
    const auto colon = rest.find(':');
    g.alpha0 = std::stod(rest.substr(0, colon));
    if (colon != std::string::npos) g.amplitude = std::stod(rest.substr(colon + 1));
    if (!(g.alpha0 > 0.0))
        throw unsupported_initial_state_error("gaussian width must be positive");
    return g;
}

struct QuadratureSpec {
    enum class Kind { closed_form, gauss_hermite };
    Kind kind = Kind::closed_form;
    int nodes = 48;
};

// Integrated Gaussian parameters of psi(q, t') = int K(q,t'|q0) psi0(q0) d^4 q0
// = N(t') exp(-c(t') q^2). The q0 integral factorizes per dimension with
//   a = alpha0 - (i/hbar)(M w / 2) ct(w t'),   b_i = -(i/hbar) M w q_i / sn(w t'),
// where (ct, sn) = (cot, sin) bound / (coth, sinh) inverted, giving
//   c = -(i/hbar)(M w / 2) ct + (M w / (hbar sn))^2 / (4a),
//   N = amplitude * (M w / (2 pi i hbar sn))^{d/2} (pi / a)^{d/2}.
struct GaussianEvolution {
    Complex a;
    Complex c;
    Complex N;
};

inline GaussianEvolution evolve_gaussian(const KSConfig& cfg, const InitialGaussian& psi0,
                                         double tprime) {
    const double w = cfg.omega(), M = cfg.M(), hbar = cfg.hbar;
    Complex ct, sn;
    if (cfg.bound()) {
        sn = std::sin(w * tprime);
        if (std::abs(sn) < 1e-12) throw caustic_error("evolve_gaussian: caustic");
        ct = std::cos(w * tprime) / sn;
    } else {
        if (!(tprime > 0.0)) throw out_of_domain_error("evolve_gaussian: needs t' > 0");
        sn = std::sinh(w * tprime);
        ct = std::cosh(w * tprime) / sn;
    }
    const Complex i_over_hbar(0.0, 1.0 / hbar);
    GaussianEvolution ev;
    ev.a = psi0.alpha0 - i_over_hbar * 0.5 * M * w * ct;
    const Complex mw_over_hsn = M * w / (hbar * sn);
    ev.c = -i_over_hbar * 0.5 * M * w * ct + mw_over_hsn * mw_over_hsn / (4.0 * ev.a);
    // d = 4: the half-integer powers are plain squares
    const Complex pref = M * w / (2.0 * M_PI * Complex(0.0, hbar) * sn);
    const Complex gauss = M_PI / ev.a;
    ev.N = psi0.amplitude * (pref * pref) * (gauss * gauss);
    return ev;
}

// One complex-width Gaussian integral per dimension via reweighted
// Gauss-Hermite, for validating the closed form. Nodes/weights are built by
// Newton iteration on the Hermite recurrence.
namespace detail {

inline void gauss_hermite_nodes(int n, std::vector<double>& x, std::vector<double>& wgt) {
    x.assign(static_cast<size_t>(n), 0.0);
    wgt.assign(static_cast<size_t>(n), 0.0);
    const double pim4 = 0.7511255444649425; // pi^{-1/4}
    double z = 0.0;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(n, 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[static_cast<size_t>(i) - 2];
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[static_cast<size_t>(i)] = z;
        x[static_cast<size_t>(n) - 1 - i] = -z;
        wgt[static_cast<size_t>(i)] = 2.0 / (pp * pp);
        wgt[static_cast<size_t>(n) - 1 - i] = wgt[static_cast<size_t>(i)];
    }
}

// int exp(-a u^2 + b u) du, Re(a) > 0, by Gauss-Hermite on the steepest
// descent contour u = x / sqrt(a): (1/sqrt(a)) int e^{-x^2} e^{b x / sqrt(a)} dx.
inline Complex gaussian_integral_gh(Complex a, Complex b, int nodes) {
    std::vector<double> x, wgt;
    gauss_hermite_nodes(nodes, x, wgt);
    const Complex s = std::sqrt(a);
    Complex sum(0.0, 0.0);
    for (size_t i = 0; i < x.size(); ++i) sum += wgt[i] * std::exp(b * x[i] / s);
    return sum / s;
}

} // namespace detail

// psi(q, t') along a radial ray evaluated through the q0 integral, by the
// requested quadrature path.
inline Complex reconstruct_psi_at(const KSConfig& cfg, const InitialGaussian& psi0,
                                  double tprime, double q_radial, const QuadratureSpec& quad) {
    const GaussianEvolution ev = evolve_gaussian(cfg, psi0, tprime);
    if (quad.kind == QuadratureSpec::Kind::closed_form)
        return ev.N * std::exp(-ev.c * q_radial * q_radial);
    // numerical route: per-dimension integrals with the same a, b coefficients
    const double w = cfg.omega(), M = cfg.M(), hbar = cfg.hbar;
    const Complex sn = cfg.bound() ? Complex(std::sin(w * tprime), 0.0)
                                   : Complex(std::sinh(w * tprime), 0.0);
    if (std::abs(sn) < 1e-12) throw caustic_error("reconstruct_psi_at: caustic");
    const Complex i_over_hbar(0.0, 1.0 / hbar);
    const Complex ct = cfg.bound() ? std::cos(w * tprime) / sn : std::cosh(w * tprime) / sn;
    const Complex a = psi0.alpha0 - i_over_hbar * 0.5 * M * w * ct;
    const Complex b1 = -i_over_hbar * M * w * q_radial / sn;
    const Complex pref = M * w / (2.0 * M_PI * Complex(0.0, hbar) * sn);
    const Complex on_axis = detail::gaussian_integral_gh(a, b1, quad.nodes);
    const Complex off_axis = detail::gaussian_integral_gh(a, Complex(0.0, 0.0), quad.nodes);
    // the q^2 part of the action stays outside the q0 integral
    const Complex quadratic = std::exp(i_over_hbar * 0.5 * M * w * ct * q_radial * q_radial);
    return psi0.amplitude * (pref * pref) * quadratic * on_axis * off_axis * off_axis *
           off_axis;
}

struct GroundStateProfile {
    std::vector<double> r;
    std::vector<double> log_abs_psi;
    double slope = 0.0;
    double intercept = 0.0;
    double max_fit_residual = 0.0;
    double predicted_slope = 0.0; // -(M omega)/(2 hbar), the stationary width
};

// Bound-state reconstruction: evolve the centered Gaussian through the branch
// integral, map back via r = q^2 and fit log|psi| against r. For the
// stationary width alpha0 = M omega / (2 hbar) the profile is exactly
// exponential, reproducing the hydrogen 1s falloff.
inline GroundStateProfile reconstruct_ground_state(const KSConfig& cfg,
                                                   const InitialGaussian& psi0,
                                                   const QuadratureSpec& quad, double tprime,
                                                   double r_min, double r_max, int n_samples) {
    if (!cfg.bound())
        throw out_of_domain_error("reconstruct_ground_state: requires a bound configuration");
    if (!(r_min > 0.0) || !(r_max > r_min) || n_samples < 3)
        throw out_of_domain_error("reconstruct_ground_state: bad radial sampling");
    GroundStateProfile prof;
    prof.predicted_slope = -cfg.M() * cfg.omega() / (2.0 * cfg.hbar);
    prof.r.resize(n_samples);
    prof.log_abs_psi.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double r = r_min + (r_max - r_min) * i / (n_samples - 1.0);
        const Complex psi = reconstruct_psi_at(cfg, psi0, tprime, std::sqrt(r), quad);
        prof.r[i] = r;
        prof.log_abs_psi[i] = std::log(std::abs(psi));
    }
    // least-squares affine fit
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        sx += prof.r[i];
        sy += prof.log_abs_psi[i];
        sxx += prof.r[i] * prof.r[i];
        sxy += prof.r[i] * prof.log_abs_psi[i];
    }
    const double n = n_samples;
    prof.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    prof.intercept = (sy - prof.slope * sx) / n;
    for (int i = 0; i < n_samples; ++i)
        prof.max_fit_residual = std::max(
            prof.max_fit_residual,
            std::abs(prof.log_abs_psi[i] - (prof.slope * prof.r[i] + prof.intercept)));
    return prof;
}

// ---------------------------------------------------------------------------
// inverted-branch interference diagnostics
// ---------------------------------------------------------------------------

struct InterferenceReport {
    std::vector<double> branch_max_Q; // per sampled branch, max_q |Q_j|
    double min_branch_max_Q = 0.0;
    double integrated_qhj_residual = 0.0; // max over q of the time-dependent QHJ residual
    double q_fd_check = 0.0;              // analytic vs finite-difference Q of the integrated field
    double symmetric_pair_phase_gradient = 0.0; // |d arg/dq| at q = 0 for a +-q0 pair
};

// Samples individual inverted-oscillator branches (their Gaussian amplitudes
// carry strictly nonzero Q_j) and checks that the integrated field still
// satisfies its own quantum Hamilton-Jacobi equation:
//   dS/dt' + (dS/dq)^2 / 2M - E q^2 + Q = 0,
// with dS/dt' taken by central differences of the evolved field (no reuse of
// the evolution equation).
inline InterferenceReport inverted_branch_interference_check(
    const KSConfig& cfg, const std::vector<double>& q0_values, double tprime,
    const InitialGaussian& psi0, int n_q = 41, double q_max = 2.0) {
    if (cfg.bound())
        throw out_of_domain_error("inverted_branch_interference_check: requires E > 0");
    InterferenceReport rep;

    // individual branches
    for (double q0v : q0_values) {
        const OscillatorBranch b = make_branch(cfg, Vec4{q0v, 0.0, 0.0, 0.0}, tprime);
        double mx = 0.0;
        for (int i = 0; i < n_q; ++i) {
            const double u = -q_max + 2.0 * q_max * i / (n_q - 1.0);
            mx = std::max(mx, std::abs(branch_quantum_potential_4d(b.gamma, b.delta,
                                                                   Vec4{u, 0, 0, 0}, cfg)));
        }
        rep.branch_max_Q.push_back(mx);
    }
    rep.min_branch_max_Q = *std::min_element(rep.branch_max_Q.begin(), rep.branch_max_Q.end());

    // integrated field: psi = N exp(-c q^2)
    const double hbar = cfg.hbar, M = cfg.M();
    const GaussianEvolution ev = evolve_gaussian(cfg, psi0, tprime);
    const double dt = 1e-6 * tprime;
    const GaussianEvolution evp = evolve_gaussian(cfg, psi0, tprime + dt);
    const GaussianEvolution evm = evolve_gaussian(cfg, psi0, tprime - dt);
    // branch-safe phase rate of the prefactor
    const double darg_N = std::remainder(std::arg(evp.N) - std::arg(evm.N), 2.0 * M_PI) /
                          (2.0 * dt);
    const double dIm_c = (evp.c.imag() - evm.c.imag()) / (2.0 * dt);

    double worst = 0.0;
    for (int i = 0; i < n_q; ++i) {
        const double q = -q_max + 2.0 * q_max * i / (n_q - 1.0);
        // S = hbar (arg N - Im(c) q^2)
        const double dS_dt = hbar * (darg_N - dIm_c * q * q);
        const double dS_dq = hbar * (-2.0 * ev.c.imag() * q);
        const double kin = dS_dq * dS_dq / (2.0 * M);
        const double V = -cfg.E * q * q; // inverted oscillator potential -E q^2
        const double reC = ev.c.real();
        const double Q = -hbar * hbar / (2.0 * M) *
                         (4.0 * reC * reC * q * q - 2.0 * reC * KSConfig::dim);
        worst = std::max(worst, std::abs(dS_dt + kin + V + Q));
    }
    rep.integrated_qhj_residual = worst;

    // finite-difference cross-check of the integrated field's Q on the axis,
    // with the 4D radial Laplacian u'' + (3/q) u'
    {
        const double q = 0.7 * q_max, h = 1e-4;
        auto sqrt_rho = [&](double u) { return std::exp(-ev.c.real() * u * u); };
        const double upp = (sqrt_rho(q + h) - 2.0 * sqrt_rho(q) + sqrt_rho(q - h)) / (h * h);
        const double up = (sqrt_rho(q + h) - sqrt_rho(q - h)) / (2.0 * h);
        const double Qfd = -hbar * hbar / (2.0 * M) * (upp + 3.0 / q * up) / sqrt_rho(q);
        const double reC = ev.c.real();
        const double Qan = -hbar * hbar / (2.0 * M) *
                           (4.0 * reC * reC * q * q - 2.0 * reC * KSConfig::dim);
        rep.q_fd_check = std::abs(Qfd - Qan);
    }

    // symmetric pair q0 <-> -q0: superposed branch field is even, so the
    // phase gradient at the origin vanishes
    {
        const double q0v = q0_values.empty() ? 1.0 : q0_values.front();
        const OscillatorBranch bp = make_branch(cfg, Vec4{q0v, 0, 0, 0}, tprime);
        const OscillatorBranch bm = make_branch(cfg, Vec4{-q0v, 0, 0, 0}, tprime);
        auto g = [&](double u) {
            return std::exp(-bp.gamma * u * u + bp.delta[0] * u) +
                   std::exp(-bm.gamma * u * u + bm.delta[0] * u);
        };
        const double h = 1e-5;
        rep.symmetric_pair_phase_gradient =
            std::abs(std::arg(g(h)) - std::arg(g(-h))) / (2.0 * h);
    }
    return rep;
}

} // namespace madel::ks
