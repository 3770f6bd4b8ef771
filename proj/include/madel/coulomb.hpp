#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "madel/errors.hpp"
#include "madel/grid.hpp"
#include "madel/madelung.hpp"

namespace madel {

// Parameters of the reduced radial Coulomb problem
//   [ d^2/drho^2 + 1 - 2 eta / rho - L(L+1)/rho^2 ] u_L(rho) = 0,
// with rho = k r, k = sqrt(2 m E)/hbar and Sommerfeld parameter
// eta = Z1 Z2 e^2 sqrt(m / 2E) / hbar (>= 0: repulsive only).
struct CoulombParams {
    double m = 1.0;    // mass (or reduced mass for two-body channels)
    double hbar = 1.0;
    double E = 0.5;
    double strength = 0.0; // Z1 Z2 e^2
    int L = 0;

    CoulombParams(double mass, double hbar_, double energy, double z1z2e2, int ell)
        : m(mass), hbar(hbar_), E(energy), strength(z1z2e2), L(ell) {
        if (!(m > 0.0) || !(hbar > 0.0)) throw out_of_domain_error("CoulombParams: m, hbar > 0");
        if (!(E > 0.0)) throw out_of_domain_error("CoulombParams: requires E > 0");
        if (L < 0) throw out_of_domain_error("CoulombParams: requires L >= 0");
        if (strength < 0.0)
            throw out_of_domain_error("CoulombParams: attractive (eta < 0) is unsupported");
    }

    // Natural-unit setup with a prescribed Sommerfeld parameter.
    static CoulombParams from_eta(double eta, int L, double m = 1.0, double hbar = 1.0,
                                  double E = 0.5) {
        CoulombParams p(m, hbar, E, 0.0, L);
        p.strength = eta * hbar * hbar * p.k() / m;
        return p;
    }

    double k() const { return std::sqrt(2.0 * m * E) / hbar; }
    double eta() const { return strength * m / (hbar * hbar * k()); }
    double rho(double r) const { return k() * r; }
    double v_eff(double r) const {
        return strength / r + hbar * hbar * L * (L + 1.0) / (2.0 * m * r * r);
    }
};

struct CoulombSolution {
    double F = 0.0, Fp = 0.0; // regular function and d/drho derivative
    double G = 0.0, Gp = 0.0; // irregular function and derivative

    Complex Hplus() const { return Complex(G, F); }
    Complex Hminus() const { return Complex(G, -F); }
    Complex Hplus_prime() const { return Complex(Gp, Fp); }
    Complex Hminus_prime() const { return Complex(Gp, -Fp); }
    double wronskian() const { return Fp * G - F * Gp; }
};

namespace coulomb_detail {

constexpr double kTiny = 1e-30;
constexpr int kMaxIter = 1000000;

// Recurrence coefficients shared by the lambda sweeps:
//   R_l = sqrt(1 + (eta/l)^2),  S_l = l/rho + eta/l.
inline double coeff_R(double l, double eta) { return std::sqrt(1.0 + (eta / l) * (eta / l)); }
inline double coeff_S(double l, double eta, double rho) { return l / rho + eta / l; }

struct Cf1Result {
    double f = 0.0;    // F'_L / F_L
    double sign = 1.0; // sign of F_L
    int iterations = 0;
};

// Steed's continued fraction for F'/F:
//   f = S_{L+1} - R^2_{L+1} / (S_{L+1} + S_{L+2} - R^2_{L+2} / (...)),
// evaluated by the forward Lentz-Thompson scheme; negative partial
// denominators flip the sign of F.
inline Cf1Result cf1(double lambda, double eta, double x) {
    const double x_inv = 1.0 / x;
    double pk = lambda + 1.0;
    double F = eta / pk + pk * x_inv;
    if (std::abs(F) < kTiny) F = kTiny;
    double C = F, D = 0.0;
    double sign = 1.0;
    int k = 0;
    for (; k < kMaxIter; ++k) {
        const double pk1 = pk + 1.0;
        const double ek = eta / pk;
        const double rk2 = 1.0 + ek * ek;
        const double tk = (pk + pk1) * (x_inv + eta / (pk * pk1));
        D = tk - rk2 * D;
        C = tk - rk2 / C;
        if (std::abs(C) < kTiny) C = kTiny;
        if (std::abs(D) < kTiny) D = kTiny;
        D = 1.0 / D;
        const double delta = D * C;
        F *= delta;
        if (D < 0.0) sign = -sign;
        pk = pk1;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    if (k >= kMaxIter)
        throw precision_failure_error("coulomb cf1 did not converge", 0.0);
    return {F, sign, k};
}

struct Cf2Result {
    double p = 0.0, q = 0.0; // (G' + iF')/(G + iF) = p + i q
    int iterations = 0;
};

// Steed's second continued fraction, the logarithmic derivative of H+:
//   p + iq = i(1 - eta/x) + (i/x) (i eta - L)(i eta + L + 1) / (2(x - eta + i) + ...)
// Converges for x at or beyond the turning point.
inline Cf2Result cf2(double lambda, double eta, double x) {
    const Complex a0(-lambda, eta);     // i eta - lambda
    const Complex b0(lambda + 1.0, eta); // i eta + lambda + 1
    Complex f(kTiny, 0.0), C(kTiny, 0.0), D(0.0, 0.0);
    int n = 1;
    for (; n < kMaxIter; ++n) {
        const Complex an = (a0 + static_cast<double>(n - 1)) * (b0 + static_cast<double>(n - 1));
        const Complex bn = 2.0 * Complex(x - eta, static_cast<double>(n));
        D = bn + an * D;
        C = bn + an / C;
        if (std::abs(C) < kTiny) C = kTiny;
        if (std::abs(D) < kTiny) D = kTiny;
        D = 1.0 / D;
        const Complex delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    if (n >= kMaxIter)
        throw precision_failure_error("coulomb cf2 did not converge", 0.0);
    const Complex pq = Complex(0.0, 1.0) * (1.0 - eta / x) + Complex(0.0, 1.0) / x * f;
    // q = (F'G - FG')/(F^2 + G^2) > 0 identically; a nonpositive value means
    // the fraction lost it
    if (!(pq.imag() > 0.0))
        throw precision_failure_error("coulomb cf2 lost positivity", 0.0);
    return {pq.real(), pq.imag(), n};
}

// Smallest rho at which CF2 is used directly for this (eta, lambda).
inline double cf2_safe_rho(double eta, double lambda) {
    const double turn = eta + std::sqrt(eta * eta + lambda * (lambda + 1.0));
    return std::max(1.02 * turn + 10.0, 20.0);
}

// One Taylor-continuation step for u'' = (2 eta / rho + L(L+1)/rho^2 - 1) u.
// The ODE has polynomial coefficients after multiplying by rho^2, giving an
// exact recurrence for the local Taylor coefficients around rho0:
//   rho0^2 (k+2)(k+1) c_{k+2} = (2 eta rho0 + L(L+1) - rho0^2 - k(k-1)) c_k
//       + (2 eta - 2 rho0) c_{k-1} - c_{k-2} - 2 rho0 (k+1) k c_{k+1}.
// Returns false if the step s was too ambitious for the term budget.
inline bool taylor_step(int L, double eta, double rho0, double u, double up, double s,
                        double& u_out, double& up_out) {
    constexpr int K = 40;
    double c[K + 1];
    c[0] = u;
    c[1] = up;
    const double r2 = rho0 * rho0;
    const double base = 2.0 * eta * rho0 + L * (L + 1.0) - r2;
    for (int k = 0; k + 2 <= K; ++k) {
        double rhs = (base - k * (k - 1.0)) * c[k] - 2.0 * rho0 * (k + 1.0) * k * c[k + 1];
        if (k >= 1) rhs += (2.0 * eta - 2.0 * rho0) * c[k - 1];
        if (k >= 2) rhs -= c[k - 2];
        c[k + 2] = rhs / (r2 * (k + 2.0) * (k + 1.0));
    }
    double sum = c[K], dsum = K * c[K];
    for (int k = K - 1; k >= 0; --k) {
        sum = sum * s + c[k];
        if (k >= 1) dsum = dsum * s + k * c[k];
    }
    // scale against the pair so zeros of u alone do not reject the step
    const double scale = std::abs(sum) + std::abs(s * dsum);
    const double tail = std::max(std::abs(c[K]) * std::pow(std::abs(s), K),
                                 std::abs(c[K - 1]) * std::pow(std::abs(s), K - 1));
    if (!(tail <= 1e-15 * scale + 1e-280)) return false;
    u_out = sum;
    up_out = dsum;
    return true;
}

// Analytic continuation of (u, u') from x to target by repeated Taylor steps;
// stable when marching in u's growing direction.
inline void taylor_march(int L, double eta, double& x, double& u, double& up, double target) {
    int guard = 0;
    while (x != target) {
        if (++guard > 100000)
            throw precision_failure_error("coulomb taylor march stalled", 0.0);
        const double dir = target > x ? 1.0 : -1.0;
        double s = dir * std::min({0.5 * x, 5.0, std::abs(target - x)});
        double u1, up1;
        while (!taylor_step(L, eta, x, u, up, s, u1, up1)) {
            s *= 0.5;
            if (std::abs(s) < 1e-14 * x)
                throw precision_failure_error("coulomb taylor step underflow", 0.0);
        }
        x += s;
        if (dir * (target - x) < 0.0 || std::abs(x - target) < 1e-15 * std::abs(target))
            x = target;
        u = u1;
        up = up1;
        if (std::abs(u) > 1e290)
            throw precision_failure_error("coulomb G overflow during continuation", 0.0);
    }
}

// Full Steed evaluation (CF1 + CF2 + Wronskian) at a point where CF2
// converges; lambda is usually 0 here.
inline CoulombSolution steed_at(double lambda, double eta, double x) {
    const Cf1Result c1 = cf1(lambda, eta, x);
    const Cf2Result c2 = cf2(lambda, eta, x);
    const double fp = c1.f - c2.p;
    CoulombSolution s;
    s.F = c1.sign * std::sqrt(c2.q / (fp * fp + c2.q * c2.q));
    s.Fp = c1.f * s.F;
    s.G = s.F * fp / c2.q;
    s.Gp = c2.p * s.G - c2.q * s.F;
    return s;
}

} // namespace coulomb_detail

// Regular and irregular Coulomb wave functions F_L, G_L and their derivatives
// with respect to rho.
//
// Algorithm: CF1 (Steed) gives F'/F at the evaluation point for the requested
// L, and the stable downward lambda recurrence carries the ratio to L = 0.
// Where CF2 converges (at or beyond the turning point) the normalization
// follows from the two continued fractions plus the Wronskian. Inside the
// turning point, (G, G') are anchored by CF1+CF2 at a safe radius and carried
// inward by Taylor-series continuation of the ODE (G's growing direction);
// F then follows from the Wronskian, F = 1/(f G - G'), which has no
// cancellation since f and -G'/G have the same sign in the forbidden region.
// The upward lambda recurrence finally raises (G, G') to the requested L.
//
// Validated for eta in [0, 30], rho in (0, 200], L <= 20 (>= 10 significant
// digits against direct ODE integration); outside the box the continued
// fractions may fail to converge, which surfaces as precision_failure_error.
inline CoulombSolution coulomb_fg(double eta, double rho, int L) {
    using namespace coulomb_detail;
    if (!(rho > 0.0)) throw out_of_domain_error("coulomb_fg: requires rho > 0");
    if (L < 0) throw out_of_domain_error("coulomb_fg: requires L >= 0");
    if (!std::isfinite(eta) || eta < 0.0)
        throw out_of_domain_error("coulomb_fg: requires finite eta >= 0");

    // CF1 at the target point and L, then downward to lambda = 0 with an
    // arbitrary seed; rescale on the way to dodge overflow.
    const Cf1Result c1_target = cf1(L, eta, rho);
    double Ft = 1e-30 * c1_target.sign;
    double Ftp = c1_target.f * Ft;
    double F0u = Ft, F0up = Ftp; // unnormalized values at lambda = 0
    double rescale = 1.0;        // accumulated rescaling of the seed pair
    for (int l = L; l >= 1; --l) {
        const double R = coeff_R(l, eta);
        const double S = coeff_S(l, eta, rho);
        const double Fm = (S * F0u + F0up) / R;
        const double Fmp = S * Fm - R * F0u;
        F0u = Fm;
        F0up = Fmp;
        if (std::abs(F0u) > 1e250) {
            F0u *= 1e-250;
            F0up *= 1e-250;
            rescale *= 1e-250;
        }
    }
    const double f0 = F0up / F0u;

    // Absolute (F, G) at lambda = 0.
    CoulombSolution s0;
    const double safe = cf2_safe_rho(eta, 0.0);
    if (rho >= safe) {
        const Cf2Result c2 = cf2(0.0, eta, rho);
        const double fp = f0 - c2.p;
        const double sign0 = (F0u >= 0.0 ? 1.0 : -1.0);
        s0.F = sign0 * std::sqrt(c2.q / (fp * fp + c2.q * c2.q));
        s0.Fp = f0 * s0.F;
        s0.G = s0.F * fp / c2.q;
        s0.Gp = c2.p * s0.G - c2.q * s0.F;
    } else {
        CoulombSolution anchor = steed_at(0.0, eta, safe);
        double x = safe, G = anchor.G, Gp = anchor.Gp;
        taylor_march(0, eta, x, G, Gp, rho);
        s0.G = G;
        s0.Gp = Gp;
        s0.F = 1.0 / (f0 * G - Gp);
        s0.Fp = f0 * s0.F;
    }

    if (L == 0) return s0;

    // Scale the downward-recursed pair by the true F_0, raise G upward. The
    // seed pair was shrunk by `rescale` on the way down, so the true ratio is
    // F_L / F_0 = Ft * rescale / F0u.
    CoulombSolution out;
    out.F = Ft * (s0.F / F0u) * rescale;
    out.Fp = c1_target.f * out.F;
    double G = s0.G, Gp = s0.Gp;
    for (int l = 1; l <= L; ++l) {
        const double R = coeff_R(l, eta);
        const double S = coeff_S(l, eta, rho);
        const double Gl = (S * G - Gp) / R;
        const double Glp = R * G - S * Gl;
        G = Gl;
        Gp = Glp;
        if (std::abs(G) > 1e290)
            throw precision_failure_error("coulomb_fg: G_L overflow at this (eta, rho, L)", 0.0);
    }
    out.G = G;
    out.Gp = Gp;
    return out;
}

inline CoulombSolution coulomb_fg(const CoulombParams& p, double rho) {
    return coulomb_fg(p.eta(), rho, p.L);
}

// ---------------------------------------------------------------------------
// Madelung fields of the decay and fusion waves
// ---------------------------------------------------------------------------

// Absorbing channel: non-unitary elastic S-matrix with |S_L| <= 1 and an
// absorption boundary at r = R. Fusion probability T_L = 1 - |S_L|^2.
struct FusionChannel {
    Complex S_L{1.0, 0.0};
    double R = 0.0;

    double T_L() const { return 1.0 - std::norm(S_L); }
};

namespace coulomb_detail {

// Unwrap a sampled phase along the grid, anchored at the outermost point.
inline std::vector<double> unwrap_from_outer(const std::vector<double>& raw) {
    const size_t n = raw.size();
    std::vector<double> s(n);
    s[n - 1] = raw[n - 1];
    for (size_t i = n - 1; i-- > 0;)
        s[i] = s[i + 1] + std::remainder(raw[i] - raw[i + 1], 2.0 * M_PI);
    return s;
}

} // namespace coulomb_detail

// Outgoing decay wave u = H+_L: rho_density = F^2 + G^2, S = hbar * arg H+
// unwrapped, v_r = (hbar k / m) / (F^2 + G^2), and
//   Q(r) = E - V_eff(r) - hbar^2 k^2 / (2 m (F^2+G^2)^2),
// which is the quantum Hamilton-Jacobi closure of the first three.
inline MadelungField decay_fields(const CoulombParams& p, const Grid1D& r_grid) {
    if (!(r_grid.x_min > 0.0))
        throw out_of_domain_error("decay_fields: radial grid must satisfy r > 0");
    const int n = r_grid.n_points;
    const double k = p.k(), hbar = p.hbar, m = p.m;

    MadelungField f;
    f.grid = r_grid;
    f.m = m;
    f.hbar = hbar;
    f.rho.resize(n);
    f.S.resize(n);
    f.v.resize(n);
    f.Q.resize(n);
    f.node_mask.assign(n, 0);

    std::vector<double> raw(n);
    for (int i = 0; i < n; ++i) {
        const double r = r_grid.x(i);
        const CoulombSolution c = coulomb_fg(p, p.rho(r));
        const double dens = c.F * c.F + c.G * c.G;
        f.rho[i] = dens;
        raw[i] = std::atan2(c.F, c.G);
        f.v[i] = hbar * k / (m * dens);
        f.Q[i] = p.E - p.v_eff(r) - hbar * hbar * k * k / (2.0 * m * dens * dens);
    }
    const auto s = coulomb_detail::unwrap_from_outer(raw);
    for (int i = 0; i < n; ++i) f.S[i] = hbar * s[i];
    return f;
}

struct FusionFields {
    MadelungField field;
    double T_L = 0.0;
};

// Exterior fusion wave u_L = H- - S_L H+ (incoming plus partially reflected,
// absorption encoded by |S_L| < 1). The phase gradient is evaluated
// analytically, v_r = (hbar k / mu) Im(conj(u) u') / |u|^2, and
//   Q(r) = E - V_eff(r) - hbar^2 k^2 (1-|S_L|^2)^2 / (2 mu |u|^4).
inline FusionFields fusion_fields(const CoulombParams& p, const FusionChannel& ch,
                                  const Grid1D& r_grid) {
    if (std::abs(ch.S_L) > 1.0 + 1e-12)
        throw nonphysical_absorption_error("fusion_fields: |S_L| > 1");
    if (!(r_grid.x_min > 0.0) || r_grid.x_min < ch.R)
        throw out_of_domain_error("fusion_fields: grid must lie outside the absorption radius");
    const int n = r_grid.n_points;
    const double k = p.k(), hbar = p.hbar, mu = p.m;
    const double TL = ch.T_L();

    FusionFields out;
    out.T_L = TL;
    MadelungField& f = out.field;
    f.grid = r_grid;
    f.m = mu;
    f.hbar = hbar;
    f.rho.resize(n);
    f.S.resize(n);
    f.v.resize(n);
    f.Q.resize(n);
    f.node_mask.assign(n, 0);

    std::vector<double> raw(n);
    for (int i = 0; i < n; ++i) {
        const double r = r_grid.x(i);
        const CoulombSolution c = coulomb_fg(p, p.rho(r));
        const Complex u = c.Hminus() - ch.S_L * c.Hplus();
        const Complex up = c.Hminus_prime() - ch.S_L * c.Hplus_prime();
        const double dens = std::norm(u);
        f.rho[i] = dens;
        raw[i] = std::arg(u);
        f.v[i] = hbar * k / mu * std::imag(std::conj(u) * up) / dens;
        f.Q[i] = p.E - p.v_eff(r) - hbar * hbar * k * k * TL * TL / (2.0 * mu * dens * dens);
    }
    const auto s = coulomb_detail::unwrap_from_outer(raw);
    for (int i = 0; i < n; ++i) f.S[i] = hbar * s[i];
    return out;
}

// ---------------------------------------------------------------------------
// classically allowed / forbidden classification
// ---------------------------------------------------------------------------

struct RegionReport {
    std::vector<char> allowed;    // per grid point: E > V_eff
    double r_turning = 0.0;       // outer classical turning point (E = V_eff)
    double max_p2_forbidden = 0.0; // max of 2m(E - V_eff) over forbidden points (< 0)
    bool has_forbidden = false;
};

// E = V_eff has a single positive root for the repulsive Coulomb plus
// centrifugal potential (V_eff is strictly decreasing):
//   r_t = [Z1Z2e^2 + sqrt((Z1Z2e^2)^2 + 4 E hbar^2 L(L+1)/(2m))] / (2E).
inline RegionReport forbidden_region_check(const CoulombParams& p, const Grid1D& r_grid) {
    RegionReport rep;
    const double Z = p.strength;
    const double cent = p.hbar * p.hbar * p.L * (p.L + 1.0) / (2.0 * p.m);
    rep.r_turning = (Z + std::sqrt(Z * Z + 4.0 * p.E * cent)) / (2.0 * p.E);
    rep.allowed.resize(r_grid.n_points);
    rep.max_p2_forbidden = -INFINITY;
    for (int i = 0; i < r_grid.n_points; ++i) {
        const double r = r_grid.x(i);
        if (!(r > 0.0)) throw out_of_domain_error("forbidden_region_check: r > 0 required");
        const double p2 = 2.0 * p.m * (p.E - p.v_eff(r));
        rep.allowed[i] = p2 > 0.0 ? 1 : 0;
        if (p2 <= 0.0) {
            rep.has_forbidden = true;
            rep.max_p2_forbidden = std::max(rep.max_p2_forbidden, p2);
        }
    }
    if (!rep.has_forbidden) rep.max_p2_forbidden = 0.0;
    return rep;
}

} // namespace madel
