// madel: command-line front end for the tunneling / Madelung / global-phase
// toolkit. Subcommands map one-to-one onto the library modules; every
// subcommand emits CSV or JSON with identical numeric content and 17
// significant digits, so identical inputs produce byte-identical artifacts.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "madel/goldens.hpp"
#include "madel/madel.hpp"

namespace fs = std::filesystem;
using namespace madel;

namespace {

struct CommonOpts {
    std::string units = "natural";
    std::string format = "json";
    std::string output; // empty = stdout
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--units", c.units, "unit system: natural, mev_fm, si")
        ->check(CLI::IsMember({"natural", "mev_fm", "si"}));
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("-o,--output", c.output,
                    "output file (default stdout; MADEL_OUTPUT_DIR prefixes relative paths)");
}

void deliver(const CommonOpts& c, const std::string& content) {
    if (c.output.empty()) {
        std::cout << content;
        return;
    }
    fs::path p = c.output;
    if (const char* dir = std::getenv("MADEL_OUTPUT_DIR"); dir && p.is_relative())
        p = fs::path(dir) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p);
    if (!os) throw out_of_domain_error("cannot open output file " + p.string());
    os << content;
}

std::string emit_json(const io::Json& j) {
    std::ostringstream os;
    j.emit(os);
    os << "\n";
    return os.str();
}

struct GridSpec {
    double lo = 0.0, hi = 1.0;
    int n = 101;
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    char c1, c2;
    std::istringstream is(s);
    if (!(is >> g.lo >> c1 >> g.hi >> c2 >> g.n) || c1 != ':' || c2 != ':' || g.n < 3)
        throw CLI::ValidationError("--grid", "expected <lo>:<hi>:<n> with n >= 3");
    return g;
}

// scalar metadata that appears in both output formats
using Scalars = std::vector<std::pair<std::string, double>>;

void csv_scalars(std::ostringstream& os, const Scalars& sc) {
    for (const auto& [k, v] : sc) os << "# " << k << "," << io::fmt(v) << "\n";
}

void json_scalars(io::Json& j, const Scalars& sc) {
    for (const auto& [k, v] : sc) j.set(k, io::Json::num(v));
}

// ---------------------------------------------------------------------------
// step / barrier coefficient reports
// ---------------------------------------------------------------------------

std::string coefficient_report(const CommonOpts& c, const Scalars& scalars,
                               const std::vector<std::pair<std::string, Complex>>& coeffs) {
    if (c.format == "json") {
        io::Json j = io::Json::object();
        json_scalars(j, scalars);
        for (const auto& [name, z] : coeffs) j.set(name, io::Json::complex(z));
        return emit_json(j);
    }
    std::ostringstream os;
    csv_scalars(os, scalars);
    io::write_csv_row(os, {"name", "re", "im", "abs", "arg"});
    for (const auto& [name, z] : coeffs)
        io::write_csv_row(os, {name, io::fmt(z.real()), io::fmt(z.imag()), io::fmt(std::abs(z)),
                               io::fmt(std::arg(z))});
    return os.str();
}

// ---------------------------------------------------------------------------
// field tables
// ---------------------------------------------------------------------------

std::string madelung_report(const CommonOpts& c, const Scalars& scalars, const MadelungField& f,
                            const std::vector<char>* allowed = nullptr) {
    if (c.format == "json") {
        io::Json j = io::Json::object();
        json_scalars(j, scalars);
        j.set("field", io::madelung_json(f));
        if (allowed) {
            io::Json a = io::Json::array();
            for (char v : *allowed) a.push_back(io::Json::integer(v));
            j.set("allowed", std::move(a));
        }
        return emit_json(j);
    }
    std::ostringstream os;
    csv_scalars(os, scalars);
    if (!allowed) {
        io::write_madelung_csv(os, f);
        return os.str();
    }
    io::write_csv_row(os, {"x", "rho", "S", "v", "Q", "node", "allowed"});
    for (int i = 0; i < f.grid.n_points; ++i)
        io::write_csv_row(
            os, {io::fmt(f.grid.x(i)), io::fmt(f.rho[static_cast<size_t>(i)]),
                 io::fmt(f.S[static_cast<size_t>(i)]), io::fmt(f.v[static_cast<size_t>(i)]),
                 io::fmt(f.Q[static_cast<size_t>(i)]),
                 std::to_string(static_cast<int>(f.node_mask[static_cast<size_t>(i)])),
                 std::to_string(static_cast<int>((*allowed)[static_cast<size_t>(i)]))});
    return os.str();
}

std::string scalar_table(const CommonOpts& c, const Scalars& scalars) {
    if (c.format == "json") {
        io::Json j = io::Json::object();
        json_scalars(j, scalars);
        return emit_json(j);
    }
    std::ostringstream os;
    io::write_csv_row(os, {"quantity", "value"});
    for (const auto& [k, v] : scalars) io::write_csv_row(os, {k, io::fmt(v)});
    return os.str();
}

// ---------------------------------------------------------------------------
// validate: all dual-path comparisons
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    double max_dev = 0.0;
    double bound = 0.0;
    bool pass = false;
};

std::vector<CheckResult> run_validation() {
    std::vector<CheckResult> out;
    auto add = [&](const std::string& name, double dev, double bound) {
        out.push_back({name, dev, bound, dev < bound});
    };

    { // step totality
        std::mt19937 rng(101);
        std::uniform_real_distribution<double> Um(0.5, 2.0), Uv(0.5, 5.0), Ue(0.05, 0.95);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double V0 = Uv(rng);
            auto sol = solve_step(ScatteringProblem::step(Um(rng), 1.0, Ue(rng) * V0, V0));
            worst = std::max(worst, std::abs(std::norm(sol.r) - 1.0));
            worst = std::max(worst, std::abs(probability_current(sol, 0.3)));
        }
        add("step |r|^2 = 1 and zero interior current", worst, 1e-13);
    }

    { // barrier transmission: closed form vs transfer matrix vs 4x4 solve
        double worst = 0.0;
        for (int ie = 1; ie <= 9; ++ie) {
            for (double ka : {0.5, 2.0, 8.0, 20.0, 40.0}) {
                const double E = 0.1 * ie;
                const double kap = std::sqrt(2.0 * (1.0 - E));
                auto p = ScatteringProblem::barrier(1.0, 1.0, E, 1.0, ka / kap);
                const double Tc = transmission(p);
                const double Ts = solve_barrier(p).T();
                auto tm = oracle::transfer_matrix_transmission(
                    oracle::PiecewisePotential::rectangular_barrier(1.0, p.a), E, 1.0, 1.0);
                worst = std::max(worst, std::abs(Ts - Tc) / Tc);
                worst = std::max(worst, std::abs(tm.T - Tc) / Tc);
            }
        }
        add("barrier transmission dual path (incl. kappa a = 40)", worst, 1e-10);
    }

    { // Numerov overlap
        auto p = ScatteringProblem::barrier(1, 1, 0.5, 1.0, 2.0);
        auto sol = solve_barrier(p);
        Grid1D g(-4.0, 8.0, 6001);
        // mean value at the jump nodes keeps the scheme second order
        auto V = sample_real(g, [&](double x) {
            if (x == 0.0 || x == p.a) return 0.5 * p.V0;
            return (x > 0.0 && x < p.a) ? p.V0 : 0.0;
        });
        auto psi = oracle::numerov_solve(V, p.E, p.m, p.hbar,
                                         {oracle::NumerovBoundary::Type::outgoing,
                                          oracle::NumerovBoundary::Side::right});
        add("Numerov vs closed-form barrier field (1 - overlap)",
            1.0 - oracle::overlap(psi, evaluate_wavefunction(sol, g)), 1e-8);
    }

    { // Coulomb dual path
        std::mt19937 rng(202);
        std::uniform_real_distribution<double> Ueta(0.0, 30.0),
            Ulog(std::log(0.05), std::log(200.0));
        std::uniform_int_distribution<int> UL(0, 20);
        double worst = 0.0, worstW = 0.0;
        for (int i = 0; i < 40; ++i) {
            const double eta = Ueta(rng);
            const int L = UL(rng);
            const double rho = std::exp(Ulog(rng));
            auto orc = oracle::radial_coulomb_integrate(L, eta, {rho}, 1e-13);
            auto s = coulomb_fg(eta, rho, L);
            const auto& o = orc.samples.front();
            worst = std::max(worst, std::abs(s.F - o.F) / std::max(std::abs(o.F), 1e-280));
            worst = std::max(worst, std::abs(s.G - o.G) / std::abs(o.G));
            worstW = std::max(worstW, std::abs(s.wronskian() - 1.0));
        }
        add("coulomb F,G vs ODE oracle (relative)", worst, 1e-8);
        add("coulomb Wronskian - 1", worstW, 1e-8);
    }

    { // decay fields: current and closure
        auto p = CoulombParams::from_eta(8.0, 0, 1.0, 1.0, 0.5);
        Grid1D g(4.0, 48.0, 1201);
        auto f = decay_fields(p, g);
        const double hk = p.hbar * p.k() / p.m;
        double worst = 0.0;
        for (int i = 0; i < g.n_points; ++i)
            worst = std::max(worst, std::abs(f.rho[i] * f.v[i] / hk - 1.0));
        add("decay radial current rho v = hbar k / m", worst, 1e-10);
    }

    { // fusion limit
        auto p = CoulombParams::from_eta(8.0, 0, 1.0, 1.0, 0.5);
        Grid1D g(4.0, 48.0, 401);
        auto ff = fusion_fields(p, FusionChannel{Complex(0.0, 0.0), 0.0}, g);
        auto df = decay_fields(p, g);
        double worst = 0.0;
        for (int i = 0; i < g.n_points; ++i) {
            worst = std::max(worst, std::abs(ff.field.rho[i] - df.rho[i]) / df.rho[i]);
            worst = std::max(worst, std::abs(ff.field.Q[i] - df.Q[i]));
        }
        add("fusion S_L = 0 equals decay fields", worst, 1e-10);
    }

    { // KS reconstruction
        ks::KSConfig cfg(1.0, -0.5, 1.0, 1.0);
        ks::InitialGaussian psi0{cfg.M() * cfg.omega() / (2.0 * cfg.hbar), 1.0};
        auto prof = ks::reconstruct_ground_state(cfg, psi0, {}, 0.4 / cfg.omega(), 0.1, 10.0, 60);
        add("KS hydrogen profile is exponential (fit residual)", prof.max_fit_residual, 1e-6);
        add("KS slope matches the oscillator width",
            std::abs(prof.slope / prof.predicted_slope - 1.0), 0.01);
        ks::QuadratureSpec gh{ks::QuadratureSpec::Kind::gauss_hermite, 48};
        const Complex a = ks::reconstruct_psi_at(cfg, psi0, 0.4 / cfg.omega(), 1.1, {});
        const Complex b = ks::reconstruct_psi_at(cfg, psi0, 0.4 / cfg.omega(), 1.1, gh);
        add("KS closed form vs Gauss-Hermite quadrature", std::abs(a - b) / std::abs(a), 1e-10);
    }

    { // inverted branches
        ks::KSConfig cfg(1.0, 0.5, 1.0, 1.0);
        auto rep = ks::inverted_branch_interference_check(cfg, {0.5, 1.0, 2.0}, 0.8,
                                                          ks::InitialGaussian{0.7, 1.0});
        add("inverted branches carry nonzero Q (min over sample)",
            1.0 / std::max(rep.min_branch_max_Q, 1e-300), 1.0 / 0.01);
        add("integrated inverted field satisfies quantum HJ", rep.integrated_qhj_residual, 1e-6);
    }

    { // Berry holonomy vs solid angle, gauge invariance
        double worst = 0.0;
        for (double th : {M_PI / 6.0, M_PI / 3.0, M_PI_2}) {
            auto lp = LoopPath::latitude(th, 2000);
            const double gp = berry_phase_discrete(lp, Band::plus);
            worst = std::max(worst, std::abs(std::remainder(
                                        gp + M_PI * (1.0 - std::cos(th)), 2.0 * M_PI)));
        }
        add("Berry holonomy matches -Omega/2 on latitude loops", worst, 1e-3);
        auto lp = LoopPath::latitude(M_PI / 3.0, 400);
        std::mt19937 rng(303);
        std::uniform_real_distribution<double> U(0.0, 2.0 * M_PI);
        std::vector<double> chi(static_cast<size_t>(lp.n_points()));
        for (auto& c : chi) c = U(rng);
        const double base = berry_phase_discrete(lp, Band::plus);
        const double gauged = berry_phase_discrete(
            lp, Band::plus, [&](int i) { return chi[static_cast<size_t>(i)]; });
        add("Berry holonomy gauge invariance",
            std::abs(std::remainder(gauged - base, 2.0 * M_PI)), 1e-12);
    }

    { // SQUID and Josephson dual paths
        UnitSystem nat;
        double worst = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double Phi = 0.02 * i * nat.flux_quantum();
            worst = std::max(worst, std::abs(squid_critical_current_maximized(1.0, Phi, nat) -
                                             squid_critical_current(1.0, Phi, nat)));
        }
        add("SQUID modulation vs brute-force maximization", worst, 1e-12);
        JunctionSpec j(2.0, 1.0, 0.3, 1.5, 1.0, 0.8, 1.1);
        add("Josephson closed form vs current-density definition",
            std::abs(josephson_current(j) - josephson_current_from_field(j, 0.6)), 1e-10);
    }

    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact tunneling solutions, Madelung decompositions, classical-action "
                 "branch diagnostics, Coulomb waves and global-phase observables"};
    app.require_subcommand(1);

    // ---- step ----
    CommonOpts c_step;
    double st_m = 1.0, st_E = 0.0, st_V0 = 0.0;
    auto* cmd_step = app.add_subcommand("step", "sub-barrier potential step");
    cmd_step->add_option("--mass", st_m, "particle mass");
    cmd_step->add_option("--energy", st_E, "incident energy (0 < E < V0)")->required();
    cmd_step->add_option("--v0", st_V0, "step height")->required();
    add_common(cmd_step, c_step);

    // ---- barrier ----
    CommonOpts c_bar;
    double ba_m = 1.0, ba_E = 0.0, ba_V0 = 0.0, ba_a = 0.0;
    auto* cmd_bar = app.add_subcommand("barrier", "rectangular barrier tunneling");
    cmd_bar->add_option("--mass", ba_m, "particle mass");
    cmd_bar->add_option("--energy", ba_E, "incident energy (0 < E < V0)")->required();
    cmd_bar->add_option("--v0", ba_V0, "barrier height")->required();
    cmd_bar->add_option("--width", ba_a, "barrier width")->required();
    add_common(cmd_bar, c_bar);

    // ---- madelung ----
    CommonOpts c_mad;
    std::string mad_problem = "barrier", mad_grid = "0:2:1001", mad_psi;
    double md_m = 1.0, md_E = 0.5, md_V0 = 1.0, md_a = 2.0;
    auto* cmd_mad = app.add_subcommand("madelung", "Madelung fields of an exact solution");
    cmd_mad->add_option("--problem", mad_problem, "step or barrier")
        ->check(CLI::IsMember({"step", "barrier"}));
    cmd_mad->add_option("--mass", md_m, "particle mass");
    cmd_mad->add_option("--energy", md_E, "incident energy");
    cmd_mad->add_option("--v0", md_V0, "potential height");
    cmd_mad->add_option("--width", md_a, "barrier width (barrier only)");
    cmd_mad->add_option("--grid", mad_grid, "sampling grid lo:hi:n");
    cmd_mad->add_option("--psi", mad_psi,
                        "also write the sampled wavefunction (x, re, im) to this file");
    double mad_node_threshold = 1e-12;
    cmd_mad->add_option("--node-threshold", mad_node_threshold,
                        "relative density floor marking unreliable v, Q")
        ->check(CLI::PositiveNumber);
    add_common(cmd_mad, c_mad);

    // ---- branches ----
    CommonOpts c_br;
    std::string br_problem = "barrier", br_grid;
    int br_region = 2;
    double br_m = 1.0, br_E = 0.5, br_V0 = 1.0, br_a = 2.0;
    auto* cmd_br = app.add_subcommand("branches", "per-branch classical-action diagnostics");
    cmd_br->add_option("--problem", br_problem, "step or barrier")
        ->check(CLI::IsMember({"step", "barrier"}));
    cmd_br->add_option("--region", br_region, "region index (1, 2, or 3)")
        ->check(CLI::Range(1, 3));
    cmd_br->add_option("--mass", br_m, "particle mass");
    cmd_br->add_option("--energy", br_E, "incident energy");
    cmd_br->add_option("--v0", br_V0, "potential height");
    cmd_br->add_option("--width", br_a, "barrier width (barrier only)");
    cmd_br->add_option("--grid", br_grid, "evaluation grid lo:hi:n (default per region)");
    add_common(cmd_br, c_br);

    // ---- coulomb-decay ----
    CommonOpts c_cd;
    double cd_eta = -1.0, cd_strength = -1.0, cd_E = 0.5, cd_m = 1.0;
    int cd_L = 0;
    std::string cd_grid = "4:48:801";
    auto* cmd_cd = app.add_subcommand("coulomb-decay", "outgoing Coulomb decay wave fields");
    cmd_cd->add_option("--eta", cd_eta, "Sommerfeld parameter (sets Z1Z2e^2 from E, m)");
    cmd_cd->add_option("--strength", cd_strength, "Z1 Z2 e^2 (alternative to --eta)");
    cmd_cd->add_option("--energy", cd_E, "energy");
    cmd_cd->add_option("--mass", cd_m, "mass (or reduced mass)");
    cmd_cd->add_option("-L,--angular-momentum", cd_L, "orbital angular momentum");
    cmd_cd->add_option("--grid", cd_grid, "radial grid rmin:rmax:n");
    add_common(cmd_cd, c_cd);

    // ---- coulomb-fusion ----
    CommonOpts c_cf;
    double cf_eta = -1.0, cf_strength = -1.0, cf_E = 0.5, cf_m = 1.0, cf_sre = 0.5,
           cf_sim = 0.0, cf_R = 0.0;
    int cf_L = 0;
    std::string cf_grid = "4:48:801";
    auto* cmd_cf = app.add_subcommand("coulomb-fusion", "absorbing fusion wave fields");
    cmd_cf->add_option("--eta", cf_eta, "Sommerfeld parameter");
    cmd_cf->add_option("--strength", cf_strength, "Z1 Z2 e^2 (alternative to --eta)");
    cmd_cf->add_option("--energy", cf_E, "energy");
    cmd_cf->add_option("--mass", cf_m, "reduced mass");
    cmd_cf->add_option("-L,--angular-momentum", cf_L, "orbital angular momentum");
    cmd_cf->add_option("--sl-re", cf_sre, "Re S_L");
    cmd_cf->add_option("--sl-im", cf_sim, "Im S_L");
    cmd_cf->add_option("--channel-radius", cf_R, "absorption radius R");
    cmd_cf->add_option("--grid", cf_grid, "radial grid rmin:rmax:n");
    add_common(cmd_cf, c_cf);

    // ---- ks-hydrogen ----
    CommonOpts c_kh;
    double kh_G = 1.0, kh_E = -0.5, kh_m = 1.0, kh_tprime = -1.0, kh_rmin = 0.1, kh_rmax = 10.0;
    int kh_samples = 200, kh_gh = 0;
    std::string kh_psi0 = "gaussian:auto";
    auto* cmd_kh = app.add_subcommand("ks-hydrogen",
                                      "bound-state reconstruction through the oscillator map");
    cmd_kh->add_option("--strength", kh_G, "Coulomb strength G = Z e^2");
    cmd_kh->add_option("--energy", kh_E, "bound energy (E < 0)");
    cmd_kh->add_option("--mass", kh_m, "mass");
    cmd_kh->add_option("--tprime", kh_tprime, "pseudo-time (default 0.4 / omega)");
    cmd_kh->add_option("--psi0", kh_psi0,
                       "initial state, gaussian:<alpha0|auto>[:<amplitude>]");
    cmd_kh->add_option("--rmin", kh_rmin, "first radial sample");
    cmd_kh->add_option("--rmax", kh_rmax, "last radial sample");
    cmd_kh->add_option("--samples", kh_samples, "number of radial samples");
    cmd_kh->add_option("--gauss-hermite", kh_gh,
                       "evaluate by Gauss-Hermite quadrature with this many nodes");
    add_common(cmd_kh, c_kh);

    // ---- ks-inverted ----
    CommonOpts c_ki;
    double ki_G = 1.0, ki_E = 0.5, ki_m = 1.0, ki_tprime = 0.8, ki_alpha0 = 0.7;
    std::vector<double> ki_q0{0.5, 1.0, 2.0};
    auto* cmd_ki = app.add_subcommand("ks-inverted",
                                      "inverted-oscillator branch quantum potentials");
    cmd_ki->add_option("--strength", ki_G, "Coulomb strength G = Z1 Z2 e^2");
    cmd_ki->add_option("--energy", ki_E, "scattering energy (E > 0)");
    cmd_ki->add_option("--mass", ki_m, "mass");
    cmd_ki->add_option("--tprime", ki_tprime, "pseudo-time");
    cmd_ki->add_option("--alpha0", ki_alpha0, "initial Gaussian width");
    cmd_ki->add_option("--q0", ki_q0, "sampled branch start points");
    add_common(cmd_ki, c_ki);

    // ---- berry ----
    CommonOpts c_be;
    double be_lat = M_PI_2;
    int be_points = 2000;
    std::string be_loop_file;
    auto* cmd_be = app.add_subcommand("berry", "discrete Berry holonomy and solid angle");
    cmd_be->add_option("--latitude", be_lat, "polar angle of a constant-latitude loop");
    cmd_be->add_option("--points", be_points, "loop samples");
    cmd_be->add_option("--loop-file", be_loop_file,
                       "JSON file with theta/phi arrays (overrides --latitude)");
    add_common(cmd_be, c_be);

    // ---- josephson ----
    CommonOpts c_jo;
    double jo_mstar = 2.0, jo_u0 = 1.0, jo_E = 0.5, jo_d = 1.0, jo_a = 1.0, jo_b = 1.0;
    std::string jo_sweep = "0:6.283185307179586:65";
    auto* cmd_jo = app.add_subcommand("josephson", "junction current-phase table");
    cmd_jo->add_option("--mstar", jo_mstar, "Cooper-pair mass");
    cmd_jo->add_option("--u0", jo_u0, "barrier height");
    cmd_jo->add_option("--energy", jo_E, "pair energy (E < U0)");
    cmd_jo->add_option("--thickness", jo_d, "barrier thickness");
    cmd_jo->add_option("--a", jo_a, "left interior amplitude");
    cmd_jo->add_option("--b", jo_b, "right interior amplitude");
    cmd_jo->add_option("--delta-sweep", jo_sweep, "phase sweep lo:hi:n");
    add_common(cmd_jo, c_jo);

    // ---- squid ----
    CommonOpts c_sq;
    double sq_ic = 1.0;
    std::string sq_sweep = "0:2:0.01";
    auto* cmd_sq = app.add_subcommand("squid", "dc SQUID critical-current modulation");
    cmd_sq->add_option("--ic", sq_ic, "single-junction critical current")->required();
    cmd_sq->add_option("--flux-sweep", sq_sweep, "Phi/Phi0 sweep start:end:step");
    add_common(cmd_sq, c_sq);

    // ---- validate ----
    CommonOpts c_va;
    auto* cmd_va = app.add_subcommand("validate", "run all dual-path consistency checks");
    add_common(cmd_va, c_va);

    // ---- goldens ----
    CommonOpts c_go;
    std::string go_dir = "data/goldens";
    bool go_regen = false;
    auto* cmd_go = app.add_subcommand("goldens", "golden regression corpus");
    cmd_go->add_option("--dir", go_dir, "corpus directory");
    cmd_go->add_flag("--regenerate", go_regen,
                     "write the corpus (without this flag, compare only)");
    add_common(cmd_go, c_go);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return 2; // usage error
    }

    try {
        if (*cmd_step) {
            UnitSystem u = UnitSystem::from_name(c_step.units);
            auto p = ScatteringProblem::step(st_m, u.hbar, st_E, st_V0);
            auto sol = solve_step(p);
            Scalars sc{{"m", p.m},         {"hbar", p.hbar},     {"E", p.E},
                       {"V0", p.V0},       {"k", p.k()},         {"kappa", p.kappa()},
                       {"theta", sol.theta()}, {"delta", sol.delta()},
                       {"R", std::norm(sol.r)}};
            deliver(c_step, coefficient_report(c_step, sc, {{"r", sol.r}, {"A", sol.A}}));
        } else if (*cmd_bar) {
            UnitSystem u = UnitSystem::from_name(c_bar.units);
            auto p = ScatteringProblem::barrier(ba_m, u.hbar, ba_E, ba_V0, ba_a);
            auto sol = solve_barrier(p);
            Scalars sc{{"m", p.m},     {"hbar", p.hbar}, {"E", p.E},
                       {"V0", p.V0},   {"a", p.a},       {"k", p.k()},
                       {"kappa", p.kappa()}, {"T", sol.T()}, {"R", sol.R()},
                       {"log_T", log_transmission(p)}};
            deliver(c_bar, coefficient_report(c_bar, sc,
                                              {{"r", sol.r}, {"t", sol.t}, {"A", sol.A},
                                               {"B", sol.B}}));
        } else if (*cmd_mad) {
            UnitSystem u = UnitSystem::from_name(c_mad.units);
            const GridSpec gs = parse_grid(mad_grid);
            Grid1D grid(gs.lo, gs.hi, gs.n);
            Scalars sc{{"m", md_m}, {"hbar", u.hbar}, {"E", md_E}, {"V0", md_V0}};
            MadelungField f;
            ComplexField psi;
            if (mad_problem == "step") {
                auto sol = solve_step(ScatteringProblem::step(md_m, u.hbar, md_E, md_V0));
                psi = evaluate_wavefunction(sol, grid);
            } else {
                auto p = ScatteringProblem::barrier(md_m, u.hbar, md_E, md_V0, md_a);
                auto sol = solve_barrier(p);
                sc.push_back({"a", md_a});
                sc.push_back({"T", sol.T()});
                psi = evaluate_wavefunction(sol, grid);
            }
            f = decompose(psi, md_m, u.hbar, mad_node_threshold);
            if (!mad_psi.empty()) {
                std::ostringstream os;
                if (c_mad.format == "json") {
                    io::field_json(psi).emit(os);
                    os << "\n";
                } else {
                    io::write_field_csv(os, psi);
                }
                CommonOpts cpsi = c_mad;
                cpsi.output = mad_psi;
                deliver(cpsi, os.str());
            }
            deliver(c_mad, madelung_report(c_mad, sc, f));
        } else if (*cmd_br) {
            UnitSystem u = UnitSystem::from_name(c_br.units);
            std::vector<ActionBranch> branches;
            Grid1D grid(0.0, 1.0, 3);
            double Vlevel = 0.0;
            if (br_problem == "step") {
                auto sol = solve_step(ScatteringProblem::step(br_m, u.hbar, br_E, br_V0));
                if (br_region == 1) {
                    branches = step_region1_branches(sol);
                    grid = Grid1D(-6.0, -0.01, 501);
                } else if (br_region == 2) {
                    branches = step_region2_branches(sol);
                    grid = Grid1D(0.0, 4.0, 501);
                    Vlevel = br_V0;
                } else {
                    throw out_of_domain_error("step has regions 1 and 2 only");
                }
            } else {
                auto p = ScatteringProblem::barrier(br_m, u.hbar, br_E, br_V0, br_a);
                auto sol = solve_barrier(p);
                if (br_region == 1) {
                    branches = barrier_region1_branches(sol);
                    grid = Grid1D(-6.0, -0.01, 501);
                } else if (br_region == 2) {
                    branches = barrier_region2_branches(sol);
                    grid = Grid1D(0.0, p.a, 501);
                    Vlevel = br_V0;
                } else {
                    branches = barrier_region3_branches(sol);
                    grid = Grid1D(p.a + 0.01, p.a + 6.0, 501);
                }
            }
            if (!br_grid.empty()) {
                const GridSpec gs = parse_grid(br_grid);
                grid = Grid1D(gs.lo, gs.hi, gs.n);
            }
            auto V = sample_real(grid, [&](double) { return Vlevel; });
            if (c_br.format == "json") {
                io::Json arr = io::Json::array();
                for (const auto& b : branches) {
                    auto d = diagnose_branch(b, grid, V, br_m, u.hbar);
                    io::Json row = io::Json::object();
                    row.set("label", io::Json::str(d.label));
                    row.set("classical_real", io::Json::boolean(d.classical_real));
                    row.set("max_abs_Q", io::Json::num(d.max_abs_Q));
                    row.set("max_abs_hj_residual", io::Json::num(d.max_abs_hj_residual));
                    arr.push_back(std::move(row));
                }
                io::Json j = io::Json::object();
                j.set("region", io::Json::integer(br_region));
                j.set("branches", std::move(arr));
                deliver(c_br, emit_json(j));
            } else {
                std::ostringstream os;
                os << "# region," << br_region << "\n";
                io::write_csv_row(os,
                                  {"label", "classical_real", "max_abs_Q", "max_abs_hj_residual"});
                for (const auto& b : branches) {
                    auto d = diagnose_branch(b, grid, V, br_m, u.hbar);
                    io::write_csv_row(os, {d.label, d.classical_real ? "1" : "0",
                                           io::fmt(d.max_abs_Q), io::fmt(d.max_abs_hj_residual)});
                }
                deliver(c_br, os.str());
            }
        } else if (*cmd_cd || *cmd_cf) {
            const bool fusion = static_cast<bool>(*cmd_cf);
            CommonOpts& copt = fusion ? c_cf : c_cd;
            UnitSystem u = UnitSystem::from_name(copt.units);
            const double eta = fusion ? cf_eta : cd_eta;
            const double strength = fusion ? cf_strength : cd_strength;
            const double E = fusion ? cf_E : cd_E;
            const double m = fusion ? cf_m : cd_m;
            const int L = fusion ? cf_L : cd_L;
            CoulombParams p = strength >= 0.0
                                  ? CoulombParams(m, u.hbar, E, strength, L)
                                  : CoulombParams::from_eta(eta < 0.0 ? 1.0 : eta, L, m, u.hbar,
                                                            E);
            const GridSpec gs = parse_grid(fusion ? cf_grid : cd_grid);
            Grid1D grid(gs.lo, gs.hi, gs.n);
            auto region = forbidden_region_check(p, grid);
            Scalars sc{{"eta", p.eta()},   {"k", p.k()},      {"E", p.E},
                       {"mass", p.m},      {"L", double(p.L)}, {"strength", p.strength},
                       {"r_turning", region.r_turning}};
            if (fusion) {
                FusionChannel ch{Complex(cf_sre, cf_sim), cf_R};
                auto ff = fusion_fields(p, ch, grid);
                sc.push_back({"S_L_re", cf_sre});
                sc.push_back({"S_L_im", cf_sim});
                sc.push_back({"T_L", ff.T_L});
                deliver(copt, madelung_report(copt, sc, ff.field, &region.allowed));
            } else {
                auto f = decay_fields(p, grid);
                deliver(copt, madelung_report(copt, sc, f, &region.allowed));
            }
        } else if (*cmd_kh) {
            UnitSystem u = UnitSystem::from_name(c_kh.units);
            ks::KSConfig cfg(kh_G, kh_E, kh_m, u.hbar);
            const double tp = kh_tprime > 0.0 ? kh_tprime : 0.4 / cfg.omega();
            ks::InitialGaussian psi0;
            if (kh_psi0 == "gaussian:auto")
                psi0 = ks::InitialGaussian{cfg.M() * cfg.omega() / (2.0 * cfg.hbar), 1.0};
            else
                psi0 = ks::parse_initial_state(kh_psi0);
            ks::QuadratureSpec quad;
            if (kh_gh > 0)
                quad = ks::QuadratureSpec{ks::QuadratureSpec::Kind::gauss_hermite, kh_gh};
            auto prof = ks::reconstruct_ground_state(cfg, psi0, quad, tp, kh_rmin, kh_rmax,
                                                     kh_samples);
            Scalars sc{{"strength", kh_G},
                       {"E", kh_E},
                       {"omega", cfg.omega()},
                       {"tprime", tp},
                       {"alpha0", psi0.alpha0},
                       {"slope", prof.slope},
                       {"predicted_slope", prof.predicted_slope},
                       {"max_fit_residual", prof.max_fit_residual}};
            if (c_kh.format == "json") {
                io::Json j = io::Json::object();
                json_scalars(j, sc);
                io::Json r = io::Json::array(), lp = io::Json::array();
                for (size_t i = 0; i < prof.r.size(); ++i) {
                    r.push_back(io::Json::num(prof.r[i]));
                    lp.push_back(io::Json::num(prof.log_abs_psi[i]));
                }
                j.set("r", std::move(r));
                j.set("log_abs_psi", std::move(lp));
                deliver(c_kh, emit_json(j));
            } else {
                std::ostringstream os;
                csv_scalars(os, sc);
                io::write_csv_row(os, {"r", "log_abs_psi"});
                for (size_t i = 0; i < prof.r.size(); ++i)
                    io::write_csv_row(os, {io::fmt(prof.r[i]), io::fmt(prof.log_abs_psi[i])});
                deliver(c_kh, os.str());
            }
        } else if (*cmd_ki) {
            UnitSystem u = UnitSystem::from_name(c_ki.units);
            ks::KSConfig cfg(ki_G, ki_E, ki_m, u.hbar);
            auto rep = ks::inverted_branch_interference_check(
                cfg, ki_q0, ki_tprime, ks::InitialGaussian{ki_alpha0, 1.0});
            Scalars sc{{"strength", ki_G},
                       {"E", ki_E},
                       {"tprime", ki_tprime},
                       {"alpha0", ki_alpha0},
                       {"min_branch_max_Q", rep.min_branch_max_Q},
                       {"integrated_qhj_residual", rep.integrated_qhj_residual},
                       {"q_fd_check", rep.q_fd_check},
                       {"symmetric_pair_phase_gradient", rep.symmetric_pair_phase_gradient}};
            if (c_ki.format == "json") {
                io::Json j = io::Json::object();
                json_scalars(j, sc);
                io::Json q0 = io::Json::array(), qmax = io::Json::array();
                for (size_t i = 0; i < ki_q0.size(); ++i) {
                    q0.push_back(io::Json::num(ki_q0[i]));
                    qmax.push_back(io::Json::num(rep.branch_max_Q[i]));
                }
                j.set("q0", std::move(q0));
                j.set("branch_max_Q", std::move(qmax));
                deliver(c_ki, emit_json(j));
            } else {
                std::ostringstream os;
                csv_scalars(os, sc);
                io::write_csv_row(os, {"q0", "max_abs_Q"});
                for (size_t i = 0; i < ki_q0.size(); ++i)
                    io::write_csv_row(os, {io::fmt(ki_q0[i]), io::fmt(rep.branch_max_Q[i])});
                deliver(c_ki, os.str());
            }
        } else if (*cmd_be) {
            LoopPath lp;
            if (!be_loop_file.empty()) {
                std::ifstream is(be_loop_file);
                if (!is) throw out_of_domain_error("cannot read loop file " + be_loop_file);
                nlohmann::json j;
                is >> j;
                lp.theta = j.at("theta").get<std::vector<double>>();
                lp.phi = j.at("phi").get<std::vector<double>>();
            } else {
                lp = LoopPath::latitude(be_lat, be_points);
            }
            const double gp = berry_phase_discrete(lp, Band::plus);
            const double gm = berry_phase_discrete(lp, Band::minus);
            const double om = solid_angle(lp);
            Scalars sc{{"n_points", double(lp.n_points())},
                       {"gamma_plus", gp},
                       {"gamma_minus", gm},
                       {"solid_angle", om},
                       {"deviation_plus", std::remainder(gp + 0.5 * om, 2.0 * M_PI)}};
            deliver(c_be, scalar_table(c_be, sc));
        } else if (*cmd_jo) {
            UnitSystem u = UnitSystem::from_name(c_jo.units);
            const GridSpec gs = parse_grid(jo_sweep);
            JunctionSpec base(jo_mstar, jo_u0, jo_E, jo_d, jo_a, jo_b, 0.0, u.hbar);
            Scalars sc{{"mstar", jo_mstar}, {"u0", jo_u0},          {"E", jo_E},
                       {"thickness", jo_d}, {"kappa", base.kappa()}, {"j_c", base.j_c()}};
            if (c_jo.format == "json") {
                io::Json j = io::Json::object();
                json_scalars(j, sc);
                io::Json dl = io::Json::array(), cur = io::Json::array(),
                         fld = io::Json::array();
                for (int i = 0; i < gs.n; ++i) {
                    JunctionSpec jj = base;
                    jj.delta = gs.lo + (gs.hi - gs.lo) * i / (gs.n - 1.0);
                    dl.push_back(io::Json::num(jj.delta));
                    cur.push_back(io::Json::num(josephson_current(jj)));
                    fld.push_back(io::Json::num(josephson_current_from_field(jj, 0.5 * jj.d)));
                }
                j.set("delta", std::move(dl));
                j.set("j", std::move(cur));
                j.set("j_from_field", std::move(fld));
                deliver(c_jo, emit_json(j));
            } else {
                std::ostringstream os;
                csv_scalars(os, sc);
                io::write_csv_row(os, {"delta", "j", "j_from_field"});
                for (int i = 0; i < gs.n; ++i) {
                    JunctionSpec jj = base;
                    jj.delta = gs.lo + (gs.hi - gs.lo) * i / (gs.n - 1.0);
                    io::write_csv_row(os, {io::fmt(jj.delta), io::fmt(josephson_current(jj)),
                                           io::fmt(josephson_current_from_field(jj, 0.5 * jj.d))});
                }
                deliver(c_jo, os.str());
            }
        } else if (*cmd_sq) {
            UnitSystem u = UnitSystem::from_name(c_sq.units);
            double lo, hi, step;
            char c1, c2;
            std::istringstream is(sq_sweep);
            if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
                throw CLI::ValidationError("--flux-sweep", "expected start:end:step");
            const int n = static_cast<int>(std::round((hi - lo) / step)) + 1;
            if (c_sq.format == "json") {
                io::Json j = io::Json::object();
                j.set("ic", io::Json::num(sq_ic));
                j.set("phi0", io::Json::num(u.flux_quantum()));
                io::Json ph = io::Json::array(), icur = io::Json::array();
                for (int i = 0; i < n; ++i) {
                    const double x = lo + i * step;
                    ph.push_back(io::Json::num(x));
                    icur.push_back(
                        io::Json::num(squid_critical_current(sq_ic, x * u.flux_quantum(), u)));
                }
                j.set("phi_over_phi0", std::move(ph));
                j.set("Ic", std::move(icur));
                deliver(c_sq, emit_json(j));
            } else {
                std::ostringstream os;
                os << "# ic," << io::fmt(sq_ic) << "\n";
                os << "# phi0," << io::fmt(u.flux_quantum()) << "\n";
                io::write_csv_row(os, {"phi_over_phi0", "Ic"});
                for (int i = 0; i < n; ++i) {
                    const double x = lo + i * step;
                    io::write_csv_row(
                        os, {io::fmt(x),
                             io::fmt(squid_critical_current(sq_ic, x * u.flux_quantum(), u))});
                }
                deliver(c_sq, os.str());
            }
        } else if (*cmd_va) {
            const auto t0 = std::chrono::steady_clock::now();
            auto checks = run_validation();
            bool all = true;
            std::ostringstream text;
            for (const auto& c : checks) {
                all = all && c.pass;
                text << (c.pass ? "ok   " : "FAIL ") << c.name << " (dev " << io::fmt(c.max_dev)
                     << ", bound " << io::fmt(c.bound) << ")\n";
            }
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            text << (all ? "PASSED " : "FAILED ") << checks.size() << " checks in "
                 << io::fmt(secs) << " s\n";
            std::cout << text.str();
            if (!c_va.output.empty()) {
                if (c_va.format == "json") {
                    io::Json j = io::Json::object();
                    io::Json arr = io::Json::array();
                    for (const auto& c : checks) {
                        io::Json row = io::Json::object();
                        row.set("name", io::Json::str(c.name));
                        row.set("max_dev", io::Json::num(c.max_dev));
                        row.set("bound", io::Json::num(c.bound));
                        row.set("pass", io::Json::boolean(c.pass));
                        arr.push_back(std::move(row));
                    }
                    j.set("checks", std::move(arr));
                    j.set("pass", io::Json::boolean(all));
                    deliver(c_va, emit_json(j));
                } else {
                    std::ostringstream os;
                    io::write_csv_row(os, {"name", "max_dev", "bound", "pass"});
                    for (const auto& c : checks)
                        io::write_csv_row(os, {c.name, io::fmt(c.max_dev), io::fmt(c.bound),
                                               c.pass ? "1" : "0"});
                    deliver(c_va, os.str());
                }
            }
            return all ? 0 : 1;
        } else if (*cmd_go) {
            auto corpus = goldens::generate();
            const fs::path dir = go_dir;
            const fs::path barrier = dir / "barrier_transmission.csv";
            const fs::path coulomb = dir / "coulomb_wave.csv";
            if (go_regen) {
                fs::create_directories(dir);
                { std::ofstream os(barrier); os << corpus.barrier_csv; }
                { std::ofstream os(coulomb); os << corpus.coulomb_csv; }
                std::cout << "wrote " << barrier.string() << " and " << coulomb.string() << "\n";
            } else {
                auto read = [](const fs::path& p) {
                    std::ifstream is(p);
                    std::ostringstream ss;
                    ss << is.rdbuf();
                    return ss.str();
                };
                const bool ok = read(barrier) == corpus.barrier_csv &&
                                read(coulomb) == corpus.coulomb_csv;
                std::cout << (ok ? "corpus up to date\n" : "corpus differs from regeneration\n");
                return ok ? 0 : 1;
            }
        }
    } catch (const madel::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
