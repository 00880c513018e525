// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <fmt/core.h>

#include "nsmp/builtins.hpp"
#include "nsmp/cli.hpp"
#include "nsmp/hamiltonian.hpp"
#include "nsmp/mountainpass.hpp"
#include "nsmp/properties.hpp"

using namespace nsmp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::cout << fmt::format("criterion {} {:<28} {}  {}", id, name, ok ? "PASS" : "FAIL", detail) << std::endl;
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

struct SaddleCase {
    std::string name;
    double z;
    double gamma_exact;
    double gamma_tol;
    CeramiSequence seq;
    double seconds = 0;
};

bool properties_pass(const std::vector<PropertyCheck>& checks, std::string& worst) {
    bool ok = true;
    double ratio = 0;
    for (const auto& c : checks) {
        if (!c.pass) {
            ok = false;
            std::cerr << fmt::format("  failed {} on {}: worst {:.3g} > {:.3g}\n", c.property, c.subject, c.worst,
                                     c.tolerance);
        }
        if (c.tolerance > 0) ratio = std::max(ratio, c.worst / c.tolerance);
    }
    worst = fmt::format("{} checks, worst/tolerance {:.3g}", checks.size(), ratio);
    return ok;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// Runs the manifest into two directories and compares every CSV byte for byte.
bool deterministic(RunManifest m, const fs::path& base, std::string& detail) {
    std::ostringstream log;
    int codes[2];
    for (int i = 0; i < 2; ++i) {
        m.out = base / std::to_string(i);
        fs::remove_all(m.out);
        codes[i] = run(m, log);
    }
    int files = 0, differ = 0;
    for (const auto& e : fs::directory_iterator(base / "0")) {
        if (e.path().extension() != ".csv") continue;
        ++files;
        const fs::path twin = base / "1" / e.path().filename();
        if (!fs::exists(twin) || slurp(e.path()) != slurp(twin)) ++differ;
    }
    RunManifest v;
    v.mode = "verify";
    v.problem = base / "0";
    const int verify = run(v, log);
    detail += fmt::format("{}: exit {}/{}, {} csv, {} differ, verify {}; ", base.filename().string(), codes[0],
                          codes[1], files, differ, verify);
    return codes[0] == codes[1] && files > 0 && differ == 0 && verify == exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path runs = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "nsmp_acceptance";
    fs::create_directories(runs);
    const SolverConfig cfg;

    // 1 and 2 share the saddle runs.
    std::vector<SaddleCase> saddles{{"double_well", 1 / std::sqrt(2.0), 0.0, 1e-4, {}},
                                    {"kink_well", 1.0, 1.0, 1e-3, {}}};
    for (auto& s : saddles) {
        const auto t0 = Clock::now();
        s.seq = cerami_sequence(builtin_functional(s.name), hyperplane(2, 0, 0.0), v2(-s.z, 0), v2(s.z, 0), cfg);
        s.seconds = seconds_since(t0);
    }
    {
        bool ok = true;
        std::string detail;
        for (const auto& s : saddles) {
            bool case_ok = s.seq.steps.size() == cfg.epsilon_schedule.size() && s.seconds < 60.0;
            double worst_slack = 0;
            for (const auto& st : s.seq.steps) {
                const BoundLedger& L = st.ledger;
                case_ok = case_ok && L.all_ok() && L.slack() < 0.1 * L.epsilon;
                worst_slack = std::max(worst_slack, L.slack() / L.epsilon);
            }
            ok = ok && case_ok;
            detail += fmt::format("{} {} pts slack/eps {:.2g} {:.1f}s; ", s.name, s.seq.steps.size(), worst_slack,
                                  s.seconds);
        }
        report(1, "bound ledger", ok, detail);
    }
    {
        bool ok = true;
        std::string detail;
        for (const auto& s : saddles) {
            const double err = std::abs(s.seq.minimax.gamma - s.gamma_exact);
            ok = ok && err <= s.gamma_tol;
            detail += fmt::format("{} gamma {:.3g} err {:.2g}; ", s.name, s.seq.minimax.gamma, err);
        }
        report(2, "minimax value", ok, detail);
    }

    {
        std::string a, b;
        const bool ok1 = properties_pass(clarke_properties(cfg, 200), a);
        const bool ok2 = properties_pass(min_norm_properties(cfg.rng_seed, 50, 1e-3), b);
        report(3, "clarke calculus", ok1 && ok2, a + "; min-norm " + b);
    }
    {
        std::string d;
        report(4, "geodesic metric", properties_pass(geodesic_properties(cfg.rng_seed, 500), d), d);
    }
    {
        std::string d;
        report(5, "ekeland certificates", properties_pass(ekeland_properties(cfg.rng_seed, 100), d), d);
    }

    struct OrbitCase {
        double mu1;
        double T_exact;
        double T_rel;
        double energy_tol;
        double inclusion_tol;  // negative: not checked
        OrbitRun run;
        double seconds = 0;
    };
    const double pi = std::numbers::pi;
    std::vector<OrbitCase> orbits{{2.0, pi * std::sqrt(2.0), 0.01, 1e-3, -1.0, {}},
                                  {1.0, 2 * pi * std::sqrt(2.0 / 3.0), 0.02, 5e-3, 5e-3, {}}};
    {
        bool ok = true;
        std::string detail;
        for (auto& o : orbits) {
            EnergyProblem p;
            p.potential.n = 2;
            p.potential.a = 1.0;
            p.potential.mu1 = o.mu1;
            p.potential.mu2 = 0.0;
            p.h = 1.0;
            const auto t0 = Clock::now();
            bool case_ok = true;
            try {
                o.run = find_orbit(p, cfg);
            } catch (const std::exception& e) {
                std::cerr << "  orbit mu1=" << o.mu1 << ": " << e.what() << "\n";
                case_ok = false;
            }
            o.seconds = seconds_since(t0);
            const PeriodicOrbit& orb = o.run.orbit;
            const double T_err = std::abs(orb.T - o.T_exact) / o.T_exact;
            case_ok = case_ok && !orb.degenerate && T_err <= o.T_rel && orb.residual.energy_max <= o.energy_tol &&
                      o.seconds < 300.0;
            if (o.inclusion_tol > 0) case_ok = case_ok && orb.residual.inclusion_max_off_origin <= o.inclusion_tol;
            ok = ok && case_ok;
            detail += fmt::format("mu1={} T {:.5f} rel err {:.2g} energy {:.2g} inclusion {:.2g} {:.1f}s; ", o.mu1,
                                  orb.T, T_err, orb.residual.energy_max, orb.residual.inclusion_max_off_origin,
                                  o.seconds);
        }
        report(6, "hamiltonian orbits", ok, detail);
    }
    {
        std::string d;
        bool ok = properties_pass(loop_properties(cfg.rng_seed, 20), d);
        for (const auto& o : orbits) {
            const OrbitRun& r = o.run;
            const bool straddle = r.w_zero < r.problem.h && r.w_z1 > r.problem.h;
            const bool positive = r.positivity_integral >= r.positivity_bound - 1e-6;
            ok = ok && straddle && positive;
            d += fmt::format("; mu1={} W(0) {:.3g} W(z1) {:.3g} positivity {:.4g} >= {:.4g}", o.mu1, r.w_zero,
                             r.w_z1, r.positivity_integral, r.positivity_bound);
        }
        report(7, "energy level set", ok, d);
    }
    {
        const fs::path src(NSMP_SOURCE_DIR);
        std::string detail;
        RunManifest saddle;
        saddle.mode = "saddle";
        saddle.problem = src / "problems" / "double_well.txt";
        RunManifest orbit;
        orbit.mode = "orbit";
        orbit.problem = src / "problems" / "orbit_conical.txt";
        const bool ok1 = deterministic(saddle, runs / "saddle", detail);
        const bool ok2 = deterministic(orbit, runs / "orbit", detail);
        report(8, "determinism", ok1 && ok2, detail);
    }

    std::cout << (failures == 0 ? "all criteria pass" : fmt::format("{} criteria failed", failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}
