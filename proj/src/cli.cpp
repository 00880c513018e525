#include "nsmp/cli.hpp"

#include <cmath>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "nsmp/builtins.hpp"
#include "nsmp/hamiltonian.hpp"
#include "nsmp/mountainpass.hpp"
#include "nsmp/properties.hpp"

namespace nsmp {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSolverKeys{"seed",          "sampling_radius",    "sample_count",
                                           "quadrature_points", "path_nodes",     "epsilon_schedule",
                                           "minimax_iterations", "minimax_patience", "ekeland_budget"};

std::vector<std::string> with_solver_keys(std::vector<std::string> keys) {
    keys.insert(keys.end(), kSolverKeys.begin(), kSolverKeys.end());
    return keys;
}

Vector parse_point(const KeyValues& kv, const std::string& key) {
    const std::vector<double> v = kv.reals(key);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string flag(bool b) { return b ? "1" : "0"; }

void prepare_out(const fs::path& out) {
    if (out.empty()) throw InputError("an output directory is required (--out)");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw InputError(fmt::format("cannot create output directory '{}'", out.string()));
}

// Artifacts shared by saddle and orbit runs.
void write_sequence(const fs::path& out, const CeramiSequence& seq) {
    {
        CsvWriter w(out / "gamma_history.csv", {"iteration", "gamma"});
        for (const auto& [it, g] : seq.minimax.history) w.row({static_cast<double>(it), g});
    }
    CsvWriter cerami(out / "cerami.csv",
                     {"iteration", "gamma", "epsilon", "phi_value", "dist_delta_F", "scaled_residual", "slack"});
    CsvWriter ledger(out / "ledger.csv",
                     {"iteration", "gamma", "epsilon", "residual", "residual_bound", "distance", "distance_bound",
                      "level", "level_lower", "level_upper", "slack_quadrature", "slack_sampling",
                      "slack_discretization", "residual_ok", "distance_ok", "level_ok"});
    CsvWriter certs(out / "certificates.csv",
                    {"iteration", "epsilon", "lambda", "slack", "start_value", "result_value",
                     "start_result_distance", "steps", "terminated", "witnesses_checked", "max_violation",
                     "fresh_witnesses", "clause1_margin", "clause2_margin", "clause3_margin", "clauses_ok"});
    for (std::size_t i = 0; i < seq.steps.size(); ++i) {
        const CeramiStepResult& s = seq.steps[i];
        const BoundLedger& L = s.ledger;
        const double it = static_cast<double>(i);
        cerami.row({it, L.gamma, s.point.epsilon, s.point.phi_value, s.point.dist_delta_F, s.point.scaled_residual,
                    L.slack()});
        ledger.row(std::vector<std::string>{
            format_real(it), format_real(L.gamma), format_real(L.epsilon), format_real(L.residual),
            format_real(L.residual_bound), format_real(L.distance), format_real(L.distance_bound),
            format_real(L.level), format_real(L.level_lower), format_real(L.level_upper),
            format_real(L.slack_quadrature), format_real(L.slack_sampling), format_real(L.slack_discretization),
            flag(L.residual_ok()), flag(L.distance_ok()), flag(L.level_ok())});
        const auto& c = s.certificate;
        const auto& r = s.fresh_check;
        certs.row(std::vector<std::string>{
            format_real(it), format_real(c.epsilon), format_real(c.lambda), format_real(c.slack),
            format_real(c.start_value), format_real(c.result_value), format_real(c.start_result_distance),
            std::to_string(c.steps), flag(c.terminated), std::to_string(c.witnesses_checked),
            format_real(c.max_violation), std::to_string(r.witnesses), format_real(r.clauses[0].worst_margin),
            format_real(r.clauses[1].worst_margin), format_real(r.clauses[2].worst_margin), flag(r.all_hold())});
    }
}

bool certificates_hold(const CeramiSequence& seq) {
    for (const auto& s : seq.steps)
        if (!s.fresh_check.all_hold()) return false;
    return true;
}

void record_sequence(KeyValues& summary, const CeramiSequence& seq) {
    summary.set("gamma", seq.minimax.gamma);
    summary.set("minimax_iterations_run", std::to_string(seq.minimax.iterations));
    summary.set("minimax_stagnant", flag(seq.minimax.stagnant));
    summary.set("mountain_geometry", flag(seq.minimax.mountain_geometry));
    summary.set("epsilon_bound", seq.epsilon_bound);
    std::vector<std::string> sched;
    for (double e : seq.schedule) sched.push_back(format_real(e));
    summary.set("schedule_used", fmt::format("{}", fmt::join(sched, ", ")));
    summary.set("warnings", fmt::format("{}", fmt::join(seq.warnings, "; ")));
    summary.set("tail_diameter", seq.tail_diameter);
    const char* verdicts[] = {"holds", "violated", "not_applicable"};
    summary.set("separation", verdicts[static_cast<int>(seq.separation.verdict)]);
}

int run_saddle(const RunManifest& m, std::ostream& log) {
    const KeyValues kv = KeyValues::load(m.problem);
    kv.require_known(with_solver_keys({"functional", "z0", "z1", "set_axis", "set_offset", "level_tol"}));
    const SolverConfig cfg = solver_config(kv, m);
    Functional f;
    try {
        f = builtin_functional(kv.text("functional"), 2, cfg.tol("kink_radius"));
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    const Vector z0 = parse_point(kv, "z0"), z1 = parse_point(kv, "z1");
    if (z0.size() != f.dim || z1.size() != f.dim)
        throw InputError(fmt::format("z0 and z1 must have {} coordinates for {}", f.dim, f.name));
    const int axis = kv.integer("set_axis", 0);
    if (axis < 0 || axis >= f.dim) throw InputError(fmt::format("set_axis {} out of range", axis));
    const ClosedSetOracle F = hyperplane(f.dim, axis, kv.real("set_offset", 0.0));

    MountainPassOptions opt;
    opt.geodesic.quadrature_points = cfg.quadrature_points;
    opt.geodesic.rng_seed = cfg.rng_seed;
    opt.level_tol = kv.real("level_tol", opt.level_tol);
    prepare_out(m.out);

    const CeramiSequence seq = cerami_sequence(f, F, z0, z1, cfg, opt);
    write_sequence(m.out, seq);
    {
        std::vector<std::string> header{"iteration", "epsilon"};
        for (int i = 0; i < f.dim; ++i) header.push_back(fmt::format("x{}", i + 1));
        CsvWriter w(m.out / "points.csv", header);
        for (std::size_t i = 0; i < seq.steps.size(); ++i) {
            std::vector<double> row{static_cast<double>(i), seq.steps[i].point.epsilon};
            for (int j = 0; j < f.dim; ++j) row.push_back(seq.steps[i].point.x[j]);
            w.row(row);
        }
    }
    const bool bounds = seq.all_bounds_hold();
    const bool certs = certificates_hold(seq);
    KeyValues summary;
    summary.set("mode", std::string("saddle"));
    summary.set("functional", f.name);
    summary.set("set", F.name);
    record_sequence(summary, seq);
    summary.set("bounds_hold", flag(bounds));
    summary.set("certificates_hold", flag(certs));
    summary.write(m.out / "summary.txt");

    fmt::print(log, "saddle {}: gamma = {:.6g}, {} Cerami points, bounds {}, certificates {}\n", f.name,
               seq.minimax.gamma, seq.steps.size(), bounds ? "hold" : "VIOLATED", certs ? "hold" : "VIOLATED");
    for (const auto& w : seq.warnings) fmt::print(log, "warning: {}\n", w);
    return bounds && certs ? exit_ok : exit_bounds_violated;
}

EnergyProblem energy_problem(const KeyValues& kv) {
    EnergyProblem prob;
    prob.potential.n = kv.integer("n", 2);
    prob.potential.a = kv.real("a", 1.0);
    prob.potential.mu1 = kv.real("mu1", 2.0);
    prob.potential.mu2 = kv.real("mu2", 0.0);
    prob.h = kv.real("h", 1.0);
    return prob;
}

int run_orbit(const RunManifest& m, std::ostream& log) {
    const KeyValues kv = KeyValues::load(m.problem);
    kv.require_known(with_solver_keys({"n", "a", "mu1", "mu2", "h", "grid"}));
    const SolverConfig cfg = solver_config(kv, m);
    const EnergyProblem prob = energy_problem(kv);
    prob.validate();
    OrbitOptions opt;
    opt.grid = m.grid.value_or(kv.integer("grid", opt.grid));
    if (opt.grid < 4 || opt.grid % 2 != 0) throw InputError(fmt::format("grid {} must be even and >= 4", opt.grid));
    prepare_out(m.out);

    const OrbitRun r = find_orbit(prob, cfg, opt);
    write_sequence(m.out, r.sequence);
    const int n = prob.potential.n;
    {
        std::vector<std::string> header{"t"};
        for (int i = 0; i < n; ++i) header.push_back(fmt::format("q{}", i + 1));
        for (int i = 0; i < n; ++i) header.push_back(fmt::format("qdot{}", i + 1));
        header.push_back("energy_residual");
        header.push_back("inclusion_residual");
        CsvWriter w(m.out / "orbit.csv", header);
        const PeriodicOrbit& o = r.orbit;
        for (std::size_t j = 0; j < o.t.size(); ++j) {
            std::vector<double> row{o.t[j]};
            for (int i = 0; i < n; ++i) row.push_back(o.q[j][i]);
            for (int i = 0; i < n; ++i) row.push_back(o.qdot[j][i]);
            const bool have = j < o.residual.energy.size();
            row.push_back(have ? o.residual.energy[j] : std::nan(""));
            row.push_back(have ? o.residual.inclusion[j] : std::nan(""));
            w.row(row);
        }
    }
    {
        CsvWriter w(m.out / "boundedness.csv", {"epsilon", "norm_E", "inner", "coefficient"});
        for (const auto& b : r.boundedness) w.row({b.epsilon, b.norm_E, b.inner, b.coefficient});
    }
    const bool bounds = r.sequence.all_bounds_hold();
    const bool certs = certificates_hold(r.sequence);
    const bool positivity = r.positivity_integral >= r.positivity_bound - 1e-6;
    KeyValues summary;
    summary.set("mode", std::string("orbit"));
    summary.set("n", std::to_string(n));
    summary.set("a", prob.potential.a);
    summary.set("mu1", prob.potential.mu1);
    summary.set("mu2", prob.potential.mu2);
    summary.set("h", prob.h);
    summary.set("grid", std::to_string(opt.grid));
    record_sequence(summary, r.sequence);
    summary.set("T", r.orbit.T);
    summary.set("R", r.R);
    summary.set("w_zero", r.w_zero);
    summary.set("w_z1", r.w_z1);
    summary.set("projection_scale", r.projection_scale);
    summary.set("positivity_integral", r.positivity_integral);
    summary.set("positivity_bound", r.positivity_bound);
    summary.set("positivity_holds", flag(positivity));
    summary.set("energy_residual_max", r.orbit.residual.energy_max);
    summary.set("energy_residual_mean", r.orbit.residual.energy_mean);
    summary.set("inclusion_residual_max", r.orbit.residual.inclusion_max);
    summary.set("inclusion_residual_max_off_origin", r.orbit.residual.inclusion_max_off_origin);
    summary.set("degenerate", flag(r.orbit.degenerate));
    summary.set("converged", flag(r.orbit.converged));
    summary.set("bounds_hold", flag(bounds));
    summary.set("certificates_hold", flag(certs));
    summary.write(m.out / "summary.txt");

    fmt::print(log, "orbit mu1={} h={}: T = {:.6f}, max energy residual {:.3e}, bounds {}, certificates {}{}\n",
               prob.potential.mu1, prob.h, r.orbit.T, r.orbit.residual.energy_max, bounds ? "hold" : "VIOLATED",
               certs ? "hold" : "VIOLATED", r.orbit.converged ? "" : " (unconverged)");
    return bounds && certs && positivity && r.orbit.converged ? exit_ok : exit_bounds_violated;
}

struct VerifyLog {
    CsvWriter csv;
    bool all_match = true;
    bool all_hold = true;

    void check(const std::string& file, std::size_t row, const std::string& what, const std::string& stored,
               bool recomputed) {
        const std::string rec = flag(recomputed);
        const bool match = stored == rec;
        all_match = all_match && match;
        all_hold = all_hold && recomputed;
        csv.row(std::vector<std::string>{file, std::to_string(row), what, stored, rec, flag(match)});
    }
};

int run_verify(const RunManifest& m, std::ostream& log) {
    const fs::path dir = m.problem;
    if (!fs::is_directory(dir)) throw InputError(fmt::format("verify expects a run directory, got '{}'", dir.string()));
    const KeyValues summary = KeyValues::load(dir / "summary.txt");
    const std::string mode = summary.text("mode");
    if (mode != "saddle" && mode != "orbit") throw InputError(fmt::format("cannot verify a '{}' run", mode));
    const CsvTable ledger = read_csv(dir / "ledger.csv");
    const CsvTable certs = read_csv(dir / "certificates.csv");
    const fs::path out = m.out.empty() ? dir : m.out;
    prepare_out(out);

    VerifyLog v{CsvWriter(out / "verify.csv", {"file", "row", "check", "stored", "recomputed", "match"})};
    bool ledger_ok = !ledger.rows.empty();
    for (std::size_t i = 0; i < ledger.rows.size(); ++i) {
        BoundLedger L;
        L.residual = ledger.real(i, "residual");
        L.residual_bound = ledger.real(i, "residual_bound");
        L.distance = ledger.real(i, "distance");
        L.distance_bound = ledger.real(i, "distance_bound");
        L.level = ledger.real(i, "level");
        L.level_lower = ledger.real(i, "level_lower");
        L.level_upper = ledger.real(i, "level_upper");
        L.slack_quadrature = ledger.real(i, "slack_quadrature");
        L.slack_sampling = ledger.real(i, "slack_sampling");
        L.slack_discretization = ledger.real(i, "slack_discretization");
        const auto& row = ledger.rows[i];
        v.check("ledger.csv", i, "residual_ok", row[ledger.column("residual_ok")], L.residual_ok());
        v.check("ledger.csv", i, "distance_ok", row[ledger.column("distance_ok")], L.distance_ok());
        v.check("ledger.csv", i, "level_ok", row[ledger.column("level_ok")], L.level_ok());
        ledger_ok = ledger_ok && L.all_ok();
    }
    bool certs_ok = true;
    for (std::size_t i = 0; i < certs.rows.size(); ++i) {
        const double slack = certs.real(i, "slack");
        bool ok = true;
        for (const char* c : {"clause1_margin", "clause2_margin", "clause3_margin"})
            ok = ok && certs.real(i, c) >= -slack;
        v.check("certificates.csv", i, "clauses_ok", certs.rows[i][certs.column("clauses_ok")], ok);
        certs_ok = certs_ok && ok;
    }
    v.check("summary.txt", 0, "bounds_hold", summary.text("bounds_hold"), ledger_ok);
    v.check("summary.txt", 0, "certificates_hold", summary.text("certificates_hold"), certs_ok);

    if (mode == "orbit") {
        PotentialSpec pot;
        pot.n = summary.integer("n");
        pot.a = summary.real("a");
        pot.mu1 = summary.real("mu1");
        pot.mu2 = summary.real("mu2");
        const double h = summary.real("h");
        const CsvTable orbit = read_csv(dir / "orbit.csv");
        bool energy_match = !orbit.rows.empty();
        for (std::size_t j = 0; j < orbit.rows.size(); ++j) {
            Vector q(pot.n), qd(pot.n);
            for (int i = 0; i < pot.n; ++i) {
                q[i] = orbit.real(j, fmt::format("q{}", i + 1));
                qd[i] = orbit.real(j, fmt::format("qdot{}", i + 1));
            }
            const double e = std::abs(0.5 * qd.squaredNorm() + pot.value(q) - h);
            energy_match = energy_match && e == orbit.real(j, "energy_residual");
        }
        v.check("orbit.csv", 0, "energy_residual_reproduced", "1", energy_match);
        v.check("summary.txt", 0, "positivity_holds", summary.text("positivity_holds"),
                summary.real("positivity_integral") >= summary.real("positivity_bound") - 1e-6);
    }

    fmt::print(log, "verify {}: verdicts {}, bounds {}\n", dir.string(), v.all_match ? "reproduced" : "MISMATCH",
               v.all_hold ? "hold" : "VIOLATED");
    return v.all_match && v.all_hold ? exit_ok : exit_bounds_violated;
}

int run_properties(const RunManifest& m, std::ostream& log) {
    KeyValues kv;
    if (!m.problem.empty()) {
        kv = KeyValues::load(m.problem);
        kv.require_known(kSolverKeys);
    }
    const SolverConfig cfg = solver_config(kv, m);
    prepare_out(m.out);
    const std::vector<PropertyCheck> checks = all_properties(cfg);
    CsvWriter w(m.out / "properties.csv", {"property", "subject", "samples", "worst", "tolerance", "pass"});
    bool ok = true;
    for (const auto& c : checks) {
        w.row(std::vector<std::string>{c.property, c.subject, std::to_string(c.samples), format_real(c.worst),
                                       format_real(c.tolerance), flag(c.pass)});
        ok = ok && c.pass;
        fmt::print(log, "{} {} / {}: worst {:.3e} (tol {:.1e})\n", c.pass ? "PASS" : "FAIL", c.property, c.subject,
                   c.worst, c.tolerance);
    }
    return ok ? exit_ok : exit_bounds_violated;
}

}  // namespace

SolverConfig solver_config(const KeyValues& kv, const RunManifest& m) {
    SolverConfig cfg;
    if (kv.has("seed")) {
        const std::string& s = kv.text("seed");
        char* end = nullptr;
        cfg.rng_seed = std::strtoull(s.c_str(), &end, 10);
        if (s.empty() || *end != '\0') throw InputError(fmt::format("seed: '{}' is not an unsigned integer", s));
    }
    cfg.sampling_radius = kv.real("sampling_radius", cfg.sampling_radius);
    cfg.sample_count = kv.integer("sample_count", cfg.sample_count);
    cfg.quadrature_points = kv.integer("quadrature_points", cfg.quadrature_points);
    cfg.path_nodes = kv.integer("path_nodes", cfg.path_nodes);
    if (kv.has("epsilon_schedule")) cfg.epsilon_schedule = kv.reals("epsilon_schedule");
    cfg.minimax_iterations = kv.integer("minimax_iterations", cfg.minimax_iterations);
    cfg.minimax_patience = kv.integer("minimax_patience", cfg.minimax_patience);
    cfg.ekeland_budget = kv.integer("ekeland_budget", cfg.ekeland_budget);
    if (m.seed) cfg.rng_seed = *m.seed;
    if (m.epsilon_schedule) cfg.epsilon_schedule = *m.epsilon_schedule;
    if (m.nodes) cfg.path_nodes = *m.nodes;
    try {
        cfg.validate();
    } catch (const ContractViolation& e) {
        throw InputError(e.what());
    }
    return cfg;
}

int run(const RunManifest& m, std::ostream& log) {
    try {
        if (m.mode == "saddle") return run_saddle(m, log);
        if (m.mode == "orbit") return run_orbit(m, log);
        if (m.mode == "verify") return run_verify(m, log);
        if (m.mode == "properties") return run_properties(m, log);
        throw InputError(fmt::format("unknown mode '{}' (expected saddle, orbit, verify or properties)", m.mode));
    } catch (const InputError& e) {
        fmt::print(log, "input error: {}\n", e.what());
    } catch (const ContractViolation& e) {
        fmt::print(log, "input error: {}\n", e.what());
    } catch (const TrimmingError& e) {
        fmt::print(log, "input error: {}\n", e.what());
    } catch (const std::exception& e) {
        fmt::print(log, "error: {}\n", e.what());
        return exit_bounds_violated;
    }
    return exit_input_error;
}

}  // namespace nsmp
