#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsmp/cli.hpp"
#include "nsmp/io.hpp"

using namespace nsmp;
namespace fs = std::filesystem;

static fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nsmp_test_" + name);
    fs::remove_all(p);
    return p;
}

static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

TEST_CASE("key-value parsing") {
    std::istringstream in("# comment\n a = 1.5 \n\nlist = 0.1, 0.05 # trailing\nname=double_well\n");
    const KeyValues kv = KeyValues::parse(in, "mem");
    CHECK(kv.real("a") == 1.5);
    CHECK(kv.reals("list") == std::vector<double>{0.1, 0.05});
    CHECK(kv.text("name") == "double_well");
    CHECK(kv.integer("missing", 7) == 7);
    CHECK_THROWS_AS(kv.text("missing"), InputError);
    CHECK_THROWS_AS(kv.integer("a"), InputError);
    CHECK_THROWS_AS(kv.require_known({"a", "list"}), InputError);
    CHECK_NOTHROW(kv.require_known({"a", "list", "name"}));

    std::istringstream dup("a = 1\na = 2\n");
    CHECK_THROWS_AS(KeyValues::parse(dup, "dup"), InputError);
    std::istringstream bad("just words\n");
    CHECK_THROWS_AS(KeyValues::parse(bad, "bad"), InputError);
    CHECK_THROWS_AS(parse_real("1.5x", "x"), InputError);
    CHECK_THROWS_AS(parse_reals("", "x"), InputError);
}

TEST_CASE("reals round-trip through text") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(parse_real(format_real(x), "x") == x);
}

TEST_CASE("CSV write and read back") {
    const fs::path dir = scratch("csv");
    fs::create_directories(dir);
    {
        CsvWriter w(dir / "t.csv", {"a", "b"});
        w.row({1.0 / 3.0, 2.0});
        w.row(std::vector<std::string>{"x", "y"});
        CHECK_THROWS(w.row(std::vector<double>{1.0}));
    }
    const CsvTable t = read_csv(dir / "t.csv");
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.real(0, "a") == 1.0 / 3.0);
    CHECK(t.rows[1][1] == "y");
    CHECK_THROWS_AS(t.column("c"), InputError);
    fs::remove_all(dir);
}

TEST_CASE("unknown mode and bad input exit with 3") {
    std::ostringstream log;
    RunManifest m;
    m.mode = "bogus";
    m.out = scratch("bogus");
    CHECK(run(m, log) == exit_input_error);

    m.mode = "saddle";
    m.problem = "/nonexistent/problem.txt";
    CHECK(run(m, log) == exit_input_error);

    const fs::path dir = scratch("bad_problem");
    fs::create_directories(dir);
    std::ofstream(dir / "p.txt") << "functional = rosenbrock\nz0 = -1, 0\nz1 = 1, 0\n";
    m.problem = dir / "p.txt";
    m.out = dir / "out";
    CHECK(run(m, log) == exit_input_error);

    std::ofstream(dir / "q.txt") << "functional = double_well\nz0 = -1, 0\nz1 = 1, 0\nsurprise = 1\n";
    m.problem = dir / "q.txt";
    CHECK(run(m, log) == exit_input_error);

    std::ofstream(dir / "r.txt") << "n = 2\nmu1 = 2\nmu2 = 4\nh = 1\n";
    m.mode = "orbit";
    m.problem = dir / "r.txt";
    CHECK(run(m, log) == exit_input_error);

    m.mode = "saddle";
    m.problem = fs::path(NSMP_SOURCE_DIR) / "problems" / "double_well.txt";
    m.epsilon_schedule = std::vector<double>{0.05, 0.1};
    CHECK(run(m, log) == exit_input_error);

    m.mode = "verify";
    m.epsilon_schedule.reset();
    m.problem = dir;
    CHECK(run(m, log) == exit_input_error);
    fs::remove_all(dir);
}

TEST_CASE("saddle run, verify, and a tampered ledger") {
    std::ostringstream log;
    RunManifest m;
    m.mode = "saddle";
    m.problem = fs::path(NSMP_SOURCE_DIR) / "problems" / "kink_well.txt";
    m.out = scratch("saddle");
    m.epsilon_schedule = std::vector<double>{0.1, 0.05};
    REQUIRE(run(m, log) == exit_ok);
    for (const char* f : {"gamma_history.csv", "cerami.csv", "ledger.csv", "certificates.csv", "points.csv",
                          "summary.txt"})
        CHECK(fs::exists(m.out / f));
    const CsvTable cerami = read_csv(m.out / "cerami.csv");
    CHECK(cerami.header == std::vector<std::string>{"iteration", "gamma", "epsilon", "phi_value", "dist_delta_F",
                                                    "scaled_residual", "slack"});
    CHECK(cerami.rows.size() == 2);
    const CsvTable hist = read_csv(m.out / "gamma_history.csv");
    for (std::size_t i = 1; i < hist.rows.size(); ++i) CHECK(hist.real(i, "gamma") <= hist.real(i - 1, "gamma"));

    RunManifest v;
    v.mode = "verify";
    v.problem = m.out;
    CHECK(run(v, log) == exit_ok);
    const CsvTable checks = read_csv(m.out / "verify.csv");
    CHECK(checks.rows.size() >= 2 * 3 + 2 + 2);
    for (std::size_t i = 0; i < checks.rows.size(); ++i) CHECK(checks.rows[i][checks.column("match")] == "1");

    // Push one residual past its bound: the stored verdict no longer reproduces.
    std::string ledger = slurp(m.out / "ledger.csv");
    const CsvTable t = read_csv(m.out / "ledger.csv");
    const std::string old_cell = t.rows[0][t.column("residual")];
    ledger.replace(ledger.find("," + old_cell + ","), old_cell.size() + 2, ",10,");
    std::ofstream(m.out / "ledger.csv") << ledger;
    CHECK(run(v, log) == exit_bounds_violated);
    fs::remove_all(m.out);
}

TEST_CASE("flags override problem keys") {
    std::istringstream in("seed = 5\npath_nodes = 32\nepsilon_schedule = 0.2, 0.1\n");
    const KeyValues kv = KeyValues::parse(in, "mem");
    RunManifest m;
    SolverConfig cfg = solver_config(kv, m);
    CHECK(cfg.rng_seed == 5);
    CHECK(cfg.path_nodes == 32);
    m.seed = 9;
    m.nodes = 48;
    m.epsilon_schedule = std::vector<double>{0.3};
    cfg = solver_config(kv, m);
    CHECK(cfg.rng_seed == 9);
    CHECK(cfg.path_nodes == 48);
    CHECK(cfg.epsilon_schedule == std::vector<double>{0.3});
}
