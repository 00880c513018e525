#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nsmp/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Nonsmooth mountain-pass solver: saddle points, periodic orbits, certificate checks."};
    nsmp::RunManifest m;
    std::string problem, out, schedule;
    std::uint64_t seed = 0;
    int grid = 0, nodes = 0;
    app.add_option("--mode", m.mode, "saddle | orbit | verify | properties")->required();
    app.add_option("--problem", problem, "problem file (verify: run directory)");
    app.add_option("--out", out, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
    auto* sched_opt = app.add_option("--epsilon-schedule", schedule, "comma-separated decreasing epsilons");
    auto* grid_opt = app.add_option("--grid", grid, "loop grid size (orbit)")->check(CLI::PositiveNumber);
    auto* nodes_opt = app.add_option("--nodes", nodes, "path intervals")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nsmp::exit_input_error;
    }
    m.problem = problem;
    m.out = out;
    if (*seed_opt) m.seed = seed;
    if (*grid_opt) m.grid = grid;
    if (*nodes_opt) m.nodes = nodes;
    if (*sched_opt) {
        try {
            m.epsilon_schedule = nsmp::parse_reals(schedule, "--epsilon-schedule");
        } catch (const nsmp::InputError& e) {
            std::cerr << "input error: " << e.what() << '\n';
            return nsmp::exit_input_error;
        }
    }
    if (m.problem.empty() && (m.mode == "saddle" || m.mode == "orbit" || m.mode == "verify")) {
        std::cerr << "input error: --problem is required for mode " << m.mode << '\n';
        return nsmp::exit_input_error;
    }
    return nsmp::run(m, std::cerr);
}
