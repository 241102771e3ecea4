#include <cstdint>

#include "CLI11.hpp"

#include "gsp/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"gsp-lab: sponsored-search auction experiments"};
    gsp::RunConfig rc;
    std::uint64_t seed = 0;
    long trials = 0;
    app.add_option("command", rc.command,
                   "sweep | frontier | dominance | replay | verify | condcheck")
        ->required();
    app.add_option("--config", rc.config_path, "experiment config (JSON)")->required();
    CLI::Option* seed_opt = app.add_option("--seed", seed, "seed override");
    CLI::Option* trials_opt = app.add_option("--trials", trials, "trial-count override");
    app.add_option("--out", rc.output_dir, "output directory (default: .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (seed_opt->count() > 0) {
        rc.seed_override = seed;
    }
    if (trials_opt->count() > 0) {
        rc.trials_override = trials;
    }
    return gsp::run(rc);
}
