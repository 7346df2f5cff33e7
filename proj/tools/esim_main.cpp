#include <iostream>

#include <CLI11.hpp>

#include "esim/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spacetime simulation of exchange quote consolidation"};
    app.set_version_flag("--version", std::string(ESIM_VERSION));
    app.require_subcommand(1);

    esim::CommandOptions opts;
    std::string config;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string convention;
    esim::EventId a = 0;
    esim::EventId b = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "Scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (overrides outputs.dir)");
        sub->add_option("--seed", seed, "Master seed (overrides the config)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Run every convention and write NBBO series");
    common(simulate);
    simulate->add_option("--convention", convention, "Only run the named convention");
    CLI::App* flip = app.add_subcommand("flip", "Find a frame that reverses two events");
    common(flip);
    flip->add_option("a", a, "First event id")->required();
    flip->add_option("b", b, "Second event id")->required();
    CLI::App* report = app.add_subcommand("report", "Latency table and timescale curves");
    common(report);
    CLI::App* races = app.add_subcommand("races", "Latency-arbitrage race detection");
    common(races);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : esim::kExitConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    opts.config_path = config;
    if (sub->count("--out")) opts.out_dir = out_dir;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub == simulate && simulate->count("--convention")) opts.convention = convention;

    if (sub == simulate) return esim::cmd_simulate(opts, std::cout, std::cerr);
    if (sub == flip) return esim::cmd_flip(opts, a, b, std::cout, std::cerr);
    if (sub == report) return esim::cmd_report(opts, std::cout, std::cerr);
    return esim::cmd_races(opts, std::cout, std::cerr);
}
