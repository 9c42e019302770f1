// Command-line front end: run, check-data, convergence, plot.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "elastoblow/io/commands.hpp"
#include "elastoblow/parallel.hpp"

int main(int argc, char** argv) {
    using namespace elastoblow;
    CLI::App app{"elastoblow: compressible elastodynamics and viscoelastic blowup diagnostics"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = ".";

    auto* run = app.add_subcommand("run", "simulate and write series.csv, final.ckpt, summary.txt");
    run->add_option("config", config, "configuration file")->required();
    run->add_option("-o,--output-dir", out_dir, "output directory");

    auto* check = app.add_subcommand("check-data", "evaluate the initial-data conditions");
    check->add_option("config", config, "configuration file")->required();
    check->add_option("-o,--output-dir", out_dir, "output directory for hypotheses.json");

    auto* conv = app.add_subcommand("convergence", "refinement study at three resolutions");
    conv->add_option("config", config, "configuration file")->required();

    auto* plot = app.add_subcommand("plot", "write a gnuplot script for series.csv");
    plot->add_option("config", config, "configuration file")->required();
    plot->add_option("-o,--output-dir", out_dir, "directory holding series.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : io::kExitConfigError;
    }

    configure_threads();
    if (*run) return io::cmd_run(config, out_dir, std::cout, std::cerr);
    if (*check) return io::cmd_check_data(config, out_dir, std::cout, std::cerr);
    if (*conv) return io::cmd_convergence(config, std::cout, std::cerr);
    return io::cmd_plot(config, out_dir, std::cout, std::cerr);
}
