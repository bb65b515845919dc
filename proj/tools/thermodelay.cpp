/// @file thermodelay.cpp
/// @brief Command-line entry point.

#include "thermodelay/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Delayed thermoelastic bar with Kelvin-Voigt damping: certify, simulate, sweep, spectrum"};
    std::string command, config_path, out_dir;
    std::vector<std::string> overrides;
    app.add_option("command", command, "certify | simulate | sweep | spectrum")
        ->required()
        ->check(CLI::IsMember({"certify", "simulate", "sweep", "spectrum"}));
    app.add_option("--config", config_path, "configuration file (key = value with [sections])")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--override", overrides, "section.key=value, repeatable")->allow_extra_args(false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : thermodelay::kExitUsage;
    }

    thermodelay::Config cfg;
    try {
        cfg = thermodelay::Config::load(config_path);
        for (const auto& o : overrides) cfg.apply_override(o);
    } catch (const thermodelay::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return thermodelay::kExitUsage;
    }
    return thermodelay::run_command(command, cfg, out_dir, std::cout);
}
