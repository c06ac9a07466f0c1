#include "commands.hpp"
#include "config.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

using namespace optokerr::cli;

int main(int argc, char** argv) {
    CLI::App app{"Steady states, stability, probe response and mean-field dynamics of a two-tone driven "
                 "optomechanical cavity with cross-Kerr coupling."};
    app.require_subcommand(1);
    app.set_version_flag("--version", "0.1.0");

    std::string config_path;
    std::string out_dir;
    std::string format;
    for (const char* name : {"roots", "spectrum", "sweep", "settle"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
        sub->add_option("--format", format, "csv or json (overrides [output] format)")
            ->check(CLI::IsMember({"csv", "json"}));
    }
    app.get_subcommand("roots")->description("list steady states with their stability");
    app.get_subcommand("spectrum")->description("probe transmission spectrum and zero-absorption point");
    app.get_subcommand("sweep")->description("power sweep, cross-Kerr shift scan, robustness or phonon curve");
    app.get_subcommand("settle")->description("integrate the mean-field equations to a steady state");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (!out_dir.empty())
            cfg.out_dir = out_dir;
        if (!format.empty())
            cfg.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;

        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "roots")
            return run_roots(cfg, std::cout);
        if (cmd == "spectrum")
            return run_spectrum(cfg, std::cout);
        if (cmd == "sweep")
            return run_sweep(cfg, std::cout);
        return run_settle(cfg, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CommandError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}
