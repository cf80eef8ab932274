#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "degensolve/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"degensolve: degenerate quasilinear Dirichlet solver and condition checker"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    bool have_out = false, have_seed = false, have_threads = false;

    app.add_option("--config", config_path, "run configuration (TOML or JSON)");
    app.add_option("--out", out_dir, "output directory (overrides config)")->each([&](const std::string&) {
        have_out = true;
    });
    app.add_option("--seed", seed, "run seed (overrides config)")->each([&](const std::string&) {
        have_seed = true;
    });
    app.add_option("--threads", threads, "worker threads (overrides config)")->each([&](const std::string&) {
        have_threads = true;
    });

    const std::map<std::string, degensolve::Command> commands = {
        {"solve", degensolve::Command::solve},
        {"check-conditions", degensolve::Command::check_conditions},
        {"oracle", degensolve::Command::oracle},
        {"barrier", degensolve::Command::barrier},
        {"convergence", degensolve::Command::convergence},
        {"report", degensolve::Command::report},
    };
    for (const auto& [name, _] : commands)
        app.add_subcommand(name, "run the '" + name + "' command from the config");

    CLI11_PARSE(app, argc, argv);

    try {
        if (config_path.empty()) throw degensolve::ConfigError("--config is required");
        degensolve::RunConfig cfg = degensolve::parse_config(config_path);
        for (const auto* sub : app.get_subcommands()) cfg.command = commands.at(sub->get_name());
        if (have_out) cfg.out_dir = out_dir;
        if (have_seed) cfg.seed = seed;
        if (have_threads) cfg.threads = threads;
        if (const char* env = std::getenv("DEGENSOLVE_THREADS")) cfg.threads = std::max(1, std::atoi(env));

        const degensolve::RunResult result = degensolve::execute_run(cfg);
        degensolve::emit_report(result, cfg.out_dir);
        std::cout << (result.all_hold ? "ok" : "CHECK FAILED") << ": outputs in " << cfg.out_dir.string()
                  << "\n";
        return result.exit_code();
    } catch (const degensolve::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
