#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "lcoc/commands.hpp"
#include "lcoc/config.hpp"
#include "lcoc/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stochastic optimal control of two competing languages"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> workers;

    for (std::string_view name : lcoc::kCommands) {
        CLI::App* sub = app.add_subcommand(std::string(name));
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--seed", seed, "Override run.seed");
        sub->add_option("--out", out, "Override run.output");
        sub->add_option("--workers", workers, "Override run.workers (0 = all cores)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        lcoc::RunConfig config = lcoc::load_config(config_path);
        for (const auto& w : config.warnings) std::cerr << "warning: " << w << '\n';
        if (seed) config.seed = *seed;
        if (out) config.output = *out;
        if (workers) {
            if (*workers < 0) throw lcoc::ValidationError("--workers: must be >= 0");
            config.workers = *workers;
        }
        return static_cast<int>(lcoc::run_command(command, config, std::cout));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
