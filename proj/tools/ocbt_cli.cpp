// ocbt: command-line front end for the OCBT simulation experiments.
//
//   ocbt <ber|psd|timeeff|complexity|window|analyze> [--config FILE] [--seed S] [--out DIR] [--workers W]
//
// Exit codes: 0 success, 2 configuration error, 1 any other failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ocbt/experiment.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"OCBT multi-carrier baseband simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<unsigned> workers;

    const char* names[] = {"ber", "psd", "timeeff", "complexity", "window", "analyze"};
    const char* help[] = {"Monte Carlo BER sweep", "Welch PSD of a long frame stream", "time efficiency r_T versus N",
                          "complex multiplications per symbol", "OCBT window f_p", "SINR decomposition"};
    for (std::size_t i = 0; i < std::size(names); ++i) {
        auto* sub = app.add_subcommand(names[i], help[i]);
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--seed", seed, "master seed (overrides params.seed)");
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
        sub->add_option("--workers", workers, "worker threads, 0 = all cores");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const ocbt::ExperimentKind kind = ocbt::parse_experiment(app.get_subcommands().front()->get_name());
        ocbt::ExperimentConfig cfg =
            config_path.empty() ? ocbt::default_config(kind) : ocbt::load_config(config_path, kind);
        if (seed) cfg.params.seed = *seed;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (workers) cfg.workers = *workers;

        for (const auto& line : ocbt::run_experiment(cfg)) std::cout << line << '\n';
        return 0;
    } catch (const ocbt::ConfigError& e) {
        std::cerr << "ocbt: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ocbt::DimensionError& e) {
        std::cerr << "ocbt: invalid parameters: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ocbt::UnknownSystem& e) {
        std::cerr << "ocbt: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "ocbt: " << e.what() << '\n';
        return kExitRuntime;
    }
}
