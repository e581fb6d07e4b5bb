#include "mildito/cli/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace mildito::cli;

    CLI::App app{"Numerical checks for mild Ito processes"};
    std::string suite = "all";
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> paths;
    std::optional<int> workers;
    std::optional<std::string> out;

    app.add_option("suite", suite, "gamma, nemytskii, simulate, ito, dynkin, weak or all")
        ->required()
        ->check(CLI::IsMember(kSuites));
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed");
    app.add_option("--paths", paths, "Monte Carlo paths");
    app.add_option("--workers", workers, "worker threads (results do not depend on it)");
    app.add_option("--out", out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kBadInput;
    }

    ExperimentConfig config;
    try {
        if (!config_path.empty()) config = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    }
    config.suite = suite;
    if (seed) config.seed = *seed;
    if (paths) config.paths = *paths;
    if (workers) config.workers = *workers;
    if (out) config.out = *out;

    const RunResult result = run(config, std::cerr);
    std::cout << "exit " << result.exit_code << ": " << result.rows.size() << " checks, report in " << config.out
              << "/report.csv\n";
    return result.exit_code;
}
