#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "erasim/runner.hpp"
#include "erasim/selftest.hpp"

namespace {

// exit codes: 0 ok, 1 usage, 2 invalid config, 3 numerical failure
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string default_output_dir() {
    if (const char* env = std::getenv("ERASIM_OUTPUT_DIR")) return env;
    return ".";
}

int cmd_run(const std::string& config_path, const std::string& output_override, int threads) {
    erasim::ExperimentConfig config;
    try {
        config = erasim::ExperimentConfig::from_file(config_path);
    } catch (const erasim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    if (!output_override.empty()) config.output_dir = output_override;
    if (config.output_dir.empty()) config.output_dir = default_output_dir();
    if (threads > 0) config.threads = threads;

    try {
        const erasim::ResultBundle bundle = erasim::run_experiment(config);
        const std::string path = erasim::write_bundle(bundle, config.output_dir);
        std::cout << "wrote " << path << "\n";
        return 0;
    } catch (const erasim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const erasim::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_report(const std::string& bundle_path) {
    try {
        const erasim::ResultBundle bundle = erasim::ResultBundle::load(bundle_path);
        return erasim::report_bundle(bundle, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "report error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"erasim: biased-erasure bosonic qubit simulation toolkit"};
    app.require_subcommand(1);

    std::string config_path, bundle_path, output_dir;
    int threads = 0;

    auto* run = app.add_subcommand("run", "run an experiment described by a config file");
    run->add_option("config", config_path, "JSON experiment config")->required();
    run->add_option("-o,--output", output_dir, "output directory (overrides config)");
    run->add_option("--threads", threads, "cap on worker threads");

    auto* report = app.add_subcommand("report", "summarize a result bundle");
    report->add_option("bundle", bundle_path, "path to bundle.json")->required();

    auto* schema = app.add_subcommand("schema", "print the config schema");
    auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, output_dir, threads);
    if (report->parsed()) return cmd_report(bundle_path);
    if (schema->parsed()) {
        std::cout << erasim::config_schema() << "\n";
        return 0;
    }
    if (selftest->parsed()) {
        const int failures = erasim::run_acceptance_suite(std::cout);
        return failures == 0 ? 0 : 1;
    }
    return 1;
}
