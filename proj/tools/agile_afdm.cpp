// agile-afdm - experiment runner
#include "agile_afdm/harness/config.hpp"
#include "agile_afdm/harness/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace agile_afdm::harness;

int main(int argc, char** argv) {
    CLI::App app{"Agile-AFDM experiment runner"};
    app.set_version_flag("--version", AGILE_AFDM_VERSION);
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "run an experiment");
    run->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
    run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    auto* out_opt = run->add_option("--out", out_path, "output directory (overrides config)");
    run->add_flag("--quiet", quiet, "no progress on stderr");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a config file");
    validate->add_option("--config", validate_path, "JSON config file")->required();

    std::string kind;
    auto* defaults = app.add_subcommand("defaults", "print the default config of an experiment");
    defaults->add_option("--experiment", kind, "papr | sir | crlb | sensitivity")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ExperimentConfig cfg = load_config(config_path);
            if (*seed_opt) cfg.seed = seed;
            if (*out_opt) cfg.output = out_path;
            const auto summary = run_experiment(cfg, {workers, !quiet});
            std::cout << summary.dump(2) << '\n';
        } else if (*validate) {
            const ExperimentConfig cfg = load_config(validate_path);
            std::cout << "ok: " << to_string(cfg.kind) << " experiment\n";
        } else if (*defaults) {
            std::cout << to_json(default_config(parse_kind(kind))).dump(2) << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
