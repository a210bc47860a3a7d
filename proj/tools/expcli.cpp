#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "hybell/runner.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& experiment,
                const std::vector<std::string>& overrides, const std::string& out_dir,
                bool validate_only) {
    using namespace hybell;
    ExperimentConfig config;
    if (!config_path.empty()) {
        config = parse_config_file(config_path);
        if (config.experiment.empty())
            throw ConfigError("config file does not name an experiment");
        // Fill unset keys from the experiment defaults.
        ExperimentConfig base = default_config(config.experiment);
        for (const auto& [key, value] : config.values) base.values[key] = value;
        base.experiment = config.experiment;
        config = base;
    } else if (!experiment.empty()) {
        config = default_config(experiment);
    } else {
        throw ConfigError("either --config or --experiment is required");
    }
    for (const auto& ov : overrides) apply_override(config, ov);
    validate_config(config);
    if (validate_only) {
        std::cout << "ok: " << config.experiment << "\n";
        return 0;
    }
    const ExperimentOutput output = run_experiment(config);
    write_output(output, config, out_dir);
    std::cout << config.experiment << ": " << output.table.rows() << " rows -> "
              << out_dir << "\n";
    if (!output.extras.empty()) std::cout << output.extras.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid qubit-boson Bell experiment runner"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list", "list the experiment catalog");
    bool list_json = false;
    list_cmd->add_flag("--json", list_json, "machine-readable catalog");

    std::string config_path, experiment, out_dir;
    std::vector<std::string> overrides;
    const char* env_out = std::getenv("HYBELL_OUT_DIR");
    out_dir = env_out ? env_out : "results";

    auto* run_cmd = app.add_subcommand("run", "run one experiment");
    run_cmd->add_option("--config", config_path, "config file (TOML-style)");
    run_cmd->add_option("--experiment", experiment, "experiment name (built-in defaults)");
    run_cmd->add_option("--set", overrides, "override: section.key=value");
    run_cmd->add_option("--out", out_dir, "output directory");

    auto* validate_cmd = app.add_subcommand("validate", "validate a config file");
    validate_cmd->add_option("--config", config_path, "config file")->required();
    validate_cmd->add_option("--set", overrides, "override: section.key=value");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            if (list_json) {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& e : hybell::experiment_catalog())
                    j.push_back({{"name", e.name},
                                 {"figure", e.figure},
                                 {"description", e.description},
                                 {"default_config", e.default_config}});
                std::cout << j.dump(2) << "\n";
            } else {
                for (const auto& e : hybell::experiment_catalog())
                    std::cout << e.name << "  [" << e.figure << "]  " << e.description
                              << "  (" << e.default_config << ")\n";
            }
            return 0;
        }
        return run_command(config_path, experiment, overrides, out_dir,
                           validate_cmd->parsed());
    } catch (const hybell::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
}
