#ifndef HYBELL_RUNNER_HPP
#define HYBELL_RUNNER_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hybell/disorder.hpp"

namespace hybell {

inline constexpr const char* kVersion = "0.1.0";

using ConfigValue = std::variant<double, std::string, std::vector<double>>;

// Flat key/value view of a TOML-style config: "[section]\nkey = value" maps
// to "section.key". Values are numbers, quoted strings, or number lists.
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, ConfigValue> values;

    bool has(const std::string& key) const { return values.count(key) > 0; }
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    int integer_or(const std::string& key, int fallback) const;
    std::string text_or(const std::string& key, const std::string& fallback) const;
    std::vector<double> list_or(const std::string& key,
                                std::vector<double> fallback) const;

    nlohmann::json echo() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// "section.key=value" with the same value grammar as config files.
void apply_override(ExperimentConfig& config, const std::string& assignment);

// Column-oriented result table; all cells numeric so that CSV round-trips
// are bit-exact with %.17g formatting.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // data[c][row]

    std::size_t rows() const { return data.empty() ? 0 : data[0].size(); }
    void add_row(const std::vector<double>& row);
    void write_csv(const std::filesystem::path& path) const;
    static ResultTable read_csv(const std::filesystem::path& path);
};

struct ExperimentOutput {
    ResultTable table;
    nlohmann::json extras;          // fits, detected times, summary values
    nlohmann::json column_schema;   // name -> description
};

struct ExperimentInfo {
    std::string name;
    std::string figure;       // which figure of the study it reproduces
    std::string description;
    std::string default_config;  // relative path of the shipped config
};

const std::vector<ExperimentInfo>& experiment_catalog();

// Fully-resolved defaults for one experiment (what run() would use when the
// config file carries only the experiment name).
ExperimentConfig default_config(const std::string& experiment);

void validate_config(const ExperimentConfig& config);

ExperimentOutput run_experiment(const ExperimentConfig& config);

// results.csv + metadata.json + schema.json under out_dir.
void write_output(const ExperimentOutput& output, const ExperimentConfig& config,
                  const std::filesystem::path& out_dir);

// Spearman rank correlation with average ranks on ties.
double spearman_rank_correlation(const std::vector<double>& a,
                                 const std::vector<double>& b);

// Indices of strict local maxima (plateaus count once, at their left edge).
std::vector<std::size_t> local_maxima(const std::vector<double>& s);

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace hybell

#endif
