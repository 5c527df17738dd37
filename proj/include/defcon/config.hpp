#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "defcon/synth.hpp"
#include "defcon/tasks.hpp"

namespace defcon {

// Run-wide configuration shared by all CLI subcommands. Loaded from a simple
// `key = value` text file ('#' starts a comment); command-line flags override
// file values.
struct RunConfig {
    std::string data_dir = "data";
    std::string model_dir = "models";
    std::string report_dir = "reports";
    std::uint64_t seed = 1;
    int jobs = 0;  // 0 = logical cores
    int matches = 5;

    TrainConfig train;        // applied to every task
    GeneratorConfig generator;

    double minutes_threshold = 900.0;
    int zones_x = 12;
    int zones_y = 8;
    std::optional<std::string> market_values;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_int = [&] { return std::stoi(value); };
    auto as_u64 = [&] { return static_cast<std::uint64_t>(std::stoull(value)); };
    auto as_double = [&] { return std::stod(value); };
    if (key == "data_dir") cfg.data_dir = value;
    else if (key == "model_dir") cfg.model_dir = value;
    else if (key == "report_dir") cfg.report_dir = value;
    else if (key == "seed") cfg.seed = as_u64();
    else if (key == "jobs") cfg.jobs = as_int();
    else if (key == "matches") cfg.matches = as_int();
    else if (key == "actions_per_match") cfg.generator.actions_per_match = as_int();
    else if (key == "mc_samples") cfg.generator.mc_samples = as_int();
    else if (key == "temperature") cfg.generator.temperature = as_double();
    else if (key == "train.learning_rate") cfg.train.learning_rate = as_double();
    else if (key == "train.batch_size") cfg.train.batch_size = as_int();
    else if (key == "train.max_epochs") cfg.train.max_epochs = as_int();
    else if (key == "train.patience") cfg.train.patience = as_int();
    else if (key == "train.validation_fraction") cfg.train.validation_fraction = as_double();
    else if (key == "train.hidden") cfg.train.hidden = as_int();
    else if (key == "train.heads") cfg.train.heads = as_int();
    else if (key == "train.edge_proj") cfg.train.edge_proj = as_int();
    else if (key == "train.head_hidden") cfg.train.head_hidden = as_int();
    else if (key == "train.lr_decays") cfg.train.lr_decays = as_int();
    else if (key == "minutes_threshold") cfg.minutes_threshold = as_double();
    else if (key == "zones_x") cfg.zones_x = as_int();
    else if (key == "zones_y") cfg.zones_y = as_int();
    else if (key == "market_values") cfg.market_values = value;
    else throw std::runtime_error("unknown config key: " + key);
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": empty key or value");
        try {
            apply_config_entry(cfg, key, value);
        } catch (const std::invalid_argument&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad value for " +
                                     key);
        }
    }
    return cfg;
}

}  // namespace defcon
