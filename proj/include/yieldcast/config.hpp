#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "yieldcast/calendar.hpp"
#include "yieldcast/errors.hpp"
#include "yieldcast/features.hpp"
#include "yieldcast/nn.hpp"
#include "yieldcast/training.hpp"

namespace yieldcast {

// Everything the pipeline reads from the flat config file. All keys are
// optional; defaults are the reference protocol values.
struct PipelineConfig {
    TrainConfig train;
    NetworkArch arch;  // window_months is set from the crop's cycle length
    GddConfig gdd;
    WindowAnchor anchor = WindowAnchor::PlantingStart;
    double missing_threshold = 0.05;
};

namespace detail {

[[nodiscard]] inline std::string trim(std::string s)
{
    const auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && issp(static_cast<unsigned char>(s.front()))) {
        s.erase(s.begin());
    }
    while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) {
        s.pop_back();
    }
    return s;
}

[[nodiscard]] inline std::vector<int> parse_int_list(const std::string& value,
                                                     const std::string& where)
{
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        int v{};
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size()) {
            throw ConfigError(where + ": not an integer list: '" + value + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ConfigError(where + ": empty list");
    }
    return out;
}

}  // namespace detail

// Flat `key = value` file; '#' starts a comment. Keys mirror the TrainConfig
// field names plus the architecture, GDD and windowing settings (see README).
[[nodiscard]] inline PipelineConfig parse_config_file(const std::filesystem::path& path,
                                                      PipelineConfig config = {})
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path.string());
    }

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(lineno);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected 'key = value'");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(where + ": expected 'key = value'");
        }

        const auto real = [&]() {
            double v{};
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size()) {
                throw ConfigError(where + ": not a number: '" + value + "'");
            }
            return v;
        };
        const auto integer = [&]() {
            long v{};
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size()) {
                throw ConfigError(where + ": not an integer: '" + value + "'");
            }
            return v;
        };

        if (key == "learning_rate") {
            config.train.learning_rate = real();
        } else if (key == "beta1") {
            config.train.beta1 = real();
        } else if (key == "beta2") {
            config.train.beta2 = real();
        } else if (key == "adam_epsilon") {
            config.train.adam_epsilon = real();
        } else if (key == "batch_size") {
            config.train.batch_size = static_cast<int>(integer());
        } else if (key == "max_epochs") {
            config.train.max_epochs = static_cast<int>(integer());
        } else if (key == "patience") {
            config.train.patience = static_cast<int>(integer());
        } else if (key == "l2_lambda") {
            config.train.l2_lambda = real();
        } else if (key == "noise_sigma") {
            config.train.noise_sigma = real();
        } else if (key == "seed") {
            config.train.seed = static_cast<std::uint64_t>(integer());
        } else if (key == "loss") {
            config.train.loss = value;
        } else if (key == "validation_fraction") {
            config.train.validation_fraction = real();
        } else if (key == "lstm_sizes") {
            config.arch.lstm_sizes = detail::parse_int_list(value, where);
        } else if (key == "static_sizes") {
            config.arch.static_sizes = detail::parse_int_list(value, where);
        } else if (key == "head_sizes") {
            config.arch.head_sizes = detail::parse_int_list(value, where);
        } else if (key == "window_anchor") {
            config.anchor = anchor_from_name(value);
        } else if (key == "missing_threshold") {
            config.missing_threshold = real();
        } else if (key == "gdd_cap") {
            config.gdd.cap_c = real();
        } else if (key.rfind("gdd_base_", 0) == 0) {
            const std::string crop = key.substr(9);
            try {
                config.gdd.base_c[crop_from_name(crop)] = real();
            } catch (const ParseError&) {
                throw ConfigError(where + ": unknown crop in key '" + key + "'");
            }
        } else {
            throw ConfigError(where + ": unknown config key '" + key + "'");
        }
    }
    return config;
}

}  // namespace yieldcast
