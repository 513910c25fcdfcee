#pragma once

#include <string>
#include <vector>

#include "syntab/bench/bench.hpp"

namespace syntab::cli {

bench::ExperimentConfig default_config();

// Built-in hyperparameter blocks, one per benchmark dataset.
std::vector<std::string> preset_names();
bench::ExperimentConfig preset(const std::string& name);

// key=value lines, '#' starts a comment, blank lines ignored. A `preset`
// key is applied before everything else so the remaining keys override it.
// Unknown and duplicate keys are rejected by name.
bench::ExperimentConfig parse_config_text(const std::string& text);
bench::ExperimentConfig parse_config_file(const std::string& path);

// Emits every key; parse_config_text(serialize_config(c)) reproduces c.
std::string serialize_config(const bench::ExperimentConfig& config);

}  // namespace syntab::cli
