#include "syntab/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace syntab::cli {

namespace {

std::string real_to_string(double v) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, result.ptr);
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream stream(value);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    std::size_t consumed = 0;
    unsigned long long parsed = 0;
    try {
        parsed = std::stoull(value, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + ": not a count: '" + value + "'");
    }
    if (consumed != value.size() || value[0] == '-') {
        throw std::invalid_argument("config key " + key + ": not a count: '" + value + "'");
    }
    return static_cast<std::size_t>(parsed);
}

double parse_real(const std::string& key, const std::string& value) {
    std::size_t consumed = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(value, &consumed);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + ": not a number: '" + value + "'");
    }
    if (consumed != value.size()) {
        throw std::invalid_argument("config key " + key + ": not a number: '" + value + "'");
    }
    return parsed;
}

bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config key " + key + ": expected true or false, got '" + value +
                                "'");
}

using Setter = std::function<void(bench::ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"dataset", [](auto& c, const auto& v) { c.dataset_path = v; }},
        {"label_column", [](auto& c, const auto& v) { c.label_column = v; }},
        {"positive_label", [](auto& c, const auto& v) { c.positive_label = v; }},
        {"k", [](auto& c, const auto& v) { c.k = parse_count("k", v); }},
        {"epochs", [](auto& c, const auto& v) { c.cgan.epochs = parse_count("epochs", v); }},
        {"batch_size",
         [](auto& c, const auto& v) { c.cgan.batch_size = parse_count("batch_size", v); }},
        {"gen_neurons",
         [](auto& c, const auto& v) { c.cgan.gen_neurons = parse_count("gen_neurons", v); }},
        {"disc_neurons",
         [](auto& c, const auto& v) { c.cgan.disc_neurons = parse_count("disc_neurons", v); }},
        {"gen_dropout",
         [](auto& c, const auto& v) { c.cgan.gen_dropout = parse_real("gen_dropout", v); }},
        {"disc_dropout",
         [](auto& c, const auto& v) { c.cgan.disc_dropout = parse_real("disc_dropout", v); }},
        {"init_stddev",
         [](auto& c, const auto& v) { c.cgan.init_stddev = parse_real("init_stddev", v); }},
        {"latent_dim",
         [](auto& c, const auto& v) { c.cgan.latent_dim = parse_count("latent_dim", v); }},
        {"embed_dim",
         [](auto& c, const auto& v) { c.cgan.embed_dim = parse_count("embed_dim", v); }},
        {"svm_lambda",
         [](auto& c, const auto& v) { c.classifier_params.svm.lambda = parse_real("svm_lambda", v); }},
        {"svm_epochs",
         [](auto& c, const auto& v) { c.classifier_params.svm.epochs = parse_count("svm_epochs", v); }},
        {"tree_max_depth",
         [](auto& c, const auto& v) {
             c.classifier_params.tree.max_depth = parse_count("tree_max_depth", v);
         }},
        {"tree_min_leaf",
         [](auto& c, const auto& v) {
             c.classifier_params.tree.min_leaf = parse_count("tree_min_leaf", v);
         }},
        {"gbt_rounds",
         [](auto& c, const auto& v) { c.classifier_params.gbt.rounds = parse_count("gbt_rounds", v); }},
        {"gbt_max_depth",
         [](auto& c, const auto& v) {
             c.classifier_params.gbt.max_depth = parse_count("gbt_max_depth", v);
         }},
        {"gbt_learning_rate",
         [](auto& c, const auto& v) {
             c.classifier_params.gbt.learning_rate = parse_real("gbt_learning_rate", v);
         }},
        {"sgd_epochs",
         [](auto& c, const auto& v) { c.classifier_params.sgd.epochs = parse_count("sgd_epochs", v); }},
        {"sgd_learning_rate",
         [](auto& c, const auto& v) {
             c.classifier_params.sgd.learning_rate = parse_real("sgd_learning_rate", v);
         }},
        {"classifiers",
         [](auto& c, const auto& v) {
             c.enabled_classifiers.clear();
             for (const std::string& name : split_list(v)) {
                 c.enabled_classifiers.push_back(classifiers::kind_from_name(name));
             }
         }},
        {"protocols",
         [](auto& c, const auto& v) {
             c.protocols.clear();
             for (const std::string& name : split_list(v)) {
                 c.protocols.push_back(bench::protocol_from_name(name));
             }
         }},
        {"seed", [](auto& c, const auto& v) { c.master_seed = parse_count("seed", v); }},
        {"binarize", [](auto& c, const auto& v) { c.binarize_synthetic = parse_flag("binarize", v); }},
        {"top_features",
         [](auto& c, const auto& v) { c.top_features = parse_count("top_features", v); }},
        {"workers", [](auto& c, const auto& v) { c.workers = parse_count("workers", v); }},
    };
    return table;
}

struct PresetRow {
    const char* name;
    std::size_t epochs;
    std::size_t gen_neurons;
    std::size_t disc_neurons;
    double gen_dropout;
    double disc_dropout;
    double init_stddev;
};

constexpr PresetRow kPresets[] = {
    {"adroit", 5000, 64, 32, 0.05, 0.1, 0.5},
    {"androcrawl", 2000, 2048, 512, 0.2, 0.4, 0.5},
    {"android_p", 1000, 1024, 512, 0.2, 0.4, 0.5},
    {"drebin", 5000, 2048, 1024, 0.2, 0.4, 0.5},
    {"kronodroid_e", 5000, 512, 256, 0.025, 0.05, 0.4},
    {"kronodroid_r", 5000, 512, 256, 0.025, 0.05, 0.4},
};

}  // namespace

bench::ExperimentConfig default_config() { return bench::ExperimentConfig{}; }

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const PresetRow& row : kPresets) names.push_back(row.name);
    return names;
}

bench::ExperimentConfig preset(const std::string& name) {
    for (const PresetRow& row : kPresets) {
        if (name == row.name) {
            bench::ExperimentConfig config;
            config.k = 10;
            config.cgan.epochs = row.epochs;
            config.cgan.batch_size = 256;
            config.cgan.gen_neurons = row.gen_neurons;
            config.cgan.disc_neurons = row.disc_neurons;
            config.cgan.gen_dropout = row.gen_dropout;
            config.cgan.disc_dropout = row.disc_dropout;
            config.cgan.init_stddev = row.init_stddev;
            return config;
        }
    }
    throw std::invalid_argument("unknown preset: " + name);
}

bench::ExperimentConfig parse_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::stringstream stream(text);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto equals = line.find('=');
        if (equals == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_number) +
                                        ": expected key=value, got '" + line + "'");
        }
        entries.emplace_back(trim(line.substr(0, equals)), trim(line.substr(equals + 1)));
    }

    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            if (entries[i].first == entries[j].first) {
                throw std::invalid_argument("config key " + entries[i].first + " set twice");
            }
        }
    }

    bench::ExperimentConfig config;
    bool preset_seen = false;
    for (const auto& [key, value] : entries) {
        if (key == "preset") {
            config = preset(value);
            preset_seen = true;
        }
    }
    if (!preset_seen) config = default_config();

    for (const auto& [key, value] : entries) {
        if (key == "preset") continue;
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw std::invalid_argument("unknown config key: " + key);
        }
        it->second(config, value);
    }
    return config;
}

bench::ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

std::string serialize_config(const bench::ExperimentConfig& config) {
    std::ostringstream out;
    out << "dataset=" << config.dataset_path << "\n";
    out << "label_column=" << config.label_column << "\n";
    out << "positive_label=" << config.positive_label << "\n";
    out << "k=" << config.k << "\n";
    out << "epochs=" << config.cgan.epochs << "\n";
    out << "batch_size=" << config.cgan.batch_size << "\n";
    out << "gen_neurons=" << config.cgan.gen_neurons << "\n";
    out << "disc_neurons=" << config.cgan.disc_neurons << "\n";
    out << "gen_dropout=" << real_to_string(config.cgan.gen_dropout) << "\n";
    out << "disc_dropout=" << real_to_string(config.cgan.disc_dropout) << "\n";
    out << "init_stddev=" << real_to_string(config.cgan.init_stddev) << "\n";
    out << "latent_dim=" << config.cgan.latent_dim << "\n";
    out << "embed_dim=" << config.cgan.embed_dim << "\n";
    out << "svm_lambda=" << real_to_string(config.classifier_params.svm.lambda) << "\n";
    out << "svm_epochs=" << config.classifier_params.svm.epochs << "\n";
    out << "tree_max_depth=" << config.classifier_params.tree.max_depth << "\n";
    out << "tree_min_leaf=" << config.classifier_params.tree.min_leaf << "\n";
    out << "gbt_rounds=" << config.classifier_params.gbt.rounds << "\n";
    out << "gbt_max_depth=" << config.classifier_params.gbt.max_depth << "\n";
    out << "gbt_learning_rate=" << real_to_string(config.classifier_params.gbt.learning_rate) << "\n";
    out << "sgd_epochs=" << config.classifier_params.sgd.epochs << "\n";
    out << "sgd_learning_rate=" << real_to_string(config.classifier_params.sgd.learning_rate) << "\n";

    out << "classifiers=";
    for (std::size_t i = 0; i < config.enabled_classifiers.size(); ++i) {
        if (i > 0) out << ",";
        out << classifiers::kind_name(config.enabled_classifiers[i]);
    }
    out << "\n";
    out << "protocols=";
    for (std::size_t i = 0; i < config.protocols.size(); ++i) {
        if (i > 0) out << ",";
        out << bench::protocol_name(config.protocols[i]);
    }
    out << "\n";

    out << "seed=" << config.master_seed << "\n";
    out << "binarize=" << (config.binarize_synthetic ? "true" : "false") << "\n";
    out << "top_features=" << config.top_features << "\n";
    out << "workers=" << config.workers << "\n";
    return out.str();
}

}  // namespace syntab::cli
