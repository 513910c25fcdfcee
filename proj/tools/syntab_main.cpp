#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "syntab/analysis/analysis.hpp"
#include "syntab/bench/bench.hpp"
#include "syntab/cli/config.hpp"
#include "syntab/cli/svg.hpp"
#include "syntab/tabular/dataset.hpp"

namespace {

namespace fs = std::filesystem;
using syntab::Rng;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;

struct RunOptions {
    std::string config_path;
    std::string preset;
    std::string dataset;
    std::string out_dir;
    std::string protocols;
    std::string classifiers;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t workers = 0;
    bool binarize = false;
};

struct InspectOptions {
    std::string dataset;
    std::string label_column = "class";
    std::string positive_label = "1";
};

struct ClusterOptions {
    std::string dataset;
    std::string label_column = "class";
    std::string positive_label = "1";
    std::string k = "auto";
    std::uint64_t seed = 0;
    std::string out_dir;
};

struct GradcheckOptions {
    std::uint64_t seed = 0;
    std::size_t count = 1;
    bool inject_fault = false;
};

// --out beats SYNTAB_OUT_DIR beats the working directory.
fs::path resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("SYNTAB_OUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ".";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

int cmd_run(const RunOptions& options) {
    syntab::bench::ExperimentConfig config;
    if (!options.preset.empty() && !options.config_path.empty()) {
        // The file may itself name a preset; feeding it both ways would make
        // precedence murky.
        throw std::invalid_argument("pass either --preset or --config, not both");
    }
    if (!options.preset.empty()) {
        config = syntab::cli::preset(options.preset);
    } else if (!options.config_path.empty()) {
        config = syntab::cli::parse_config_file(options.config_path);
    } else {
        throw std::invalid_argument("run needs --config or --preset");
    }

    if (!options.dataset.empty()) config.dataset_path = options.dataset;
    if (options.seed_given) config.master_seed = options.seed;
    if (options.workers > 0) config.workers = options.workers;
    if (options.binarize) config.binarize_synthetic = true;
    if (!options.protocols.empty()) {
        config.protocols =
            syntab::cli::parse_config_text("protocols=" + options.protocols).protocols;
    }
    if (!options.classifiers.empty()) {
        config.enabled_classifiers =
            syntab::cli::parse_config_text("classifiers=" + options.classifiers)
                .enabled_classifiers;
    }
    if (config.dataset_path.empty()) {
        throw std::invalid_argument("no dataset given (config key `dataset` or --dataset)");
    }

    const fs::path out_dir = resolve_out_dir(options.out_dir);
    fs::create_directories(out_dir);

    const syntab::bench::ExperimentReport report = syntab::bench::run_experiment(config);

    write_file(out_dir / "report.json", syntab::bench::report_to_json(report));
    write_file(out_dir / "folds.csv", syntab::bench::folds_to_csv(report.records));
    if (!report.aggregates.empty()) {
        write_file(out_dir / "heatmap.svg", syntab::cli::utility_heatmap_svg(report.aggregates));
    }
    for (const auto& [fold, log] : report.train_logs) {
        write_file(out_dir / ("train_fold_" + std::to_string(fold) + ".csv"),
                   syntab::cgan::train_log_to_csv(log));
    }

    std::cout << "folds: " << config.k - report.incomplete_folds.size() << "/" << config.k
              << " complete, " << report.records.size() << " evaluations\n";
    for (const auto& s : report.per_classifier) {
        std::cout << syntab::classifiers::kind_name(s.classifier)
                  << " mean wilcoxon p (TSTR vs TRTR): " << s.mean_wilcoxon_p
                  << (s.reject_h0 ? "  [reject H0]" : "  [accept H0]") << "\n";
    }
    std::cout << "report: " << (out_dir / "report.json").string() << "\n";
    if (!report.incomplete_folds.empty()) {
        for (const auto& f : report.incomplete_folds) {
            std::cerr << "fold " << f.fold << " failed: " << f.message << "\n";
        }
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_inspect(const InspectOptions& options) {
    const syntab::tabular::LabeledDataset ds =
        syntab::tabular::load_csv(options.dataset, options.label_column, options.positive_label);
    const auto counts = syntab::tabular::class_counts(ds);

    std::cout << "rows: " << ds.rows() << "\n";
    std::cout << "features: " << ds.cols() << "\n";
    std::cout << "class 0 (benign): " << counts[0] << "\n";
    std::cout << "class 1 (malware): " << counts[1] << "\n";

    std::vector<std::string> constant;
    std::cout << "feature ranges:\n";
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        double lo = ds.features.at(0, j);
        double hi = lo;
        for (std::size_t i = 1; i < ds.rows(); ++i) {
            lo = std::min(lo, ds.features.at(i, j));
            hi = std::max(hi, ds.features.at(i, j));
        }
        std::cout << "  " << ds.feature_names[j] << ": [" << lo << ", " << hi << "]\n";
        if (lo == hi) constant.push_back(ds.feature_names[j]);
    }
    std::cout << "constant columns:";
    if (constant.empty()) {
        std::cout << " none";
    } else {
        for (const std::string& name : constant) std::cout << " " << name;
    }
    std::cout << "\n";
    return kExitOk;
}

int cmd_cluster(const ClusterOptions& options) {
    const syntab::tabular::LabeledDataset ds =
        syntab::tabular::load_csv(options.dataset, options.label_column, options.positive_label);

    std::vector<std::size_t> malware_rows;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (ds.labels[i] == 1) malware_rows.push_back(i);
    }
    if (malware_rows.size() < 2) {
        throw std::invalid_argument("clustering needs at least 2 malware rows, got " +
                                    std::to_string(malware_rows.size()));
    }
    const syntab::tabular::LabeledDataset malware = syntab::tabular::take_rows(ds, malware_rows);

    const syntab::analysis::Projection2D pca = syntab::analysis::pca_2d(malware.features);

    std::size_t k = 0;
    if (options.k == "auto") {
        const std::size_t k_max = std::min<std::size_t>(8, malware.rows());
        k = syntab::analysis::choose_k(pca.points, 1, k_max, options.seed).k;
    } else {
        k = std::stoul(options.k);
    }
    const syntab::analysis::Clustering clusters =
        syntab::analysis::kmeans(pca.points, k, options.seed);

    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t a : clusters.assignments) ++sizes[a];
    std::cout << "clusters (k=" << k << "):\n";
    for (std::size_t c = 0; c < k; ++c) {
        std::cout << "  cluster " << c << ": " << sizes[c] << " rows\n";
    }
    std::cout << "inertia: " << clusters.inertia << "\n";

    const fs::path out_dir = resolve_out_dir(options.out_dir);
    fs::create_directories(out_dir);
    write_file(out_dir / "clusters.svg",
               syntab::cli::cluster_scatter_svg(pca.points, clusters.assignments, k));
    std::cout << "scatter: " << (out_dir / "clusters.svg").string() << "\n";
    return kExitOk;
}

int cmd_gradcheck(const GradcheckOptions& options) {
    double worst = 0.0;
    for (std::size_t i = 0; i < options.count; ++i) {
        const std::uint64_t seed = options.seed + i;
        const double err = syntab::cgan::gradient_check(seed, 8, options.inject_fault);
        worst = std::max(worst, err);
        std::cout << "seed " << seed << ": max relative error " << err << "\n";
    }
    if (worst < 1e-4) {
        std::cout << "gradcheck PASS (worst " << worst << ")\n";
        return kExitOk;
    }
    std::cout << "gradcheck FAIL (worst " << worst << ")\n";
    return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional-GAN benchmark for tabular malware data"};
    app.require_subcommand(1);

    RunOptions run_options;
    CLI::App* run = app.add_subcommand("run", "Run the k-fold experiment and write reports");
    run->add_option("--config", run_options.config_path, "key=value config file");
    run->add_option("--preset", run_options.preset, "built-in hyperparameter preset");
    run->add_option("--dataset", run_options.dataset, "dataset CSV (overrides config)");
    run->add_option("--out", run_options.out_dir, "output directory");
    run->add_option("--protocols", run_options.protocols, "comma list: TSTR,TRTS,TRTR");
    run->add_option("--classifiers", run_options.classifiers, "comma list: svm,tree,gbt,sgd");
    run->add_option("--seed", run_options.seed, "master seed");
    run->add_option("--workers", run_options.workers, "concurrent fold workers");
    run->add_flag("--binarize", run_options.binarize, "round synthetic features to 0/1");

    InspectOptions inspect_options;
    CLI::App* inspect = app.add_subcommand("inspect", "Print a dataset summary");
    inspect->add_option("dataset", inspect_options.dataset, "dataset CSV")->required();
    inspect->add_option("--label-column", inspect_options.label_column, "label column name");
    inspect->add_option("--positive-label", inspect_options.positive_label,
                        "value mapped to class 1");

    ClusterOptions cluster_options;
    CLI::App* cluster =
        app.add_subcommand("cluster", "PCA + k-means over the malware rows, SVG scatter");
    cluster->add_option("dataset", cluster_options.dataset, "dataset CSV")->required();
    cluster->add_option("--label-column", cluster_options.label_column, "label column name");
    cluster->add_option("--positive-label", cluster_options.positive_label,
                        "value mapped to class 1");
    cluster->add_option("--k", cluster_options.k, "cluster count or 'auto'");
    cluster->add_option("--seed", cluster_options.seed, "seeding for k-means");
    cluster->add_option("--out", cluster_options.out_dir, "output directory");

    GradcheckOptions gradcheck_options;
    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "Finite-difference check of the training gradients");
    gradcheck->add_option("--seed", gradcheck_options.seed, "first seed");
    gradcheck->add_option("--count", gradcheck_options.count, "number of consecutive seeds");
    gradcheck
        ->add_flag("--inject-fault", gradcheck_options.inject_fault,
                   "negate one analytic gradient (harness self-test)")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    run_options.seed_given = run->count("--seed") > 0;

    try {
        if (run->parsed()) return cmd_run(run_options);
        if (inspect->parsed()) return cmd_inspect(inspect_options);
        if (cluster->parsed()) return cmd_cluster(cluster_options);
        if (gradcheck->parsed()) return cmd_gradcheck(gradcheck_options);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitInvalid;
}
