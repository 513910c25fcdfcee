#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "syntab/cli/config.hpp"
#include "syntab/cli/svg.hpp"
#include "json.hpp"
#include "syntab/rng.hpp"

using syntab::bench::ExperimentConfig;
namespace cli = syntab::cli;
namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

// Runs through popen with stderr folded into stdout so error text is
// assertable too.
CommandResult run_command(const std::string& command) {
    CommandResult result;
    FILE* pipe = popen((command + " 2>&1").c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 512> buffer{};
    while (fgets(buffer.data(), buffer.size(), pipe) != nullptr) {
        result.output += buffer.data();
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

fs::path temp_dir(const std::string& tag) {
    const fs::path dir =
        fs::temp_directory_path() / ("syntab_cli_" + tag + "_" + std::to_string(getpid()));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Near-binary two-class table, same shape the bench tests use.
std::string toy_csv(std::size_t rows_per_class, std::size_t d, std::uint64_t seed) {
    syntab::Rng rng(seed);
    std::string csv;
    for (std::size_t j = 0; j < d; ++j) csv += "f" + std::to_string(j) + ",";
    csv += "class\n";
    for (std::size_t i = 0; i < 2 * rows_per_class; ++i) {
        const int label = i < rows_per_class ? 0 : 1;
        for (std::size_t j = 0; j < d; ++j) {
            const bool lit = (label == 1) == (j % 2 == 0);
            const double p_on = lit ? 0.8 : 0.2;
            const double v = rng.uniform() < p_on ? 1.0 - 0.05 * rng.uniform()
                                                  : 0.05 * rng.uniform();
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f,", v);
            csv += buf;
        }
        csv += std::to_string(label) + "\n";
    }
    return csv;
}

}  // namespace

TEST_CASE("default config matches the documented defaults") {
    const ExperimentConfig c = cli::default_config();
    CHECK(c.label_column == "class");
    CHECK(c.positive_label == "1");
    CHECK(c.k == 10);
    CHECK(c.cgan.epochs == 300);
    CHECK(c.cgan.batch_size == 256);
    CHECK(c.cgan.gen_neurons == 512);
    CHECK(c.cgan.disc_neurons == 256);
    CHECK(c.cgan.gen_dropout == doctest::Approx(0.2));
    CHECK(c.cgan.disc_dropout == doctest::Approx(0.4));
    CHECK(c.cgan.init_stddev == doctest::Approx(0.5));
    CHECK(c.cgan.latent_dim == 128);
    CHECK(c.cgan.embed_dim == 32);
    CHECK(c.enabled_classifiers.size() == 4);
    CHECK(c.protocols.size() == 3);
    CHECK(c.master_seed == 0);
    CHECK(c.binarize_synthetic == false);
    CHECK(c.workers == 1);
}

TEST_CASE("serialize then parse reproduces the config") {
    ExperimentConfig c = cli::default_config();
    c.dataset_path = "data/some.csv";
    c.k = 7;
    c.cgan.gen_dropout = 0.125;
    c.cgan.seed = 0;  // not serialized; derived from master_seed per fold
    c.master_seed = 1234567;
    c.classifier_params.gbt.learning_rate = 0.05;
    c.enabled_classifiers = {syntab::classifiers::Kind::LinearSvm, syntab::classifiers::Kind::GradientBoostedTrees};
    c.protocols = {syntab::bench::Protocol::Tstr, syntab::bench::Protocol::Trtr};
    c.binarize_synthetic = true;
    c.top_features = 50;
    c.workers = 3;

    const std::string text = cli::serialize_config(c);
    const ExperimentConfig back = cli::parse_config_text(text);

    CHECK(back.dataset_path == c.dataset_path);
    CHECK(back.k == c.k);
    CHECK(back.cgan.gen_dropout == c.cgan.gen_dropout);
    CHECK(back.master_seed == c.master_seed);
    CHECK(back.classifier_params.gbt.learning_rate == c.classifier_params.gbt.learning_rate);
    CHECK(back.enabled_classifiers == c.enabled_classifiers);
    CHECK(back.protocols == c.protocols);
    CHECK(back.binarize_synthetic == c.binarize_synthetic);
    CHECK(back.top_features == c.top_features);
    CHECK(back.workers == c.workers);

    // Fixed point: serializing the round-tripped config gives the same text.
    CHECK(cli::serialize_config(back) == text);
}

TEST_CASE("round trip keeps reals exact, including non-decimal ones") {
    ExperimentConfig c = cli::default_config();
    c.cgan.gen_dropout = 0.1 + 0.2;  // 0.30000000000000004
    c.cgan.init_stddev = 1.0 / 3.0;
    c.classifier_params.svm.lambda = 2e-5;
    const ExperimentConfig back = cli::parse_config_text(cli::serialize_config(c));
    CHECK(back.cgan.gen_dropout == c.cgan.gen_dropout);
    CHECK(back.cgan.init_stddev == c.cgan.init_stddev);
    CHECK(back.classifier_params.svm.lambda == c.classifier_params.svm.lambda);
}

TEST_CASE("presets carry the published hyperparameters") {
    const auto names = cli::preset_names();
    REQUIRE(names.size() == 6);

    struct Expected {
        const char* name;
        std::size_t epochs, gen, disc;
        double gen_drop, disc_drop, init;
    };
    const Expected table[] = {
        {"androcrawl", 2000, 2048, 512, 0.2, 0.4, 0.5},
        {"drebin", 5000, 2048, 1024, 0.2, 0.4, 0.5},
        {"adroit", 5000, 64, 32, 0.05, 0.1, 0.5},
        {"android_p", 1000, 1024, 512, 0.2, 0.4, 0.5},
        {"kronodroid_e", 5000, 512, 256, 0.025, 0.05, 0.4},
        {"kronodroid_r", 5000, 512, 256, 0.025, 0.05, 0.4},
    };
    for (const Expected& e : table) {
        CAPTURE(e.name);
        const ExperimentConfig c = cli::preset(e.name);
        CHECK(c.cgan.epochs == e.epochs);
        CHECK(c.cgan.gen_neurons == e.gen);
        CHECK(c.cgan.disc_neurons == e.disc);
        CHECK(c.cgan.gen_dropout == doctest::Approx(e.gen_drop));
        CHECK(c.cgan.disc_dropout == doctest::Approx(e.disc_drop));
        CHECK(c.cgan.init_stddev == doctest::Approx(e.init));
        CHECK(c.k == 10);
        CHECK(c.cgan.batch_size == 256);
    }

    CHECK_THROWS_WITH_AS(cli::preset("nosuch"), "unknown preset: nosuch", std::invalid_argument);
}

TEST_CASE("preset key in a file applies before the other keys") {
    const ExperimentConfig c = cli::parse_config_text(
        "gen_neurons=99\n"
        "preset=drebin\n"
        "epochs=4\n");
    // drebin sets gen 2048 / epochs 5000, but the explicit keys win even
    // though one of them appears above the preset line.
    CHECK(c.cgan.gen_neurons == 99);
    CHECK(c.cgan.epochs == 4);
    CHECK(c.cgan.disc_neurons == 1024);  // untouched preset value survives
}

TEST_CASE("parser rejects bad input naming the offender") {
    CHECK_THROWS_WITH_AS(cli::parse_config_text("frobnicate=1\n"),
                         "unknown config key: frobnicate", std::invalid_argument);
    CHECK_THROWS_WITH_AS(cli::parse_config_text("k=3\nk=5\n"), "config key k set twice",
                         std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_config_text("just words\n"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(cli::parse_config_text("\n\nno equals here\n"),
                         "config line 3: expected key=value, got 'no equals here'",
                         std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_config_text("k=abc\n"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_config_text("k=-3\n"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_config_text("gen_dropout=lots\n"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_config_text("binarize=maybe\n"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_config_text("classifiers=svm,phantom\n"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_config_text("protocols=TSTR,TSTS\n"), std::invalid_argument);
    CHECK_THROWS_AS(cli::parse_config_file("/nonexistent/path.conf"), std::invalid_argument);
}

TEST_CASE("parser skips comments and blank lines, trims whitespace") {
    const ExperimentConfig c = cli::parse_config_text(
        "# a comment\n"
        "\n"
        "  k = 4  # trailing comment\n"
        "dataset = data.csv\n");
    CHECK(c.k == 4);
    CHECK(c.dataset_path == "data.csv");
}

TEST_CASE("heatmap SVG lays out one row per classifier and protocol") {
    using syntab::bench::Protocol;
    using syntab::classifiers::Kind;
    std::vector<syntab::bench::AggregateEntry> aggregates;
    const char* metrics[] = {"accuracy", "precision", "recall", "f1", "auc"};
    double v = 0.0;
    for (Kind classifier : {Kind::LinearSvm, Kind::DecisionTree}) {
        for (Protocol protocol : {Protocol::Tstr, Protocol::Trtr}) {
            for (const char* metric : metrics) {
                aggregates.push_back({classifier, protocol, metric, v, 0.01});
                v = v < 0.9 ? v + 0.05 : 0.95;
            }
        }
    }
    const std::string svg = cli::utility_heatmap_svg(aggregates);

    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("svm TSTR") != std::string::npos);
    CHECK(svg.find("tree TRTR") != std::string::npos);
    CHECK(svg.find("accuracy") != std::string::npos);
    CHECK(svg.find("auc") != std::string::npos);
    // Cell annotations are printed to two decimals.
    CHECK(svg.find(">0.00<") != std::string::npos);
    CHECK(svg.find(">0.95<") != std::string::npos);
    // Low and high ends of the blue ramp both appear for this value spread.
    CHECK(svg.find("#f7fbff") != std::string::npos);
    CHECK(svg.find("#08306b") != std::string::npos);
    // High cells switch to white text for contrast.
    CHECK(svg.find("fill=\"#ffffff\"") != std::string::npos);

    CHECK_THROWS_AS(cli::utility_heatmap_svg({}), std::invalid_argument);
}

TEST_CASE("cluster scatter SVG draws every point and a sized legend") {
    syntab::Matrix points(7, 2);
    for (std::size_t i = 0; i < 7; ++i) {
        points.at(i, 0) = static_cast<double>(i);
        points.at(i, 1) = static_cast<double>(i % 3);
    }
    const std::vector<std::size_t> assignments = {0, 0, 1, 1, 1, 2, 2};
    const std::string svg = cli::cluster_scatter_svg(points, assignments, 3);

    std::size_t circles = 0;
    for (std::size_t pos = svg.find("<circle"); pos != std::string::npos;
         pos = svg.find("<circle", pos + 1)) {
        ++circles;
    }
    CHECK(circles >= 7);  // 7 data points plus legend swatches
    CHECK(svg.find("cluster 0 (n=2)") != std::string::npos);
    CHECK(svg.find("cluster 1 (n=3)") != std::string::npos);
    CHECK(svg.find("cluster 2 (n=2)") != std::string::npos);
    CHECK(svg.find("PC1") != std::string::npos);
    CHECK(svg.find("PC2") != std::string::npos);

    CHECK_THROWS_AS(cli::cluster_scatter_svg(syntab::Matrix(3, 3), {0, 0, 0}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(cli::cluster_scatter_svg(points, {0, 0, 1}, 3), std::invalid_argument);
    std::vector<std::size_t> out_of_range = assignments;
    out_of_range[0] = 9;
    CHECK_THROWS_AS(cli::cluster_scatter_svg(points, out_of_range, 3), std::invalid_argument);
}

#ifdef SYNTAB_BIN

namespace {
const std::string kBin = SYNTAB_BIN;
}

TEST_CASE("binary: run writes all artifacts and is deterministic") {
    const fs::path dir = temp_dir("run");
    write_file(dir / "data.csv", toy_csv(60, 6, 3));
    write_file(dir / "exp.conf",
               "dataset=" + (dir / "data.csv").string() +
                   "\n"
                   "k=2\nepochs=2\nbatch_size=16\ngen_neurons=8\ndisc_neurons=6\n"
                   "gen_dropout=0.1\ndisc_dropout=0.1\ninit_stddev=0.3\n"
                   "latent_dim=4\nembed_dim=2\nclassifiers=svm\nseed=21\n");

    const std::string base = kBin + " run --config " + (dir / "exp.conf").string();
    const CommandResult first = run_command(base + " --out " + (dir / "out1").string());
    CAPTURE(first.output);
    CHECK(first.exit_code == 0);
    for (const char* name : {"report.json", "folds.csv", "heatmap.svg", "train_fold_0.csv",
                             "train_fold_1.csv"}) {
        CAPTURE(name);
        CHECK(fs::exists(dir / "out1" / name));
    }
    CHECK(first.output.find("folds: 2/2 complete") != std::string::npos);

    const CommandResult second = run_command(base + " --out " + (dir / "out2").string());
    CHECK(second.exit_code == 0);
    // The resources block carries wall-clock timing, so it is the one part of
    // the report allowed to differ between runs.
    nlohmann::json r1 = nlohmann::json::parse(read_file(dir / "out1" / "report.json"));
    nlohmann::json r2 = nlohmann::json::parse(read_file(dir / "out2" / "report.json"));
    CHECK(r1.contains("resources"));
    r1.erase("resources");
    r2.erase("resources");
    CHECK(r1.dump(2) == r2.dump(2));
    CHECK(read_file(dir / "out1" / "folds.csv") == read_file(dir / "out2" / "folds.csv"));

    // A different master seed must change the folds.
    const CommandResult reseeded =
        run_command(base + " --seed 77 --out " + (dir / "out3").string());
    CHECK(reseeded.exit_code == 0);
    CHECK(read_file(dir / "out1" / "folds.csv") != read_file(dir / "out3" / "folds.csv"));

    fs::remove_all(dir);
}

TEST_CASE("binary: inspect summarizes the table") {
    const fs::path dir = temp_dir("inspect");
    std::string csv = toy_csv(10, 3, 4);
    // Plant a constant column by rewriting f1 to 0.5 everywhere.
    write_file(dir / "data.csv", csv);
    {
        auto ds = std::ofstream(dir / "const.csv");
        ds << "a,b,class\n0.1,0.5,0\n0.9,0.5,1\n0.2,0.5,0\n0.8,0.5,1\n";
    }

    const CommandResult result = run_command(kBin + " inspect " + (dir / "const.csv").string());
    CAPTURE(result.output);
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("rows: 4") != std::string::npos);
    CHECK(result.output.find("features: 2") != std::string::npos);
    CHECK(result.output.find("class 0 (benign): 2") != std::string::npos);
    CHECK(result.output.find("class 1 (malware): 2") != std::string::npos);
    CHECK(result.output.find("b: [0.5, 0.5]") != std::string::npos);
    CHECK(result.output.find("constant columns: b") != std::string::npos);

    const CommandResult plain = run_command(kBin + " inspect " + (dir / "data.csv").string());
    CHECK(plain.exit_code == 0);
    CHECK(plain.output.find("constant columns: none") != std::string::npos);

    fs::remove_all(dir);
}

TEST_CASE("binary: cluster writes the scatter and reports sizes") {
    const fs::path dir = temp_dir("cluster");
    // Two tight malware blobs plus benign rows that must be ignored.
    std::string csv = "x,y,class\n";
    syntab::Rng rng(8);
    for (int i = 0; i < 20; ++i) {
        csv += std::to_string(0.2 + 0.01 * rng.uniform()) + "," +
               std::to_string(0.2 + 0.01 * rng.uniform()) + ",1\n";
        csv += std::to_string(0.8 + 0.01 * rng.uniform()) + "," +
               std::to_string(0.8 + 0.01 * rng.uniform()) + ",1\n";
        csv += std::to_string(rng.uniform()) + "," + std::to_string(rng.uniform()) + ",0\n";
    }
    write_file(dir / "blobs.csv", csv);

    const CommandResult result = run_command(kBin + " cluster " + (dir / "blobs.csv").string() +
                                             " --k 2 --out " + dir.string());
    CAPTURE(result.output);
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(dir / "clusters.svg"));
    // The planted blobs are 20/20; k-means on the PCA projection finds them.
    CHECK(result.output.find(": 20 rows") != std::string::npos);

    const CommandResult huge_k =
        run_command(kBin + " cluster " + (dir / "blobs.csv").string() + " --k 4000");
    CHECK(huge_k.exit_code == 2);

    // Fewer than two malware rows cannot be clustered.
    write_file(dir / "thin.csv", "x,y,class\n0.1,0.2,0\n0.3,0.4,1\n0.5,0.6,0\n");
    const CommandResult thin = run_command(kBin + " cluster " + (dir / "thin.csv").string());
    CHECK(thin.exit_code == 2);
    CHECK(thin.output.find("at least 2 malware rows") != std::string::npos);

    fs::remove_all(dir);
}

TEST_CASE("binary: gradcheck passes clean and fails with an injected fault") {
    const CommandResult pass = run_command(kBin + " gradcheck --seed 3 --count 2");
    CAPTURE(pass.output);
    CHECK(pass.exit_code == 0);
    CHECK(pass.output.find("seed 3:") != std::string::npos);
    CHECK(pass.output.find("seed 4:") != std::string::npos);
    CHECK(pass.output.find("gradcheck PASS") != std::string::npos);

    const CommandResult fail = run_command(kBin + " gradcheck --inject-fault");
    CHECK(fail.exit_code == 3);
    CHECK(fail.output.find("gradcheck FAIL") != std::string::npos);
}

TEST_CASE("binary: bad invocations exit 2") {
    const fs::path dir = temp_dir("bad");
    write_file(dir / "broken.conf", "epochs=not_a_number\n");
    write_file(dir / "twice.conf", "k=3\nk=4\n");

    CHECK(run_command(kBin + " run --config " + (dir / "broken.conf").string()).exit_code == 2);
    const CommandResult twice =
        run_command(kBin + " run --config " + (dir / "twice.conf").string());
    CHECK(twice.exit_code == 2);
    CHECK(twice.output.find("config key k set twice") != std::string::npos);
    CHECK(run_command(kBin + " run").exit_code == 2);
    CHECK(run_command(kBin + " run --preset nosuch --dataset x.csv").exit_code == 2);
    CHECK(run_command(kBin + " frobnicate").exit_code == 2);
    CHECK(run_command(kBin + " --help").exit_code == 0);
    CHECK(run_command(kBin + " inspect /nonexistent.csv").exit_code == 3);

    fs::remove_all(dir);
}

#endif  // SYNTAB_BIN
