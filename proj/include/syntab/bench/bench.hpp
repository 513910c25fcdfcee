#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "syntab/cgan/cgan.hpp"
#include "syntab/classifiers/classifiers.hpp"
#include "syntab/eval/metrics.hpp"
#include "syntab/stats/tests.hpp"
#include "syntab/tabular/dataset.hpp"

namespace syntab::bench {

std::string tool_version();

// TSTR trains on synthetic and tests on the real evaluation fold; TRTS is
// the mirror image; TRTR is the all-real baseline the statistics compare
// against.
enum class Protocol { Tstr, Trts, Trtr };

std::string protocol_name(Protocol protocol);
Protocol protocol_from_name(const std::string& name);

struct ExperimentConfig {
    std::string dataset_path;
    std::string label_column = "class";
    std::string positive_label = "1";
    std::size_t k = 10;
    cgan::CganConfig cgan;
    classifiers::ClassifierParams classifier_params;
    std::vector<classifiers::Kind> enabled_classifiers = {
        classifiers::Kind::LinearSvm, classifiers::Kind::DecisionTree,
        classifiers::Kind::GradientBoostedTrees, classifiers::Kind::SgdLinear};
    std::vector<Protocol> protocols = {Protocol::Tstr, Protocol::Trts, Protocol::Trtr};
    std::uint64_t master_seed = 0;
    bool binarize_synthetic = false;
    std::size_t top_features = 0;  // 0 keeps every column
    std::size_t workers = 1;
};

// k >= 2, at least one classifier and one protocol, no duplicates in either
// list, workers >= 1, and a valid cgan block.
void validate(const ExperimentConfig& config);

struct EvaluationRecord {
    std::size_t fold = 0;
    classifiers::Kind classifier = classifiers::Kind::LinearSvm;
    Protocol protocol = Protocol::Tstr;
    eval::ConfusionMatrix confusion;
    eval::UtilityMetrics metrics;
};

struct FidelityRecord {
    std::size_t fold = 0;
    eval::FidelityMetrics metrics;
};

struct AggregateEntry {
    classifiers::Kind classifier = classifiers::Kind::LinearSvm;
    Protocol protocol = Protocol::Tstr;
    std::string metric;
    double mean = 0.0;
    double stddev = 0.0;
};

// One synthetic-vs-baseline pairing across folds for one classifier and one
// metric. The baseline field names the protocol TSTR was paired with.
struct PairedStat {
    classifiers::Kind classifier = classifiers::Kind::LinearSvm;
    std::string metric;
    std::string baseline;
    stats::TestResult wilcoxon;
    stats::TestResult mann_whitney;
};

// Mean p over the five metrics of the TSTR-vs-TRTR pairing.
struct ClassifierStat {
    classifiers::Kind classifier = classifiers::Kind::LinearSvm;
    double mean_wilcoxon_p = 1.0;
    double mean_mann_whitney_p = 1.0;
    bool reject_h0 = false;
};

struct FoldFailure {
    std::size_t fold = 0;
    std::string message;
};

struct ResourceSummary {
    double avg_cpu_percent = 0.0;
    double avg_memory_percent = 0.0;
    double wall_clock_seconds = 0.0;
    std::size_t samples = 0;
    std::size_t workers = 1;
    bool available = false;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<EvaluationRecord> records;
    std::vector<FidelityRecord> fidelity;
    std::vector<PairedStat> pairings;
    std::vector<ClassifierStat> per_classifier;
    std::vector<AggregateEntry> aggregates;
    std::vector<FoldFailure> incomplete_folds;
    // One cGAN training curve per completed fold; not part of the JSON
    // report (the ms column is timing), exported separately as CSV.
    std::vector<std::pair<std::size_t, cgan::TrainLog>> train_logs;
    ResourceSummary resources;
};

// Samples process CPU and resident-memory share every 500 ms on a
// background thread. CPU percent is total process CPU time over wall time;
// memory percent averages the sampled RSS/MemTotal snapshots. If the
// /proc interface is unreadable the summary degrades to wall clock only
// with available=false.
class ResourceMonitor {
public:
    void start();
    ResourceSummary stop();

private:
    void sample_memory();

    std::thread worker_;
    std::mutex mutex_;
    std::condition_variable wake_;
    bool stopping_ = false;
    bool degraded_ = false;
    std::chrono::steady_clock::time_point started_;
    double start_ticks_ = 0.0;
    std::vector<double> memory_percents_;
};

// Balances the dataset, optionally keeps the top chi-square features,
// splits into stratified folds, and runs the per-fold pipeline: normalize
// with the training folds' bounds, train the cGAN on the training folds,
// generate S (training-sized) and s (evaluation-sized), train classifiers
// on real and synthetic data, evaluate every enabled protocol, and score
// fidelity of s against the real evaluation fold. Folds run on up to
// `workers` threads; results merge in fold index order and all randomness
// derives from master_seed and the fold index, so reports are identical
// across worker counts. A fold that throws is recorded in incomplete_folds
// and excluded from aggregates and statistics.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const tabular::LabeledDataset& dataset);

// Loads config.dataset_path as CSV first.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Per-(classifier, protocol, metric) mean and population standard deviation
// over folds. Throws on an empty record set.
std::vector<AggregateEntry> aggregate(const std::vector<EvaluationRecord>& records);

// Report serialization. The resource block is the only part that varies
// between runs of the same seed, so it can be skipped when comparing runs.
std::string report_to_json(const ExperimentReport& report, bool include_resources = true);

std::string folds_to_csv(const std::vector<EvaluationRecord>& records);

}  // namespace syntab::bench
