#include "syntab/bench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace syntab::bench {

namespace {

constexpr const char* kMetricNames[] = {"accuracy", "precision", "recall", "f1", "auc"};
constexpr std::size_t kMetricCount = 5;

double metric_value(const eval::UtilityMetrics& m, std::size_t index) {
    switch (index) {
        case 0: return m.accuracy;
        case 1: return m.precision;
        case 2: return m.recall;
        case 3: return m.f1;
        default: return m.auc;
    }
}

bool enabled(const std::vector<Protocol>& protocols, Protocol p) {
    return std::find(protocols.begin(), protocols.end(), p) != protocols.end();
}

struct FoldOutcome {
    std::vector<EvaluationRecord> records;
    std::vector<FidelityRecord> fidelity;
    cgan::TrainLog train_log;
    bool failed = false;
    std::string error;
};

EvaluationRecord evaluate(std::size_t fold, classifiers::Kind kind, Protocol protocol,
                          const classifiers::TrainedClassifier& model,
                          const tabular::LabeledDataset& test_set) {
    const std::vector<double> scores = classifiers::predict_scores(model, test_set.features);
    const std::vector<int> predicted =
        classifiers::predict_labels(scores, classifiers::decision_threshold(model));

    EvaluationRecord record;
    record.fold = fold;
    record.classifier = kind;
    record.protocol = protocol;
    record.confusion = eval::confusion(test_set.labels, predicted);
    record.metrics = eval::utility_from_confusion(record.confusion);
    record.metrics.auc = eval::roc_auc(test_set.labels, scores).auc;
    return record;
}

FoldOutcome run_fold(const ExperimentConfig& config, const tabular::LabeledDataset& ds,
                     const std::vector<std::size_t>& train_idx,
                     const std::vector<std::size_t>& eval_idx, std::size_t fold) {
    const tabular::LabeledDataset train_raw = tabular::take_rows(ds, train_idx);
    const tabular::LabeledDataset eval_raw = tabular::take_rows(ds, eval_idx);
    auto [train_real, bounds] = tabular::min_max_normalize(train_raw);
    auto [eval_real, eval_bounds] = tabular::min_max_normalize(eval_raw, bounds);

    // Every stream below depends only on the master seed and the fold index,
    // never on which worker picked the fold up.
    Rng fold_rng = Rng(config.master_seed).child(0xF01D).child(fold);

    cgan::CganConfig gan_config = config.cgan;
    gan_config.seed = fold_rng.child(0).next_u64();
    cgan::CganModel model = cgan::build(gan_config, train_real.cols());
    Rng train_rng = fold_rng.child(1);
    FoldOutcome out;
    out.train_log = cgan::train(model, train_real, gan_config, train_rng);

    Rng synth_train_rng = fold_rng.child(2);
    tabular::LabeledDataset synth_train =
        cgan::generate(model, tabular::class_counts(train_real), synth_train_rng);
    Rng synth_eval_rng = fold_rng.child(3);
    tabular::LabeledDataset synth_eval = cgan::synthesize_eval(model, eval_real, synth_eval_rng);
    if (config.binarize_synthetic) {
        synth_train = cgan::binarize(synth_train);
        synth_eval = cgan::binarize(synth_eval);
    }

    const bool need_real_model =
        enabled(config.protocols, Protocol::Trts) || enabled(config.protocols, Protocol::Trtr);
    const bool need_synth_model = enabled(config.protocols, Protocol::Tstr);

    for (std::size_t i = 0; i < config.enabled_classifiers.size(); ++i) {
        const classifiers::Kind kind = config.enabled_classifiers[i];
        classifiers::TrainedClassifier on_real;
        classifiers::TrainedClassifier on_synth;
        if (need_real_model) {
            on_real = classifiers::train(kind, train_real, config.classifier_params,
                                         fold_rng.child(10 + i).next_u64());
        }
        if (need_synth_model) {
            on_synth = classifiers::train(kind, synth_train, config.classifier_params,
                                          fold_rng.child(30 + i).next_u64());
        }
        for (Protocol protocol : config.protocols) {
            switch (protocol) {
                case Protocol::Tstr:
                    out.records.push_back(evaluate(fold, kind, protocol, on_synth, eval_real));
                    break;
                case Protocol::Trts:
                    out.records.push_back(evaluate(fold, kind, protocol, on_real, synth_eval));
                    break;
                case Protocol::Trtr:
                    out.records.push_back(evaluate(fold, kind, protocol, on_real, eval_real));
                    break;
            }
        }
    }

    for (const eval::FidelityMetrics& m : eval::fidelity_report(eval_real, synth_eval)) {
        out.fidelity.push_back({fold, m});
    }
    return out;
}

// Per-fold metric values for one classifier/protocol pair, in fold order.
std::vector<double> metric_series(const std::vector<EvaluationRecord>& records,
                                  classifiers::Kind kind, Protocol protocol,
                                  std::size_t metric_index) {
    std::vector<double> values;
    for (const EvaluationRecord& r : records) {
        if (r.classifier == kind && r.protocol == protocol) {
            values.push_back(metric_value(r.metrics, metric_index));
        }
    }
    return values;
}

void append_pairings(ExperimentReport& report, classifiers::Kind kind, Protocol baseline,
                     std::vector<double>* wilcoxon_ps, std::vector<double>* mann_whitney_ps) {
    for (std::size_t m = 0; m < kMetricCount; ++m) {
        PairedStat stat;
        stat.classifier = kind;
        stat.metric = kMetricNames[m];
        stat.baseline = protocol_name(baseline);
        const std::vector<double> synth =
            metric_series(report.records, kind, Protocol::Tstr, m);
        const std::vector<double> base = metric_series(report.records, kind, baseline, m);
        stat.wilcoxon = stats::wilcoxon_signed_rank(synth, base);
        stat.mann_whitney = stats::mann_whitney_u(synth, base);
        if (wilcoxon_ps != nullptr) wilcoxon_ps->push_back(stat.wilcoxon.p_value);
        if (mann_whitney_ps != nullptr) mann_whitney_ps->push_back(stat.mann_whitney.p_value);
        report.pairings.push_back(std::move(stat));
    }
}

template <typename T>
bool has_duplicates(std::vector<T> items) {
    std::sort(items.begin(), items.end());
    return std::adjacent_find(items.begin(), items.end()) != items.end();
}

}  // namespace

std::string tool_version() { return "0.1.0"; }

std::string protocol_name(Protocol protocol) {
    switch (protocol) {
        case Protocol::Tstr: return "TSTR";
        case Protocol::Trts: return "TRTS";
        case Protocol::Trtr: return "TRTR";
    }
    return "unknown";
}

Protocol protocol_from_name(const std::string& name) {
    std::string upper = name;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "TSTR") return Protocol::Tstr;
    if (upper == "TRTS") return Protocol::Trts;
    if (upper == "TRTR") return Protocol::Trtr;
    throw std::invalid_argument("unknown protocol: " + name);
}

void validate(const ExperimentConfig& config) {
    if (config.k < 2) throw std::invalid_argument("experiment config: k must be >= 2");
    if (config.enabled_classifiers.empty()) {
        throw std::invalid_argument("experiment config: no classifiers enabled");
    }
    if (config.protocols.empty()) {
        throw std::invalid_argument("experiment config: no protocols enabled");
    }
    if (has_duplicates(config.enabled_classifiers)) {
        throw std::invalid_argument("experiment config: duplicate classifier");
    }
    if (has_duplicates(config.protocols)) {
        throw std::invalid_argument("experiment config: duplicate protocol");
    }
    if (config.workers < 1) throw std::invalid_argument("experiment config: workers must be >= 1");
    cgan::validate(config.cgan);
}

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const tabular::LabeledDataset& dataset) {
    validate(config);
    ResourceMonitor monitor;
    monitor.start();

    Rng master(config.master_seed);
    tabular::LabeledDataset prepared =
        tabular::balance_by_undersampling(dataset, master.child(1).next_u64()).first;
    if (config.top_features > 0) {
        prepared = tabular::chi_square_select(prepared, config.top_features).first;
    }
    const tabular::FoldPlan plan =
        tabular::stratified_kfold(prepared, config.k, master.child(2).next_u64());

    std::vector<std::vector<std::size_t>> eval_idx(config.k);
    std::vector<std::vector<std::size_t>> train_idx(config.k);
    for (std::size_t i = 0; i < plan.assignments.size(); ++i) {
        eval_idx[plan.assignments[i]].push_back(i);
        for (std::size_t f = 0; f < config.k; ++f) {
            if (plan.assignments[i] != f) train_idx[f].push_back(i);
        }
    }
    for (std::size_t f = 0; f < config.k; ++f) {
        std::vector<bool> held_out(plan.assignments.size(), false);
        for (std::size_t i : eval_idx[f]) held_out[i] = true;
        for (std::size_t i : train_idx[f]) {
            if (held_out[i]) {
                throw std::logic_error("fold " + std::to_string(f) +
                                       " evaluation rows leaked into training");
            }
        }
    }

    std::vector<FoldOutcome> outcomes(config.k);
    std::atomic<std::size_t> next_fold{0};
    auto work = [&] {
        for (;;) {
            const std::size_t f = next_fold.fetch_add(1);
            if (f >= config.k) break;
            try {
                outcomes[f] = run_fold(config, prepared, train_idx[f], eval_idx[f], f);
            } catch (const std::exception& e) {
                outcomes[f].failed = true;
                outcomes[f].error = e.what();
            }
        }
    };
    const std::size_t thread_count = std::min(config.workers, config.k);
    if (thread_count <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    ExperimentReport report;
    report.config = config;
    for (std::size_t f = 0; f < config.k; ++f) {
        if (outcomes[f].failed) {
            report.incomplete_folds.push_back({f, outcomes[f].error});
            continue;
        }
        report.records.insert(report.records.end(), outcomes[f].records.begin(),
                              outcomes[f].records.end());
        report.fidelity.insert(report.fidelity.end(), outcomes[f].fidelity.begin(),
                               outcomes[f].fidelity.end());
        report.train_logs.emplace_back(f, std::move(outcomes[f].train_log));
    }

    if (!report.records.empty()) {
        report.aggregates = aggregate(report.records);

        const bool have_tstr = enabled(config.protocols, Protocol::Tstr);
        const bool have_trtr = enabled(config.protocols, Protocol::Trtr);
        const bool have_trts = enabled(config.protocols, Protocol::Trts);
        for (classifiers::Kind kind : config.enabled_classifiers) {
            if (have_tstr && have_trtr) {
                std::vector<double> wilcoxon_ps;
                std::vector<double> mann_whitney_ps;
                append_pairings(report, kind, Protocol::Trtr, &wilcoxon_ps, &mann_whitney_ps);
                ClassifierStat summary;
                summary.classifier = kind;
                const stats::AggregateDecision w = stats::aggregate_p(wilcoxon_ps);
                summary.mean_wilcoxon_p = w.mean_p;
                summary.mean_mann_whitney_p = stats::aggregate_p(mann_whitney_ps).mean_p;
                summary.reject_h0 = w.reject_h0;
                report.per_classifier.push_back(summary);
            }
            if (have_tstr && have_trts) {
                append_pairings(report, kind, Protocol::Trts, nullptr, nullptr);
            }
        }
    }

    report.resources = monitor.stop();
    report.resources.workers = config.workers;
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    return run_experiment(
        config, tabular::load_csv(config.dataset_path, config.label_column,
                                  config.positive_label));
}

std::vector<AggregateEntry> aggregate(const std::vector<EvaluationRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");

    constexpr classifiers::Kind kKinds[] = {
        classifiers::Kind::LinearSvm, classifiers::Kind::DecisionTree,
        classifiers::Kind::GradientBoostedTrees, classifiers::Kind::SgdLinear};
    constexpr Protocol kProtocols[] = {Protocol::Tstr, Protocol::Trts, Protocol::Trtr};

    std::vector<AggregateEntry> out;
    for (classifiers::Kind kind : kKinds) {
        for (Protocol protocol : kProtocols) {
            std::vector<std::vector<double>> values(kMetricCount);
            for (const EvaluationRecord& r : records) {
                if (r.classifier != kind || r.protocol != protocol) continue;
                for (std::size_t m = 0; m < kMetricCount; ++m) {
                    values[m].push_back(metric_value(r.metrics, m));
                }
            }
            if (values[0].empty()) continue;
            for (std::size_t m = 0; m < kMetricCount; ++m) {
                const std::size_t n = values[m].size();
                double mean = 0.0;
                for (double v : values[m]) mean += v;
                mean /= static_cast<double>(n);
                double variance = 0.0;
                for (double v : values[m]) variance += (v - mean) * (v - mean);
                variance /= static_cast<double>(n);
                out.push_back({kind, protocol, kMetricNames[m], mean, std::sqrt(variance)});
            }
        }
    }
    return out;
}

}  // namespace syntab::bench
