#include <cstdio>

#include "json.hpp"
#include "syntab/bench/bench.hpp"

namespace syntab::bench {

namespace {

using nlohmann::json;

json cgan_config_to_json(const cgan::CganConfig& c) {
    return {{"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"gen_neurons", c.gen_neurons},
            {"disc_neurons", c.disc_neurons},
            {"gen_dropout", c.gen_dropout},
            {"disc_dropout", c.disc_dropout},
            {"init_stddev", c.init_stddev},
            {"latent_dim", c.latent_dim},
            {"embed_dim", c.embed_dim}};
}

json classifier_params_to_json(const classifiers::ClassifierParams& p) {
    return {{"svm", {{"lambda", p.svm.lambda}, {"epochs", p.svm.epochs}}},
            {"tree", {{"max_depth", p.tree.max_depth}, {"min_leaf", p.tree.min_leaf}}},
            {"gbt",
             {{"rounds", p.gbt.rounds},
              {"max_depth", p.gbt.max_depth},
              {"learning_rate", p.gbt.learning_rate}}},
            {"sgd", {{"epochs", p.sgd.epochs}, {"learning_rate", p.sgd.learning_rate}}}};
}

// The workers count is deliberately absent here: it changes execution, not
// the experiment, and lives in the resources block so that reports from
// different worker counts stay byte-identical outside that block.
json config_to_json(const ExperimentConfig& c) {
    json classifier_names = json::array();
    for (classifiers::Kind kind : c.enabled_classifiers) {
        classifier_names.push_back(classifiers::kind_name(kind));
    }
    json protocol_names = json::array();
    for (Protocol p : c.protocols) protocol_names.push_back(protocol_name(p));
    return {{"dataset", c.dataset_path},
            {"label_column", c.label_column},
            {"positive_label", c.positive_label},
            {"k", c.k},
            {"cgan", cgan_config_to_json(c.cgan)},
            {"classifier_params", classifier_params_to_json(c.classifier_params)},
            {"classifiers", classifier_names},
            {"protocols", protocol_names},
            {"master_seed", c.master_seed},
            {"binarize_synthetic", c.binarize_synthetic},
            {"top_features", c.top_features}};
}

json test_result_to_json(const stats::TestResult& r) {
    return {{"statistic", r.statistic},
            {"p_value", r.p_value},
            {"method", r.method == stats::Method::Exact ? "exact" : "normal_approx"},
            {"n_effective", r.n_effective},
            {"degenerate", r.degenerate}};
}

json record_to_json(const EvaluationRecord& r) {
    return {{"fold", r.fold},
            {"classifier", classifiers::kind_name(r.classifier)},
            {"protocol", protocol_name(r.protocol)},
            {"confusion",
             {{"tp", r.confusion.tp},
              {"fp", r.confusion.fp},
              {"tn", r.confusion.tn},
              {"fn", r.confusion.fn}}},
            {"metrics",
             {{"accuracy", r.metrics.accuracy},
              {"precision", r.metrics.precision},
              {"recall", r.metrics.recall},
              {"f1", r.metrics.f1},
              {"auc", r.metrics.auc},
              {"degenerate", r.metrics.degenerate}}}};
}

}  // namespace

std::string report_to_json(const ExperimentReport& report, bool include_resources) {
    json j;
    j["format"] = "syntab.report";
    j["version"] = 1;
    j["tool_version"] = tool_version();
    j["config"] = config_to_json(report.config);

    j["folds"] = json::array();
    for (const EvaluationRecord& r : report.records) j["folds"].push_back(record_to_json(r));

    j["fidelity"] = json::array();
    for (const FidelityRecord& f : report.fidelity) {
        j["fidelity"].push_back({{"fold", f.fold},
                                 {"class", f.metrics.class_label},
                                 {"cosine", f.metrics.cosine},
                                 {"euclidean_sq", f.metrics.euclidean_sq},
                                 {"mse", f.metrics.mse}});
    }

    json pairings = json::array();
    for (const PairedStat& s : report.pairings) {
        pairings.push_back({{"classifier", classifiers::kind_name(s.classifier)},
                            {"metric", s.metric},
                            {"baseline", s.baseline},
                            {"wilcoxon", test_result_to_json(s.wilcoxon)},
                            {"mann_whitney", test_result_to_json(s.mann_whitney)}});
    }
    json per_classifier = json::array();
    for (const ClassifierStat& s : report.per_classifier) {
        per_classifier.push_back({{"classifier", classifiers::kind_name(s.classifier)},
                                  {"mean_wilcoxon_p", s.mean_wilcoxon_p},
                                  {"mean_mann_whitney_p", s.mean_mann_whitney_p},
                                  {"reject_h0", s.reject_h0}});
    }
    j["stats"] = {{"pairings", pairings}, {"per_classifier", per_classifier}};

    j["aggregates"] = json::array();
    for (const AggregateEntry& a : report.aggregates) {
        j["aggregates"].push_back({{"classifier", classifiers::kind_name(a.classifier)},
                                   {"protocol", protocol_name(a.protocol)},
                                   {"metric", a.metric},
                                   {"mean", a.mean},
                                   {"stddev", a.stddev}});
    }

    j["incomplete_folds"] = json::array();
    for (const FoldFailure& f : report.incomplete_folds) {
        j["incomplete_folds"].push_back({{"fold", f.fold}, {"error", f.message}});
    }

    if (include_resources) {
        j["resources"] = {{"avg_cpu_percent", report.resources.avg_cpu_percent},
                          {"avg_memory_percent", report.resources.avg_memory_percent},
                          {"wall_clock_seconds", report.resources.wall_clock_seconds},
                          {"samples", report.resources.samples},
                          {"workers", report.resources.workers},
                          {"available", report.resources.available}};
    }
    return j.dump(2) + "\n";
}

std::string folds_to_csv(const std::vector<EvaluationRecord>& records) {
    std::string out = "fold,classifier,protocol,tp,fp,tn,fn,accuracy,precision,recall,f1,auc\n";
    char line[256];
    for (const EvaluationRecord& r : records) {
        std::snprintf(line, sizeof(line), "%zu,%s,%s,%zu,%zu,%zu,%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                      r.fold, classifiers::kind_name(r.classifier).c_str(),
                      protocol_name(r.protocol).c_str(), r.confusion.tp, r.confusion.fp,
                      r.confusion.tn, r.confusion.fn, r.metrics.accuracy, r.metrics.precision,
                      r.metrics.recall, r.metrics.f1, r.metrics.auc);
        out += line;
    }
    return out;
}

}  // namespace syntab::bench
