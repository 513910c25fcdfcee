#include "syntab/tabular/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "syntab/rng.hpp"

namespace syntab::tabular {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

}  // namespace

LabeledDataset load_csv(const std::string& path, const std::string& label_column,
                        const std::string& positive_label) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_csv: " + path + " is empty");
    const std::vector<std::string> raw_header = split_line(line);

    std::vector<std::string> names;
    std::size_t label_idx = raw_header.size();
    for (std::size_t i = 0; i < raw_header.size(); ++i) {
        const std::string name = trim(raw_header[i]);
        if (name == label_column) {
            if (label_idx != raw_header.size()) {
                throw std::runtime_error("load_csv: duplicate label column '" + label_column + "'");
            }
            label_idx = i;
        } else {
            names.push_back(name);
        }
    }
    if (label_idx == raw_header.size()) {
        throw std::runtime_error("load_csv: label column '" + label_column + "' not found in " + path);
    }
    {
        std::set<std::string> seen;
        for (const std::string& n : names) {
            if (!seen.insert(n).second) {
                throw std::runtime_error("load_csv: duplicate feature column '" + n + "'");
            }
        }
    }

    const std::size_t d = names.size();
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != raw_header.size()) {
            throw std::runtime_error("load_csv: line " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(raw_header.size()));
        }
        std::size_t fi = 0;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string cell = trim(fields[i]);
            if (i == label_idx) {
                labels.push_back(cell == positive_label ? 1 : 0);
                continue;
            }
            const char* begin = cell.c_str();
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (cell.empty() || end != begin + cell.size()) {
                throw std::runtime_error("load_csv: non-numeric value '" + cell + "' at line " +
                                         std::to_string(line_no) + ", column '" + names[fi] + "'");
            }
            values.push_back(v);
            ++fi;
        }
    }
    if (labels.empty()) throw std::runtime_error("load_csv: " + path + " has no data rows");

    LabeledDataset ds;
    ds.features = Matrix(labels.size(), d, std::move(values));
    ds.labels = std::move(labels);
    ds.feature_names = std::move(names);
    ds.origin = Origin::Real;
    return ds;
}

std::pair<LabeledDataset, std::vector<FeatureBounds>> min_max_normalize(
    const LabeledDataset& ds, const std::optional<std::vector<FeatureBounds>>& bounds) {
    const std::size_t d = ds.cols();
    std::vector<FeatureBounds> used(d);
    if (bounds) {
        if (bounds->size() != d) {
            throw std::invalid_argument("min_max_normalize: bounds length " +
                                        std::to_string(bounds->size()) + ", expected " +
                                        std::to_string(d));
        }
        for (const FeatureBounds& b : *bounds) {
            if (b.min > b.max) throw std::invalid_argument("min_max_normalize: bounds with min > max");
        }
        used = *bounds;
    } else {
        for (std::size_t j = 0; j < d; ++j) {
            double lo = ds.features.at(0, j);
            double hi = lo;
            for (std::size_t i = 1; i < ds.rows(); ++i) {
                const double v = ds.features.at(i, j);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            used[j] = {lo, hi};
        }
    }

    LabeledDataset out = ds;
    for (std::size_t j = 0; j < d; ++j) {
        const double lo = used[j].min;
        const double span = used[j].max - lo;
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            double v = span == 0.0 ? 0.0 : (ds.features.at(i, j) - lo) / span;
            v = std::clamp(v, 0.0, 1.0);
            out.features.at(i, j) = v;
        }
    }
    return {std::move(out), std::move(used)};
}

std::pair<LabeledDataset, BalanceReport> balance_by_undersampling(const LabeledDataset& ds,
                                                                  std::uint64_t seed) {
    const std::array<std::size_t, 2> counts = class_counts(ds);
    if (counts[0] == 0 || counts[1] == 0) {
        throw std::invalid_argument("balance_by_undersampling: both classes must be present");
    }
    BalanceReport report;
    report.seed = seed;
    report.kept_per_class = std::min(counts[0], counts[1]);

    if (counts[0] != counts[1]) {
        const int majority = counts[0] > counts[1] ? 0 : 1;
        std::vector<std::size_t> majority_rows;
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            if (ds.labels[i] == majority) majority_rows.push_back(i);
        }
        Rng rng(seed);
        rng.shuffle(majority_rows);
        const std::size_t drop = majority_rows.size() - report.kept_per_class;
        report.dropped_indices.assign(majority_rows.begin(), majority_rows.begin() + drop);
        std::sort(report.dropped_indices.begin(), report.dropped_indices.end());
    }

    std::vector<std::size_t> keep;
    keep.reserve(ds.rows() - report.dropped_indices.size());
    std::size_t next_drop = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (next_drop < report.dropped_indices.size() && report.dropped_indices[next_drop] == i) {
            ++next_drop;
        } else {
            keep.push_back(i);
        }
    }
    return {take_rows(ds, keep), std::move(report)};
}

FoldPlan stratified_kfold(const LabeledDataset& ds, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_kfold: k must be at least 2");
    const std::array<std::size_t, 2> counts = class_counts(ds);
    for (int c = 0; c < 2; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0 && counts[static_cast<std::size_t>(c)] < k) {
            throw std::invalid_argument("stratified_kfold: class " + std::to_string(c) + " has " +
                                        std::to_string(counts[static_cast<std::size_t>(c)]) +
                                        " rows, fewer than k=" + std::to_string(k));
        }
    }

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(ds.rows(), 0);

    Rng rng(seed);
    // The classes' remainder folds are staggered: class 0's extra rows go to
    // folds [0, r0), class 1's to folds [r0, r0+r1) mod k. Total sizes then
    // differ by at most 1.
    std::size_t extra_start = 0;
    for (int c = 0; c < 2; ++c) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            if (ds.labels[i] == c) rows.push_back(i);
        }
        if (rows.empty()) continue;
        rng.shuffle(rows);
        const std::size_t base = rows.size() / k;
        const std::size_t rem = rows.size() % k;
        std::size_t cursor = 0;
        for (std::size_t f = 0; f < k; ++f) {
            std::size_t take = base;
            for (std::size_t e = 0; e < rem; ++e) {
                if ((extra_start + e) % k == f) {
                    ++take;
                    break;
                }
            }
            for (std::size_t t = 0; t < take; ++t) plan.assignments[rows[cursor++]] = f;
        }
        extra_start = (extra_start + rem) % k;
    }
    return plan;
}

std::pair<LabeledDataset, std::vector<std::size_t>> chi_square_select(const LabeledDataset& ds,
                                                                      std::size_t top_m) {
    const std::size_t d = ds.cols();
    if (top_m == 0) throw std::invalid_argument("chi_square_select: top_m must be positive");
    if (top_m > d) {
        throw std::invalid_argument("chi_square_select: top_m " + std::to_string(top_m) +
                                    " exceeds feature count " + std::to_string(d));
    }

    const double n = static_cast<double>(ds.rows());
    std::vector<std::pair<double, std::size_t>> ranked(d);
    for (std::size_t j = 0; j < d; ++j) {
        double a = 0, b = 0, c = 0, dd = 0;  // (on,pos) (on,neg) (off,pos) (off,neg)
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            const bool on = ds.features.at(i, j) >= 0.5;
            const bool pos = ds.labels[i] == 1;
            if (on && pos) ++a;
            else if (on) ++b;
            else if (pos) ++c;
            else ++dd;
        }
        const double denom = (a + b) * (c + dd) * (a + c) * (b + dd);
        const double diff = a * dd - b * c;
        const double stat = denom == 0.0 ? 0.0 : n * diff * diff / denom;
        ranked[j] = {stat, j};
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;
    });

    std::vector<std::size_t> selected(top_m);
    for (std::size_t r = 0; r < top_m; ++r) selected[r] = ranked[r].second;

    LabeledDataset out;
    out.features = Matrix(ds.rows(), top_m);
    out.labels = ds.labels;
    out.origin = ds.origin;
    out.feature_names.reserve(top_m);
    for (std::size_t r = 0; r < top_m; ++r) {
        out.feature_names.push_back(ds.feature_names[selected[r]]);
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            out.features.at(i, r) = ds.features.at(i, selected[r]);
        }
    }
    return {std::move(out), std::move(selected)};
}

LabeledDataset take_rows(const LabeledDataset& ds, const std::vector<std::size_t>& indices) {
    LabeledDataset out;
    out.features = Matrix(indices.size(), ds.cols());
    out.labels.reserve(indices.size());
    out.feature_names = ds.feature_names;
    out.origin = ds.origin;
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const std::size_t src = indices[r];
        if (src >= ds.rows()) throw std::out_of_range("take_rows: index past end");
        const double* from = ds.features.row_ptr(src);
        double* to = out.features.row_ptr(r);
        for (std::size_t j = 0; j < ds.cols(); ++j) to[j] = from[j];
        out.labels.push_back(ds.labels[src]);
    }
    return out;
}

std::array<std::size_t, 2> class_counts(const LabeledDataset& ds) {
    std::array<std::size_t, 2> counts = {0, 0};
    for (int lbl : ds.labels) {
        if (lbl != 0 && lbl != 1) throw std::invalid_argument("class_counts: label outside {0,1}");
        counts[static_cast<std::size_t>(lbl)]++;
    }
    return counts;
}

std::string fold_plan_to_json(const FoldPlan& plan) {
    nlohmann::json j;
    j["k"] = plan.k;
    j["seed"] = plan.seed;
    j["assignments"] = plan.assignments;
    return j.dump();
}

std::string balance_report_to_json(const BalanceReport& report) {
    nlohmann::json j;
    j["kept_per_class"] = report.kept_per_class;
    j["seed"] = report.seed;
    j["dropped_indices"] = report.dropped_indices;
    return j.dump();
}

}  // namespace syntab::tabular
