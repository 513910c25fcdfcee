#include "syntab/cli/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace syntab::cli {

namespace {

constexpr const char* kMetricColumns[] = {"accuracy", "precision", "recall", "f1", "auc"};
constexpr std::size_t kMetricCount = 5;

// Light-to-dark sequential blues, one bucket per tenth.
constexpr const char* kRamp[] = {"#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6",
                                 "#4292c6", "#2171b5", "#08519c", "#08306b", "#041f4a"};

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string format(const char* pattern, double value) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), pattern, value);
    return buffer;
}

std::string text(double x, double y, const std::string& content, const std::string& fill,
                 int size, const std::string& anchor, const std::string& extra = "") {
    std::string out = "<text x=\"" + format("%.1f", x) + "\" y=\"" + format("%.1f", y) +
                      "\" fill=\"" + fill + "\" font-size=\"" + std::to_string(size) +
                      "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\"";
    if (!extra.empty()) out += " " + extra;
    return out + ">" + content + "</text>\n";
}

}  // namespace

std::string utility_heatmap_svg(const std::vector<bench::AggregateEntry>& aggregates) {
    if (aggregates.empty()) throw std::invalid_argument("heatmap: no aggregates");

    std::vector<std::pair<classifiers::Kind, bench::Protocol>> rows;
    for (const bench::AggregateEntry& a : aggregates) {
        const std::pair<classifiers::Kind, bench::Protocol> key{a.classifier, a.protocol};
        if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
    }

    auto mean_of = [&](const std::pair<classifiers::Kind, bench::Protocol>& row,
                       const char* metric) {
        for (const bench::AggregateEntry& a : aggregates) {
            if (a.classifier == row.first && a.protocol == row.second && a.metric == metric) {
                return a.mean;
            }
        }
        return 0.0;
    };

    const double cell_w = 72.0;
    const double cell_h = 34.0;
    const double left = 130.0;
    const double top = 30.0;
    const double width = left + kMetricCount * cell_w + 10.0;
    const double height = top + static_cast<double>(rows.size()) * cell_h + 10.0;

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      format("%.0f", width) + "\" height=\"" + format("%.0f", height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    for (std::size_t c = 0; c < kMetricCount; ++c) {
        svg += text(left + (c + 0.5) * cell_w, top - 9.0, kMetricColumns[c], "#1a1a1a", 13,
                    "middle");
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string label = classifiers::kind_name(rows[r].first) + " " +
                                  bench::protocol_name(rows[r].second);
        svg += text(left - 8.0, top + (r + 0.62) * cell_h, label, "#1a1a1a", 13, "end");
        for (std::size_t c = 0; c < kMetricCount; ++c) {
            const double value = mean_of(rows[r], kMetricColumns[c]);
            const int step =
                std::clamp(static_cast<int>(value * 10.0), 0, 9);
            svg += "<rect x=\"" + format("%.1f", left + c * cell_w) + "\" y=\"" +
                   format("%.1f", top + r * cell_h) + "\" width=\"" + format("%.1f", cell_w) +
                   "\" height=\"" + format("%.1f", cell_h) + "\" fill=\"" + kRamp[step] +
                   "\" stroke=\"#ffffff\"/>\n";
            svg += text(left + (c + 0.5) * cell_w, top + (r + 0.62) * cell_h,
                        format("%.2f", value), step >= 6 ? "#ffffff" : "#1a1a1a", 12, "middle");
        }
    }
    svg += "</svg>\n";
    return svg;
}

std::string cluster_scatter_svg(const Matrix& points,
                                const std::vector<std::size_t>& assignments, std::size_t k) {
    if (points.cols != 2) throw std::invalid_argument("scatter: points must be n x 2");
    if (assignments.size() != points.rows) {
        throw std::invalid_argument("scatter: one assignment per point required");
    }
    if (k == 0) throw std::invalid_argument("scatter: k must be >= 1");
    for (std::size_t a : assignments) {
        if (a >= k) throw std::invalid_argument("scatter: assignment outside [0,k)");
    }

    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t a : assignments) ++sizes[a];

    double min_x = 0.0, max_x = 1.0, min_y = 0.0, max_y = 1.0;
    if (points.rows > 0) {
        min_x = max_x = points.at(0, 0);
        min_y = max_y = points.at(0, 1);
        for (std::size_t i = 0; i < points.rows; ++i) {
            min_x = std::min(min_x, points.at(i, 0));
            max_x = std::max(max_x, points.at(i, 0));
            min_y = std::min(min_y, points.at(i, 1));
            max_y = std::max(max_y, points.at(i, 1));
        }
    }
    const double pad_x = (max_x - min_x) > 0.0 ? 0.05 * (max_x - min_x) : 1.0;
    const double pad_y = (max_y - min_y) > 0.0 ? 0.05 * (max_y - min_y) : 1.0;
    min_x -= pad_x;
    max_x += pad_x;
    min_y -= pad_y;
    max_y += pad_y;

    const double plot_left = 52.0;
    const double plot_top = 16.0;
    const double plot_w = 360.0;
    const double plot_h = 330.0;
    const double legend_x = plot_left + plot_w + 18.0;
    const double width = legend_x + 140.0;
    const double height = plot_top + plot_h + 44.0;

    auto sx = [&](double x) { return plot_left + (x - min_x) / (max_x - min_x) * plot_w; };
    auto sy = [&](double y) { return plot_top + plot_h - (y - min_y) / (max_y - min_y) * plot_h; };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      format("%.0f", width) + "\" height=\"" + format("%.0f", height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    svg += "<rect x=\"" + format("%.1f", plot_left) + "\" y=\"" + format("%.1f", plot_top) +
           "\" width=\"" + format("%.1f", plot_w) + "\" height=\"" + format("%.1f", plot_h) +
           "\" fill=\"none\" stroke=\"#444444\"/>\n";

    for (std::size_t i = 0; i < points.rows; ++i) {
        svg += "<circle cx=\"" + format("%.1f", sx(points.at(i, 0))) + "\" cy=\"" +
               format("%.1f", sy(points.at(i, 1))) + "\" r=\"3.5\" fill=\"" +
               kPalette[assignments[i] % 10] + "\" fill-opacity=\"0.8\"/>\n";
    }

    svg += text(plot_left + plot_w / 2.0, plot_top + plot_h + 32.0, "PC1", "#1a1a1a", 14,
                "middle");
    svg += text(16.0, plot_top + plot_h / 2.0, "PC2", "#1a1a1a", 14, "middle",
                "transform=\"rotate(-90 16 " + format("%.1f", plot_top + plot_h / 2.0) + ")\"");

    for (std::size_t c = 0; c < k; ++c) {
        const double y = plot_top + 10.0 + static_cast<double>(c) * 22.0;
        svg += "<rect x=\"" + format("%.1f", legend_x) + "\" y=\"" + format("%.1f", y - 9.0) +
               "\" width=\"12\" height=\"12\" fill=\"" + kPalette[c % 10] + "\"/>\n";
        svg += text(legend_x + 18.0, y + 2.0,
                    "cluster " + std::to_string(c) + " (n=" + std::to_string(sizes[c]) + ")",
                    "#1a1a1a", 13, "start");
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace syntab::cli
