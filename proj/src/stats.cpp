#include "syntab/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace syntab::stats {

namespace {

// 1-based ranks with ties replaced by the group average.
std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double avg = static_cast<double>(i + 1 + j) / 2.0;
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = avg;
        i = j;
    }
    return ranks;
}

// Sum of (t^3 - t) over tie groups.
double tie_term(const std::vector<double>& values) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        total += t * t * t - t;
        i = j;
    }
    return total;
}

double two_sided_from_z(double z) {
    return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

double continuity_z(double stat, double mean, double sd) {
    if (sd == 0.0) return 0.0;
    if (stat > mean) return (stat - mean - 0.5) / sd;
    if (stat < mean) return (stat - mean + 0.5) / sd;
    return 0.0;
}

}  // namespace

namespace detail {

TestResult wilcoxon_impl(const std::vector<double>& a, const std::vector<double>& b,
                         std::optional<Method> force) {
    if (a.size() != b.size()) throw std::invalid_argument("wilcoxon_signed_rank: lengths differ");
    if (a.empty()) throw std::invalid_argument("wilcoxon_signed_rank: empty samples");

    std::vector<double> abs_diff;
    std::vector<int> sign;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d == 0.0) continue;
        abs_diff.push_back(std::abs(d));
        sign.push_back(d > 0.0 ? 1 : -1);
    }
    const std::size_t n = abs_diff.size();

    TestResult result;
    result.n_effective = n;
    if (n == 0) {
        result.degenerate = true;
        result.p_value = 1.0;
        result.method = Method::Exact;
        return result;
    }

    const std::vector<double> ranks = average_ranks(abs_diff);
    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sign[i] > 0) w_plus += ranks[i];
    }
    const double w_total = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
    const double w_minus = w_total - w_plus;
    result.statistic = std::min(w_plus, w_minus);

    const bool exact = force ? *force == Method::Exact : n <= 25;
    if (exact) {
        // Doubled ranks are integers, so the distribution of W+ over all 2^n
        // sign assignments fits a dense count array.
        std::vector<long long> doubled(n);
        long long doubled_total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = std::llround(2.0 * ranks[i]);
            doubled_total += doubled[i];
        }
        std::vector<double> count(static_cast<std::size_t>(doubled_total) + 1, 0.0);
        count[0] = 1.0;
        long long reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            reach += doubled[i];
            for (long long s = reach; s >= doubled[i]; --s) {
                count[static_cast<std::size_t>(s)] +=
                    count[static_cast<std::size_t>(s - doubled[i])];
            }
        }
        const long long s_min = std::llround(2.0 * result.statistic);
        double tail = 0.0;
        for (long long s = 0; s <= s_min; ++s) tail += count[static_cast<std::size_t>(s)];
        const double assignments = std::pow(2.0, static_cast<double>(n));
        result.p_value = std::min(1.0, 2.0 * tail / assignments);
        result.method = Method::Exact;
    } else {
        const double dn = static_cast<double>(n);
        const double mean = dn * (dn + 1.0) / 4.0;
        const double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term(abs_diff) / 48.0;
        const double z = continuity_z(w_plus, mean, std::sqrt(var));
        result.p_value = two_sided_from_z(z);
        result.method = Method::NormalApprox;
    }
    return result;
}

TestResult mann_whitney_impl(const std::vector<double>& a, const std::vector<double>& b,
                             std::optional<Method> force) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    const std::size_t n = n1 + n2;

    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::vector<double> ranks = average_ranks(pooled);

    double r1 = 0.0;
    for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
    const double u1 = r1 - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
    const double u2 = static_cast<double>(n1) * static_cast<double>(n2) - u1;

    TestResult result;
    result.n_effective = n;
    result.statistic = std::min(u1, u2);

    const bool exact = force ? *force == Method::Exact : n <= 20;
    if (exact) {
        // Count subsets of the pooled ranks of size n1 by (chosen, doubled
        // rank sum); all C(n, n1) group assignments are equally likely under
        // H0, ties included.
        std::vector<long long> doubled(n);
        long long doubled_total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = std::llround(2.0 * ranks[i]);
            doubled_total += doubled[i];
        }
        std::vector<std::vector<double>> ways(
            n1 + 1, std::vector<double>(static_cast<std::size_t>(doubled_total) + 1, 0.0));
        ways[0][0] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t cmax = std::min(i + 1, n1);
            for (std::size_t c = cmax; c >= 1; --c) {
                const std::size_t g = static_cast<std::size_t>(doubled[i]);
                for (std::size_t s = static_cast<std::size_t>(doubled_total); s >= g; --s) {
                    ways[c][s] += ways[c - 1][s - g];
                }
            }
        }
        // doubled U1 = doubled R1 - n1(n1+1)
        const long long shift = static_cast<long long>(n1) * static_cast<long long>(n1 + 1);
        const long long u_lo = std::llround(2.0 * result.statistic);
        double tail = 0.0;
        double total = 0.0;
        for (std::size_t s = 0; s < ways[n1].size(); ++s) {
            const double w = ways[n1][s];
            if (w == 0.0) continue;
            total += w;
            if (static_cast<long long>(s) - shift <= u_lo) tail += w;
        }
        result.p_value = std::min(1.0, 2.0 * tail / total);
        result.method = Method::Exact;
    } else {
        const double dn1 = static_cast<double>(n1);
        const double dn2 = static_cast<double>(n2);
        const double dn = static_cast<double>(n);
        const double mean = dn1 * dn2 / 2.0;
        const double var =
            dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term(pooled) / (dn * (dn - 1.0)));
        if (var <= 0.0) {
            result.p_value = 1.0;  // every observation tied
        } else {
            const double z = continuity_z(u1, mean, std::sqrt(var));
            result.p_value = two_sided_from_z(z);
        }
        result.method = Method::NormalApprox;
    }
    return result;
}

}  // namespace detail

TestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    return detail::wilcoxon_impl(a, b, std::nullopt);
}

TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
    return detail::mann_whitney_impl(a, b, std::nullopt);
}

AggregateDecision aggregate_p(const std::vector<double>& per_metric_p) {
    if (per_metric_p.empty()) throw std::invalid_argument("aggregate_p: empty p-value list");
    double sum = 0.0;
    for (double p : per_metric_p) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("aggregate_p: p-value outside [0,1]");
        sum += p;
    }
    AggregateDecision d;
    d.mean_p = sum / static_cast<double>(per_metric_p.size());
    d.reject_h0 = d.mean_p < 0.05;
    return d;
}

}  // namespace syntab::stats
