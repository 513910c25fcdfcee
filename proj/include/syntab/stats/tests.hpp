#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace syntab::stats {

enum class Method { Exact, NormalApprox };

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    Method method = Method::Exact;
    std::size_t n_effective = 0;
    // All paired differences zero (Wilcoxon): nothing to test, p = 1.
    bool degenerate = false;
};

// Paired two-sided test. Zero differences are dropped, tied absolute
// differences get average ranks. Exact when the effective sample (nonzero
// differences) has at most 25 pairs, via a count DP over doubled ranks;
// otherwise a normal approximation with tie and continuity corrections.
// The statistic is min(W+, W-).
TestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

// Unpaired two-sided test; statistic is min(U1, U2) with average ranks for
// ties. Exact when n1 + n2 <= 20 by counting group assignments over the
// pooled ranks; tie-corrected normal approximation otherwise. n_effective
// reports n1 + n2.
TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

struct AggregateDecision {
    double mean_p = 1.0;
    bool reject_h0 = false;  // true iff mean_p < 0.05
};

AggregateDecision aggregate_p(const std::vector<double>& per_metric_p);

namespace detail {
// Same tests with the method pinned, for approximation-accuracy checks.
TestResult wilcoxon_impl(const std::vector<double>& a, const std::vector<double>& b,
                         std::optional<Method> force);
TestResult mann_whitney_impl(const std::vector<double>& a, const std::vector<double>& b,
                             std::optional<Method> force);
}  // namespace detail

}  // namespace syntab::stats
