#pragma once

#include <vector>

#include "fastperm/statistics.hpp"

// Closed-form approximations: per-partition tail probabilities, the overall
// p-value they aggregate to, the predicted stopping partition, and the
// equal-n sample-size recommendation. Supports AbsDiff and MaxRatio only (the
// studentized statistic has no closed-form transform).

namespace fastperm {

// Standardized distance from the observed statistic t to the center of the
// partition-m distribution of g(W(m)). Requires V(m) > 0.
double xi(const SummaryPair& s, StatisticKind kind, int m, double t);

// Same for the conjugate (group-swapped) transform; computed by evaluating
// xi with the roles of the groups reversed, which also keeps the derivative
// positive.
double xi_conj(const SummaryPair& s, StatisticKind kind, int m, double t);

// Approximate Pr(T(m) >= t): 1 at m = 0 (and at m = n_min for equal group
// sizes), otherwise the two-sided normal tail at the reflected index
// min(m, 2*m_max - m), clamped to [0,1].
double partition_pvalue_asym(const SummaryPair& s, StatisticKind kind, int m, double t);

struct AsymReport {
    double log10_p = 0.0;
    std::vector<double> per_partition_log_h;  // length n_min + 1
    int m_max = 0;
};

// Overall closed-form p-value: log-sum-exp of log h(m) + log f(m). The
// aggregation reflects about the pmf mode's successor index, matching the
// reference tables; see partition_pvalue_asym for the standalone
// per-partition approximation.
AsymReport p_asym(const SummaryPair& s, StatisticKind kind, double t);

// Smallest m whose partition tail drops below 1/b_pred: the partition where
// the resampler is expected to stop. Falls back to the scan bound when the
// threshold is never crossed.
int m_stop_asym(const SummaryPair& s, StatisticKind kind, double t, long long b_pred);

// Smallest equal group size n with m_stop_asym >= c, for plugged-in means
// and variances (t is derived from the means). Throws if no n <= 1e6 works.
int n_hat(double mean_x, double mean_y, double var_x, double var_y, StatisticKind kind,
          long long b_pred, int c);

}  // namespace fastperm
