#pragma once

#include <cstdint>
#include <vector>

#include "fastperm/poisson_glm.hpp"
#include "fastperm/statistics.hpp"

// Monte Carlo estimators. p_simple_mc is plain resampling over the whole
// permutation space; p_pred samples partitions in order until the first empty
// stratum, fits the Poisson trend to the counts, and aggregates the predicted
// per-partition exceedance rates weighted by the partition pmf, all in log
// space (the estimates of interest can be hundreds of orders of magnitude
// below 1).

namespace fastperm {

struct SimpleMcResult {
    double p = 0.0;
    long long exceedances = 0;
    long long b = 0;
};

SimpleMcResult p_simple_mc(const TwoSample& data, StatisticKind kind, long long b, RandomEngine& rng);

// Exceedance count with resampling restricted to partition m.
long long partition_mc(const TwoSample& data, StatisticKind kind, int m, long long b,
                       RandomEngine& rng);

struct PartitionCounts {
    long long b_pred = 0;
    std::vector<long long> counts;  // c[0..m_stop]
    int m_stop = 0;                 // last sampled partition
    int m_reg = 0;                  // largest m <= m_max with c[m] > 0
};

enum class PredStatus {
    Ok,
    BelowResolution  // first stratum came back empty; only a bound is reported
};

struct PredReport {
    double log10_p = 0.0;
    PredStatus status = PredStatus::Ok;
    PartitionCounts counts;
    PoissonFit fit;
    long long total_iterations = 0;
    std::uint64_t seed = 0;
    double imbalance = 1.0;  // n_max / n_min
};

// The stratified-resampling estimator. Deterministic for a given seed.
PredReport p_pred(const TwoSample& data, StatisticKind kind, long long b_pred, std::uint64_t seed);

}  // namespace fastperm
