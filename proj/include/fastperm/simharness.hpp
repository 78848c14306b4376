#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fastperm/resampling.hpp"
#include "fastperm/statistics.hpp"

// Scenario generator and comparison runner. A scenario draws replicate
// datasets from a named distribution family and applies a set of methods to
// each; results come back as tidy rows, one per (replicate, method), stable
// in that order regardless of how many workers run the replicates.

namespace fastperm {

enum class Distribution { Normal, Exponential, Gamma, Poisson, LogNormal, NegBinom };

Distribution parse_distribution(const std::string& name);
std::string to_string(Distribution d);

// Meaning of (a, b) per family:
//   normal: mean, sd          exponential: rate, -
//   gamma: shape, rate        poisson: rate, -
//   lognormal: meanlog, sdlog negbinom: size, mean
struct GroupParams {
    double a = 0.0;
    double b = 0.0;
};

enum class Method { Alg1, Asym, SimpleMc, TTest, BetaPrime, Saddlepoint, Delta, Trend };

Method parse_method(const std::string& name);
std::string to_string(Method m);

struct Scenario {
    std::string id;
    Distribution dist = Distribution::Normal;
    GroupParams px;
    GroupParams py;
    int n_x = 0;
    int n_y = 0;
    StatisticKind kind = StatisticKind::AbsDiff;
    int replicates = 1;
    std::vector<Method> methods;
    std::uint64_t seed = 0;
    long long b_pred = 1000;
    long long mc_b = 100000;
    long long trend_b = 1000;
    bool t_equal_var = true;
};

struct ResultRow {
    std::string scenario_id;
    int replicate = 0;
    std::string method;
    std::string statistic;
    int n_x = 0;
    int n_y = 0;
    double log10_p = 0.0;
    long long iterations = 0;
    int m_stop = -1;          // -1 renders as NA
    double deviance = 0.0;
    double aic = 0.0;
    bool has_fit = false;     // deviance/aic meaningful
    std::uint64_t seed = 0;
};

std::vector<double> sample_group(RandomEngine& rng, Distribution dist, const GroupParams& p, int n);

// Per-partition Monte Carlo exceedance rates for m = 0..n_min, no early stop.
std::vector<double> trend_profile(const TwoSample& data, StatisticKind kind, long long b_per_partition,
                                  RandomEngine& rng);

std::vector<ResultRow> run_scenario(const Scenario& s, int workers = 1);

extern const char* kResultCsvHeader;
void write_result_csv(std::ostream& os, const std::vector<ResultRow>& rows);

}  // namespace fastperm
