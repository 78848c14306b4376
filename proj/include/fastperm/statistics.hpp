#pragma once

#include <string>
#include <vector>

#include "fastperm/partitions.hpp"

// Two-sample data containers, the test statistics, and the exact
// within-partition moments of the exchanged-sum W(m). Permuted statistics are
// evaluated incrementally from cached group summaries in O(m) per exchange.

namespace fastperm {

enum class StatisticKind {
    AbsDiff,            // |xbar - ybar|
    MaxRatio,           // max(xbar/ybar, ybar/xbar); requires positive data
    StudentizedAbsDiff  // |xbar - ybar| / sqrt(s2x/nx + s2y/ny)
};

std::string to_string(StatisticKind kind);
StatisticKind parse_statistic_kind(const std::string& name);

struct TwoSample {
    std::vector<double> x;
    std::vector<double> y;
    int n_x = 0;
    int n_y = 0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double css_x = 0.0;  // sum (x_i - mean_x)^2
    double css_y = 0.0;

    TwoSample() = default;
    TwoSample(std::vector<double> xs, std::vector<double> ys);
};

// Summary-only view: enough for the asymptotic approximation and for
// parameter plug-ins where no raw data exists.
struct SummaryPair {
    int n_x = 0;
    int n_y = 0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double var_x = 0.0;  // per-group variance, (n-1) denominator
    double var_y = 0.0;

    SummaryPair swapped() const { return {n_y, n_x, mean_y, mean_x, var_y, var_x}; }

    double css_x() const { return n_x > 1 ? (n_x - 1) * var_x : 0.0; }
    double css_y() const { return n_y > 1 ? (n_y - 1) * var_y : 0.0; }
};

SummaryPair summary_of(const TwoSample& data);

double observed_statistic(const TwoSample& data, StatisticKind kind);

// Statistic after applying an exchange; O(m) from the cached summaries.
double permuted_statistic(const TwoSample& data, StatisticKind kind, const ExchangeSelection& sel);

// Exact finite-population mean and variance of W(m) = sum of incoming y
// values minus sum of outgoing x values, conditional on the data.
struct PartitionMoments {
    int m = 0;
    double mu = 0.0;
    double v = 0.0;
};

PartitionMoments partition_moments(const SummaryPair& s, int m);
PartitionMoments partition_moments(const TwoSample& data, int m);

// The transform g with R(m) = g(W(m)), its derivative, and the conjugate pair
// (roles of the groups switched, sign of W reversed), all evaluated at w.
struct GFamily {
    double g = 0.0;
    double g_prime = 0.0;
    double g_con = 0.0;
    double g_con_prime = 0.0;
};

GFamily g_family(const SummaryPair& s, StatisticKind kind, double w);
GFamily g_family(const TwoSample& data, StatisticKind kind, double w);

}  // namespace fastperm
