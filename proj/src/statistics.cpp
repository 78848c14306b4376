#include "fastperm/statistics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fastperm {

std::string to_string(StatisticKind kind) {
    switch (kind) {
        case StatisticKind::AbsDiff: return "abs_diff";
        case StatisticKind::MaxRatio: return "max_ratio";
        case StatisticKind::StudentizedAbsDiff: return "studentized";
    }
    return "unknown";
}

StatisticKind parse_statistic_kind(const std::string& name) {
    if (name == "abs_diff" || name == "abs-diff") return StatisticKind::AbsDiff;
    if (name == "max_ratio" || name == "max-ratio") return StatisticKind::MaxRatio;
    if (name == "studentized") return StatisticKind::StudentizedAbsDiff;
    throw std::invalid_argument("unknown statistic: " + name);
}

namespace {

struct MeanCss {
    double mean;
    double css;
};

MeanCss mean_and_css(const std::vector<double>& v) {
    const auto n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double a : v) sum += a;
    const double mean = sum / n;
    double css = 0.0;
    for (double a : v) css += (a - mean) * (a - mean);
    return {mean, css};
}

void check_kind_preconditions(const TwoSample& d, StatisticKind kind) {
    if (kind == StatisticKind::MaxRatio) {
        // Nonnegative values with positive group means keep every permuted
        // ratio well defined (a zero permuted mean yields +inf, never 0/0).
        for (double a : d.x)
            if (a < 0.0) throw std::domain_error("max_ratio requires nonnegative data");
        for (double a : d.y)
            if (a < 0.0) throw std::domain_error("max_ratio requires nonnegative data");
        if (!(d.mean_x > 0.0) || !(d.mean_y > 0.0))
            throw std::domain_error("max_ratio requires positive group means");
    }
    if (kind == StatisticKind::StudentizedAbsDiff) {
        if (d.n_x < 2 || d.n_y < 2)
            throw std::domain_error("studentized statistic requires n_x, n_y >= 2");
    }
}

double studentized(double mean_x, double mean_y, double css_x, double css_y, int n_x, int n_y) {
    const double s2x = css_x / (n_x - 1);
    const double s2y = css_y / (n_y - 1);
    const double se2 = s2x / n_x + s2y / n_y;
    const double num = std::fabs(mean_x - mean_y);
    if (se2 <= 0.0) {
        if (num == 0.0) return 0.0;
        return std::numeric_limits<double>::infinity();
    }
    return num / std::sqrt(se2);
}

}  // namespace

TwoSample::TwoSample(std::vector<double> xs, std::vector<double> ys)
    : x(std::move(xs)), y(std::move(ys)) {
    if (x.empty() || y.empty()) throw std::invalid_argument("TwoSample: both groups must be nonempty");
    n_x = static_cast<int>(x.size());
    n_y = static_cast<int>(y.size());
    for (double a : x)
        if (!std::isfinite(a)) throw std::invalid_argument("TwoSample: non-finite value in x");
    for (double a : y)
        if (!std::isfinite(a)) throw std::invalid_argument("TwoSample: non-finite value in y");
    const auto mx = mean_and_css(x);
    const auto my = mean_and_css(y);
    mean_x = mx.mean;
    css_x = mx.css;
    mean_y = my.mean;
    css_y = my.css;
}

SummaryPair summary_of(const TwoSample& d) {
    SummaryPair s;
    s.n_x = d.n_x;
    s.n_y = d.n_y;
    s.mean_x = d.mean_x;
    s.mean_y = d.mean_y;
    s.var_x = d.n_x > 1 ? d.css_x / (d.n_x - 1) : 0.0;
    s.var_y = d.n_y > 1 ? d.css_y / (d.n_y - 1) : 0.0;
    return s;
}

double observed_statistic(const TwoSample& d, StatisticKind kind) {
    check_kind_preconditions(d, kind);
    switch (kind) {
        case StatisticKind::AbsDiff:
            return std::fabs(d.mean_x - d.mean_y);
        case StatisticKind::MaxRatio:
            return std::max(d.mean_x / d.mean_y, d.mean_y / d.mean_x);
        case StatisticKind::StudentizedAbsDiff: {
            if (!(d.css_x / (d.n_x - 1) / d.n_x + d.css_y / (d.n_y - 1) / d.n_y > 0.0))
                throw std::domain_error("studentized statistic: zero pooled variance");
            return studentized(d.mean_x, d.mean_y, d.css_x, d.css_y, d.n_x, d.n_y);
        }
    }
    throw std::logic_error("unreachable");
}

double permuted_statistic(const TwoSample& d, StatisticKind kind, const ExchangeSelection& sel) {
    const int m = sel.m();
    if (static_cast<int>(sel.from_y.size()) != m)
        throw std::invalid_argument("permuted_statistic: selection sets differ in size");

    if (m == d.n_x && m == d.n_y) {
        // Full exchange with equal sizes: the permuted dataset is exactly
        // (y, x), so use the cached summaries directly rather than the
        // incremental update, which would perturb an exact tie.
        switch (kind) {
            case StatisticKind::AbsDiff:
                return std::fabs(d.mean_y - d.mean_x);
            case StatisticKind::MaxRatio:
                return std::max(d.mean_y / d.mean_x, d.mean_x / d.mean_y);
            case StatisticKind::StudentizedAbsDiff:
                return studentized(d.mean_y, d.mean_x, d.css_y, d.css_x, d.n_y, d.n_x);
        }
    }

    double w = 0.0;  // incoming y minus outgoing x
    for (int j : sel.from_y) {
        if (j < 0 || j >= d.n_y) throw std::out_of_range("permuted_statistic: y index out of range");
        w += d.y[static_cast<std::size_t>(j)];
    }
    for (int i : sel.from_x) {
        if (i < 0 || i >= d.n_x) throw std::out_of_range("permuted_statistic: x index out of range");
        w -= d.x[static_cast<std::size_t>(i)];
    }
    const double mean_x = d.mean_x + w / d.n_x;
    const double mean_y = d.mean_y - w / d.n_y;

    switch (kind) {
        case StatisticKind::AbsDiff:
            return std::fabs(mean_x - mean_y);
        case StatisticKind::MaxRatio:
            return std::max(mean_x / mean_y, mean_y / mean_x);
        case StatisticKind::StudentizedAbsDiff: {
            // Update both sums of squares through sum and sum-of-squares.
            double dsum = 0.0, dsq = 0.0;
            for (int j : sel.from_y) {
                const double v = d.y[static_cast<std::size_t>(j)];
                dsum += v;
                dsq += v * v;
            }
            for (int i : sel.from_x) {
                const double v = d.x[static_cast<std::size_t>(i)];
                dsum -= v;
                dsq -= v * v;
            }
            const double sum_x = d.n_x * d.mean_x + dsum;
            const double ssq_x = (d.css_x + d.n_x * d.mean_x * d.mean_x) + dsq;
            const double css_x = ssq_x - sum_x * sum_x / d.n_x;
            const double sum_y = d.n_y * d.mean_y - dsum;
            const double ssq_y = (d.css_y + d.n_y * d.mean_y * d.mean_y) - dsq;
            const double css_y = ssq_y - sum_y * sum_y / d.n_y;
            return studentized(mean_x, mean_y, std::max(css_x, 0.0), std::max(css_y, 0.0),
                               d.n_x, d.n_y);
        }
    }
    throw std::logic_error("unreachable");
}

PartitionMoments partition_moments(const SummaryPair& s, int m) {
    if (m < 0 || m > std::min(s.n_x, s.n_y))
        throw std::invalid_argument("partition_moments: m out of range");
    PartitionMoments r;
    r.m = m;
    r.mu = m * (s.mean_y - s.mean_x);
    double v = 0.0;
    if (s.n_y > 1) v += (s.n_y - m) / (static_cast<double>(s.n_y) * (s.n_y - 1)) * s.css_y();
    if (s.n_x > 1) v += (s.n_x - m) / (static_cast<double>(s.n_x) * (s.n_x - 1)) * s.css_x();
    r.v = m * v;
    return r;
}

PartitionMoments partition_moments(const TwoSample& d, int m) {
    return partition_moments(summary_of(d), m);
}

GFamily g_family(const SummaryPair& s, StatisticKind kind, double w) {
    GFamily r;
    switch (kind) {
        case StatisticKind::AbsDiff: {
            const double c = 1.0 / s.n_x + 1.0 / s.n_y;
            r.g = s.mean_x - s.mean_y + c * w;
            r.g_prime = c;
            r.g_con = s.mean_y - s.mean_x - c * w;
            r.g_con_prime = -c;
            return r;
        }
        case StatisticKind::MaxRatio: {
            const double num = s.n_x * s.mean_x + w;
            const double den = s.n_y * s.mean_y - w;
            if (!(den > 0.0) || !(num > 0.0))
                throw std::domain_error("g_family: ratio transform undefined at this w");
            const double rr = static_cast<double>(s.n_y) / s.n_x;
            r.g = rr * num / den;
            r.g_prime = rr * (s.n_y * s.mean_y + s.n_x * s.mean_x) / (den * den);
            r.g_con = (1.0 / rr) * den / num;
            // d/dw of g_con; the group-size ratio here is n_x/n_y.
            r.g_con_prime = -(1.0 / rr) * (s.n_x * s.mean_x + s.n_y * s.mean_y) / (num * num);
            return r;
        }
        case StatisticKind::StudentizedAbsDiff:
            throw std::domain_error("g_family: no closed form for the studentized statistic");
    }
    throw std::logic_error("unreachable");
}

GFamily g_family(const TwoSample& d, StatisticKind kind, double w) {
    return g_family(summary_of(d), kind, w);
}

}  // namespace fastperm
