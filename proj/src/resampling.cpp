#include "fastperm/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fastperm/special_functions.hpp"

namespace fastperm {

SimpleMcResult p_simple_mc(const TwoSample& data, StatisticKind kind, long long b,
                           RandomEngine& rng) {
    if (b < 1) throw std::invalid_argument("p_simple_mc: b must be >= 1");
    const double t = observed_statistic(data, kind);
    const int n = data.n_x + data.n_y;

    // A uniformly shuffled assignment only needs which n_x pooled values land
    // in the first group.
    std::vector<double> pool;
    pool.reserve(static_cast<std::size_t>(n));
    pool.insert(pool.end(), data.x.begin(), data.x.end());
    pool.insert(pool.end(), data.y.begin(), data.y.end());

    long long hits = 0;
    std::vector<double> work(pool);
    for (long long it = 0; it < b; ++it) {
        std::copy(pool.begin(), pool.end(), work.begin());
        for (int i = 0; i < data.n_x; ++i) {
            const auto j = i + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n - i)));
            std::swap(work[static_cast<std::size_t>(i)], work[static_cast<std::size_t>(j)]);
        }
        double sum_x = 0.0, ssq_x = 0.0, sum_y = 0.0, ssq_y = 0.0;
        for (int i = 0; i < data.n_x; ++i) {
            const double v = work[static_cast<std::size_t>(i)];
            sum_x += v;
            ssq_x += v * v;
        }
        for (int i = data.n_x; i < n; ++i) {
            const double v = work[static_cast<std::size_t>(i)];
            sum_y += v;
            ssq_y += v * v;
        }
        const double mx = sum_x / data.n_x;
        const double my = sum_y / data.n_y;
        double stat = 0.0;
        switch (kind) {
            case StatisticKind::AbsDiff:
                stat = std::fabs(mx - my);
                break;
            case StatisticKind::MaxRatio:
                stat = std::max(mx / my, my / mx);
                break;
            case StatisticKind::StudentizedAbsDiff: {
                const double cx = std::max(ssq_x - sum_x * sum_x / data.n_x, 0.0);
                const double cy = std::max(ssq_y - sum_y * sum_y / data.n_y, 0.0);
                const double se2 = cx / (data.n_x - 1) / data.n_x + cy / (data.n_y - 1) / data.n_y;
                stat = se2 > 0.0 ? std::fabs(mx - my) / std::sqrt(se2)
                                 : (mx == my ? 0.0 : std::numeric_limits<double>::infinity());
                break;
            }
        }
        if (stat >= t) ++hits;
    }
    return {static_cast<double>(hits) / static_cast<double>(b), hits, b};
}

long long partition_mc(const TwoSample& data, StatisticKind kind, int m, long long b,
                       RandomEngine& rng) {
    if (b < 1) throw std::invalid_argument("partition_mc: b must be >= 1");
    if (m < 0 || m > std::min(data.n_x, data.n_y))
        throw std::invalid_argument("partition_mc: m out of range");
    const double t = observed_statistic(data, kind);
    ExchangeSelection sel;
    long long hits = 0;
    for (long long it = 0; it < b; ++it) {
        sample_exchange_into(rng, data.n_x, data.n_y, m, sel);
        if (permuted_statistic(data, kind, sel) >= t) ++hits;
    }
    return hits;
}

PredReport p_pred(const TwoSample& data, StatisticKind kind, long long b_pred, std::uint64_t seed) {
    if (b_pred < 2) throw std::invalid_argument("p_pred: b_pred must be >= 2");
    const int n_min = std::min(data.n_x, data.n_y);
    if (n_min < 2) throw std::invalid_argument("p_pred: need at least two observations per group");

    const PartitionWeights pw = partition_weights(data.n_x, data.n_y);
    RandomEngine rng = make_engine(seed);

    PredReport rep;
    rep.seed = seed;
    rep.imbalance = static_cast<double>(std::max(data.n_x, data.n_y)) / n_min;
    rep.counts.b_pred = b_pred;
    rep.counts.counts.assign(1, b_pred);  // c[0]

    // Sample partitions in order until the first empty stratum or the mode.
    int m = 1;
    while (m <= pw.m_max && rep.counts.counts.back() > 0) {
        rep.counts.counts.push_back(partition_mc(data, kind, m, b_pred, rng));
        ++m;
    }
    rep.counts.m_stop = m - 1;
    rep.total_iterations = b_pred * static_cast<long long>(rep.counts.m_stop);

    int m_reg = 0;
    for (int i = 1; i <= rep.counts.m_stop; ++i)
        if (rep.counts.counts[static_cast<std::size_t>(i)] > 0) m_reg = i;
    rep.counts.m_reg = m_reg;

    const double log_b = std::log(static_cast<double>(b_pred));
    if (m_reg < 1) {
        // The first stratum had no exceedances: the regression would have a
        // single distinct predictor. Report the resolution bound instead.
        rep.status = PredStatus::BelowResolution;
        rep.log10_p = pw.log_f_at(0) / std::log(10.0);
        return rep;
    }

    std::vector<int> ms(static_cast<std::size_t>(m_reg) + 1);
    for (int i = 0; i <= m_reg; ++i) ms[static_cast<std::size_t>(i)] = i;
    rep.fit = fit_poisson_counts(ms, std::span<const long long>(rep.counts.counts.data(),
                                                                static_cast<std::size_t>(m_reg) + 1));

    // Aggregate predicted counts, symmetrized about the mode, with the
    // observed-permutation endpoints pinned at b_pred.
    double log_p = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n_min; ++k) {
        double log_c;
        if (k == 0 || (data.n_x == data.n_y && k == n_min)) {
            log_c = log_b;
        } else {
            log_c = predict_log_count(rep.fit, pw.reflected_index(k));
        }
        log_p = sf::log_sum_exp(log_p, log_c + pw.log_f_at(k));
    }
    log_p -= log_b;
    if (log_p > -1e-13) log_p = 0.0;  // within rounding noise of 1
    rep.log10_p = std::min(log_p, 0.0) / std::log(10.0);
    return rep;
}

}  // namespace fastperm
