#include "fastperm/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "fastperm/special_functions.hpp"

namespace fastperm {

namespace {

double log_binom(int n, int k) {
    return sf::log_gamma(n + 1.0) - sf::log_gamma(k + 1.0) - sf::log_gamma(n - k + 1.0);
}

}  // namespace

int PartitionWeights::reflected_index(int m) const {
    return std::min(m, 2 * m_max - m);
}

PartitionWeights partition_weights(int n_x, int n_y) {
    if (n_x < 1 || n_y < 1) throw std::invalid_argument("partition_weights: group sizes must be >= 1");
    PartitionWeights w;
    w.n_x = n_x;
    w.n_y = n_y;
    w.n_min = std::min(n_x, n_y);
    w.log_f.resize(static_cast<std::size_t>(w.n_min) + 1);

    // Mode of f by the exact integer ratio rule: f(m+1)/f(m) =
    // (n_x-m)(n_y-m)/(m+1)^2, strictly increasing while the numerator
    // exceeds the denominator. A tie keeps the smaller m.
    int m_max = 0;
    while (m_max < w.n_min) {
        const std::int64_t num = static_cast<std::int64_t>(n_x - m_max) * (n_y - m_max);
        const std::int64_t den = static_cast<std::int64_t>(m_max + 1) * (m_max + 1);
        if (num > den) ++m_max; else break;
    }
    w.m_max = m_max;

    // Unnormalized log weights relative to the peak, accumulated outward
    // from the mode with the exact ratio f(m+1)/f(m) = (n_x-m)(n_y-m)/(m+1)^2.
    // Differences of full log-gammas would carry absolute error ~1e-11 at
    // n ~ 1e5; the recurrence keeps the mass region accurate to ~1e-15.
    std::vector<double>& rel = w.log_f;
    rel[static_cast<std::size_t>(m_max)] = 0.0;
    double acc = 0.0, comp = 0.0;
    const auto add = [&](double inc) {
        const double t = acc + inc;
        comp += std::fabs(acc) >= std::fabs(inc) ? (acc - t) + inc : (inc - t) + acc;
        acc = t;
        return acc + comp;
    };
    for (int m = m_max + 1; m <= w.n_min; ++m) {
        const double step = std::log(static_cast<double>(n_x - m + 1)) +
                            std::log(static_cast<double>(n_y - m + 1)) -
                            2.0 * std::log(static_cast<double>(m));
        rel[static_cast<std::size_t>(m)] = add(step);
    }
    acc = 0.0;
    comp = 0.0;
    for (int m = m_max - 1; m >= 0; --m) {
        const double step = 2.0 * std::log(static_cast<double>(m + 1)) -
                            std::log(static_cast<double>(n_x - m)) -
                            std::log(static_cast<double>(n_y - m));
        rel[static_cast<std::size_t>(m)] = add(step);
    }

    // Normalize with a compensated log-sum-exp, then cross-check the
    // implied constant against the closed form C(N, n_min).
    double sum = 0.0;
    comp = 0.0;
    for (double v : rel) {
        const double term = std::exp(v);
        const double t = sum + term;
        comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    sum += comp;
    const double log_sum = std::log(sum);

    const double peak_abs = log_binom(n_x, m_max) + log_binom(n_y, m_max);
    const double closed = log_binom(n_x + n_y, w.n_min);
    if (std::fabs(peak_abs + log_sum - closed) > 1e-8 * std::max(1.0, std::fabs(closed)))
        throw std::runtime_error("partition_weights: normalization cross-check failed");

    for (double& v : rel) v -= log_sum;
    return w;
}

int exchange_distance(std::span<const int> perm, int n_x) {
    const int n = static_cast<int>(perm.size());
    if (n_x < 1 || n_x >= n) throw std::invalid_argument("exchange_distance: need 1 <= n_x < N");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int v : perm) {
        if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
            throw std::invalid_argument("exchange_distance: not a permutation of 0..N-1");
        seen[static_cast<std::size_t>(v)] = 1;
    }
    // d = n_x - #{i < n_x : perm(i) < n_x}
    int kept = 0;
    for (int i = 0; i < n_x; ++i)
        if (perm[static_cast<std::size_t>(i)] < n_x) ++kept;
    return n_x - kept;
}

namespace {

// m distinct indices from [0, n), uniform over subsets. Rejection sampling
// keeps the draw O(m) when m is small relative to n (the resampler's usual
// regime); a partial Fisher-Yates over an index pool covers dense m.
void draw_indices(RandomEngine& rng, int n, int m, std::vector<int>& pool, std::vector<int>& out) {
    out.resize(static_cast<std::size_t>(m));
    if (m <= 64 && static_cast<long long>(m) * m < n) {
        for (int i = 0; i < m; ++i) {
            int candidate;
            bool fresh;
            do {
                candidate = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n)));
                fresh = true;
                for (int k = 0; k < i; ++k) {
                    if (out[static_cast<std::size_t>(k)] == candidate) {
                        fresh = false;
                        break;
                    }
                }
            } while (!fresh);
            out[static_cast<std::size_t>(i)] = candidate;
        }
        return;
    }
    pool.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < m; ++i) {
        const auto j = i + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        out[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
    }
}

thread_local std::vector<int> tl_pool_x;
thread_local std::vector<int> tl_pool_y;

}  // namespace

void sample_exchange_into(RandomEngine& rng, int n_x, int n_y, int m, ExchangeSelection& out) {
    if (m < 0 || m > std::min(n_x, n_y))
        throw std::invalid_argument("sample_exchange: m out of range");
    draw_indices(rng, n_x, m, tl_pool_x, out.from_x);
    draw_indices(rng, n_y, m, tl_pool_y, out.from_y);
}

ExchangeSelection sample_exchange(RandomEngine& rng, int n_x, int n_y, int m) {
    ExchangeSelection sel;
    sample_exchange_into(rng, n_x, n_y, m, sel);
    return sel;
}

}  // namespace fastperm
