#include "fastperm/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fastperm/special_functions.hpp"

namespace fastperm {

namespace {

void check_kind(StatisticKind kind) {
    if (kind != StatisticKind::AbsDiff && kind != StatisticKind::MaxRatio)
        throw std::domain_error("asymptotic approximation supports abs_diff and max_ratio only");
}

// log of h(m') = tail(xi) + tail(xi_conj) at a given reflected index, <= 0.
double log_h_at(const SummaryPair& s, StatisticKind kind, int m_ref, double t) {
    const double a = sf::log_std_normal_tail(xi(s, kind, m_ref, t));
    const double b = sf::log_std_normal_tail(xi_conj(s, kind, m_ref, t));
    return std::min(0.0, sf::log_sum_exp(a, b));
}

}  // namespace

double xi(const SummaryPair& s, StatisticKind kind, int m, double t) {
    check_kind(kind);
    const PartitionMoments mom = partition_moments(s, m);
    if (!(mom.v > 0.0)) throw std::domain_error("xi: degenerate partition (V(m) = 0)");
    const GFamily gf = g_family(s, kind, mom.mu);
    return (t - gf.g) / (gf.g_prime * std::sqrt(mom.v));
}

double xi_conj(const SummaryPair& s, StatisticKind kind, int m, double t) {
    return xi(s.swapped(), kind, m, t);
}

double partition_pvalue_asym(const SummaryPair& s, StatisticKind kind, int m, double t) {
    check_kind(kind);
    const int n_min = std::min(s.n_x, s.n_y);
    if (m < 0 || m > n_min) throw std::invalid_argument("partition_pvalue_asym: m out of range");
    if (m == 0) return 1.0;
    if (s.n_x == s.n_y && m == n_min) return 1.0;
    const auto pw_mode = [&] {
        // mode of f by the integer ratio rule
        int mm = 0;
        while (mm < n_min) {
            const auto num = static_cast<long long>(s.n_x - mm) * (s.n_y - mm);
            const auto den = static_cast<long long>(mm + 1) * (mm + 1);
            if (num > den) ++mm; else break;
        }
        return mm;
    }();
    const int m_ref = std::min(m, 2 * pw_mode - m);
    if (m_ref <= 0) return 1.0;
    return std::min(1.0, std::exp(log_h_at(s, kind, m_ref, t)));
}

AsymReport p_asym(const SummaryPair& s, StatisticKind kind, double t) {
    check_kind(kind);
    const PartitionWeights pw = partition_weights(s.n_x, s.n_y);
    const int n_min = pw.n_min;

    AsymReport rep;
    rep.m_max = pw.m_max;
    rep.per_partition_log_h.assign(static_cast<std::size_t>(n_min) + 1, 0.0);

    // Reflection about the successor of the mode. With equal group sizes the
    // reflected index stays in [1, n_min - 1] for interior m.
    const int center2 = 2 * (pw.m_max + 1);
    double log_p = -std::numeric_limits<double>::infinity();
    for (int m = 0; m <= n_min; ++m) {
        double lh;
        if (m == 0 || (s.n_x == s.n_y && m == n_min)) {
            lh = 0.0;
        } else {
            // Stays within [1, n_min] (and below n_min for equal sizes)
            // because the mode is at least floor(n_min/2).
            const int m_ref = std::min(m, center2 - m);
            lh = log_h_at(s, kind, m_ref, t);
        }
        rep.per_partition_log_h[static_cast<std::size_t>(m)] = lh;
        log_p = sf::log_sum_exp(log_p, lh + pw.log_f_at(m));
    }
    // Clamp to <= 0; residues within the aggregation's rounding noise of 1
    // report as exactly 1.
    if (log_p > -1e-13) log_p = 0.0;
    rep.log10_p = log_p / std::log(10.0);
    return rep;
}

int m_stop_asym(const SummaryPair& s, StatisticKind kind, double t, long long b_pred) {
    check_kind(kind);
    if (b_pred < 2) throw std::invalid_argument("m_stop_asym: b_pred must be >= 2");
    const int n_min = std::min(s.n_x, s.n_y);
    // Scan excludes the degenerate equal-n endpoint where V = 0.
    const int scan_end = (s.n_x == s.n_y) ? n_min - 1 : n_min;
    if (scan_end < 1) throw std::invalid_argument("m_stop_asym: group sizes too small");
    const double threshold = sf::std_normal_quantile(1.0 - 1.0 / static_cast<double>(b_pred));
    for (int m = 1; m <= scan_end; ++m) {
        if (threshold < xi(s, kind, m, t)) return m;
    }
    return scan_end;
}

int n_hat(double mean_x, double mean_y, double var_x, double var_y, StatisticKind kind,
          long long b_pred, int c) {
    check_kind(kind);
    if (c < 1) throw std::invalid_argument("n_hat: c must be >= 1");
    if (kind == StatisticKind::MaxRatio && (!(mean_x > 0.0) || !(mean_y > 0.0)))
        throw std::domain_error("n_hat: max_ratio requires positive means");
    const double t = kind == StatisticKind::AbsDiff
                         ? std::fabs(mean_x - mean_y)
                         : std::max(mean_x / mean_y, mean_y / mean_x);
    const double threshold = sf::std_normal_quantile(1.0 - 1.0 / static_cast<double>(b_pred));
    constexpr int kCap = 1000000;
    for (int n = 2; n <= kCap; ++n) {
        const SummaryPair s{n, n, mean_x, mean_y, var_x, var_y};
        // m_stop >= c iff no crossing below c and the scan bound reaches c.
        if (n - 1 < c) continue;
        bool early = false;
        for (int m = 1; m < c; ++m) {
            if (threshold < xi(s, kind, m, t)) {
                early = true;
                break;
            }
        }
        if (!early) return n;
    }
    throw std::runtime_error("n_hat: no n <= 1e6 satisfies the target");
}

}  // namespace fastperm
