#include "enumeration.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace testsupport {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s += a;
    return s / static_cast<double>(v.size());
}

double css_of(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double a : v) s += (a - mean) * (a - mean);
    return s;
}

}  // namespace

double from_scratch_statistic(const std::vector<double>& gx, const std::vector<double>& gy,
                              int kind) {
    const double mx = mean_of(gx);
    const double my = mean_of(gy);
    switch (kind) {
        case 0:
            return std::fabs(mx - my);
        case 1:
            return std::max(mx / my, my / mx);
        case 2: {
            const double s2x = css_of(gx, mx) / (static_cast<double>(gx.size()) - 1.0);
            const double s2y = css_of(gy, my) / (static_cast<double>(gy.size()) - 1.0);
            const double se2 = s2x / static_cast<double>(gx.size()) + s2y / static_cast<double>(gy.size());
            if (se2 <= 0.0) return mx == my ? 0.0 : std::numeric_limits<double>::infinity();
            return std::fabs(mx - my) / std::sqrt(se2);
        }
        default:
            throw std::invalid_argument("bad kind");
    }
}

double enumerated_partition_pvalue(const std::vector<double>& x, const std::vector<double>& y,
                                   int kind, int m) {
    const int n_x = static_cast<int>(x.size());
    const int n_y = static_cast<int>(y.size());
    const double t = from_scratch_statistic(x, y, kind);
    long long total = 0, hits = 0;
    for_each_subset(n_x, m, [&](const std::vector<int>& sx) {
        for_each_subset(n_y, m, [&](const std::vector<int>& sy) {
            std::vector<double> gx = x, gy = y;
            for (int k = 0; k < m; ++k) {
                std::swap(gx[static_cast<std::size_t>(sx[static_cast<std::size_t>(k)])],
                          gy[static_cast<std::size_t>(sy[static_cast<std::size_t>(k)])]);
            }
            ++total;
            if (from_scratch_statistic(gx, gy, kind) >= t) ++hits;
        });
    });
    return static_cast<double>(hits) / static_cast<double>(total);
}

double enumerated_permutation_pvalue(const std::vector<double>& x, const std::vector<double>& y,
                                     int kind) {
    const int n_x = static_cast<int>(x.size());
    const double t = from_scratch_statistic(x, y, kind);
    std::vector<double> pool = x;
    pool.insert(pool.end(), y.begin(), y.end());
    const int n = static_cast<int>(pool.size());
    long long total = 0, hits = 0;
    for_each_subset(n, n_x, [&](const std::vector<int>& sx) {
        std::vector<char> in_x(static_cast<std::size_t>(n), 0);
        for (int i : sx) in_x[static_cast<std::size_t>(i)] = 1;
        std::vector<double> gx, gy;
        gx.reserve(static_cast<std::size_t>(n_x));
        for (int i = 0; i < n; ++i) {
            (in_x[static_cast<std::size_t>(i)] ? gx : gy).push_back(pool[static_cast<std::size_t>(i)]);
        }
        ++total;
        if (from_scratch_statistic(gx, gy, kind) >= t) ++hits;
    });
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace testsupport
