#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "enumeration.hpp"
#include "fastperm/resampling.hpp"
#include "fastperm/special_functions.hpp"

using namespace fastperm;

TEST_CASE("simple MC on constant data") {
    TwoSample d({2.0, 2.0, 2.0}, {2.0, 2.0});
    RandomEngine rng = make_engine(1);
    const auto r = p_simple_mc(d, StatisticKind::AbsDiff, 500, rng);
    CHECK(r.p == doctest::Approx(1.0));
    CHECK(r.exceedances == 500);
}

TEST_CASE("simple MC recovers the enumerated p-value") {
    TwoSample d({1.0, 2.0}, {3.0, 4.0});
    RandomEngine rng = make_engine(7);
    const long long b = 100000;
    const auto r = p_simple_mc(d, StatisticKind::AbsDiff, b, rng);
    // exact value 1/3; allow 3 binomial sigmas
    const double sigma = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / static_cast<double>(b));
    CHECK(std::fabs(r.p - 1.0 / 3.0) <= 3.0 * sigma);
}

TEST_CASE("partition MC endpoints") {
    TwoSample d({1.0, 2.0}, {3.0, 4.0});
    RandomEngine rng = make_engine(5);
    CHECK(partition_mc(d, StatisticKind::AbsDiff, 0, 200, rng) == 200);
    // equal sizes, full exchange mirrors the observed statistic
    CHECK(partition_mc(d, StatisticKind::AbsDiff, 2, 200, rng) == 200);
    // enumerated partition p-value at m=1 is 0 for this data
    CHECK(partition_mc(d, StatisticKind::AbsDiff, 1, 2000, rng) == 0);
    CHECK_THROWS_AS(partition_mc(d, StatisticKind::AbsDiff, 3, 10, rng), std::invalid_argument);
}

TEST_CASE("partition MC agrees with enumeration on a small case") {
    TwoSample d({0.4, 1.9, 2.6, 1.1}, {2.2, 3.4, 2.9, 4.0});
    RandomEngine rng = make_engine(40);
    for (int m = 0; m <= 4; ++m) {
        const double exact = testsupport::enumerated_partition_pvalue(d.x, d.y, 0, m);
        const long long b = 20000;
        const long long c = partition_mc(d, StatisticKind::AbsDiff, m, b, rng);
        const double phat = static_cast<double>(c) / static_cast<double>(b);
        const double sigma = std::sqrt(std::max(exact * (1.0 - exact), 1e-12) / static_cast<double>(b));
        CHECK(std::fabs(phat - exact) <= std::max(4.0 * sigma, 2e-3));
    }
}

TEST_CASE("p_pred near the null runs to the mode and stays near 1") {
    std::mt19937_64 gen(88);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> x(30), y(30);
    for (auto& v : x) v = noise(gen);
    for (auto& v : y) v = noise(gen);
    TwoSample d(x, y);
    const auto rep = p_pred(d, StatisticKind::AbsDiff, 1000, 3);
    CHECK(rep.status == PredStatus::Ok);
    CHECK(rep.counts.m_stop == 15);  // m_max for n = 30
    CHECK(rep.log10_p > -1.0);
    CHECK(std::fabs(rep.fit.beta1) < 0.5);
    CHECK(rep.total_iterations == 1000 * 15);
}

TEST_CASE("p_pred is reproducible bit for bit") {
    std::mt19937_64 gen(13);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> x(25), y(25);
    for (auto& v : x) v = noise(gen) + 1.2;
    for (auto& v : y) v = noise(gen);
    TwoSample d(x, y);
    const auto a = p_pred(d, StatisticKind::AbsDiff, 500, 42);
    const auto b = p_pred(d, StatisticKind::AbsDiff, 500, 42);
    CHECK(a.log10_p == b.log10_p);
    CHECK(a.counts.counts == b.counts.counts);
    CHECK(a.fit.beta0 == b.fit.beta0);
    CHECK(a.seed == 42);
    const auto c = p_pred(d, StatisticKind::AbsDiff, 500, 43);
    CHECK(a.counts.counts != c.counts.counts);
}

TEST_CASE("p_pred respects the structural invariants") {
    std::mt19937_64 gen(4711);
    std::normal_distribution<double> nx(1.0, 1.0), ny(0.0, 1.0);
    std::vector<double> x(40), y(60);
    for (auto& v : x) v = nx(gen);
    for (auto& v : y) v = ny(gen);
    TwoSample d(x, y);
    const auto rep = p_pred(d, StatisticKind::AbsDiff, 800, 9);
    CHECK(rep.counts.counts[0] == 800);
    CHECK(rep.counts.m_stop == static_cast<int>(rep.counts.counts.size()) - 1);
    for (long long c : rep.counts.counts) {
        CHECK(c >= 0);
        CHECK(c <= 800);
    }
    // c[m_stop] = 0 unless the loop hit the mode
    const auto pw = partition_weights(40, 60);
    if (rep.counts.m_stop < pw.m_max)
        CHECK(rep.counts.counts.back() == 0);
    // m_reg is the last positive count
    CHECK(rep.counts.counts[static_cast<std::size_t>(rep.counts.m_reg)] > 0);
    for (int i = rep.counts.m_reg + 1; i <= rep.counts.m_stop; ++i)
        CHECK(rep.counts.counts[static_cast<std::size_t>(i)] == 0);
    CHECK(rep.imbalance == doctest::Approx(1.5));
    CHECK(rep.log10_p <= 0.0);
}

TEST_CASE("monotone extrapolation when the slope is negative") {
    std::mt19937_64 gen(6);
    std::normal_distribution<double> nx(2.0, 1.0), ny(0.0, 1.0);
    std::vector<double> x(50), y(50);
    for (auto& v : x) v = nx(gen);
    for (auto& v : y) v = ny(gen);
    TwoSample d(x, y);
    const auto rep = p_pred(d, StatisticKind::AbsDiff, 1000, 21);
    REQUIRE(rep.status == PredStatus::Ok);
    CHECK(rep.fit.beta1 < 0.0);
    const auto pw = partition_weights(50, 50);
    for (int m = 1; m <= pw.m_max; ++m) {
        CHECK(predict_log_count(rep.fit, pw.reflected_index(m)) <=
              predict_log_count(rep.fit, pw.reflected_index(m - 1)) + 1e-12);
    }
}

TEST_CASE("below-resolution branch reports the pmf floor") {
    // Gigantic separation: the first stratum has no exceedances.
    std::vector<double> x(20, 0.0), y(20, 0.0);
    std::mt19937_64 gen(3);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (auto& v : x) v = noise(gen) + 100.0;
    for (auto& v : y) v = noise(gen);
    TwoSample d(x, y);
    const auto rep = p_pred(d, StatisticKind::AbsDiff, 100, 17);
    CHECK(rep.status == PredStatus::BelowResolution);
    const auto pw = partition_weights(20, 20);
    CHECK(rep.log10_p == doctest::Approx(pw.log_f_at(0) / std::log(10.0)));
    CHECK(rep.counts.m_reg == 0);
}

TEST_CASE("log-space aggregation survives extreme sizes") {
    std::mt19937_64 gen(1234);
    std::lognormal_distribution<double> lx(2.5, 0.3), ly(0.0, 0.3);
    std::vector<double> x(500), y(500);
    for (auto& v : x) v = lx(gen);
    for (auto& v : y) v = ly(gen);
    TwoSample d(x, y);
    const auto rep = p_pred(d, StatisticKind::MaxRatio, 1000, 77);
    CHECK(std::isfinite(rep.log10_p));
    CHECK(rep.log10_p < -100.0);

    // Deep into territory no linear-space double can represent: twenty
    // thousand observations per group. The per-element shift is modest (the
    // early strata stay populated) but the aggregate drops by hundreds of
    // orders of magnitude.
    std::lognormal_distribution<double> bx_dist(0.35, 0.3);
    std::vector<double> bx(20000), by(20000);
    for (auto& v : bx) v = bx_dist(gen);
    for (auto& v : by) v = ly(gen);
    TwoSample big(bx, by);
    const auto deep = p_pred(big, StatisticKind::MaxRatio, 1000, 78);
    REQUIRE(deep.status == PredStatus::Ok);
    CHECK(std::isfinite(deep.log10_p));
    CHECK(deep.log10_p < -500.0);
}

TEST_CASE("simple MC p-values are calibrated under the null") {
    // type-I error at 0.05 across replicated null datasets
    RandomEngine meta = make_engine(90210);
    int reject = 0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        std::normal_distribution<double> noise(0.0, 1.0);
        std::vector<double> x(20), y(20);
        for (auto& v : x) v = noise(meta);
        for (auto& v : y) v = noise(meta);
        TwoSample d(x, y);
        RandomEngine rng = make_engine(derive_seed(90211, static_cast<std::uint64_t>(r)));
        if (p_simple_mc(d, StatisticKind::AbsDiff, 2000, rng).p <= 0.05) ++reject;
    }
    const double rate = static_cast<double>(reject) / reps;
    CHECK(rate >= 0.03);
    CHECK(rate <= 0.07);
}

TEST_CASE("decomposition identity at enumerable scale") {
    // Concrete instance from the enumeration: partition p-values (1, 0, 1),
    // weights (1/6, 2/3, 1/6), overall 1/3.
    const std::vector<double> x{1.0, 2.0}, y{3.0, 4.0};
    const auto pw = partition_weights(2, 2);
    double p = 0.0;
    for (int m = 0; m <= 2; ++m)
        p += testsupport::enumerated_partition_pvalue(x, y, 0, m) * std::exp(pw.log_f_at(m));
    CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(testsupport::enumerated_permutation_pvalue(x, y, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(testsupport::enumerated_partition_pvalue(x, y, 0, 1) == doctest::Approx(0.0));
}

TEST_CASE("equal-n enumerated partition p-values are palindromic") {
    std::mt19937_64 gen(555);
    std::normal_distribution<double> noise(0.5, 1.0);
    for (int n : {3, 4, 5, 6}) {
        std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
        for (auto& v : x) v = noise(gen);
        for (auto& v : y) v = noise(gen) + 0.8;
        for (int m = 0; m <= n; ++m) {
            CHECK(testsupport::enumerated_partition_pvalue(x, y, 0, m) ==
                  doctest::Approx(testsupport::enumerated_partition_pvalue(x, y, 0, n - m))
                      .epsilon(1e-14));
        }
    }
}

TEST_CASE("p_pred tracks simple MC at moderate p-values") {
    // Where plain resampling is still feasible the two estimators must agree;
    // the predictor leans slightly small (it extrapolates a one-slope trend),
    // so the band is asymmetric-tolerant but bounded.
    std::mt19937_64 gen(246);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> effect(0.3, 0.9);
    std::vector<double> gaps;
    for (int rep = 0; rep < 20; ++rep) {
        const double mu = effect(gen);
        std::vector<double> x(30), y(30);
        for (auto& v : x) v = noise(gen) + mu;
        for (auto& v : y) v = noise(gen);
        TwoSample d(x, y);
        RandomEngine mc = make_engine(derive_seed(900, static_cast<std::uint64_t>(rep)));
        const auto ref = p_simple_mc(d, StatisticKind::AbsDiff, 200000, mc);
        if (ref.exceedances < 50) continue;  // below simple-MC resolution
        const auto pred =
            p_pred(d, StatisticKind::AbsDiff, 1000, derive_seed(901, static_cast<std::uint64_t>(rep)));
        const double gap = std::fabs(pred.log10_p - std::log10(ref.p));
        CHECK(gap <= 0.6);
        gaps.push_back(gap);
    }
    REQUIRE(gaps.size() >= 15);
    std::sort(gaps.begin(), gaps.end());
    CHECK(gaps[gaps.size() / 2] <= 0.35);
}

TEST_CASE("p_pred input validation") {
    TwoSample d({1.0, 2.0}, {3.0, 4.0});
    CHECK_THROWS_AS(p_pred(d, StatisticKind::AbsDiff, 1, 0), std::invalid_argument);
    TwoSample narrow({1.0}, {2.0, 3.0});
    CHECK_THROWS_AS(p_pred(narrow, StatisticKind::AbsDiff, 100, 0), std::invalid_argument);
}
