#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fastperm/poisson_glm.hpp"
#include "fastperm/special_functions.hpp"

using namespace fastperm;

TEST_CASE("exactly log-linear counts are fit perfectly") {
    const std::vector<int> ms{0, 1, 2};
    const std::vector<long long> ys{1000, 100, 10};
    const auto fit = fit_poisson_counts(ms, ys);
    CHECK(fit.converged);
    CHECK(fit.beta0 == doctest::Approx(std::log(1000.0)).epsilon(1e-10));
    CHECK(fit.beta1 == doctest::Approx(-std::log(10.0)).epsilon(1e-10));
    CHECK(fit.deviance <= 1e-8);
    // extrapolation stays in log space
    CHECK(predict_log_count(fit, 10) == doctest::Approx(std::log(1000.0) - 10 * std::log(10.0))
                                            .epsilon(1e-9));
    CHECK(predict_log_count(fit, 0) == doctest::Approx(fit.beta0));
    CHECK(predict_log_count(fit, 7) - predict_log_count(fit, 6) == doctest::Approx(fit.beta1));
}

TEST_CASE("constant counts give zero slope") {
    const std::vector<int> ms{0, 1, 2, 3};
    const std::vector<long long> ys{50, 50, 50, 50};
    const auto fit = fit_poisson_counts(ms, ys);
    CHECK(fit.converged);
    CHECK(fit.beta1 == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(fit.beta0 == doctest::Approx(std::log(50.0)).epsilon(1e-10));
}

TEST_CASE("two points interpolate exactly") {
    const std::vector<int> ms{0, 1};
    const std::vector<long long> ys{1000, 37};
    const auto fit = fit_poisson_counts(ms, ys);
    CHECK(fit.beta0 == doctest::Approx(std::log(1000.0)).epsilon(1e-8));
    CHECK(fit.beta1 == doctest::Approx(std::log(37.0 / 1000.0)).epsilon(1e-8));
    CHECK(fit.deviance <= 1e-8);
}

TEST_CASE("input validation") {
    const std::vector<int> one{0};
    const std::vector<long long> y1{5};
    CHECK_THROWS_AS(fit_poisson_counts(one, y1), std::invalid_argument);
    const std::vector<int> same{1, 1, 1};
    const std::vector<long long> y3{5, 6, 7};
    CHECK_THROWS_AS(fit_poisson_counts(same, y3), std::invalid_argument);
    const std::vector<int> ms{0, 1, 2};
    const std::vector<long long> zeros{0, 0, 0};
    CHECK_THROWS_AS(fit_poisson_counts(ms, zeros), std::invalid_argument);
    const std::vector<long long> neg{5, -1, 2};
    CHECK_THROWS_AS(fit_poisson_counts(ms, neg), std::invalid_argument);
}

TEST_CASE("score equations hold at the optimum on random data") {
    std::mt19937_64 gen(117);
    std::uniform_int_distribution<int> len(3, 9);
    std::uniform_real_distribution<double> b0s(1.0, 7.0), b1s(-2.5, 0.5);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = len(gen);
        std::vector<int> ms(static_cast<std::size_t>(n));
        std::vector<long long> ys(static_cast<std::size_t>(n));
        const double b0 = b0s(gen), b1 = b1s(gen);
        bool positive = false;
        for (int i = 0; i < n; ++i) {
            ms[static_cast<std::size_t>(i)] = i;
            std::poisson_distribution<long long> pd(std::exp(b0 + b1 * i));
            ys[static_cast<std::size_t>(i)] = pd(gen);
            positive |= ys[static_cast<std::size_t>(i)] > 0;
        }
        if (!positive) continue;
        PoissonFit fit;
        try {
            fit = fit_poisson_counts(ms, ys);
        } catch (const std::runtime_error&) {
            continue;  // separated configurations may legitimately fail
        }
        if (!fit.converged) continue;
        double total = 0.0, s0 = 0.0, s1 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double mu = std::exp(fit.beta0 + fit.beta1 * i);
            const double y = static_cast<double>(ys[static_cast<std::size_t>(i)]);
            total += y;
            s0 += y - mu;
            s1 += i * (y - mu);
        }
        CHECK(std::fabs(s0) <= 1e-6 * std::max(1.0, total));
        CHECK(std::fabs(s1) <= 1e-6 * std::max(1.0, total));
    }
}

TEST_CASE("fit is order invariant") {
    const std::vector<int> ms{0, 1, 2, 3, 4};
    const std::vector<long long> ys{900, 400, 120, 40, 9};
    const auto a = fit_poisson_counts(ms, ys);
    const std::vector<int> ms2{4, 2, 0, 3, 1};
    const std::vector<long long> ys2{9, 120, 900, 40, 400};
    const auto b = fit_poisson_counts(ms2, ys2);
    CHECK(a.beta0 == doctest::Approx(b.beta0).epsilon(1e-8));
    CHECK(a.beta1 == doctest::Approx(b.beta1).epsilon(1e-8));
}

TEST_CASE("IRLS beats a grid-search likelihood oracle") {
    const auto loglik = [](const std::vector<int>& ms, const std::vector<long long>& ys, double b0,
                           double b1) {
        double ll = 0.0;
        for (std::size_t i = 0; i < ms.size(); ++i) {
            const double eta = b0 + b1 * ms[i];
            ll += static_cast<double>(ys[i]) * eta - std::exp(eta) -
                  fastperm::sf::log_gamma(static_cast<double>(ys[i]) + 1.0);
        }
        return ll;
    };
    std::mt19937_64 gen(2718);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<int> ms{0, 1, 2, 3};
        std::vector<long long> ys;
        for (int i = 0; i < 4; ++i) {
            std::poisson_distribution<long long> pd(std::exp(6.0 - 1.2 * i));
            ys.push_back(pd(gen));
        }
        const auto fit = fit_poisson_counts(ms, ys);
        const double ll_fit = loglik(ms, ys, fit.beta0, fit.beta1);
        double best = -1e300;
        for (double b0 = fit.beta0 - 0.5; b0 <= fit.beta0 + 0.5; b0 += 0.01) {
            for (double b1 = fit.beta1 - 0.5; b1 <= fit.beta1 + 0.5; b1 += 0.01) {
                best = std::max(best, loglik(ms, ys, b0, b1));
            }
        }
        CHECK(ll_fit >= best - 1e-6);
        // AIC definition check: -2 loglik + 2 * 2 parameters
        CHECK(fit.aic == doctest::Approx(-2.0 * ll_fit + 4.0).epsilon(1e-9));
    }
}

TEST_CASE("zero counts in the interior are handled") {
    const std::vector<int> ms{0, 1, 2, 3};
    const std::vector<long long> ys{1000, 0, 2, 1};
    const auto fit = fit_poisson_counts(ms, ys);
    CHECK(std::isfinite(fit.beta0));
    CHECK(std::isfinite(fit.beta1));
    CHECK(fit.deviance >= 0.0);
}
