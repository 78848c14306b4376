#include "fastperm/poisson_glm.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fastperm/special_functions.hpp"

namespace fastperm {

namespace {

double deviance_of(std::span<const int> ms, std::span<const long long> ys, double b0, double b1) {
    double dev = 0.0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const double mu = std::exp(b0 + b1 * ms[i]);
        const double y = static_cast<double>(ys[i]);
        const double ylogy = y > 0.0 ? y * std::log(y / mu) : 0.0;
        dev += 2.0 * (ylogy - (y - mu));
    }
    return dev;
}

}  // namespace

PoissonFit fit_poisson_counts(std::span<const int> ms, std::span<const long long> ys) {
    const std::size_t n = ms.size();
    if (n != ys.size() || n < 2)
        throw std::invalid_argument("fit_poisson_counts: need >= 2 equal-length observations");
    bool two_distinct = false;
    bool any_positive = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (ys[i] < 0) throw std::invalid_argument("fit_poisson_counts: negative count");
        if (ms[i] != ms[0]) two_distinct = true;
        if (ys[i] > 0) any_positive = true;
    }
    if (!two_distinct) throw std::invalid_argument("fit_poisson_counts: need two distinct predictors");
    if (!any_positive) throw std::invalid_argument("fit_poisson_counts: all counts are zero");

    // Start from least squares on log(y + 0.5).
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = ms[i];
        const double yi = std::log(static_cast<double>(ys[i]) + 0.5);
        sx += xi;
        sy += yi;
        sxx += xi * xi;
        sxy += xi * yi;
    }
    const double denom = n * sxx - sx * sx;
    double b1 = (n * sxy - sx * sy) / denom;
    double b0 = (sy - b1 * sx) / n;

    PoissonFit fit;
    double dev = deviance_of(ms, ys, b0, b1);
    constexpr int kMaxIter = 50;
    constexpr double kTol = 1e-10;
    for (int iter = 1; iter <= kMaxIter; ++iter) {
        // Weighted normal equations for the working response
        // z_i = eta_i + (y_i - mu_i)/mu_i with weights mu_i.
        double w = 0.0, wx = 0.0, wxx = 0.0, wz = 0.0, wxz = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double eta = b0 + b1 * ms[i];
            const double mu = std::exp(eta);
            const double z = eta + (static_cast<double>(ys[i]) - mu) / mu;
            w += mu;
            wx += mu * ms[i];
            wxx += mu * ms[i] * static_cast<double>(ms[i]);
            wz += mu * z;
            wxz += mu * ms[i] * z;
        }
        const double det = w * wxx - wx * wx;
        if (!(std::fabs(det) > 0.0))
            throw std::runtime_error("fit_poisson_counts: singular IRLS system");
        double nb0 = (wxx * wz - wx * wxz) / det;
        double nb1 = (w * wxz - wx * wz) / det;

        // Step-halving if the deviance would increase.
        double ndev = deviance_of(ms, ys, nb0, nb1);
        for (int half = 0; half < 30 && ndev > dev * (1.0 + 1e-12) + 1e-12; ++half) {
            nb0 = 0.5 * (nb0 + b0);
            nb1 = 0.5 * (nb1 + b1);
            ndev = deviance_of(ms, ys, nb0, nb1);
        }

        const double dev_change = std::fabs(dev - ndev);
        const double coef_change = std::max(std::fabs(nb0 - b0), std::fabs(nb1 - b1));
        b0 = nb0;
        b1 = nb1;
        dev = ndev;
        fit.iterations = iter;
        if (dev_change < kTol * (1.0 + std::fabs(dev)) && coef_change < 1e-10) {
            fit.converged = true;
            break;
        }
    }

    fit.beta0 = b0;
    fit.beta1 = b1;
    fit.deviance = dev;
    double loglik = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double eta = b0 + b1 * ms[i];
        const double y = static_cast<double>(ys[i]);
        loglik += y * eta - std::exp(eta) - sf::log_gamma(y + 1.0);
    }
    fit.aic = -2.0 * loglik + 4.0;
    return fit;
}

double predict_log_count(const PoissonFit& fit, int m) { return fit.beta0 + fit.beta1 * m; }

}  // namespace fastperm
