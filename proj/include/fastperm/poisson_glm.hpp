#pragma once

#include <span>

// Two-parameter Poisson log-linear regression, log mu_i = b0 + b1 * m_i,
// fitted by iteratively reweighted least squares. This is the extrapolation
// model the resampler fits to per-partition exceedance counts.

namespace fastperm {

struct PoissonFit {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double deviance = 0.0;
    double aic = 0.0;
    int iterations = 0;
    bool converged = false;
};

PoissonFit fit_poisson_counts(std::span<const int> m_values, std::span<const long long> counts);

// b0 + b1 * m; log scale, safe to extrapolate far below log(DBL_MIN).
double predict_log_count(const PoissonFit& fit, int m);

}  // namespace fastperm
