#pragma once

#include <span>

#include "fastperm/statistics.hpp"

// Parametric reference p-values used to benchmark the permutation
// estimators: t-tests, the scaled beta prime tail for ratio statistics under
// exponential/gamma data, a saddlepoint approximation for the difference of
// gamma means, the exact gamma-difference CDF by quadrature (kept as a test
// oracle), and the delta-method ratio p-value.

namespace fastperm {

// Two-sided t-test; Welch-Satterthwaite degrees of freedom when
// equal_variance is false.
double p_t_test(const TwoSample& data, bool equal_variance);

// Two-sided tail of max(Xbar/Ybar, Ybar/Xbar) for iid Gamma(alpha, lambda)
// groups with common rate; t >= 1.
double p_beta_prime(int n_x, int n_y, double alpha, double t);

struct GammaMle {
    double alpha_hat = 0.0;
    double lambda_hat = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Joint gamma MLE on pooled data via Newton-Raphson on the profile
// likelihood in alpha; lambda_hat = alpha_hat / mean.
GammaMle gamma_mle(std::span<const double> pooled);

// Lugannani-Rice saddlepoint CDF of Xbar - Ybar for iid Gamma(alpha, lambda)
// groups, and the two-sided p-value at t > 0.
double saddlepoint_gamma_diff_cdf(int n_x, int n_y, double alpha, double lambda, double z);
double p_saddlepoint_gamma_diff(int n_x, int n_y, double alpha, double lambda, double t);

// Exact CDF of Xbar - Ybar by adaptive quadrature in log space. Test oracle:
// absolute accuracy around 1e-9; relative accuracy in the far tail degrades
// once the result drops below ~1e-12, where the saddlepoint form should be
// preferred.
double exact_gamma_diff_cdf(int n_x, int n_y, double alpha, double lambda, double z);

// Delta-method two-sided p-value for the ratio of means.
double p_delta_ratio(const TwoSample& data);

}  // namespace fastperm
