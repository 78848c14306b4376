#pragma once

#include <stdexcept>
#include <string>

// Self-contained special functions used throughout the library. Everything is
// evaluated in double precision with no external math dependencies; the
// normal tail is also available in log space, which the p-value aggregation
// relies on (tail probabilities far below the smallest normal double).

namespace fastperm::sf {

// Iteration cap exceeded in a series or continued-fraction evaluation.
class no_convergence : public std::runtime_error {
public:
    explicit no_convergence(const std::string& what) : std::runtime_error(what) {}
};

// ln Gamma(x), x > 0. Relative error <= 1e-12 on [1e-6, 1e6].
double log_gamma(double x);

double erf(double x);
double erfc(double x);

// log(erfc(x)) without underflow for large x.
double log_erfc(double x);

// Standard normal CDF, density, upper tail and its logarithm.
double std_normal_cdf(double z);
double std_normal_pdf(double z);
double std_normal_tail(double z);       // 1 - Phi(z)
double log_std_normal_tail(double z);   // log(1 - Phi(z)), finite for any z

// Inverse of std_normal_cdf on (0,1).
double std_normal_quantile(double p);

// Regularized incomplete beta I_x(a,b).
double reg_inc_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a,x), and its logarithm (stable when
// P underflows).
double reg_lower_inc_gamma(double a, double x);
double log_reg_lower_inc_gamma(double a, double x);

double digamma(double x);
double trigamma(double x);

// log(exp(a) + exp(b)) without overflow.
double log_sum_exp(double a, double b);

}  // namespace fastperm::sf
