#include "fastperm/special_functions.hpp"

#include <cmath>
#include <limits>

namespace fastperm::sf {

namespace {

constexpr int kMaxIter = 300;
constexpr double kCfTol = 1e-14;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrtPi = 0.5641895835477563;

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

}  // namespace

double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

double log_gamma(double x) {
    require(std::isfinite(x) && x > 0.0, "log_gamma: x must be positive and finite");
    // Lanczos, g = 7, 9 coefficients.
    static const double c[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7};
    if (x < 0.5) {
        // Reflection: ln Gamma(x) = ln(pi / sin(pi x)) - ln Gamma(1 - x)
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double a = c[0];
    for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
    const double t = z + 7.5;
    return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(a);
}

namespace {

// Continued-fraction factor: erfc(x) = t(x) * exp(-x^2) for x >= 1.
// t(x) = (1/sqrt(pi)) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
double erfc_cf_factor(double x) {
    // Lentz evaluation of the Laplace continued fraction.
    const double tiny = 1e-300;
    double f = x;
    if (f == 0.0) f = tiny;
    double c = f;
    double d = 0.0;
    for (int n = 1; n <= kMaxIter; ++n) {
        const double an = 0.5 * n;
        d = x + an * d;
        if (d == 0.0) d = tiny;
        c = x + an / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < kCfTol) return kInvSqrtPi / f;
    }
    throw no_convergence("erfc continued fraction did not converge");
}

// Taylor series for erf on |x| < 1.
double erf_series(double x) {
    if (x == 0.0) return 0.0;
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n <= kMaxIter; ++n) {
        term *= -x2 / n;
        const double add = term / (2.0 * n + 1.0);
        sum += add;
        if (std::fabs(add) <= kCfTol * std::fabs(sum)) return 2.0 * kInvSqrtPi * sum;
    }
    throw no_convergence("erf series did not converge");
}

}  // namespace

double erf(double x) {
    if (std::isnan(x)) return x;
    if (std::fabs(x) < 1.0) return erf_series(x);
    return x > 0.0 ? 1.0 - erfc(x) : erfc(-x) - 1.0;
}

double erfc(double x) {
    if (std::isnan(x)) return x;
    if (x < 0.0) return 2.0 - erfc(-x);
    if (x < 1.0) return 1.0 - erf_series(x);
    if (x > 27.0) return 0.0;  // below the smallest normal double
    return erfc_cf_factor(x) * std::exp(-x * x);
}

double log_erfc(double x) {
    if (x < 1.0) return std::log(erfc(x));
    return std::log(erfc_cf_factor(x)) - x * x;
}

double std_normal_cdf(double z) {
    require(!std::isnan(z), "std_normal_cdf: z must not be NaN");
    return 0.5 * erfc(-z / kSqrt2);
}

double std_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double std_normal_tail(double z) { return 0.5 * erfc(z / kSqrt2); }

double log_std_normal_tail(double z) {
    require(!std::isnan(z), "log_std_normal_tail: z must not be NaN");
    if (z <= 0.0) {
        // 1 - Phi(z) >= 1/2: evaluate as log1p(-Phi(z)) to keep precision.
        const double phi = 0.5 * erfc(-z / kSqrt2);
        return std::log1p(-phi);
    }
    return std::log(0.5) + log_erfc(z / kSqrt2);
}

double std_normal_quantile(double p) {
    require(std::isfinite(p) && p > 0.0 && p < 1.0, "std_normal_quantile: p must be in (0,1)");
    // Acklam's rational approximation, then one Halley refinement against
    // std_normal_cdf.
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double z;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley step: e = Phi(z) - p, z <- z - 2e/(2*pdf + e*z)
    const double e = std_normal_cdf(z) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * z * z);
    z -= u / (1.0 + 0.5 * z * u);
    return z;
}

namespace {

// Continued fraction for I_x(a,b), valid for x < (a+1)/(a+b+2).
double inc_beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kCfTol) return h;
    }
    throw no_convergence("incomplete beta continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
    require(std::isfinite(a) && a > 0.0, "reg_inc_beta: a must be positive");
    require(std::isfinite(b) && b > 0.0, "reg_inc_beta: b must be positive");
    require(std::isfinite(x) && x >= 0.0 && x <= 1.0, "reg_inc_beta: x must be in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * inc_beta_cf(a, b, x) / a;
    }
    return 1.0 - front * inc_beta_cf(b, a, 1.0 - x) / b;
}

namespace {

// log of the series part of P(a,x): sum_{n>=0} x^n / ((a+1)...(a+n)).
double lower_gamma_series_log(double a, double x) {
    double ap = a;
    double sum = 1.0;
    double del = 1.0;
    for (int n = 1; n <= kMaxIter * 10; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kCfTol) return std::log(sum);
    }
    throw no_convergence("incomplete gamma series did not converge");
}

// Continued fraction for Q(a,x) = 1 - P(a,x), valid for x >= a+1.
double upper_gamma_cf_log(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter * 10; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kCfTol)
            return a * std::log(x) - x - log_gamma(a) + std::log(h);
    }
    throw no_convergence("incomplete gamma continued fraction did not converge");
}

}  // namespace

double reg_lower_inc_gamma(double a, double x) {
    require(std::isfinite(a) && a > 0.0, "reg_lower_inc_gamma: a must be positive");
    require(std::isfinite(x) && x >= 0.0, "reg_lower_inc_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        const double lp = a * std::log(x) - x - log_gamma(a + 1.0) + lower_gamma_series_log(a, x);
        return std::exp(lp);
    }
    return -std::expm1(upper_gamma_cf_log(a, x));
}

double log_reg_lower_inc_gamma(double a, double x) {
    require(std::isfinite(a) && a > 0.0, "log_reg_lower_inc_gamma: a must be positive");
    require(std::isfinite(x) && x >= 0.0, "log_reg_lower_inc_gamma: x must be nonnegative");
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (x < a + 1.0) {
        return a * std::log(x) - x - log_gamma(a + 1.0) + lower_gamma_series_log(a, x);
    }
    const double log_q = upper_gamma_cf_log(a, x);
    if (log_q > -1e-16) return std::log(-std::expm1(log_q));  // P close to 0
    return std::log1p(-std::exp(log_q));
}

double digamma(double x) {
    require(std::isfinite(x) && x > 0.0, "digamma: x must be positive");
    double result = 0.0;
    // Shift up to x >= 8, then asymptotic expansion.
    while (x < 8.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // psi(x) ~ ln x - 1/(2x) - sum B_{2n}/(2n x^{2n})
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return result;
}

double trigamma(double x) {
    require(std::isfinite(x) && x > 0.0, "trigamma: x must be positive");
    double result = 0.0;
    while (x < 8.0) {
        result += 1.0 / (x * x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // psi'(x) ~ 1/x + 1/(2x^2) + sum B_{2n}/x^{2n+1}
    result += inv * (1.0 + 0.5 * inv +
                     inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0 - inv2 * (5.0 / 66.0))))));
    return result;
}

}  // namespace fastperm::sf
