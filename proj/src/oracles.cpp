#include "fastperm/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fastperm/special_functions.hpp"

namespace fastperm {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double p_t_test(const TwoSample& d, bool equal_variance) {
    if (d.n_x < 2 || d.n_y < 2) throw std::domain_error("p_t_test: need n_x, n_y >= 2");
    const double s2x = d.css_x / (d.n_x - 1);
    const double s2y = d.css_y / (d.n_y - 1);
    double tstat, df;
    if (equal_variance) {
        const double pooled = (d.css_x + d.css_y) / (d.n_x + d.n_y - 2);
        if (!(pooled > 0.0)) throw std::domain_error("p_t_test: zero pooled variance");
        tstat = (d.mean_x - d.mean_y) / std::sqrt(pooled * (1.0 / d.n_x + 1.0 / d.n_y));
        df = d.n_x + d.n_y - 2;
    } else {
        const double a = s2x / d.n_x;
        const double b = s2y / d.n_y;
        if (!(a + b > 0.0)) throw std::domain_error("p_t_test: zero variance");
        tstat = (d.mean_x - d.mean_y) / std::sqrt(a + b);
        df = (a + b) * (a + b) / (a * a / (d.n_x - 1) + b * b / (d.n_y - 1));
    }
    // Two-sided: P(|T_df| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)
    const double x = df / (df + tstat * tstat);
    return sf::reg_inc_beta(0.5 * df, 0.5, x);
}

double p_beta_prime(int n_x, int n_y, double alpha, double t) {
    if (!(alpha > 0.0)) throw std::domain_error("p_beta_prime: alpha must be positive");
    if (n_x < 1 || n_y < 1) throw std::domain_error("p_beta_prime: group sizes must be >= 1");
    if (t < 1.0) throw std::domain_error("p_beta_prime: t must be >= 1");
    const double a1 = n_x * alpha;
    const double a2 = n_y * alpha;
    const double s1 = static_cast<double>(n_y) / n_x;
    const double s2 = static_cast<double>(n_x) / n_y;
    // Each tail through the symmetric form keeps relative precision when the
    // upper tail is small: 1 - I_x(a,b) = I_{1-x}(b,a).
    const double u1 = t / s1;
    const double u2 = t / s2;
    const double tail1 = sf::reg_inc_beta(a2, a1, 1.0 / (1.0 + u1));
    const double tail2 = sf::reg_inc_beta(a1, a2, 1.0 / (1.0 + u2));
    return std::min(1.0, tail1 + tail2);
}

GammaMle gamma_mle(std::span<const double> pooled) {
    const std::size_t n = pooled.size();
    if (n < 2) throw std::invalid_argument("gamma_mle: need at least two observations");
    double sum = 0.0, sum_log = 0.0;
    for (double v : pooled) {
        if (!(v > 0.0)) throw std::domain_error("gamma_mle: data must be strictly positive");
        sum += v;
        sum_log += std::log(v);
    }
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    double css = 0.0;
    for (double v : pooled) css += (v - mean) * (v - mean);
    if (!(css > 0.0)) throw std::domain_error("gamma_mle: zero sample variance");
    const double s2 = css / (nn - 1.0);

    const auto loglik = [&](double a) {
        return nn * a * std::log(a / mean) - nn * sf::log_gamma(a) + (a - 1.0) * sum_log - nn * a;
    };
    const auto score = [&](double a) {
        return nn * std::log(a / mean) - nn * sf::digamma(a) + sum_log;
    };

    GammaMle r;
    double alpha = mean * mean / s2;  // method of moments start
    double ll = loglik(alpha);
    constexpr int kMaxIter = 100;
    for (int iter = 1; iter <= kMaxIter; ++iter) {
        const double hess = nn / alpha - nn * sf::trigamma(alpha);
        double step = -score(alpha) / hess;
        double next = alpha + step;
        // Keep alpha positive; halve until the likelihood does not decrease.
        int halvings = 0;
        while ((next <= 0.0 || loglik(next) < ll - 1e-12) && halvings < 60) {
            step *= 0.5;
            next = alpha + step;
            ++halvings;
        }
        const double nll = loglik(next);
        const double change = std::fabs(nll - ll);
        alpha = next;
        ll = nll;
        r.iterations = iter;
        if (change < 1e-10) {
            r.converged = true;
            break;
        }
    }
    r.alpha_hat = alpha;
    r.lambda_hat = alpha / mean;
    if (!r.converged) throw sf::no_convergence("gamma_mle: Newton iteration did not converge");
    return r;
}

namespace {

struct Cgf {
    int n_x;
    int n_y;
    double alpha;
    double lambda;

    double K(double t) const {
        return -n_x * alpha * std::log1p(-t / (n_x * lambda)) -
               n_y * alpha * std::log1p(t / (n_y * lambda));
    }
    double K1(double t) const {
        return alpha * (n_x + n_y) * t / ((n_x * lambda - t) * (n_y * lambda + t));
    }
    double K2(double t) const {
        const double d = (n_x * lambda - t) * (n_y * lambda + t);
        return alpha * (n_x + n_y) * (t * t + n_x * n_y * lambda * lambda) / (d * d);
    }
};

// Solve K'(t) = z by Newton with a bisection safeguard on the open interval
// (-n_y lambda, n_x lambda).
double solve_saddlepoint(const Cgf& c, double z) {
    const double eps = 1e-12 * c.lambda * std::min(c.n_x, c.n_y);
    double lo = -c.n_y * c.lambda + eps;
    double hi = c.n_x * c.lambda - eps;
    // K' is increasing; narrow to the side containing the root.
    if (z > 0.0) lo = 0.0; else hi = 0.0;
    double t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = c.K1(t) - z;
        if (f > 0.0) hi = t; else lo = t;
        const double step = f / c.K2(t);
        double next = t - step;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - t) <= 1e-15 * (1.0 + std::fabs(t))) return next;
        t = next;
    }
    throw sf::no_convergence("saddlepoint root finder did not converge");
}

}  // namespace

double saddlepoint_gamma_diff_cdf(int n_x, int n_y, double alpha, double lambda, double z) {
    if (!(alpha > 0.0) || !(lambda > 0.0))
        throw std::domain_error("saddlepoint_gamma_diff_cdf: parameters must be positive");
    const Cgf c{n_x, n_y, alpha, lambda};
    const double sd = std::sqrt(c.K2(0.0));
    if (std::fabs(z) < 1e-8 * sd) return 0.5;  // distribution center
    const double t_hat = solve_saddlepoint(c, z);
    const double w = sgn(t_hat) * std::sqrt(2.0 * std::max(t_hat * z - c.K(t_hat), 0.0));
    const double u = t_hat * std::sqrt(c.K2(t_hat));
    return sf::std_normal_cdf(w) + sf::std_normal_pdf(w) * (1.0 / w - 1.0 / u);
}

double p_saddlepoint_gamma_diff(int n_x, int n_y, double alpha, double lambda, double t) {
    if (!(t > 0.0)) throw std::domain_error("p_saddlepoint_gamma_diff: t must be positive");
    const double p = 1.0 - saddlepoint_gamma_diff_cdf(n_x, n_y, alpha, lambda, t) +
                     saddlepoint_gamma_diff_cdf(n_x, n_y, alpha, lambda, -t);
    return std::clamp(p, 0.0, 1.0);
}

namespace {

// Adaptive Simpson on [a,b] for a nonnegative integrand given as log-values,
// rescaled by log_peak.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::fabs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

}  // namespace

double exact_gamma_diff_cdf(int n_x, int n_y, double alpha, double lambda, double z) {
    if (!(alpha > 0.0) || !(lambda > 0.0))
        throw std::domain_error("exact_gamma_diff_cdf: parameters must be positive");
    if (n_x < 1 || n_y < 1) throw std::domain_error("exact_gamma_diff_cdf: group sizes must be >= 1");

    // G(z) = E_V[ P(n_x a, n_x l (V + z)) ] with V ~ Gamma(n_y a, n_y l):
    // the printed integrand regrouped around a gamma density, evaluated in
    // log space.
    const double a_v = n_y * alpha;
    const double rate_v = n_y * lambda;
    const double a_g = n_x * alpha;
    const double rate_g = n_x * lambda;
    const double log_norm = a_v * std::log(rate_v) - sf::log_gamma(a_v);

    const auto log_integrand = [&](double v) {
        if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
        const double arg = rate_g * (v + z);
        if (!(arg > 0.0)) return -std::numeric_limits<double>::infinity();
        return log_norm + (a_v - 1.0) * std::log(v) - rate_v * v +
               sf::log_reg_lower_inc_gamma(a_g, arg);
    };

    // Integration window: the gamma density support that matters, clipped at
    // the lower limit max(0, -z).
    const double mean_v = a_v / rate_v;
    const double sd_v = std::sqrt(a_v) / rate_v;
    const double lo = std::max(z < 0.0 ? -z : 0.0, std::max(0.0, mean_v - 14.0 * sd_v));
    const double hi = std::max(mean_v + 14.0 * sd_v, lo + 16.0 * sd_v);

    // Locate the integrand peak for rescaling.
    constexpr int kScan = 256;
    double log_peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kScan; ++i) {
        const double v = lo + (hi - lo) * i / kScan;
        log_peak = std::max(log_peak, log_integrand(v));
    }
    if (log_peak == -std::numeric_limits<double>::infinity()) return 0.0;

    const auto scaled = [&](double v) {
        const double lv = log_integrand(v) - log_peak;
        return lv > -745.0 ? std::exp(lv) : 0.0;
    };
    const double m = 0.5 * (lo + hi);
    const double integral = adaptive_simpson(scaled, lo, hi, scaled(lo), scaled(m), scaled(hi),
                                             1e-12, 48);
    const double g = std::exp(log_peak + std::log(std::max(integral, 0.0)));
    return std::clamp(g, 0.0, 1.0);
}

double p_delta_ratio(const TwoSample& d) {
    if (d.n_x < 2 || d.n_y < 2) throw std::domain_error("p_delta_ratio: need n_x, n_y >= 2");
    if (!(d.mean_x > 0.0) || !(d.mean_y > 0.0))
        throw std::domain_error("p_delta_ratio: means must be strictly positive");
    const double s2x = d.css_x / (d.n_x - 1);
    const double s2y = d.css_y / (d.n_y - 1);
    const double mx = d.mean_x, my = d.mean_y;
    const double tau1 = std::sqrt(s2x / d.n_x / (my * my) + s2y / d.n_y * mx * mx / (my * my * my * my));
    const double tau2 = std::sqrt(s2y / d.n_y / (mx * mx) + s2x / d.n_x * my * my / (mx * mx * mx * mx));
    const double r1 = mx / my;
    const double r2 = my / mx;
    double p;
    if (r1 >= 1.0) {
        p = sf::std_normal_tail((r1 - 1.0) / tau1) + sf::std_normal_cdf((r2 - 1.0) / tau2);
    } else {
        p = sf::std_normal_tail((r2 - 1.0) / tau2) + sf::std_normal_cdf((r1 - 1.0) / tau1);
    }
    return std::min(1.0, p);
}

}  // namespace fastperm
