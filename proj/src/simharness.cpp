#include "fastperm/simharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include "fastperm/asymptotic.hpp"
#include "fastperm/oracles.hpp"
#include "fastperm/special_functions.hpp"

namespace fastperm {

Distribution parse_distribution(const std::string& name) {
    if (name == "normal") return Distribution::Normal;
    if (name == "exponential") return Distribution::Exponential;
    if (name == "gamma") return Distribution::Gamma;
    if (name == "poisson") return Distribution::Poisson;
    if (name == "lognormal") return Distribution::LogNormal;
    if (name == "negbinom") return Distribution::NegBinom;
    throw std::invalid_argument("unknown distribution: " + name);
}

std::string to_string(Distribution d) {
    switch (d) {
        case Distribution::Normal: return "normal";
        case Distribution::Exponential: return "exponential";
        case Distribution::Gamma: return "gamma";
        case Distribution::Poisson: return "poisson";
        case Distribution::LogNormal: return "lognormal";
        case Distribution::NegBinom: return "negbinom";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "alg1") return Method::Alg1;
    if (name == "asym") return Method::Asym;
    if (name == "simple_mc") return Method::SimpleMc;
    if (name == "t_test") return Method::TTest;
    if (name == "beta_prime") return Method::BetaPrime;
    if (name == "saddlepoint") return Method::Saddlepoint;
    if (name == "delta") return Method::Delta;
    if (name == "trend") return Method::Trend;
    throw std::invalid_argument("unknown method: " + name);
}

std::string to_string(Method m) {
    switch (m) {
        case Method::Alg1: return "alg1";
        case Method::Asym: return "asym";
        case Method::SimpleMc: return "simple_mc";
        case Method::TTest: return "t_test";
        case Method::BetaPrime: return "beta_prime";
        case Method::Saddlepoint: return "saddlepoint";
        case Method::Delta: return "delta";
        case Method::Trend: return "trend";
    }
    return "unknown";
}

std::vector<double> sample_group(RandomEngine& rng, Distribution dist, const GroupParams& p, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    switch (dist) {
        case Distribution::Normal: {
            std::normal_distribution<double> d(p.a, p.b);
            for (auto& v : out) v = d(rng);
            break;
        }
        case Distribution::Exponential: {
            std::exponential_distribution<double> d(p.a);
            for (auto& v : out) v = d(rng);
            break;
        }
        case Distribution::Gamma: {
            std::gamma_distribution<double> d(p.a, 1.0 / p.b);
            for (auto& v : out) v = d(rng);
            break;
        }
        case Distribution::Poisson: {
            std::poisson_distribution<long long> d(p.a);
            for (auto& v : out) v = static_cast<double>(d(rng));
            break;
        }
        case Distribution::LogNormal: {
            std::normal_distribution<double> d(p.a, p.b);
            for (auto& v : out) v = std::exp(d(rng));
            break;
        }
        case Distribution::NegBinom: {
            // size r, mean mu: Poisson mixed over Gamma(r, p/(1-p)) with
            // p = r/(r+mu), i.e. gamma scale (1-p)/p = mu/r.
            const double r = p.a;
            const double mu = p.b;
            std::gamma_distribution<double> g(r, mu / r);
            for (auto& v : out) {
                std::poisson_distribution<long long> d(g(rng));
                v = static_cast<double>(d(rng));
            }
            break;
        }
    }
    return out;
}

std::vector<double> trend_profile(const TwoSample& data, StatisticKind kind, long long b_per_partition,
                                  RandomEngine& rng) {
    if (b_per_partition < 1) throw std::invalid_argument("trend_profile: b must be >= 1");
    const int n_min = std::min(data.n_x, data.n_y);
    std::vector<double> out(static_cast<std::size_t>(n_min) + 1);
    for (int m = 0; m <= n_min; ++m) {
        const long long c = partition_mc(data, kind, m, b_per_partition, rng);
        out[static_cast<std::size_t>(m)] = static_cast<double>(c) / static_cast<double>(b_per_partition);
    }
    return out;
}

namespace {

double fixed_alpha_for(const Scenario& s) {
    switch (s.dist) {
        case Distribution::Exponential: return 1.0;
        case Distribution::Gamma:
            if (s.px.a != s.py.a)
                throw std::invalid_argument("parametric oracle needs a common gamma shape");
            return s.px.a;
        default:
            throw std::invalid_argument("parametric gamma oracle requires exponential or gamma data");
    }
}

void check_method_compat(const Scenario& s, Method m) {
    const bool studentized = s.kind == StatisticKind::StudentizedAbsDiff;
    switch (m) {
        case Method::Asym:
            if (studentized)
                throw std::invalid_argument("asym does not support the studentized statistic");
            break;
        case Method::TTest:
            if (s.kind == StatisticKind::MaxRatio)
                throw std::invalid_argument("t_test applies to difference statistics");
            break;
        case Method::BetaPrime:
        case Method::Delta:
            if (s.kind != StatisticKind::MaxRatio)
                throw std::invalid_argument(to_string(m) + " applies to the max_ratio statistic");
            break;
        case Method::Saddlepoint:
            if (s.kind != StatisticKind::AbsDiff)
                throw std::invalid_argument("saddlepoint applies to the abs_diff statistic");
            break;
        default:
            break;
    }
    if (m == Method::BetaPrime || m == Method::Saddlepoint) fixed_alpha_for(s);
}

double safe_log10(double p) {
    return p > 0.0 ? std::log10(p) : -std::numeric_limits<double>::infinity();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<ResultRow> run_replicate(const Scenario& s, int rep) {
    const std::uint64_t rep_seed = derive_seed(s.seed, fnv1a(s.id), static_cast<std::uint64_t>(rep));
    RandomEngine data_rng = make_engine(derive_seed(rep_seed, 1));
    // Draw the groups in a fixed order (argument evaluation order is
    // unspecified and both draws share the engine).
    std::vector<double> xs = sample_group(data_rng, s.dist, s.px, s.n_x);
    std::vector<double> ys = sample_group(data_rng, s.dist, s.py, s.n_y);
    TwoSample data(std::move(xs), std::move(ys));

    std::vector<ResultRow> rows;
    for (const Method m : s.methods) {
        // Sub-stream keyed by the method id so streams stay independent of
        // which other methods run.
        const std::uint64_t mseed =
            derive_seed(rep_seed, 2, static_cast<std::uint64_t>(static_cast<int>(m)));
        ResultRow row;
        row.scenario_id = s.id;
        row.replicate = rep;
        row.method = to_string(m);
        row.statistic = to_string(s.kind);
        row.n_x = s.n_x;
        row.n_y = s.n_y;
        row.seed = mseed;
        switch (m) {
            case Method::Alg1: {
                const PredReport r = p_pred(data, s.kind, s.b_pred, mseed);
                row.log10_p = r.log10_p;
                row.iterations = r.total_iterations;
                row.m_stop = r.counts.m_stop;
                if (r.status == PredStatus::Ok) {
                    row.deviance = r.fit.deviance;
                    row.aic = r.fit.aic;
                    row.has_fit = true;
                }
                rows.push_back(std::move(row));
                break;
            }
            case Method::Asym: {
                const AsymReport r = p_asym(summary_of(data), s.kind, observed_statistic(data, s.kind));
                row.log10_p = r.log10_p;
                rows.push_back(std::move(row));
                break;
            }
            case Method::SimpleMc: {
                RandomEngine rng = make_engine(mseed);
                const SimpleMcResult r = p_simple_mc(data, s.kind, s.mc_b, rng);
                row.log10_p = safe_log10(r.p);
                row.iterations = r.b;
                rows.push_back(std::move(row));
                break;
            }
            case Method::TTest: {
                row.log10_p = safe_log10(p_t_test(data, s.t_equal_var));
                rows.push_back(std::move(row));
                break;
            }
            case Method::BetaPrime: {
                const double t = observed_statistic(data, StatisticKind::MaxRatio);
                row.log10_p = safe_log10(p_beta_prime(s.n_x, s.n_y, fixed_alpha_for(s), t));
                rows.push_back(std::move(row));
                break;
            }
            case Method::Saddlepoint: {
                const double alpha = fixed_alpha_for(s);
                double sum = 0.0;
                for (double v : data.x) sum += v;
                for (double v : data.y) sum += v;
                const double lambda = alpha * (s.n_x + s.n_y) / sum;
                const double t = observed_statistic(data, StatisticKind::AbsDiff);
                row.log10_p = safe_log10(p_saddlepoint_gamma_diff(s.n_x, s.n_y, alpha, lambda, t));
                rows.push_back(std::move(row));
                break;
            }
            case Method::Delta: {
                row.log10_p = safe_log10(p_delta_ratio(data));
                rows.push_back(std::move(row));
                break;
            }
            case Method::Trend: {
                RandomEngine rng = make_engine(mseed);
                const std::vector<double> prof = trend_profile(data, s.kind, s.trend_b, rng);
                for (std::size_t k = 0; k < prof.size(); ++k) {
                    ResultRow tr = row;
                    tr.m_stop = static_cast<int>(k);  // partition index
                    tr.log10_p = safe_log10(prof[k]);
                    tr.iterations = s.trend_b;
                    rows.push_back(std::move(tr));
                }
                break;
            }
        }
    }
    return rows;
}

}  // namespace

std::vector<ResultRow> run_scenario(const Scenario& s, int workers) {
    if (s.replicates < 1) throw std::invalid_argument("run_scenario: replicates must be >= 1");
    if (s.n_x < 1 || s.n_y < 1) throw std::invalid_argument("run_scenario: group sizes must be >= 1");
    if (s.methods.empty()) throw std::invalid_argument("run_scenario: no methods requested");
    for (const Method m : s.methods) check_method_compat(s, m);

    std::vector<std::vector<ResultRow>> blocks(static_cast<std::size_t>(s.replicates));
    const int nthreads = std::max(1, std::min(workers, s.replicates));
    if (nthreads == 1) {
        for (int r = 0; r < s.replicates; ++r) blocks[static_cast<std::size_t>(r)] = run_replicate(s, r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nthreads));
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int w = 0; w < nthreads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int r = next.fetch_add(1); r < s.replicates; r = next.fetch_add(1))
                        blocks[static_cast<std::size_t>(r)] = run_replicate(s, r);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<ResultRow> rows;
    for (auto& b : blocks)
        for (auto& r : b) rows.push_back(std::move(r));
    return rows;
}

const char* kResultCsvHeader =
    "scenario_id,replicate,method,statistic,n_x,n_y,log10_p,iterations,m_stop,deviance,aic,seed";

namespace {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void write_result_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << kResultCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.scenario_id << ',' << r.replicate << ',' << r.method << ',' << r.statistic << ','
           << r.n_x << ',' << r.n_y << ',' << fmt_double(r.log10_p) << ',' << r.iterations << ',';
        if (r.m_stop >= 0) os << r.m_stop;
        else os << "NA";
        os << ',';
        if (r.has_fit) os << fmt_double(r.deviance) << ',' << fmt_double(r.aic);
        else os << "NA,NA";
        os << ',' << r.seed << '\n';
    }
}

}  // namespace fastperm
