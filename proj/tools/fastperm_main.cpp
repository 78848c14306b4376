// Command-line surface: single tests, the batch screen-then-refine pipeline,
// scenario simulation, and planning utilities.
//
// Exit codes: 0 success, 2 usage error, 3 data/input error, 4 numeric failure.

#include <CLI11.hpp>

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fastperm/asymptotic.hpp"
#include "fastperm/oracles.hpp"
#include "fastperm/resampling.hpp"
#include "fastperm/simharness.hpp"
#include "fastperm/special_functions.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("FASTPERM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError("FASTPERM_SEED is not an integer");
        }
    }
    return 0;
}

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_number(const std::string& token, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(token, &pos);
        if (pos != token.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw DataError(where + ": not a number: '" + token + "'");
    }
}

std::vector<double> read_column_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::vector<double> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = strip(line);
        if (t.empty()) continue;
        if (lineno == 1) {
            // tolerate a header line on single-column inputs
            try {
                std::size_t pos = 0;
                const double v = std::stod(t, &pos);
                if (pos == t.size()) out.push_back(v);
                continue;
            } catch (const std::exception&) {
                continue;
            }
        }
        out.push_back(parse_number(t, path + ":" + std::to_string(lineno)));
    }
    if (out.empty()) throw DataError(path + ": no numeric values found");
    return out;
}

// Two-column CSV value,group with a header row and exactly two group labels.
std::pair<std::vector<double>, std::vector<double>> read_value_group_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::string line;
    int lineno = 0;
    std::map<std::string, std::vector<double>> groups;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = strip(line);
        if (t.empty()) continue;
        if (lineno == 1) continue;  // header
        const auto cells = split(t, ',');
        if (cells.size() != 2)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected value,group");
        const double v = parse_number(strip(cells[0]), path + ":" + std::to_string(lineno));
        const std::string g = strip(cells[1]);
        if (!groups.count(g)) order.push_back(g);
        groups[g].push_back(v);
    }
    if (groups.size() != 2)
        throw DataError(path + ": expected exactly two group labels, found " +
                        std::to_string(groups.size()));
    return {groups[order[0]], groups[order[1]]};
}

fastperm::TwoSample load_two_sample(const std::string& x_path, const std::string& y_path,
                                    const std::string& data_path) {
    using fastperm::TwoSample;
    if (!data_path.empty()) {
        if (!x_path.empty() || !y_path.empty())
            throw UsageError("give either --data or --x/--y, not both");
        auto [x, y] = read_value_group_csv(data_path);
        try {
            return TwoSample(std::move(x), std::move(y));
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what());
        }
    }
    if (x_path.empty() || y_path.empty()) throw UsageError("need --data or both --x and --y");
    try {
        return TwoSample(read_column_file(x_path), read_column_file(y_path));
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
}

// ---------------------------------------------------------------------------
// test

int cmd_test(const std::string& x_path, const std::string& y_path, const std::string& data_path,
             const std::string& stat_name, const std::string& methods_csv, long long b_pred,
             long long mc_b, double alpha, bool equal_var, std::uint64_t seed) {
    using namespace fastperm;
    const StatisticKind kind = parse_statistic_kind(stat_name);
    const TwoSample data = load_two_sample(x_path, y_path, data_path);

    std::vector<std::string> methods;
    for (const auto& raw : split(methods_csv, ',')) {
        const auto name = strip(raw);
        if (!name.empty()) methods.push_back(name);
    }
    if (methods.empty()) throw UsageError("no methods requested");

    for (const auto& name : methods) {
        double log10_p = 0.0;
        std::string status = "ok";
        long long iterations = 0;
        std::string m_stop = "NA";
        std::string deviance = "NA", aic = "NA";
        const std::uint64_t mseed = derive_seed(seed, 1, std::hash<std::string>{}(name));
        if (name == "alg1") {
            const PredReport r = p_pred(data, kind, b_pred, mseed);
            log10_p = r.log10_p;
            iterations = r.total_iterations;
            m_stop = std::to_string(r.counts.m_stop);
            if (r.status == PredStatus::Ok) {
                deviance = fmt_double(r.fit.deviance);
                aic = fmt_double(r.fit.aic);
            } else {
                status = "below_resolution";
            }
        } else if (name == "asym") {
            if (kind == StatisticKind::StudentizedAbsDiff)
                throw UsageError("asym does not support the studentized statistic");
            log10_p = p_asym(summary_of(data), kind, observed_statistic(data, kind)).log10_p;
        } else if (name == "simple_mc") {
            RandomEngine rng = make_engine(mseed);
            const SimpleMcResult r = p_simple_mc(data, kind, mc_b, rng);
            log10_p = r.p > 0.0 ? std::log10(r.p) : -std::numeric_limits<double>::infinity();
            iterations = r.b;
            if (r.exceedances == 0) status = "below_resolution";
        } else if (name == "t_test") {
            if (kind == StatisticKind::MaxRatio)
                throw UsageError("t_test applies to difference statistics");
            log10_p = std::log10(p_t_test(data, equal_var));
        } else if (name == "beta_prime") {
            if (kind != StatisticKind::MaxRatio)
                throw UsageError("beta_prime applies to the max_ratio statistic");
            const double t = observed_statistic(data, kind);
            log10_p = std::log10(p_beta_prime(data.n_x, data.n_y, alpha, t));
        } else if (name == "saddlepoint") {
            if (kind != StatisticKind::AbsDiff)
                throw UsageError("saddlepoint applies to the abs_diff statistic");
            double sum = 0.0;
            for (double v : data.x) sum += v;
            for (double v : data.y) sum += v;
            const double lambda = alpha * (data.n_x + data.n_y) / sum;
            log10_p = std::log10(
                p_saddlepoint_gamma_diff(data.n_x, data.n_y, alpha, lambda,
                                         observed_statistic(data, kind)));
        } else if (name == "delta") {
            if (kind != StatisticKind::MaxRatio)
                throw UsageError("delta applies to the max_ratio statistic");
            log10_p = std::log10(p_delta_ratio(data));
        } else {
            throw UsageError("unknown method: " + name);
        }
        std::cout << "method=" << name << " statistic=" << to_string(kind)
                  << " log10_p=" << fmt_double(log10_p) << " m_stop=" << m_stop
                  << " iterations=" << iterations << " deviance=" << deviance << " aic=" << aic
                  << " status=" << status << " seed=" << mseed << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// batch

struct Matrix {
    std::vector<std::string> sample_ids;
    std::vector<std::string> feature_ids;
    std::vector<std::vector<double>> values;  // per feature, aligned to sample_ids
};

Matrix read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    Matrix m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = strip(line);
        if (t.empty()) continue;
        const auto cells = split(t, ',');
        if (lineno == 1) {
            if (cells.size() < 2) throw DataError(path + ": header needs sample columns");
            for (std::size_t i = 1; i < cells.size(); ++i) m.sample_ids.push_back(strip(cells[i]));
            continue;
        }
        if (cells.size() != m.sample_ids.size() + 1)
            throw DataError(path + ":" + std::to_string(lineno) + ": wrong number of cells");
        m.feature_ids.push_back(strip(cells[0]));
        std::vector<double> row;
        row.reserve(m.sample_ids.size());
        for (std::size_t i = 1; i < cells.size(); ++i)
            row.push_back(parse_number(strip(cells[i]), path + ":" + std::to_string(lineno)));
        m.values.push_back(std::move(row));
    }
    if (m.feature_ids.empty()) throw DataError(path + ": no feature rows");
    return m;
}

std::map<std::string, std::string> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::map<std::string, std::string> labels;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = strip(line);
        if (t.empty()) continue;
        if (lineno == 1) continue;  // header
        const auto cells = split(t, ',');
        if (cells.size() != 2)
            throw DataError(path + ":" + std::to_string(lineno) + ": expected sample_id,group");
        labels[strip(cells[0])] = strip(cells[1]);
    }
    if (labels.empty()) throw DataError(path + ": no label rows");
    return labels;
}

int cmd_batch(const std::string& matrix_path, const std::string& labels_path,
              const std::string& stat_name, long long screen_b, double threshold, long long b_pred,
              std::uint64_t seed, int workers, std::optional<double> filter_floor,
              double filter_frac, const std::string& out_path) {
    using namespace fastperm;
    const StatisticKind kind = parse_statistic_kind(stat_name);
    if (threshold <= 0.0 || threshold > 1.0) throw UsageError("--threshold must be in (0,1]");
    if (screen_b < 1 || b_pred < 2) throw UsageError("--screen-b and --b-pred too small");
    if (workers < 1) throw UsageError("--workers must be >= 1");

    const Matrix m = read_matrix(matrix_path);
    const auto labels = read_labels(labels_path);

    // Resolve groups: lexicographically first label becomes group x.
    std::set<std::string> group_names;
    for (const auto& id : m.sample_ids) {
        const auto it = labels.find(id);
        if (it == labels.end()) throw DataError("sample '" + id + "' missing from label file");
        group_names.insert(it->second);
    }
    if (group_names.size() != 2)
        throw DataError("need exactly two groups, found " + std::to_string(group_names.size()));
    const std::string gx = *group_names.begin();
    std::vector<int> col_group(m.sample_ids.size());
    for (std::size_t i = 0; i < m.sample_ids.size(); ++i)
        col_group[i] = labels.at(m.sample_ids[i]) == gx ? 0 : 1;

    struct Row {
        std::string text;
    };
    std::vector<Row> rows(m.feature_ids.size());

    std::atomic<std::size_t> next{0};
    std::atomic<long long> kept{0};
    const auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < m.feature_ids.size(); i = next.fetch_add(1)) {
            std::vector<double> x, y;
            for (std::size_t c = 0; c < m.sample_ids.size(); ++c)
                (col_group[c] == 0 ? x : y).push_back(m.values[i][c]);

            std::ostringstream os;
            os << m.feature_ids[i] << ',' << x.size() << ',' << y.size() << ','
               << to_string(kind) << ',';

            if (filter_floor) {
                long long above = 0;
                for (double v : m.values[i])
                    if (v > *filter_floor) ++above;
                const double frac = static_cast<double>(above) /
                                    static_cast<double>(m.values[i].size());
                if (frac < filter_frac) {
                    os << "NA,filtered,NA,filtered,NA,NA,NA,NA,0";
                    rows[i].text = os.str();
                    continue;
                }
            }
            kept.fetch_add(1);

            const TwoSample data(x, y);
            const double fold = data.mean_x / data.mean_y;
            os << fmt_double(fold) << ',';

            const std::uint64_t screen_seed = derive_seed(seed, static_cast<std::uint64_t>(i), 1);
            RandomEngine rng = make_engine(screen_seed);
            const SimpleMcResult screened = p_simple_mc(data, kind, screen_b, rng);

            if (screened.p > threshold) {
                os << "screen," << fmt_double(std::log10(screened.p)) << ",ok,NA," << screen_b
                   << ",NA,NA," << screen_seed;
            } else {
                const std::uint64_t refine_seed = derive_seed(seed, static_cast<std::uint64_t>(i), 2);
                const PredReport r = p_pred(data, kind, b_pred, refine_seed);
                os << "alg1," << fmt_double(r.log10_p) << ','
                   << (r.status == PredStatus::Ok ? "ok" : "below_resolution") << ','
                   << r.counts.m_stop << ',' << r.total_iterations << ',';
                if (r.status == PredStatus::Ok)
                    os << fmt_double(r.fit.deviance) << ',' << fmt_double(r.fit.aic);
                else
                    os << "NA,NA";
                os << ',' << refine_seed;
            }
            rows[i].text = os.str();
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    work();
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    if (kept.load() == 0) throw DataError("every feature was removed by the expression filter");

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw DataError("cannot write " + out_path);
        os = &file;
    }
    *os << "feature_id,n_x,n_y,statistic,fold_change,method,log10_p,status,m_stop,iterations,"
           "deviance,aic,seed\n";
    for (const auto& r : rows) *os << r.text << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// plan

int cmd_plan(const std::string& x_path, const std::string& y_path, const std::string& stat_name,
             std::optional<int> n_x, std::optional<int> n_y, std::optional<double> mean_x,
             std::optional<double> mean_y, std::optional<double> var_x, std::optional<double> var_y,
             long long b_pred, std::optional<int> target_c) {
    using namespace fastperm;
    const StatisticKind kind = parse_statistic_kind(stat_name);
    if (kind == StatisticKind::StudentizedAbsDiff)
        throw UsageError("planning supports abs_diff and max_ratio only");

    SummaryPair s;
    if (!x_path.empty() || !y_path.empty()) {
        const TwoSample data = load_two_sample(x_path, y_path, "");
        s = summary_of(data);
    } else {
        if (!(n_x && n_y && mean_x && mean_y && var_x && var_y))
            throw UsageError("need --x/--y files or all of --n-x --n-y --mean-x --mean-y --var-x --var-y");
        s = SummaryPair{*n_x, *n_y, *mean_x, *mean_y, *var_x, *var_y};
    }
    const double t = kind == StatisticKind::AbsDiff
                         ? std::fabs(s.mean_x - s.mean_y)
                         : std::max(s.mean_x / s.mean_y, s.mean_y / s.mean_x);
    const int m_stop = m_stop_asym(s, kind, t, b_pred);
    std::cout << "m_stop_asym=" << m_stop << "\n";
    std::cout << "predicted_iterations=" << b_pred * static_cast<long long>(m_stop) << "\n";
    if (target_c) {
        const int nh = n_hat(s.mean_x, s.mean_y, s.var_x, s.var_y, kind, b_pred, *target_c);
        std::cout << "n_hat=" << nh << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

fastperm::Scenario parse_scenario_block(const std::map<std::string, std::string>& kv, int blockno) {
    using namespace fastperm;
    Scenario s;
    const auto where = "scenario block " + std::to_string(blockno);
    const auto need = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw DataError(where + ": missing key '" + key + "'");
        return it->second;
    };
    const auto opt_num = [&](const std::string& key, double dflt) {
        const auto it = kv.find(key);
        return it == kv.end() ? dflt : parse_number(it->second, where + " " + key);
    };

    s.id = kv.count("id") ? kv.at("id") : "scenario" + std::to_string(blockno);
    s.dist = parse_distribution(need("distribution"));
    s.kind = parse_statistic_kind(need("statistic"));
    s.n_x = static_cast<int>(parse_number(need("n_x"), where));
    s.n_y = static_cast<int>(parse_number(need("n_y"), where));
    s.replicates = static_cast<int>(opt_num("replicates", 1));
    s.seed = static_cast<std::uint64_t>(opt_num("seed", 0));
    s.b_pred = static_cast<long long>(opt_num("b_pred", 1000));
    s.mc_b = static_cast<long long>(opt_num("mc_b", 100000));
    s.trend_b = static_cast<long long>(opt_num("trend_b", 1000));
    if (kv.count("t_equal_var")) s.t_equal_var = kv.at("t_equal_var") == "true";

    for (const auto& name : split(need("methods"), ','))
        if (!strip(name).empty()) s.methods.push_back(parse_method(strip(name)));

    switch (s.dist) {
        case Distribution::Normal:
            s.px = {parse_number(need("mean_x"), where), opt_num("sd_x", 1.0)};
            s.py = {parse_number(need("mean_y"), where), opt_num("sd_y", 1.0)};
            break;
        case Distribution::Exponential:
            s.px = {parse_number(need("rate_x"), where), 0.0};
            s.py = {parse_number(need("rate_y"), where), 0.0};
            break;
        case Distribution::Gamma:
            s.px = {parse_number(need("shape"), where), parse_number(need("rate_x"), where)};
            s.py = {parse_number(need("shape"), where), parse_number(need("rate_y"), where)};
            break;
        case Distribution::Poisson:
            s.px = {parse_number(need("rate_x"), where), 0.0};
            s.py = {parse_number(need("rate_y"), where), 0.0};
            break;
        case Distribution::LogNormal:
            s.px = {parse_number(need("meanlog_x"), where), opt_num("sdlog_x", 1.0)};
            s.py = {parse_number(need("meanlog_y"), where), opt_num("sdlog_y", 1.0)};
            break;
        case Distribution::NegBinom:
            s.px = {parse_number(need("size"), where), parse_number(need("mean_x"), where)};
            s.py = {parse_number(need("size"), where), parse_number(need("mean_y"), where)};
            break;
    }

    static const std::set<std::string> known{
        "id",     "distribution", "statistic", "n_x",      "n_y",      "replicates", "seed",
        "b_pred", "mc_b",         "trend_b",   "methods",  "mean_x",   "mean_y",     "sd_x",
        "sd_y",   "rate_x",       "rate_y",    "shape",    "meanlog_x", "meanlog_y", "sdlog_x",
        "sdlog_y", "size",        "t_equal_var"};
    for (const auto& [key, value] : kv) {
        (void)value;
        if (!known.count(key)) throw DataError(where + ": unknown key '" + key + "'");
    }
    return s;
}

std::vector<fastperm::Scenario> read_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::vector<fastperm::Scenario> out;
    std::map<std::string, std::string> kv;
    std::string line;
    int blockno = 1;
    const auto flush = [&] {
        if (!kv.empty()) {
            out.push_back(parse_scenario_block(kv, blockno));
            kv.clear();
            ++blockno;
        }
    };
    while (std::getline(in, line)) {
        const std::string t = strip(line);
        if (t.empty()) {
            flush();
            continue;
        }
        if (t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw DataError(path + ": expected 'key = value': " + t);
        kv[strip(t.substr(0, eq))] = strip(t.substr(eq + 1));
    }
    flush();
    if (out.empty()) throw UsageError(path + ": no scenarios defined");
    return out;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path, int workers) {
    using namespace fastperm;
    const auto scenarios = read_scenarios(scenario_path);
    std::vector<ResultRow> all;
    for (const auto& s : scenarios) {
        auto rows = run_scenario(s, workers);
        for (auto& r : rows) all.push_back(std::move(r));
    }
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw DataError("cannot write " + out_path);
        os = &file;
    }
    write_result_csv(*os, all);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-sample permutation p-values via partition-stratified resampling"};
    app.require_subcommand(1);

    // test
    auto* test = app.add_subcommand("test", "p-values for a single two-sample dataset");
    std::string t_x, t_y, t_data, t_stat = "abs_diff", t_methods = "alg1";
    long long t_bpred = 1000, t_mcb = 100000;
    double t_alpha = 1.0;
    bool t_unequal = false;
    std::optional<std::uint64_t> t_seed;
    test->add_option("--x", t_x, "one-column file, group x");
    test->add_option("--y", t_y, "one-column file, group y");
    test->add_option("--data", t_data, "two-column CSV value,group");
    test->add_option("--stat", t_stat, "abs-diff | max-ratio | studentized");
    test->add_option("--method", t_methods, "comma list: alg1,asym,simple_mc,t_test,beta_prime,saddlepoint,delta");
    test->add_option("--b-pred", t_bpred, "iterations per partition for alg1");
    test->add_option("--mc-b", t_mcb, "iterations for simple_mc");
    test->add_option("--alpha", t_alpha, "gamma shape for beta_prime/saddlepoint");
    test->add_flag("--unequal-var", t_unequal, "Welch t-test instead of pooled");
    test->add_option("--seed", t_seed, "master seed (default env FASTPERM_SEED or 0)");

    // batch
    auto* batch = app.add_subcommand("batch", "screen-then-refine over a feature matrix");
    std::string b_matrix, b_labels, b_stat = "max_ratio", b_out;
    long long b_screen = 1000, b_bpred = 1000;
    double b_threshold = 1e-3, b_filter_frac = 0.5;
    std::optional<double> b_filter_floor;
    int b_workers = 1;
    std::optional<std::uint64_t> b_seed;
    batch->add_option("--matrix", b_matrix, "feature matrix CSV")->required();
    batch->add_option("--labels", b_labels, "sample_id,group CSV")->required();
    batch->add_option("--stat", b_stat, "abs-diff | max-ratio | studentized");
    batch->add_option("--screen-b", b_screen, "simple MC iterations for the screen");
    batch->add_option("--threshold", b_threshold, "refine features with screened p <= threshold");
    batch->add_option("--b-pred", b_bpred, "iterations per partition when refining");
    batch->add_option("--seed", b_seed, "master seed");
    batch->add_option("--workers", b_workers, "worker threads");
    batch->add_option("--filter-floor", b_filter_floor, "expression floor for the prefilter");
    batch->add_option("--filter-frac", b_filter_frac, "minimum fraction of samples above the floor");
    batch->add_option("--out", b_out, "output CSV (default stdout)");

    // plan
    auto* plan = app.add_subcommand("plan", "predicted stopping partition and sample size");
    std::string p_x, p_y, p_stat = "abs_diff";
    std::optional<int> p_nx, p_ny, p_c;
    std::optional<double> p_mx, p_my, p_vx, p_vy;
    long long p_bpred = 1000;
    plan->add_option("--x", p_x, "one-column file, group x");
    plan->add_option("--y", p_y, "one-column file, group y");
    plan->add_option("--stat", p_stat, "abs-diff | max-ratio");
    plan->add_option("--n-x", p_nx);
    plan->add_option("--n-y", p_ny);
    plan->add_option("--mean-x", p_mx);
    plan->add_option("--mean-y", p_my);
    plan->add_option("--var-x", p_vx);
    plan->add_option("--var-y", p_vy);
    plan->add_option("--b-pred", p_bpred, "iterations per partition");
    plan->add_option("--target-c", p_c, "also report the smallest equal n with m_stop_asym >= c");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run scenario files and emit tidy CSV");
    std::string s_file, s_out;
    int s_workers = 1;
    sim->add_option("--scenarios", s_file, "scenario file (key = value blocks)")->required();
    sim->add_option("--out", s_out, "output CSV (default stdout)");
    sim->add_option("--workers", s_workers, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (test->parsed()) {
            return cmd_test(t_x, t_y, t_data, t_stat, t_methods, t_bpred, t_mcb, t_alpha,
                            !t_unequal, t_seed ? *t_seed : default_seed());
        }
        if (batch->parsed()) {
            return cmd_batch(b_matrix, b_labels, b_stat, b_screen, b_threshold, b_bpred,
                             b_seed ? *b_seed : default_seed(), b_workers, b_filter_floor,
                             b_filter_frac, b_out);
        }
        if (plan->parsed()) {
            return cmd_plan(p_x, p_y, p_stat, p_nx, p_ny, p_mx, p_my, p_vx, p_vy, p_bpred, p_c);
        }
        if (sim->parsed()) {
            return cmd_simulate(s_file, s_out, s_workers);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const fastperm::sf::no_convergence& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
