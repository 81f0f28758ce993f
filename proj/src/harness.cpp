#include "nbc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nbc/branching.hpp"
#include "nbc/dense_reference.hpp"
#include "nbc/nb_engine.hpp"
#include "nbc/path_oracle.hpp"
#include "nbc/rng.hpp"

namespace nbc {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_mean = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr out;
    if (xs.empty()) return out;
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stderr_mean = std::sqrt(ss / (static_cast<double>(xs.size() - 1) *
                                      static_cast<double>(xs.size())));
    return out;
}

int thread_count(int64_t work_items) {
    int64_t t = 0;
    if (const char* env = std::getenv(kThreadsEnvVar)) t = std::atoll(env);
    if (t <= 0) t = static_cast<int64_t>(std::thread::hardware_concurrency());
    if (t <= 0) t = 1;
    return static_cast<int>(std::min({t, work_items, int64_t{64}}));
}

// replicas are independent; results are written into caller-owned slots, so
// completion order does not matter
template <typename Fn>
void parallel_replicas(int replicas, Fn&& fn) {
    const int threads = thread_count(replicas);
    if (threads <= 1) {
        for (int r = 0; r < replicas; ++r) fn(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([t, threads, replicas, &fn] {
            for (int r = t; r < replicas; r += threads) fn(r);
        });
    for (auto& th : pool) th.join();
}

double kendall_tau(const std::vector<double>& xs, const std::vector<double>& ys) {
    const size_t n = xs.size();
    if (n < 2) return 0.0;
    int64_t concordant = 0, discordant = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            const double p = (xs[j] - xs[i]) * (ys[j] - ys[i]);
            if (p > 0) ++concordant;
            if (p < 0) ++discordant;
        }
    const auto pairs = static_cast<double>(n * (n - 1) / 2);
    return (static_cast<double>(concordant) - static_cast<double>(discordant)) / pairs;
}

}  // namespace

uint64_t sub_seed(uint64_t seed, uint64_t a, uint64_t b) {
    uint64_t x = seed;
    uint64_t h = splitmix64(x);
    x = h ^ (a * 0x9e3779b97f4a7c15ULL);
    h = splitmix64(x);
    x = h ^ (b * 0xc2b2ae3d27d4eb4fULL);
    return splitmix64(x);
}

// ---------------------------------------------------------------------------
// config and manifest

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    Config c;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line without '=': " + t);
        c.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return c;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

int64_t Config::get_int(const std::string& key, int64_t fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return std::stoll(it->second);
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return std::stod(it->second);
}

uint64_t Config::get_seed(const std::string& key, uint64_t fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return std::stoull(it->second);
}

void Config::merge_defaults(const Config& file_config) {
    for (const auto& [k, v] : file_config.entries())
        if (!kv_.count(k)) kv_[k] = v;
}

void write_manifest(const std::string& path, const std::string& mode, const Config& config,
                    const std::vector<std::pair<std::string, std::string>>& info) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open manifest for writing: " + path);
    out << "mode=" << mode << '\n';
    for (const auto& [k, v] : config.entries())
        if (k != "mode" && k[0] != '_') out << k << '=' << v << '\n';
    out << "info.version=" << kLibraryVersion << '\n';
    for (const auto& [k, v] : info) out << "info." << k << '=' << v << '\n';
}

std::pair<std::string, Config> read_manifest(const std::string& path) {
    Config all = Config::from_file(path);
    const std::string mode = all.get_str("mode");
    if (mode.empty()) throw std::runtime_error("manifest has no mode: " + path);
    Config config;
    for (const auto& [k, v] : all.entries())
        if (k != "mode" && k.rfind("info.", 0) != 0) config.set(k, v);
    return {mode, config};
}

namespace {

void maybe_write_manifest(const Config& config, const std::string& mode,
                          const std::string& anchor_path, double wall_clock_s,
                          std::vector<std::pair<std::string, std::string>> info = {}) {
    if (config.has("_no_manifest") || anchor_path.empty()) return;
    info.emplace_back("wall_clock_s", format_double(wall_clock_s));
    write_manifest(anchor_path + ".manifest", mode, config, info);
}

}  // namespace

// ---------------------------------------------------------------------------
// spectral baseline

std::vector<int8_t> spectral_baseline(const LabelledGraph& g, double d, int max_iters,
                                      double residual_tol, bool* converged) {
    const auto n = static_cast<size_t>(g.n());
    if (n == 0) throw std::invalid_argument("spectral_baseline: empty graph");
    const double c = d / static_cast<double>(g.n());

    std::vector<double> x(n);
    Rng rng(0x5EED5EED, 0);
    for (auto& v : x) v = rng.uniform_pm1();

    const auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        double total = 0.0;
        for (double v : in) total += v;
        for (size_t v = 0; v < n; ++v) {
            double acc = 0.0;
            for (int32_t w : g.neighbors(static_cast<int32_t>(v))) acc += in[w];
            out[v] = acc - c * total;
        }
        // deflate the all-ones direction before sign rounding
        double mean = 0.0;
        for (double v : out) mean += v;
        mean /= static_cast<double>(n);
        for (double& v : out) v -= mean;
    };

    bool ok = false;
    std::vector<double> y(n);
    for (int iter = 0; iter < max_iters; ++iter) {
        apply(x, y);
        double lambda = 0.0, norm_x = 0.0;
        for (size_t i = 0; i < n; ++i) {
            lambda += x[i] * y[i];
            norm_x += x[i] * x[i];
        }
        lambda /= std::max(norm_x, 1e-300);
        double res = 0.0, norm_y = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double r = y[i] - lambda * x[i];
            res += r * r;
            norm_y += y[i] * y[i];
        }
        norm_y = std::sqrt(norm_y);
        if (norm_y < 1e-300) break;  // degenerate; keep the current iterate
        for (size_t i = 0; i < n; ++i) x[i] = y[i] / norm_y;
        if (std::sqrt(res) <= residual_tol * std::max(std::abs(lambda), 1e-30)) {
            ok = true;
            break;
        }
    }
    if (converged) *converged = ok;
    std::vector<int8_t> labels(n);
    for (size_t i = 0; i < n; ++i) labels[i] = x[i] < 0.0 ? -1 : 1;
    return labels;
}

// ---------------------------------------------------------------------------
// phase sweep

namespace {

std::vector<double> parse_grid(const std::string& grid) {
    std::vector<double> out;
    std::stringstream ss(grid);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const std::string t = trim(tok);
        if (!t.empty()) out.push_back(std::stod(t));
    }
    if (out.empty()) throw std::invalid_argument("sweep: empty grid");
    return out;
}

AlgoParams sweep_algo_params(const SbmParams& params, double lambda, const Config& config) {
    DeriveOptions opts;
    const auto rounds = config.get_int("rounds", 0);
    if (rounds > 0) opts.rounds_override = static_cast<int>(rounds);
    if (config.has("kappa")) opts.kappa_override = config.get_double("kappa", 0.0);
    if (config.get_str("variant", "simple") == "simple" && !opts.kappa_override)
        opts.kappa_override = 0.0;  // the simple variant has no dither
    if (lambda > 1.0) return derive_params(params, opts);
    // below or at threshold there is no valid parameter choice; borrow the
    // schedule from a proxy model at s^2/d = 2 so the run still executes
    const double d = params.d();
    const double s_proxy = std::sqrt(2.0 * d);
    SbmParams proxy{params.n, d + s_proxy, d - s_proxy};
    return derive_params(proxy, opts);
}

}  // namespace

SweepReport run_phase_sweep(const Config& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const int64_t n = config.get_int("n", 50000);
    const double d_base = config.get_double("d", 3.0);
    const auto grid = parse_grid(config.get_str("grid", "0.5,1,2,4,8"));
    const int replicas = static_cast<int>(config.get_int("replicas", 10));
    const uint64_t seed = config.get_seed("seed", 1);
    const std::string variant = config.get_str("variant", "simple");
    if (variant != "simple" && variant != "full")
        throw std::invalid_argument("sweep: variant must be simple or full");
    if (replicas < 1) throw std::invalid_argument("sweep: replicas must be >= 1");

    SweepReport report;
    for (size_t point = 0; point < grid.size(); ++point) {
        const double lambda = grid[point];
        if (lambda < 0.0) throw std::invalid_argument("sweep: negative s^2/d");
        // s = sqrt(lambda d) needs s <= d; raise d per point when the
        // requested ratio is infeasible at the configured degree
        const double d_pt = lambda <= d_base ? d_base : lambda + 1.0;
        const double s_pt = std::sqrt(lambda * d_pt);
        const SbmParams params{n, d_pt + s_pt, d_pt - s_pt};
        const AlgoParams algo = sweep_algo_params(params, lambda, config);

        std::vector<double> overlaps(static_cast<size_t>(replicas));
        std::vector<double> runtimes(static_cast<size_t>(replicas));
        parallel_replicas(replicas, [&](int r) {
            const LabelledGraph g = sample_sbm(params, sub_seed(seed, 10 + point, r));
            const std::vector<int8_t> truth(g.labels().begin(), g.labels().end());
            LabelledGraph unlabelled = g;
            unlabelled.clear_labels();
            const uint64_t run_seed = sub_seed(seed, 20 + point, r);
            const ClusterResult result = variant == "full"
                                             ? cluster(unlabelled, params, algo, run_seed)
                                             : cluster_simple(unlabelled, params, algo, run_seed);
            overlaps[r] = overlap(truth, result.tau);
            runtimes[r] = result.diagnostics.total_seconds;
        });

        const MeanStderr ov = mean_stderr(overlaps);
        const MeanStderr rt = mean_stderr(runtimes);
        report.points.push_back(
            {lambda, n, d_pt, replicas, ov.mean, ov.stderr_mean, rt.mean});
    }

    std::vector<double> xs, ys;
    for (const auto& p : report.points) {
        xs.push_back(p.s2_over_d);
        ys.push_back(p.mean_overlap);
    }
    report.kendall_tau = kendall_tau(xs, ys);

    const std::string out = config.get_str("out");
    if (!out.empty()) {
        std::ofstream csv(out);
        if (!csv) throw std::runtime_error("cannot open for writing: " + out);
        csv << "s2_over_d,n,d,replicas,mean_overlap,stderr,mean_runtime_s\n";
        for (const auto& p : report.points)
            csv << format_double(p.s2_over_d) << ',' << p.n << ',' << format_double(p.d) << ','
                << p.replicas << ',' << format_double(p.mean_overlap) << ','
                << format_double(p.stderr_mean) << ',' << format_double(p.mean_runtime_s)
                << '\n';
    }
    const std::string gnuplot = config.get_str("gnuplot_data");
    if (!gnuplot.empty()) {
        std::ofstream dat(gnuplot);
        if (!dat) throw std::runtime_error("cannot open for writing: " + gnuplot);
        dat << "# s2_over_d mean_overlap stderr\n";
        for (const auto& p : report.points)
            dat << format_double(p.s2_over_d) << ' ' << format_double(p.mean_overlap) << ' '
                << format_double(p.stderr_mean) << '\n';
    }
    maybe_write_manifest(config, "sweep", out,
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                             .count(),
                         {{"kendall_tau", format_double(report.kendall_tau)}});
    return report;
}

// ---------------------------------------------------------------------------
// moment suite

namespace {

// E[W_e^m | labels] for one potential edge
double edge_moment(double p, double c, int m) {
    return p * std::pow(1.0 - c, m) + (1.0 - p) * std::pow(-c, m);
}

// exact E[prod of path weights | full labelling]: merge the paths' edges
// with multiplicities, multiply per-edge moments
double exact_product_expectation(const std::vector<std::vector<int32_t>>& paths,
                                 const std::vector<int8_t>& sigma, double d, double s,
                                 int64_t n) {
    std::map<std::pair<int32_t, int32_t>, int> mult;
    for (const auto& path : paths)
        for (size_t i = 1; i < path.size(); ++i) {
            auto e = std::minmax(path[i - 1], path[i]);
            ++mult[{e.first, e.second}];
        }
    const double c = d / static_cast<double>(n);
    double prod = 1.0;
    for (const auto& [e, m] : mult) {
        const double p =
            (d + static_cast<double>(sigma[e.first]) * sigma[e.second] * s) /
            static_cast<double>(n);
        prod *= edge_moment(p, c, m);
    }
    return prod;
}

struct PathEvaluator {
    std::vector<std::vector<int32_t>> paths;
    double evaluate(const std::vector<uint8_t>& edge_present, int n, double c) const {
        double acc = 0.0;
        for (const auto& path : paths) {
            double w = 1.0;
            for (size_t i = 1; i < path.size(); ++i) {
                const int32_t a = std::min(path[i - 1], path[i]);
                const int32_t b = std::max(path[i - 1], path[i]);
                w *= edge_present[a * n + b] ? 1.0 - c : -c;
            }
            acc += w;
        }
        return acc;
    }
};

}  // namespace

MomentReport run_moment_suite(const Config& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = static_cast<int>(config.get_int("moment_n", 8));
    const int k = static_cast<int>(config.get_int("moment_k", 2));
    const auto samples = config.get_int("samples", 100000);
    const uint64_t seed = config.get_seed("seed", 7);
    const double d = config.get_double("d", 2.0);
    const double s = config.get_double("s", 1.8);
    if (n < 6 || n > 10 || k < 1 || k > 4)
        throw std::invalid_argument("moments: regime restricted to n in [6,10], k in [1,4]");
    if (samples < 1000) throw std::invalid_argument("moments: need at least 1000 samples");
    const SbmParams params{n, d + s, d - s};
    params.validate();
    const double c = d / static_cast<double>(n);

    // fixed balanced labelling; u,v same class, u',v' the opposite class so
    // the four possible shared edges between the two path families are all
    // cross-class (keeps the finite-n factorization slack small)
    std::vector<int8_t> sigma(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) sigma[i] = i % 4 < 2 ? int8_t{1} : int8_t{-1};
    const int32_t u = 0, v = 1, u2 = 2, v2 = 3;

    MomentReport report;
    const auto add_check = [&report](const std::string& name, double estimate, double prediction,
                                     double se, double tolerance) {
        const bool pass = std::abs(estimate - prediction) <= tolerance;
        report.checks.push_back({name, estimate, prediction, se, tolerance, pass});
        report.all_pass = report.all_pass && pass;
    };
    const auto add_ceiling = [&report](const std::string& name, double estimate, double ceiling,
                                       double se) {
        const bool pass = estimate <= ceiling;
        report.checks.push_back({name, estimate, ceiling, se, ceiling, pass});
        report.all_pass = report.all_pass && pass;
    };

    // --- exact per-path first-moment identity, k = 1..3 ---
    for (int kk = 1; kk <= 3; ++kk) {
        double max_dev = 0.0;
        for (int8_t su : {int8_t{1}, int8_t{-1}})
            for (int8_t sv : {int8_t{1}, int8_t{-1}}) {
                const auto paths = enumerate_saw_paths(n, kk, u, v);
                for (const auto& path : paths) {
                    SawDecomposition dec;
                    dec.segments.push_back({path, 1});
                    dec.endpoints = {u, v};
                    const std::vector<EndpointLabel> labels{{u, su}, {v, sv}};
                    const double expect = exact_path_expectation(params, dec, labels);
                    const double closed = static_cast<double>(su) * sv *
                                          std::pow(s, kk) /
                                          std::pow(static_cast<double>(n), kk);
                    max_dev = std::max(max_dev, std::abs(expect - closed));
                }
            }
        add_check("first_moment_exact_k" + std::to_string(kk), max_dev, 0.0, 0.0, 1e-12);
    }

    // --- Monte-Carlo estimates at the suite's (n, k) ---
    PathEvaluator ev_uv{enumerate_saw_paths(n, k, u, v)};
    PathEvaluator ev_u2v2{enumerate_saw_paths(n, k, u2, v2)};
    const int k_bad = 4;
    PathEvaluator ev_nb4{enumerate_nb_paths(n, k_bad, u, v)};
    PathEvaluator ev_saw4{enumerate_saw_paths(n, k_bad, u, v)};
    const int64_t bad_samples = std::min<int64_t>(samples, 20000);

    std::vector<double> edge_prob(static_cast<size_t>(n) * n, 0.0);
    for (int32_t a = 0; a < n; ++a)
        for (int32_t b = a + 1; b < n; ++b)
            edge_prob[a * n + b] =
                (d + static_cast<double>(sigma[a]) * sigma[b] * s) / static_cast<double>(n);

    Rng rng(seed, 3);
    std::vector<uint8_t> present(static_cast<size_t>(n) * n, 0);
    double sum_y = 0.0, sum_y2 = 0.0, sum_y4 = 0.0, sum_yy2 = 0.0, sum_yy2_sq = 0.0;
    int64_t bad_exceed = 0;
    const double bad_threshold =
        std::pow(s, k_bad) * std::pow(static_cast<double>(n), -4.0 / 3.0);
    for (int64_t it = 0; it < samples; ++it) {
        for (int32_t a = 0; a < n; ++a)
            for (int32_t b = a + 1; b < n; ++b)
                present[a * n + b] = rng.uniform01() < edge_prob[a * n + b] ? 1 : 0;
        const double y = ev_uv.evaluate(present, n, c);
        const double y2 = ev_u2v2.evaluate(present, n, c);
        sum_y += y;
        sum_y2 += y * y;
        sum_y4 += y * y * y * y;
        sum_yy2 += y * y2;
        sum_yy2_sq += y * y2 * y * y2;
        if (it < bad_samples) {
            const double n4 = ev_nb4.evaluate(present, n, c);
            const double s4 = ev_saw4.evaluate(present, n, c);
            if (std::abs(n4 - s4) >= bad_threshold) ++bad_exceed;
        }
    }
    const auto ns = static_cast<double>(samples);
    const double mean_y = sum_y / ns;
    const double mean_y_sq = sum_y2 / ns;  // E[Y^2]
    const double var_y = std::max(0.0, mean_y_sq - mean_y * mean_y);
    const double se_y = std::sqrt(var_y / ns);

    // first moment vs the closed form, which is exact at finite n
    const double first_pred = static_cast<double>(ev_uv.paths.size()) *
                              static_cast<double>(sigma[u]) * sigma[v] * std::pow(s, k) /
                              std::pow(static_cast<double>(n), k);
    add_check("first_moment_mc", mean_y, first_pred, se_y, 4.0 * se_y);

    // second moment against the asymptotic ceiling with the pinned 1.5x slack
    const double var_y2 = std::max(0.0, sum_y4 / ns - mean_y_sq * mean_y_sq);
    const double se_y_sq = std::sqrt(var_y2 / ns);
    const double ceiling = 1.5 * 2.0 * (s * s / (s * s - d)) * std::pow(s, 2 * k) /
                           std::pow(static_cast<double>(n), 2.0);
    add_ceiling("second_moment_ceiling", mean_y_sq, ceiling, se_y_sq);

    // exact finite-n second moment as a two-sided sanity check
    double exact_y_sq = 0.0;
    for (const auto& p1 : ev_uv.paths)
        for (const auto& p2 : ev_uv.paths)
            exact_y_sq += exact_product_expectation({p1, p2}, sigma, d, s, n);
    add_check("second_moment_vs_exact", mean_y_sq, exact_y_sq, se_y_sq, 4.0 * se_y_sq);

    // cross-moment factorization ratio (the paper's uncorrelatedness claim)
    const double mean_yy2 = sum_yy2 / ns;
    const double mean_y2_only = [&] {
        // E[Y_{u',v'}] is the same closed form with the opposite class signs
        return static_cast<double>(ev_u2v2.paths.size()) * static_cast<double>(sigma[u2]) *
               sigma[v2] * std::pow(s, k) / std::pow(static_cast<double>(n), k);
    }();
    const double ratio = mean_yy2 / (mean_y * mean_y2_only);
    const double var_yy2 = std::max(0.0, sum_yy2_sq / ns - mean_yy2 * mean_yy2);
    const double se_num = std::sqrt(var_yy2 / ns);
    const double se_ratio =
        std::abs(ratio) * std::sqrt(std::pow(se_num / mean_yy2, 2.0) +
                                    std::pow(se_y / mean_y, 2.0));
    add_check("cross_moment_ratio", ratio, 1.0, se_ratio, 4.0 * se_ratio);

    double exact_cross = 0.0;
    for (const auto& p1 : ev_uv.paths)
        for (const auto& p2 : ev_u2v2.paths)
            exact_cross += exact_product_expectation({p1, p2}, sigma, d, s, n);
    add_check("cross_moment_vs_exact", mean_yy2, exact_cross, se_num, 4.0 * se_num);

    // bad-path mass at k = 4 (shorter lengths have N = Y identically)
    const double bad_mass = static_cast<double>(bad_exceed) / static_cast<double>(bad_samples);
    const double bad_bound = 1.5 * std::pow(static_cast<double>(n), -1.0 / 3.0);
    add_ceiling("bad_path_mass_k4", bad_mass, bad_bound,
                std::sqrt(bad_mass * (1.0 - bad_mass) / static_cast<double>(bad_samples)));

    const std::string out = config.get_str("out");
    if (!out.empty()) {
        std::ofstream rep(out);
        if (!rep) throw std::runtime_error("cannot open for writing: " + out);
        for (const auto& chk : report.checks)
            rep << chk.name << ": estimate=" << format_double(chk.estimate)
                << " prediction=" << format_double(chk.prediction)
                << " stderr=" << format_double(chk.standard_error)
                << " tolerance=" << format_double(chk.tolerance)
                << " pass=" << (chk.pass ? "yes" : "no") << '\n';
        rep << "all_pass=" << (report.all_pass ? "yes" : "no") << '\n';
    }
    maybe_write_manifest(config, "moments", out,
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                             .count());
    return report;
}

// ---------------------------------------------------------------------------
// oracle suite

namespace {

bool close(double a, double b, double rtol) {
    return std::abs(a - b) <= rtol * std::max({1.0, std::abs(a), std::abs(b)});
}

SbmParams small_params_for_seed(uint64_t seed) {
    Rng rng(seed, 77);
    const auto n = static_cast<int64_t>(4 + rng.below(7));  // 4..10
    // keep a = d + s below n so a/n stays a probability
    const double d_max = std::min(3.0, static_cast<double>(n) / 2.2);
    const double d = 1.0 + (d_max - 1.0) * rng.uniform01();
    const double s = 0.9 * d * rng.uniform01();  // b > 0
    return SbmParams{n, d + s, d - s};
}

}  // namespace

OracleReport run_oracle_suite(const Config& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto seeds = config.get_int("oracle_seeds", 200);
    const int k_max = static_cast<int>(config.get_int("oracle_kmax", 6));
    const uint64_t seed0 = config.get_seed("seed", 11);

    OracleReport report;
    const auto add = [&report](const std::string& name, bool pass, std::string detail = "") {
        report.checks.push_back({name, pass, std::move(detail)});
        report.all_pass = report.all_pass && pass;
    };

    // engine vs brute-force enumeration, every k <= k_max, entrywise
    {
        bool pass = true;
        std::string detail;
        for (int64_t i = 0; i < seeds && pass; ++i) {
            const SbmParams params = small_params_for_seed(seed0 + static_cast<uint64_t>(i));
            const LabelledGraph g = sample_sbm(params, seed0 + static_cast<uint64_t>(i));
            const int n = static_cast<int>(g.n());
            const double offset = params.d() / static_cast<double>(n);
            const auto brute = nb_matrices_bruteforce(g, params.d(), k_max);
            for (int k = 0; k <= k_max && pass; ++k) {
                for (int col = 0; col < n && pass; ++col) {
                    std::vector<double> z(static_cast<size_t>(n), 0.0);
                    z[col] = 1.0;
                    const MatvecResult got = nb_matvec(g, offset, k, z, Normalize::Off);
                    for (int row = 0; row < n; ++row) {
                        if (!close(got.values[row], brute[k][row][col], 1e-9)) {
                            pass = false;
                            detail = "seed " + std::to_string(i) + " k " + std::to_string(k);
                            break;
                        }
                    }
                }
            }
        }
        add("engine_vs_bruteforce", pass, detail);
    }

    // dense operator identities M Q_k = Q_{k+1}, hat(M) Q_k = (N^{k+1};0;0;0)
    {
        bool pass = true;
        std::string detail;
        const int64_t ident_seeds = std::min<int64_t>(seeds, 20);
        for (int64_t i = 0; i < ident_seeds && pass; ++i) {
            const SbmParams params = small_params_for_seed(seed0 + 5000 + static_cast<uint64_t>(i));
            const LabelledGraph g = sample_sbm(params, seed0 + 5000 + static_cast<uint64_t>(i));
            const int n = static_cast<int>(g.n());
            const double offset = params.d() / static_cast<double>(n);
            const auto n_mats = dense_n_matrices(g, offset, k_max);
            const DenseMatrix m_op = dense_m_operator(g, offset);
            const DenseMatrix m_hat = dense_m_hat_operator(g, offset);
            for (int k = 0; k + 1 <= k_max && pass; ++k) {
                const DenseMatrix qk = dense_q_stack(n_mats, offset, k);
                const DenseMatrix qk1 = dense_q_stack(n_mats, offset, k + 1);
                const DenseMatrix lhs = dense_multiply(m_op, qk);
                const DenseMatrix lhs_hat = dense_multiply(m_hat, qk);
                for (int r = 0; r < 4 * n && pass; ++r)
                    for (int cidx = 0; cidx < n; ++cidx) {
                        const double want = qk1[r][cidx];
                        const double want_hat =
                            r < n ? n_mats[k + 1][r][cidx] : 0.0;
                        if (!close(lhs[r][cidx], want, 1e-10) ||
                            !close(lhs_hat[r][cidx], want_hat, 1e-10)) {
                            pass = false;
                            detail = "seed " + std::to_string(i) + " k " + std::to_string(k);
                            break;
                        }
                    }
            }
        }
        add("matrix_identities", pass, detail);
    }

    // engine stack against the dense Q_k z reference
    {
        bool pass = true;
        std::string detail;
        for (int64_t i = 0; i < std::min<int64_t>(seeds, 20) && pass; ++i) {
            const SbmParams params = small_params_for_seed(seed0 + 9000 + static_cast<uint64_t>(i));
            const LabelledGraph g = sample_sbm(params, seed0 + 9000 + static_cast<uint64_t>(i));
            const int n = static_cast<int>(g.n());
            const double offset = params.d() / static_cast<double>(n);
            const auto n_mats = dense_n_matrices(g, offset, k_max);
            Rng zr(seed0, 31 + static_cast<uint64_t>(i));
            std::vector<double> z(static_cast<size_t>(n));
            for (auto& x : z) x = zr.uniform_pm1();
            NbStack stack = make_level0_stack(z);
            for (int level = 1; level + 1 <= k_max && pass; ++level) {
                apply_m(g, offset, stack, false);
                const DenseMatrix qk = dense_q_stack(n_mats, offset, level);
                const std::vector<double> want = dense_apply(qk, z);
                for (int r = 0; r < n; ++r) {
                    if (!close(stack.q1[r], want[r], 1e-10) ||
                        !close(stack.q2[r], want[n + r], 1e-10) ||
                        !close(stack.q3[r], want[2 * n + r], 1e-10) ||
                        !close(stack.q4[r], want[3 * n + r], 1e-10)) {
                        pass = false;
                        detail = "seed " + std::to_string(i) + " level " + std::to_string(level);
                        break;
                    }
                }
            }
        }
        add("stack_vs_dense_reference", pass, detail);
    }

    // N^{(k)} symmetry through the engine
    {
        bool pass = true;
        for (int64_t i = 0; i < std::min<int64_t>(seeds, 50) && pass; ++i) {
            const SbmParams params = small_params_for_seed(seed0 + 13000 + static_cast<uint64_t>(i));
            const LabelledGraph g = sample_sbm(params, seed0 + 13000 + static_cast<uint64_t>(i));
            const int n = static_cast<int>(g.n());
            const double offset = params.d() / static_cast<double>(n);
            for (int k = 1; k <= k_max && pass; ++k) {
                std::vector<double> e0(static_cast<size_t>(n), 0.0), e1 = e0;
                e0[0] = 1.0;
                e1[n - 1] = 1.0;
                const auto r0 = nb_matvec(g, offset, k, e0, Normalize::Off);
                const auto r1 = nb_matvec(g, offset, k, e1, Normalize::Off);
                if (!close(r0.values[n - 1], r1.values[0], 1e-9)) pass = false;
            }
        }
        add("nb_symmetry", pass);
    }

    // row sums: brute-force N summed over v equals engine N * ones
    {
        bool pass = true;
        for (int64_t i = 0; i < std::min<int64_t>(seeds, 20) && pass; ++i) {
            const SbmParams params = small_params_for_seed(seed0 + 17000 + static_cast<uint64_t>(i));
            const LabelledGraph g = sample_sbm(params, seed0 + 17000 + static_cast<uint64_t>(i));
            const int n = static_cast<int>(g.n());
            const double offset = params.d() / static_cast<double>(n);
            const auto brute = nb_matrices_bruteforce(g, params.d(), k_max);
            const std::vector<double> ones(static_cast<size_t>(n), 1.0);
            for (int k = 0; k <= k_max && pass; ++k) {
                const auto got = nb_matvec(g, offset, k, ones, Normalize::Off);
                for (int r = 0; r < n && pass; ++r) {
                    double want = 0.0;
                    for (int cidx = 0; cidx < n; ++cidx) want += brute[k][r][cidx];
                    if (!close(got.values[r], want, 1e-9)) pass = false;
                }
            }
        }
        add("row_sum_consistency", pass);
    }

    // combinatorial identities over exhaustive enumerations
    {
        bool claim_ok = true, rbound_ok = true, count_ok = true;
        const int n = 8, k_len = 7;
        const double ln_n = std::log(static_cast<double>(n));
        const double big_c = static_cast<double>(k_len) / ln_n;
        std::map<std::pair<int, int>, int64_t> per_type;  // (k_new, k_ret>=1) path counts, u->v
        std::vector<int32_t> stack_path{0};
        int64_t visited = 0;
        const int32_t target = 1;
        const std::function<void(int)> dfs = [&](int len) {
            const PathRecord rec = classify_edges(stack_path);
            if (rec.distinct_vertices() !=
                    static_cast<int>(std::set<int32_t>(stack_path.begin(), stack_path.end())
                                         .size()) ||
                rec.k_new + rec.k_old + rec.k_ret != rec.length())
                claim_ok = false;
            std::set<std::pair<int32_t, int32_t>> distinct_edges;
            for (size_t i = 1; i < stack_path.size(); ++i) {
                auto e = std::minmax(stack_path[i - 1], stack_path[i]);
                distinct_edges.insert({e.first, e.second});
            }
            if (rec.distinct_edges() != static_cast<int>(distinct_edges.size())) claim_ok = false;

            if (len >= 1 && stack_path.back() == target && rec.k_ret >= 1)
                ++per_type[{rec.k_new, rec.k_ret}];

            ++visited;
            if (len <= 6 || visited % 16 == 0) {
                // A returning edge can create a segment and split at both
                // ends of the old run it enters (+3), a backtrack can create
                // and split (+2); the exhaustively verified bound is
                // 3 k_r + 2 B + 1. The nominal 2 k_r + B + 1 only holds on
                // the two-SAW concatenation shapes, checked separately.
                const SawDecomposition dec = canonical_saw_decomposition(stack_path);
                const int r = static_cast<int>(dec.segments.size());
                if (r > 3 * rec.k_ret + 2 * rec.backtracks + 1) rbound_ok = false;
            }
            if (len == k_len) return;
            for (int32_t w = 0; w < n; ++w) {
                if (w == stack_path.back()) continue;
                stack_path.push_back(w);
                dfs(len + 1);
                stack_path.pop_back();
            }
        };
        dfs(0);
        for (const auto& [type, count] : per_type) {
            const auto [k_new, k_ret] = type;
            const double bound =
                std::pow(static_cast<double>(n),
                         k_new + k_ret / 2.0 + big_c * std::log(2.0 * std::exp(1.0) * k_ret));
            if (static_cast<double>(count) > bound) count_ok = false;
        }
        add("edge_vertex_count_claim", claim_ok);
        add("saw_r_bound", rbound_ok);
        add("constant_returns_bound", count_ok);
    }

    // segment-count bounds on the shapes the second-moment argument cuts up:
    // gamma_1 followed by the reversal of gamma_2, both self-avoiding; the
    // k_r <= 1 shapes meet the nominal 2 k_r + B + 1, the k_r >= 2 shapes
    // the 4 k_r + 1 form the variance bound consumes
    {
        bool pass = true;
        const int n = 7, k = 5;
        const auto firsts = enumerate_saw_paths(n, k, 0, 1);
        for (const auto& g1 : firsts)
            for (const auto& g2 : firsts) {
                std::vector<int32_t> joined = g1;
                for (auto it = g2.rbegin() + 1; it != g2.rend(); ++it) joined.push_back(*it);
                const PathRecord rec = classify_edges(joined);
                const SawDecomposition dec = canonical_saw_decomposition(joined);
                const int r = static_cast<int>(dec.segments.size());
                if (r > 3 * rec.k_ret + 2 * rec.backtracks + 1) pass = false;
                if (rec.k_ret <= 1 && r > 2 * rec.k_ret + rec.backtracks + 1) pass = false;
                if (rec.k_ret >= 2 && r > 4 * rec.k_ret + 1) pass = false;
            }
        add("concatenation_r_bound", pass);
    }

    // pairs of self-avoiding paths bound
    {
        bool pass = true;
        const int n = 7, k = 4;
        for (const auto& [u2, v2] : std::vector<std::pair<int32_t, int32_t>>{{2, 3}, {2, 1}}) {
            const auto firsts = enumerate_saw_paths(n, k, 0, 1);
            const auto seconds = enumerate_saw_paths(n, k, u2, v2);
            std::map<std::pair<int, int>, int64_t> per_type;
            for (const auto& g1 : firsts) {
                const std::set<int32_t> v1(g1.begin(), g1.end());
                std::set<std::pair<int32_t, int32_t>> e1;
                for (size_t i = 1; i < g1.size(); ++i) {
                    auto e = std::minmax(g1[i - 1], g1[i]);
                    e1.insert({e.first, e.second});
                }
                for (const auto& g2 : seconds) {
                    int k_new = 0, k_ret = 0;
                    for (size_t i = 1; i < g2.size(); ++i) {
                        auto e = std::minmax(g2[i - 1], g2[i]);
                        if (e1.count({e.first, e.second}))
                            ;  // old w.r.t. gamma_1
                        else if (!v1.count(g2[i]))
                            ++k_new;
                        else
                            ++k_ret;
                    }
                    ++per_type[{k_new, k_ret}];
                }
            }
            const bool endpoint_outside = v2 != 0 && v2 != 1;
            // the binomial counts choices of old-sequence end positions; when
            // every edge is returning there are no old sequences and the
            // factor is an empty product (= 1), matching the companion
            // lemma's explicit 0^0 convention
            const auto choose = [](int top, int bottom) {
                if (bottom > top) return 1.0;
                double acc = 1.0;
                for (int i = 0; i < bottom; ++i)
                    acc *= static_cast<double>(top - i) / static_cast<double>(i + 1);
                return acc;
            };
            for (const auto& [type, count] : per_type) {
                const auto [k_new, k_ret] = type;
                const double bound = 2.0 * (k + 1) * choose(k, k_ret) * choose(k, k_ret + 1) *
                                     std::pow(2.0 * k, k_ret) *
                                     std::pow(static_cast<double>(n),
                                              k + k_new - 1 - (endpoint_outside ? 1 : 0));
                if (static_cast<double>(count) > bound) pass = false;
            }
        }
        add("two_saw_paths_bound", pass);
    }

    // few-tangles bound on small instances
    {
        bool pass = true;
        const int n = 6, k_len = 5;
        for (int ell = 1; ell <= 2 && pass; ++ell) {
            std::map<std::tuple<int, int, int>, int64_t> per_type;
            std::vector<int32_t> path{0};
            const int32_t target = 1;
            const std::function<void(int)> dfs = [&](int len) {
                if (len >= 1 && path.back() == target) {
                    const PathRecord rec = classify_edges(path);
                    if (rec.k_ret >= 1) {
                        const int t = tangle_count(path, ell);
                        ++per_type[{rec.k_new, rec.k_ret, t}];
                    }
                }
                if (len == k_len) return;
                const int32_t prev2 = path.size() >= 2 ? path[path.size() - 2] : -1;
                for (int32_t w = 0; w < n; ++w) {
                    if (w == path.back() || w == prev2) continue;  // non-backtracking here
                    path.push_back(w);
                    dfs(len + 1);
                    path.pop_back();
                }
            };
            dfs(0);
            for (const auto& [type, count] : per_type) {
                const auto [k_new, k_ret, t] = type;
                const double kk = k_len;
                const double bound =
                    std::pow(kk, 5.0 * k_ret + 4.0 * k_ret * kk / ell + 8.0 * k_ret * t) *
                    std::pow(static_cast<double>(n), k_new - 1.0);
                if (static_cast<double>(count) > bound) pass = false;
            }
        }
        add("few_tangles_bound", pass);
    }

    // a planted pair of triangles sharing a vertex is caught with a witness
    {
        const std::vector<std::pair<int32_t, int32_t>> edges{{0, 1}, {1, 2}, {0, 2},
                                                             {0, 3}, {3, 4}, {0, 4},
                                                             {4, 5}, {5, 6}};
        const LabelledGraph g = LabelledGraph::from_edges(7, edges);
        const TangleReport rep = is_tangle_free(g, 1);
        add("planted_tangle_witness",
            !rep.tangle_free && rep.witness_vertex >= 0 && rep.witness_edges >
                                                               rep.witness_vertices);
    }

    maybe_write_manifest(config, "oracle", config.get_str("out"),
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                             .count());
    if (const std::string out = config.get_str("out"); !out.empty()) {
        std::ofstream rep(out);
        if (!rep) throw std::runtime_error("cannot open for writing: " + out);
        for (const auto& chk : report.checks)
            rep << chk.name << ": " << (chk.pass ? "pass" : "FAIL")
                << (chk.detail.empty() ? "" : " (" + chk.detail + ")") << '\n';
        rep << "all_pass=" << (report.all_pass ? "yes" : "no") << '\n';
    }
    return report;
}

// ---------------------------------------------------------------------------
// branching report

BranchingReport run_branching(const Config& config) {
    const auto t0 = std::chrono::steady_clock::now();
    BranchingReport rep;
    rep.d = config.get_double("d", 3.0);
    rep.s = config.has("s") ? config.get_double("s", 0.0)
                            : std::sqrt(config.get_double("s2_over_d", 2.0) * rep.d);
    rep.R = static_cast<int>(config.get_int("R", 4));
    rep.samples = config.get_int("samples", 100000);
    const uint64_t seed = config.get_seed("seed", 5);

    rep.psi_plus_expected = std::pow(std::abs(rep.s), rep.R);
    rep.coupled_identity_ok = true;
    std::vector<double> psis;
    psis.reserve(static_cast<size_t>(rep.samples));
    for (int64_t i = 0; i < rep.samples; ++i) {
        const CoupledPsi cp = coupled_plus_minus(rep.d, rep.s, rep.R, sub_seed(seed, 1, i));
        if (cp.psi_plus - cp.psi_minus != 2 * cp.root_component_level_size)
            rep.coupled_identity_ok = false;
        psis.push_back(static_cast<double>(cp.psi_plus));
    }
    const MeanStderr ms = mean_stderr(psis);
    rep.psi_plus_mean = ms.mean;
    rep.psi_plus_stderr = ms.stderr_mean;

    try {
        const KappaCalibration cal =
            calibrate_kappa(rep.d, rep.s, rep.R, rep.samples, sub_seed(seed, 2, 0));
        rep.kappa = cal.kappa;
        rep.better_than_half = cal.better_than_half;
        rep.better_stderr = cal.better_stderr;
        rep.tail_plus = cal.tail_plus;
        rep.tail_minus = cal.tail_minus;
        rep.calibration_ok = true;
    } catch (const std::exception& e) {
        rep.calibration_ok = false;
        rep.calibration_error = e.what();
    }

    const std::string out = config.get_str("out");
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot open for writing: " + out);
        f << "d=" << format_double(rep.d) << '\n'
          << "s=" << format_double(rep.s) << '\n'
          << "R=" << rep.R << '\n'
          << "samples=" << rep.samples << '\n'
          << "seed=" << seed << '\n'
          << "coupled_identity_ok=" << (rep.coupled_identity_ok ? "yes" : "no") << '\n'
          << "psi_plus_mean=" << format_double(rep.psi_plus_mean) << '\n'
          << "psi_plus_stderr=" << format_double(rep.psi_plus_stderr) << '\n'
          << "psi_plus_expected=" << format_double(rep.psi_plus_expected) << '\n'
          << "calibration_ok=" << (rep.calibration_ok ? "yes" : "no") << '\n';
        if (rep.calibration_ok) {
            f << "kappa=" << format_double(rep.kappa) << '\n'
              << "better_than_half=" << format_double(rep.better_than_half) << '\n'
              << "better_stderr=" << format_double(rep.better_stderr) << '\n'
              << "better_ci99_low="
              << format_double(rep.better_than_half - 2.326 * rep.better_stderr) << '\n'
              << "better_ci99_high="
              << format_double(rep.better_than_half + 2.326 * rep.better_stderr) << '\n'
              << "tail_plus=" << format_double(rep.tail_plus) << '\n'
              << "tail_minus=" << format_double(rep.tail_minus) << '\n';
        } else {
            f << "calibration_error=" << rep.calibration_error << '\n';
        }
    }
    maybe_write_manifest(config, "branching", out,
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                             .count());
    return rep;
}

// ---------------------------------------------------------------------------
// mode dispatch

namespace {

int run_generate(const Config& config) {
    const auto t0 = std::chrono::steady_clock::now();
    SbmParams params{config.get_int("n", 0), config.get_double("a", 0.0),
                     config.get_double("b", 0.0)};
    const uint64_t seed = config.get_seed("seed", 1);
    const std::string out = config.get_str("out");
    if (out.empty()) throw std::invalid_argument("generate: missing out");
    const std::string labels_out = config.get_str("labels_out", out + ".labels");
    const LabelledGraph g = sample_sbm(params, seed);
    write_edge_list(g, out);
    write_labels(g.labels(), labels_out);
    maybe_write_manifest(config, "generate", out,
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                             .count(),
                         {{"edges", std::to_string(g.edge_count())}});
    return 0;
}

int run_cluster_mode(const Config& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string in = config.get_str("in");
    if (in.empty()) throw std::invalid_argument("cluster: missing in");
    const std::string out = config.get_str("out");
    if (out.empty()) throw std::invalid_argument("cluster: missing out");
    const LabelledGraph g = read_edge_list(in, config.get_int("n", -1));
    SbmParams params{g.n(), config.get_double("a", 0.0), config.get_double("b", 0.0)};
    const uint64_t seed = config.get_seed("seed", 1);
    const std::string variant = config.get_str("variant", "full");

    DeriveOptions opts;
    if (const auto rounds = config.get_int("rounds", 0); rounds > 0)
        opts.rounds_override = static_cast<int>(rounds);
    if (config.has("kappa")) opts.kappa_override = config.get_double("kappa", 0.0);
    if (config.has("R")) opts.r_override = static_cast<int>(config.get_int("R", 2));
    if (config.has("min_n")) opts.min_n = config.get_int("min_n", 1000);
    AlgoParams algo = derive_params(params, opts);
    const std::string normalize = config.get_str("normalize", "auto");
    algo.normalize = normalize == "on"    ? Normalize::On
                     : normalize == "off" ? Normalize::Off
                                          : Normalize::Auto;

    const ClusterResult result = variant == "simple" ? cluster_simple(g, params, algo, seed)
                                                     : cluster(g, params, algo, seed);
    write_labels(result.tau, out);

    const std::string diag_path = config.get_str("diagnostics", out + ".diag");
    std::ofstream diag(diag_path);
    if (!diag) throw std::runtime_error("cannot open for writing: " + diag_path);
    const ClusterDiagnostics& dg = result.diagnostics;
    // timings go to the manifest's info section so the diag file replays
    // bit-identically
    double round_mean = 0.0, round_max = 0.0;
    for (float t : dg.round_seconds) {
        round_mean += t;
        round_max = std::max(round_max, static_cast<double>(t));
    }
    if (!dg.round_seconds.empty()) round_mean /= static_cast<double>(dg.round_seconds.size());
    diag << "anchor_vertex=" << dg.anchor_vertex << '\n'
         << "anchor_size=" << dg.anchor_size << '\n'
         << "jv_zero_count=" << dg.jv_zero_count << '\n'
         << "tie_count=" << dg.tie_count << '\n'
         << "rounds_executed=" << dg.rounds_executed << '\n'
         << "rounds_with_batches=" << dg.rounds_with_batches << '\n'
         << "scale_headroom_low=" << (dg.scale_headroom_low ? "yes" : "no") << '\n'
         << "empty_statistic=" << (dg.empty_statistic ? "yes" : "no") << '\n'
         << "k=" << algo.k << '\n'
         << "R=" << (variant == "simple" ? 0 : algo.R) << '\n'
         << "delta=" << format_double(algo.delta) << '\n'
         << "kappa=" << format_double(algo.kappa) << '\n'
         << "rounds=" << algo.rounds << '\n';
    if (const std::string truth_path = config.get_str("truth"); !truth_path.empty()) {
        const auto truth = read_labels(truth_path);
        diag << "overlap=" << format_double(overlap(truth, result.tau)) << '\n';
    }
    maybe_write_manifest(config, "cluster", out,
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                             .count(),
                         {{"round_seconds_mean", format_double(round_mean)},
                          {"round_seconds_max", format_double(round_max)},
                          {"engine_seconds", format_double(dg.engine_seconds)}});
    return 0;
}

int run_baseline_mode(const Config& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string in = config.get_str("in");
    if (in.empty()) throw std::invalid_argument("baseline: missing in");
    const std::string out = config.get_str("out");
    if (out.empty()) throw std::invalid_argument("baseline: missing out");
    const LabelledGraph g = read_edge_list(in, config.get_int("n", -1));
    const double d = config.get_double("d", 0.0);
    bool converged = false;
    const auto labels = spectral_baseline(g, d, 200, 1e-8, &converged);
    write_labels(labels, out);
    std::vector<std::pair<std::string, std::string>> info{
        {"converged", converged ? "yes" : "no"}};
    if (const std::string truth_path = config.get_str("truth"); !truth_path.empty()) {
        const auto truth = read_labels(truth_path);
        info.emplace_back("overlap", format_double(overlap(truth, labels)));
    }
    maybe_write_manifest(config, "baseline", out,
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                             .count(),
                         info);
    return 0;
}

}  // namespace

int run_mode(const std::string& mode, const Config& config) {
    if (mode == "generate") return run_generate(config);
    if (mode == "cluster") return run_cluster_mode(config);
    if (mode == "baseline") return run_baseline_mode(config);
    if (mode == "sweep") {
        run_phase_sweep(config);
        return 0;
    }
    if (mode == "moments") return run_moment_suite(config).all_pass ? 0 : 1;
    if (mode == "branching") {
        const BranchingReport rep = run_branching(config);
        return rep.coupled_identity_ok && rep.calibration_ok ? 0 : 1;
    }
    if (mode == "oracle") return run_oracle_suite(config).all_pass ? 0 : 1;
    throw std::invalid_argument("unknown mode: " + mode);
}

int replay_manifest(const std::string& manifest_path) {
    auto [mode, config] = read_manifest(manifest_path);
    config.set("_no_manifest", "1");
    return run_mode(mode, config);
}

}  // namespace nbc
