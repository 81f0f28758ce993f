#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nbc/cluster.hpp"
#include "nbc/sbm.hpp"

// Experiment plumbing: flat key=value configs with CLI override precedence,
// run manifests for bit-identical replay, the statistical suites that turn
// the model's moment formulas and the detection transition into desk-scale
// checks, and a naive spectral baseline for comparison runs.

namespace nbc {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kThreadsEnvVar = "NBC_THREADS";

class Config {
public:
    Config() = default;
    static Config from_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_str(const std::string& key, const std::string& fallback = "") const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    uint64_t get_seed(const std::string& key, uint64_t fallback) const;

    // file values lose to explicitly set (CLI) values
    void merge_defaults(const Config& file_config);

    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

// manifest = mode + effective config + info.* lines (ignored on replay)
void write_manifest(const std::string& path, const std::string& mode, const Config& config,
                    const std::vector<std::pair<std::string, std::string>>& info = {});
std::pair<std::string, Config> read_manifest(const std::string& path);

// dispatches one run of any CLI mode from its config; returns process exit
// code (0 ok, 1 check failure, 2 usage error)
int run_mode(const std::string& mode, const Config& config);
int replay_manifest(const std::string& manifest_path);

// ---------------------------------------------------------------------------

struct SweepPoint {
    double s2_over_d = 0.0;
    int64_t n = 0;
    double d = 0.0;       // may exceed the configured d where feasibility needs it
    int replicas = 0;
    double mean_overlap = 0.0;
    double stderr_mean = 0.0;
    double mean_runtime_s = 0.0;
};

struct SweepReport {
    std::vector<SweepPoint> points;
    double kendall_tau = 0.0;  // trend of mean overlap against s^2/d
};

// keys: n, d, grid (comma-separated s^2/d values), replicas, seed, variant
// (simple|full), rounds (0 = ceil(ln n)), out, gnuplot_data
SweepReport run_phase_sweep(const Config& config);

struct MomentCheck {
    std::string name;
    double estimate = 0.0;
    double prediction = 0.0;
    double standard_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct MomentReport {
    std::vector<MomentCheck> checks;
    bool all_pass = true;
};

// keys: moment_n, moment_k, samples, seed, d, s, out
MomentReport run_moment_suite(const Config& config);

struct OracleCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct OracleReport {
    std::vector<OracleCheck> checks;
    bool all_pass = true;
};

// keys: oracle_seeds, oracle_kmax, seed
OracleReport run_oracle_suite(const Config& config);

struct BranchingReport {
    double d = 0.0, s = 0.0;
    int R = 0;
    int64_t samples = 0;
    bool coupled_identity_ok = false;
    double psi_plus_mean = 0.0;
    double psi_plus_stderr = 0.0;
    double psi_plus_expected = 0.0;  // s^R
    double kappa = 0.0;
    double better_than_half = 0.0;
    double better_stderr = 0.0;
    double tail_plus = 0.0, tail_minus = 0.0;
    bool calibration_ok = false;
    std::string calibration_error;
};

// keys: d, s or s2_over_d, R, samples, seed, out
BranchingReport run_branching(const Config& config);

// power iteration on A - (d/n) * ones with the all-ones direction deflated;
// signs of the iterate are the labelling
std::vector<int8_t> spectral_baseline(const LabelledGraph& g, double d, int max_iters = 200,
                                      double residual_tol = 1e-8, bool* converged = nullptr);

// mean/stderr over replicas with substreamed seeds, parallelized per
// NBC_THREADS (aggregation is keyed by replica id, so order-independent)
uint64_t sub_seed(uint64_t seed, uint64_t a, uint64_t b);

}  // namespace nbc
