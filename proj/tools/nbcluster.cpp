#include <cstdio>
#include <deque>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nbc/harness.hpp"

// Command-line front end. Every subcommand accepts --config (flat key=value
// file, CLI flags win) and writes a manifest beside its primary output;
// `replay` re-runs any mode from such a manifest and reproduces the outputs
// bit-identically. Exit codes: 0 success, 1 check failure, 2 usage error.

namespace {

struct FlagSpec {
    std::string key;
    std::string description;
};

// every option is stored as a config key so that manifests and config files
// share one vocabulary
void add_options(CLI::App* cmd, const std::vector<FlagSpec>& specs,
                 std::deque<std::pair<std::string, std::string>>& storage) {
    for (const auto& spec : specs) {
        storage.emplace_back(spec.key, "");
        cmd->add_option("--" + spec.key, storage.back().second, spec.description);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted non-backtracking path clustering for the sparse two-community "
                 "stochastic block model"};
    app.require_subcommand(1);

    struct ModeSpec {
        const char* name;
        const char* help;
        std::vector<FlagSpec> flags;
    };
    const std::vector<ModeSpec> modes{
        {"generate",
         "sample a labelled SBM graph and write edge-list + label files",
         {{"n", "vertex count"},
          {"a", "within-class rate (edge probability a/n)"},
          {"b", "between-class rate"},
          {"seed", "RNG seed"},
          {"out", "edge-list output path"},
          {"labels_out", "label output path (default <out>.labels)"}}},
        {"cluster",
         "label an unlabelled graph from (a, b)",
         {{"in", "edge-list input"},
          {"n", "vertex count hint (keeps trailing isolated vertices)"},
          {"a", "within-class rate"},
          {"b", "between-class rate"},
          {"seed", "RNG seed"},
          {"out", "label output path"},
          {"variant", "full|simple (default full)"},
          {"rounds", "removal rounds override (default ceil(ln n))"},
          {"kappa", "dither constant override (default: branching calibration)"},
          {"R", "sphere radius override (even, >= 2)"},
          {"min_n", "minimum n accepted by parameter derivation"},
          {"normalize", "engine renormalization: auto|on|off"},
          {"diagnostics", "diagnostics output path (default <out>.diag)"},
          {"truth", "optional true label file; records overlap in diagnostics"}}},
        {"sweep",
         "phase sweep: mean overlap against s^2/d",
         {{"n", "vertex count per replica"},
          {"d", "mean degree (raised per point when s^2/d needs it)"},
          {"grid", "comma-separated s^2/d values"},
          {"replicas", "replicas per point"},
          {"seed", "RNG seed"},
          {"variant", "simple|full (default simple)"},
          {"rounds", "removal rounds override"},
          {"out", "CSV output path"},
          {"gnuplot_data", "optional whitespace-separated data file"}}},
        {"moments",
         "small-instance moment checks against the exact path expectations",
         {{"moment_n", "instance size (default 8)"},
          {"moment_k", "path length (default 2)"},
          {"samples", "Monte-Carlo samples"},
          {"d", "mean degree (default 2)"},
          {"s", "signal (default 1.8)"},
          {"seed", "RNG seed"},
          {"out", "report output path"}}},
        {"branching",
         "labelled Galton-Watson level sums and kappa calibration",
         {{"d", "offspring mean"},
          {"s", "signal (or use s2_over_d)"},
          {"s2_over_d", "signal ratio"},
          {"R", "level depth"},
          {"samples", "Monte-Carlo samples"},
          {"seed", "RNG seed"},
          {"out", "report output path"}}},
        {"oracle",
         "exhaustive engine/oracle equivalences and combinatorial bounds",
         {{"oracle_seeds", "random instances (default 200)"},
          {"oracle_kmax", "maximum path length (default 6)"},
          {"seed", "RNG seed"},
          {"out", "optional report path"}}},
        {"baseline",
         "spectral baseline: power iteration on the centered adjacency",
         {{"in", "edge-list input"},
          {"n", "vertex count hint"},
          {"d", "mean degree used for centering"},
          {"out", "label output path"},
          {"truth", "optional true label file; records overlap in the manifest"}}},
    };

    std::deque<std::pair<std::string, std::string>> storage;
    std::vector<std::pair<CLI::App*, const ModeSpec*>> subcommands;
    std::string config_path;
    for (const auto& mode : modes) {
        CLI::App* cmd = app.add_subcommand(mode.name, mode.help);
        cmd->add_option("--config", config_path, "flat key=value config file (CLI wins)");
        add_options(cmd, mode.flags, storage);
        subcommands.emplace_back(cmd, &mode);
    }
    CLI::App* replay = app.add_subcommand("replay", "re-run a mode from its manifest");
    std::string manifest_path;
    replay->add_option("--manifest", manifest_path, "manifest file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (replay->parsed()) return nbc::replay_manifest(manifest_path);
        for (const auto& [cmd, mode] : subcommands) {
            if (!cmd->parsed()) continue;
            nbc::Config config;
            for (const auto& [key, value] : storage)
                if (!value.empty()) config.set(key, value);
            if (!config_path.empty())
                config.merge_defaults(nbc::Config::from_file(config_path));
            return nbc::run_mode(mode->name, config);
        }
        std::fprintf(stderr, "no subcommand selected\n");
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
