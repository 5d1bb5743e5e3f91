#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace kakeyakit::cli {

/// Malformed configuration or flags; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    int dim = 2;
    /// Dyadic scales; empty selects the per-subcommand default.
    std::vector<double> deltas;
    /// Direction count; 0 selects the per-subcommand default.
    int density = 0;
    std::uint64_t seed = 20140601;
    std::string out_dir = "out";
    std::vector<int> levels{0, 1, 2, 4};
    std::vector<int> lattice_n{8, 16, 32, 64, 128};
    std::vector<int> zoom_k{10, 100, 1000};
    std::string generator = "ball";
    std::vector<double> epsilons{0.25, 0.5, 1.0, 3.0};
    double base_bound = 10.0;
    std::size_t trials = 100;
    std::size_t samples = 5;
    /// Optional centre-field file for figure1; empty uses the built-in fan.
    std::string field_path;
};

/// Keys accepted in config files and as flags (`--key`, with `_` spelled `-`).
const std::vector<std::string>& config_keys();

/// Throws UsageError on an unknown key or unparsable value.
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key = value` lines; `#` starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);

struct Failure {
    std::string check;
    std::string detail;
};

struct RunResult {
    /// File name to contents, written in name order by the single writer.
    std::map<std::string, std::string> artifacts;
    std::vector<Failure> failures;
    std::vector<std::string> log;
};

RunResult run_figure1(const ExperimentConfig& cfg);
RunResult run_lbd(const ExperimentConfig& cfg);
RunResult run_dimension(const ExperimentConfig& cfg);
RunResult run_dense(const ExperimentConfig& cfg);
RunResult run_diffset(const ExperimentConfig& cfg);
RunResult run_tangent(const ExperimentConfig& cfg);
/// Every subcommand above with its defaults plus the randomized invariant suite.
RunResult run_selftest(const ExperimentConfig& cfg);

/// JSON failure report.
std::string failure_report(const std::string& subcommand, const ExperimentConfig& cfg, const RunResult& result);

/// Writes artifacts (and the failure report when needed) under cfg.out_dir.
void write_artifacts(const std::string& subcommand, const ExperimentConfig& cfg, const RunResult& result);

/// Command-line entry point. 0 success, 1 assertion failure, 2 usage error.
int run(int argc, char** argv);

}  // namespace kakeyakit::cli
