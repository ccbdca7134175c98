#ifndef ADAPID_HARNESS_HPP
#define ADAPID_HARNESS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adapid/identifier.hpp"
#include "adapid/iss.hpp"
#include "adapid/pe.hpp"
#include "adapid/signal.hpp"

namespace adapid {

struct PEOptions {
    std::optional<int> T;      // fixed window length
    std::vector<int> scan;     // or: lengths to try in order (default n, 2n, 4n)

    nlohmann::json to_json() const;
    static PEOptions from_json(const nlohmann::json& j);
};

/// One experiment: generate -> identify -> certify -> bound -> verify,
/// repeated over seeded trials. Trial k runs with system seed base+k; the
/// initial guess is either the configured theta0 or a seeded random draw
/// when theta0_random_radius is set.
struct ExperimentConfig {
    SystemConfig system;
    IdentifierConfig identifier;
    PEOptions pe;
    int trials = 1;
    std::filesystem::path output_dir = "adapid_out";
    bool emit_plots = false;
    double bound_tolerance = 1e-6;
    std::optional<double> theta0_random_radius;

    void validate() const;
    /// Canonical content hash (output location and plot switches excluded).
    std::string config_hash() const;

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::filesystem::path& path);
};

enum class RunStatus { Pass = 0, BoundViolation = 1, PEFailure = 2, IoFailure = 3 };

int exit_code(RunStatus s);

struct TrialResult {
    int index = 0;
    std::uint64_t seed = 0;
    PECertificate certificate;
    double final_error = 0.0;
    double max_margin = 0.0;         // max over t of err - bound
    int violations = 0;
    int unexplained_violations = 0;
    int flagged_steps = 0;
    double tail_max_error = 0.0;     // max err over the last 20% of the run
    std::optional<double> asymptotic_error_bound;

    nlohmann::json to_json() const;
};

struct RunReport {
    RunStatus status = RunStatus::Pass;
    bool aggregate_pass = false;
    std::string config_hash;
    std::string toolkit_version;
    double bound_tolerance = 1e-6;
    std::string message;
    std::vector<TrialResult> trials;

    nlohmann::json to_json() const;
};

/// Run every trial, persist per-trial CSVs plus certificates and a summary
/// under config.output_dir, and aggregate. A failed PE certification aborts
/// the run with status PEFailure before any bound is emitted.
RunReport run_experiment(const ExperimentConfig& config);

/// Write per-trial `error_vs_bound.csv` (and an SVG chart when the persisted
/// config asked for plots) from a completed run directory.
void emit_plot_data(const std::filesystem::path& run_dir);

/// Recompute the bound comparison of a completed run from its persisted
/// CSVs and cross-check against the stored report. Returns the recomputed
/// status; a human-readable account is appended to `log` when given.
RunStatus verify_run(const std::filesystem::path& run_dir, std::string* log = nullptr);

} // namespace adapid

#endif
