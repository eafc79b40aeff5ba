#pragma once

// Batch pipeline behind the command line: runs a scenario and writes its
// density maps, current traces and field maps as CSV files.

#include "fftunnel/scenario.hpp"
#include "fftunnel/verify.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fftunnel {

struct ManifestEntry {
    std::string file;     // relative to the output directory
    std::string contents; // one-line description
    std::uintmax_t bytes = 0;
};

struct RunReport {
    ScenarioConfig config;
    double alpha_bar = 1.0;
    double T = 0.0;
    double T_FF = 0.0;
    double probe_x = 0.0;
    double gamma = 0.0;    // time-averaged standard current over [0, T]
    double gamma_ff = 0.0; // time-averaged fast-forward current over [0, T_FF]
    double peak_E = 0.0;   // max |E_FF| over the field map
    double norm_drift = 0.0;
    std::optional<VerificationReport> verification;
    std::vector<ManifestEntry> manifest;

    /// Deterministic: no timings or absolute paths.
    std::string to_json() const;
};

/// Output directory: FFTUNNEL_OUTPUT_DIR when set, else `fallback`.
std::filesystem::path output_directory(const std::filesystem::path& fallback);

/// Runs the pipeline selected by cfg.outputs and writes everything below
/// `dir` (created if missing), including report.json. Throws ConfigError
/// for invalid configurations and SolverAbort for numerical breakdowns.
RunReport run(const ScenarioConfig& cfg, const std::filesystem::path& dir);

/// Formats doubles the same way in every output file.
std::string format_number(double v);

} // namespace fftunnel
