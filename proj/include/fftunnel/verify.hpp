#pragma once

// End-to-end check of the driving fields: build A_FF and V_FF from the
// standard dynamics, propagate the initial state under them and compare
// against psi_0(x, Lambda(t)).

#include "fftunnel/scenario.hpp"

#include <limits>
#include <string>
#include <vector>

namespace fftunnel {

struct VerifyTolerances {
    double l2 = 1e-3;          // checkpoint L2 (linear); soliton runs use l2_soliton on |psi|
    double l2_soliton = 1e-2;
    double current_ratio = 0.01;
    double energy_ratio = 0.01;
    double norm_drift = 1e-6;
};

struct CheckpointResult {
    double t = 0.0;
    double lambda = 0.0;
    double alpha = 1.0;
    double l2 = 0.0;
    double j_ff = 0.0;       // measured Im(psi* psi_x) - A |psi|^2 at the probe
    double j_standard = 0.0; // standard current at the probe and time Lambda(t)
    double current_ratio_error = 0.0; // |j_ff - alpha j| / |alpha j|
    double energy_ff = 0.0;
    double energy_standard = 0.0;
    double energy_ratio_error = 0.0; // |E_FF/E_0 - alpha| / alpha
    double energy_ff_propagated = std::numeric_limits<double>::quiet_NaN(); // from the propagated state
};

struct VerificationReport {
    std::string scenario;
    std::string profile;
    double alpha_bar = 1.0;
    double T = 0.0;
    double T_FF = 0.0;
    double probe_x = 0.0;
    std::vector<CheckpointResult> checkpoints;
    double max_l2 = 0.0;
    double max_current_ratio_error = 0.0;
    double max_energy_ratio_error = 0.0;
    double norm_drift = 0.0;
    double max_alpha = 1.0;
    double runtime_seconds = 0.0;
    bool passed = true;
    std::vector<std::string> failures;
    VerifyTolerances tolerances;

    std::string to_json() const;
};

/// Runs the verification; sub-check failures are recorded in the report,
/// not thrown. Configuration problems throw ConfigError and numerical
/// breakdowns SolverAbort.
VerificationReport verify_fastforward(const ScenarioConfig& cfg, const VerifyTolerances& tol = {});

/// Energies of the analytic fast-forward state and of the standard state
/// at one fast-forward instant.
struct EnergyPoint {
    double t = 0.0;
    double lambda = 0.0;
    double alpha = 1.0;
    double energy_ff = 0.0;       // <psi_FF|H_FF|psi_FF>
    double energy_standard = 0.0; // <psi_0|H_0|psi_0> at Lambda(t)
};

/// Energy expectations from the analytic solution and its exact derivatives
/// (quadratic form 1/2 |(d_x - iA) psi|^2 + V |psi|^2 plus the barrier term),
/// integrated by the trapezoid rule over [-half_width, half_width] with
/// spacing dx. Throws UnsupportedError for solitons.
std::vector<EnergyPoint> analytic_energy_trace(const ScenarioConfig& cfg, const std::vector<double>& times,
                                               double half_width = 200.0, double dx = 0.01);

/// Result of a soliton run pair (standard and fast-forwarded NLSE).
struct SolitonRun {
    std::vector<WaveField> standard;  // at Lambda(t_i)
    std::vector<WaveField> ff;        // at t_i
    std::vector<double> times;        // fast-forward checkpoint times
    CurrentTrace j_standard;          // at the probe, standard time
    CurrentTrace j_ff;                // at the probe, fast-forward time
    std::vector<fastforward::DrivingFields> fields; // at checkpoints, with E
    double norm_drift = 0.0;
    double probe_x = 0.0;
};

/// Co-propagates the standard NLSE and its fast-forward under fields built
/// from the standard state. `checkpoints` are fast-forward times in (0, T_FF].
/// Traces are sampled every `trace_stride` fast-forward steps.
SolitonRun run_soliton(const ScenarioConfig& cfg, const std::vector<double>& checkpoints, std::size_t trace_stride = 10,
                       bool with_fields = false);

/// Barrier-free soliton: L2 of the amplitude profile against the exact
/// travelling soliton, maximised over `samples` times in [0, t_end].
double free_soliton_error(const ScenarioConfig& cfg, double t_end, std::size_t samples = 7);

} // namespace fftunnel
