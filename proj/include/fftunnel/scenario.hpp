#pragma once

// Run configuration: which experiment, its physical and numerical
// parameters, and what to write. Stored as flat "section.key = value" text.

#include "fftunnel/fastforward.hpp"
#include "fftunnel/solver.hpp"
#include "fftunnel/standard.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace fftunnel {

enum class ScenarioKind { WavePacket, Shutter, Soliton };

ScenarioKind parse_scenario_kind(const std::string& s);
std::string to_string(ScenarioKind k);

struct PhysicsConfig {
    double x0 = 2.0;
    double k = 2.0;
    double beta = 1.0;
    double v = 2.25;
    double V0 = 1.0;
    double c0 = 1.0;
    double A = 1.0; // soliton amplitude
};

struct ScalingConfig {
    fastforward::Profile profile = fastforward::Profile::Cosine;
    double alpha_bar = 5.0;
    double T = 2.5;
};

struct NumericsConfig {
    double x_min = -40.0;
    double x_max = 40.0;
    std::size_t n = 8193;
    double dt = 1e-4;
    solver::BarrierKind barrier = solver::BarrierKind::Point;
    double barrier_width = 0.02;
    int order = 4;
    std::string probe_epsilon_rule = "barrier+2dx";
    std::string boundary = "reflecting"; // reflecting | driven
    std::size_t checkpoints = 5;
    double eval_lo = -20.0; // L2 evaluation window
    double eval_hi = 20.0;
    double boundary_density_abort = 1e-8;
    double norm_abort = 1e-6;
    double mask_fraction = 0.2;
    std::size_t trace_samples = 4000;
};

struct OutputConfig {
    bool density_map = true;
    bool current_trace = true;
    bool fields_map = true;
    bool verification_report = false;
    std::size_t map_times = 51;
    double map_x_min = -20.0;
    double map_x_max = 20.0;
    std::size_t map_x_points = 401;
};

struct ScenarioConfig {
    std::string name = "custom";
    ScenarioKind scenario = ScenarioKind::WavePacket;
    PhysicsConfig physics;
    ScalingConfig scaling;
    NumericsConfig numerics;
    OutputConfig outputs;

    /// Throws ConfigError naming the offending key.
    void validate() const;

    fastforward::TimeScaling time_scaling() const;
    Grid1D grid() const; // n_steps covers [0, T_FF]
    solver::BarrierSpec barrier() const;
    /// Analytic standard solution; throws UnsupportedError for solitons.
    std::unique_ptr<standard::Solution> solution() const;
    solver::SolitonParams soliton() const;
};

/// Parses "key = value" lines ('#' starts a comment). Unknown keys and
/// malformed values raise ConfigError with the key path.
ScenarioConfig parse_config(const std::string& text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::string& path);
/// Applies a single "key=value" override.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);
std::string to_text(const ScenarioConfig& cfg);

/// Named parameter sets of the reference figures (fig1 .. fig9 and variants).
std::vector<ScenarioConfig> presets();
/// Throws ConfigError for unknown names.
ScenarioConfig preset(const std::string& name);

} // namespace fftunnel
