#include "fftunnel/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace fftunnel {

ScenarioKind parse_scenario_kind(const std::string& s) {
    if (s == "wavepacket")
        return ScenarioKind::WavePacket;
    if (s == "shutter")
        return ScenarioKind::Shutter;
    if (s == "soliton")
        return ScenarioKind::Soliton;
    throw std::invalid_argument("expected wavepacket|shutter|soliton");
}

std::string to_string(ScenarioKind k) {
    switch (k) {
    case ScenarioKind::WavePacket:
        return "wavepacket";
    case ScenarioKind::Shutter:
        return "shutter";
    case ScenarioKind::Soliton:
        return "soliton";
    }
    return "?";
}

namespace {

std::string fmt(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double to_double(const std::string& s) {
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
        throw std::invalid_argument("not a finite number: '" + s + "'");
    return v;
}

std::size_t to_size(const std::string& s) {
    std::size_t v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw std::invalid_argument("not a non-negative integer: '" + s + "'");
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on")
        return true;
    if (s == "false" || s == "0" || s == "no" || s == "off")
        return false;
    throw std::invalid_argument("not a boolean: '" + s + "'");
}

struct Entry {
    std::string key;
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

#define NUM(path, member) \
    Entry { path, [](ScenarioConfig& c, const std::string& v) { c.member = to_double(v); }, \
            [](const ScenarioConfig& c) { return fmt(c.member); } }
#define SIZE(path, member) \
    Entry { path, [](ScenarioConfig& c, const std::string& v) { c.member = to_size(v); }, \
            [](const ScenarioConfig& c) { return std::to_string(c.member); } }
#define FLAG(path, member) \
    Entry { path, [](ScenarioConfig& c, const std::string& v) { c.member = to_bool(v); }, \
            [](const ScenarioConfig& c) { return std::string(c.member ? "true" : "false"); } }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        Entry{"name", [](ScenarioConfig& c, const std::string& v) { c.name = v; },
              [](const ScenarioConfig& c) { return c.name; }},
        Entry{"scenario", [](ScenarioConfig& c, const std::string& v) { c.scenario = parse_scenario_kind(v); },
              [](const ScenarioConfig& c) { return to_string(c.scenario); }},
        NUM("physics.x0", physics.x0),
        NUM("physics.k", physics.k),
        NUM("physics.beta", physics.beta),
        NUM("physics.v", physics.v),
        NUM("physics.V0", physics.V0),
        NUM("physics.c0", physics.c0),
        NUM("physics.A", physics.A),
        Entry{"scaling.profile",
              [](ScenarioConfig& c, const std::string& v) { c.scaling.profile = fastforward::parse_profile(v); },
              [](const ScenarioConfig& c) { return fastforward::to_string(c.scaling.profile); }},
        NUM("scaling.alpha_bar", scaling.alpha_bar),
        NUM("scaling.T", scaling.T),
        NUM("numerics.x_min", numerics.x_min),
        NUM("numerics.x_max", numerics.x_max),
        SIZE("numerics.n", numerics.n),
        NUM("numerics.dt", numerics.dt),
        Entry{"numerics.barrier",
              [](ScenarioConfig& c, const std::string& v) { c.numerics.barrier = solver::parse_barrier_kind(v); },
              [](const ScenarioConfig& c) { return solver::to_string(c.numerics.barrier); }},
        NUM("numerics.barrier_width", numerics.barrier_width),
        Entry{"numerics.order",
              [](ScenarioConfig& c, const std::string& v) { c.numerics.order = static_cast<int>(to_size(v)); },
              [](const ScenarioConfig& c) { return std::to_string(c.numerics.order); }},
        Entry{"numerics.probe_epsilon_rule",
              [](ScenarioConfig& c, const std::string& v) { c.numerics.probe_epsilon_rule = v; },
              [](const ScenarioConfig& c) { return c.numerics.probe_epsilon_rule; }},
        Entry{"numerics.boundary", [](ScenarioConfig& c, const std::string& v) { c.numerics.boundary = v; },
              [](const ScenarioConfig& c) { return c.numerics.boundary; }},
        SIZE("numerics.checkpoints", numerics.checkpoints),
        NUM("numerics.eval_lo", numerics.eval_lo),
        NUM("numerics.eval_hi", numerics.eval_hi),
        NUM("numerics.boundary_density_abort", numerics.boundary_density_abort),
        NUM("numerics.norm_abort", numerics.norm_abort),
        NUM("numerics.mask_fraction", numerics.mask_fraction),
        SIZE("numerics.trace_samples", numerics.trace_samples),
        FLAG("outputs.density_map", outputs.density_map),
        FLAG("outputs.current_trace", outputs.current_trace),
        FLAG("outputs.fields_map", outputs.fields_map),
        FLAG("outputs.verification_report", outputs.verification_report),
        SIZE("outputs.map_times", outputs.map_times),
        NUM("outputs.map_x_min", outputs.map_x_min),
        NUM("outputs.map_x_max", outputs.map_x_max),
        SIZE("outputs.map_x_points", outputs.map_x_points),
    };
    return table;
}

#undef NUM
#undef SIZE
#undef FLAG

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void require(bool ok, const std::string& key, const std::string& msg) {
    if (!ok)
        throw ConfigError(key + ": " + msg);
}

} // namespace

void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& e : entries()) {
        if (e.key == key) {
            try {
                e.set(cfg, value);
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& ex) {
                throw ConfigError(key + ": " + ex.what());
            }
            return;
        }
    }
    throw ConfigError(key + ": unknown configuration key");
}

ScenarioConfig parse_config(const std::string& text, ScenarioConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ConfigError(path + ": cannot open configuration file");
    std::stringstream ss;
    ss << f.rdbuf();
    // A config may start from a preset: "preset = fig2" on its first line.
    std::string text = ss.str();
    ScenarioConfig base;
    std::istringstream in(text);
    std::string first;
    while (std::getline(in, first)) {
        std::string t = trim(first.substr(0, first.find('#')));
        if (t.empty())
            continue;
        auto eq = t.find('=');
        if (eq != std::string::npos && trim(t.substr(0, eq)) == "preset") {
            base = preset(trim(t.substr(eq + 1)));
            text = text.substr(text.find(first) + first.size());
        }
        break;
    }
    return parse_config(text, base);
}

std::string to_text(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& e : entries())
        out += e.key + " = " + e.get(cfg) + "\n";
    return out;
}

void ScenarioConfig::validate() const {
    const auto& p = physics;
    const auto& s = scaling;
    const auto& nm = numerics;
    require(s.alpha_bar >= 1.0, "scaling.alpha_bar", "must be >= 1");
    require(s.T > 0.0, "scaling.T", "must be positive");
    require(p.V0 >= 0.0, "physics.V0", "must be non-negative");
    switch (scenario) {
    case ScenarioKind::WavePacket:
        require(p.beta > 0.0, "physics.beta", "must be positive");
        require(p.x0 > 0.0, "physics.x0", "must be positive");
        require(std::abs(Complex(p.V0 - p.beta, p.k)) >= specfun::kDegenerateGap, "physics.V0",
                "degenerate with beta - ik");
        break;
    case ScenarioKind::Shutter:
        require(p.k > 0.0, "physics.k", "must be positive");
        break;
    case ScenarioKind::Soliton:
        require(p.A > 0.0, "physics.A", "must be positive");
        require(p.c0 >= 0.0, "physics.c0", "must be non-negative");
        break;
    }
    require(nm.x_max > nm.x_min, "numerics.x_max", "must exceed numerics.x_min");
    require(nm.n >= 512, "numerics.n", "must be at least 512");
    require(nm.dt > 0.0, "numerics.dt", "must be positive");
    require(nm.order == 2 || nm.order == 4, "numerics.order", "must be 2 or 4");
    require(nm.boundary == "reflecting" || nm.boundary == "driven", "numerics.boundary",
            "must be reflecting or driven");
    require(nm.probe_epsilon_rule == "barrier+2dx", "numerics.probe_epsilon_rule",
            "only 'barrier+2dx' is supported");
    require(nm.checkpoints >= 1, "numerics.checkpoints", "must be at least 1");
    require(nm.eval_hi > nm.eval_lo, "numerics.eval_hi", "must exceed numerics.eval_lo");
    require(nm.mask_fraction > 0.0 && nm.mask_fraction <= 1.0, "numerics.mask_fraction", "must lie in (0, 1]");
    require(nm.trace_samples >= 16, "numerics.trace_samples", "must be at least 16");
    require(nm.norm_abort > 0.0, "numerics.norm_abort", "must be positive");
    require(nm.boundary_density_abort > 0.0, "numerics.boundary_density_abort", "must be positive");
    const double dx = (nm.x_max - nm.x_min) / static_cast<double>(nm.n - 1);
    if (p.V0 > 0.0) {
        if (nm.barrier == solver::BarrierKind::Gaussian)
            require(nm.barrier_width >= 4.0 * dx * (1.0 - 1e-12), "numerics.barrier_width", "must be >= 4 dx");
        else
            require(std::abs(std::remainder(-nm.x_min, dx)) < 1e-9 * dx, "numerics.barrier",
                    "point barrier needs x = 0 on a grid node");
    }
    if (scenario != ScenarioKind::Soliton)
        require(nm.dt <= dx * dx * (1.0 + 1e-12), "numerics.dt", "violates dt <= dx^2");
    require(outputs.map_times >= 2, "outputs.map_times", "must be at least 2");
    require(outputs.map_x_points >= 2, "outputs.map_x_points", "must be at least 2");
    require(outputs.map_x_max > outputs.map_x_min, "outputs.map_x_max", "must exceed outputs.map_x_min");
}

fastforward::TimeScaling ScenarioConfig::time_scaling() const {
    return fastforward::TimeScaling(scaling.profile, scaling.alpha_bar, scaling.T);
}

Grid1D ScenarioConfig::grid() const {
    Grid1D g;
    g.x_min = numerics.x_min;
    g.x_max = numerics.x_max;
    g.n = numerics.n;
    g.dt = numerics.dt;
    double t_ff = scaling.T / scaling.alpha_bar;
    g.n_steps = static_cast<std::size_t>(std::ceil(t_ff / numerics.dt - 1e-9));
    g.dt = t_ff / static_cast<double>(g.n_steps);
    return g;
}

solver::BarrierSpec ScenarioConfig::barrier() const {
    return solver::BarrierSpec{physics.V0, numerics.barrier_width, numerics.barrier};
}

std::unique_ptr<standard::Solution> ScenarioConfig::solution() const {
    switch (scenario) {
    case ScenarioKind::WavePacket:
        return std::make_unique<standard::WavePacket>(
            standard::WavePacketParams{physics.x0, physics.k, physics.beta, physics.V0});
    case ScenarioKind::Shutter:
        return std::make_unique<standard::Shutter>(standard::ShutterParams{physics.k, physics.V0});
    case ScenarioKind::Soliton:
        break;
    }
    throw UnsupportedError("soliton scenario has no closed-form solution; use the NLSE solver");
}

solver::SolitonParams ScenarioConfig::soliton() const {
    return solver::SolitonParams{physics.A, physics.v, physics.x0, physics.c0};
}

std::vector<ScenarioConfig> presets() {
    std::vector<ScenarioConfig> out;

    ScenarioConfig wp;
    wp.scenario = ScenarioKind::WavePacket;
    wp.physics = PhysicsConfig{2.0, 2.0, 1.0, 2.25, 1.0, 0.0, 1.0};
    wp.scaling = ScalingConfig{fastforward::Profile::Cosine, 5.0, 2.5};
    wp.numerics.x_min = -40.0;
    wp.numerics.x_max = 40.0;
    wp.numerics.n = 4097;
    wp.numerics.dt = 3.8e-4;
    wp.numerics.barrier = solver::BarrierKind::Point;
    wp.numerics.boundary_density_abort = 5e-5;
    wp.numerics.eval_lo = -20.0;
    wp.numerics.eval_hi = 20.0;
    wp.numerics.mask_fraction = 1.0;

    auto fig1 = wp;
    fig1.name = "fig1";
    fig1.outputs.fields_map = false;
    out.push_back(fig1);

    auto fig2 = wp;
    fig2.name = "fig2";
    fig2.scaling.T = 5.0;
    fig2.outputs.density_map = false;
    fig2.outputs.fields_map = false;
    fig2.outputs.map_x_min = -30.0;
    fig2.outputs.map_x_max = 30.0;
    out.push_back(fig2);

    auto fig3 = wp;
    fig3.name = "fig3";
    fig3.outputs.density_map = false;
    fig3.outputs.current_trace = false;
    fig3.outputs.map_x_min = -10.0;
    fig3.outputs.map_x_max = 10.0;
    out.push_back(fig3);

    ScenarioConfig sh = wp;
    sh.scenario = ScenarioKind::Shutter;
    sh.physics.k = 2.0;
    sh.physics.V0 = 1.0;
    sh.numerics.boundary = "driven";
    sh.numerics.mask_fraction = 1.0;

    auto fig4 = sh;
    fig4.name = "fig4";
    fig4.outputs.fields_map = false;
    out.push_back(fig4);

    auto fig5 = sh;
    fig5.name = "fig5";
    fig5.scaling.T = 25.0;
    fig5.outputs.density_map = false;
    fig5.outputs.fields_map = false;
    fig5.numerics.trace_samples = 8000;
    out.push_back(fig5);

    auto fig6 = sh;
    fig6.name = "fig6";
    fig6.outputs.density_map = false;
    fig6.outputs.current_trace = false;
    fig6.outputs.map_x_min = -10.0;
    fig6.outputs.map_x_max = 10.0;
    out.push_back(fig6);

    ScenarioConfig sol;
    sol.scenario = ScenarioKind::Soliton;
    sol.physics = PhysicsConfig{6.0, 0.0, 1.0, 2.25, 30.0, 1.0, 1.0};
    sol.scaling = ScalingConfig{fastforward::Profile::Uniform, 5.0, 5.0};
    sol.numerics.x_min = -40.0;
    sol.numerics.x_max = 40.0 - 80.0 / 16384.0;
    sol.numerics.n = 16384;
    sol.numerics.dt = 2e-4;
    sol.numerics.barrier = solver::BarrierKind::Gaussian;
    sol.numerics.barrier_width = 0.02;
    sol.numerics.mask_fraction = 1.0;
    sol.numerics.eval_lo = -40.0;
    sol.numerics.eval_hi = 40.0;
    sol.outputs.fields_map = false;

    auto fig7 = sol;
    fig7.name = "fig7";
    out.push_back(fig7);

    auto fig7c = sol;
    fig7c.name = "fig7-cosine";
    fig7c.scaling.profile = fastforward::Profile::Cosine;
    out.push_back(fig7c);

    ScenarioConfig hb = sh;
    hb.name = "fig8";
    hb.physics.V0 = 50.0;
    hb.scaling = ScalingConfig{fastforward::Profile::Uniform, 2500.0, 12500.0};
    hb.outputs.density_map = false;
    hb.outputs.fields_map = false;
    hb.numerics.trace_samples = 20000;
    out.push_back(hb);

    auto fig9 = sol;
    fig9.name = "fig9";
    fig9.scaling.profile = fastforward::Profile::Cosine;
    fig9.outputs.density_map = false;
    fig9.outputs.fields_map = true;
    out.push_back(fig9);

    return out;
}

ScenarioConfig preset(const std::string& name) {
    for (auto& p : presets())
        if (p.name == name)
            return p;
    throw ConfigError("preset: unknown name '" + name + "'");
}

} // namespace fftunnel
