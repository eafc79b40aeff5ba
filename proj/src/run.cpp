#include "fftunnel/run.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace fftunnel {

namespace fs = std::filesystem;
using fastforward::TimeScaling;

std::string format_number(double v) {
    if (!std::isfinite(v))
        return "nan";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, r.ptr);
}

fs::path output_directory(const fs::path& fallback) {
    if (const char* env = std::getenv("FFTUNNEL_OUTPUT_DIR"); env && *env)
        return fs::path(env);
    return fallback;
}

namespace {

constexpr const char* kUnits = "natural units (hbar = m = 1, q = c = 1)";

class Csv {
public:
    Csv(const fs::path& dir, std::string name, std::string about, const std::string& columns)
        : path_(dir / name), name_(std::move(name)), about_(std::move(about)), out_(path_) {
        if (!out_)
            throw std::runtime_error("cannot write " + path_.string());
        out_ << "# " << about_ << "; " << kUnits << "\n" << columns << "\n";
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first)
                out_ << ',';
            out_ << format_number(v);
            first = false;
        }
        out_ << '\n';
    }

    ManifestEntry close() {
        out_.close();
        if (!out_)
            throw std::runtime_error("failed writing " + path_.string());
        return ManifestEntry{name_, about_, fs::file_size(path_)};
    }

private:
    fs::path path_;
    std::string name_, about_;
    std::ofstream out_;
};

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

Grid1D map_grid(const ScenarioConfig& cfg) {
    Grid1D g;
    g.x_min = cfg.outputs.map_x_min;
    g.x_max = cfg.outputs.map_x_max;
    g.n = cfg.outputs.map_x_points;
    g.dt = 1.0;
    g.n_steps = 0;
    return g;
}

void write_trace(RunReport& rep, const fs::path& dir, const std::string& name, const std::string& about,
                 const CurrentTrace& tr) {
    Csv f(dir, name, about + " at x = " + format_number(tr.probe_x), "t,j");
    for (std::size_t i = 0; i < tr.size(); ++i)
        f.row({tr.times[i], tr.j[i]});
    rep.manifest.push_back(f.close());
}

void run_analytic(const ScenarioConfig& cfg, const fs::path& dir, RunReport& rep) {
    const auto sol = cfg.solution();
    const TimeScaling sc = cfg.time_scaling();
    const Grid1D g = cfg.grid();
    const Grid1D mg = map_grid(cfg);
    const auto& out = cfg.outputs;
    rep.probe_x = g.x(solver::probe_node(cfg.barrier(), g));

    if (out.density_map) {
        Csv s(dir, "density_standard.csv", "standard density |psi_0(x, t)|^2 on [0, T]", "t,x,density");
        for (double t : linspace(0.0, sc.T(), out.map_times))
            for (std::size_t i = 0; i < mg.n; ++i)
                s.row({t, mg.x(i), std::norm(sol->psi(mg.x(i), t))});
        rep.manifest.push_back(s.close());
        Csv f(dir, "density_ff.csv", "fast-forward density |psi_0(x, Lambda(t))|^2 on [0, T_FF]", "t,x,density");
        for (double t : linspace(0.0, sc.T_FF(), out.map_times)) {
            double lam = sc.lambda(t);
            for (std::size_t i = 0; i < mg.n; ++i)
                f.row({t, mg.x(i), std::norm(sol->psi(mg.x(i), lam))});
        }
        rep.manifest.push_back(f.close());
    }

    if (out.current_trace) {
        const auto times = standard::uniform_times(sc.T(), cfg.numerics.trace_samples);
        CurrentTrace j = standard::current_trace(*sol, rep.probe_x, times);
        CurrentTrace jff = fastforward::ff_current(j, sc);
        rep.gamma = standard::tunneling_rate(j, sc.T());
        rep.gamma_ff = standard::tunneling_rate(jff, sc.T_FF());
        write_trace(rep, dir, "current_standard.csv", "standard current j(t)", j);
        write_trace(rep, dir, "current_ff.csv", "fast-forward current alpha(t) j(Lambda(t))", jff);
        if (cfg.scenario == ScenarioKind::Shutter && cfg.physics.V0 > 0.0) {
            CurrentTrace a;
            a.probe_x = 0.0;
            for (double t : times) {
                if (t <= 0.0)
                    continue;
                a.times.push_back(t);
                a.j.push_back(standard::asymptotic_current(cfg.physics.k, cfg.physics.V0, t));
            }
            write_trace(rep, dir, "current_asymptotic.csv", "high-barrier asymptotic standard current", a);
        }
    }

    if (out.fields_map) {
        const fastforward::PhaseOptions po{1e-6, cfg.numerics.mask_fraction, cfg.numerics.order};
        const double h = 1e-6 * sc.T_FF();
        Csv f(dir, "fields_ff.csv", "driving fields A_FF, V_FF, E_FF on [0, T_FF]", "t,x,A,V,E");
        for (double t : linspace(0.0, sc.T_FF(), out.map_times)) {
            auto d = fastforward::driving_fields(*sol, sc, mg, t, po, true, h);
            for (std::size_t i = 0; i < mg.n; ++i) {
                rep.peak_E = std::max(rep.peak_E, std::abs(d.E[i]));
                f.row({t, mg.x(i), d.A[i], d.V[i], d.E[i]});
            }
        }
        rep.manifest.push_back(f.close());
    }
}

void run_soliton_pipeline(const ScenarioConfig& cfg, const fs::path& dir, RunReport& rep) {
    const TimeScaling sc = cfg.time_scaling();
    const Grid1D g = cfg.grid();
    const auto& out = cfg.outputs;
    std::vector<double> times;
    for (double t : linspace(0.0, sc.T_FF(), std::max<std::size_t>(out.map_times, 2)))
        if (t > 0.0)
            times.push_back(t);
    const std::size_t stride =
        std::max<std::size_t>(1, g.n_steps / std::max<std::size_t>(1, cfg.numerics.trace_samples));
    SolitonRun r = run_soliton(cfg, times, stride, out.fields_map);
    rep.probe_x = r.probe_x;
    rep.norm_drift = r.norm_drift;

    // Map columns: grid nodes inside the map window, thinned to about map_x_points.
    std::vector<std::size_t> nodes;
    {
        std::vector<std::size_t> inside;
        for (std::size_t i = 0; i < g.n; ++i)
            if (g.x(i) >= out.map_x_min && g.x(i) <= out.map_x_max)
                inside.push_back(i);
        std::size_t step = std::max<std::size_t>(1, inside.size() / std::max<std::size_t>(1, out.map_x_points));
        for (std::size_t k = 0; k < inside.size(); k += step)
            nodes.push_back(inside[k]);
    }

    if (out.density_map) {
        WaveField init = g.empty_field(0.0);
        const auto sp = cfg.soliton();
        for (std::size_t i = 0; i < g.n; ++i)
            init.psi[i] = sp.initial(g.x(i));
        Csv s(dir, "density_standard.csv", "standard NLSE density |psi_0(x, t)|^2 on [0, T]", "t,x,density");
        Csv f(dir, "density_ff.csv", "fast-forward NLSE density |psi_FF(x, t)|^2 on [0, T_FF]", "t,x,density");
        for (std::size_t i : nodes) {
            s.row({0.0, g.x(i), std::norm(init.psi[i])});
            f.row({0.0, g.x(i), std::norm(init.psi[i])});
        }
        for (std::size_t k = 0; k < times.size(); ++k)
            for (std::size_t i : nodes) {
                s.row({sc.lambda(times[k]), g.x(i), std::norm(r.standard[k].psi[i])});
                f.row({times[k], g.x(i), std::norm(r.ff[k].psi[i])});
            }
        rep.manifest.push_back(s.close());
        rep.manifest.push_back(f.close());
    }

    if (out.current_trace) {
        r.j_standard.validate();
        r.j_ff.validate();
        rep.gamma = standard::tunneling_rate(r.j_standard, sc.T());
        rep.gamma_ff = standard::tunneling_rate(r.j_ff, sc.T_FF());
        write_trace(rep, dir, "current_standard.csv", "standard NLSE current j(t)", r.j_standard);
        write_trace(rep, dir, "current_ff.csv", "fast-forward NLSE current Im(psi* psi_x) - A |psi|^2", r.j_ff);
    }

    if (out.fields_map) {
        Csv f(dir, "fields_ff.csv", "driving fields A_FF, V_FF, E_FF from the standard NLSE state", "t,x,A,V,E");
        for (const auto& d : r.fields)
            for (std::size_t i : nodes) {
                rep.peak_E = std::max(rep.peak_E, std::abs(d.E[i]));
                f.row({d.t, g.x(i), d.A[i], d.V[i], d.E[i]});
            }
        rep.manifest.push_back(f.close());
    }
}

} // namespace

RunReport run(const ScenarioConfig& cfg, const fs::path& dir) {
    cfg.validate();
    fs::create_directories(dir);
    RunReport rep;
    rep.config = cfg;
    const TimeScaling sc = cfg.time_scaling();
    rep.alpha_bar = sc.alpha_bar();
    rep.T = sc.T();
    rep.T_FF = sc.T_FF();

    if (cfg.scenario == ScenarioKind::Soliton)
        run_soliton_pipeline(cfg, dir, rep);
    else
        run_analytic(cfg, dir, rep);

    if (cfg.outputs.verification_report) {
        rep.verification = verify_fastforward(cfg);
        rep.norm_drift = std::max(rep.norm_drift, rep.verification->norm_drift);
        const fs::path p = dir / "verification.json";
        std::ofstream f(p);
        f << rep.verification->to_json() << "\n";
        f.close();
        rep.manifest.push_back(ManifestEntry{"verification.json", "end-to-end field verification", fs::file_size(p)});
    }

    std::ofstream f(dir / "config.txt");
    f << to_text(cfg);
    f.close();
    rep.manifest.push_back(ManifestEntry{"config.txt", "effective configuration", fs::file_size(dir / "config.txt")});

    std::ofstream r(dir / "report.json");
    r << rep.to_json() << "\n";
    return rep;
}

std::string RunReport::to_json() const {
    using nlohmann::json;
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["name"] = config.name;
    j["scenario"] = to_string(config.scenario);
    j["profile"] = fastforward::to_string(config.scaling.profile);
    j["alpha_bar"] = alpha_bar;
    j["T"] = T;
    j["T_FF"] = T_FF;
    j["probe_x"] = probe_x;
    j["gamma"] = num(gamma);
    j["gamma_ff"] = num(gamma_ff);
    j["peak_abs_E"] = num(peak_E);
    j["norm_drift"] = num(norm_drift);
    if (verification) {
        j["verification"] = {{"passed", verification->passed},
                             {"max_l2", verification->max_l2},
                             {"failures", verification->failures}};
    }
    json m = json::array();
    for (const auto& e : manifest)
        m.push_back({{"file", e.file}, {"contents", e.contents}, {"bytes", e.bytes}});
    j["manifest"] = m;
    return j.dump(2);
}

} // namespace fftunnel
