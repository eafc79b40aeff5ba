#pragma once

// Invariant checks shared by the unit tests and the acceptance run. Each
// returns a normalised worst-case residual.

#include "fftunnel/fastforward.hpp"
#include "fftunnel/scenario.hpp"
#include "fftunnel/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace props {

using namespace fftunnel;

/// Sample points (x, t) away from the barrier for analytic checks.
inline std::vector<std::pair<double, double>> sample_points() {
    std::vector<std::pair<double, double>> out;
    for (double x : {-6.0, -3.1, -1.7, -0.4, 0.3, 1.2, 2.9, 5.5})
        for (double t : {0.2, 0.7, 1.5, 3.0})
            out.emplace_back(x, t);
    return out;
}

/// |d_t rho + d_x j| / max|d_t rho| for an analytic solution: d_t rho from
/// the exact time derivative, d_x j by fourth-order differences of the
/// analytic current.
inline double continuity_residual(const standard::Solution& s) {
    const double h = 1e-3;
    double worst = 0.0, scale = 1e-12;
    for (auto [x, t] : sample_points()) {
        auto jt = s.jet(x, t);
        double rho_t = 2.0 * std::real(std::conj(jt.value) * jt.d_t);
        double jx = (-s.current(x + 2 * h, t) + 8.0 * s.current(x + h, t) - 8.0 * s.current(x - h, t)
                     + s.current(x - 2 * h, t))
                    / (12.0 * h);
        worst = std::max(worst, std::abs(rho_t + jx));
        scale = std::max(scale, std::abs(rho_t));
    }
    return worst / scale;
}

/// Barrier matching at x = 0: current continuity |j(0-) - j(0+)| and the
/// derivative jump psi_x(0+) - psi_x(0-) = 2 V0 psi(0), both relative.
struct BarrierMatch {
    double current = 0.0;
    double jump = 0.0;
};

inline BarrierMatch barrier_match(const standard::Solution& s) {
    const double eps = 1e-12;
    BarrierMatch m;
    double jscale = 1e-12, dscale = 1e-12;
    for (double t : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        auto l = s.jet(-eps, t);
        auto r = s.jet(0.0, t);
        double jl = std::imag(std::conj(l.value) * l.d_x);
        double jr = std::imag(std::conj(r.value) * r.d_x);
        m.current = std::max(m.current, std::abs(jl - jr));
        jscale = std::max(jscale, std::abs(jr));
        Complex want = 2.0 * s.barrier_strength() * r.value;
        m.jump = std::max(m.jump, std::abs(r.d_x - l.d_x - want));
        dscale = std::max(dscale, std::abs(want));
    }
    m.current /= jscale;
    m.jump /= dscale;
    return m;
}

/// Gauge consistency E = -d_t A - d_x V: the E returned by driving_fields
/// against centred differences of A (in t) and V (in x), over nodes where
/// the density exceeds rho_cut * max density. Normalised by max |E| there.
inline double gauge_residual(const ScenarioConfig& cfg, double rho_cut = 1e-2) {
    const auto sol = cfg.solution();
    const auto sc = cfg.time_scaling();
    Grid1D g;
    g.x_min = -10.0;
    g.x_max = 10.0;
    g.n = 8001;
    g.dt = 1e-4;
    const fastforward::PhaseOptions po{1e-6, 1.0, 4};
    double worst = 0.0, scale = 1e-12;
    for (double frac : {0.2, 0.45, 0.7}) {
        const double t = frac * sc.T_FF();
        const double h = 1e-6 * sc.T_FF();
        auto mid = fastforward::driving_fields(*sol, sc, g, t, po, true, h);
        auto lo = fastforward::driving_fields(*sol, sc, g, t - h, po);
        auto hi = fastforward::driving_fields(*sol, sc, g, t + h, po);
        auto Vx = derivative(mid.V, g.dx(), Stencil{4});
        const auto psi = sol->sample(g, sc.lambda(t));
        double rmax = 0.0;
        for (auto& p : psi.psi)
            rmax = std::max(rmax, std::norm(p));
        for (std::size_t i = 4; i + 4 < g.n; ++i) {
            if (std::norm(psi.psi[i]) < rho_cut * rmax || std::abs(g.x(i)) < 0.05)
                continue;
            double e = -(hi.A[i] - lo.A[i]) / (2.0 * h) - Vx[i];
            worst = std::max(worst, std::abs(e - mid.E[i]));
            scale = std::max(scale, std::abs(mid.E[i]));
        }
    }
    return worst / scale;
}

/// Fields from psi and from c psi for several complex constants c; returns
/// the largest relative change of A or V.
inline double amplitude_dependence(const ScenarioConfig& cfg) {
    const auto sol = cfg.solution();
    Grid1D g;
    g.x_min = -10.0;
    g.x_max = 10.0;
    g.n = 2001;
    g.dt = 1e-4;
    const double lam = 0.8, d = 1e-4;
    const fastforward::PhaseOptions po{1e-6, 1.0, 4};
    auto fields = [&](Complex c) {
        auto m = sol->sample(g, lam - d), z = sol->sample(g, lam), p = sol->sample(g, lam + d);
        for (auto* f : {&m, &z, &p})
            for (auto& v : f->psi)
                v *= c;
        auto ph = fastforward::phase_extract(m, z, p, d, po);
        return std::pair{fastforward::vector_potential(ph, 3.0), fastforward::scalar_potential(ph, 3.0)};
    };
    auto [A0, V0] = fields(1.0);
    double amax = 1e-12, vmax = 1e-12;
    for (std::size_t i = 0; i < g.n; ++i) {
        amax = std::max(amax, std::abs(A0[i]));
        vmax = std::max(vmax, std::abs(V0[i]));
    }
    double worst = 0.0;
    for (Complex c : {Complex(1e-3, 0.0), Complex(7.5, 0.0), std::polar(2.0, 0.3), std::polar(0.04, -2.0)}) {
        auto [A, V] = fields(c);
        for (std::size_t i = 0; i < g.n; ++i) {
            worst = std::max(worst, std::abs(A[i] - A0[i]) / amax);
            worst = std::max(worst, std::abs(V[i] - V0[i]) / vmax);
        }
    }
    return worst;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

/// Runs the command-line tool twice on the same small configuration and
/// compares every output file byte for byte. Returns the number of
/// differing or missing files (-1 when a run fails).
inline int cli_differences(const std::string& cli, const std::filesystem::path& work) {
    namespace fs = std::filesystem;
    fs::remove_all(work);
    fs::create_directories(work);
    {
        std::ofstream c(work / "small.cfg");
        c << "name = small\nscenario = shutter\nphysics.k = 2\nphysics.V0 = 1\n"
             "scaling.profile = cosine\nscaling.alpha_bar = 5\nscaling.T = 2.5\n"
             "numerics.n = 4097\nnumerics.dt = 3.8e-4\nnumerics.mask_fraction = 1\nnumerics.trace_samples = 200\n"
             "outputs.map_times = 6\noutputs.map_x_points = 41\n";
    }
    for (const char* d : {"a", "b"}) {
        std::string cmd = "\"" + cli + "\" run \"" + (work / "small.cfg").string() + "\" --out \""
                          + (work / d).string() + "\" > \"" + (work / d).string() + ".log\" 2>&1";
        if (std::system(cmd.c_str()) != 0)
            return -1;
    }
    int diff = 0, files = 0;
    for (const auto& e : fs::directory_iterator(work / "a")) {
        ++files;
        auto other = work / "b" / e.path().filename();
        if (!fs::exists(other) || slurp(e.path()) != slurp(other))
            ++diff;
    }
    for (const auto& e : fs::directory_iterator(work / "b"))
        if (!fs::exists(work / "a" / e.path().filename()))
            ++diff;
    return files == 0 ? -1 : diff;
}

} // namespace props
