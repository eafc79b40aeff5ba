#include "properties.hpp"

#include "fftunnel/standard.hpp"

#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>

using namespace fftunnel;
using namespace fftunnel::standard;

namespace {

WavePacketParams packet() { return WavePacketParams{2.0, 2.0, 1.0, 1.0}; }

// Norm by quadrature on pieces split at the barrier and the initial peak.
double quadrature_norm(const Solution& s, double t) {
    boost::math::quadrature::tanh_sinh<double> q;
    auto rho = [&](double x) { return std::norm(s.psi(x, t)); };
    // The cusped packet has a slow momentum tail, so the outer pieces reach far.
    const double cuts[] = {-4000.0, -200.0, -40.0, -20.0, -10.0, -2.0, 0.0, 10.0, 20.0, 40.0, 200.0, 4000.0};
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < std::size(cuts); ++i)
        sum += q.integrate(rho, cuts[i], cuts[i + 1]);
    return sum;
}

} // namespace

TEST_CASE("wave packet starts from the exponential packet") {
    WavePacket w(packet());
    for (double x : {-5.0, -2.0, -0.5, 0.7, 3.0}) {
        CAPTURE(x);
        Complex want = std::sqrt(1.0) * std::exp(-std::abs(x + 2.0)) * std::exp(kI * 2.0 * (x + 2.0));
        CHECK(std::abs(wavepacket_initial(packet(), x) - want) < 1e-15);
        CHECK(std::abs(w.psi(x, 1e-7) - want) < 2e-3);
    }
}

TEST_CASE("wave packet keeps unit norm") {
    WavePacket w(packet());
    CHECK(quadrature_norm(w, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    for (double t : {0.5, 2.0, 5.0}) {
        CAPTURE(t);
        CHECK(quadrature_norm(w, t) == doctest::Approx(1.0).epsilon(1e-7));
    }
}

TEST_CASE("wave packet satisfies continuity and the barrier conditions") {
    WavePacket w(packet());
    CHECK(props::continuity_residual(w) <= 1e-6);
    auto m = props::barrier_match(w);
    CHECK(m.current <= 1e-9);
    CHECK(m.jump <= 1e-9);
}

TEST_CASE("wave packet jet solves the free equation off the barrier") {
    WavePacket w(packet());
    const double h = 1e-3;
    for (auto [x, t] : props::sample_points()) {
        CAPTURE(x);
        CAPTURE(t);
        Jet j = w.jet(x, t);
        auto dx = [&](double d) { return w.jet(x + d, t).d_x; };
        Complex dxx = (-dx(2 * h) + 8.0 * dx(h) - 8.0 * dx(-h) + dx(-2 * h)) / (12 * h);
        CHECK(std::abs(j.d_t - 0.5 * kI * dxx) <= 1e-6 * std::max(1.0, std::abs(j.d_t)));
    }
}

TEST_CASE("wave packet energy") {
    WavePacket w(packet());
    CHECK(w.initial_energy() == doctest::Approx(0.5 * (1 + 4) + std::exp(-4.0)).epsilon(1e-15));
}

TEST_CASE("degenerate wave packet is rejected") {
    WavePacket w(WavePacketParams{2.0, 0.0, 1.0, 1.0});
    CHECK_THROWS_AS(w.psi(0.5, 1.0), DegenerateParameterError);
    CHECK_THROWS_AS(WavePacketParams({2.0, 2.0, -1.0, 1.0}).validate(), std::invalid_argument);
}

TEST_CASE("shutter satisfies continuity and the barrier conditions") {
    Shutter s(ShutterParams{2.0, 1.0});
    CHECK(props::continuity_residual(s) <= 1e-6);
    auto m = props::barrier_match(s);
    CHECK(m.current <= 1e-9);
    CHECK(m.jump <= 1e-9);
    CHECK(s.psi(-1.0, 0.0) == std::exp(-2.0 * kI));
    CHECK(s.psi(1.0, 0.0) == Complex(0.0, 0.0));
}

TEST_CASE("shutter current approaches the stationary transmission") {
    Shutter s(ShutterParams{2.0, 1.0});
    CHECK(s.steady_current() == doctest::Approx(8.0 / 5.0));
    CHECK(s.current(0.0, 200.0) == doctest::Approx(s.steady_current()).epsilon(2e-2));
}

TEST_CASE("high-barrier asymptotic current") {
    const double k = 2.0, V0 = 50.0;
    Shutter s(ShutterParams{k, V0});
    for (double t : {1.0, 2.0, 3.0, 5.0}) {
        CAPTURE(t);
        double exact = s.current(0.0, t);
        CHECK(std::abs(asymptotic_current(k, V0, t) - exact) <= 0.05 * std::abs(exact));
    }
    CHECK_THROWS_AS(asymptotic_current(k, V0, 0.0), std::domain_error);
}

TEST_CASE("tunneling rate of a constant trace") {
    CurrentTrace tr;
    tr.times = uniform_times(2.0, 10);
    tr.j.assign(tr.times.size(), 3.0);
    CHECK(tunneling_rate(tr, 2.0) == doctest::Approx(3.0));
    auto g = graded_times(4.0, 20);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(4.0));
    for (std::size_t i = 1; i < g.size(); ++i)
        CHECK(g[i] > g[i - 1]);
    CHECK(g[1] - g[0] < g.back() - g[g.size() - 2]);
}

TEST_CASE("grid current and energy of a plane wave") {
    Grid1D g;
    g.x_min = -10;
    g.x_max = 10;
    g.n = 4001;
    WaveField f = g.empty_field();
    for (std::size_t i = 0; i < g.n; ++i)
        f.psi[i] = std::exp(-0.2 * g.x(i) * g.x(i)) * std::exp(kI * 1.5 * g.x(i));
    CHECK(current(f, 0.0) == doctest::Approx(1.5).epsilon(1e-5));
    EnergyOptions eo;
    eo.expected_norm = f.norm();
    // <p^2/2> = k^2/2 + 1/(8 s^2) for exp(-x^2/(4 s^2)), 4 s^2 = 5.
    double want = 0.5 * 1.5 * 1.5 + 1.0 / (8.0 * 1.25);
    CHECK(energy_expectation(f, {}, 0.0, eo) / f.norm() == doctest::Approx(want).epsilon(1e-6));
    eo.expected_norm = 2.0;
    CHECK_THROWS_AS(energy_expectation(f, {}, 0.0, eo), std::invalid_argument);
}
