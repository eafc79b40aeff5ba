#include "fftunnel/standard.hpp"

#include <cmath>

namespace fftunnel::standard {

using specfun::moshinsky_jet;

void WavePacketParams::validate() const {
    if (!(beta > 0.0))
        throw std::invalid_argument("wavepacket: beta must be positive");
    if (!(x0 > 0.0))
        throw std::invalid_argument("wavepacket: x0 must be positive");
    if (!(V0 >= 0.0))
        throw std::invalid_argument("wavepacket: V0 must be non-negative");
    if (!std::isfinite(k))
        throw std::invalid_argument("wavepacket: k must be finite");
}

void ShutterParams::validate() const {
    if (!(k > 0.0))
        throw std::invalid_argument("shutter: k must be positive");
    if (!(V0 >= 0.0))
        throw std::invalid_argument("shutter: V0 must be non-negative");
}

namespace {

Jet initial_packet_jet(const WavePacketParams& p, double x) {
    double y = x + p.x0;
    double s = (y < 0.0) ? -1.0 : 1.0;
    Jet j;
    j.value = std::sqrt(p.beta) * std::exp(-p.beta * std::abs(y)) * std::exp(kI * (p.k * y));
    Complex g = kI * p.k - p.beta * s;
    j.d_x = g * j.value;
    j.d_t = 0.5 * kI * g * g * j.value;
    return j;
}

Jet flip(Jet j) {
    j.d_x = -j.d_x;
    return j;
}

} // namespace

Complex wavepacket_initial(const WavePacketParams& p, double x) {
    p.validate();
    return initial_packet_jet(p, x).value;
}

WavePacket::WavePacket(WavePacketParams p) : p_(p) { p_.validate(); }

Jet WavePacket::jet(double x, double t) const {
    if (t <= 0.0)
        return initial_packet_jet(p_, x);
    const double sb = std::sqrt(p_.beta);
    const Complex lam = p_.lambda();
    // Free part: the packet and its mirror image.
    Jet out = moshinsky_jet(x + p_.x0, Complex(p_.k, -p_.beta), t)
              + flip(moshinsky_jet(-x - p_.x0, Complex(-p_.k, -p_.beta), t));
    out *= sb;
    if (p_.V0 == 0.0)
        return out;
    // Barrier part: S(x0, lam*) - S(x0, -lam) + e^{-lam x0} [S(0, -lam) + S(0, lam)]
    // with the shared M(|x| + xi; -i V0) terms collected once.
    if (std::abs(p_.V0 - lam) < specfun::kDegenerateGap)
        throw DegenerateParameterError("wavepacket: V0 coincides with beta - ik");
    const double X = std::abs(x);
    const Complex decay = std::exp(-lam * p_.x0);
    const Complex V0 = p_.V0;
    const Complex c_far = 1.0 / (V0 - std::conj(lam)) - 1.0 / (V0 + lam);
    const Complex c_near = decay * (1.0 / (V0 + lam) + 1.0 / (V0 - lam));
    const Complex kV(0.0, -p_.V0);
    Jet barrier = c_far * moshinsky_jet(X + p_.x0, kV, t) + c_near * moshinsky_jet(X, kV, t)
                  - (1.0 / (V0 - std::conj(lam))) * moshinsky_jet(X + p_.x0, -kI * std::conj(lam), t)
                  + (1.0 / (V0 + lam)) * moshinsky_jet(X + p_.x0, kI * lam, t)
                  - (decay / (V0 + lam)) * moshinsky_jet(X, kI * lam, t)
                  - (decay / (V0 - lam)) * moshinsky_jet(X, -kI * lam, t);
    if (x < 0.0)
        barrier.d_x = -barrier.d_x;
    barrier *= p_.V0 * sb;
    return out + barrier;
}

double WavePacket::initial_energy() const {
    return 0.5 * (p_.beta * p_.beta + p_.k * p_.k) + p_.V0 * p_.beta * std::exp(-2.0 * p_.beta * p_.x0);
}

Complex wavepacket_psi0(const WavePacketParams& p, double x, double t) {
    return WavePacket(p).jet(x, t).value;
}

Shutter::Shutter(ShutterParams p) : p_(p) { p_.validate(); }

Jet Shutter::jet(double x, double t) const {
    if (t <= 0.0) {
        Jet j;
        if (x < 0.0) {
            j.value = std::exp(kI * (p_.k * x));
            j.d_x = kI * p_.k * j.value;
            j.d_t = -0.5 * kI * p_.k * p_.k * j.value;
        }
        return j;
    }
    Jet out = moshinsky_jet(x, p_.k, t);
    if (p_.V0 == 0.0)
        return out;
    const double X = std::abs(x);
    Jet bracket = moshinsky_jet(X, Complex(0.0, -p_.V0), t) - moshinsky_jet(X, p_.k, t);
    if (x < 0.0)
        bracket.d_x = -bracket.d_x;
    bracket *= p_.V0 / Complex(p_.V0, -p_.k);
    return out + bracket;
}

double Shutter::steady_current() const {
    return p_.k * p_.k * p_.k / (p_.k * p_.k + p_.V0 * p_.V0);
}

Complex shutter_psi0(const ShutterParams& p, double x, double t) {
    return Shutter(p).jet(x, t).value;
}

double Solution::current(double x, double t) const {
    Jet j = jet(x, t);
    return std::imag(std::conj(j.value) * j.d_x);
}

WaveField Solution::sample(const Grid1D& g, double t) const {
    WaveField f = g.empty_field(t);
    for (std::size_t i = 0; i < g.n; ++i)
        f.psi[i] = psi(g.x(i), t);
    return f;
}

double current(const WaveField& psi, double x) {
    std::size_t i = psi.node_of(x);
    if (i == 0 || i + 1 >= psi.size())
        throw std::out_of_range("current: probe needs both neighbours on the grid");
    Complex d = (psi.psi[i + 1] - psi.psi[i - 1]) / (2.0 * psi.dx);
    return std::imag(std::conj(psi.psi[i]) * d);
}

CurrentTrace current_trace(const Solution& s, double probe_x, const std::vector<double>& times) {
    CurrentTrace tr;
    tr.probe_x = probe_x;
    tr.times = times;
    tr.j.reserve(times.size());
    for (double t : times)
        tr.j.push_back(s.current(probe_x, t));
    tr.validate();
    return tr;
}

std::vector<double> graded_times(double T, std::size_t n) {
    if (n < 1 || !(T > 0.0))
        throw std::invalid_argument("graded_times: need T > 0 and n >= 1");
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        double s = static_cast<double>(i) / static_cast<double>(n);
        t[i] = T * s * s;
    }
    return t;
}

std::vector<double> uniform_times(double T, std::size_t n) {
    if (n < 1 || !(T > 0.0))
        throw std::invalid_argument("uniform_times: need T > 0 and n >= 1");
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        t[i] = T * static_cast<double>(i) / static_cast<double>(n);
    return t;
}

double tunneling_rate(const CurrentTrace& trace, double T) {
    trace.validate();
    if (!(T > 0.0))
        throw std::invalid_argument("tunneling_rate: T must be positive");
    return integrate_trapezoid(trace.times, trace.j, 0.0, T) / T;
}

double asymptotic_current(double k, double V0, double t) {
    if (!(t > 0.0))
        throw std::domain_error("asymptotic_current: t must be positive");
    if (!(V0 > 0.0))
        throw std::invalid_argument("asymptotic_current: V0 must be positive");
    Jet m = moshinsky_jet(0.0, k, t);
    double lead = std::imag(std::conj(m.value) * m.d_x);
    Complex e = std::exp(kI * (kPi / 4.0)) / std::sqrt(2.0 * kPi * t);
    double cross = std::real(e * m.d_x);
    return (k * k * lead - k * cross) / (V0 * V0);
}

double energy_expectation(const WaveField& psi, const std::vector<double>& V, double c0, const EnergyOptions& opt) {
    if (!V.empty() && V.size() != psi.size())
        throw std::invalid_argument("energy_expectation: potential length mismatch");
    double nrm = psi.norm();
    if (std::abs(nrm - opt.expected_norm) > opt.norm_tolerance)
        throw std::invalid_argument("energy_expectation: wave function norm " + std::to_string(nrm)
                                    + " differs from expected " + std::to_string(opt.expected_norm));
    Stencil st{opt.order};
    BandedMatrix H = build_hamiltonian(psi.size(), psi.dx, {}, V, st);
    std::vector<Complex> hpsi = H.apply(psi.psi);
    double e = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double x = psi.x(i);
        if (opt.window && (x < opt.window->first || x > opt.window->second))
            continue;
        double rho = std::norm(psi.psi[i]);
        e += std::real(std::conj(psi.psi[i]) * hpsi[i]) - c0 * rho * rho;
    }
    return e * psi.dx;
}

} // namespace fftunnel::standard
