#pragma once

// Closed-form standard (unaccelerated) tunnelling through a delta barrier
// V0 delta(x): the exponential wave packet and the Moshinsky shutter.

#include "fftunnel/grid.hpp"
#include "fftunnel/specfun.hpp"

#include <memory>
#include <optional>
#include <string>

namespace fftunnel::standard {

using specfun::Jet;

struct WavePacketParams {
    double x0 = 2.0;   // initial centre at -x0
    double k = 2.0;    // mean momentum
    double beta = 1.0; // inverse width
    double V0 = 1.0;   // barrier strength

    Complex lambda() const { return Complex(beta, -k); }
    void validate() const;
};

struct ShutterParams {
    double k = 2.0;
    double V0 = 1.0;

    void validate() const;
};

/// sqrt(beta) exp(-beta|x+x0|) exp(ik(x+x0)).
Complex wavepacket_initial(const WavePacketParams& p, double x);
/// Exact solution; t <= 0 returns wavepacket_initial.
Complex wavepacket_psi0(const WavePacketParams& p, double x, double t);
/// Theta(-x) e^{ikx} for t <= 0, otherwise
/// M(x;k;t) + V0/(V0-ik) [M(|x|;-iV0;t) - M(|x|;k;t)].
Complex shutter_psi0(const ShutterParams& p, double x, double t);

/// An exactly solvable standard evolution with analytic space/time derivatives.
/// At x = 0 the derivative is the right-sided one (x = +0).
class Solution {
public:
    virtual ~Solution() = default;
    virtual Jet jet(double x, double t) const = 0;
    virtual double barrier_strength() const = 0;
    virtual std::string name() const = 0;

    Complex psi(double x, double t) const { return jet(x, t).value; }
    /// Probability current Im(psi* d_x psi) from the analytic derivative.
    double current(double x, double t) const;
    WaveField sample(const Grid1D& g, double t) const;
};

class WavePacket final : public Solution {
public:
    explicit WavePacket(WavePacketParams p);
    Jet jet(double x, double t) const override;
    double barrier_strength() const override { return p_.V0; }
    std::string name() const override { return "wavepacket"; }
    const WavePacketParams& params() const { return p_; }
    /// Energy of the t = 0 state, 1/2 (beta^2 + k^2) + V0 beta e^{-2 beta x0}.
    double initial_energy() const;

private:
    WavePacketParams p_;
};

class Shutter final : public Solution {
public:
    explicit Shutter(ShutterParams p);
    Jet jet(double x, double t) const override;
    double barrier_strength() const override { return p_.V0; }
    std::string name() const override { return "shutter"; }
    const ShutterParams& params() const { return p_; }
    /// Stationary transmitted current k^3/(k^2 + V0^2).
    double steady_current() const;

private:
    ShutterParams p_;
};

/// j = Im(psi* d_x psi) at the node nearest to x, second-order central difference.
double current(const WaveField& psi, double x);

/// Analytic current trace j(probe_x, t_i).
CurrentTrace current_trace(const Solution& s, double probe_x, const std::vector<double>& times);

/// Time axis on [0, T] with n+1 points clustered quadratically toward t = 0,
/// where the shutter current varies fastest.
std::vector<double> graded_times(double T, std::size_t n);
std::vector<double> uniform_times(double T, std::size_t n);

/// Gamma = (1/T) int_0^T j dt (trapezoid).
double tunneling_rate(const CurrentTrace& trace, double T);

/// Leading high-barrier current at x = +0:
/// (k^2/V0^2) Im(M* dM) - (k/V0^2) Re(e^{i pi/4} dM / sqrt(2 pi t)), M = M(0;k;t).
/// Intended for V0 >= 10 k. Throws std::domain_error for t <= 0.
double asymptotic_current(double k, double V0, double t);

struct EnergyOptions {
    int order = 4;              // kinetic stencil order
    double expected_norm = 1.0; // 2A for a soliton of amplitude A
    double norm_tolerance = 1e-6;
    std::optional<std::pair<double, double>> window; // integrate only over [lo, hi]
};

/// E = int psi* (-1/2 d^2 + V - c0 |psi|^2) psi dx with the same finite
/// differences as the propagators. V may be empty. Throws std::invalid_argument
/// when the norm deviates from expected_norm by more than norm_tolerance.
double energy_expectation(const WaveField& psi, const std::vector<double>& V, double c0,
                          const EnergyOptions& opt = {});

} // namespace fftunnel::standard
