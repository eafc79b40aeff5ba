#pragma once

// Fast-forward machinery: time-scaling profiles alpha(t), the advance map
// Lambda(t) = int_0^t alpha, phase fields eta of psi = rho e^{i eta}, and the
// driving fields
//   A_FF = -(alpha-1) d_x eta
//   V_FF = -(alpha-1) d_Lambda eta - 1/2 (alpha^2-1) (d_x eta)^2
//   E_FF = alpha' d_x eta + (alpha^2-1)/alpha d_t d_x eta + (alpha^2-1) d_x eta d_x^2 eta
// in natural units (hbar = m = q = c = 1). The magnetic field is identically
// zero in one dimension.

#include "fftunnel/grid.hpp"
#include "fftunnel/standard.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace fftunnel::fastforward {

enum class Profile { Uniform, Cosine };

Profile parse_profile(const std::string& s);
std::string to_string(Profile p);

class TimeScaling {
public:
    /// alpha_bar = 1 is accepted as the identity scaling; alpha_bar < 1 and
    /// T <= 0 throw std::invalid_argument.
    TimeScaling(Profile profile, double alpha_bar, double T);

    Profile profile() const { return profile_; }
    double alpha_bar() const { return alpha_bar_; }
    double T() const { return T_; }
    double T_FF() const { return T_ / alpha_bar_; }

    /// alpha(t); equals 1 outside [0, T_FF].
    double alpha(double t) const;
    double alpha_dot(double t) const;
    /// Lambda(t); throws std::out_of_range outside [0, T_FF].
    double lambda(double t) const;
    /// Inverse map t = Lambda^{-1}(tau) for tau in [0, T].
    double inverse_lambda(double tau) const;

private:
    Profile profile_;
    double alpha_bar_;
    double T_;
};

struct PhaseOptions {
    double rel_threshold = 1e-6;     // mask |psi| < rel_threshold * max|psi|
    double max_masked_fraction = 0.2;
    int order = 4;
};

/// Unwrapped phase with derivatives. Arrays share the sampling of the
/// source WaveField. Masked nodes carry linearly interpolated values.
struct PhaseField {
    double x_min = 0.0;
    double dx = 1.0;
    double lambda = 0.0; // standard time of the snapshot
    std::vector<double> eta;
    std::vector<double> d_eta_dx;
    std::vector<double> d2_eta_dx2;
    std::optional<std::vector<double>> d_eta_dlambda;
    std::vector<std::uint8_t> node_mask; // 1 where |psi| below threshold

    std::size_t size() const { return eta.size(); }
    double masked_fraction() const;
};

/// Phase of one snapshot; d_eta_dlambda left empty.
/// Throws DegenerateFieldError when too many nodes are masked.
PhaseField phase_extract(const WaveField& psi, const PhaseOptions& opt = {});

/// Phase of the centre snapshot with d_eta_dlambda from the centred
/// difference of the unwrapped phases of minus/plus, taken dlambda apart
/// on each side.
PhaseField phase_extract(const WaveField& minus, const WaveField& centre, const WaveField& plus, double dlambda,
                         const PhaseOptions& opt = {});

/// Phase of a snapshot whose spatial derivative psi_x (and optionally the
/// standard-time derivative psi_lambda) is known: d_eta_dx = Im(psi_x/psi),
/// d_eta_dlambda = Im(psi_lambda/psi), d2_eta_dx2 by differentiating d_eta_dx.
PhaseField phase_from_derivatives(const WaveField& psi, const std::vector<Complex>& psi_x,
                                  const std::vector<Complex>* psi_lambda, const PhaseOptions& opt = {});

enum class LambdaDerivative {
    Analytic,       // Im(psi_t / psi) from the exact time derivative
    CentredDifference // snapshots at Lambda +- delta
};

/// Phase of an analytic standard solution at standard time lambda, with
/// d_eta_dx = Im(psi_x/psi) exact and d_eta_dlambda per `how`.
PhaseField phase_from_solution(const standard::Solution& s, const Grid1D& g, double lambda,
                               const PhaseOptions& opt = {}, LambdaDerivative how = LambdaDerivative::Analytic,
                               double delta = 1e-5);

std::vector<double> vector_potential(const PhaseField& phase, double alpha);
/// Throws std::invalid_argument when d_eta_dlambda is missing.
std::vector<double> scalar_potential(const PhaseField& phase, double alpha);

/// E_FF at fast-forward time t from phase snapshots at t - h, t, t + h
/// (fast-forward time). Throws std::invalid_argument for mismatched snapshots.
std::vector<double> electric_field(const PhaseField& prev, const PhaseField& mid, const PhaseField& next, double h,
                                   const TimeScaling& s, double t);

/// E_FF from a single snapshot, using d_t d_x eta = alpha d_x(d_eta_dlambda)
/// (the mixed derivatives commute). Needs d_eta_dlambda.
std::vector<double> electric_field_local(const PhaseField& phase, const TimeScaling& s, double t, int order = 4);

/// Sampled A_FF, V_FF, E_FF at one fast-forward instant.
struct DrivingFields {
    double t = 0.0;
    double alpha = 1.0;
    std::vector<double> A;
    std::vector<double> V;
    std::vector<double> E;
};

/// Fields driving the fast-forward of an analytic solution at time t. E is
/// computed from snapshots at t +- h when with_e is set.
DrivingFields driving_fields(const standard::Solution& s, const TimeScaling& sc, const Grid1D& g, double t,
                             const PhaseOptions& opt = {}, bool with_e = false, double h = 1e-6);

/// psi_FF(x, t) = psi_0(x, Lambda(t)) for analytic scenarios.
WaveField ff_wavefunction(const standard::Solution& s, const TimeScaling& sc, const Grid1D& g, double t);

/// j_FF(t) = alpha(t) j(Lambda(t)): each standard sample tau_i becomes the
/// fast-forward sample t_i = Lambda^{-1}(tau_i). Throws std::out_of_range when
/// the trace does not reach T.
CurrentTrace ff_current(const CurrentTrace& standard_trace, const TimeScaling& s);

/// E_FF(t) = alpha(t) E_0(Lambda(t)).
double ff_energy(const TimeSeries& e0, const TimeScaling& s, double t);

/// alpha_bar = V0^2, the uniform scaling restoring the low-barrier current.
double recovery_alpha(double V0);

/// alpha_max = V0 / E_0, the largest magnification keeping E_FF below V0.
double alpha_max(double V0, double E0);

/// Local fast-forward current Im(psi* d_x psi) - A |psi|^2 at node i.
double ff_current_at(const WaveField& psi, const std::vector<double>& A, std::size_t i);

} // namespace fftunnel::fastforward
