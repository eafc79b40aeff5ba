#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fftunnel {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

// Error categories shared by every module. All derive from the standard
// hierarchy so callers may catch std::invalid_argument etc. directly.

/// A parameter combination that sits on a removable singularity of a formula.
class DegenerateParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A sampled field cannot support the requested operation (e.g. too many nodes).
class DegenerateFieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Discretisation too coarse for the requested representation.
class ResolutionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid run configuration (grid, step size, scenario fields).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical run left its validity envelope (norm drift, boundary leakage).
class SolverAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested operation has no implementation for the scenario.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Complex wave-function samples on a uniform 1-d grid at one instant.
struct WaveField {
    double x_min = 0.0;
    double dx = 1.0;
    double time = 0.0;
    std::vector<Complex> psi;

    std::size_t size() const { return psi.size(); }
    double x(std::size_t i) const { return x_min + dx * static_cast<double>(i); }
    double x_max() const { return x(psi.empty() ? 0 : psi.size() - 1); }

    /// Trapezoid-rule norm  \int |psi|^2 dx.
    double norm() const;
    /// Node index closest to position `pos`; throws std::out_of_range off-grid.
    std::size_t node_of(double pos) const;
};

/// Current density j(probe_x, t) sampled on a strictly increasing time axis.
struct CurrentTrace {
    double probe_x = 0.0;
    std::vector<double> times;
    std::vector<double> j;

    std::size_t size() const { return times.size(); }
    void validate() const;
    /// Linear interpolation; throws std::out_of_range outside the trace.
    double at(double t) const;
};

/// Generic scalar time series (energy traces and similar).
struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;

    void validate() const;
    double at(double t) const;
};

/// Trapezoid integral of samples over [a, b]; the samples must cover [a, b].
double integrate_trapezoid(const std::vector<double>& t, const std::vector<double>& f, double a, double b);

/// Discrete L2 distance sqrt(sum |a-b|^2 dx) restricted to [lo, hi].
double l2_distance(const WaveField& a, const WaveField& b, double lo, double hi);

} // namespace fftunnel
