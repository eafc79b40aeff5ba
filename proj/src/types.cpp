#include "fftunnel/types.hpp"

#include <algorithm>
#include <cmath>

namespace fftunnel {

double WaveField::norm() const {
    if (psi.size() < 2)
        return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double w = (i == 0 || i + 1 == psi.size()) ? 0.5 : 1.0;
        s += w * std::norm(psi[i]);
    }
    return s * dx;
}

std::size_t WaveField::node_of(double pos) const {
    double r = (pos - x_min) / dx;
    if (psi.empty() || r < -0.5 || r > static_cast<double>(psi.size()) - 0.5)
        throw std::out_of_range("WaveField: position outside grid");
    return static_cast<std::size_t>(std::clamp<long>(std::lround(r), 0, static_cast<long>(psi.size()) - 1));
}

namespace {

void check_axis(const std::vector<double>& t, std::size_t n, const char* what) {
    if (t.empty())
        throw std::invalid_argument(std::string(what) + ": empty series");
    if (t.size() != n)
        throw std::invalid_argument(std::string(what) + ": length mismatch");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw std::invalid_argument(std::string(what) + ": times not strictly increasing");
}

double interp(const std::vector<double>& t, const std::vector<double>& f, double at) {
    const double slack = 1e-12 * std::max(1.0, std::abs(t.back()));
    if (at < t.front() - slack || at > t.back() + slack)
        throw std::out_of_range("time series: evaluation point outside samples");
    if (t.size() == 1)
        return f.front();
    auto it = std::upper_bound(t.begin(), t.end(), at);
    std::size_t i = (it == t.begin()) ? 1 : static_cast<std::size_t>(it - t.begin());
    i = std::min(i, t.size() - 1);
    double s = (at - t[i - 1]) / (t[i] - t[i - 1]);
    return f[i - 1] + s * (f[i] - f[i - 1]);
}

} // namespace

void CurrentTrace::validate() const {
    check_axis(times, j.size(), "CurrentTrace");
    for (double v : j)
        if (!std::isfinite(v))
            throw std::invalid_argument("CurrentTrace: non-finite sample");
}

double CurrentTrace::at(double t) const { return interp(times, j, t); }

void TimeSeries::validate() const { check_axis(times, values.size(), "TimeSeries"); }

double TimeSeries::at(double t) const { return interp(times, values, t); }

double integrate_trapezoid(const std::vector<double>& t, const std::vector<double>& f, double a, double b) {
    check_axis(t, f.size(), "integrate_trapezoid");
    if (b < a)
        return -integrate_trapezoid(t, f, b, a);
    const double slack = 1e-12 * std::max(1.0, std::abs(t.back()));
    if (a < t.front() - slack || b > t.back() + slack)
        throw std::out_of_range("integrate_trapezoid: interval not covered by samples");
    double s = 0.0;
    double prev_t = a, prev_f = interp(t, f, a);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] <= a)
            continue;
        if (t[i] >= b)
            break;
        s += 0.5 * (f[i] + prev_f) * (t[i] - prev_t);
        prev_t = t[i];
        prev_f = f[i];
    }
    s += 0.5 * (interp(t, f, b) + prev_f) * (b - prev_t);
    return s;
}

double l2_distance(const WaveField& a, const WaveField& b, double lo, double hi) {
    if (a.size() != b.size() || std::abs(a.dx - b.dx) > 1e-14 * a.dx || std::abs(a.x_min - b.x_min) > 1e-12)
        throw std::invalid_argument("l2_distance: grids differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double x = a.x(i);
        if (x < lo || x > hi)
            continue;
        s += std::norm(a.psi[i] - b.psi[i]);
    }
    return std::sqrt(s * a.dx);
}

} // namespace fftunnel
