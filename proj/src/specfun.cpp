#include "fftunnel/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace fftunnel::specfun {

namespace {

constexpr double kSqrtPi = 1.77245385090551602729;
constexpr double kExpLimit = 700.0;

// Trapezoid parameters for the Cauchy integral (i/pi) int e^{-s^2}/(z-s) ds.
// h = 0.5 puts the discretisation error (~e^{-pi^2/h^2}) and the truncation
// error (~e^{-(N h)^2}) both below double epsilon.
constexpr double kStep = 0.5;
constexpr int kHalfNodes = 14;

// Nodes t_n = n h (plain) or (n + 1/2) h (shifted) are symmetric about 0,
// so pairs combine as 1/(z - t) + 1/(z + t) = 2z/(z^2 - t^2).
struct TrapezoidTable {
    std::array<double, kHalfNodes + 1> t_plain{}; // t = 0 first
    std::array<double, kHalfNodes + 1> w_plain{};
    std::array<double, kHalfNodes + 1> t_shift{};
    std::array<double, kHalfNodes + 1> w_shift{};

    TrapezoidTable() {
        for (int n = 0; n <= kHalfNodes; ++n) {
            double t = n * kStep;
            t_plain[n] = t;
            w_plain[n] = std::exp(-t * t);
            double u = (n + 0.5) * kStep;
            t_shift[n] = u;
            w_shift[n] = std::exp(-u * u);
        }
    }
};

const TrapezoidTable& table() {
    static const TrapezoidTable tab;
    return tab;
}

// 1/z without the overflow guards of the library division.
inline Complex recip(Complex z) {
    double d = z.real() * z.real() + z.imag() * z.imag();
    return Complex(z.real() / d, -z.imag() / d);
}

Complex w_series(Complex z) {
    // w(z) = sum_n (iz)^n / Gamma(n/2 + 1)
    Complex iz = kI * z;
    Complex term = 1.0;
    double c_even = 1.0, c_odd = 2.0 / kSqrtPi;
    Complex sum = 0.0;
    for (int n = 0; n < 40; ++n) {
        double c = (n % 2 == 0) ? c_even : c_odd;
        sum += c * term;
        if (n % 2 == 0)
            c_even /= (n / 2.0 + 1.0);
        else
            c_odd /= (n / 2.0 + 1.0);
        term *= iz;
        if (std::abs(term) * std::max(c_even, c_odd) < 1e-18)
            break;
    }
    return sum;
}

Complex w_fraction(Complex z) {
    // Laplace continued fraction, evaluated bottom-up.
    // For |z| >= 30 twelve levels are past double precision.
    Complex f = z;
    for (int m = 12; m >= 1; --m)
        f = z - (0.5 * m) * recip(f);
    return kI * recip(kSqrtPi * f);
}

Complex w_trapezoid(Complex z) {
    const auto& tab = table();
    double x = z.real(), y = z.imag();
    double r = x / kStep;
    bool shifted = std::abs(r - std::round(r)) < 0.25;

    const Complex z2 = z * z;
    Complex pairs = 0.0;
    Complex sum = 0.0;
    if (shifted) {
        for (int n = 0; n <= kHalfNodes; ++n)
            pairs += tab.w_shift[n] * recip(z2 - tab.t_shift[n] * tab.t_shift[n]);
        sum = 2.0 * z * pairs;
    } else {
        for (int n = 1; n <= kHalfNodes; ++n)
            pairs += tab.w_plain[n] * recip(z2 - tab.t_plain[n] * tab.t_plain[n]);
        sum = 2.0 * z * pairs + recip(z);
    }
    Complex w = (kI * kStep / kPi) * sum;

    // Pole correction from the residue at s = z. Above y = pi/h the plain
    // sum is already accurate and the correction formula loses precision.
    if (y < kPi / kStep) {
        Complex e = std::exp(-2.0 * kPi * kI * z / kStep);
        Complex ez2 = std::exp(-z * z);
        if (shifted)
            w += 2.0 * ez2 / (1.0 + e);
        else
            w += 2.0 * ez2 / (1.0 - e);
    }
    return w;
}

Complex w_upper(Complex z) {
    double a = std::abs(z);
    if (a < kSeriesRadius)
        return w_series(z);
    if (a >= kFractionRadius)
        return w_fraction(z);
    return w_trapezoid(z);
}

void require_finite(Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument("specfun: non-finite argument");
}

// exp(a) * b without spurious overflow when |exp(a)| is huge but |b| small.
Complex exp_times(Complex a, Complex b) {
    if (a.real() < kExpLimit)
        return std::exp(a) * b;
    if (b == 0.0)
        return 0.0;
    return std::exp(a + std::log(b));
}

Complex checked(Complex v) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::overflow_error("specfun: result exceeds double range");
    return v;
}

} // namespace

Complex faddeeva(Complex z) {
    require_finite(z);
    if (z.imag() >= 0.0)
        return w_upper(z);
    // w(z) = 2 e^{-z^2} - w(-z)
    Complex w_neg = w_upper(-z);
    return checked(exp_times(-z * z, 2.0) - w_neg);
}

Complex erfcx(Complex z) {
    require_finite(z);
    if (z.real() >= 0.0)
        return w_upper(kI * z);
    return checked(exp_times(z * z, 2.0) - w_upper(-kI * z));
}

Complex erfc(Complex z) {
    require_finite(z);
    if (z.real() >= 0.0)
        return checked(exp_times(-z * z, w_upper(kI * z)));
    return checked(2.0 - exp_times(-z * z, w_upper(-kI * z)));
}

namespace {

struct MoshinskyCore {
    Complex m;     // M itself
    Complex gauss; // e^{i x^2/2t} / sqrt(2 pi i t)
};

MoshinskyCore moshinsky_core(double x, Complex k, double t) {
    if (!(t > 0.0))
        throw std::domain_error("moshinsky: t must be positive");
    if (!std::isfinite(x) || !std::isfinite(k.real()) || !std::isfinite(k.imag()))
        throw std::invalid_argument("moshinsky: non-finite argument");
    const Complex root = std::sqrt(2.0 * t) * Complex(std::sqrt(0.5), std::sqrt(0.5));
    const Complex u = (x - k * t) / root;
    const Complex phase = std::exp(kI * (x * x / (2.0 * t)));
    Complex m;
    if (u.real() >= 0.0) {
        m = 0.5 * phase * w_upper(kI * u);
    } else {
        Complex plane = std::exp(kI * (k * x - 0.5 * k * k * t));
        m = plane - 0.5 * phase * w_upper(-kI * u);
    }
    return {checked(m), phase / (kSqrtPi * root)};
}

} // namespace

Complex moshinsky(double x, Complex k, double t) {
    return moshinsky_core(x, k, t).m;
}

Jet moshinsky_jet(double x, Complex k, double t) {
    auto c = moshinsky_core(x, k, t);
    Jet j;
    j.value = c.m;
    j.d_x = kI * k * c.m - c.gauss;
    Complex d_xx = kI * k * j.d_x - kI * (x / t) * c.gauss;
    j.d_t = 0.5 * kI * d_xx;
    return j;
}

Complex free_propagator(double x, double t, double x_src) {
    if (!(t > 0.0))
        throw std::domain_error("free_propagator: t must be positive");
    double d = x - x_src;
    Complex pref = Complex(std::sqrt(0.5), -std::sqrt(0.5)) / std::sqrt(2.0 * kPi * t);
    return pref * std::exp(kI * (d * d / (2.0 * t)));
}

namespace {
void check_gap(Complex lam, double V0) {
    if (std::abs(V0 - lam) < kDegenerateGap)
        throw DegenerateParameterError("s_function: |V0 - lambda| below degeneracy threshold");
}
} // namespace

Complex s_function(double xi, Complex lam, double t, double x, double V0) {
    check_gap(lam, V0);
    double X = std::abs(x) + xi;
    return (moshinsky(X, Complex(0.0, -V0), t) - moshinsky(X, -kI * lam, t)) / (V0 - lam);
}

Jet s_function_jet(double xi, Complex lam, double t, double x, double V0) {
    check_gap(lam, V0);
    double X = std::abs(x) + xi;
    Jet j = moshinsky_jet(X, Complex(0.0, -V0), t) - moshinsky_jet(X, -kI * lam, t);
    j *= 1.0 / (V0 - lam);
    if (x < 0.0)
        j.d_x = -j.d_x;
    return j;
}

} // namespace fftunnel::specfun
