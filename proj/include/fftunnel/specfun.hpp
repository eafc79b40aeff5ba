#pragma once

// Special functions behind the closed-form tunnelling solutions: the complex
// error function family, the Moshinsky function and the free propagator.
// Natural units (hbar = m = 1) throughout.

#include "fftunnel/types.hpp"

namespace fftunnel::specfun {

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz), any finite z.
///
/// Upper half-plane evaluation uses three branches:
///   |z| <  kSeriesRadius : power series  w = sum (iz)^n / Gamma(n/2+1)
///   |z| <  kFractionRadius: trapezoidal rule for (i/pi) int e^{-s^2}/(z-s) ds
///                           with the pole correction 2 e^{-z^2}/(1 -/+ e^{-2 pi i z/h})
///   otherwise             : Laplace continued fraction.
/// The lower half-plane follows from w(z) = 2 exp(-z^2) - w(-z).
Complex faddeeva(Complex z);

inline constexpr double kSeriesRadius = 0.5;
inline constexpr double kFractionRadius = 30.0;

/// Complementary error function. Relative accuracy ~1e-14 away from its zeros.
/// Throws std::invalid_argument for non-finite z and std::overflow_error when
/// |erfc(z)| exceeds the double range (Re(-z^2) > ~709 with Re z < 0).
Complex erfc(Complex z);

/// Scaled complementary error function exp(z^2) erfc(z).
Complex erfcx(Complex z);

/// Moshinsky function
///   M(x;k;t) = 1/2 exp(i(kx - k^2 t/2)) erfc((x - kt)/sqrt(2it)),
/// sqrt(2it) = sqrt(2t) e^{i pi/4}. Evaluated in the overflow-free form
///   Re u >= 0:  1/2 e^{i x^2/2t} w(iu)
///   Re u <  0:  e^{i(kx - k^2 t/2)} - 1/2 e^{i x^2/2t} w(-iu)
/// with u the erfc argument. k may be complex. Throws std::domain_error for t <= 0.
Complex moshinsky(double x, Complex k, double t);

/// Value and first derivatives of a space-time function.
struct Jet {
    Complex value;
    Complex d_x;
    Complex d_t;

    Jet& operator+=(const Jet& o) { value += o.value; d_x += o.d_x; d_t += o.d_t; return *this; }
    Jet& operator-=(const Jet& o) { value -= o.value; d_x -= o.d_x; d_t -= o.d_t; return *this; }
    Jet& operator*=(Complex c) { value *= c; d_x *= c; d_t *= c; return *this; }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Complex c, Jet a) { return a *= c; }
};

/// M together with dM/dx = ikM - e^{ix^2/2t}/sqrt(2 pi i t) and
/// dM/dt = (i/2) d^2M/dx^2 (M solves the free Schroedinger equation).
Jet moshinsky_jet(double x, Complex k, double t);

/// Free-particle propagator K0(x,t|x_src,0) = (2 pi i t)^{-1/2} exp(i(x-x_src)^2/2t).
/// Throws std::domain_error for t <= 0.
Complex free_propagator(double x, double t, double x_src);

/// Threshold on |V0 - lambda| below which s_function refuses to evaluate.
inline constexpr double kDegenerateGap = 1e-8;

/// S(xi, lambda; t) = [M(|x|+xi; -iV0; t) - M(|x|+xi; -i lambda; t)] / (V0 - lambda).
/// Throws DegenerateParameterError when |V0 - lambda| < kDegenerateGap.
Complex s_function(double xi, Complex lam, double t, double x, double V0);

/// Jet of S with respect to x (for x != 0 the |x| sign is applied; x = 0 is
/// treated as x = +0).
Jet s_function_jet(double xi, Complex lam, double t, double x, double V0);

} // namespace fftunnel::specfun
