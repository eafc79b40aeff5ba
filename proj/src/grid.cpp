#include "fftunnel/grid.hpp"

#include <cmath>
#include <string>

namespace fftunnel {

std::vector<double> Grid1D::nodes() const {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = x(i);
    return xs;
}

std::size_t Grid1D::node_of(double pos) const {
    double h = dx();
    if (pos < x_min - 0.5 * h || pos > x_max + 0.5 * h)
        throw std::out_of_range("Grid1D: position outside grid");
    long i = std::lround((pos - x_min) / h);
    if (i < 0)
        i = 0;
    if (i >= static_cast<long>(n))
        i = static_cast<long>(n) - 1;
    return static_cast<std::size_t>(i);
}

std::size_t Grid1D::exact_node(double pos) const {
    std::size_t i = node_of(pos);
    if (std::abs(x(i) - pos) > 1e-9 * dx())
        throw ConfigError("grid: position " + std::to_string(pos) + " is not a grid node");
    return i;
}

void Grid1D::validate(std::size_t min_nodes, bool enforce_stability) const {
    if (!(x_max > x_min))
        throw ConfigError("grid: x_max must exceed x_min");
    if (n < min_nodes)
        throw ConfigError("grid: n = " + std::to_string(n) + " below minimum " + std::to_string(min_nodes));
    if (!(dt > 0.0))
        throw ConfigError("grid: dt must be positive");
    double h = dx();
    if (enforce_stability && dt > h * h * (1.0 + 1e-12))
        throw ConfigError("grid: dt = " + std::to_string(dt) + " violates dt <= dx^2 = " + std::to_string(h * h));
}

WaveField Grid1D::empty_field(double t) const {
    WaveField f;
    f.x_min = x_min;
    f.dx = dx();
    f.time = t;
    f.psi.assign(n, Complex(0.0));
    return f;
}

std::array<double, 5> Stencil::d1() const {
    if (order == 2)
        return {0.0, -0.5, 0.0, 0.5, 0.0};
    if (order == 4)
        return {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};
    throw std::invalid_argument("Stencil: order must be 2 or 4");
}

std::array<double, 5> Stencil::d2() const {
    if (order == 2)
        return {0.0, 1.0, -2.0, 1.0, 0.0};
    if (order == 4)
        return {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};
    throw std::invalid_argument("Stencil: order must be 2 or 4");
}

std::vector<Complex> BandedMatrix::apply(const std::vector<Complex>& v) const {
    std::vector<Complex> out(n, Complex(0.0));
    for (std::size_t j = 0; j < n; ++j) {
        Complex s = 0.0;
        for (int m = -half_bw; m <= half_bw; ++m) {
            long c = static_cast<long>(j) + m;
            if (c < 0 || c >= static_cast<long>(n))
                continue;
            s += rows[j][m + 2] * v[static_cast<std::size_t>(c)];
        }
        out[j] = s;
    }
    return out;
}

BandedMatrix build_hamiltonian(std::size_t n, double dx, const std::vector<double>& A,
                               const std::vector<double>& V, const Stencil& st, bool kinetic) {
    const bool hasA = !A.empty();
    const bool hasV = !V.empty();
    if ((hasA && A.size() != n) || (hasV && V.size() != n))
        throw std::invalid_argument("build_hamiltonian: field length mismatch");
    const auto c1 = st.d1();
    const auto c2 = st.d2();
    const double inv_dx = 1.0 / dx, inv_dx2 = inv_dx * inv_dx;

    BandedMatrix H;
    H.n = n;
    H.half_bw = st.half_width();
    H.rows.assign(n, std::array<Complex, 5>{});
    for (std::size_t j = 0; j < n; ++j) {
        double a_j = hasA ? A[j] : 0.0;
        for (int m = -H.half_bw; m <= H.half_bw; ++m) {
            long c = static_cast<long>(j) + m;
            if (c < 0 || c >= static_cast<long>(n))
                continue;
            Complex h = kinetic ? Complex(-0.5 * c2[m + 2] * inv_dx2) : Complex(0.0);
            if (hasA && m != 0) {
                double a_c = A[static_cast<std::size_t>(c)];
                h += 0.5 * kI * c1[m + 2] * inv_dx * (a_c + a_j);
            }
            H.rows[j][m + 2] = h;
        }
        H.rows[j][2] += 0.5 * a_j * a_j + (hasV ? V[j] : 0.0);
    }
    return H;
}

std::vector<double> derivative(const std::vector<double>& f, double dx, const Stencil& st) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 3)
        return d;
    const auto c = st.d1();
    const int hw = st.half_width();
    for (std::size_t j = 0; j < n; ++j) {
        bool inner = j >= static_cast<std::size_t>(hw) && j + hw < n;
        if (inner) {
            double s = 0.0;
            for (int m = -hw; m <= hw; ++m)
                s += c[m + 2] * f[j + m];
            d[j] = s / dx;
        } else if (j == 0) {
            d[j] = (f[1] - f[0]) / dx;
        } else if (j + 1 == n) {
            d[j] = (f[n - 1] - f[n - 2]) / dx;
        } else {
            d[j] = (f[j + 1] - f[j - 1]) / (2.0 * dx);
        }
    }
    return d;
}

std::vector<double> second_derivative(const std::vector<double>& f, double dx, const Stencil& st) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 3)
        return d;
    const auto c = st.d2();
    const int hw = st.half_width();
    const double inv = 1.0 / (dx * dx);
    for (std::size_t j = 0; j < n; ++j) {
        bool inner = j >= static_cast<std::size_t>(hw) && j + hw < n;
        if (inner) {
            double s = 0.0;
            for (int m = -hw; m <= hw; ++m)
                s += c[m + 2] * f[j + m];
            d[j] = s * inv;
        } else {
            std::size_t k = std::min(std::max<std::size_t>(j, 1), n - 2);
            d[j] = (f[k + 1] - 2.0 * f[k] + f[k - 1]) * inv;
        }
    }
    return d;
}

} // namespace fftunnel
