#include "fftunnel/solver.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace fftunnel::solver {

namespace {
// The FFTW planner is not thread safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct SplitStepNLSE::Fft {
    std::size_t n;
    fftw_complex* buf;
    fftw_plan fwd;
    fftw_plan bwd;

    explicit Fft(std::size_t n_) : n(n_) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        buf = fftw_alloc_complex(n);
        fwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }
    Complex* data() { return reinterpret_cast<Complex*>(buf); }
    void load(const std::vector<Complex>& v) { std::copy(v.begin(), v.end(), data()); }
    void store(std::vector<Complex>& v) const {
        const Complex* d = reinterpret_cast<const Complex*>(buf);
        std::copy(d, d + n, v.begin());
    }
    void forward() { fftw_execute(fwd); }
    void backward() {
        fftw_execute(bwd);
        const double s = 1.0 / static_cast<double>(n);
        Complex* d = data();
        for (std::size_t i = 0; i < n; ++i)
            d[i] *= s;
    }
};

SplitStepNLSE::SplitStepNLSE(const Grid1D& grid, std::vector<double> static_V, double c0, int order)
    : fft_(std::make_unique<Fft>(grid.n)), grid_(grid), V_(std::move(static_V)), c0_(c0), order_(order) {
    grid.validate(16, false);
    if (V_.empty())
        V_.assign(grid.n, 0.0);
    if (V_.size() != grid.n)
        throw ConfigError("SplitStepNLSE: static potential does not match the grid");
    const std::size_t n = grid.n;
    const double L = grid.dx() * static_cast<double>(n);
    k2_.resize(n);
    kw_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double m = (j < (n + 1) / 2) ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
        double k = 2.0 * kPi * m / L;
        k2_[j] = k * k;
        kw_[j] = (n % 2 == 0 && j == n / 2) ? 0.0 : k;
    }
    psi_ = grid.empty_field(0.0);
    A_buf_.assign(n, 0.0);
    V_buf_.assign(n, 0.0);
}

SplitStepNLSE::~SplitStepNLSE() = default;

void SplitStepNLSE::set_state(const WaveField& psi) {
    if (psi.size() != grid_.n)
        throw ConfigError("SplitStepNLSE: state does not match the grid");
    psi_ = psi;
}

void SplitStepNLSE::kinetic(double dt) {
    fft_->load(psi_.psi);
    fft_->forward();
    Complex* d = fft_->data();
    for (std::size_t j = 0; j < grid_.n; ++j)
        d[j] *= std::exp(Complex(0.0, -0.5 * k2_[j] * dt));
    fft_->backward();
    fft_->store(psi_.psi);
}

void SplitStepNLSE::nonlinear(double dt) {
    if (c0_ == 0.0)
        return;
    for (auto& v : psi_.psi)
        v *= std::exp(Complex(0.0, c0_ * std::norm(v) * dt));
}

void SplitStepNLSE::step(double dt, const FieldProvider* fields) {
    const std::size_t n = grid_.n;
    const double tm = psi_.time + 0.5 * dt;
    kinetic(0.5 * dt);
    nonlinear(0.5 * dt);
    if (fields && *fields) {
        std::fill(A_buf_.begin(), A_buf_.end(), 0.0);
        std::fill(V_buf_.begin(), V_buf_.end(), 0.0);
        (*fields)(tm, A_buf_, V_buf_);
        // Diagonal part exactly, first-derivative gauge coupling by Crank-Nicolson.
        std::vector<double> diag(n);
        for (std::size_t i = 0; i < n; ++i)
            diag[i] = V_[i] + V_buf_[i] + 0.5 * A_buf_[i] * A_buf_[i];
        for (std::size_t i = 0; i < n; ++i)
            psi_.psi[i] *= std::exp(Complex(0.0, -0.5 * diag[i] * dt));
        BandedMatrix G = build_hamiltonian(n, grid_.dx(), A_buf_, {}, Stencil{order_}, false);
        for (std::size_t i = 0; i < n; ++i)
            G.rows[i][2] -= 0.5 * A_buf_[i] * A_buf_[i];
        crank_nicolson_step(psi_.psi, G, dt);
        for (std::size_t i = 0; i < n; ++i)
            psi_.psi[i] *= std::exp(Complex(0.0, -0.5 * diag[i] * dt));
    } else {
        for (std::size_t i = 0; i < n; ++i)
            psi_.psi[i] *= std::exp(Complex(0.0, -V_[i] * dt));
    }
    nonlinear(0.5 * dt);
    kinetic(0.5 * dt);
    psi_.time += dt;
}

void SplitStepNLSE::advance_to(double t, double max_dt, const FieldProvider* fields) {
    if (!(max_dt > 0.0))
        throw std::invalid_argument("advance_to: max_dt must be positive");
    const double eps = 1e-12 * std::max(1.0, std::abs(t));
    if (t < psi_.time - eps)
        throw std::invalid_argument("advance_to: cannot step backwards");
    while (psi_.time < t - eps) {
        double h = std::min(max_dt, t - psi_.time);
        step(h, fields);
    }
    psi_.time = std::max(psi_.time, t);
}

std::vector<Complex> SplitStepNLSE::spectral_derivative() const { return spectral_derivative(psi_.psi); }

std::vector<Complex> SplitStepNLSE::spectral_derivative(const std::vector<Complex>& psi) const {
    if (psi.size() != grid_.n)
        throw std::invalid_argument("spectral_derivative: state does not match the grid");
    fft_->load(psi);
    fft_->forward();
    Complex* d = fft_->data();
    for (std::size_t j = 0; j < grid_.n; ++j)
        d[j] *= Complex(0.0, kw_[j]);
    fft_->backward();
    std::vector<Complex> out(grid_.n);
    fft_->store(out);
    return out;
}

std::vector<Complex> SplitStepNLSE::apply_hamiltonian() const {
    fft_->load(psi_.psi);
    fft_->forward();
    Complex* d = fft_->data();
    for (std::size_t j = 0; j < grid_.n; ++j)
        d[j] *= 0.5 * k2_[j];
    fft_->backward();
    std::vector<Complex> out(grid_.n);
    fft_->store(out);
    for (std::size_t i = 0; i < grid_.n; ++i)
        out[i] += (V_[i] - c0_ * std::norm(psi_.psi[i])) * psi_.psi[i];
    return out;
}

double SplitStepNLSE::energy(const WaveField& psi, const std::vector<double>& A,
                             const std::vector<double>& V_extra) const {
    const std::size_t n = grid_.n;
    if ((!A.empty() && A.size() != n) || (!V_extra.empty() && V_extra.size() != n))
        throw std::invalid_argument("energy: field length mismatch");
    std::vector<Complex> px = spectral_derivative(psi.psi);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Complex p = psi.psi[i];
        const double a = A.empty() ? 0.0 : A[i];
        const double v = V_[i] + (V_extra.empty() ? 0.0 : V_extra[i]);
        const double rho = std::norm(p);
        e += 0.5 * std::norm(px[i] - kI * a * p) + v * rho - c0_ * rho * rho;
    }
    return e * grid_.dx();
}

} // namespace fftunnel::solver
