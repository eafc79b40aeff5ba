#pragma once

// Direct numerical propagation used to verify the analytic fast-forward:
// Crank-Nicolson for i psi_t = [1/2 (p - A)^2 + V] psi and a Strang
// split-step scheme for the cubic NLSE with the same gauge coupling.

#include "fftunnel/grid.hpp"

#include <functional>
#include <optional>
#include <memory>

namespace fftunnel::solver {

enum class BarrierKind {
    Point,   // V0/dx on the single node at x = 0
    Gaussian // V0/(w sqrt(2 pi)) exp(-x^2/2w^2)
};

BarrierKind parse_barrier_kind(const std::string& s);
std::string to_string(BarrierKind k);

struct BarrierSpec {
    double V0 = 0.0;
    double width = 0.02;
    BarrierKind kind = BarrierKind::Gaussian;
};

/// Samples the barrier on the grid. Gaussian requires width >= 4 dx
/// (ResolutionError); Point requires x = 0 to be a node (ConfigError).
std::vector<double> regularize_barrier(const BarrierSpec& spec, const Grid1D& grid);

/// Node coupling of a point barrier sitting on node `node`.
struct PointBarrier {
    std::size_t node = 0;
    double V0 = 0.0;
};

/// Returns the point barrier of `spec` on `grid`, or nothing for Gaussian
/// and zero-strength barriers.
std::optional<PointBarrier> point_barrier(const BarrierSpec& spec, const Grid1D& grid);

/// Adds the kink correction of a point barrier to a Hamiltonian that
/// already carries V0/dx on the barrier node. The 5-point Laplacian straddles
/// the slope jump of psi at the barrier; the symmetric correction removes the
/// resulting first-order error. No-op for the 3-point stencil.
void add_point_barrier_correction(BandedMatrix& H, const PointBarrier& b, double dx, int order);

/// Half-width of the barrier support used to place current probes.
double barrier_half_width(const BarrierSpec& spec);

/// First node with x >= barrier half-width + 2 dx.
std::size_t probe_node(const BarrierSpec& spec, const Grid1D& grid);

/// Time-dependent fields at time t written into A and V (both length n).
/// V is the part added to the static potential.
using FieldProvider = std::function<void(double t, std::vector<double>& A, std::vector<double>& V)>;

enum class Boundary {
    Reflecting, // psi = 0 beyond the grid
    Driven      // outer stencil nodes prescribed by boundary_value
};

struct PropagationOptions {
    int order = 4;
    Boundary boundary = Boundary::Reflecting;
    std::function<Complex(double x, double t)> boundary_value;
    std::vector<double> checkpoints;       // absolute times to snapshot
    double norm_abort = 1e-6;              // reflecting runs only
    double boundary_density_abort = 1e-8;  // |psi|^2 at the outer nodes
    bool enforce_stability = true;
    std::optional<PointBarrier> point_barrier; // kink-corrected coupling
    /// Called after each step with the new state and the fields of the step.
    std::function<void(const WaveField&)> observer;
};

struct PropagationResult {
    std::vector<WaveField> snapshots; // one per checkpoint, in order
    WaveField final_state;
    double max_norm_drift = 0.0;
    double max_boundary_density = 0.0;
    std::size_t steps = 0;
};

/// Crank-Nicolson from psi0.time to psi0.time + n_steps * dt with fields
/// evaluated at step midpoints; steps are shortened to land on checkpoints.
/// Throws ConfigError (stability rule, bad options) and SolverAbort (norm
/// drift, boundary density).
PropagationResult propagate_linear(const WaveField& psi0, const Grid1D& grid, const std::vector<double>& static_V,
                                   const FieldProvider& fields, const PropagationOptions& opt);

/// Single Crank-Nicolson step (I + i dt/2 H) psi' = (I - i dt/2 H) psi for a
/// given Hamiltonian; `fixed` lists nodes whose new values are prescribed.
void crank_nicolson_step(std::vector<Complex>& psi, const BandedMatrix& H, double dt,
                         const std::vector<std::pair<std::size_t, Complex>>& fixed = {});

struct SolitonParams {
    double A = 1.0;
    double v = 2.25;
    double x0 = 6.0;
    double c0 = 1.0;

    void validate() const;
    /// A sech(A(x + x0)) e^{ivx}.
    Complex initial(double x) const;
    /// Barrier-free travelling soliton at time t.
    Complex free_solution(double x, double t) const;
    double norm() const { return 2.0 * A; }
    /// A v^2 + A^3/3 - 4/3 c0 A^3, the expectation of -1/2 d^2 - c0|psi|^2.
    double energy() const;
};

/// Strang split-step integrator for
///   i psi_t = [1/2 (p - A)^2 + V_static + V(t) - c0 |psi|^2] psi
/// on a periodic FFT grid of n nodes (x_max excluded from the period).
/// Kinetic half-steps are exact in Fourier space; the nonlinear phase is
/// exact; the gauge and potential part is a Crank-Nicolson banded step.
class SplitStepNLSE {
public:
    SplitStepNLSE(const Grid1D& grid, std::vector<double> static_V, double c0, int order = 4);
    ~SplitStepNLSE();
    SplitStepNLSE(const SplitStepNLSE&) = delete;
    SplitStepNLSE& operator=(const SplitStepNLSE&) = delete;

    void set_state(const WaveField& psi);
    const WaveField& state() const { return psi_; }
    double time() const { return psi_.time; }

    /// One step of length dt. `fields`, when set, supplies A and V at the midpoint.
    void step(double dt, const FieldProvider* fields = nullptr);
    /// Advance to absolute time t with steps no longer than max_dt.
    void advance_to(double t, double max_dt, const FieldProvider* fields = nullptr);

    /// H psi with spectral kinetic term, static potential and nonlinearity.
    std::vector<Complex> apply_hamiltonian() const;
    /// Spectral d/dx of the current state.
    std::vector<Complex> spectral_derivative() const;
    /// Spectral d/dx of any state on this grid.
    std::vector<Complex> spectral_derivative(const std::vector<Complex>& psi) const;
    /// <psi|H|psi> with spectral kinetic term, the static potential plus
    /// V_extra, gauge field A (either may be empty) and the nonlinearity.
    double energy(const WaveField& psi, const std::vector<double>& A, const std::vector<double>& V_extra) const;

private:
    void kinetic(double dt);
    void nonlinear(double dt);

    struct Fft;
    std::unique_ptr<Fft> fft_;
    Grid1D grid_;
    std::vector<double> V_;
    double c0_;
    int order_;
    std::vector<double> k2_; // wave numbers squared
    std::vector<double> kw_; // wave numbers
    WaveField psi_;
    std::vector<double> A_buf_, V_buf_;
};

} // namespace fftunnel::solver
