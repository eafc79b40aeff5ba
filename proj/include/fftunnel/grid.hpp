#pragma once

// Uniform 1-d grids and the finite-difference pieces of the minimal-coupling
// Hamiltonian H = 1/2 (p - A)^2 + V, p = -i d/dx.

#include "fftunnel/types.hpp"

#include <array>

namespace fftunnel {

struct Grid1D {
    double x_min = -40.0;
    double x_max = 40.0;
    std::size_t n = 8193; // nodes, both ends included
    double dt = 1e-4;
    std::size_t n_steps = 0;

    double dx() const { return (x_max - x_min) / static_cast<double>(n - 1); }
    double x(std::size_t i) const { return x_min + dx() * static_cast<double>(i); }
    std::vector<double> nodes() const;
    /// Closest node to pos; throws std::out_of_range outside [x_min, x_max].
    std::size_t node_of(double pos) const;
    /// Index of a node lying exactly (to 1e-9 dx) at pos, or ConfigError.
    std::size_t exact_node(double pos) const;

    /// Checks n >= min_nodes, x_max > x_min, dt > 0 and, when requested,
    /// the stability rule dt <= dx^2. Throws ConfigError.
    void validate(std::size_t min_nodes = 512, bool enforce_stability = true) const;

    WaveField empty_field(double t = 0.0) const;
};

/// Centred finite-difference stencils. Second order uses 3 points, fourth order 5.
struct Stencil {
    int order = 4;
    int half_width() const { return order / 2; }
    /// Coefficients for offsets -half..half (length 2*half+1), unscaled by dx.
    std::array<double, 5> d1() const;
    std::array<double, 5> d2() const;
};

/// Hermitian banded matrix (bandwidth <= 2). Row j stores entries for
/// columns j-2..j+2 at positions 0..4.
struct BandedMatrix {
    std::size_t n = 0;
    int half_bw = 1;
    std::vector<std::array<Complex, 5>> rows;

    std::vector<Complex> apply(const std::vector<Complex>& v) const;
};

/// Discrete H = -1/2 D2 + i/2 [D1(A .) + A D1] + A^2/2 + V with zero values
/// beyond the grid ends. A and V may be empty (treated as zero). With
/// kinetic = false the -1/2 D2 part is left out.
BandedMatrix build_hamiltonian(std::size_t n, double dx, const std::vector<double>& A,
                               const std::vector<double>& V, const Stencil& st, bool kinetic = true);

/// Central derivative of sampled data with the given stencil; the outer
/// nodes fall back to lower order one-sided differences.
std::vector<double> derivative(const std::vector<double>& f, double dx, const Stencil& st);
std::vector<double> second_derivative(const std::vector<double>& f, double dx, const Stencil& st);

} // namespace fftunnel
