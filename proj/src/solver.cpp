#include "fftunnel/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fftunnel::solver {

BarrierKind parse_barrier_kind(const std::string& s) {
    if (s == "point")
        return BarrierKind::Point;
    if (s == "gaussian")
        return BarrierKind::Gaussian;
    throw std::invalid_argument("unknown barrier kind '" + s + "' (expected point|gaussian)");
}

std::string to_string(BarrierKind k) { return k == BarrierKind::Point ? "point" : "gaussian"; }

std::vector<double> regularize_barrier(const BarrierSpec& spec, const Grid1D& grid) {
    std::vector<double> V(grid.n, 0.0);
    if (spec.V0 == 0.0)
        return V;
    const double h = grid.dx();
    if (spec.kind == BarrierKind::Point) {
        V[grid.exact_node(0.0)] = spec.V0 / h;
        return V;
    }
    if (spec.width < 4.0 * h)
        throw ResolutionError("barrier width " + std::to_string(spec.width) + " below 4 dx = " + std::to_string(4.0 * h));
    const double w = spec.width;
    const double pref = spec.V0 / (w * std::sqrt(2.0 * kPi));
    for (std::size_t i = 0; i < grid.n; ++i) {
        double x = grid.x(i);
        V[i] = pref * std::exp(-x * x / (2.0 * w * w));
    }
    return V;
}

std::optional<PointBarrier> point_barrier(const BarrierSpec& spec, const Grid1D& grid) {
    if (spec.kind != BarrierKind::Point || spec.V0 == 0.0)
        return std::nullopt;
    return PointBarrier{grid.exact_node(0.0), spec.V0};
}

void add_point_barrier_correction(BandedMatrix& H, const PointBarrier& b, double dx, int order) {
    if (order != 4 || b.V0 == 0.0)
        return;
    if (b.node < 1 || b.node + 1 >= H.n)
        throw ConfigError("point barrier needs a neighbour on each side");
    // psi ~ smooth + V0 psi(0) |x| near the barrier. The 5-point stencil
    // applied to |x| gives 7/(3 dx) at the node and -1/(6 dx) next to it;
    // matching that and symmetrising yields these entries.
    const double c = b.V0 / dx;
    H.rows[b.node][2] += c / 3.0 + b.V0 * b.V0 / 6.0;
    H.rows[b.node][1] -= c / 12.0;
    H.rows[b.node][3] -= c / 12.0;
    H.rows[b.node - 1][3] -= c / 12.0;
    H.rows[b.node + 1][1] -= c / 12.0;
}

double barrier_half_width(const BarrierSpec& spec) {
    if (spec.V0 == 0.0 || spec.kind == BarrierKind::Point)
        return 0.0;
    // The Gaussian is below 1e-12 of its peak beyond ~7.4 w.
    return 7.5 * spec.width;
}

std::size_t probe_node(const BarrierSpec& spec, const Grid1D& grid) {
    double target = barrier_half_width(spec) + 2.0 * grid.dx();
    double r = (target - grid.x_min) / grid.dx();
    auto i = static_cast<std::size_t>(std::ceil(r - 1e-9));
    if (i >= grid.n)
        throw std::out_of_range("probe_node: probe beyond the grid");
    return i;
}

void crank_nicolson_step(std::vector<Complex>& psi, const BandedMatrix& H, double dt,
                         const std::vector<std::pair<std::size_t, Complex>>& fixed) {
    const std::size_t n = H.n;
    const int p = H.half_bw;
    const Complex c = 0.5 * kI * dt;

    // rhs = (I - c H) psi ; system matrix (I + c H)
    std::vector<Complex> b = H.apply(psi);
    std::vector<std::array<Complex, 5>> a(n);
    for (std::size_t j = 0; j < n; ++j) {
        b[j] = psi[j] - c * b[j];
        for (int m = 0; m < 5; ++m)
            a[j][m] = c * H.rows[j][m];
        a[j][2] += 1.0;
    }
    for (const auto& [i, v] : fixed) {
        a[i] = {0.0, 0.0, 1.0, 0.0, 0.0};
        b[i] = v;
    }

    // Banded elimination without pivoting; I + i dt/2 H has a Hermitian
    // part equal to the identity, so pivots stay away from zero.
    for (std::size_t k = 0; k < n; ++k) {
        const Complex piv = a[k][2];
        for (int r = 1; r <= p && k + r < n; ++r) {
            auto& row = a[k + r];
            const Complex l = row[2 - r] / piv;
            if (l == 0.0)
                continue;
            for (int cc = 1; cc <= p && k + cc < n; ++cc)
                row[2 - r + cc] -= l * a[k][2 + cc];
            row[2 - r] = 0.0;
            b[k + r] -= l * b[k];
        }
    }
    for (std::size_t kk = n; kk-- > 0;) {
        Complex s = b[kk];
        for (int cc = 1; cc <= p && kk + cc < n; ++cc)
            s -= a[kk][2 + cc] * psi[kk + cc];
        psi[kk] = s / a[kk][2];
    }
}

PropagationResult propagate_linear(const WaveField& psi0, const Grid1D& grid, const std::vector<double>& static_V,
                                   const FieldProvider& fields, const PropagationOptions& opt) {
    grid.validate(3, opt.enforce_stability);
    if (psi0.size() != grid.n || std::abs(psi0.dx - grid.dx()) > 1e-12 * grid.dx())
        throw ConfigError("propagate_linear: initial state does not match the grid");
    if (!static_V.empty() && static_V.size() != grid.n)
        throw ConfigError("propagate_linear: static potential does not match the grid");
    if (opt.boundary == Boundary::Driven && !opt.boundary_value)
        throw ConfigError("propagate_linear: driven boundary needs boundary_value");
    const Stencil st{opt.order};
    const double t0 = psi0.time;
    const double t_end = t0 + grid.dt * static_cast<double>(grid.n_steps);
    const double eps = 1e-12 * std::max(1.0, std::abs(t_end));

    std::vector<double> checkpoints = opt.checkpoints;
    std::sort(checkpoints.begin(), checkpoints.end());
    for (double c : checkpoints)
        if (c < t0 - eps || c > t_end + eps)
            throw ConfigError("propagate_linear: checkpoint " + std::to_string(c) + " outside the run window");

    PropagationResult res;
    WaveField psi = psi0;
    const double norm0 = psi.norm();
    std::size_t next_cp = 0;
    auto take_checkpoints = [&](double t) {
        while (next_cp < checkpoints.size() && std::abs(checkpoints[next_cp] - t) <= eps) {
            res.snapshots.push_back(psi);
            ++next_cp;
        }
    };
    take_checkpoints(t0);

    std::vector<double> A(grid.n, 0.0), Vt(grid.n, 0.0), V(grid.n, 0.0);
    const int hb = st.half_width();
    std::vector<std::pair<std::size_t, Complex>> fixed;
    double t = t0;
    while (t < t_end - eps) {
        double h = std::min(grid.dt, t_end - t);
        if (next_cp < checkpoints.size() && checkpoints[next_cp] < t + h - eps)
            h = checkpoints[next_cp] - t;
        std::fill(A.begin(), A.end(), 0.0);
        std::fill(Vt.begin(), Vt.end(), 0.0);
        if (fields)
            fields(t + 0.5 * h, A, Vt);
        for (std::size_t i = 0; i < grid.n; ++i)
            V[i] = (static_V.empty() ? 0.0 : static_V[i]) + Vt[i];
        BandedMatrix H = build_hamiltonian(grid.n, grid.dx(), A, V, st);
        if (opt.point_barrier)
            add_point_barrier_correction(H, *opt.point_barrier, grid.dx(), opt.order);
        fixed.clear();
        if (opt.boundary == Boundary::Driven) {
            for (int m = 0; m < hb; ++m) {
                std::size_t l = static_cast<std::size_t>(m), r = grid.n - 1 - static_cast<std::size_t>(m);
                fixed.emplace_back(l, opt.boundary_value(grid.x(l), t + h));
                fixed.emplace_back(r, opt.boundary_value(grid.x(r), t + h));
            }
        }
        crank_nicolson_step(psi.psi, H, h, fixed);
        t += h;
        if (t_end - t <= eps)
            t = t_end;
        psi.time = t;
        ++res.steps;

        if (opt.boundary == Boundary::Reflecting) {
            double drift = std::abs(psi.norm() - norm0);
            res.max_norm_drift = std::max(res.max_norm_drift, drift);
            if (drift > opt.norm_abort)
                throw SolverAbort("propagate_linear: norm drift " + std::to_string(drift) + " at t = "
                                  + std::to_string(t));
            double edge = 0.0;
            for (int m = 0; m < hb; ++m)
                edge = std::max({edge, std::norm(psi.psi[static_cast<std::size_t>(m)]),
                                 std::norm(psi.psi[grid.n - 1 - static_cast<std::size_t>(m)])});
            res.max_boundary_density = std::max(res.max_boundary_density, edge);
            if (edge > opt.boundary_density_abort)
                throw SolverAbort("propagate_linear: boundary density " + std::to_string(edge) + " at t = "
                                  + std::to_string(t) + " exceeds " + std::to_string(opt.boundary_density_abort));
        }
        if (opt.observer)
            opt.observer(psi);
        take_checkpoints(t);
    }
    res.final_state = std::move(psi);
    return res;
}

void SolitonParams::validate() const {
    if (!(A > 0.0))
        throw std::invalid_argument("soliton: amplitude must be positive");
    if (!(c0 >= 0.0))
        throw std::invalid_argument("soliton: c0 must be non-negative");
}

Complex SolitonParams::initial(double x) const { return free_solution(x, 0.0); }

Complex SolitonParams::free_solution(double x, double t) const {
    // Exact for c0 = 1: A sech(A(x + x0 - vt)) e^{i v x + i (A^2 - v^2) t / 2}.
    double y = A * (x + x0 - v * t);
    double amp = A / std::cosh(y);
    return amp * std::exp(kI * (v * x + 0.5 * (A * A - v * v) * t));
}

double SolitonParams::energy() const { return A * v * v + A * A * A / 3.0 - 4.0 / 3.0 * c0 * A * A * A; }

} // namespace fftunnel::solver
