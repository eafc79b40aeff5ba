#include "fftunnel/fastforward.hpp"

#include <algorithm>
#include <cmath>

namespace fftunnel::fastforward {

Profile parse_profile(const std::string& s) {
    if (s == "uniform")
        return Profile::Uniform;
    if (s == "cosine")
        return Profile::Cosine;
    throw std::invalid_argument("unknown time-scaling profile '" + s + "' (expected uniform|cosine)");
}

std::string to_string(Profile p) { return p == Profile::Uniform ? "uniform" : "cosine"; }

TimeScaling::TimeScaling(Profile profile, double alpha_bar, double T)
    : profile_(profile), alpha_bar_(alpha_bar), T_(T) {
    if (!(alpha_bar >= 1.0) || !std::isfinite(alpha_bar))
        throw std::invalid_argument("TimeScaling: alpha_bar must be >= 1");
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("TimeScaling: T must be positive");
}

double TimeScaling::alpha(double t) const {
    if (t < 0.0 || t > T_FF())
        return 1.0;
    if (profile_ == Profile::Uniform)
        return alpha_bar_;
    double w = 2.0 * kPi * alpha_bar_ / T_;
    return (alpha_bar_ - 1.0) * std::cos(w * t + kPi) + alpha_bar_;
}

double TimeScaling::alpha_dot(double t) const {
    if (t < 0.0 || t > T_FF() || profile_ == Profile::Uniform)
        return 0.0;
    double w = 2.0 * kPi * alpha_bar_ / T_;
    return -(alpha_bar_ - 1.0) * w * std::sin(w * t + kPi);
}

double TimeScaling::lambda(double t) const {
    const double slack = 1e-12 * std::max(1.0, T_FF());
    if (t < -slack || t > T_FF() + slack)
        throw std::out_of_range("TimeScaling::lambda: t outside [0, T_FF]");
    t = std::clamp(t, 0.0, T_FF());
    if (t == T_FF())
        return T_;
    if (profile_ == Profile::Uniform)
        return alpha_bar_ * t;
    double w = 2.0 * kPi * alpha_bar_ / T_;
    return alpha_bar_ * t + (alpha_bar_ - 1.0) / w * std::sin(w * t + kPi);
}

double TimeScaling::inverse_lambda(double tau) const {
    const double slack = 1e-12 * std::max(1.0, T_);
    if (tau < -slack || tau > T_ + slack)
        throw std::out_of_range("TimeScaling::inverse_lambda: tau outside [0, T]");
    tau = std::clamp(tau, 0.0, T_);
    if (profile_ == Profile::Uniform)
        return tau / alpha_bar_;
    // Lambda is increasing with slope alpha >= 1: safeguarded Newton.
    double lo = 0.0, hi = T_FF();
    double t = tau / alpha_bar_;
    for (int it = 0; it < 100; ++it) {
        double f = lambda(t) - tau;
        if (f > 0.0)
            hi = t;
        else
            lo = t;
        double step = f / alpha(t);
        double next = t - step;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - t) < 1e-15 * std::max(1.0, T_FF())) {
            t = next;
            break;
        }
        t = next;
    }
    return t;
}

double PhaseField::masked_fraction() const {
    if (node_mask.empty())
        return 0.0;
    std::size_t m = std::count(node_mask.begin(), node_mask.end(), std::uint8_t(1));
    return static_cast<double>(m) / static_cast<double>(node_mask.size());
}

namespace {

std::vector<std::uint8_t> make_mask(const std::vector<Complex>& psi, const PhaseOptions& opt) {
    double peak = 0.0;
    for (const auto& v : psi)
        peak = std::max(peak, std::abs(v));
    std::vector<std::uint8_t> mask(psi.size(), 0);
    std::size_t masked = 0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        if (!(std::abs(psi[i]) >= opt.rel_threshold * peak) || peak == 0.0) {
            mask[i] = 1;
            ++masked;
        }
    }
    if (masked == psi.size())
        throw DegenerateFieldError("phase: every node is below the amplitude threshold");
    double frac = static_cast<double>(masked) / static_cast<double>(psi.size());
    if (frac > opt.max_masked_fraction)
        throw DegenerateFieldError("phase: " + std::to_string(frac * 100.0) + "% of nodes masked (limit "
                                   + std::to_string(opt.max_masked_fraction * 100.0) + "%)");
    return mask;
}

// Replace masked entries by linear interpolation between the surrounding
// unmasked values, constant beyond the outermost unmasked node.
void fill_masked(std::vector<double>& v, const std::vector<std::uint8_t>& mask) {
    const std::size_t n = v.size();
    std::size_t i = 0;
    long last = -1;
    while (i < n) {
        if (!mask[i]) {
            last = static_cast<long>(i);
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && mask[j])
            ++j;
        for (std::size_t m = i; m < j; ++m) {
            if (last < 0 && j < n)
                v[m] = v[j];
            else if (j >= n)
                v[m] = v[static_cast<std::size_t>(last)];
            else {
                double s = static_cast<double>(m - last) / static_cast<double>(j - last);
                v[m] = (1.0 - s) * v[static_cast<std::size_t>(last)] + s * v[j];
            }
        }
        i = j;
    }
}

std::vector<double> unwrap(const std::vector<Complex>& psi, const std::vector<std::uint8_t>& mask) {
    const std::size_t n = psi.size();
    std::vector<double> eta(n, 0.0);
    bool started = false;
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mask[i])
            continue;
        double raw = std::arg(psi[i]);
        if (!started) {
            eta[i] = raw;
            started = true;
        } else {
            // Choosing the 2 pi multiple nearest to the previous unmasked value
            // minimises the total variation, also across masked runs.
            double d = raw - prev;
            if (std::abs(d) > kPi)
                d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
            eta[i] = prev + d;
        }
        prev = eta[i];
    }
    fill_masked(eta, mask);
    return eta;
}

PhaseField base_phase(const WaveField& psi, const PhaseOptions& opt) {
    PhaseField ph;
    ph.x_min = psi.x_min;
    ph.dx = psi.dx;
    ph.lambda = psi.time;
    ph.node_mask = make_mask(psi.psi, opt);
    ph.eta = unwrap(psi.psi, ph.node_mask);
    return ph;
}

} // namespace

PhaseField phase_extract(const WaveField& psi, const PhaseOptions& opt) {
    if (psi.size() < 5)
        throw std::invalid_argument("phase_extract: need at least 5 samples");
    PhaseField ph = base_phase(psi, opt);
    Stencil st{opt.order};
    ph.d_eta_dx = derivative(ph.eta, ph.dx, st);
    ph.d2_eta_dx2 = second_derivative(ph.eta, ph.dx, st);
    fill_masked(ph.d_eta_dx, ph.node_mask);
    fill_masked(ph.d2_eta_dx2, ph.node_mask);
    return ph;
}

PhaseField phase_extract(const WaveField& minus, const WaveField& centre, const WaveField& plus, double dlambda,
                         const PhaseOptions& opt) {
    if (minus.size() != centre.size() || plus.size() != centre.size())
        throw std::invalid_argument("phase_extract: snapshot sizes differ");
    if (!(dlambda > 0.0))
        throw std::invalid_argument("phase_extract: dlambda must be positive");
    PhaseField ph = phase_extract(centre, opt);
    std::vector<double> rate(centre.size());
    for (std::size_t i = 0; i < rate.size(); ++i)
        rate[i] = std::arg(plus.psi[i] * std::conj(minus.psi[i])) / (2.0 * dlambda);
    fill_masked(rate, ph.node_mask);
    ph.d_eta_dlambda = std::move(rate);
    return ph;
}

PhaseField phase_from_derivatives(const WaveField& psi, const std::vector<Complex>& psi_x,
                                  const std::vector<Complex>* psi_lambda, const PhaseOptions& opt) {
    const std::size_t n = psi.size();
    if (psi_x.size() != n || (psi_lambda && psi_lambda->size() != n))
        throw std::invalid_argument("phase_from_derivatives: length mismatch");
    PhaseField ph = base_phase(psi, opt);
    std::vector<double> kx(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (!ph.node_mask[i])
            kx[i] = std::imag(psi_x[i] / psi.psi[i]);
    fill_masked(kx, ph.node_mask);
    ph.d2_eta_dx2 = derivative(kx, ph.dx, Stencil{opt.order});
    fill_masked(ph.d2_eta_dx2, ph.node_mask);
    ph.d_eta_dx = std::move(kx);
    if (psi_lambda) {
        std::vector<double> kl(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (!ph.node_mask[i])
                kl[i] = std::imag((*psi_lambda)[i] / psi.psi[i]);
        fill_masked(kl, ph.node_mask);
        ph.d_eta_dlambda = std::move(kl);
    }
    return ph;
}

PhaseField phase_from_solution(const standard::Solution& s, const Grid1D& g, double lambda, const PhaseOptions& opt,
                               LambdaDerivative how, double delta) {
    const std::size_t n = g.n;
    WaveField f = g.empty_field(lambda);
    std::vector<Complex> px(n), pt(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto j = s.jet(g.x(i), lambda);
        f.psi[i] = j.value;
        px[i] = j.d_x;
        pt[i] = j.d_t;
    }
    if (how == LambdaDerivative::CentredDifference) {
        if (!(lambda - delta > 0.0))
            throw std::invalid_argument("phase_from_solution: lambda - delta must stay positive");
        // Store psi times i * (phase rate) so that Im(pt/psi) is the rate.
        for (std::size_t i = 0; i < n; ++i) {
            Complex a = s.psi(g.x(i), lambda + delta), b = s.psi(g.x(i), lambda - delta);
            pt[i] = kI * f.psi[i] * (std::arg(a * std::conj(b)) / (2.0 * delta));
        }
    }
    return phase_from_derivatives(f, px, &pt, opt);
}

std::vector<double> vector_potential(const PhaseField& phase, double alpha) {
    std::vector<double> A(phase.size());
    for (std::size_t i = 0; i < A.size(); ++i)
        A[i] = -(alpha - 1.0) * phase.d_eta_dx[i];
    return A;
}

std::vector<double> scalar_potential(const PhaseField& phase, double alpha) {
    if (!phase.d_eta_dlambda)
        throw std::invalid_argument("scalar_potential: phase field lacks d_eta_dlambda");
    const auto& rate = *phase.d_eta_dlambda;
    std::vector<double> V(phase.size());
    for (std::size_t i = 0; i < V.size(); ++i) {
        double k = phase.d_eta_dx[i];
        V[i] = -(alpha - 1.0) * rate[i] - 0.5 * (alpha * alpha - 1.0) * k * k;
    }
    return V;
}

std::vector<double> electric_field(const PhaseField& prev, const PhaseField& mid, const PhaseField& next, double h,
                                   const TimeScaling& s, double t) {
    if (prev.size() != mid.size() || next.size() != mid.size() || mid.size() == 0)
        throw std::invalid_argument("electric_field: need three snapshots of equal size");
    if (!(h > 0.0))
        throw std::invalid_argument("electric_field: time step must be positive");
    double a = s.alpha(t), ad = s.alpha_dot(t);
    std::vector<double> E(mid.size());
    for (std::size_t i = 0; i < E.size(); ++i) {
        double kx = mid.d_eta_dx[i];
        double dtkx = (next.d_eta_dx[i] - prev.d_eta_dx[i]) / (2.0 * h);
        E[i] = ad * kx + (a * a - 1.0) / a * dtkx + (a * a - 1.0) * kx * mid.d2_eta_dx2[i];
    }
    return E;
}

std::vector<double> electric_field_local(const PhaseField& phase, const TimeScaling& s, double t, int order) {
    if (!phase.d_eta_dlambda)
        throw std::invalid_argument("electric_field_local: phase field lacks d_eta_dlambda");
    std::vector<double> dxl = derivative(*phase.d_eta_dlambda, phase.dx, Stencil{order});
    fill_masked(dxl, phase.node_mask);
    double a = s.alpha(t), ad = s.alpha_dot(t);
    std::vector<double> E(phase.size());
    for (std::size_t i = 0; i < E.size(); ++i) {
        double kx = phase.d_eta_dx[i];
        E[i] = ad * kx + (a * a - 1.0) * dxl[i] + (a * a - 1.0) * kx * phase.d2_eta_dx2[i];
    }
    return E;
}

DrivingFields driving_fields(const standard::Solution& s, const TimeScaling& sc, const Grid1D& g, double t,
                             const PhaseOptions& opt, bool with_e, double h) {
    DrivingFields f;
    f.t = t;
    f.alpha = sc.alpha(t);
    PhaseField ph = phase_from_solution(s, g, sc.lambda(t), opt);
    f.A = vector_potential(ph, f.alpha);
    f.V = scalar_potential(ph, f.alpha);
    if (with_e) {
        // Keep the stencil inside [0, T_FF]; near the ends it shifts inward.
        double tc = std::clamp(t, h, sc.T_FF() - h);
        PhaseField pm = phase_from_solution(s, g, sc.lambda(tc - h), opt);
        PhaseField pp = phase_from_solution(s, g, sc.lambda(tc + h), opt);
        f.E = electric_field(pm, ph, pp, h, sc, t);
    }
    return f;
}

WaveField ff_wavefunction(const standard::Solution& s, const TimeScaling& sc, const Grid1D& g, double t) {
    WaveField f = s.sample(g, sc.lambda(t));
    f.time = t;
    return f;
}

CurrentTrace ff_current(const CurrentTrace& tr, const TimeScaling& s) {
    tr.validate();
    const double slack = 1e-9 * s.T();
    if (tr.times.front() > slack || tr.times.back() < s.T() - slack)
        throw std::out_of_range("ff_current: standard trace must cover [0, T]");
    CurrentTrace out;
    out.probe_x = tr.probe_x;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        double tau = tr.times[i];
        if (tau < -slack || tau > s.T() + slack)
            continue;
        double t = s.inverse_lambda(std::clamp(tau, 0.0, s.T()));
        out.times.push_back(t);
        out.j.push_back(s.alpha(t) * tr.j[i]);
    }
    out.validate();
    return out;
}

double ff_energy(const TimeSeries& e0, const TimeScaling& s, double t) {
    return s.alpha(t) * e0.at(s.lambda(t));
}

double recovery_alpha(double V0) {
    if (!(V0 >= 1.0))
        throw std::invalid_argument("recovery_alpha: V0 must be >= 1");
    return V0 * V0;
}

double alpha_max(double V0, double E0) {
    if (!(E0 > 0.0))
        throw std::invalid_argument("alpha_max: energy must be positive");
    return V0 / E0;
}

double ff_current_at(const WaveField& psi, const std::vector<double>& A, std::size_t i) {
    if (i == 0 || i + 1 >= psi.size() || A.size() != psi.size())
        throw std::out_of_range("ff_current_at: node needs both neighbours");
    Complex d = (psi.psi[i + 1] - psi.psi[i - 1]) / (2.0 * psi.dx);
    return std::imag(std::conj(psi.psi[i]) * d) - A[i] * std::norm(psi.psi[i]);
}

} // namespace fftunnel::fastforward
