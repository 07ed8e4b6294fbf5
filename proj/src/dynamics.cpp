#include "skinlab/dynamics.hpp"

#include "skinlab/errors.hpp"
#include "skinlab/linalg/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace skinlab::dynamics {
namespace {

using linalg::Propagator;

StateVector unit(StateVector psi) {
    const double n = psi.stored_norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("initial state must be a nonzero finite vector");
    for (auto& a : psi.stored()) a /= n;
    psi.set_log_scale(0.0);
    return psi;
}

void require_dims(const ComplexMatrix& h, const StateVector& psi, const char* who) {
    if (h.dim() != psi.dim()) {
        std::ostringstream msg;
        msg << who << ": state has " << psi.dim() << " sites but the Hamiltonian has " << h.dim();
        throw ValidationError(msg.str());
    }
}

// Matrix with a separately tracked logarithmic scale, for propagators that
// are reused against several vectors.
struct ScaledMatrix {
    ComplexMatrix m;
    double log_scale = 0.0;

    void rescale() {
        const double s = m.max_abs();
        if (!(s > 0.0) || !std::isfinite(s)) throw NumericError("propagator product lost all precision");
        m *= Complex(1.0 / s);
        log_scale += std::log(s);
    }
};

StateVector apply(const ScaledMatrix& a, const StateVector& psi) {
    StateVector out(linalg::multiply(a.m, psi.stored()), psi.log_scale() + a.log_scale);
    out.renormalize();
    return out;
}

// Stride and remainder step matrices for a grid.
struct StepMatrices {
    ComplexMatrix stride;
    std::optional<ComplexMatrix> tail;
};

StepMatrices step_matrices(const ComplexMatrix& h, const TimeGrid& grid, double sign) {
    const std::size_t steps = grid.steps();
    const std::size_t stride = std::min(grid.stride, steps);
    StepMatrices out{linalg::propagator_matrix(h, sign * grid.dt * static_cast<double>(stride)), std::nullopt};
    const std::size_t rem = steps % stride;
    if (rem != 0) out.tail = linalg::propagator_matrix(h, sign * grid.dt * static_cast<double>(rem));
    return out;
}

}  // namespace

InitialState InitialState::eigenstate(std::size_t n) {
    InitialState s;
    s.kind = Kind::eigenstate;
    s.index = n;
    return s;
}

InitialState InitialState::site(std::size_t l) {
    InitialState s;
    s.kind = Kind::site;
    s.index = l;
    return s;
}

InitialState InitialState::custom(StateVector psi) {
    InitialState s;
    s.kind = Kind::custom;
    s.index = 0;
    s.amplitudes = std::move(psi);
    return s;
}

StateVector InitialState::resolve(const LatticeParams& params) const {
    params.validate();
    switch (kind) {
        case Kind::eigenstate:
            return unit(lattice::chain_eigenpair(params, index).right);
        case Kind::site:
            if (index < 1 || index > params.N)
                throw ValidationError("initial_state: site " + std::to_string(index) + " outside 1.." +
                                      std::to_string(params.N));
            return StateVector::site(params.N, index - 1);
        case Kind::custom:
            if (!amplitudes || amplitudes->dim() != params.N)
                throw ValidationError("initial_state: custom amplitudes must have N entries");
            return unit(*amplitudes);
    }
    throw ValidationError("initial_state: unknown kind");
}

std::string InitialState::describe() const {
    switch (kind) {
        case Kind::eigenstate: return "eigenstate(" + std::to_string(index) + ")";
        case Kind::site: return "site(" + std::to_string(index) + ")";
        case Kind::custom: return "custom";
    }
    return "unknown";
}

void TimeGrid::validate(double kappa) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time.dt must be positive");
    if (!(t_max >= dt) || !std::isfinite(t_max)) throw ValidationError("time.t_max must be >= time.dt");
    if (dt > kMaxTimeStep / kappa * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "time.dt must not exceed " << kMaxTimeStep << "/kappa";
        throw ValidationError(msg.str());
    }
    if (stride < 1) throw ValidationError("time.stride must be >= 1");
    const double n = t_max / dt;
    if (std::abs(n - std::round(n)) > 1e-9 * n) throw ValidationError("time.t_max must be a whole number of steps");
}

std::size_t TimeGrid::steps() const { return static_cast<std::size_t>(std::llround(t_max / dt)); }

std::vector<std::size_t> TimeGrid::sample_steps() const {
    const std::size_t n = steps();
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k <= n; k += stride) out.push_back(k);
    if (out.back() != n) out.push_back(n);
    return out;
}

double time_average(const TimeTrace& trace, double t_lo, double t_hi) {
    double area = 0.0;
    double span = 0.0;
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        const double a = trace.times[k];
        const double b = trace.times[k + 1];
        if (a < t_lo - 1e-12 || b > t_hi + 1e-12) continue;
        area += 0.5 * (b - a) * (trace.values[k] + trace.values[k + 1]);
        span += b - a;
    }
    if (!(span > 0.0)) throw ValidationError("time_average: window holds fewer than two samples");
    return area / span;
}

std::vector<StateVector> evolve(const ComplexMatrix& h, const StateVector& psi0, const TimeGrid& grid) {
    require_dims(h, psi0, "evolve");
    const Propagator step(h, grid.dt);
    std::vector<StateVector> out;
    StateVector psi = psi0;
    std::size_t at = 0;
    for (std::size_t k : grid.sample_steps()) {
        for (; at < k; ++at) step.apply(psi);
        out.push_back(psi);
    }
    return out;
}

TimeTrace fidelity_trace(const ComplexMatrix& h1, const ComplexMatrix& h2, const StateVector& psi0,
                         const TimeGrid& grid) {
    require_dims(h1, psi0, "fidelity_trace");
    require_dims(h2, psi0, "fidelity_trace");
    const Propagator p1(h1, grid.dt);
    const Propagator p2(h2, grid.dt);
    TimeTrace trace;
    trace.observable = "fidelity";
    StateVector a = psi0;
    StateVector b = psi0;
    std::size_t at = 0;
    for (std::size_t k : grid.sample_steps()) {
        for (; at < k; ++at) {
            p1.apply(a);
            p2.apply(b);
        }
        trace.times.push_back(static_cast<double>(k) * grid.dt);
        trace.values.push_back(linalg::normalized_overlap(b, a));
        trace.log_norm_1.push_back(a.log_norm());
        trace.log_norm_2.push_back(b.log_norm());
    }
    return trace;
}

std::vector<DeltaPsiSample> evolve_delta_psi(const ComplexMatrix& h1, const ComplexMatrix& p, double epsilon,
                                             const StateVector& psi0, const TimeGrid& grid, bool full) {
    require_dims(h1, psi0, "delta_psi");
    require_dims(p, psi0, "delta_psi");
    const std::size_t n = h1.dim();
    ComplexMatrix g(2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            g(i, j) = h1(i, j) + (full ? epsilon * p(i, j) : Complex{});
            g(i, n + j) = epsilon * p(i, j);
            g(n + i, n + j) = h1(i, j);
        }
    const Propagator step(g, grid.dt);

    std::vector<Complex> joined(2 * n);
    std::copy(psi0.stored().begin(), psi0.stored().end(), joined.begin() + static_cast<std::ptrdiff_t>(n));
    StateVector state(std::move(joined), psi0.log_scale());

    std::vector<DeltaPsiSample> out;
    std::size_t at = 0;
    for (std::size_t k : grid.sample_steps()) {
        for (; at < k; ++at) step.apply(state);
        const auto s = state.stored();
        out.push_back({StateVector({s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n)}, state.log_scale()),
                       StateVector({s.begin() + static_cast<std::ptrdiff_t>(n), s.end()}, state.log_scale())});
    }
    return out;
}

DeltaPsiTraces delta_psi_trace(const ComplexMatrix& h1, const ComplexMatrix& p, double epsilon,
                               const StateVector& psi0, const TimeGrid& grid, bool full) {
    const auto samples = evolve_delta_psi(h1, p, epsilon, psi0, grid, full);
    const auto steps = grid.sample_steps();
    DeltaPsiTraces out;
    out.delta_norm.observable = full ? "delta_norm_full" : "delta_norm_early";
    out.psi1_norm.observable = "psi1_norm";
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double t = static_cast<double>(steps[k]) * grid.dt;
        const double ld = samples[k].delta.log_norm();
        const double lp = samples[k].psi1.log_norm();
        out.delta_norm.times.push_back(t);
        out.delta_norm.values.push_back(std::exp(2.0 * ld));
        out.delta_norm.log_norm_1.push_back(ld);
        out.delta_norm.log_norm_2.push_back(lp);
        out.psi1_norm.times.push_back(t);
        out.psi1_norm.values.push_back(std::exp(2.0 * lp));
        out.psi1_norm.log_norm_1.push_back(lp);
        out.psi1_norm.log_norm_2.push_back(lp);
    }
    return out;
}

double fidelity_second_order(const StateVector& delta, const StateVector& psi1) {
    if (delta.dim() != psi1.dim()) throw ValidationError("fidelity_second_order: dimension mismatch");
    const double sp = psi1.stored_norm();
    if (!(sp > 0.0)) throw ValidationError("fidelity_second_order: psi1 is zero");
    const double sd = delta.stored_norm();
    if (sd == 0.0) return 1.0;
    const double r = std::exp(delta.log_scale() - psi1.log_scale());
    const double ip = std::abs(linalg::stored_inner(delta, psi1));
    const double q = sd * r / sp;
    const double c = ip * r / (sp * sp);
    return 1.0 - q * q + c * c;
}

TimeTrace loschmidt_hamiltonian_echo(const ComplexMatrix& h1, const ComplexMatrix& h2, const StateVector& psi0,
                                     const TimeGrid& grid) {
    require_dims(h1, psi0, "loschmidt_hamiltonian_echo");
    require_dims(h2, psi0, "loschmidt_hamiltonian_echo");
    const auto fwd = step_matrices(h1, grid, 1.0);
    const auto back = step_matrices(h2, grid, -1.0);
    ScaledMatrix b{ComplexMatrix::identity(h1.dim())};
    StateVector psi1 = psi0;

    TimeTrace trace;
    trace.observable = "echo_hamiltonian";
    std::size_t at = 0;
    for (std::size_t k : grid.sample_steps()) {
        if (k > at) {
            const bool tail = (k - at) != std::min(grid.stride, grid.steps());
            const ComplexMatrix& wf = tail ? *fwd.tail : fwd.stride;
            const ComplexMatrix& wb = tail ? *back.tail : back.stride;
            b.m = wb * (b.m * wf);
            b.rescale();
            StateVector next(linalg::multiply(wf, psi1.stored()), psi1.log_scale());
            next.renormalize();
            psi1 = std::move(next);
            at = k;
        }
        const StateVector psi_f = apply(b, psi0);
        trace.times.push_back(static_cast<double>(k) * grid.dt);
        trace.values.push_back(linalg::normalized_overlap(psi0, psi_f));
        trace.log_norm_1.push_back(psi1.log_norm());
        trace.log_norm_2.push_back(psi_f.log_norm());
    }
    return trace;
}

StateVector phase_slip(const StateVector& psi, const PhaseProfile& profile) {
    if (profile.phases.size() != psi.dim()) throw ValidationError("phase_slip: profile length differs from the state");
    StateVector out = psi;
    for (std::size_t n = 0; n < psi.dim(); ++n) {
        if (!std::isfinite(profile.phases[n])) throw ValidationError("phase_slip: non-finite phase");
        out[n] *= std::polar(1.0, profile.phases[n]);
    }
    return out;
}

PhaseProfile defect_profile(std::size_t N, std::size_t n0) { return defect_profile(N, n0, std::numbers::pi / 2.0); }

PhaseProfile defect_profile(std::size_t N, std::size_t n0, double defect_phase) {
    if (n0 < 1 || n0 > N)
        throw ValidationError("defect.n0 = " + std::to_string(n0) + " outside 1.." + std::to_string(N));
    PhaseProfile p{std::vector<double>(N, std::numbers::pi)};
    p.phases[n0 - 1] = defect_phase;
    return p;
}

TimeTrace loschmidt_phase_echo(const ComplexMatrix& h1, const PhaseProfile& profile, const StateVector& psi0,
                               const TimeGrid& grid) {
    require_dims(h1, psi0, "loschmidt_phase_echo");
    const std::size_t n = h1.dim();
    if (profile.phases.size() != n) throw ValidationError("loschmidt_phase_echo: profile length differs from N");
    const double tol = 1e-14 * h1.max_abs();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t dist = i > j ? i - j : j - i;
            if (dist != 1 && std::abs(h1(i, j)) > tol)
                throw ValidationError(
                    "loschmidt_phase_echo: H1 must be a nearest-neighbour chain with zero diagonal, otherwise the "
                    "all-pi profile is not a time reversal");
        }

    // Sublattice sign combined with the slip.
    std::vector<Complex> slip(n);
    for (std::size_t i = 0; i < n; ++i) slip[i] = std::polar(1.0, profile.phases[i]) * ((i % 2 == 0) ? -1.0 : 1.0);

    const auto fwd = step_matrices(h1, grid, 1.0);
    ScaledMatrix u{ComplexMatrix::identity(n)};

    TimeTrace trace;
    trace.observable = "echo_phase";
    std::size_t at = 0;
    for (std::size_t k : grid.sample_steps()) {
        if (k > at) {
            const bool tail = (k - at) != std::min(grid.stride, grid.steps());
            u.m = (tail ? *fwd.tail : fwd.stride) * u.m;
            u.rescale();
            at = k;
        }
        StateVector psi1 = apply(u, psi0);
        for (std::size_t i = 0; i < n; ++i) psi1[i] *= slip[i];
        const StateVector psi_f = apply(u, psi1);
        trace.times.push_back(static_cast<double>(k) * grid.dt);
        trace.values.push_back(linalg::normalized_overlap(psi0, psi_f));
        trace.log_norm_1.push_back(psi1.log_norm());
        trace.log_norm_2.push_back(psi_f.log_norm());
    }
    return trace;
}

Transport transport_diagnostics(const LatticeParams& params) {
    params.validate();
    Transport t;
    t.v_g = 2.0 * params.kappa * std::cosh(params.h);
    t.t1 = static_cast<double>(params.N) / t.v_g;
    return t;
}

double measure_front_speed(const ComplexMatrix& h1, const StateVector& psi0, const TimeGrid& grid, double threshold) {
    require_dims(h1, psi0, "measure_front_speed");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("measure_front_speed: threshold must be in (0, 1)");
    const std::size_t n = psi0.dim();
    constexpr std::size_t kEdgeMargin = 5;

    std::vector<double> w0(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += w0[i] = std::norm(psi0[i]);
    double best_window = 0.0;
    for (std::size_t i = 0; i + 2 < n; ++i) best_window = std::max(best_window, w0[i] + w0[i + 1] + w0[i + 2]);
    if (best_window < 0.9 * total)
        throw ValidationError("measure_front_speed: initial state must hold 90% of its weight within 3 sites");
    const std::size_t origin = static_cast<std::size_t>(std::max_element(w0.begin(), w0.end()) - w0.begin());

    std::vector<double> ts;
    std::vector<double> ds;
    const Propagator step(h1, grid.dt);
    StateVector psi = psi0;
    std::size_t at = 0;
    for (std::size_t k : grid.sample_steps()) {
        for (; at < k; ++at) step.apply(psi);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += std::norm(psi[i]);
        std::size_t far_site = origin;
        std::size_t dist = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::norm(psi[i]) / norm <= threshold) continue;
            const std::size_t d = i > origin ? i - origin : origin - i;
            if (d > dist) {
                dist = d;
                far_site = i;
            }
        }
        const std::size_t to_edge = std::min(far_site, n - 1 - far_site);
        if (dist > kEdgeMargin && to_edge < kEdgeMargin) break;
        ts.push_back(static_cast<double>(k) * grid.dt);
        ds.push_back(static_cast<double>(dist));
    }

    const double dmax = ds.empty() ? 0.0 : *std::max_element(ds.begin(), ds.end());
    // Least squares for d = v t + c t^(1/3) + b on the points past the launch transient.
    double ata[3][3] = {};
    double atb[3] = {};
    std::size_t used = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (ts[k] <= 0.0 || ds[k] < 0.1 * dmax) continue;
        const double row[3] = {ts[k], std::cbrt(ts[k]), 1.0};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) ata[i][j] += row[i] * row[j];
            atb[i] += row[i] * ds[k];
        }
        ++used;
    }
    if (used < 5 || dmax <= static_cast<double>(kEdgeMargin))
        throw NumericError("measure_front_speed: no ballistic window (increase t_max or N)");

    ComplexMatrix m(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = ata[i][j];
    const linalg::LuDecomposition lu(m);
    if (lu.singular()) throw NumericError("measure_front_speed: degenerate fit");
    const auto coef = lu.solve(std::vector<Complex>{atb[0], atb[1], atb[2]});
    return coef[0].real();
}

}  // namespace skinlab::dynamics
