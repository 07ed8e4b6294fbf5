#include "skinlab/spectral.hpp"

#include "skinlab/errors.hpp"
#include "skinlab/linalg/eigen.hpp"
#include "skinlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

namespace skinlab::spectral {
namespace {

using linalg::complex_less;

// Roots of Q whose product with their partner misses 1 by more than this are
// reported as a pairing failure. Double roots at an EP sit near 1e-8.
constexpr double kPairingTol = 1e-6;

void sort_energies(std::vector<Complex>& e) { std::sort(e.begin(), e.end(), complex_less); }

Spectrum spectrum_at(const LatticeParams& base, double eps) {
    LatticeParams p = base;
    p.epsilon = eps;
    if (eps == 0.0) return chain_spectrum(p);
    return exact_ring_spectrum(p).first;
}

struct Coalescence {
    Complex energy;
    double gap = 0.0;
    std::size_t lo_index = 0;
    std::size_t hi_index = 0;
};

// For each conjugate pair born between `lo` and `hi`, the adjacent real pair
// of `lo` it most plausibly came from.
std::vector<Coalescence> locate_coalescences(const Spectrum& lo, const Spectrum& hi) {
    const std::size_t born = hi.reality.pair_count - lo.reality.pair_count;
    std::vector<Complex> upper;
    for (const auto& e : hi.energies)
        if (e.imag() > 0.0 && std::abs(e.imag()) > kPolynomialRealityTol) upper.push_back(e);
    std::sort(upper.begin(), upper.end(), [](const Complex& a, const Complex& b) { return a.imag() < b.imag(); });
    upper.resize(std::min(upper.size(), born));

    std::vector<std::size_t> real_idx;
    for (std::size_t i = 0; i < lo.energies.size(); ++i)
        if (std::abs(lo.energies[i].imag()) <= kPolynomialRealityTol) real_idx.push_back(i);

    std::vector<Coalescence> out;
    for (const auto& e : upper) {
        Coalescence best;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k + 1 < real_idx.size(); ++k) {
            const double a = lo.energies[real_idx[k]].real();
            const double b = lo.energies[real_idx[k + 1]].real();
            const double d = std::abs(0.5 * (a + b) - e.real());
            if (d < best_dist) {
                best_dist = d;
                best.energy = 0.5 * (a + b);
                best.gap = b - a;
                best.lo_index = real_idx[k];
                best.hi_index = real_idx[k + 1];
            }
        }
        if (std::isfinite(best_dist)) out.push_back(best);
    }
    return out;
}

}  // namespace

const char* to_string(SpectrumSource s) {
    switch (s) {
        case SpectrumSource::numeric_eigensolver: return "numeric-eigensolver";
        case SpectrumSource::polynomial: return "polynomial";
        case SpectrumSource::closed_form: return "closed-form";
        case SpectrumSource::perturbative: return "perturbative";
    }
    return "unknown";
}

Spectrum first_order_energies(const ComplexMatrix& h0, const ComplexMatrix& p_conj, double epsilon) {
    if (h0.dim() != p_conj.dim()) throw ValidationError("first_order_energies: dimension mismatch");
    const double scale = h0.max_abs();
    if (linalg::max_abs_diff(h0, h0.adjoint()) > 1e-12 * scale)
        throw ValidationError("first_order_energies: H0 must be Hermitian");
    const auto eig = linalg::eigenvalues(h0, true);
    for (std::size_t k = 0; k + 1 < eig.values.size(); ++k)
        if (eig.values[k + 1].real() - eig.values[k].real() <= 1e-8 * scale)
            throw ValidationError("first_order_energies: unperturbed spectrum is degenerate");

    Spectrum s;
    s.source = SpectrumSource::perturbative;
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        const auto& u = eig.vectors[k];
        const auto pu = linalg::multiply(p_conj, u);
        Complex m = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) m += std::conj(u[i]) * pu[i];
        s.energies.push_back(eig.values[k].real() + epsilon * m);
    }
    sort_energies(s.energies);
    s.reality = classify_reality(s.energies, kDenseRealityTol, std::max(scale, 1e-300));
    return s;
}

Complex ring_perturbed_energy_closed_form(const LatticeParams& params, std::size_t n) {
    params.validate();
    if (n < 1 || n > params.N) throw ValidationError("ring_perturbed_energy_closed_form: index out of range");
    const double np1 = static_cast<double>(params.N + 1);
    const double k = std::numbers::pi * static_cast<double>(n) / np1;
    const double s = std::sin(k);
    const double x = static_cast<double>(params.N - 1) * params.h;
    return 2.0 * params.kappa * std::cos(k) + (2.0 * params.epsilon / np1) * s * s * (std::exp(x) + std::exp(-x));
}

Spectrum chain_spectrum(const LatticeParams& params) {
    params.validate();
    Spectrum s;
    s.source = SpectrumSource::closed_form;
    for (std::size_t n = 1; n <= params.N; ++n)
        s.energies.push_back(2.0 * params.kappa *
                             std::cos(std::numbers::pi * static_cast<double>(n) / static_cast<double>(params.N + 1)));
    sort_energies(s.energies);
    s.reality = Reality{true, params.N, 0};
    return s;
}

PolynomialSystem selfinversive_coeffs(const LatticeParams& params) {
    params.validate();
    if (!(params.epsilon > 0.0))
        throw ValidationError("polynomial route needs epsilon > 0 (use the closed-form chain spectrum at epsilon = 0)");
    const std::size_t N = params.N;
    const double x = static_cast<double>(N - 1) * params.h;
    const double c = std::cosh(x);
    if (!std::isfinite(c))
        throw NumericError("cosh((N-1) h) overflows; critical_epsilon works in the log domain for this regime");
    const double e = params.epsilon / params.kappa;

    std::vector<Complex> a(2 * N + 3);
    a[2 * N + 2] = 1.0;
    a[2 * N] -= e * e;
    a[N + 2] -= 2.0 * e * c;
    a[N] += 2.0 * e * c;
    a[2] += e * e;
    a[0] -= 1.0;
    PolynomialCoeffs p(std::move(a));
    PolynomialCoeffs q = linalg::deflate_root(linalg::deflate_root(p, 1.0), -1.0);
    return PolynomialSystem{params, std::move(p), std::move(q), {}, std::exp(-x)};
}

std::pair<Spectrum, PolynomialSystem> exact_ring_spectrum(const LatticeParams& params) {
    PolynomialSystem sys = selfinversive_coeffs(params);
    sys.roots_y = linalg::polynomial_roots(sys.coeffs_Q);
    const auto& y = sys.roots_y;
    const std::size_t count = y.size();

    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    candidates.reserve(count * (count - 1) / 2);
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j) candidates.emplace_back(std::abs(y[i] * y[j] - 1.0), i, j);
    std::sort(candidates.begin(), candidates.end());

    std::vector<bool> used(count, false);
    Spectrum s;
    s.source = SpectrumSource::polynomial;
    double worst = 0.0;
    for (const auto& [d, i, j] : candidates) {
        if (used[i] || used[j]) continue;
        used[i] = used[j] = true;
        worst = std::max(worst, d);
        const Complex big = std::abs(y[i]) >= std::abs(y[j]) ? y[i] : y[j];
        s.energies.push_back(params.kappa * (big + 1.0 / big));
    }
    if (s.energies.size() != params.N || worst > kPairingTol) {
        std::ostringstream msg;
        msg << "exact_ring_spectrum: roots of Q do not pair as (y, 1/y) (worst |y y' - 1| = " << worst
            << ", N = " << params.N << ", h = " << params.h << ", epsilon = " << params.epsilon << ")";
        throw NumericError(msg.str());
    }
    sort_energies(s.energies);
    s.reality = classify_reality(s.energies, kPolynomialRealityTol, params.kappa);
    return {std::move(s), std::move(sys)};
}

Spectrum numeric_ring_spectrum(const LatticeParams& params) {
    Spectrum s;
    s.source = SpectrumSource::numeric_eigensolver;
    s.energies = linalg::eigenvalues(lattice::build_h2(params)).values;
    s.reality = classify_reality(s.energies, kDenseRealityTol, params.kappa);
    return s;
}

double critical_epsilon(const LatticeParams& params) {
    params.validate();
    const double x = static_cast<double>(params.N - 1) * params.h;
    // asinh(cosh x) = x + ln(1 + e^-2x) + O(e^-4x) once cosh is out of range
    const double a = x < 300.0 ? std::asinh(std::cosh(x)) : x + std::log1p(std::exp(-2.0 * x));
    return params.kappa * std::exp(-a);
}

Reality classify_reality(const std::vector<Complex>& energies, double tol, double kappa_scale) {
    Reality r;
    std::vector<Complex> upper;
    std::vector<Complex> lower;
    for (const auto& e : energies) {
        if (std::abs(e.imag()) <= tol * kappa_scale)
            ++r.real_count;
        else
            (e.imag() > 0.0 ? upper : lower).push_back(e);
    }
    const double pair_tol = std::max(1e-6, 1e3 * tol) * kappa_scale;
    if (upper.size() != lower.size()) {
        std::ostringstream msg;
        msg << "classify_reality: " << upper.size() << " energies above the real axis but " << lower.size()
            << " below";
        throw NumericError(msg.str());
    }
    std::vector<bool> used(lower.size(), false);
    for (const auto& e : upper) {
        std::size_t best = lower.size();
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < lower.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(std::conj(e) - lower[j]);
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        if (bd > pair_tol * std::max(1.0, std::abs(e))) {
            std::ostringstream msg;
            msg << "classify_reality: " << e << " has no conjugate partner (nearest miss " << bd << ")";
            throw NumericError(msg.str());
        }
        used[best] = true;
    }
    r.pair_count = upper.size();
    r.all_real = upper.empty();
    return r;
}

Reality classify_reality(const Spectrum& spec, double tol, double kappa_scale) {
    return classify_reality(spec.energies, tol, kappa_scale);
}

BifurcationTrace trace_bifurcation(const LatticeParams& base, const std::vector<double>& epsilon_grid,
                                   unsigned threads) {
    base.validate();
    if (epsilon_grid.size() < 3) throw ValidationError("trace_bifurcation: epsilon grid needs at least 3 points");
    for (std::size_t k = 0; k < epsilon_grid.size(); ++k) {
        if (!std::isfinite(epsilon_grid[k]) || epsilon_grid[k] < 0.0)
            throw ValidationError("trace_bifurcation: epsilon values must be finite and >= 0");
        if (k > 0 && !(epsilon_grid[k] > epsilon_grid[k - 1]))
            throw ValidationError("trace_bifurcation: epsilon grid must be strictly ascending");
    }

    BifurcationTrace trace;
    trace.epsilon_grid = epsilon_grid;
    trace.loci = parallel_map(epsilon_grid.size(), threads,
                              [&](std::size_t k) { return spectrum_at(base, epsilon_grid[k]); });

    const double gap_tol = kCoalescenceGapTol * base.kappa;
    for (std::size_t k = 0; k + 1 < epsilon_grid.size(); ++k) {
        const std::size_t p0 = trace.loci[k].reality.pair_count;
        const std::size_t p1 = trace.loci[k + 1].reality.pair_count;
        if (p1 < p0) {
            std::ostringstream msg;
            msg << "conjugate pairs return to the real axis between epsilon = " << epsilon_grid[k] << " and "
                << epsilon_grid[k + 1];
            trace.warnings.push_back(msg.str());
            continue;
        }
        if (p1 == p0) continue;

        double lo = epsilon_grid[k];
        double hi = epsilon_grid[k + 1];
        Spectrum slo = trace.loci[k];
        Spectrum shi = trace.loci[k + 1];
        std::vector<Coalescence> found;
        for (int it = 0; it < 200; ++it) {
            found = locate_coalescences(slo, shi);
            const bool tight = !found.empty() && std::all_of(found.begin(), found.end(),
                                                             [&](const Coalescence& c) { return c.gap < gap_tol; });
            if (tight || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
            const double mid = 0.5 * (lo + hi);
            Spectrum smid = spectrum_at(base, mid);
            if (smid.reality.pair_count > slo.reality.pair_count) {
                hi = mid;
                shi = std::move(smid);
            } else {
                lo = mid;
                slo = std::move(smid);
            }
        }
        if (found.empty() || std::any_of(found.begin(), found.end(), [&](const Coalescence& c) { return c.gap >= gap_tol; })) {
            std::ostringstream msg;
            msg << "reality flips between epsilon = " << epsilon_grid[k] << " and " << epsilon_grid[k + 1]
                << " without a resolvable real-axis coalescence";
            trace.warnings.push_back(msg.str());
            continue;
        }
        if (shi.reality.pair_count - slo.reality.pair_count < p1 - p0) {
            std::ostringstream msg;
            msg << "several separate flips between epsilon = " << epsilon_grid[k] << " and " << epsilon_grid[k + 1]
                << "; only the first is located";
            trace.warnings.push_back(msg.str());
        }

        std::size_t lead = 0;
        for (std::size_t i = 1; i < found.size(); ++i) {
            const double dg = found[i].gap - found[lead].gap;
            if (dg < -1e-9 * gap_tol || (std::abs(dg) <= 1e-9 * gap_tol && found[i].energy.real() > found[lead].energy.real()))
                lead = i;
        }
        EpEvent ev;
        ev.eps_lo = epsilon_grid[k];
        ev.eps_hi = epsilon_grid[k + 1];
        ev.refined_eps_lo = lo;
        ev.refined_eps_hi = hi;
        ev.energy = found[lead].energy;
        ev.pair_indices = {found[lead].lo_index, found[lead].hi_index};
        for (const auto& c : found) ev.energies.push_back(c.energy);
        sort_energies(ev.energies);
        trace.ep_events.push_back(std::move(ev));
    }

    const bool first_real = trace.loci.front().reality.all_real;
    const bool last_real = trace.loci.back().reality.all_real;
    if (first_real != last_real && trace.ep_events.empty())
        trace.warnings.push_back("grid endpoints differ in reality but no flip was bracketed; refine the grid");
    return trace;
}

}  // namespace skinlab::spectral
