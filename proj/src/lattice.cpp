#include "skinlab/lattice.hpp"

#include "skinlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace skinlab::lattice {
namespace {

void require_index(const LatticeParams& params, std::size_t n, const char* who) {
    if (n < 1 || n > params.N)
        throw ValidationError(std::string(who) + ": index " + std::to_string(n) + " outside 1.." +
                              std::to_string(params.N));
}

// Unit-norm open-chain mode; shared by the eigenpair and the condition ratio.
std::vector<double> chain_mode(std::size_t N, std::size_t n) {
    const double norm = std::sqrt(2.0 / static_cast<double>(N + 1));
    const double k = std::numbers::pi * static_cast<double>(n) / static_cast<double>(N + 1);
    std::vector<double> u(N);
    for (std::size_t l = 1; l <= N; ++l) u[l - 1] = norm * std::sin(k * static_cast<double>(l));
    return u;
}

double log_sum_exp(const std::vector<double>& x) {
    const double m = *std::max_element(x.begin(), x.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

}  // namespace

void LatticeParams::validate() const {
    if (N < 2) throw ValidationError("N must be >= 2");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ValidationError("kappa must be positive and finite");
    if (!(h >= 0.0) || !std::isfinite(h)) throw ValidationError("h must be >= 0 and finite");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be >= 0 and finite");
    if (L < 1 || L >= N) throw ValidationError("L must satisfy 1 <= L < N");
}

double LatticeParams::alpha() const noexcept { return std::exp(-h); }

ComplexMatrix build_h0_chain(const LatticeParams& params) {
    params.validate();
    ComplexMatrix m(params.N);
    for (std::size_t i = 0; i + 1 < params.N; ++i) {
        m(i, i + 1) = params.kappa;
        m(i + 1, i) = params.kappa;
    }
    return m;
}

ComplexMatrix gauge_matrix(std::size_t N, double h) {
    if (N < 2) throw ValidationError("gauge_matrix: N must be >= 2");
    ComplexMatrix x(N);
    for (std::size_t n = 1; n <= N; ++n) x(n - 1, n - 1) = std::exp(-h * static_cast<double>(n));
    return x;
}

ComplexMatrix gauge_similar(const ComplexMatrix& h0, double h) {
    ComplexMatrix out(h0.dim());
    for (std::size_t n = 0; n < h0.dim(); ++n)
        for (std::size_t m = 0; m < h0.dim(); ++m) {
            const Complex v = h0(n, m);
            if (v == Complex{}) continue;
            out(n, m) = v * std::exp(h * (static_cast<double>(m) - static_cast<double>(n)));
        }
    if (!out.all_finite()) throw NumericError("gauge_similar: entries overflow for this h and N");
    return out;
}

ComplexMatrix build_perturbation_ring(std::size_t N) {
    if (N < 3) throw ValidationError("ring perturbation needs N >= 3 (at N = 2 the corners are the bond itself)");
    ComplexMatrix p(N);
    p(0, N - 1) = 1.0;
    p(N - 1, 0) = 1.0;
    return p;
}

ComplexMatrix build_h2(const LatticeParams& params) {
    params.validate();
    ComplexMatrix h2 = gauge_similar(build_h0_chain(params), params.h);
    h2 += Complex(params.epsilon) * build_perturbation_ring(params.N);
    return h2;
}

ComplexMatrix conjugated_perturbation(const ComplexMatrix& p, double h) { return gauge_similar(p, -h); }

ComplexMatrix leading_order_matrix(const LatticeParams& params) {
    const ComplexMatrix h0 = build_h0_chain(params);
    ComplexMatrix a(params.N);
    for (std::size_t n = 0; n + params.L < params.N; ++n) a(n, n + params.L) = h0(n, n + params.L);
    return a;
}

EigenPair chain_eigenpair(const LatticeParams& params, std::size_t n) {
    params.validate();
    require_index(params, n, "chain_eigenpair");
    const auto u = chain_mode(params.N, n);
    std::vector<Complex> right(params.N);
    std::vector<Complex> left(params.N);
    for (std::size_t l = 1; l <= params.N; ++l) {
        const double hl = params.h * static_cast<double>(l);
        right[l - 1] = u[l - 1] * std::exp(-hl);
        left[l - 1] = u[l - 1] * std::exp(hl);
    }
    EigenPair pair;
    pair.index = n;
    pair.energy = 2.0 * params.kappa * std::cos(std::numbers::pi * static_cast<double>(n) / static_cast<double>(params.N + 1));
    pair.right = StateVector(std::move(right));
    pair.left = StateVector(std::move(left));
    return pair;
}

double log_petermann_ratio(const LatticeParams& params, std::size_t n) {
    params.validate();
    require_index(params, n, "petermann_ratio");
    const auto u = chain_mode(params.N, n);
    std::vector<double> plus;
    std::vector<double> minus;
    for (std::size_t l = 1; l <= params.N; ++l) {
        const double w = u[l - 1] * u[l - 1];
        if (w == 0.0) continue;
        const double hl = 2.0 * params.h * static_cast<double>(l);
        plus.push_back(std::log(w) + hl);
        minus.push_back(std::log(w) - hl);
    }
    // Cauchy-Schwarz puts the exact value at >= 0; rounding may dip below.
    return std::max(0.0, log_sum_exp(plus) + log_sum_exp(minus));
}

double petermann_ratio(const LatticeParams& params, std::size_t n) { return std::exp(log_petermann_ratio(params, n)); }

}  // namespace skinlab::lattice
