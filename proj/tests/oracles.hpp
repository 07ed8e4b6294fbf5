#pragma once

// Test-only reference computations. Nothing here calls into the library
// routines these oracles are used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;
using Dense = std::vector<std::vector<Complex>>;

inline Dense random_dense(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Dense m(n, std::vector<Complex>(n));
    for (auto& row : m)
        for (auto& v : row) v = {g(rng), g(rng)};
    return m;
}

inline Dense matmul(const Dense& a, const Dense& b) {
    const std::size_t n = a.size();
    Dense c(n, std::vector<Complex>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

/// Characteristic polynomial det(lambda I - A), ascending coefficients, by
/// the Faddeev-LeVerrier recursion.
inline std::vector<Complex> characteristic_polynomial(const Dense& a) {
    const std::size_t n = a.size();
    std::vector<Complex> c(n + 1);
    c[n] = 1.0;
    Dense m(n, std::vector<Complex>(n));  // M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        Dense am = matmul(a, m);
        for (std::size_t i = 0; i < n; ++i) am[i][i] += c[n - k + 1];
        m = am;
        Dense am2 = matmul(a, m);
        Complex tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += am2[i][i];
        c[n - k] = -tr / static_cast<double>(k);
    }
    return c;
}

/// Determinant by Gaussian elimination with partial pivoting.
inline Complex determinant(Dense a) {
    const std::size_t n = a.size();
    Complex det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        if (a[p][k] == Complex{}) return 0.0;
        if (p != k) {
            std::swap(a[p], a[k]);
            det = -det;
        }
        det *= a[k][k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return det;
}

/// exp(A) by a plain Taylor series with scaling by 2^-s and s squarings.
inline Dense taylor_expm(Dense a, int terms = 40) {
    const std::size_t n = a.size();
    double norm = 0.0;
    for (const auto& row : a)
        for (const auto& v : row) norm = std::max(norm, std::abs(v));
    int s = 0;
    while (norm * static_cast<double>(n) > 0.5) {
        norm /= 2.0;
        ++s;
    }
    const double f = std::ldexp(1.0, -s);
    for (auto& row : a)
        for (auto& v : row) v *= f;
    Dense result(n, std::vector<Complex>(n));
    Dense term(n, std::vector<Complex>(n));
    for (std::size_t i = 0; i < n; ++i) result[i][i] = term[i][i] = 1.0;
    for (int k = 1; k <= terms; ++k) {
        term = matmul(term, a);
        for (auto& row : term)
            for (auto& v : row) v /= static_cast<double>(k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
    }
    for (int k = 0; k < s; ++k) result = matmul(result, result);
    return result;
}

/// Coefficients of lead * prod (y - r_i) expanded in long double, together
/// with the coefficients of |lead| * prod (y + |r_i|). The second set is the
/// size of the terms summed in each coefficient and is the natural scale
/// for judging the expansion of a polynomial whose roots cancel heavily.
struct Reconstruction {
    std::vector<Complex> coeffs;
    std::vector<double> magnitude;
};

inline Reconstruction reconstruct(const std::vector<Complex>& roots, Complex lead) {
    using LC = std::complex<long double>;
    std::vector<LC> c{LC(lead)};
    std::vector<long double> m{std::abs(static_cast<long double>(std::abs(lead)))};
    for (const auto& r : roots) {
        std::vector<LC> nc(c.size() + 1);
        std::vector<long double> nm(c.size() + 1);
        for (std::size_t k = 0; k < c.size(); ++k) {
            nc[k + 1] += c[k];
            nc[k] -= LC(r) * c[k];
            nm[k + 1] += m[k];
            nm[k] += static_cast<long double>(std::abs(r)) * m[k];
        }
        c = std::move(nc);
        m = std::move(nm);
    }
    Reconstruction out;
    for (std::size_t k = 0; k < c.size(); ++k) {
        out.coeffs.emplace_back(static_cast<double>(c[k].real()), static_cast<double>(c[k].imag()));
        out.magnitude.push_back(static_cast<double>(m[k]));
    }
    return out;
}

/// Largest distance after greedily matching each element of `a` to its
/// nearest unused element of `b` (multiset comparison).
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const auto& x : a) {
        std::size_t best = b.size();
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(x - b[j]);
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        used[best] = true;
        worst = std::max(worst, bd);
    }
    return worst;
}

}  // namespace oracle
