#include "skinlab/linalg/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace skinlab::linalg {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double cabs1(const Complex& z) noexcept { return std::abs(z.real()) + std::abs(z.imag()); }

// Diagonal similarity D^{-1} M D with power-of-two factors (EISPACK balanc,
// scaling only). Returns the factors.
std::vector<double> balance(ComplexMatrix& m) {
    const std::size_t n = m.dim();
    std::vector<double> d(n, 1.0);
    constexpr double radix = 2.0;
    constexpr double radix2 = radix * radix;
    bool again = true;
    int rounds = 0;
    while (again && rounds++ < 200) {
        again = false;
        for (std::size_t i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += cabs1(m(j, i));
                r += cabs1(m(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix2;
            }
            g = r * radix;
            while (c >= g) {
                f /= radix;
                c /= radix2;
            }
            if ((c + r) / f < 0.95 * s) {
                again = true;
                d[i] *= f;
                for (std::size_t j = 0; j < n; ++j) m(i, j) /= f;
                for (std::size_t j = 0; j < n; ++j) m(j, i) *= f;
            }
        }
    }
    return d;
}

struct Reflector {
    std::size_t start;
    std::vector<Complex> v;  // unit vector, acts on indices start..n-1
};

// I - 2 v v^H applied from the left to rows start.., columns col0..
void reflect_rows(ComplexMatrix& m, const Reflector& h, std::size_t col0) {
    const std::size_t n = m.dim();
    for (std::size_t j = col0; j < n; ++j) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < h.v.size(); ++k) s += std::conj(h.v[k]) * m(h.start + k, j);
        s *= 2.0;
        for (std::size_t k = 0; k < h.v.size(); ++k) m(h.start + k, j) -= h.v[k] * s;
    }
}

void reflect_cols(ComplexMatrix& m, const Reflector& h) {
    const std::size_t n = m.dim();
    for (std::size_t i = 0; i < n; ++i) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < h.v.size(); ++k) s += m(i, h.start + k) * h.v[k];
        s *= 2.0;
        for (std::size_t k = 0; k < h.v.size(); ++k) m(i, h.start + k) -= s * std::conj(h.v[k]);
    }
}

std::vector<Reflector> reduce_to_hessenberg(ComplexMatrix& m) {
    const std::size_t n = m.dim();
    std::vector<Reflector> hs;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(m(i, k));
        xnorm = std::sqrt(xnorm);
        double tail = 0.0;
        for (std::size_t i = k + 2; i < n; ++i) tail += std::norm(m(i, k));
        if (tail == 0.0) continue;
        const Complex x0 = m(k + 1, k);
        const Complex phase = std::abs(x0) == 0.0 ? Complex(1.0) : x0 / std::abs(x0);
        const Complex alpha = -phase * xnorm;
        Reflector h{k + 1, std::vector<Complex>(n - k - 1)};
        for (std::size_t i = k + 1; i < n; ++i) h.v[i - k - 1] = m(i, k);
        h.v[0] -= alpha;
        double vn = 0.0;
        for (const auto& v : h.v) vn += std::norm(v);
        vn = std::sqrt(vn);
        for (auto& v : h.v) v /= vn;
        reflect_rows(m, h, k);
        reflect_cols(m, h);
        m(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) m(i, k) = 0.0;
        hs.push_back(std::move(h));
    }
    return hs;
}

// Eigenvalue of the trailing 2x2 block closest to its (1,1) corner.
Complex wilkinson_shift(const Complex& a, const Complex& b, const Complex& c, const Complex& d) {
    const Complex x = 0.5 * (a - d);
    const Complex disc = std::sqrt(x * x + b * c);
    const Complex den = std::abs(x + disc) >= std::abs(x - disc) ? x + disc : x - disc;
    if (std::abs(den) == 0.0) return d;
    return d - b * c / den;
}

std::vector<Complex> hessenberg_qr(ComplexMatrix h, double hnorm) {
    const std::size_t n = h.dim();
    std::vector<Complex> eig(n);
    std::vector<bool> done(n, false);
    const std::size_t cap = 100 * n;
    std::size_t sweeps = 0;
    int its = 0;
    std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
    std::vector<std::pair<double, Complex>> rot(n);

    while (hi >= 0) {
        std::ptrdiff_t l = hi;
        for (; l > 0; --l) {
            double s = cabs1(h(l - 1, l - 1)) + cabs1(h(l, l));
            if (s == 0.0) s = hnorm;
            if (cabs1(h(l, l - 1)) <= kEps * s) {
                h(l, l - 1) = 0.0;
                break;
            }
        }
        if (l == hi) {
            eig[hi] = h(hi, hi);
            done[hi] = true;
            --hi;
            its = 0;
            continue;
        }
        if (++sweeps > cap) {
            std::vector<Complex> partial;
            for (std::size_t i = 0; i < n; ++i)
                if (done[i]) partial.push_back(eig[i]);
            throw EigenConvergenceError("eigenvalues: QR iteration did not converge after " +
                                            std::to_string(cap) + " sweeps",
                                        std::move(partial));
        }
        ++its;
        Complex mu;
        if (its % 10 == 0) {
            mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1).real());
        } else {
            mu = wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
        }

        for (std::ptrdiff_t k = l; k <= hi; ++k) h(k, k) -= mu;
        for (std::ptrdiff_t k = l; k < hi; ++k) {
            const Complex a = h(k, k);
            const Complex b = h(k + 1, k);
            const double r = std::hypot(std::abs(a), std::abs(b));
            double c;
            Complex s;
            if (r == 0.0) {
                c = 1.0;
                s = 0.0;
            } else if (std::abs(a) == 0.0) {
                c = 0.0;
                s = std::conj(b) / std::abs(b);
            } else {
                c = std::abs(a) / r;
                s = (a / std::abs(a)) * std::conj(b) / r;
            }
            rot[k] = {c, s};
            for (std::ptrdiff_t j = k; j <= hi; ++j) {
                const Complex t1 = h(k, j);
                const Complex t2 = h(k + 1, j);
                h(k, j) = c * t1 + s * t2;
                h(k + 1, j) = -std::conj(s) * t1 + c * t2;
            }
        }
        for (std::ptrdiff_t k = l; k < hi; ++k) {
            const auto [c, s] = rot[k];
            const std::ptrdiff_t last = std::min(k + 1, hi);
            for (std::ptrdiff_t i = l; i <= last; ++i) {
                const Complex t1 = h(i, k);
                const Complex t2 = h(i, k + 1);
                h(i, k) = c * t1 + std::conj(s) * t2;
                h(i, k + 1) = -s * t1 + c * t2;
            }
        }
        for (std::ptrdiff_t k = l; k <= hi; ++k) h(k, k) += mu;
    }
    return eig;
}

std::vector<Complex> inverse_iteration(const ComplexMatrix& hess, Complex lambda, double hnorm) {
    const std::size_t n = hess.dim();
    double delta = std::max(hnorm, 1e-300) * 1e-10;
    for (int attempt = 0; attempt < 8; ++attempt, delta *= 100.0) {
        ComplexMatrix shifted = hess;
        const Complex sigma = lambda + Complex(delta, 0.5 * delta);
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= sigma;
        LuDecomposition lu(shifted);
        if (lu.singular()) continue;
        std::vector<Complex> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = Complex(1.0, 0.1 * static_cast<double>(i % 7));
        bool ok = true;
        for (int it = 0; it < 3 && ok; ++it) {
            x = lu.solve(x);
            double nrm = 0.0;
            for (const auto& v : x) nrm += std::norm(v);
            nrm = std::sqrt(nrm);
            if (!(nrm > 0.0) || !std::isfinite(nrm)) {
                ok = false;
                break;
            }
            for (auto& v : x) v /= nrm;
        }
        if (ok) return x;
    }
    throw NumericError("eigenvalues: inverse iteration failed to produce an eigenvector");
}

}  // namespace

EigenDecomposition eigenvalues(const ComplexMatrix& m, bool with_vectors) {
    if (!m.all_finite()) throw ValidationError("eigenvalues: matrix has non-finite entries");
    const std::size_t n = m.dim();
    ComplexMatrix work = m;
    const std::vector<double> scale = balance(work);
    const auto reflectors = reduce_to_hessenberg(work);
    const double hnorm = work.norm_frobenius();

    std::vector<Complex> values = hessenberg_qr(work, hnorm);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return complex_less(values[a], values[b]); });

    EigenDecomposition out;
    out.values.reserve(n);
    for (auto k : order) out.values.push_back(values[k]);

    if (with_vectors) {
        out.vectors.reserve(n);
        for (const Complex& lambda : out.values) {
            std::vector<Complex> x = inverse_iteration(work, lambda, hnorm);
            for (auto it = reflectors.rbegin(); it != reflectors.rend(); ++it) {
                Complex s = 0.0;
                for (std::size_t k = 0; k < it->v.size(); ++k) s += std::conj(it->v[k]) * x[it->start + k];
                s *= 2.0;
                for (std::size_t k = 0; k < it->v.size(); ++k) x[it->start + k] -= it->v[k] * s;
            }
            double nrm = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] *= scale[i];
                nrm += std::norm(x[i]);
            }
            nrm = std::sqrt(nrm);
            for (auto& v : x) v /= nrm;
            out.vectors.push_back(std::move(x));
        }
    }
    return out;
}

}  // namespace skinlab::linalg
