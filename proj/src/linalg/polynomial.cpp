#include "skinlab/linalg/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace skinlab::linalg {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSeedOffset = std::numbers::sqrt2 - 1.0;  // fraction of the seed spacing

struct Evaluation {
    Complex newton;        // p(z) / p'(z)
    double rel_residual;   // |p(z)| / sum |a_k||z|^k
};

// Horner on the ascending coefficients (|z| <= 1) or on the reversed
// polynomial in w = 1/z (|z| > 1), so powers never exceed 1 in magnitude.
Evaluation evaluate(std::span<const Complex> a, Complex z) {
    const std::size_t d = a.size() - 1;
    if (std::abs(z) <= 1.0) {
        Complex p = a[d];
        Complex dp = 0.0;
        double scale = std::abs(a[d]);
        const double az = std::abs(z);
        for (std::size_t k = d; k-- > 0;) {
            dp = dp * z + p;
            p = p * z + a[k];
            scale = scale * az + std::abs(a[k]);
        }
        return {p / dp, std::abs(p) / scale};
    }
    const Complex w = 1.0 / z;
    const double aw = std::abs(w);
    Complex q = a[0];
    Complex dq = 0.0;
    double scale = std::abs(a[0]);
    for (std::size_t k = 1; k <= d; ++k) {
        dq = dq * w + q;
        q = q * w + a[k];
        scale = scale * aw + std::abs(a[k]);
    }
    const Complex den = static_cast<double>(d) * q - w * dq;
    return {z * q / den, std::abs(q) / scale};
}

}  // namespace

PolynomialCoeffs::PolynomialCoeffs(std::vector<Complex> ascending) : coeffs_(std::move(ascending)) {
    if (coeffs_.empty()) throw ValidationError("PolynomialCoeffs: no coefficients");
    for (const auto& c : coeffs_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw ValidationError("PolynomialCoeffs: non-finite coefficient");
    if (coeffs_.back() == Complex{}) throw ValidationError("PolynomialCoeffs: leading coefficient is zero");
}

Complex PolynomialCoeffs::operator()(Complex y) const noexcept {
    Complex p = coeffs_.back();
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) p = p * y + coeffs_[k];
    return p;
}

double PolynomialCoeffs::magnitude_scale(Complex y) const noexcept {
    const double ay = std::abs(y);
    double s = std::abs(coeffs_.back());
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) s = s * ay + std::abs(coeffs_[k]);
    return s;
}

double PolynomialCoeffs::max_coeff() const noexcept {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

std::vector<Complex> polynomial_roots(const PolynomialCoeffs& p) {
    const std::size_t d = p.degree();
    if (d < 1) throw ValidationError("polynomial_roots: degree must be >= 1");
    const auto a = p.coeffs();
    if (d == 1) return {-a[0] / a[1]};

    const double radius = std::max(1.0, std::pow(std::abs(a[0] / a[d]), 1.0 / static_cast<double>(d)));
    std::vector<Complex> z(d);
    const double spacing = 2.0 * std::numbers::pi / static_cast<double>(d);
    for (std::size_t k = 0; k < d; ++k) z[k] = std::polar(radius, spacing * (static_cast<double>(k) + kSeedOffset));

    std::vector<bool> done(d, false);
    for (int it = 0; it < kAberthMaxIterations; ++it) {
        bool all_done = true;
        for (std::size_t i = 0; i < d; ++i) {
            if (done[i]) continue;
            const Evaluation e = evaluate(a, z[i]);
            if (e.rel_residual <= 8.0 * kEps) {
                done[i] = true;
                continue;
            }
            all_done = false;
            Complex repulsion = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                if (j != i) repulsion += 1.0 / (z[i] - z[j]);
            Complex step;
            if (!std::isfinite(std::abs(e.newton))) {
                step = Complex(1e-8, 1e-8) * std::max(1.0, std::abs(z[i]));
            } else {
                const Complex den = 1.0 - e.newton * repulsion;
                step = std::abs(den) == 0.0 ? e.newton : e.newton / den;
            }
            z[i] -= step;
            if (std::abs(step) <= 4.0 * kEps * std::abs(z[i])) done[i] = true;
        }
        if (all_done) break;
    }

    double worst = 0.0;
    for (const auto& r : z) {
        const double rel = std::abs(p(r)) / p.magnitude_scale(r);
        worst = std::max(worst, std::isfinite(rel) ? rel : std::numeric_limits<double>::infinity());
    }
    if (!(worst <= kRootResidualTol)) {
        std::ostringstream msg;
        msg << "polynomial_roots: Aberth iteration did not converge within " << kAberthMaxIterations
            << " sweeps (degree " << d << ", worst relative residual " << worst << ")";
        throw RootFindingError(msg.str(), worst);
    }
    return z;
}

PolynomialCoeffs deflate_root(const PolynomialCoeffs& p, Complex r) {
    const std::size_t d = p.degree();
    if (d < 1) throw ValidationError("deflate_root: constant polynomial has no roots");
    const double rel = std::abs(p(r)) / p.magnitude_scale(r);
    if (!(rel <= kRootResidualTol)) {
        std::ostringstream msg;
        msg << "deflate_root: " << r << " is not a root (relative residual " << rel << ")";
        throw RootFindingError(msg.str(), rel);
    }
    const auto a = p.coeffs();
    std::vector<Complex> q(d);
    q[d - 1] = a[d];
    for (std::size_t k = d - 1; k >= 1; --k) q[k - 1] = a[k] + r * q[k];
    return PolynomialCoeffs(std::move(q));
}

PolynomialCoeffs from_roots(std::span<const Complex> roots, Complex lead) {
    std::vector<Complex> c{lead};
    for (const auto& r : roots) {
        std::vector<Complex> next(c.size() + 1);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = std::move(next);
    }
    return PolynomialCoeffs(std::move(c));
}

}  // namespace skinlab::linalg
