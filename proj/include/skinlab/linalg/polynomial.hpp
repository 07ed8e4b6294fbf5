#pragma once

#include "skinlab/errors.hpp"
#include "skinlab/linalg/matrix.hpp"

#include <span>
#include <vector>

namespace skinlab::linalg {

/// Polynomial sum_k a_k y^k, coefficients stored in ascending power order.
/// The leading coefficient is nonzero.
class PolynomialCoeffs {
public:
    explicit PolynomialCoeffs(std::vector<Complex> ascending);

    std::size_t degree() const noexcept { return coeffs_.size() - 1; }
    std::span<const Complex> coeffs() const noexcept { return coeffs_; }
    const Complex& operator[](std::size_t k) const noexcept { return coeffs_[k]; }
    const Complex& leading() const noexcept { return coeffs_.back(); }

    Complex operator()(Complex y) const noexcept;
    /// sum_k |a_k| |y|^k, the magnitude scale against which residuals are judged.
    double magnitude_scale(Complex y) const noexcept;
    double max_coeff() const noexcept;

    friend bool operator==(const PolynomialCoeffs&, const PolynomialCoeffs&) = default;

private:
    std::vector<Complex> coeffs_;
};

/// Relative residual threshold used by polynomial_roots and deflate_root.
inline constexpr double kRootResidualTol = 1e-10;
inline constexpr int kAberthMaxIterations = 200;

class RootFindingError : public NumericError {
public:
    RootFindingError(const std::string& what, double worst_residual)
        : NumericError(what), worst_residual_(worst_residual) {}
    double worst_residual() const noexcept { return worst_residual_; }

private:
    double worst_residual_;
};

/// All roots of p by Aberth-Ehrlich simultaneous iteration.
///
/// Seeds sit on the circle |y| = max(1, |a0/a_d|^(1/d)) with an irrational
/// angular offset. Every returned root satisfies
/// |p(r)| <= kRootResidualTol * magnitude_scale(r); otherwise throws
/// RootFindingError with the worst residual.
std::vector<Complex> polynomial_roots(const PolynomialCoeffs& p);

/// Quotient q with p(y) = (y - r) q(y), by synthetic division. Throws
/// RootFindingError when r is not a root within kRootResidualTol.
PolynomialCoeffs deflate_root(const PolynomialCoeffs& p, Complex r);

/// Coefficients of lead * prod (y - r_i).
PolynomialCoeffs from_roots(std::span<const Complex> roots, Complex lead = 1.0);

}  // namespace skinlab::linalg
