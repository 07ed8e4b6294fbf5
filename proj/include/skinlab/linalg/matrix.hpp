#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace skinlab::linalg {

using Complex = std::complex<double>;

/// Dense square complex matrix, row-major.
///
/// Every Hamiltonian, gauge transform and propagator in the library is a
/// ComplexMatrix. Construction rejects dim < 2 and non-finite entries.
class ComplexMatrix {
public:
    explicit ComplexMatrix(std::size_t dim);
    ComplexMatrix(std::size_t dim, std::vector<Complex> entries);

    static ComplexMatrix zeros(std::size_t dim) { return ComplexMatrix(dim); }
    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diagonal(std::span<const Complex> diag);

    std::size_t dim() const noexcept { return dim_; }

    Complex& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * dim_ + col]; }
    const Complex& operator()(std::size_t row, std::size_t col) const noexcept {
        return data_[row * dim_ + col];
    }

    std::span<Complex> row(std::size_t r) noexcept { return {data_.data() + r * dim_, dim_}; }
    std::span<const Complex> row(std::size_t r) const noexcept { return {data_.data() + r * dim_, dim_}; }
    std::span<const Complex> entries() const noexcept { return data_; }

    ComplexMatrix adjoint() const;
    Complex trace() const noexcept;

    double norm_one() const noexcept;        // max column sum
    double norm_inf() const noexcept;        // max row sum
    double norm_frobenius() const noexcept;
    double max_abs() const noexcept;
    bool all_finite() const noexcept;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scale) noexcept;

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t dim_;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex scale, ComplexMatrix m);
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

/// y = M x
std::vector<Complex> multiply(const ComplexMatrix& m, std::span<const Complex> x);
void multiply_into(const ComplexMatrix& m, std::span<const Complex> x, std::span<Complex> y);

/// Largest |a_ij - b_ij|.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// LU factorization with partial pivoting, used for the Pade solve and for
/// determinants.
class LuDecomposition {
public:
    explicit LuDecomposition(const ComplexMatrix& m);

    bool singular() const noexcept { return singular_; }
    Complex determinant() const noexcept;
    /// Solves M X = B in place (B overwritten by X).
    void solve_in_place(ComplexMatrix& rhs) const;
    std::vector<Complex> solve(std::span<const Complex> rhs) const;

private:
    ComplexMatrix lu_;
    std::vector<std::size_t> pivots_;
    int sign_ = 1;
    bool singular_ = false;
};

// Lexicographic (Re, Im) ordering used for every sorted spectrum.
inline bool complex_less(const Complex& a, const Complex& b) noexcept {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

}  // namespace skinlab::linalg
