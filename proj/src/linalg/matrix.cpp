#include "skinlab/linalg/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace skinlab::linalg {

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
    if (dim < 2) throw std::invalid_argument("ComplexMatrix: dim must be >= 2, got " + std::to_string(dim));
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), data_(std::move(entries)) {
    if (dim < 2) throw std::invalid_argument("ComplexMatrix: dim must be >= 2, got " + std::to_string(dim));
    if (data_.size() != dim * dim) throw std::invalid_argument("ComplexMatrix: entry count does not match dim*dim");
    if (!all_finite()) throw std::invalid_argument("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
    ComplexMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
}

Complex ComplexMatrix::trace() const noexcept {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::norm_one() const noexcept {
    double best = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double ComplexMatrix::norm_inf() const noexcept {
    double best = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (const auto& v : row(i)) s += std::abs(v);
        best = std::max(best, s);
    }
    return best;
}

double ComplexMatrix::norm_frobenius() const noexcept {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const noexcept {
    double best = 0.0;
    for (const auto& v : data_) best = std::max(best, std::abs(v));
    return best;
}

bool ComplexMatrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (other.dim_ != dim_) throw std::invalid_argument("ComplexMatrix: dimension mismatch in +=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (other.dim_ != dim_) throw std::invalid_argument("ComplexMatrix: dimension mismatch in -=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) noexcept {
    for (auto& v : data_) v *= scale;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator*(Complex scale, ComplexMatrix m) { return m *= scale; }

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    const std::size_t n = lhs.dim();
    if (rhs.dim() != n) throw std::invalid_argument("ComplexMatrix: dimension mismatch in product");
    ComplexMatrix out(n);
    // i-k-j order keeps the inner loop contiguous in both rhs and out.
    for (std::size_t i = 0; i < n; ++i) {
        auto out_row = out.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            const Complex a = lhs(i, k);
            if (a == Complex{}) continue;
            auto r = rhs.row(k);
            for (std::size_t j = 0; j < n; ++j) out_row[j] += a * r[j];
        }
    }
    return out;
}

void multiply_into(const ComplexMatrix& m, std::span<const Complex> x, std::span<Complex> y) {
    const std::size_t n = m.dim();
    if (x.size() != n || y.size() != n) throw std::invalid_argument("multiply: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        Complex s = 0.0;
        auto r = m.row(i);
        for (std::size_t j = 0; j < n; ++j) s += r[j] * x[j];
        y[i] = s;
    }
}

std::vector<Complex> multiply(const ComplexMatrix& m, std::span<const Complex> x) {
    std::vector<Complex> y(m.dim());
    multiply_into(m, x, y);
    return y;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("max_abs_diff: dimension mismatch");
    double best = 0.0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t k = 0; k < ea.size(); ++k) best = std::max(best, std::abs(ea[k] - eb[k]));
    return best;
}

LuDecomposition::LuDecomposition(const ComplexMatrix& m) : lu_(m), pivots_(m.dim()) {
    const std::size_t n = m.dim();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        pivots_[k] = p;
        if (best == 0.0) {
            singular_ = true;
            continue;
        }
        if (p != k) {
            std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(p).begin());
            sign_ = -sign_;
        }
        const Complex pivot = lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex f = lu_(i, k) / pivot;
            lu_(i, k) = f;
            if (f == Complex{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

Complex LuDecomposition::determinant() const noexcept {
    if (singular_) return 0.0;
    Complex d = static_cast<double>(sign_);
    for (std::size_t i = 0; i < lu_.dim(); ++i) d *= lu_(i, i);
    return d;
}

void LuDecomposition::solve_in_place(ComplexMatrix& rhs) const {
    const std::size_t n = lu_.dim();
    if (rhs.dim() != n) throw std::invalid_argument("LU solve: dimension mismatch");
    if (singular_) throw std::runtime_error("LU solve: matrix is singular");
    for (std::size_t k = 0; k < n; ++k)
        if (pivots_[k] != k) std::swap_ranges(rhs.row(k).begin(), rhs.row(k).end(), rhs.row(pivots_[k]).begin());
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t k = 0; k < i; ++k) {
            const Complex f = lu_(i, k);
            if (f == Complex{}) continue;
            auto ri = rhs.row(i);
            auto rk = rhs.row(k);
            for (std::size_t j = 0; j < n; ++j) ri[j] -= f * rk[j];
        }
    for (std::size_t ii = n; ii-- > 0;) {
        auto ri = rhs.row(ii);
        for (std::size_t k = ii + 1; k < n; ++k) {
            const Complex f = lu_(ii, k);
            if (f == Complex{}) continue;
            auto rk = rhs.row(k);
            for (std::size_t j = 0; j < n; ++j) ri[j] -= f * rk[j];
        }
        const Complex d = lu_(ii, ii);
        for (auto& v : ri) v /= d;
    }
}

std::vector<Complex> LuDecomposition::solve(std::span<const Complex> rhs) const {
    const std::size_t n = lu_.dim();
    if (rhs.size() != n) throw std::invalid_argument("LU solve: dimension mismatch");
    if (singular_) throw std::runtime_error("LU solve: matrix is singular");
    std::vector<Complex> x(rhs.begin(), rhs.end());
    for (std::size_t k = 0; k < n; ++k)
        if (pivots_[k] != k) std::swap(x[k], x[pivots_[k]]);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t k = 0; k < i; ++k) x[i] -= lu_(i, k) * x[k];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) x[i] -= lu_(i, k) * x[k];
        x[i] /= lu_(i, i);
    }
    return x;
}

}  // namespace skinlab::linalg
