#include "skinlab/linalg/state_vector.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace skinlab::linalg {

StateVector StateVector::site(std::size_t dim, std::size_t index0) {
    if (index0 >= dim) throw std::out_of_range("StateVector::site: index out of range");
    StateVector s(dim);
    s.amplitudes_[index0] = 1.0;
    return s;
}

double StateVector::stored_norm() const noexcept {
    // Scaled accumulation so huge or tiny stored entries do not over/underflow.
    double scale = 0.0;
    for (const auto& a : amplitudes_) scale = std::max(scale, std::max(std::abs(a.real()), std::abs(a.imag())));
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (const auto& a : amplitudes_) s += std::norm(a / scale);
    return scale * std::sqrt(s);
}

double StateVector::log_norm() const noexcept {
    const double n = stored_norm();
    if (n == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(n) + log_scale_;
}

std::vector<Complex> StateVector::physical() const {
    const double f = std::exp(log_scale_);
    std::vector<Complex> out(amplitudes_);
    for (auto& a : out) a *= f;
    return out;
}

void StateVector::renormalize() noexcept {
    const double n = stored_norm();
    if (n == 0.0 || !std::isfinite(n)) return;
    for (auto& a : amplitudes_) a /= n;
    log_scale_ += std::log(n);
}

void StateVector::keep_bounded() noexcept {
    const double n = stored_norm();
    if (n < 0.5 || n > 2.0) renormalize();
}

Complex stored_inner(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("inner product: dimension mismatch");
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double normalized_overlap(const StateVector& a, const StateVector& b) {
    const double na = a.stored_norm();
    const double nb = b.stored_norm();
    if (na == 0.0 || nb == 0.0) throw std::domain_error("normalized_overlap: zero vector");
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i] / na) * (b[i] / nb);
    return std::norm(s);
}

}  // namespace skinlab::linalg
