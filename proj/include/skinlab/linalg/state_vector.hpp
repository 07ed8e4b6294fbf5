#pragma once

#include "skinlab/linalg/matrix.hpp"

#include <span>
#include <vector>

namespace skinlab::linalg {

/// Lattice wavefunction with an exponent carried separately from the amplitudes.
///
/// physical amplitude = stored amplitude * exp(log_scale). Non-Hermitian
/// evolution amplifies norms exponentially; renormalize() moves the stored
/// norm into log_scale so the stored vector stays O(1).
class StateVector {
public:
    explicit StateVector(std::size_t dim) : amplitudes_(dim) {}
    explicit StateVector(std::vector<Complex> amplitudes, double log_scale = 0.0)
        : amplitudes_(std::move(amplitudes)), log_scale_(log_scale) {}

    static StateVector site(std::size_t dim, std::size_t index0);

    std::size_t dim() const noexcept { return amplitudes_.size(); }
    std::span<Complex> stored() noexcept { return amplitudes_; }
    std::span<const Complex> stored() const noexcept { return amplitudes_; }
    Complex& operator[](std::size_t i) noexcept { return amplitudes_[i]; }
    const Complex& operator[](std::size_t i) const noexcept { return amplitudes_[i]; }

    double log_scale() const noexcept { return log_scale_; }
    void set_log_scale(double s) noexcept { log_scale_ = s; }

    double stored_norm() const noexcept;
    /// ln of the physical Euclidean norm; -inf for the zero vector.
    double log_norm() const noexcept;
    /// Physical amplitudes; overflows to inf when log_scale is huge.
    std::vector<Complex> physical() const;

    /// Scale stored amplitudes to unit norm, absorbing the factor into log_scale.
    /// The zero vector is left untouched.
    void renormalize() noexcept;
    /// Renormalize only when the stored norm leaves [1/2, 2].
    void keep_bounded() noexcept;

private:
    std::vector<Complex> amplitudes_;
    double log_scale_ = 0.0;
};

/// <a|b> of the stored amplitudes (physical value = result * exp(a.log_scale + b.log_scale)).
Complex stored_inner(const StateVector& a, const StateVector& b);

/// |<a|b>|^2 / (<a|a><b|b>); invariant under the log_scale of either vector.
double normalized_overlap(const StateVector& a, const StateVector& b);

}  // namespace skinlab::linalg
