#pragma once

#include "skinlab/linalg/matrix.hpp"
#include "skinlab/linalg/state_vector.hpp"

namespace skinlab::linalg {

/// exp(A) by scaling and squaring with diagonal Pade approximants
/// (degrees 3, 5, 7, 9, 13 chosen from the 1-norm; degree 13 with
/// 2^-s scaling above the largest threshold).
ComplexMatrix expm(const ComplexMatrix& a);

/// Fixed-step evolution operator exp(-i * generator * dt).
///
/// The exponential is computed once. When |dt| * ||generator||_1 exceeds
/// kSubstepCap the step is split into equal substeps, each applied with a
/// renormalization, so apply() never overflows for long non-Hermitian runs.
class Propagator {
public:
    static constexpr double kSubstepCap = 5.371920351148152;

    Propagator(const ComplexMatrix& generator, double dt);

    double dt() const noexcept { return dt_; }
    int substeps() const noexcept { return substeps_; }
    std::size_t dim() const noexcept { return step_.dim(); }
    /// exp(-i * generator * dt / substeps)
    const ComplexMatrix& substep_matrix() const noexcept { return step_; }

    void apply(StateVector& psi) const;
    StateVector operator()(StateVector psi) const {
        apply(psi);
        return psi;
    }

private:
    double dt_;
    int substeps_ = 1;
    ComplexMatrix step_;
};

/// exp(-i M dt) as a matrix, built from the same substeps as Propagator.
/// No renormalization, so the caller keeps |dt| modest for amplifying M.
ComplexMatrix propagator_matrix(const ComplexMatrix& m, double dt);

/// exp(-i M dt) psi with log_scale tracking. dt may be negative.
StateVector propagator_apply(const ComplexMatrix& m, const StateVector& psi, double dt);

}  // namespace skinlab::linalg
