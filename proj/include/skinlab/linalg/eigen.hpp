#pragma once

#include "skinlab/errors.hpp"
#include "skinlab/linalg/matrix.hpp"

#include <optional>
#include <vector>

namespace skinlab::linalg {

struct EigenDecomposition {
    /// Sorted lexicographically by (Re, Im), repeated according to algebraic multiplicity.
    std::vector<Complex> values;
    /// Unit-norm right eigenvectors, vectors[k] belongs to values[k]. Empty unless requested.
    std::vector<std::vector<Complex>> vectors;
};

/// Thrown when the QR iteration exceeds its sweep cap. Carries whatever
/// eigenvalues had already deflated.
class EigenConvergenceError : public NumericError {
public:
    EigenConvergenceError(const std::string& what, std::vector<Complex> partial)
        : NumericError(what), partial_(std::move(partial)) {}
    const std::vector<Complex>& partial() const noexcept { return partial_; }

private:
    std::vector<Complex> partial_;
};

/// General dense eigensolver for non-Hermitian complex matrices.
///
/// Balancing, Householder reduction to Hessenberg form, then single-shift
/// QR with Wilkinson shifts (exceptional shifts every 10 sweeps). Right
/// eigenvectors come from inverse iteration on the Hessenberg matrix.
/// Total sweep cap is 100 * dim.
EigenDecomposition eigenvalues(const ComplexMatrix& m, bool with_vectors = false);

}  // namespace skinlab::linalg
