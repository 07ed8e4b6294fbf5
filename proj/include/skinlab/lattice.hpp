#pragma once

#include "skinlab/linalg/matrix.hpp"
#include "skinlab/linalg/state_vector.hpp"

#include <cstddef>

namespace skinlab::lattice {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::StateVector;

/// Scalar knobs of the chain. Sites are numbered 1..N in every public
/// function that takes a site or mode index.
struct LatticeParams {
    std::size_t N = 2;
    double kappa = 1.0;
    double h = 0.0;
    double epsilon = 0.0;
    std::size_t L = 1;

    /// Throws ValidationError naming the offending field.
    void validate() const;
    double alpha() const noexcept;  // exp(-h)
};

struct EigenPair {
    std::size_t index = 0;
    Complex energy;
    StateVector right{0};
    StateVector left{0};
};

/// Open chain with nearest-neighbour hopping kappa.
ComplexMatrix build_h0_chain(const LatticeParams& params);

/// diag(exp(-h n)), n = 1..N.
ComplexMatrix gauge_matrix(std::size_t N, double h);

/// X H0 X^-1 evaluated entry by entry: (H0)_{nm} exp(h (m - n)).
ComplexMatrix gauge_similar(const ComplexMatrix& h0, double h);

/// Corner coupling between sites 1 and N. Requires N >= 3.
ComplexMatrix build_perturbation_ring(std::size_t N);

/// gauge_similar(H0, h) + epsilon * ring. Requires N >= 3.
ComplexMatrix build_h2(const LatticeParams& params);

/// X^-1 P X evaluated entry by entry: P_{nm} exp(h (n - m)).
ComplexMatrix conjugated_perturbation(const ComplexMatrix& p, double h);

/// Leading large-h part of exp(-hL) H1: the H0 entries on the L-th superdiagonal.
ComplexMatrix leading_order_matrix(const LatticeParams& params);

/// Closed-form mode n of the asymmetric chain, E_n = 2 kappa cos(pi n / (N + 1)).
/// right_l = sqrt(2/(N+1)) sin(n l pi/(N+1)) exp(-l h); left carries exp(+l h).
EigenPair chain_eigenpair(const LatticeParams& params, std::size_t n);

/// ln of the eigenvector condition ratio of mode n; stays finite where the
/// ratio itself overflows.
double log_petermann_ratio(const LatticeParams& params, std::size_t n);
double petermann_ratio(const LatticeParams& params, std::size_t n);

}  // namespace skinlab::lattice
