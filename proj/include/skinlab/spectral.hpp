#pragma once

#include "skinlab/lattice.hpp"
#include "skinlab/linalg/polynomial.hpp"

#include <string>
#include <utility>
#include <vector>

namespace skinlab::spectral {

using lattice::LatticeParams;
using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::PolynomialCoeffs;

enum class SpectrumSource { numeric_eigensolver, polynomial, closed_form, perturbative };
const char* to_string(SpectrumSource s);

struct Reality {
    bool all_real = true;
    std::size_t real_count = 0;
    std::size_t pair_count = 0;  // non-real conjugate pairs
};

struct Spectrum {
    std::vector<Complex> energies;  // sorted by (Re, Im)
    SpectrumSource source = SpectrumSource::numeric_eigensolver;
    Reality reality;
};

struct PolynomialSystem {
    LatticeParams params;
    PolynomialCoeffs coeffs_P;
    PolynomialCoeffs coeffs_Q;
    std::vector<Complex> roots_y;  // 2N roots of Q, empty until solved
    double rho = 1.0;              // exp(-h (N - 1))
};

inline constexpr double kPolynomialRealityTol = 1e-9;
inline constexpr double kDenseRealityTol = 1e-6;
inline constexpr double kCoalescenceGapTol = 1e-3;

/// E_n + eps <u_n|P'|u_n> for each mode of the Hermitian H0, with numerically
/// computed unit u_n. Throws ValidationError when H0 is not Hermitian or has
/// a near-degenerate spectrum.
Spectrum first_order_energies(const ComplexMatrix& h0, const ComplexMatrix& p_conj, double epsilon);

/// E_n + (2 eps/(N+1)) sin^2(n pi/(N+1)) * 2 cosh((N-1) h), evaluated as written.
Complex ring_perturbed_energy_closed_form(const LatticeParams& params, std::size_t n);

/// Closed-form unperturbed spectrum, used where eps = 0.
Spectrum chain_spectrum(const LatticeParams& params);

/// Coefficients of the ring polynomial P(y) (degree 2N + 2) and of Q(y) = P(y)/(y^2 - 1).
/// Roots are left empty. Requires eps > 0.
PolynomialSystem selfinversive_coeffs(const LatticeParams& params);

/// Spectrum of the ring-perturbed chain from the roots of Q, E = kappa (y + 1/y).
/// Accepts N >= 2; the N = 2 case is the deflated quartic.
std::pair<Spectrum, PolynomialSystem> exact_ring_spectrum(const LatticeParams& params);

/// Dense-eigensolver spectrum of build_h2(params).
Spectrum numeric_ring_spectrum(const LatticeParams& params);

/// kappa (sqrt(C^2 + 1) - C), C = cosh((N-1) h), evaluated without forming C
/// when it would overflow. kappa / (2C) is the large-C limit.
double critical_epsilon(const LatticeParams& params);

/// Energies with |Im E| <= tol * kappa_scale count as real; the rest must
/// pair up as complex conjugates, otherwise NumericError.
Reality classify_reality(const std::vector<Complex>& energies, double tol, double kappa_scale = 1.0);
Reality classify_reality(const Spectrum& spec, double tol, double kappa_scale = 1.0);

struct EpEvent {
    double eps_lo = 0.0;  // grid interval bracketing the flip
    double eps_hi = 0.0;
    Complex energy;       // coalescence energy of the leading pair
    std::pair<std::size_t, std::size_t> pair_indices{0, 0};  // 0-based, in the sorted spectrum at eps_lo
    /// Every pair coalescing inside the interval (mirror pairs flip together).
    std::vector<Complex> energies;
    double refined_eps_lo = 0.0;  // narrowed bracket used to locate the energy
    double refined_eps_hi = 0.0;
};

struct BifurcationTrace {
    std::vector<double> epsilon_grid;
    std::vector<Spectrum> loci;
    std::vector<EpEvent> ep_events;
    std::vector<std::string> warnings;
};

/// Exact spectra over an ascending eps grid (>= 3 points) and EP detection.
/// An event is a grid interval across which the number of conjugate pairs
/// grows; the interval is bisected until the coalescing real pairs sit
/// within kCoalescenceGapTol * kappa of each other.
BifurcationTrace trace_bifurcation(const LatticeParams& base, const std::vector<double>& epsilon_grid,
                                   unsigned threads = 1);

}  // namespace skinlab::spectral
