#pragma once

#include "skinlab/lattice.hpp"
#include "skinlab/linalg/matrix.hpp"
#include "skinlab/linalg/state_vector.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace skinlab::dynamics {

using lattice::LatticeParams;
using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::StateVector;

/// Upper limit on the time step, in units of 1/kappa.
inline constexpr double kMaxTimeStep = 0.05;

struct InitialState {
    enum class Kind { eigenstate, site, custom };

    Kind kind = Kind::site;
    std::size_t index = 1;  // mode n or site l, 1-based
    std::optional<StateVector> amplitudes;

    static InitialState eigenstate(std::size_t n);
    static InitialState site(std::size_t l);
    static InitialState custom(StateVector psi);

    /// Unit-norm amplitudes. Eigenstates are the closed-form right vectors of
    /// the unperturbed asymmetric chain for `params`.
    StateVector resolve(const LatticeParams& params) const;
    std::string describe() const;
};

struct TimeGrid {
    double t_max = 40.0;
    double dt = 0.01;
    std::size_t stride = 10;  // output every `stride` steps

    /// 0 < dt <= t_max, dt <= kMaxTimeStep / kappa, t_max a whole number of steps.
    void validate(double kappa = 1.0) const;
    std::size_t steps() const;
    /// Step indices that are sampled: 0, stride, 2 stride, ... and the last step.
    std::vector<std::size_t> sample_steps() const;
};

struct TimeTrace {
    std::string observable;
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> log_norm_1;
    std::vector<double> log_norm_2;

    std::size_t size() const noexcept { return times.size(); }
};

/// Mean of a trace over [t_lo, t_hi] (trapezoid rule on the samples inside).
double time_average(const TimeTrace& trace, double t_lo, double t_hi);

/// States at the sample times of `grid` under exp(-i H t).
std::vector<StateVector> evolve(const ComplexMatrix& h, const StateVector& psi0, const TimeGrid& grid);

/// F(t) = |<psi2|psi1>|^2 / (<psi1|psi1><psi2|psi2>); log_norm_1/2 are ln|psi1|, ln|psi2|.
TimeTrace fidelity_trace(const ComplexMatrix& h1, const ComplexMatrix& h2, const StateVector& psi0,
                         const TimeGrid& grid);

struct DeltaPsiSample {
    StateVector delta;
    StateVector psi1;
};

/// Solves i d(dpsi)/dt = G dpsi + eps P psi1 with dpsi(0) = 0, where G is
/// H1 + eps P (full) or H1 (early-stage form), alongside i d(psi1)/dt = H1 psi1.
/// The pair is integrated as one linear system with the block generator
/// [[G, eps P], [0, H1]], so the source term carries no splitting error.
std::vector<DeltaPsiSample> evolve_delta_psi(const ComplexMatrix& h1, const ComplexMatrix& p, double epsilon,
                                             const StateVector& psi0, const TimeGrid& grid, bool full);

struct DeltaPsiTraces {
    TimeTrace delta_norm;  // <dpsi|dpsi>, log_norm_1 = ln|dpsi|, log_norm_2 = ln|psi1|
    TimeTrace psi1_norm;   // <psi1|psi1>, log_norm_1 = ln|psi1|
};

DeltaPsiTraces delta_psi_trace(const ComplexMatrix& h1, const ComplexMatrix& p, double epsilon,
                               const StateVector& psi0, const TimeGrid& grid, bool full);

/// 1 - <d|d>/<p|p> + |<d|p>|^2/<p|p>^2, with log_scale offsets applied.
double fidelity_second_order(const StateVector& delta, const StateVector& psi1);

/// M(t) for psi_f = exp(i H2 t) exp(-i H1 t) psi0; log_norm_1 = ln|psi1(t)|, log_norm_2 = ln|psi_f|.
TimeTrace loschmidt_hamiltonian_echo(const ComplexMatrix& h1, const ComplexMatrix& h2, const StateVector& psi0,
                                     const TimeGrid& grid);

struct PhaseProfile {
    std::vector<double> phases;
};

/// psi_n exp(i phi_n).
StateVector phase_slip(const StateVector& psi, const PhaseProfile& profile);

/// All phases pi except phi_{n0} = defect_phase (pi/2 by default).
PhaseProfile defect_profile(std::size_t N, std::size_t n0);
PhaseProfile defect_profile(std::size_t N, std::size_t n0, double defect_phase);

/// M(t) for psi_f = exp(-i H1 t) Pslip S exp(-i H1 t) psi0, with S = diag((-1)^n)
/// the sublattice sign. For a nearest-neighbour chain S H1 S = -H1, so an
/// all-pi profile gives psi_f = -S psi0: perfect reversal. H1 must have zero
/// diagonal and nearest-neighbour hopping only.
TimeTrace loschmidt_phase_echo(const ComplexMatrix& h1, const PhaseProfile& profile, const StateVector& psi0,
                               const TimeGrid& grid);

struct Transport {
    double v_g = 0.0;  // 2 kappa cosh(h)
    double t1 = 0.0;   // N / v_g
};

Transport transport_diagnostics(const LatticeParams& params);

/// Speed of the farthest site whose share of the probability exceeds
/// `threshold`, fitted as d(t) = v t + c t^(1/3) + b over the ballistic
/// window (stops when the front comes within 5 sites of an edge).
double measure_front_speed(const ComplexMatrix& h1, const StateVector& psi0, const TimeGrid& grid, double threshold);

}  // namespace skinlab::dynamics
