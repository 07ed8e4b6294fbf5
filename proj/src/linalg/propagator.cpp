#include "skinlab/linalg/propagator.hpp"

#include "skinlab/errors.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace skinlab::linalg {
namespace {

// Backward-error thresholds for the [m/m] Pade approximants (double precision).
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

ComplexMatrix scaled_identity(std::size_t n, double v) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = v;
    return m;
}

// U, V such that exp(A) ~ (V - U)^{-1} (V + U), for degrees 3..9.
template <std::size_t M>
void pade_low(const ComplexMatrix& a, const std::array<double, M + 1>& b, ComplexMatrix& u, ComplexMatrix& v) {
    const std::size_t n = a.dim();
    const ComplexMatrix a2 = a * a;
    ComplexMatrix odd = scaled_identity(n, b[1]);
    ComplexMatrix even = scaled_identity(n, b[0]);
    ComplexMatrix power = a2;
    for (std::size_t k = 2; k <= M; k += 2) {
        odd += Complex(b[k + 1]) * power;
        even += Complex(b[k]) * power;
        if (k + 2 <= M) power = power * a2;
    }
    u = a * odd;
    v = std::move(even);
}

void pade13(const ComplexMatrix& a, ComplexMatrix& u, ComplexMatrix& v) {
    constexpr std::array<double, 14> b = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                          1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                          670442572800.0,      33522128640.0,       1323241920.0,
                                          40840800.0,          960960.0,            16380.0,
                                          182.0,               1.0};
    const std::size_t n = a.dim();
    const ComplexMatrix a2 = a * a;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a4 * a2;
    ComplexMatrix inner = Complex(b[13]) * a6 + Complex(b[11]) * a4 + Complex(b[9]) * a2;
    ComplexMatrix odd = a6 * inner;
    odd += Complex(b[7]) * a6 + Complex(b[5]) * a4 + Complex(b[3]) * a2 + scaled_identity(n, b[1]);
    u = a * odd;
    inner = Complex(b[12]) * a6 + Complex(b[10]) * a4 + Complex(b[8]) * a2;
    v = a6 * inner;
    v += Complex(b[6]) * a6 + Complex(b[4]) * a4 + Complex(b[2]) * a2 + scaled_identity(n, b[0]);
}

ComplexMatrix pade_solve(const ComplexMatrix& u, const ComplexMatrix& v) {
    ComplexMatrix num = v + u;
    const LuDecomposition lu(v - u);
    if (lu.singular()) throw NumericError("expm: singular Pade denominator");
    lu.solve_in_place(num);
    return num;
}

}  // namespace

ComplexMatrix expm(const ComplexMatrix& a) {
    if (!a.all_finite()) throw ValidationError("expm: non-finite input");
    const double norm = a.norm_one();
    const std::size_t n = a.dim();
    ComplexMatrix u(n);
    ComplexMatrix v(n);
    if (norm <= kTheta3) {
        pade_low<3>(a, {120.0, 60.0, 12.0, 1.0}, u, v);
        return pade_solve(u, v);
    }
    if (norm <= kTheta5) {
        pade_low<5>(a, {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0}, u, v);
        return pade_solve(u, v);
    }
    if (norm <= kTheta7) {
        pade_low<7>(a, {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0}, u, v);
        return pade_solve(u, v);
    }
    if (norm <= kTheta9) {
        pade_low<9>(a,
                    {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0,
                     3960.0, 90.0, 1.0},
                    u, v);
        return pade_solve(u, v);
    }
    int squarings = 0;
    if (norm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    const ComplexMatrix scaled = Complex(std::ldexp(1.0, -squarings)) * a;
    pade13(scaled, u, v);
    ComplexMatrix r = pade_solve(u, v);
    for (int k = 0; k < squarings; ++k) r = r * r;
    if (!r.all_finite()) throw NumericError("expm: result overflowed");
    return r;
}

Propagator::Propagator(const ComplexMatrix& generator, double dt) : dt_(dt), step_(generator.dim()) {
    if (!std::isfinite(dt)) throw ValidationError("Propagator: dt must be finite");
    const double size = std::abs(dt) * generator.norm_one();
    if (size > kSubstepCap) substeps_ = static_cast<int>(std::ceil(size / kSubstepCap));
    step_ = expm(Complex(0.0, -dt / substeps_) * generator);
}

void Propagator::apply(StateVector& psi) const {
    if (psi.dim() != step_.dim()) throw std::invalid_argument("Propagator: state dimension mismatch");
    std::vector<Complex> next(psi.dim());
    for (int k = 0; k < substeps_; ++k) {
        multiply_into(step_, psi.stored(), next);
        std::copy(next.begin(), next.end(), psi.stored().begin());
        psi.renormalize();
    }
}

ComplexMatrix propagator_matrix(const ComplexMatrix& m, double dt) {
    const Propagator step(m, dt);
    ComplexMatrix out = step.substep_matrix();
    for (int k = 1; k < step.substeps(); ++k) out = step.substep_matrix() * out;
    if (!out.all_finite()) throw NumericError("propagator_matrix: step overflowed, use a shorter dt");
    return out;
}

StateVector propagator_apply(const ComplexMatrix& m, const StateVector& psi, double dt) {
    return Propagator(m, dt)(psi);
}

}  // namespace skinlab::linalg
