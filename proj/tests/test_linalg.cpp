#include <doctest.h>

#include "oracles.hpp"
#include "skinlab/linalg/eigen.hpp"
#include "skinlab/linalg/matrix.hpp"
#include "skinlab/linalg/polynomial.hpp"
#include "skinlab/linalg/propagator.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace skinlab::linalg;
using skinlab::ValidationError;

namespace {

ComplexMatrix from_dense(const oracle::Dense& d) {
    ComplexMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j) m(i, j) = d[i][j];
    return m;
}

// Asymmetric-hopping chain written out by hand (independent of the lattice module).
ComplexMatrix hopping_chain(std::size_t n, double kappa, double h) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        m(i, i + 1) = kappa * std::exp(h);
        m(i + 1, i) = kappa * std::exp(-h);
    }
    return m;
}

double relative_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("matrix") {
    TEST_CASE("construction rejects bad input") {
        CHECK_THROWS_AS(ComplexMatrix(1), std::invalid_argument);
        CHECK_THROWS_AS(ComplexMatrix(2, {1.0, 2.0, 3.0}), std::invalid_argument);
        CHECK_THROWS_AS(ComplexMatrix(2, {1.0, 2.0, 3.0, std::nan("")}), std::invalid_argument);
    }

    TEST_CASE("LU determinant matches elimination oracle") {
        std::mt19937_64 rng(7);
        const auto d = oracle::random_dense(8, rng);
        const Complex expected = oracle::determinant(d);
        const Complex got = LuDecomposition(from_dense(d)).determinant();
        CHECK(std::abs(got - expected) <= 1e-10 * std::abs(expected));
    }
}

TEST_SUITE("eigenvalues") {
    TEST_CASE("2x2 asymmetric hopping is isospectral to the symmetric pair") {
        for (double h : {0.0, 0.5, 2.0}) {
            const auto r = eigenvalues(hopping_chain(2, 1.5, h));
            REQUIRE(r.values.size() == 2);
            CHECK(std::abs(r.values[0] - Complex(-1.5)) < 1e-12);
            CHECK(std::abs(r.values[1] - Complex(1.5)) < 1e-12);
        }
    }

    TEST_CASE("4-site open chain") {
        const auto r = eigenvalues(hopping_chain(4, 1.0, 0.0), true);
        const double c1 = 2.0 * std::cos(std::numbers::pi / 5.0);
        const double c2 = 2.0 * std::cos(2.0 * std::numbers::pi / 5.0);
        const std::vector<Complex> expected{-c1, -c2, c2, c1};
        for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(r.values[k] - expected[k]) < 1e-12);
        // Cross-check against the explicit characteristic polynomial lambda^4 - 3 lambda^2 + 1.
        for (const auto& v : r.values) CHECK(std::abs(std::pow(v, 4) - 3.0 * v * v + 1.0) < 1e-12);
    }

    TEST_CASE("identity has a single eigenvalue of full multiplicity") {
        const auto r = eigenvalues(ComplexMatrix::identity(5), true);
        REQUIRE(r.values.size() == 5);
        for (const auto& v : r.values) CHECK(std::abs(v - 1.0) < 1e-14);
        REQUIRE(r.vectors.size() == 5);
    }

    TEST_CASE("matches roots of the expanded characteristic polynomial") {
        std::mt19937_64 rng(2024);
        for (int trial = 0; trial < 10; ++trial) {
            const auto d = oracle::random_dense(6, rng);
            auto cp = oracle::characteristic_polynomial(d);
            const auto roots = polynomial_roots(PolynomialCoeffs(cp));
            const auto r = eigenvalues(from_dense(d));
            CHECK(oracle::multiset_distance(r.values, roots) < 1e-6);
        }
    }

    TEST_CASE("trace and determinant are conserved") {
        std::mt19937_64 rng(99);
        for (std::size_t n : {2u, 3u, 7u, 16u, 33u, 50u}) {
            const auto d = oracle::random_dense(n, rng);
            const auto m = from_dense(d);
            const auto r = eigenvalues(m);
            Complex sum = 0.0;
            Complex prod = 1.0;
            for (const auto& v : r.values) {
                sum += v;
                prod *= v;
            }
            const Complex tr = m.trace();
            const Complex det = oracle::determinant(d);
            CAPTURE(n);
            CHECK(std::abs(sum - tr) <= 1e-8 * std::max(1.0, std::abs(tr)));
            CHECK(std::abs(prod - det) <= 1e-8 * std::abs(det));
        }
    }

    TEST_CASE("eigenvector residuals for a non-normal chain") {
        std::mt19937_64 rng(5);
        auto d = oracle::random_dense(12, rng);
        const auto m = from_dense(d) + hopping_chain(12, 1.0, 0.8);
        const auto r = eigenvalues(m, true);
        const double fro = m.norm_frobenius();
        for (std::size_t k = 0; k < r.values.size(); ++k) {
            const auto mv = multiply(m, r.vectors[k]);
            double res = 0.0;
            for (std::size_t i = 0; i < mv.size(); ++i) res += std::norm(mv[i] - r.values[k] * r.vectors[k][i]);
            CHECK(std::sqrt(res) <= 1e-10 * fro);
        }
    }

    TEST_CASE("sorted lexicographically") {
        std::mt19937_64 rng(11);
        const auto r = eigenvalues(from_dense(oracle::random_dense(20, rng)));
        CHECK(std::is_sorted(r.values.begin(), r.values.end(), complex_less));
    }

    TEST_CASE("non-finite input is rejected") {
        ComplexMatrix m(2);
        m(0, 0) = 1.0;
        // Bypass the checked constructor through element access.
        m(1, 1) = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(eigenvalues(m), ValidationError);
    }
}

TEST_SUITE("expm and propagator") {
    TEST_CASE("expm agrees with a scaled Taylor series") {
        std::mt19937_64 rng(3);
        for (double size : {1e-3, 0.1, 0.9, 2.0, 4.0, 30.0}) {
            auto d = oracle::random_dense(6, rng);
            for (auto& row : d)
                for (auto& v : row) v *= size / 6.0;
            const auto expected = from_dense(oracle::taylor_expm(d));
            const auto got = expm(from_dense(d));
            CAPTURE(size);
            CHECK(max_abs_diff(got, expected) <= 1e-11 * std::max(1.0, expected.max_abs()));
        }
    }

    TEST_CASE("zero generator leaves the state unchanged") {
        StateVector psi({Complex(0.3, 0.1), Complex(-0.2, 0.5), Complex(0.7, 0.0)});
        const auto out = propagator_apply(ComplexMatrix::zeros(3), psi, 1.0);
        CHECK(relative_distance(out.physical(), psi.physical()) < 1e-15);
    }

    TEST_CASE("two-site Rabi oscillation") {
        const auto out = propagator_apply(hopping_chain(2, 1.0, 0.0), StateVector::site(2, 0), std::numbers::pi / 2.0);
        const auto phys = out.physical();
        CHECK(std::abs(phys[0]) < 1e-14);
        CHECK(std::abs(phys[1] - Complex(0.0, -1.0)) < 1e-14);
    }

    TEST_CASE("forward then backward recovers the state") {
        const auto m = hopping_chain(10, 1.0, 0.3);
        const auto psi = StateVector::site(10, 8);
        const auto fwd = propagator_apply(m, psi, 5.0);
        const auto back = propagator_apply(m, fwd, -5.0);
        CHECK(relative_distance(back.physical(), psi.physical()) < 1e-8);
    }

    TEST_CASE("composition of steps equals a single step") {
        const auto m = hopping_chain(12, 1.0, 0.4);
        StateVector psi({});
        psi = StateVector::site(12, 5);
        const auto one = propagator_apply(m, psi, 3.5);
        const auto two = propagator_apply(m, propagator_apply(m, psi, 1.25), 2.25);
        CHECK(std::abs(one.log_norm() - two.log_norm()) < 1e-8);
        auto a = one;
        auto b = two;
        a.renormalize();
        b.renormalize();
        std::vector<Complex> va(a.stored().begin(), a.stored().end());
        std::vector<Complex> vb(b.stored().begin(), b.stored().end());
        CHECK(relative_distance(va, vb) < 1e-8);
    }

    TEST_CASE("Hermitian evolution conserves the norm") {
        auto m = hopping_chain(20, 1.0, 0.0);
        m(3, 3) = 0.4;
        m(7, 12) = Complex(0.2, 0.1);
        m(12, 7) = Complex(0.2, -0.1);
        Propagator step(m, 0.01);
        auto psi = StateVector::site(20, 10);
        for (int k = 0; k < 1000; ++k) step.apply(psi);
        CHECK(std::abs(psi.log_norm()) < 1e-10 * 10.0);
    }

    TEST_CASE("long amplified runs do not overflow") {
        auto m = hopping_chain(50, 1.0, 0.3);
        for (std::size_t i = 0; i < 50; ++i) m(i, i) = Complex(0.0, 0.1);
        Propagator step(m, 0.5);
        auto psi = StateVector::site(50, 48);
        for (int k = 0; k < 4000; ++k) step.apply(psi);
        CHECK(std::isfinite(psi.log_norm()));
        CHECK(psi.log_norm() > 100.0);
        CHECK(std::abs(psi.stored_norm() - 1.0) < 1e-12);
    }

    TEST_CASE("large steps are split into substeps") {
        Propagator step(hopping_chain(10, 1.0, 0.3), 50.0);
        CHECK(step.substeps() > 1);
        CHECK(Propagator(hopping_chain(10, 1.0, 0.3), 0.01).substeps() == 1);
    }
}

TEST_SUITE("polynomial") {
    TEST_CASE("y^2 - 1") {
        auto r = polynomial_roots(PolynomialCoeffs({-1.0, 0.0, 1.0}));
        std::sort(r.begin(), r.end(), complex_less);
        CHECK(std::abs(r[0] + 1.0) < 1e-14);
        CHECK(std::abs(r[1] - 1.0) < 1e-14);
    }

    TEST_CASE("two-site quartic gives E = +-(kappa + eps)") {
        const double eps = 0.1;
        const PolynomialCoeffs q({1.0, 0.0, 1.0 - eps * eps - 2.0 * eps, 0.0, 1.0});
        const auto r = polynomial_roots(q);
        REQUIRE(r.size() == 4);
        for (const auto& y : r) {
            CHECK(std::abs(std::abs(y) - 1.0) < 1e-12);
            CHECK(std::abs(std::abs((y + 1.0 / y).real()) - 1.1) < 1e-12);
        }
    }

    TEST_CASE("deflation examples") {
        CHECK(deflate_root(PolynomialCoeffs({-1.0, 0.0, 1.0}), 1.0) == PolynomialCoeffs({1.0, 1.0}));
        CHECK(deflate_root(PolynomialCoeffs({6.0, -5.0, 1.0}), 2.0) == PolynomialCoeffs({-3.0, 1.0}));
        CHECK_THROWS_AS(deflate_root(PolynomialCoeffs({6.0, -5.0, 1.0}), 2.5), RootFindingError);
    }

    TEST_CASE("deflation reconstructs the polynomial") {
        const PolynomialCoeffs p({Complex(2.0, 1.0), -3.0, Complex(0.5, -0.5), 1.0});
        const auto roots = polynomial_roots(p);
        const auto q = deflate_root(p, roots[0]);
        const auto back = from_roots(std::vector<Complex>{roots[0]}, 1.0);
        // (y - r) q(y) == p(y)
        std::vector<Complex> prod(p.degree() + 1);
        for (std::size_t i = 0; i <= q.degree(); ++i)
            for (std::size_t j = 0; j <= back.degree(); ++j) prod[i + j] += q[i] * back[j];
        for (std::size_t k = 0; k < prod.size(); ++k) CHECK(std::abs(prod[k] - p[k]) < 1e-12);
    }

    TEST_CASE("roots reconstruct the coefficients up to degree 102") {
        std::mt19937_64 rng(17);
        std::normal_distribution<double> g(0.0, 1.0);
        auto check = [](const PolynomialCoeffs& p) {
            const auto roots = polynomial_roots(p);
            REQUIRE(roots.size() == p.degree());
            const auto rec = oracle::reconstruct(roots, p.leading());
            double worst = 0.0;
            for (std::size_t k = 0; k <= p.degree(); ++k)
                worst = std::max(worst, std::abs(rec.coeffs[k] - p[k]) / rec.magnitude[k]);
            CHECK(worst <= 1e-6);
        };
        for (std::size_t deg : {3u, 10u, 40u, 80u, 102u}) {
            std::vector<Complex> c(deg + 1);
            for (auto& v : c) v = {g(rng), g(rng)};
            CAPTURE(deg);
            check(PolynomialCoeffs(c));
        }
        // Palindromic family with most roots on the unit circle.
        for (double h : {0.05, 0.2, 0.5}) {
            const std::size_t n = 51;
            const double eps = 0.01;
            const double c = std::cosh(static_cast<double>(n - 1) * h);
            std::vector<Complex> a(2 * n + 3);
            a[2 * n + 2] = 1.0;
            a[2 * n] = -eps * eps;
            a[n + 2] = -2.0 * eps * c;
            a[n] += 2.0 * eps * c;
            a[2] += eps * eps;
            a[0] = -1.0;
            CAPTURE(h);
            check(PolynomialCoeffs(a));
        }
    }

    TEST_CASE("residual contract") {
        const PolynomialCoeffs p({Complex(1.0, -2.0), 0.0, 0.0, 4.0, 0.0, Complex(0.0, 1.0), 1.0});
        for (const auto& r : polynomial_roots(p)) CHECK(std::abs(p(r)) <= kRootResidualTol * p.magnitude_scale(r));
    }

    TEST_CASE("leading coefficient must be nonzero") {
        CHECK_THROWS_AS(PolynomialCoeffs({1.0, 0.0}), ValidationError);
        CHECK_THROWS_AS(polynomial_roots(PolynomialCoeffs({1.0})), ValidationError);
    }
}
