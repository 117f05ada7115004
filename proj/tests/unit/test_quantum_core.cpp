#include <cmath>
#include <random>

#include "doctest.h"
#include "qent/quantum_core.hpp"

using namespace qent;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Ket bell_phi_plus() { return Ket({kInvSqrt2, 0.0, 0.0, kInvSqrt2}); }

Mat4 random_hermitian(std::mt19937_64& eng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat4 a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = cplx{g(eng), g(eng)};
    return (a + a.adjoint()) * 0.5;
}

DensityMatrix random_density(std::mt19937_64& eng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat4 a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = cplx{g(eng), g(eng)};
    Mat4 rho = a * a.adjoint();
    rho = rho * (1.0 / rho.trace().real());
    rho = (rho + rho.adjoint()) * 0.5;
    return DensityMatrix(rho);
}

}  // namespace

TEST_SUITE("quantum_core") {

TEST_CASE("tensor basis cases and diagonal pair") {
    const Ket hh = tensor({1.0, 0.0}, {1.0, 0.0});
    CHECK(hh[0] == cplx{1.0, 0.0});
    CHECK(hh[1] == cplx{0.0, 0.0});
    CHECK(hh[2] == cplx{0.0, 0.0});
    CHECK(hh[3] == cplx{0.0, 0.0});

    const Ket vv = tensor({0.0, 1.0}, {0.0, 1.0});
    CHECK(vv[3] == cplx{1.0, 0.0});

    const Ket2 d{kInvSqrt2, kInvSqrt2};
    const Ket dd = tensor(d, d);
    for (int i = 0; i < 4; ++i) CHECK(dd[i].real() == doctest::Approx(0.5).epsilon(1e-14));

    CHECK_THROWS_AS(tensor({1.0, 1.0}, {1.0, 0.0}), validation_error);
}

TEST_CASE("partial transpose: product state invariant, Bell spectrum, involution") {
    const Mat4 hh = tensor({1.0, 0.0}, {1.0, 0.0}).outer();
    CHECK(partial_transpose_a(hh).frobenius_distance(hh) == doctest::Approx(0.0));

    const Mat4 pt = partial_transpose_a(bell_phi_plus().outer());
    const Spectrum s = eigendecompose(pt);
    CHECK(s.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.eigenvalues[2] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.eigenvalues[3] == doctest::Approx(-0.5).epsilon(1e-12));

    std::mt19937_64 eng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat4 m = random_hermitian(eng);
        CHECK(partial_transpose_a(partial_transpose_a(m)).frobenius_distance(m) <= 1e-14);
        CHECK(std::abs(partial_transpose_a(m).trace() - m.trace()) <= 1e-14);
    }
}

TEST_CASE("trace norm") {
    CHECK(trace_norm(Mat4::identity() * 0.25) == doctest::Approx(1.0).epsilon(1e-12));

    Mat4 d;
    d(0, 0) = 0.5;
    d(1, 1) = 0.5;
    d(2, 2) = 0.5;
    d(3, 3) = -0.5;
    CHECK(trace_norm(d) == doctest::Approx(2.0).epsilon(1e-12));

    // Bell state: ||rho^TA||_1 = 2
    CHECK(trace_norm(partial_transpose_a(bell_phi_plus().outer())) == doctest::Approx(2.0).epsilon(1e-12));

    Mat4 nh;
    nh(0, 1) = 1.0;  // not Hermitian
    CHECK_THROWS_AS(trace_norm(nh), validation_error);
}

TEST_CASE("negativity: Bell 1, product 0, equivalence with clipped-eigenvalue form") {
    CHECK(negativity(DensityMatrix::pure(bell_phi_plus())) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(negativity(DensityMatrix::pure(tensor({1.0, 0.0}, {1.0, 0.0}))) ==
          doctest::Approx(0.0).epsilon(1e-12));

    std::mt19937_64 eng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const DensityMatrix rho = random_density(eng);
        const Spectrum s = eigendecompose(partial_transpose_a(rho));
        double neg_sum = 0.0;
        for (double l : s.eigenvalues) neg_sum += std::max(0.0, -l);
        CHECK(std::abs(negativity(rho) - 2.0 * neg_sum) <= 1e-10);
    }
}

TEST_CASE("eigendecompose: diagonal, pure state, reconstruction property") {
    Mat4 d;
    d(0, 0) = 4.0;
    d(1, 1) = 3.0;
    d(2, 2) = 2.0;
    d(3, 3) = 1.0;
    const Spectrum s = eigendecompose(d);
    for (int k = 0; k < 4; ++k) {
        CHECK(s.eigenvalues[k] == doctest::Approx(4.0 - k).epsilon(1e-13));
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(s.eigenvectors[k][i] - (i == k ? cplx{1.0, 0.0} : cplx{})) <= 1e-12);
    }

    const Spectrum sb = eigendecompose(bell_phi_plus().outer());
    CHECK(sb.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(sb.eigenvalues[1]) <= 1e-12);
    CHECK(std::abs(sb.eigenvalues[3]) <= 1e-12);

    std::mt19937_64 eng(13);
    for (int trial = 0; trial < 10000; ++trial) {
        const Mat4 m = random_hermitian(eng);
        const Spectrum sp = eigendecompose(m);
        CHECK(sp.reconstruct().frobenius_distance(m) <= 1e-10);
        // orthonormality
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b) {
                cplx ov{};
                for (int i = 0; i < 4; ++i) ov += std::conj(sp.eigenvectors[a][i]) * sp.eigenvectors[b][i];
                CHECK(std::abs(ov - (a == b ? cplx{1.0, 0.0} : cplx{})) <= 1e-10);
            }
    }
}

TEST_CASE("eigendecompose is deterministic") {
    std::mt19937_64 eng(17);
    const Mat4 m = random_hermitian(eng);
    const Spectrum a = eigendecompose(m);
    const Spectrum b = eigendecompose(m);
    for (int k = 0; k < 4; ++k) {
        CHECK(a.eigenvalues[k] == b.eigenvalues[k]);
        for (int i = 0; i < 4; ++i) CHECK(a.eigenvectors[k][i] == b.eigenvectors[k][i]);
    }
}

TEST_CASE("fidelity") {
    std::mt19937_64 eng(19);
    const DensityMatrix rho = random_density(eng);
    CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));

    const DensityMatrix hh = DensityMatrix::pure(tensor({1.0, 0.0}, {1.0, 0.0}));
    const DensityMatrix vv = DensityMatrix::pure(tensor({0.0, 1.0}, {0.0, 1.0}));
    CHECK(fidelity(hh, vv) == doctest::Approx(0.0).epsilon(1e-12));

    const DensityMatrix mixed(Mat4::identity() * 0.25);
    CHECK(fidelity(mixed, DensityMatrix::pure(bell_phi_plus())) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("density matrix validation") {
    Mat4 bad_trace = Mat4::identity();
    CHECK_THROWS_AS(DensityMatrix{bad_trace}, validation_error);

    Mat4 not_herm;
    not_herm(0, 0) = 1.0;
    not_herm(0, 1) = cplx{0.0, 1e-6};
    CHECK_THROWS_AS(DensityMatrix{not_herm}, validation_error);

    Mat4 indefinite;
    indefinite(0, 0) = 1.1;
    indefinite(1, 1) = -0.1;
    CHECK_THROWS_AS(DensityMatrix{indefinite}, validation_error);

    CHECK_THROWS_AS(Ket({1.0, 1.0, 0.0, 0.0}), validation_error);
    CHECK_NOTHROW(Ket::normalized({1.0, 1.0, 0.0, 0.0}));
}

}  // TEST_SUITE
