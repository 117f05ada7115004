// Dense complex linear algebra for a pair of polarization qubits: kets,
// density operators, partial transpose, trace norm, eigendecomposition,
// fidelity and negativity. Basis order is fixed to (HH, HV, VH, VV)
// throughout the library.
#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qent {

using cplx = std::complex<double>;

/// Invalid input or violated state invariant.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure (non-convergence, singular system).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense 4x4 complex matrix, row-major.
class Mat4 {
public:
    Mat4() : e_{} {}

    static Mat4 zero() { return Mat4{}; }
    static Mat4 identity();

    cplx& operator()(int r, int c) { return e_[static_cast<std::size_t>(r * 4 + c)]; }
    const cplx& operator()(int r, int c) const { return e_[static_cast<std::size_t>(r * 4 + c)]; }

    Mat4 operator+(const Mat4& o) const;
    Mat4 operator-(const Mat4& o) const;
    Mat4 operator*(const Mat4& o) const;  // matrix product
    Mat4 operator*(cplx s) const;
    Mat4 operator*(double s) const;

    Mat4 adjoint() const;
    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;

    /// Largest |a_ij - conj(a_ji)| over all entries.
    double hermiticity_defect() const;
    bool is_hermitian(double tol) const { return hermiticity_defect() <= tol; }
    bool all_finite() const;

    double frobenius_distance(const Mat4& o) const { return (*this - o).frobenius_norm(); }

private:
    std::array<cplx, 16> e_;
};

/// Single-qubit ket, |H>, |V> components.
using Ket2 = std::array<cplx, 2>;

/// Two-qubit pure state in the (HH, HV, VH, VV) basis. Unit norm enforced.
class Ket {
public:
    /// Validates finiteness and unit norm (|<psi|psi> - 1| <= 1e-12).
    explicit Ket(const std::array<cplx, 4>& amplitudes);

    /// Rescales an arbitrary nonzero vector to unit norm.
    static Ket normalized(const std::array<cplx, 4>& amplitudes);

    const std::array<cplx, 4>& amplitudes() const { return a_; }
    const cplx& operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }

    /// |psi><psi| as a matrix.
    Mat4 outer() const;

private:
    std::array<cplx, 4> a_;
};

/// Validated two-qubit state: Hermitian (1e-12), unit trace (1e-12),
/// minimum eigenvalue >= -1e-9. Violations raise validation_error.
class DensityMatrix {
public:
    explicit DensityMatrix(const Mat4& m);

    /// Rank-1 projector |psi><psi| (exact by construction).
    static DensityMatrix pure(const Ket& psi);

    const Mat4& matrix() const { return m_; }
    const cplx& operator()(int r, int c) const { return m_(r, c); }

private:
    struct trusted_t {};
    DensityMatrix(const Mat4& m, trusted_t) : m_(m) {}
    Mat4 m_;
};

/// Eigensystem of a 4x4 Hermitian matrix. Eigenvalues descending,
/// eigenvectors orthonormal; deterministic ordering (ties broken by
/// lexicographic comparison of rounded, phase-canonicalized vectors).
struct Spectrum {
    std::array<double, 4> eigenvalues;
    std::array<Ket, 4> eigenvectors;

    Mat4 reconstruct() const;
};

/// Eigensystem of an n x n Hermitian matrix via cyclic Jacobi rotations.
/// Deterministic pivot order, tolerance 1e-12 relative to the Frobenius
/// norm, at most 100 sweeps; raises numeric_error on non-convergence.
/// `a` is row-major; eigenvector k occupies vectors[k*n .. k*n+n-1].
struct HermEig {
    std::vector<double> values;  // descending
    std::vector<cplx> vectors;
    int n = 0;
};
HermEig hermitian_eigen(std::vector<cplx> a, int n);

/// Kronecker product of two single-qubit kets, (HH, HV, VH, VV) order.
/// Both inputs must be unit norm (1e-12).
Ket tensor(const Ket2& a, const Ket2& b);

/// Transpose on the first qubit: out(ij,kl) = in(kj,il). Trace preserving
/// involution; Hermitian for Hermitian input.
Mat4 partial_transpose_a(const Mat4& m);
Mat4 partial_transpose_a(const DensityMatrix& rho);

/// Sum of absolute eigenvalues. Input must be Hermitian within 1e-10.
double trace_norm(const Mat4& m);

/// Entanglement negativity ||rho^{T_A}||_1 - 1, clamped at 0.
double negativity(const DensityMatrix& rho);

/// Eigendecomposition of a Hermitian 4x4 matrix (see Spectrum ordering).
/// Input must be Hermitian within 1e-10.
Spectrum eigendecompose(const Mat4& m);

/// Applies the Spectrum ordering rules (descending eigenvalue, phase
/// canonicalization, lexicographic tie break) to a raw eigensystem.
Spectrum canonical_spectrum(const std::array<double, 4>& values,
                            const std::array<std::array<cplx, 4>, 4>& vectors);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 in [0,1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace qent
