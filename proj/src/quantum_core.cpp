#include "qent/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace qent {

namespace {

bool finite(const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double norm2(const std::array<cplx, 4>& a) {
    double s = 0.0;
    for (const auto& z : a) s += std::norm(z);
    return s;
}

}  // namespace

Mat4 Mat4::identity() {
    Mat4 m;
    for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
}

Mat4 Mat4::operator+(const Mat4& o) const {
    Mat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.e_[i] = e_[i] + o.e_[i];
    return r;
}

Mat4 Mat4::operator-(const Mat4& o) const {
    Mat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.e_[i] = e_[i] - o.e_[i];
    return r;
}

Mat4 Mat4::operator*(const Mat4& o) const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const cplx aik = (*this)(i, k);
            if (aik == cplx{}) continue;
            for (int j = 0; j < 4; ++j) r(i, j) += aik * o(k, j);
        }
    return r;
}

Mat4 Mat4::operator*(cplx s) const {
    Mat4 r;
    for (std::size_t i = 0; i < 16; ++i) r.e_[i] = e_[i] * s;
    return r;
}

Mat4 Mat4::operator*(double s) const { return (*this) * cplx{s, 0.0}; }

Mat4 Mat4::adjoint() const {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
}

cplx Mat4::trace() const {
    return (*this)(0, 0) + (*this)(1, 1) + (*this)(2, 2) + (*this)(3, 3);
}

double Mat4::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : e_) s += std::norm(z);
    return std::sqrt(s);
}

double Mat4::max_abs() const {
    double m = 0.0;
    for (const auto& z : e_) m = std::max(m, std::abs(z));
    return m;
}

double Mat4::hermiticity_defect() const {
    double d = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return d;
}

bool Mat4::all_finite() const {
    for (const auto& z : e_)
        if (!finite(z)) return false;
    return true;
}

Ket::Ket(const std::array<cplx, 4>& amplitudes) : a_(amplitudes) {
    for (const auto& z : a_)
        if (!finite(z)) throw validation_error("Ket: non-finite amplitude");
    if (std::abs(norm2(a_) - 1.0) > 1e-12)
        throw validation_error("Ket: squared norm deviates from 1 by more than 1e-12");
}

Ket Ket::normalized(const std::array<cplx, 4>& amplitudes) {
    for (const auto& z : amplitudes)
        if (!finite(z)) throw validation_error("Ket: non-finite amplitude");
    const double n = std::sqrt(norm2(amplitudes));
    if (n <= 0.0) throw validation_error("Ket: cannot normalize the zero vector");
    std::array<cplx, 4> a = amplitudes;
    for (auto& z : a) z /= n;
    return Ket(a);
}

Mat4 Ket::outer() const {
    Mat4 m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = a_[static_cast<std::size_t>(i)] * std::conj(a_[static_cast<std::size_t>(j)]);
    return m;
}

DensityMatrix::DensityMatrix(const Mat4& m) : m_(m) {
    if (!m_.all_finite()) throw validation_error("DensityMatrix: non-finite entry");
    if (m_.hermiticity_defect() > 1e-12)
        throw validation_error("DensityMatrix: not Hermitian within 1e-12");
    if (std::abs(m_.trace() - cplx{1.0, 0.0}) > 1e-12)
        throw validation_error("DensityMatrix: trace deviates from 1 by more than 1e-12");
    std::vector<cplx> a(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a[static_cast<std::size_t>(i * 4 + j)] = m_(i, j);
    const HermEig eig = hermitian_eigen(std::move(a), 4);
    if (eig.values.back() < -1e-9)
        throw validation_error("DensityMatrix: negative eigenvalue below -1e-9 (" +
                               std::to_string(eig.values.back()) + ")");
}

DensityMatrix DensityMatrix::pure(const Ket& psi) { return DensityMatrix(psi.outer(), trusted_t{}); }

Mat4 Spectrum::reconstruct() const {
    Mat4 m;
    for (int k = 0; k < 4; ++k)
        m = m + eigenvectors[static_cast<std::size_t>(k)].outer() * eigenvalues[static_cast<std::size_t>(k)];
    return m;
}

HermEig hermitian_eigen(std::vector<cplx> a, int n) {
    const std::size_t un = static_cast<std::size_t>(n);
    if (a.size() != un * un) throw validation_error("hermitian_eigen: size mismatch");
    // Work on the exactly Hermitian part; callers check the defect beforehand.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const std::size_t ij = static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j);
            const std::size_t ji = static_cast<std::size_t>(j) * un + static_cast<std::size_t>(i);
            if (i == j) {
                a[ij] = cplx{a[ij].real(), 0.0};
            } else if (i < j) {
                const cplx h = 0.5 * (a[ij] + std::conj(a[ji]));
                a[ij] = h;
                a[ji] = std::conj(h);
            }
        }

    std::vector<cplx> v(un * un, cplx{});
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(i)] = 1.0;

    double scale = 0.0;
    for (const auto& z : a) scale += std::norm(z);
    scale = std::sqrt(scale);
    const double tol = 1e-12 * std::max(1.0, scale);

    auto at = [&](std::vector<cplx>& m, int r, int c) -> cplx& {
        return m[static_cast<std::size_t>(r) * un + static_cast<std::size_t>(c)];
    };

    bool converged = false;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * std::norm(at(a, p, q));
        if (std::sqrt(off) <= tol) {
            converged = true;
            break;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = at(a, p, q);
                const double am = std::abs(apq);
                if (am <= 1e-300) continue;
                const cplx phase = apq / am;  // e^{i phi}
                const double app = at(a, p, p).real();
                const double aqq = at(a, q, q).real();
                // annihilation condition: t^2 - 2 tau t - 1 = 0, smaller root
                const double tau = (aqq - app) / (2.0 * am);
                const double t = (tau >= 0.0 ? -1.0 : 1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // J_pp = c, J_pq = -s e^{i phi}, J_qp = s e^{-i phi}, J_qq = c
                const cplx jpq = -s * phase;
                const cplx jqp = s * std::conj(phase);
                // columns: A <- A J
                for (int i = 0; i < n; ++i) {
                    const cplx aip = at(a, i, p), aiq = at(a, i, q);
                    at(a, i, p) = aip * c + aiq * jqp;
                    at(a, i, q) = aip * jpq + aiq * c;
                }
                // rows: A <- J^dagger A
                for (int i = 0; i < n; ++i) {
                    const cplx api = at(a, p, i), aqi = at(a, q, i);
                    at(a, p, i) = c * api + std::conj(jqp) * aqi;
                    at(a, q, i) = std::conj(jpq) * api + c * aqi;
                }
                at(a, p, q) = cplx{};
                at(a, q, p) = cplx{};
                at(a, p, p) = cplx{at(a, p, p).real(), 0.0};
                at(a, q, q) = cplx{at(a, q, q).real(), 0.0};
                // eigenvectors: V <- V J
                for (int i = 0; i < n; ++i) {
                    const cplx vip = at(v, i, p), viq = at(v, i, q);
                    at(v, i, p) = vip * c + viq * jqp;
                    at(v, i, q) = vip * jpq + viq * c;
                }
            }
        }
    }
    if (!converged) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * std::norm(at(a, p, q));
        if (std::sqrt(off) > tol)
            throw numeric_error("hermitian_eigen: Jacobi sweeps did not converge within 100 sweeps");
    }

    HermEig out;
    out.n = n;
    out.values.resize(un);
    out.vectors.resize(un * un);
    std::vector<int> order(un);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return at(a, x, x).real() > at(a, y, y).real();
    });
    for (int k = 0; k < n; ++k) {
        const int col = order[static_cast<std::size_t>(k)];
        out.values[static_cast<std::size_t>(k)] = at(a, col, col).real();
        for (int i = 0; i < n; ++i)
            out.vectors[static_cast<std::size_t>(k) * un + static_cast<std::size_t>(i)] = at(v, i, col);
    }
    return out;
}

Ket tensor(const Ket2& a, const Ket2& b) {
    const double na = std::norm(a[0]) + std::norm(a[1]);
    const double nb = std::norm(b[0]) + std::norm(b[1]);
    if (!finite(a[0]) || !finite(a[1]) || !finite(b[0]) || !finite(b[1]))
        throw validation_error("tensor: non-finite amplitude");
    if (std::abs(na - 1.0) > 1e-12 || std::abs(nb - 1.0) > 1e-12)
        throw validation_error("tensor: inputs must be unit norm");
    return Ket({a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]});
}

Mat4 partial_transpose_a(const Mat4& m) {
    // (i j | k l) -> (k j | i l): transpose the first-qubit indices.
    Mat4 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) r(2 * i + j, 2 * k + l) = m(2 * k + j, 2 * i + l);
    return r;
}

Mat4 partial_transpose_a(const DensityMatrix& rho) { return partial_transpose_a(rho.matrix()); }

namespace {

std::vector<cplx> to_vec(const Mat4& m) {
    std::vector<cplx> a(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a[static_cast<std::size_t>(i * 4 + j)] = m(i, j);
    return a;
}

// Phase-canonicalize: first component with |v_i| > 1e-12 made real positive.
void canonicalize(std::array<cplx, 4>& v) {
    for (const auto& z : v) {
        const double az = std::abs(z);
        if (az > 1e-12) {
            const cplx ph = std::conj(z) / az;
            for (auto& w : v) w *= ph;
            return;
        }
    }
}

// Lexicographic comparison of rounded components, used only to break
// eigenvalue ties deterministically.
bool lex_less(const std::array<cplx, 4>& x, const std::array<cplx, 4>& y) {
    auto r = [](double t) { return std::llround(t * 1e12); };
    for (int i = 0; i < 4; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        if (r(x[ui].real()) != r(y[ui].real())) return r(x[ui].real()) < r(y[ui].real());
        if (r(x[ui].imag()) != r(y[ui].imag())) return r(x[ui].imag()) < r(y[ui].imag());
    }
    return false;
}

}  // namespace

Spectrum canonical_spectrum(const std::array<double, 4>& values,
                            const std::array<std::array<cplx, 4>, 4>& vectors) {
    std::array<std::array<cplx, 4>, 4> vecs = vectors;
    for (auto& v : vecs) canonicalize(v);
    std::array<int, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        const double lx = values[static_cast<std::size_t>(x)];
        const double ly = values[static_cast<std::size_t>(y)];
        if (std::abs(lx - ly) > 1e-12) return lx > ly;
        return lex_less(vecs[static_cast<std::size_t>(x)], vecs[static_cast<std::size_t>(y)]);
    });
    const auto kv = [&](int k) { return Ket(vecs[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]); };
    return Spectrum{
        {values[static_cast<std::size_t>(order[0])], values[static_cast<std::size_t>(order[1])],
         values[static_cast<std::size_t>(order[2])], values[static_cast<std::size_t>(order[3])]},
        {kv(0), kv(1), kv(2), kv(3)}};
}

Spectrum eigendecompose(const Mat4& m) {
    if (!m.all_finite()) throw validation_error("eigendecompose: non-finite entry");
    if (m.hermiticity_defect() > 1e-10)
        throw validation_error("eigendecompose: input not Hermitian within 1e-10");
    const HermEig eig = hermitian_eigen(to_vec(m), 4);

    std::array<double, 4> values;
    std::array<std::array<cplx, 4>, 4> vecs;
    for (int k = 0; k < 4; ++k) {
        values[static_cast<std::size_t>(k)] = eig.values[static_cast<std::size_t>(k)];
        for (int i = 0; i < 4; ++i)
            vecs[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
                eig.vectors[static_cast<std::size_t>(k) * 4 + static_cast<std::size_t>(i)];
    }
    return canonical_spectrum(values, vecs);
}

double trace_norm(const Mat4& m) {
    if (!m.all_finite()) throw validation_error("trace_norm: non-finite entry");
    if (m.hermiticity_defect() > 1e-10)
        throw validation_error("trace_norm: input not Hermitian within 1e-10");
    const HermEig eig = hermitian_eigen(to_vec(m), 4);
    double s = 0.0;
    for (double l : eig.values) s += std::abs(l);
    return s;
}

double negativity(const DensityMatrix& rho) {
    const double v = trace_norm(partial_transpose_a(rho)) - 1.0;
    return std::max(0.0, v);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    const HermEig er = hermitian_eigen(to_vec(rho.matrix()), 4);
    Mat4 sqrt_rho;
    for (int k = 0; k < 4; ++k) {
        const double l = std::max(0.0, er.values[static_cast<std::size_t>(k)]);
        const double sl = std::sqrt(l);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                sqrt_rho(i, j) += sl * er.vectors[static_cast<std::size_t>(k) * 4 + static_cast<std::size_t>(i)] *
                                  std::conj(er.vectors[static_cast<std::size_t>(k) * 4 + static_cast<std::size_t>(j)]);
    }
    const Mat4 inner = sqrt_rho * sigma.matrix() * sqrt_rho;
    const HermEig ei = hermitian_eigen(to_vec(inner), 4);
    double s = 0.0;
    for (double l : ei.values) s += std::sqrt(std::max(0.0, l));
    const double f = s * s;
    return std::min(1.0, std::max(0.0, f));
}

}  // namespace qent
