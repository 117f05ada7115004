#include "qent/small_linalg.hpp"

#include <cmath>
#include <numeric>

namespace qent {

namespace {

// LU factorization in place; returns permutation sign, fills perm.
double lu_factor(std::vector<double>& a, std::vector<int>& perm, int n) {
    const std::size_t un = static_cast<std::size_t>(n);
    perm.resize(un);
    std::iota(perm.begin(), perm.end(), 0);
    double sign = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)]) * un + static_cast<std::size_t>(k)]);
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(a[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]) * un + static_cast<std::size_t>(k)]);
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best <= 1e-300) throw numeric_error("lu_factor: singular matrix");
        if (piv != k) {
            std::swap(perm[static_cast<std::size_t>(piv)], perm[static_cast<std::size_t>(k)]);
            sign = -sign;
        }
        const std::size_t rk = static_cast<std::size_t>(perm[static_cast<std::size_t>(k)]) * un;
        for (int i = k + 1; i < n; ++i) {
            const std::size_t ri = static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]) * un;
            const double f = a[ri + static_cast<std::size_t>(k)] / a[rk + static_cast<std::size_t>(k)];
            a[ri + static_cast<std::size_t>(k)] = f;
            for (int j = k + 1; j < n; ++j)
                a[ri + static_cast<std::size_t>(j)] -= f * a[rk + static_cast<std::size_t>(j)];
        }
    }
    return sign;
}

}  // namespace

std::vector<double> lu_solve(std::vector<double> a, std::vector<double> b, int n) {
    const std::size_t un = static_cast<std::size_t>(n);
    if (a.size() != un * un || b.size() != un) throw validation_error("lu_solve: size mismatch");
    std::vector<int> perm;
    lu_factor(a, perm, n);
    std::vector<double> y(un);
    for (int i = 0; i < n; ++i) {
        double s = b[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        const std::size_t ri = static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]) * un;
        for (int j = 0; j < i; ++j) s -= a[ri + static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    std::vector<double> x(un);
    for (int i = n - 1; i >= 0; --i) {
        double s = y[static_cast<std::size_t>(i)];
        const std::size_t ri = static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]) * un;
        for (int j = i + 1; j < n; ++j) s -= a[ri + static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / a[ri + static_cast<std::size_t>(i)];
    }
    return x;
}

std::vector<double> invert(const std::vector<double>& a, int n) {
    const std::size_t un = static_cast<std::size_t>(n);
    std::vector<double> inv(un * un);
    for (int c = 0; c < n; ++c) {
        std::vector<double> e(un, 0.0);
        e[static_cast<std::size_t>(c)] = 1.0;
        const std::vector<double> col = lu_solve(a, e, n);
        for (int r = 0; r < n; ++r) inv[static_cast<std::size_t>(r) * un + static_cast<std::size_t>(c)] = col[static_cast<std::size_t>(r)];
    }
    return inv;
}

double determinant(std::vector<double> a, int n) {
    const std::size_t un = static_cast<std::size_t>(n);
    if (a.size() != un * un) throw validation_error("determinant: size mismatch");
    std::vector<int> perm;
    double det;
    try {
        det = lu_factor(a, perm, n);
    } catch (const numeric_error&) {
        return 0.0;
    }
    for (int k = 0; k < n; ++k)
        det *= a[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)]) * un + static_cast<std::size_t>(k)];
    return det;
}

}  // namespace qent
