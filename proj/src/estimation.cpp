#include "qent/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qent/small_linalg.hpp"

namespace qent {

namespace {

constexpr double kKernelTol = 1e-12;
constexpr double kClusterGap = 1e-8;

cplx sandwich(const Ket& bra, const Mat4& m, const Ket& ket) {
    cplx s{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += std::conj(bra[i]) * m(i, j) * ket[j];
    return s;
}

}  // namespace

namespace {
std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> l;
    for (std::size_t i = 0; i < n; ++i) l.push_back("lambda" + std::to_string(i));
    return l;
}
}  // namespace

ParamVector::ParamVector(std::vector<double> v, std::vector<std::string> l)
    : values(std::move(v)), labels(std::move(l)) {
    if (values.empty()) throw validation_error("ParamVector: needs at least one parameter");
    if (labels.size() != values.size()) throw validation_error("ParamVector: label count mismatch");
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) throw validation_error("ParamVector: labels must be unique");
    for (double x : values)
        if (!std::isfinite(x)) throw validation_error("ParamVector: non-finite value");
}

ParamVector::ParamVector(std::vector<double> v) : ParamVector(v, default_labels(v.size())) {}

ParamVector ParamVector::shifted(int i, double delta) const {
    ParamVector out = *this;
    out.values[static_cast<std::size_t>(i)] += delta;
    return out;
}

InfoMatrix::InfoMatrix(std::vector<double> entries, int n, InfoKind kind)
    : e_(std::move(entries)), n_(n), kind_(kind) {
    const std::size_t un = static_cast<std::size_t>(n);
    if (n < 1 || e_.size() != un * un) throw validation_error("InfoMatrix: size mismatch");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(at(i, j) - at(j, i)) > 1e-10)
                throw validation_error("InfoMatrix: not symmetric within 1e-10");
    std::vector<cplx> a(un * un);
    for (std::size_t k = 0; k < un * un; ++k) a[k] = e_[k];
    const HermEig eig = hermitian_eigen(std::move(a), n);
    if (eig.values.back() < -1e-9)
        throw validation_error("InfoMatrix: negative eigenvalue below -1e-9 (" +
                               std::to_string(eig.values.back()) + ")");
}

StateFamily decoherence_family() {
    return StateFamily{[](const ParamVector& l) {
        return decoherence_state(ModelPoint(l.values.at(0), l.values.at(1)));
    }};
}

StateFamily werner_family() {
    return StateFamily{[](const ParamVector& l) {
        return werner_state(ModelPoint(l.values.at(0), l.values.at(1)));
    }};
}

StateFamily model_family(ModelKind kind) {
    return kind == ModelKind::Decoherence ? decoherence_family() : werner_family();
}

InfoMatrix classical_fisher(const ProbFn& probs, const ParamVector& lambda, double h) {
    const int n = lambda.size();
    const std::vector<double> p0 = probs(lambda);
    const std::size_t m = p0.size();
    if (m == 0) throw validation_error("classical_fisher: empty outcome distribution");
    double sum = 0.0;
    for (double v : p0) {
        if (v < -1e-12) throw validation_error("classical_fisher: negative probability");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw validation_error("classical_fisher: probabilities do not sum to 1");

    std::vector<std::vector<double>> dp(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::vector<double> pp = probs(lambda.shifted(i, +h));
        const std::vector<double> pm = probs(lambda.shifted(i, -h));
        if (pp.size() != m || pm.size() != m)
            throw validation_error("classical_fisher: outcome count changed across the stencil");
        auto& d = dp[static_cast<std::size_t>(i)];
        d.resize(m);
        for (std::size_t x = 0; x < m; ++x) d[x] = (pp[x] - pm[x]) / (2.0 * h);
    }

    std::vector<double> f(static_cast<std::size_t>(n * n), 0.0);
    for (std::size_t x = 0; x < m; ++x) {
        double grad_mag = 0.0;
        for (int i = 0; i < n; ++i) grad_mag = std::max(grad_mag, std::abs(dp[static_cast<std::size_t>(i)][x]));
        if (p0[x] <= kKernelTol) {
            if (grad_mag > 1e-9)
                throw numeric_error("classical_fisher: singular model, outcome " + std::to_string(x) +
                                    " has zero probability but non-zero derivative");
            continue;
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                f[static_cast<std::size_t>(i * n + j)] +=
                    dp[static_cast<std::size_t>(i)][x] * dp[static_cast<std::size_t>(j)][x] / p0[x];
    }
    return InfoMatrix(std::move(f), n, InfoKind::ClassicalFisher);
}

namespace {

Mat4 fd_state_derivative(const StateFamily& family, const ParamVector& lambda, int i) {
    const double h = family.fd_step;
    const Mat4 plus = family.state_fn(lambda.shifted(i, +h)).matrix();
    const Mat4 minus = family.state_fn(lambda.shifted(i, -h)).matrix();
    return (plus - minus) * (1.0 / (2.0 * h));
}

}  // namespace

SLDOperator sld(const StateFamily& family, const ParamVector& lambda, int i) {
    if (i < 0 || i >= lambda.size()) throw validation_error("sld: parameter index out of range");
    const DensityMatrix rho = family.state_fn(lambda);
    const Spectrum spec = eigendecompose(rho.matrix());
    const Mat4 drho = fd_state_derivative(family, lambda, i);

    Mat4 l;
    for (int n = 0; n < 4; ++n) {
        for (int m = 0; m < 4; ++m) {
            const double denom = spec.eigenvalues[static_cast<std::size_t>(n)] +
                                 spec.eigenvalues[static_cast<std::size_t>(m)];
            if (denom <= kKernelTol) continue;  // kernel sector
            const cplx num = sandwich(spec.eigenvectors[static_cast<std::size_t>(n)], drho,
                                      spec.eigenvectors[static_cast<std::size_t>(m)]);
            const cplx coeff = 2.0 * num / denom;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    l(r, c) += coeff * spec.eigenvectors[static_cast<std::size_t>(n)][r] *
                               std::conj(spec.eigenvectors[static_cast<std::size_t>(m)][c]);
        }
    }
    // Symmetrize away finite-difference dust.
    l = (l + l.adjoint()) * 0.5;
    return SLDOperator{l, i};
}

namespace {

struct SpectralData {
    Spectrum spec;
    std::vector<std::vector<int>> clusters;   // indices into spec, descending order
    std::array<int, 4> cluster_of;
};

SpectralData analyze_spectrum(const Mat4& rho) {
    SpectralData out{eigendecompose(rho), {}, {}};
    for (int n = 0; n < 4; ++n) {
        if (n > 0 && out.spec.eigenvalues[static_cast<std::size_t>(n - 1)] -
                             out.spec.eigenvalues[static_cast<std::size_t>(n)] <
                         kClusterGap) {
            out.clusters.back().push_back(n);
        } else {
            out.clusters.push_back({n});
        }
        out.cluster_of[static_cast<std::size_t>(n)] = static_cast<int>(out.clusters.size()) - 1;
    }
    return out;
}

// Sum of |v><v| over the eigenvectors of `side` assigned (by overlap with the
// reference eigenbasis) to each reference cluster. Raises on inconsistent
// assignment, which signals an eigenvalue crossing inside the stencil.
std::vector<Mat4> cluster_projectors(const SpectralData& ref, const Spectrum& side,
                                     std::vector<std::vector<double>>* side_values) {
    const int ncl = static_cast<int>(ref.clusters.size());
    std::vector<Mat4> proj(static_cast<std::size_t>(ncl));
    std::vector<std::vector<double>> vals(static_cast<std::size_t>(ncl));
    for (int k = 0; k < 4; ++k) {
        double best = -1.0;
        int best_cluster = 0;
        for (int c = 0; c < ncl; ++c) {
            double w = 0.0;
            for (int n : ref.clusters[static_cast<std::size_t>(c)]) {
                cplx ov{};
                for (int i = 0; i < 4; ++i)
                    ov += std::conj(ref.spec.eigenvectors[static_cast<std::size_t>(n)][i]) *
                          side.eigenvectors[static_cast<std::size_t>(k)][i];
                w += std::norm(ov);
            }
            if (w > best) {
                best = w;
                best_cluster = c;
            }
        }
        proj[static_cast<std::size_t>(best_cluster)] =
            proj[static_cast<std::size_t>(best_cluster)] +
            side.eigenvectors[static_cast<std::size_t>(k)].outer();
        vals[static_cast<std::size_t>(best_cluster)].push_back(
            side.eigenvalues[static_cast<std::size_t>(k)]);
    }
    for (int c = 0; c < ncl; ++c) {
        if (vals[static_cast<std::size_t>(c)].size() != ref.clusters[static_cast<std::size_t>(c)].size())
            throw numeric_error(
                "qfi: eigenvalue crossing within the finite-difference stencil (cluster " +
                std::to_string(c) + " changed size); reduce the step or move the point");
    }
    if (side_values) *side_values = std::move(vals);
    return proj;
}

}  // namespace

InfoMatrix qfi(const StateFamily& family, const ParamVector& lambda) {
    const int npar = lambda.size();
    const double h = family.fd_step;
    const DensityMatrix rho0 = family.state_fn(lambda);
    SpectralData center = analyze_spectrum(rho0.matrix());
    const int ncl = static_cast<int>(center.clusters.size());

    // Finite differences of the state and of the spectral projectors.
    std::vector<Mat4> drho(static_cast<std::size_t>(npar));
    std::vector<std::vector<Mat4>> dproj(static_cast<std::size_t>(npar));
    std::vector<std::array<double, 4>> dvals(static_cast<std::size_t>(npar));
    for (int i = 0; i < npar; ++i) {
        const DensityMatrix rp = family.state_fn(lambda.shifted(i, +h));
        const DensityMatrix rm = family.state_fn(lambda.shifted(i, -h));
        drho[static_cast<std::size_t>(i)] = (rp.matrix() - rm.matrix()) * (1.0 / (2.0 * h));

        std::vector<std::vector<double>> vp, vm;
        const std::vector<Mat4> pp = cluster_projectors(center, eigendecompose(rp.matrix()), &vp);
        const std::vector<Mat4> pm = cluster_projectors(center, eigendecompose(rm.matrix()), &vm);
        auto& dp = dproj[static_cast<std::size_t>(i)];
        dp.resize(static_cast<std::size_t>(ncl));
        for (int c = 0; c < ncl; ++c)
            dp[static_cast<std::size_t>(c)] =
                (pp[static_cast<std::size_t>(c)] - pm[static_cast<std::size_t>(c)]) * (1.0 / (2.0 * h));

        // Eigenvalue derivatives. Clusters are matched sorted-to-sorted; for
        // multi-member clusters the members are nearly equal on both sides,
        // and the Hellmann-Feynman refinement below is not needed for the
        // value derivative because the assignment is order preserving.
        for (int c = 0; c < ncl; ++c) {
            auto& vpc = vp[static_cast<std::size_t>(c)];
            auto& vmc = vm[static_cast<std::size_t>(c)];
            std::sort(vpc.begin(), vpc.end(), std::greater<>());
            std::sort(vmc.begin(), vmc.end(), std::greater<>());
            const auto& members = center.clusters[static_cast<std::size_t>(c)];
            for (std::size_t k = 0; k < members.size(); ++k)
                dvals[static_cast<std::size_t>(i)][static_cast<std::size_t>(members[k])] =
                    (vpc[k] - vmc[k]) / (2.0 * h);
        }
    }

    // Inside a quasi-degenerate cluster the sorted-match eigenvalue
    // derivative is ambiguous when the perturbation mixes members; diagonal
    // Hellmann-Feynman values in a refined basis are the stable choice.
    for (int c = 0; c < ncl; ++c) {
        const auto& members = center.clusters[static_cast<std::size_t>(c)];
        if (members.size() < 2) continue;
        for (int i = 0; i < npar; ++i) {
            // refined values = eigenvalues of the projected perturbation block
            const std::size_t k = members.size();
            std::vector<cplx> block(k * k);
            for (std::size_t r = 0; r < k; ++r)
                for (std::size_t s = 0; s < k; ++s)
                    block[r * k + s] = sandwich(
                        center.spec.eigenvectors[static_cast<std::size_t>(members[r])],
                        drho[static_cast<std::size_t>(i)],
                        center.spec.eigenvectors[static_cast<std::size_t>(members[s])]);
            const HermEig be = hermitian_eigen(std::move(block), static_cast<int>(k));
            for (std::size_t r = 0; r < k; ++r)
                dvals[static_cast<std::size_t>(i)][static_cast<std::size_t>(members[r])] =
                    be.values[r];
        }
    }

    std::vector<double> hmat(static_cast<std::size_t>(npar * npar), 0.0);
    // Classical part: sum_n (d_i p_n)(d_j p_n)/p_n.
    for (int n = 0; n < 4; ++n) {
        const double pn = center.spec.eigenvalues[static_cast<std::size_t>(n)];
        double grad = 0.0;
        for (int i = 0; i < npar; ++i)
            grad = std::max(grad, std::abs(dvals[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)]));
        if (pn <= kKernelTol) {
            if (grad > 1e-9)
                throw numeric_error("qfi: diverges, eigenvalue " + std::to_string(n) +
                                    " vanishes with non-zero derivative (state-space boundary)");
            continue;
        }
        for (int i = 0; i < npar; ++i)
            for (int j = 0; j < npar; ++j)
                hmat[static_cast<std::size_t>(i * npar + j)] +=
                    dvals[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)] *
                    dvals[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)] / pn;
    }

    // Eigenvector part: ordered pairs across distinct clusters. The factor
    // <psi_n|d_i psi_m> equals <psi_n|d_i P_{C(m)}|psi_m> for n outside C(m),
    // which is free of phase and intra-cluster basis ambiguity.
    for (int n = 0; n < 4; ++n) {
        for (int m = 0; m < 4; ++m) {
            if (center.cluster_of[static_cast<std::size_t>(n)] ==
                center.cluster_of[static_cast<std::size_t>(m)])
                continue;
            const double pn = center.spec.eigenvalues[static_cast<std::size_t>(n)];
            const double pm = center.spec.eigenvalues[static_cast<std::size_t>(m)];
            if (pn + pm <= kKernelTol) continue;
            const double w = (pn - pm) * (pn - pm) / (pn + pm);
            std::vector<cplx> z(static_cast<std::size_t>(npar));
            for (int i = 0; i < npar; ++i)
                z[static_cast<std::size_t>(i)] = sandwich(
                    center.spec.eigenvectors[static_cast<std::size_t>(n)],
                    dproj[static_cast<std::size_t>(i)]
                         [static_cast<std::size_t>(center.cluster_of[static_cast<std::size_t>(m)])],
                    center.spec.eigenvectors[static_cast<std::size_t>(m)]);
            // ordered pair contributes w (z_i conj(z_j) + z_j conj(z_i))
            for (int i = 0; i < npar; ++i)
                for (int j = 0; j < npar; ++j)
                    hmat[static_cast<std::size_t>(i * npar + j)] +=
                        w * 2.0 *
                        (z[static_cast<std::size_t>(i)] * std::conj(z[static_cast<std::size_t>(j)]))
                            .real();
        }
    }

    // Exact symmetrization before validation.
    for (int i = 0; i < npar; ++i)
        for (int j = i + 1; j < npar; ++j) {
            const double v = 0.5 * (hmat[static_cast<std::size_t>(i * npar + j)] +
                                    hmat[static_cast<std::size_t>(j * npar + i)]);
            hmat[static_cast<std::size_t>(i * npar + j)] = v;
            hmat[static_cast<std::size_t>(j * npar + i)] = v;
        }
    return InfoMatrix(std::move(hmat), npar, InfoKind::QuantumFisher);
}

InfoMatrix qfi_closed_form(ModelKind kind, const ModelPoint& pt) {
    const double p = pt.p, q = pt.q;
    if (kind == ModelKind::Decoherence) {
        if (p >= 1.0)
            throw std::domain_error("qfi_closed_form: H_pp diverges at p = 1 (decoherence family)");
        if (q <= 0.0 || q >= 1.0)
            throw std::domain_error("qfi_closed_form: H_qq diverges at q in {0, 1} (decoherence family)");
        const double hpp = 4.0 * (1.0 - q) * q / (1.0 - p * p);
        const double hqq = 1.0 / (q - q * q);
        return InfoMatrix({hpp, 0.0, 0.0, hqq}, 2, InfoKind::QuantumFisher);
    }
    if (p >= 1.0)
        throw std::domain_error("qfi_closed_form: H_pp diverges at p = 1 (Werner family)");
    if (q <= 0.0 || q >= 1.0)
        throw std::domain_error("qfi_closed_form: H_qq diverges at q in {0, 1} (Werner family)");
    const double hpp = 3.0 / (1.0 + (2.0 - 3.0 * p) * p);
    // q-element 2 p^2 / (q(1-q)(1+p)): at p = 1 this reaches the pure-state
    // value 1/(q - q^2), matching the decoherence family on the shared
    // boundary, and it equals the spectral-formula and SLD evaluations.
    const double hqq = 2.0 * p * p / (q * (1.0 - q) * (1.0 + p));
    return InfoMatrix({hpp, 0.0, 0.0, hqq}, 2, InfoKind::QuantumFisher);
}

InfoMatrix reparametrize(const InfoMatrix& info, const std::vector<double>& jacobian) {
    const int n = info.size();
    const std::size_t un = static_cast<std::size_t>(n);
    if (jacobian.size() != un * un) throw validation_error("reparametrize: jacobian size mismatch");
    if (std::abs(determinant(jacobian, n)) < 1e-300)
        throw validation_error("reparametrize: singular jacobian");
    std::vector<double> out(un * un, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    s += jacobian[static_cast<std::size_t>(i * n + a)] * info.at(i, j) *
                         jacobian[static_cast<std::size_t>(j * n + b)];
            out[static_cast<std::size_t>(a * n + b)] = s;
        }
    return InfoMatrix(std::move(out), n, info.kind());
}

std::vector<double> cramer_rao_bound(const InfoMatrix& info, int M) {
    if (M < 1) throw validation_error("cramer_rao_bound: M must be positive");
    std::vector<double> inv;
    try {
        inv = invert(info.entries(), info.size());
    } catch (const numeric_error&) {
        throw numeric_error("cramer_rao_bound: singular information matrix");
    }
    for (double& v : inv) v /= static_cast<double>(M);
    return inv;
}

std::vector<double> pq_to_peps_jacobian(ModelKind kind, double p, double epsilon) {
    if (kind == ModelKind::Decoherence) {
        if (!(p > 0.0) || !(epsilon > 0.0) || !(epsilon < p))
            throw std::domain_error("pq_to_peps_jacobian: need 0 < eps < p for the decoherence family");
        const double r = std::sqrt(p * p - epsilon * epsilon);
        const double dq_dp = -epsilon * epsilon / (2.0 * r * p * p);
        const double dq_de = epsilon / (2.0 * p * r);
        return {1.0, 0.0, dq_dp, dq_de};
    }
    const double emax = (3.0 * p - 1.0) / 2.0;
    if (!(p > 1.0 / 3.0) || !(epsilon > 0.0) || !(epsilon < emax))
        throw std::domain_error("pq_to_peps_jacobian: need 0 < eps < (3p-1)/2 for the Werner family");
    const double s2 = (2.0 * epsilon + 1.0 - p) / (2.0 * p);
    const double root = std::sqrt(1.0 - s2 * s2);
    const double dq_ds2 = s2 / (2.0 * root);
    const double ds2_de = 1.0 / p;
    const double ds2_dp = -(2.0 * epsilon + 1.0) / (2.0 * p * p);
    return {1.0, 0.0, dq_ds2 * ds2_dp, dq_ds2 * ds2_de};
}

}  // namespace qent
