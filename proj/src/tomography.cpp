#include "qent/tomography.hpp"

#include <cmath>

#include "json.hpp"
#include "qent/small_linalg.hpp"

namespace qent {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Mat4 product_projector(const Ket2& a, const Ket2& b) { return tensor(a, b).outer(); }

// Pauli product basis sigma_a (x) sigma_b, a, b in {I, X, Y, Z}.
const std::array<Mat4, 16>& pauli_basis() {
    static const std::array<Mat4, 16> basis = [] {
        std::array<std::array<cplx, 4>, 4> sigma{};  // row-major 2x2 each
        sigma[0] = {1.0, 0.0, 0.0, 1.0};                          // I
        sigma[1] = {0.0, 1.0, 1.0, 0.0};                          // X
        sigma[2] = {0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0};   // Y
        sigma[3] = {1.0, 0.0, 0.0, -1.0};                         // Z
        std::array<Mat4, 16> out{};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                Mat4 m;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        for (int k = 0; k < 2; ++k)
                            for (int l = 0; l < 2; ++l)
                                m(2 * i + k, 2 * j + l) =
                                    sigma[static_cast<std::size_t>(a)][static_cast<std::size_t>(2 * i + j)] *
                                    sigma[static_cast<std::size_t>(b)][static_cast<std::size_t>(2 * k + l)];
                out[static_cast<std::size_t>(4 * a + b)] = m;
            }
        return out;
    }();
    return basis;
}

double real_trace_product(const Mat4& x, const Mat4& y) { return (x * y).trace().real(); }

// Single-qubit kets used by the J16 list.
Ket2 ket_h() { return {1.0, 0.0}; }
Ket2 ket_v() { return {0.0, 1.0}; }
Ket2 ket_d() { return {kInvSqrt2, kInvSqrt2}; }
Ket2 ket_r() { return {kInvSqrt2, cplx{0.0, -kInvSqrt2}}; }
Ket2 ket_l() { return {kInvSqrt2, cplx{0.0, kInvSqrt2}}; }

Ket2 single_ket(char c) {
    switch (c) {
        case 'H': return ket_h();
        case 'V': return ket_v();
        case 'D': return ket_d();
        case 'R': return ket_r();
        case 'L': return ket_l();
        default: throw validation_error(std::string("unknown polarization label '") + c + "'");
    }
}

}  // namespace

TomoProtocol make_protocol(const std::string& name, const std::array<TomoSetting, 16>& settings) {
    TomoProtocol p{name, settings, {}};
    // Gram matrix of the projectors; full rank guarantees invertibility of
    // the design system and the existence of an exact completeness
    // combination sum_i w_i Pi_i = identity.
    std::vector<double> gram(16 * 16);
    std::vector<double> ones(16);
    for (int i = 0; i < 16; ++i) {
        ones[static_cast<std::size_t>(i)] = p.settings[static_cast<std::size_t>(i)].projector.trace().real();
        for (int j = 0; j < 16; ++j)
            gram[static_cast<std::size_t>(i * 16 + j)] =
                real_trace_product(p.settings[static_cast<std::size_t>(i)].projector,
                                   p.settings[static_cast<std::size_t>(j)].projector);
    }
    std::vector<cplx> gc(16 * 16);
    for (std::size_t k = 0; k < gram.size(); ++k) gc[k] = gram[k];
    const HermEig ge = hermitian_eigen(std::move(gc), 16);
    if (ge.values.back() < 1e-9)
        throw validation_error("make_protocol: projectors are not linearly independent (Gram rank < 16)");
    std::vector<double> w;
    try {
        w = lu_solve(gram, ones, 16);
    } catch (const numeric_error&) {
        throw validation_error("make_protocol: singular Gram system");
    }
    Mat4 resolved;
    for (int i = 0; i < 16; ++i) {
        p.completeness_weights[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)];
        resolved = resolved + p.settings[static_cast<std::size_t>(i)].projector * w[static_cast<std::size_t>(i)];
    }
    if (resolved.frobenius_distance(Mat4::identity()) > 1e-8)
        throw numeric_error("make_protocol: completeness combination failed");
    return p;
}

TomoProtocol j16_protocol() {
    static const TomoProtocol proto = [] {
        const std::array<std::string, 16> labels{"HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
                                                 "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};
        std::array<TomoSetting, 16> s{};
        for (int i = 0; i < 16; ++i) {
            const std::string& l = labels[static_cast<std::size_t>(i)];
            const Ket2 a = single_ket(l[0]);
            const Ket2 b = single_ket(l[1]);
            s[static_cast<std::size_t>(i)] = TomoSetting{l, a, b, product_projector(a, b)};
        }
        return make_protocol("J16", s);
    }();
    return proto;
}

TomoProtocol r16_protocol() {
    static const TomoProtocol proto = [] {
        // Bloch vectors of a regular tetrahedron.
        const double c = 1.0 / std::sqrt(3.0);
        const std::array<std::array<double, 3>, 4> bloch{{{c, c, c}, {c, -c, -c}, {-c, c, -c}, {-c, -c, c}}};
        std::array<Ket2, 4> kets{};
        for (int t = 0; t < 4; ++t) {
            const auto& n = bloch[static_cast<std::size_t>(t)];
            const double theta = std::acos(n[2]);
            const double phi = std::atan2(n[1], n[0]);
            kets[static_cast<std::size_t>(t)] = {std::cos(theta / 2.0),
                                                 std::polar(std::sin(theta / 2.0), phi)};
        }
        std::array<TomoSetting, 16> s{};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const std::string label = "T" + std::to_string(a + 1) + "T" + std::to_string(b + 1);
                s[static_cast<std::size_t>(4 * a + b)] =
                    TomoSetting{label, kets[static_cast<std::size_t>(a)], kets[static_cast<std::size_t>(b)],
                                product_projector(kets[static_cast<std::size_t>(a)], kets[static_cast<std::size_t>(b)])};
            }
        return make_protocol("R16", s);
    }();
    return proto;
}

TomoData simulate_tomo_counts(const DensityMatrix& rho, const TomoProtocol& protocol, double budget,
                              std::mt19937_64& eng) {
    if (!(budget > 0.0)) throw validation_error("simulate_tomo_counts: budget must be positive");
    std::array<double, 16> born{};
    double norm = 0.0;
    for (int i = 0; i < 16; ++i) {
        born[static_cast<std::size_t>(i)] =
            std::max(0.0, real_trace_product(rho.matrix(), protocol.settings[static_cast<std::size_t>(i)].projector));
        norm += born[static_cast<std::size_t>(i)];
    }
    TomoData data{{}, protocol, 1.0};
    for (int i = 0; i < 16; ++i)
        data.counts[static_cast<std::size_t>(i)] =
            poisson_draw(budget * born[static_cast<std::size_t>(i)] / norm, eng);
    return data;
}

Mat4 reconstruct_from_frequencies(const std::array<double, 16>& freqs, const TomoProtocol& protocol) {
    const auto& basis = pauli_basis();
    std::vector<double> design(16 * 16);
    std::vector<double> rhs(16);
    for (int i = 0; i < 16; ++i) {
        rhs[static_cast<std::size_t>(i)] = freqs[static_cast<std::size_t>(i)];
        for (int mu = 0; mu < 16; ++mu)
            design[static_cast<std::size_t>(i * 16 + mu)] =
                0.25 * real_trace_product(protocol.settings[static_cast<std::size_t>(i)].projector,
                                          basis[static_cast<std::size_t>(mu)]);
    }
    std::vector<double> coeff;
    try {
        coeff = lu_solve(std::move(design), std::move(rhs), 16);
    } catch (const numeric_error&) {
        throw numeric_error("reconstruct_linear: singular design matrix");
    }
    Mat4 rho;
    for (int mu = 0; mu < 16; ++mu)
        rho = rho + pauli_basis()[static_cast<std::size_t>(mu)] * (0.25 * coeff[static_cast<std::size_t>(mu)]);
    rho = (rho + rho.adjoint()) * 0.5;
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-6)
        throw numeric_error("reconstruct_linear: normalized data did not produce unit trace");
    rho = rho * (1.0 / tr);
    return rho;
}

Mat4 reconstruct_linear(const TomoData& data) {
    double intensity = 0.0;
    for (int i = 0; i < 16; ++i)
        intensity += data.protocol.completeness_weights[static_cast<std::size_t>(i)] *
                     static_cast<double>(data.counts[static_cast<std::size_t>(i)]);
    if (!(intensity > 0.0))
        throw validation_error("reconstruct_linear: degenerate data (estimated intensity <= 0)");
    std::array<double, 16> freqs{};
    for (int i = 0; i < 16; ++i)
        freqs[static_cast<std::size_t>(i)] = static_cast<double>(data.counts[static_cast<std::size_t>(i)]) / intensity;
    return reconstruct_from_frequencies(freqs, data.protocol);
}

DensityMatrix project_physical(const Mat4& raw) {
    if (raw.hermiticity_defect() > 1e-10)
        throw validation_error("project_physical: input not Hermitian within 1e-10");
    if (std::abs(raw.trace() - cplx{1.0, 0.0}) > 1e-8)
        throw validation_error("project_physical: input trace must be 1");
    const Spectrum spec = eigendecompose(raw);
    // Euclidean projection of the eigenvalues onto the probability simplex
    // (shift-and-clip): find the largest k with lam_k > (sum_{i<=k} lam_i - 1)/k.
    std::array<double, 4> lam = spec.eigenvalues;  // already descending
    double cumulative = 0.0;
    double tau = 0.0;
    for (int k = 0; k < 4; ++k) {
        cumulative += lam[static_cast<std::size_t>(k)];
        const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (lam[static_cast<std::size_t>(k)] - t > 0.0) tau = t;
    }
    Mat4 rho;
    for (int k = 0; k < 4; ++k) {
        const double l = std::max(0.0, lam[static_cast<std::size_t>(k)] - tau);
        if (l > 0.0) rho = rho + spec.eigenvectors[static_cast<std::size_t>(k)].outer() * l;
    }
    // exact unit trace despite rounding
    const double tr = rho.trace().real();
    rho = rho * (1.0 / tr);
    return DensityMatrix(rho);
}

ReconstructionResult tomo_negativity(const TomoData& data, int bootstrap_B, std::mt19937_64& eng,
                                     const DensityMatrix* reference) {
    if (bootstrap_B < 2) throw validation_error("tomo_negativity: bootstrap_B must be >= 2");
    const Mat4 raw = reconstruct_linear(data);
    ReconstructionResult out{raw, project_physical(raw), 0.0, 0.0, std::nullopt};
    out.negativity = negativity(out.rho_physical);
    if (reference) out.fidelity_vs_reference = fidelity(out.rho_physical, *reference);

    std::vector<double> resampled;
    resampled.reserve(static_cast<std::size_t>(bootstrap_B));
    for (int b = 0; b < bootstrap_B; ++b) {
        TomoData boot = data;
        for (int i = 0; i < 16; ++i)
            boot.counts[static_cast<std::size_t>(i)] =
                poisson_draw(static_cast<double>(data.counts[static_cast<std::size_t>(i)]), eng);
        try {
            resampled.push_back(negativity(project_physical(reconstruct_linear(boot))));
        } catch (const validation_error&) {
            // a resample with empty data carries no estimate; skip
        }
    }
    if (resampled.size() >= 2) {
        double mean = 0.0;
        for (double v : resampled) mean += v;
        mean /= static_cast<double>(resampled.size());
        double ss = 0.0;
        for (double v : resampled) ss += (v - mean) * (v - mean);
        out.negativity_sigma = std::sqrt(ss / static_cast<double>(resampled.size() - 1));
    }
    return out;
}

std::string protocol_to_json(const TomoProtocol& protocol) {
    nlohmann::json j;
    j["name"] = protocol.name;
    nlohmann::json settings = nlohmann::json::array();
    for (const auto& s : protocol.settings) {
        nlohmann::json e;
        e["label"] = s.label;
        e["qubit_a"] = {s.qubit_a[0].real(), s.qubit_a[0].imag(), s.qubit_a[1].real(), s.qubit_a[1].imag()};
        e["qubit_b"] = {s.qubit_b[0].real(), s.qubit_b[0].imag(), s.qubit_b[1].real(), s.qubit_b[1].imag()};
        settings.push_back(e);
    }
    j["settings"] = settings;
    return j.dump(2);
}

}  // namespace qent
