// Full state reconstruction from 16-setting projective data: the J16 and
// R16 protocols, linear inversion in the Pauli product basis, physicality
// projection and parametric-bootstrap uncertainty on the negativity.
#pragma once

#include <optional>

#include "qent/measurement_sim.hpp"

namespace qent {

/// One tomographic setting: a labelled product projector.
struct TomoSetting {
    std::string label;
    Ket2 qubit_a;
    Ket2 qubit_b;
    Mat4 projector;
};

/// A 16-setting protocol whose projectors span the full operator space.
struct TomoProtocol {
    std::string name;
    std::array<TomoSetting, 16> settings;
    // weights w with sum_i w_i Pi_i = identity, used to calibrate the
    // per-setting intensity from the data itself
    std::array<double, 16> completeness_weights;
};

/// Counts aligned with a protocol's setting order.
struct TomoData {
    std::array<std::int64_t, 16> counts;
    TomoProtocol protocol;
    double exposure_seconds = 1.0;
};

struct ReconstructionResult {
    Mat4 rho_raw;                 // linear inversion, possibly unphysical
    DensityMatrix rho_physical;   // closest density matrix
    double negativity = 0.0;
    double negativity_sigma = 0.0;
    std::optional<double> fidelity_vs_reference;
};

/// Stokes-style list HH, HV, VV, VH, RH, RV, DV, DH, DR, DD, RD, HD, VD,
/// VL, HL, RL with D = (H+V)/sqrt2, R = (H-iV)/sqrt2, L = (H+iV)/sqrt2.
TomoProtocol j16_protocol();

/// Product set of the four single-qubit states whose Bloch vectors form a
/// regular tetrahedron.
TomoProtocol r16_protocol();

/// Builds a protocol from 16 labelled single-qubit state pairs; checks that
/// the induced Gram matrix has full rank.
TomoProtocol make_protocol(const std::string& name,
                           const std::array<TomoSetting, 16>& settings);

/// Poisson counts with per-setting means proportional to Tr[rho Pi_i],
/// scaled so the expected total equals `budget`.
TomoData simulate_tomo_counts(const DensityMatrix& rho, const TomoProtocol& protocol,
                              double budget, std::mt19937_64& eng);

/// Linear inversion: intensity-normalize the counts through the
/// completeness weights, then solve the 16x16 design system in the Pauli
/// product basis. Result is Hermitian with unit trace, possibly indefinite.
Mat4 reconstruct_linear(const TomoData& data);

/// Same inversion from exact outcome frequencies.
Mat4 reconstruct_from_frequencies(const std::array<double, 16>& freqs, const TomoProtocol& protocol);

/// Closest density matrix in Frobenius norm at fixed trace: eigenvalues are
/// shifted and clipped onto the probability simplex.
DensityMatrix project_physical(const Mat4& raw);

/// Point estimate plus parametric-bootstrap standard deviation of the
/// negativity (B Poisson re-draws around the observed counts).
ReconstructionResult tomo_negativity(const TomoData& data, int bootstrap_B, std::mt19937_64& eng,
                                     const DensityMatrix* reference = nullptr);

/// JSON export: label plus the two single-qubit states as re/im pairs.
std::string protocol_to_json(const TomoProtocol& protocol);

}  // namespace qent
