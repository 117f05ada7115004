// Parametric two-qubit state families: the pure state with relative phase,
// the decoherence model and the Werner model, with closed-form spectra and
// negativities.
#pragma once

#include "qent/quantum_core.hpp"

namespace qent {

enum class ModelKind { Decoherence, Werner };

const char* model_name(ModelKind kind);
ModelKind model_from_name(const std::string& name);

/// Point (p, q) in the two-parameter families; both in [0, 1].
struct ModelPoint {
    double p;
    double q;
    ModelPoint(double p_, double q_);
};

/// Pump waveplate angle phi in [0, pi/2] and relative phase Phi in [0, 2 pi).
struct PhasePoint {
    double phi;
    double Phi;
    PhasePoint(double phi_, double Phi_);
};

/// cos(phi)|HH> + sin(phi) e^{i Phi}|VV>.
Ket pure_state(const PhasePoint& pt);

/// sqrt(q)|HH> + sqrt(1-q)|VV> (zero relative phase).
Ket pure_state_q(double q);

/// p |psi><psi| + (1-p) D with D = q|HH><HH| + (1-q)|VV><VV|.
DensityMatrix decoherence_state(const ModelPoint& pt);

/// p |psi><psi| + (1-p)/4 identity.
DensityMatrix werner_state(const ModelPoint& pt);

DensityMatrix model_state(ModelKind kind, const ModelPoint& pt);

/// Closed-form spectrum of the decoherence state, normalized to unit trace.
/// Matches eigendecompose(decoherence_state(pt)) within 1e-10.
Spectrum decoherence_eigensystem(const ModelPoint& pt);

/// Closed-form negativity: 2 p sqrt(q(1-q)) for the decoherence family,
/// max{0, [p(1+4 sqrt(q(1-q))) - 1]/2} for the Werner family.
double model_negativity(ModelKind kind, const ModelPoint& pt);

/// Inverts the negativity at fixed p, returning the branch q <= 1/2.
/// Raises std::domain_error when epsilon is unreachable for the given p.
double epsilon_to_q(ModelKind kind, double p, double epsilon);

}  // namespace qent
