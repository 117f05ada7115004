// Local estimation theory: classical Fisher information of a measurement,
// symmetric logarithmic derivatives, quantum Fisher information via the
// spectral formula, closed forms for the two state families, chart changes
// and Cramér-Rao bounds.
#pragma once

#include <functional>

#include "qent/quantum_core.hpp"
#include "qent/state_models.hpp"

namespace qent {

/// Parameter point lambda with unique labels.
struct ParamVector {
    std::vector<double> values;
    std::vector<std::string> labels;

    ParamVector(std::vector<double> v, std::vector<std::string> l);
    explicit ParamVector(std::vector<double> v);

    int size() const { return static_cast<int>(values.size()); }
    ParamVector shifted(int i, double delta) const;
};

enum class InfoKind { ClassicalFisher, QuantumFisher };

/// Symmetric (1e-10) positive semidefinite (-1e-9) information matrix.
class InfoMatrix {
public:
    InfoMatrix(std::vector<double> entries, int n, InfoKind kind);

    double at(int i, int j) const { return e_[static_cast<std::size_t>(i * n_ + j)]; }
    int size() const { return n_; }
    InfoKind kind() const { return kind_; }
    const std::vector<double>& entries() const { return e_; }

private:
    std::vector<double> e_;
    int n_;
    InfoKind kind_;
};

/// Hermitian L_i with Tr[rho L_i] = 0, solving d_i rho = (L_i rho + rho L_i)/2.
struct SLDOperator {
    Mat4 entries;
    int param_index;
};

/// Differentiable statistical model lambda -> rho_lambda.
struct StateFamily {
    std::function<DensityMatrix(const ParamVector&)> state_fn;
    double fd_step = 1e-6;
};

/// (p, q) charts of the two families.
StateFamily decoherence_family();
StateFamily werner_family();
StateFamily model_family(ModelKind kind);

using ProbFn = std::function<std::vector<double>(const ParamVector&)>;

/// Discrete-outcome Fisher matrix, central finite differences with step h.
/// An outcome with vanishing probability but non-vanishing derivative raises
/// numeric_error (singular model).
InfoMatrix classical_fisher(const ProbFn& probs, const ParamVector& lambda, double h = 1e-6);

/// SLD from the spectral formula; kernel-sector terms (p_n + p_m below
/// 1e-12) are skipped.
SLDOperator sld(const StateFamily& family, const ParamVector& lambda, int i);

/// QFI from eigenvalue/eigenvector derivatives. Derivatives use central
/// differences with the family step; eigenvector derivative terms are
/// evaluated through finite differences of spectral projectors, which keeps
/// quasi-degenerate subspaces (gap < 1e-8) well defined. An eigenvalue
/// crossing inside the stencil raises numeric_error.
InfoMatrix qfi(const StateFamily& family, const ParamVector& lambda);

/// Closed-form QFI of the families in the (p, q) chart. Raises
/// std::domain_error at singular parameter values, naming the element.
InfoMatrix qfi_closed_form(ModelKind kind, const ModelPoint& pt);

/// H' = J^T H J with J = d(old)/d(new), row-major n x n.
InfoMatrix reparametrize(const InfoMatrix& info, const std::vector<double>& jacobian);

/// (1/M) info^{-1}, row-major grid.
std::vector<double> cramer_rao_bound(const InfoMatrix& info, int M);

/// Jacobian d(p,q)/d(p,eps) for moving the closed-form QFI to the (p, eps)
/// chart. Requires an interior point (0 < eps < max reachable).
std::vector<double> pq_to_peps_jacobian(ModelKind kind, double p, double epsilon);

}  // namespace qent
