// Visibility-based entanglement estimators and their statistics: the
// quantum-correlation visibility V(alpha, beta), the optimal negativity
// estimator, the mixing-parameter estimators, Werner-model estimators,
// reference values, sample statistics and the propagated-variance formula.
#pragma once

#include <span>
#include <utility>

#include "qent/measurement_sim.hpp"

namespace qent {

/// V(alpha, beta) = (k0 - k1 - k2 + k3)/K computed from one window.
struct VisibilityValue {
    double value;
    MeasurementSetting setting;
    std::int64_t total_counts;
};

/// Summary of one M-window experiment.
struct EstimationReport {
    double mean = 0.0;
    double sample_variance = 0.0;
    int M = 0;
    double mean_total_counts = 0.0;   // <K>
    double cr_bound = 0.0;            // (1 - eps^2)/<K>, single-window bound
    double normalized_variance = 0.0; // Var * <K>
};

/// Builds the report for a sequence of per-window estimates. The bound uses
/// the sample mean when no true negativity is supplied.
EstimationReport estimation_report(std::span<const double> per_window_estimates,
                                   double mean_total_counts,
                                   std::optional<double> true_epsilon = std::nullopt);

/// Raises validation_error on an empty window.
VisibilityValue visibility(const CoincidenceVector& k);

/// (V - cos 2a cos 2b)/(sin 2a sin 2b); unbiased for the decoherence family
/// at every non-singular setting, optimal at alpha, beta = +-pi/4. Raises on
/// singular settings (|sin 2a sin 2b| < 1e-9), naming the vanishing factor.
double epsilon_hat(const CoincidenceVector& k);

/// Same estimator applied to exact outcome probabilities.
double epsilon_hat_from_probs(const std::array<double, 4>& probs, const MeasurementSetting& setting);

/// Clamp to the physical range [0, 1] for display; estimators themselves
/// are reported unclamped to preserve unbiasedness.
double clamp_to_physical(double eps);

/// Decoherence-model mixing estimator eps_hat(k) * R / (2 sqrt(r0 r3)).
/// `r` must be a population window at setting (0, 0).
double p_hat_decoherence(const CoincidenceVector& r, const CoincidenceVector& k);

/// Werner-model estimators (p', eps') from a correlation window `k` at
/// (-pi/4, -pi/4)-equivalent settings and a population window `r` at (0, 0):
/// p' = V(0,0), eps' = -1/2 + V(0,0)/2 + V(-pi/4, -pi/4).
std::pair<double, double> werner_estimators(const CoincidenceVector& k, const CoincidenceVector& r);

/// Reference negativity from an estimated mixing parameter and the pump
/// waveplate angle phi: decoherence -> p sin(2 phi); Werner -> the
/// closed-form negativity at q = cos^2(phi).
double reference_epsilon(ModelKind kind, double p_est, double phi);

/// (mean, unbiased variance). Variance requires >= 2 values.
std::pair<double, double> sample_stats(std::span<const double> values);

/// Uncertainty propagation for the visibility estimator:
/// 4/K^4 [ (k0+k3)^2 (v1+v2) + (k1+k2)^2 (v0+v3) ]. With Poissonian
/// variances v_x = k_x it collapses to (1 - eps_hat^2)/K.
double propagated_variance(const std::array<double, 4>& mean_counts,
                           const std::array<double, 4>& count_variances);

}  // namespace qent
