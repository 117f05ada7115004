#include "qent/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace qent {

namespace {

constexpr double kSingularTol = 1e-9;

void check_population_setting(const MeasurementSetting& s) {
    const MeasurementSetting c = s.canonical();
    const double pi = 3.14159265358979323846;
    auto near = [](double x, double y) { return std::abs(x - y) < 1e-9; };
    const bool ok = (near(c.alpha, 0.0) || near(c.alpha, pi)) && (near(c.beta, 0.0) || near(c.beta, pi));
    if (!ok)
        throw validation_error("expected a population window taken at setting (0, 0)");
}

}  // namespace

VisibilityValue visibility(const CoincidenceVector& k) {
    const std::int64_t K = k.total();
    if (K <= 0) throw validation_error("visibility: empty window (K = 0)");
    const double v = static_cast<double>(k.counts[0] - k.counts[1] - k.counts[2] + k.counts[3]) /
                     static_cast<double>(K);
    return VisibilityValue{v, k.setting, K};
}

namespace {

double epsilon_hat_from_visibility(double v, const MeasurementSetting& setting) {
    const double c2a = std::cos(2.0 * setting.alpha);
    const double c2b = std::cos(2.0 * setting.beta);
    const double s2a = std::sin(2.0 * setting.alpha);
    const double s2b = std::sin(2.0 * setting.beta);
    if (std::abs(s2a) < kSingularTol)
        throw validation_error("epsilon_hat: sin(2 alpha) vanishes at this setting");
    if (std::abs(s2b) < kSingularTol)
        throw validation_error("epsilon_hat: sin(2 beta) vanishes at this setting");
    return (v - c2a * c2b) / (s2a * s2b);
}

}  // namespace

double epsilon_hat(const CoincidenceVector& k) {
    return epsilon_hat_from_visibility(visibility(k).value, k.setting);
}

double epsilon_hat_from_probs(const std::array<double, 4>& probs, const MeasurementSetting& setting) {
    const double v = probs[0] - probs[1] - probs[2] + probs[3];
    return epsilon_hat_from_visibility(v, setting);
}

double clamp_to_physical(double eps) { return std::clamp(eps, 0.0, 1.0); }

double p_hat_decoherence(const CoincidenceVector& r, const CoincidenceVector& k) {
    check_population_setting(r.setting);
    const double r0 = static_cast<double>(r.counts[0]);
    const double r3 = static_cast<double>(r.counts[3]);
    if (r0 <= 0.0 || r3 <= 0.0)
        throw validation_error("p_hat_decoherence: degenerate populations (r0 r3 = 0)");
    const double R = static_cast<double>(r.total());
    return 0.5 * epsilon_hat(k) * R / std::sqrt(r0 * r3);
}

std::pair<double, double> werner_estimators(const CoincidenceVector& k, const CoincidenceVector& r) {
    check_population_setting(r.setting);
    // the correlation window must sit at a +-pi/4-type setting where
    // cos(2a)cos(2b) = 0 and sin(2a)sin(2b) = +1
    const double s2a = std::sin(2.0 * k.setting.alpha);
    const double s2b = std::sin(2.0 * k.setting.beta);
    const double c2a = std::cos(2.0 * k.setting.alpha);
    const double c2b = std::cos(2.0 * k.setting.beta);
    if (std::abs(s2a * s2b - 1.0) > 1e-9 || std::abs(c2a * c2b) > 1e-9)
        throw validation_error("werner_estimators: correlation window must be at (-pi/4, -pi/4) or (pi/4, pi/4)");
    const double v00 = visibility(r).value;
    const double vqc = visibility(k).value;
    const double p_hat = v00;
    const double eps_hat = -0.5 + 0.5 * v00 + vqc;
    return {p_hat, eps_hat};
}

double reference_epsilon(ModelKind kind, double p_est, double phi) {
    if (!std::isfinite(p_est) || p_est < 0.0 || p_est > 1.05)
        throw validation_error("reference_epsilon: p estimate outside [0, 1.05]");
    const double s2phi = std::sin(2.0 * phi);
    if (kind == ModelKind::Decoherence) return p_est * s2phi;
    // Werner closed form at q = cos^2(phi): sqrt(q(1-q)) = |sin(2 phi)|/2
    return std::max(0.0, 0.5 * (p_est * (1.0 + 2.0 * std::abs(s2phi)) - 1.0));
}

std::pair<double, double> sample_stats(std::span<const double> values) {
    if (values.empty()) throw validation_error("sample_stats: no values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() < 2) throw validation_error("sample_stats: variance undefined for a single value");
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, ss / static_cast<double>(values.size() - 1)};
}

double propagated_variance(const std::array<double, 4>& mean_counts,
                           const std::array<double, 4>& count_variances) {
    for (double v : count_variances)
        if (v < 0.0) throw validation_error("propagated_variance: negative variance");
    const double K = mean_counts[0] + mean_counts[1] + mean_counts[2] + mean_counts[3];
    if (!(K > 0.0)) throw validation_error("propagated_variance: mean total must be positive");
    const double a = mean_counts[0] + mean_counts[3];
    const double b = mean_counts[1] + mean_counts[2];
    const double va = count_variances[0] + count_variances[3];
    const double vb = count_variances[1] + count_variances[2];
    return 4.0 / (K * K * K * K) * (a * a * vb + b * b * va);
}

}  // namespace qent
