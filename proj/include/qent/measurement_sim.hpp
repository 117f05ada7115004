// In-silico stand-in for the optical bench: polarization projectors
// Pi_x(alpha, beta), Born probabilities, Poissonian coincidence sampling,
// the relative-phase scan and the Fano-factor diagnostic.
#pragma once

#include <cstdint>
#include <utility>

#include "qent/rng.hpp"
#include "qent/state_models.hpp"

namespace qent {

/// Analyzer waveplate angles (radians) on the two arms.
struct MeasurementSetting {
    double alpha;
    double beta;
    MeasurementSetting(double a, double b);

    /// Angles reduced to [0, pi).
    MeasurementSetting canonical() const;
};

/// One acquisition window's four coincidence counts at a fixed setting.
struct CoincidenceVector {
    std::array<std::int64_t, 4> counts;
    MeasurementSetting setting;
    double window_seconds;

    std::int64_t total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

/// Source plus acquisition configuration for simulated runs.
struct SourceConfig {
    ModelKind kind = ModelKind::Decoherence;
    ModelPoint point{1.0, 0.5};
    double mean_total_rate = 500.0;  // coincidences per second over the 4 outcomes
    int windows = 40;
    double window_seconds = 10.0;
    std::uint64_t seed = 0;
    double fano_inflation = 1.0;  // counts scaled and rounded; Fano factor of the result

    void validate() const;
};

/// Rank-1 projector |alpha + s pi/2> <.| (x) |beta + s' pi/2> <.| with
/// x = s + 2 s', where |theta> = cos(theta)|H> + sin(theta)|V>.
DensityMatrix projector(int x, const MeasurementSetting& setting);

/// Tr[rho Pi_x] for x = 0..3; nonnegative, sums to one.
std::array<double, 4> born_probabilities(const DensityMatrix& rho, const MeasurementSetting& setting);

/// Four independent Poisson channels with means mean_total * p_x.
/// `inflation` > 1 multiplies-and-rounds each draw, raising the Fano factor
/// to approximately the inflation value while leaving visibilities intact.
CoincidenceVector sample_window(const std::array<double, 4>& probs, double mean_total,
                                std::mt19937_64& eng, const MeasurementSetting& setting,
                                double window_seconds, double inflation = 1.0);

/// M windows from per-window substreams of cfg.seed. Acquisitions at
/// different settings should be given distinct seeds by the caller.
std::vector<CoincidenceVector> run_acquisition(const SourceConfig& cfg,
                                               const MeasurementSetting& setting);

/// p0(Phi) for the pure state at phi = pi/4 measured with Pi_0(pi/4, pi/4);
/// equals (1 + cos Phi)/4.
std::vector<std::pair<double, double>> phase_scan(const std::vector<double>& Phi_grid);

/// Sample variance (unbiased) over sample mean. Needs >= 2 samples and a
/// non-zero mean.
double fano_factor(const std::vector<std::int64_t>& samples);

}  // namespace qent
