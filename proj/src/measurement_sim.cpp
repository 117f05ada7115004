#include "qent/measurement_sim.hpp"

#include <cmath>

namespace qent {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

MeasurementSetting::MeasurementSetting(double a, double b) : alpha(a), beta(b) {
    if (!std::isfinite(alpha) || !std::isfinite(beta))
        throw validation_error("MeasurementSetting: non-finite angle");
}

MeasurementSetting MeasurementSetting::canonical() const {
    auto wrap = [](double x) {
        double y = std::fmod(x, kPi);
        if (y < 0.0) y += kPi;
        return y;
    };
    return MeasurementSetting(wrap(alpha), wrap(beta));
}

void SourceConfig::validate() const {
    if (!(mean_total_rate > 0.0)) throw validation_error("SourceConfig: rate must be positive");
    if (windows < 1) throw validation_error("SourceConfig: needs at least one window");
    if (!(window_seconds > 0.0)) throw validation_error("SourceConfig: window length must be positive");
    if (!(fano_inflation >= 1.0)) throw validation_error("SourceConfig: fano_inflation must be >= 1");
}

DensityMatrix projector(int x, const MeasurementSetting& setting) {
    if (x < 0 || x > 3) throw validation_error("projector: outcome index must be 0..3");
    const int s = x & 1;
    const int sp = x >> 1;
    const double ta = setting.alpha + s * kPi / 2.0;
    const double tb = setting.beta + sp * kPi / 2.0;
    const Ket2 a{std::cos(ta), std::sin(ta)};
    const Ket2 b{std::cos(tb), std::sin(tb)};
    return DensityMatrix::pure(tensor(a, b));
}

std::array<double, 4> born_probabilities(const DensityMatrix& rho, const MeasurementSetting& setting) {
    std::array<double, 4> p{};
    for (int x = 0; x < 4; ++x) {
        const Mat4 prod = rho.matrix() * projector(x, setting).matrix();
        p[static_cast<std::size_t>(x)] = std::max(0.0, prod.trace().real());
    }
    return p;
}

CoincidenceVector sample_window(const std::array<double, 4>& probs, double mean_total,
                                std::mt19937_64& eng, const MeasurementSetting& setting,
                                double window_seconds, double inflation) {
    if (mean_total < 0.0) throw validation_error("sample_window: negative mean");
    if (!(inflation >= 1.0)) throw validation_error("sample_window: inflation must be >= 1");
    CoincidenceVector out{{0, 0, 0, 0}, setting, window_seconds};
    for (int x = 0; x < 4; ++x) {
        std::int64_t k = poisson_draw(mean_total * probs[static_cast<std::size_t>(x)], eng);
        if (inflation != 1.0) k = std::llround(inflation * static_cast<double>(k));
        out.counts[static_cast<std::size_t>(x)] = k;
    }
    return out;
}

std::vector<CoincidenceVector> run_acquisition(const SourceConfig& cfg,
                                               const MeasurementSetting& setting) {
    cfg.validate();
    const DensityMatrix rho = model_state(cfg.kind, cfg.point);
    const std::array<double, 4> probs = born_probabilities(rho, setting);
    const double mean_total = cfg.mean_total_rate * cfg.window_seconds;
    const SeedKey root{cfg.seed};
    std::vector<CoincidenceVector> windows;
    windows.reserve(static_cast<std::size_t>(cfg.windows));
    for (int j = 0; j < cfg.windows; ++j) {
        std::mt19937_64 eng = root.child(static_cast<std::uint64_t>(j)).engine();
        windows.push_back(
            sample_window(probs, mean_total, eng, setting, cfg.window_seconds, cfg.fano_inflation));
    }
    return windows;
}

std::vector<std::pair<double, double>> phase_scan(const std::vector<double>& Phi_grid) {
    const MeasurementSetting diag(kPi / 4.0, kPi / 4.0);
    std::vector<std::pair<double, double>> out;
    out.reserve(Phi_grid.size());
    for (double Phi : Phi_grid) {
        const Ket psi = pure_state(PhasePoint(kPi / 4.0, Phi));
        const double p0 = born_probabilities(DensityMatrix::pure(psi), diag)[0];
        out.emplace_back(Phi, p0);
    }
    return out;
}

double fano_factor(const std::vector<std::int64_t>& samples) {
    if (samples.size() < 2) throw validation_error("fano_factor: needs at least two samples");
    double mean = 0.0;
    for (std::int64_t s : samples) mean += static_cast<double>(s);
    mean /= static_cast<double>(samples.size());
    if (mean == 0.0) throw validation_error("fano_factor: undefined for zero mean");
    double ss = 0.0;
    for (std::int64_t s : samples) {
        const double d = static_cast<double>(s) - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(samples.size() - 1);
    return var / mean;
}

}  // namespace qent
