// Acceptance suite: one line per shipped criterion, pass/fail with the
// measured figure and runtime. Exit code is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qent/experiments.hpp"

using namespace qent;

namespace {

const double kPi = 3.14159265358979323846;

struct Outcome {
    bool pass;
    std::string detail;
};

double max_rel_dev(const InfoMatrix& a, const InfoMatrix& b) {
    double scale = 0.0;
    for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) scale = std::max(scale, std::abs(b.at(i, j)));
    double dev = 0.0;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) {
            const double denom = std::max(std::abs(b.at(i, j)), 1e-3 * scale);
            dev = std::max(dev, std::abs(a.at(i, j) - b.at(i, j)) / denom);
        }
    return dev;
}

// 1. numerical QFI (spectral formula, finite differences) vs closed forms
Outcome criterion_qfi_equivalence() {
    double worst = 0.0;
    for (const ModelKind kind : {ModelKind::Decoherence, ModelKind::Werner}) {
        for (int ip = 1; ip <= 9; ++ip) {
            for (int iq = 1; iq <= 9; ++iq) {
                const double p = ip / 10.0, q = iq / 10.0;
                const InfoMatrix numeric = qfi(model_family(kind), ParamVector({p, q}, {"p", "q"}));
                const InfoMatrix closed = qfi_closed_form(kind, ModelPoint(p, q));
                worst = std::max(worst, max_rel_dev(numeric, closed));
            }
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max rel dev %.3g (tol 1e-5)", worst);
    return {worst <= 1e-5, buf};
}

// 2. closed-form negativities vs the trace-norm definition
Outcome criterion_negativity_equivalence() {
    double worst = 0.0;
    for (const ModelKind kind : {ModelKind::Decoherence, ModelKind::Werner}) {
        for (int ip = 1; ip <= 9; ++ip) {
            for (int iq = 1; iq <= 9; ++iq) {
                const ModelPoint pt(ip / 10.0, iq / 10.0);
                const double closed = model_negativity(kind, pt);
                const double def = negativity(model_state(kind, pt));
                worst = std::max(worst, std::abs(closed - def));
            }
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max abs dev %.3g (tol 1e-10)", worst);
    return {worst <= 1e-10, buf};
}

// 3. classical Fisher of Pi_x(pi/4, pi/4) saturates 1/(1 - eps^2)
Outcome criterion_fisher_saturation() {
    const double p_fixed = 0.95;
    const MeasurementSetting diag(kPi / 4.0, kPi / 4.0);
    double worst = 0.0;
    for (int ie = 1; ie <= 9; ++ie) {
        const double eps = ie / 10.0;
        const ProbFn probs = [&](const ParamVector& l) {
            const double q = epsilon_to_q(ModelKind::Decoherence, p_fixed, l.values[0]);
            const auto arr = born_probabilities(decoherence_state(ModelPoint(p_fixed, q)), diag);
            return std::vector<double>(arr.begin(), arr.end());
        };
        const double f = classical_fisher(probs, ParamVector({eps}, {"eps"})).at(0, 0);
        const double target = 1.0 / (1.0 - eps * eps);
        worst = std::max(worst, std::abs(f - target) / target);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max rel dev %.3g (tol 1e-6)", worst);
    return {worst <= 1e-6, buf};
}

// 4. Cramer-Rao saturation at desk scale, both models
Outcome criterion_cr_saturation() {
    const int M = 40, reps = 200;
    const double band_halfwidth = 3.0 * std::sqrt(2.0 / (M - 1));
    std::string detail;
    bool pass = true;
    for (const ModelKind kind : {ModelKind::Decoherence, ModelKind::Werner}) {
        ExperimentConfig cfg;
        cfg.experiment = ExperimentKind::SaturationSweep;
        cfg.model = kind;
        for (double q : {0.97, 0.93, 0.88, 0.78, 0.5}) cfg.points.emplace_back(1.0, q);
        cfg.M = M;
        cfg.rate = 500.0;
        cfg.window_seconds = 10.0;
        cfg.replications = reps;
        cfg.seed = 424244;
        const auto rows = run_saturation_sweep(cfg);

        int inside = 0, total = 0;
        double worst_mean_dev = 0.0;
        for (std::size_t pi = 0; pi < cfg.points.size(); ++pi) {
            const double T = rows[pi * reps].qfi_bound;
            double mean = 0.0;
            for (int r = 0; r < reps; ++r) {
                const double v = rows[pi * reps + static_cast<std::size_t>(r)].var_normalized;
                mean += v;
                if (std::abs(v - T) <= band_halfwidth * T + 1e-12) ++inside;
                ++total;
            }
            mean /= reps;
            const double dev = T > 0.0 ? std::abs(mean - T) / T : std::abs(mean);
            worst_mean_dev = std::max(worst_mean_dev, dev);
            if (dev > 0.10) pass = false;
        }
        const double frac = static_cast<double>(inside) / total;
        if (frac < 0.99) pass = false;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s[%s: worst mean dev %.1f%%, band coverage %.1f%%]",
                      detail.empty() ? "" : " ", model_name(kind), 100.0 * worst_mean_dev,
                      100.0 * frac);
        detail += buf;
    }
    return {pass, detail};
}

// 5. mixture sweeps: unbiased means, normalized variance near the band
Outcome criterion_mixtures() {
    const int reps = 800;
    bool pass = true;
    std::string detail;
    const std::vector<std::pair<ModelKind, std::vector<double>>> grids{
        {ModelKind::Decoherence, {0.995, 0.83, 0.74, 0.50, 0.33}},
        {ModelKind::Werner, {0.995, 0.76, 0.62, 0.52, 0.45}}};
    for (const auto& [kind, fractions] : grids) {
        ExperimentConfig cfg;
        cfg.experiment = ExperimentKind::MixtureSweep;
        cfg.model = kind;
        for (double p : fractions) cfg.points.emplace_back(p, 0.5);
        cfg.M = 40;
        cfg.rate = 500.0;
        cfg.window_seconds = 10.0;
        cfg.replications = reps;
        cfg.seed = 424245;
        const auto rows = run_mixture_sweep(cfg);
        double worst_bias_sigma = 0.0;
        std::string var_devs;
        for (std::size_t pi = 0; pi < cfg.points.size(); ++pi) {
            const double eps = rows[pi * reps].epsilon_true;
            double mean = 0.0, mean_sq = 0.0, var_norm = 0.0;
            for (int r = 0; r < reps; ++r) {
                const auto& row = rows[pi * reps + static_cast<std::size_t>(r)];
                mean += row.epsilon_hat_mean;
                mean_sq += row.epsilon_hat_mean * row.epsilon_hat_mean;
                var_norm += row.var_normalized;
            }
            mean /= reps;
            var_norm /= reps;
            const double sd = std::sqrt(std::max(0.0, (mean_sq - reps * mean * mean) / (reps - 1.0)));
            const double se = sd / std::sqrt(static_cast<double>(reps));
            const double bias_sigma = se > 0.0 ? std::abs(mean - eps) / se : 0.0;
            worst_bias_sigma = std::max(worst_bias_sigma, bias_sigma);
            if (bias_sigma > 3.0) pass = false;
            const double T = 1.0 - eps * eps;
            const double var_dev = (var_norm - T) / T;
            if (std::abs(var_dev) > 0.15) pass = false;
            char pb[48];
            std::snprintf(pb, sizeof pb, "%s%+.1f%%", var_devs.empty() ? "" : " ",
                          100.0 * var_dev);
            var_devs += pb;
        }
        char buf[220];
        std::snprintf(buf, sizeof buf, "%s[%s: worst bias %.2f sigma, var devs %s]",
                      detail.empty() ? "" : " ", model_name(kind), worst_bias_sigma,
                      var_devs.c_str());
        detail += buf;
    }
    return {pass, detail};
}

// 6. tomography comparison at matched total counts
Outcome criterion_table_comparison() {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::TomoCompare;
    cfg.model = ModelKind::Decoherence;
    cfg.points.emplace_back(0.97, 0.5);
    cfg.M = 40;
    cfg.rate = 500.0;
    cfg.window_seconds = 10.0;
    cfg.bootstrap = 200;
    cfg.seed = 424246;
    const TomoCompareResult res = run_tomo_compare(cfg);
    const auto& opt = res.rows[0];
    const auto& j16 = res.rows[1];
    const auto& r16 = res.rows[2];
    const double ratio_j = j16.delta_epsilon / opt.delta_epsilon;
    const double ratio_r = r16.delta_epsilon / opt.delta_epsilon;
    bool pass = opt.delta_epsilon < j16.delta_epsilon && opt.delta_epsilon < r16.delta_epsilon &&
                ratio_j >= 2.0 && ratio_r >= 2.0;
    auto compatible = [](const TomoMethodRow& a, const TomoMethodRow& b) {
        return std::abs(a.epsilon - b.epsilon) <=
               3.0 * std::sqrt(a.delta_epsilon * a.delta_epsilon + b.delta_epsilon * b.delta_epsilon);
    };
    if (!compatible(opt, j16) || !compatible(opt, r16) || !compatible(j16, r16)) pass = false;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "opt %.4f+-%.4f, J16 %.3f+-%.3f, R16 %.3f+-%.3f, ratios %.1fx/%.1fx",
                  opt.epsilon, opt.delta_epsilon, j16.epsilon, j16.delta_epsilon, r16.epsilon,
                  r16.delta_epsilon, ratio_j, ratio_r);
    return {pass, buf};
}

// 7. tomography round trip: exact and finite-budget fidelity
Outcome criterion_tomo_roundtrip() {
    std::mt19937_64 eng = SeedKey{424247}.engine();
    std::uniform_real_distribution<double> u(0.05, 0.95);
    double worst_exact = 1.0;
    std::vector<double> fidelities;
    for (const TomoProtocol& proto : {j16_protocol(), r16_protocol()}) {
        for (int trial = 0; trial < 100; ++trial) {
            const DensityMatrix rho = (trial % 2 == 0)
                                          ? decoherence_state(ModelPoint(u(eng), u(eng)))
                                          : werner_state(ModelPoint(u(eng), u(eng)));
            std::array<double, 16> freq{};
            for (int i = 0; i < 16; ++i)
                freq[static_cast<std::size_t>(i)] =
                    (rho.matrix() * proto.settings[static_cast<std::size_t>(i)].projector).trace().real();
            const DensityMatrix rec = project_physical(reconstruct_from_frequencies(freq, proto));
            worst_exact = std::min(worst_exact, fidelity(rec, rho));

            const TomoData data = simulate_tomo_counts(rho, proto, 1e6, eng);
            fidelities.push_back(fidelity(project_physical(reconstruct_linear(data)), rho));
        }
    }
    std::sort(fidelities.begin(), fidelities.end());
    const double median = fidelities[fidelities.size() / 2];
    char buf[160];
    std::snprintf(buf, sizeof buf, "worst exact fidelity 1-%.2g, median fidelity %.5f at 1e6 counts",
                  1.0 - worst_exact, median);
    return {worst_exact >= 1.0 - 1e-10 && median >= 0.99, buf};
}

// 8. propagated variance collapses to (1 - eps^2)/K under Poisson statistics
Outcome criterion_variance_collapse() {
    std::mt19937_64 eng = SeedKey{424248}.engine();
    std::uniform_real_distribution<double> u(1.0, 10000.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::array<double, 4> k{u(eng), u(eng), u(eng), u(eng)};
        const double K = k[0] + k[1] + k[2] + k[3];
        const double v = (k[0] - k[1] - k[2] + k[3]) / K;
        worst = std::max(worst, std::abs(propagated_variance(k, k) - (1.0 - v * v) / K));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "max abs dev %.3g (tol 1e-12)", worst);
    return {worst <= 1e-12, buf};
}

// 9. Fano diagnostic and estimator robustness under inflation
Outcome criterion_fano() {
    ExperimentConfig diag;
    diag.experiment = ExperimentKind::FanoCheck;
    diag.model = ModelKind::Decoherence;
    diag.points.emplace_back(0.9, 0.5);
    diag.M = 10000;
    diag.rate = 500.0;
    diag.window_seconds = 10.0;
    diag.replications = 1;
    diag.inflations = {1.0, 2.0};
    diag.seed = 424249;
    const auto rows = run_fano_check(diag);
    const bool poisson_ok = std::abs(rows[0].fano_channels - 1.0) <= 0.05;
    const bool inflated_ok = std::abs(rows[1].fano_channels - 2.0) <= 0.10;

    ExperimentConfig robust = diag;
    robust.M = 40;
    robust.replications = 300;
    robust.inflations = {1.5};
    robust.seed = 424250;
    const auto rrows = run_fano_check(robust);
    const double T = rrows[0].qfi_bound;
    const double corrected_dev = std::abs(rrows[0].var_norm_corrected - T) / T;
    const bool robust_ok = corrected_dev <= 0.20;

    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "F(1.0) = %.3f, F(2.0) = %.3f; inflation 1.5: Var*K/F = %.4f vs band %.4f "
                  "(dev %.1f%%, raw Var*K = %.4f)",
                  rows[0].fano_channels, rows[1].fano_channels, rrows[0].var_norm_corrected, T,
                  100.0 * corrected_dev, rrows[0].var_normalized);
    return {poisson_ok && inflated_ok && robust_ok, buf};
}

// 10. phase scan equals (1 + cos Phi)/4 with extrema at 0 and pi
Outcome criterion_phase_scan() {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::PhaseScan;
    cfg.phase_points = 100;
    const auto rows = run_phase_scan_rows(cfg);
    double worst = 0.0;
    std::size_t argmax = 0, argmin = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        worst = std::max(worst, std::abs(rows[i].p0 - rows[i].closed_form));
        if (rows[i].p0 > rows[argmax].p0) argmax = i;
        if (rows[i].p0 < rows[argmin].p0) argmin = i;
    }
    const bool extrema_ok = argmax == 0 && std::abs(rows[argmin].Phi - kPi) <= 2.0 * kPi / 100.0 + 1e-12;
    char buf[160];
    std::snprintf(buf, sizeof buf, "max abs dev %.3g (tol 1e-12), max at Phi=%.3f, min at Phi=%.3f",
                  worst, rows[argmax].Phi, rows[argmin].Phi);
    return {worst <= 1e-12 && extrema_ok, buf};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double time_budget_s;  // 0: no stated budget
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "qfi-oracle-equivalence", 5.0, criterion_qfi_equivalence},
        {2, "negativity-oracle-equivalence", 1.0, criterion_negativity_equivalence},
        {3, "fisher-saturation", 0.0, criterion_fisher_saturation},
        {4, "cramer-rao-saturation-desk-scale", 60.0, criterion_cr_saturation},
        {5, "mixture-sweeps", 0.0, criterion_mixtures},
        {6, "tomography-comparison", 0.0, criterion_table_comparison},
        {7, "tomography-round-trip", 0.0, criterion_tomo_roundtrip},
        {8, "variance-collapse-identity", 0.0, criterion_variance_collapse},
        {9, "fano-diagnostic", 0.0, criterion_fano},
        {10, "phase-scan", 0.0, criterion_phase_scan},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out{false, ""};
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = out.pass;
        std::string budget_note;
        if (c.time_budget_s > 0.0) {
            if (secs >= c.time_budget_s) pass = false;
            char buf[64];
            std::snprintf(buf, sizeof buf, ", budget %.0fs", c.time_budget_s);
            budget_note = buf;
        }
        std::printf("[%s] %02d %s: %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str(), secs, budget_note.c_str());
        if (!pass) ++failures;
    }
    if (failures == 0) std::printf("acceptance: all %zu criteria passed\n", criteria.size());
    else std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
    return failures;
}
