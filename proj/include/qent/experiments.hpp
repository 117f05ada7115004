// Config-driven experiment harness: QFI tables, Cramér-Rao saturation
// sweeps, controlled statistical mixtures, the tomography comparison, phase
// scans and the Fano diagnostic. Every run is reproducible from
// (config, seed); CSV and JSON writers live here so the CLI stays thin.
#pragma once

#include <cstdint>

#include "json.hpp"
#include "qent/estimation.hpp"
#include "qent/estimators.hpp"
#include "qent/tomography.hpp"

namespace qent {

enum class ExperimentKind { QfiTable, SaturationSweep, MixtureSweep, TomoCompare, PhaseScan, FanoCheck };

const char* experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::SaturationSweep;
    ModelKind model = ModelKind::Decoherence;
    std::vector<ModelPoint> points;
    int M = 40;                    // windows per acquisition
    double window_seconds = 10.0;  // acquisition window
    double rate = 500.0;           // mean coincidences per second (<K> ~ 5000 per window)
    std::uint64_t seed = 1;
    int replications = 1;
    std::string output_path;
    bool dump_raw = false;

    int bootstrap = 200;                              // tomo-compare resamples
    double budget = 0.0;                              // tomo-compare; 0 -> M * rate * window
    int phase_points = 100;                           // phase-scan grid size
    std::vector<double> Phi_grid;                     // phase-scan explicit grid (optional)
    std::vector<double> inflations{1.0, 1.5, 2.0};    // fano knob values

    /// Parses and validates a config document. Unknown keys are rejected;
    /// missing required fields raise validation_error naming the field.
    static ExperimentConfig from_json(const nlohmann::json& j, ExperimentKind expected);
    static ExperimentConfig from_json_file(const std::string& path, ExperimentKind expected);
};

/// One sweep outcome (a point/replication pair).
struct SweepRow {
    ModelKind model;
    double p, q;
    int replication;
    double epsilon_true;
    double epsilon_hat_mean;
    double epsilon_t;        // reference value from the mixing estimate
    double var_sample;
    double var_normalized;   // Var * <K>
    double qfi_bound;        // 1 - epsilon_true^2
    double p_hat_mean;
    double mean_K;
};

struct TomoMethodRow {
    std::string method;  // Optimal | J16 | R16
    double epsilon;
    double delta_epsilon;
    std::optional<double> fidelity;
};

struct TomoCompareResult {
    std::vector<TomoMethodRow> rows;
    double budget;
    ModelKind model;
    double p, q;
};

struct QfiTableRow {
    ModelKind model;
    double p, q;
    double h_pp = 0.0, h_qq = 0.0;          // closed-form QFI, (p, q) chart
    double inv_pp = 0.0, inv_epseps = 0.0;  // H(p, eps)^{-1} diagonal
    double epsilon = 0.0;
    std::string error;  // singular points reported per row
};

struct PhaseScanRow {
    double Phi;
    double p0;
    double closed_form;  // (1 + cos Phi)/4
};

struct FanoCheckRow {
    double inflation;
    double fano_channels;       // mean Fano over channels with events
    double fano_total;          // Fano of the window totals K_j
    double mean_K;
    double epsilon_true;
    double epsilon_hat_mean;
    double var_normalized;      // Var * <K>, as measured
    double var_norm_corrected;  // Var * <K> / measured Fano of K
    double qfi_bound;           // 1 - epsilon_true^2
};

std::vector<SweepRow> run_saturation_sweep(const ExperimentConfig& cfg);
std::vector<SweepRow> run_mixture_sweep(const ExperimentConfig& cfg);
TomoCompareResult run_tomo_compare(const ExperimentConfig& cfg);
std::vector<QfiTableRow> run_qfi_table(const ExperimentConfig& cfg);
std::vector<PhaseScanRow> run_phase_scan_rows(const ExperimentConfig& cfg);
std::vector<FanoCheckRow> run_fano_check(const ExperimentConfig& cfg);

/// Runs the configured experiment, returning the CSV text and the JSON
/// report (per-window raw counts included when cfg.dump_raw is set).
struct ExperimentOutput {
    std::string csv;
    nlohmann::json report;
};
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Locale-independent shortest round-trip formatting used by the writers.
std::string format_double(double v);

/// RFC 4180 field quoting.
std::string csv_escape(const std::string& field);

}  // namespace qent
