#include "qent/experiments.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <set>
#include <thread>

namespace qent {

namespace {

constexpr double kPi = 3.14159265358979323846;

MeasurementSetting qc_setting() { return MeasurementSetting(-kPi / 4.0, -kPi / 4.0); }
MeasurementSetting pop_setting() { return MeasurementSetting(0.0, 0.0); }

template <typename F>
void parallel_for(int count, F&& fn) {
    const int nthreads =
        std::max(1, std::min<int>(static_cast<int>(std::thread::hardware_concurrency()), 8));
    if (count <= 1 || nthreads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> futures;
    futures.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t)
        futures.push_back(std::async(std::launch::async, [&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        }));
    for (auto& f : futures) f.get();
}

}  // namespace

const char* experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::QfiTable: return "qfi-table";
        case ExperimentKind::SaturationSweep: return "saturation-sweep";
        case ExperimentKind::MixtureSweep: return "mixture-sweep";
        case ExperimentKind::TomoCompare: return "tomo-compare";
        case ExperimentKind::PhaseScan: return "phase-scan";
        case ExperimentKind::FanoCheck: return "fano-check";
    }
    return "unknown";
}

ExperimentKind experiment_from_name(const std::string& name) {
    if (name == "qfi-table") return ExperimentKind::QfiTable;
    if (name == "saturation-sweep" || name == "saturate") return ExperimentKind::SaturationSweep;
    if (name == "mixture-sweep" || name == "mixtures") return ExperimentKind::MixtureSweep;
    if (name == "tomo-compare") return ExperimentKind::TomoCompare;
    if (name == "phase-scan") return ExperimentKind::PhaseScan;
    if (name == "fano-check" || name == "fano") return ExperimentKind::FanoCheck;
    throw validation_error("unknown experiment '" + name + "'");
}

namespace {

double as_double(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw validation_error("config field '" + key + "' must be a number");
    return v.get<double>();
}

std::int64_t as_int(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer()) throw validation_error("config field '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::vector<ModelPoint> parse_points(const nlohmann::json& v) {
    if (!v.is_array() || v.empty()) throw validation_error("config field 'points' must be a non-empty array");
    std::vector<ModelPoint> pts;
    for (const auto& e : v) {
        if (!e.is_object() || !e.contains("p") || !e.contains("q"))
            throw validation_error("config field 'points' entries must be objects with keys p and q");
        for (const auto& [k, _] : e.items())
            if (k != "p" && k != "q") throw validation_error("unknown key '" + k + "' in a points entry");
        pts.emplace_back(as_double(e.at("p"), "points.p"), as_double(e.at("q"), "points.q"));
    }
    return pts;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, ExperimentKind expected) {
    if (!j.is_object()) throw validation_error("config must be a JSON object");
    ExperimentConfig cfg;
    cfg.experiment = expected;

    const std::set<std::string> common{"experiment", "model", "seed", "output_path"};
    std::set<std::string> allowed = common;
    switch (expected) {
        case ExperimentKind::QfiTable:
            allowed.insert({"points", "phi_degrees", "p_fixed"});
            break;
        case ExperimentKind::SaturationSweep:
            allowed.insert({"points", "phi_degrees", "p_fixed", "M", "window_seconds", "rate", "replications"});
            break;
        case ExperimentKind::MixtureSweep:
            allowed.insert({"points", "M", "window_seconds", "rate", "replications"});
            break;
        case ExperimentKind::TomoCompare:
            allowed.insert({"points", "M", "window_seconds", "rate", "bootstrap", "budget"});
            break;
        case ExperimentKind::PhaseScan:
            allowed.insert({"phase_points", "Phi_grid"});
            break;
        case ExperimentKind::FanoCheck:
            allowed.insert({"points", "M", "window_seconds", "rate", "replications", "inflations"});
            break;
    }
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw validation_error("unknown config key '" + key + "' for experiment " +
                                   experiment_name(expected));

    if (j.contains("experiment")) {
        const auto name = j.at("experiment").get<std::string>();
        if (experiment_from_name(name) != expected)
            throw validation_error("config field 'experiment' (" + name + ") does not match the requested " +
                                   std::string(experiment_name(expected)));
    }
    if (j.contains("model")) cfg.model = model_from_name(j.at("model").get<std::string>());
    if (j.contains("seed")) cfg.seed = static_cast<std::uint64_t>(as_int(j.at("seed"), "seed"));
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
    if (j.contains("M")) {
        cfg.M = static_cast<int>(as_int(j.at("M"), "M"));
        if (cfg.M < 2) throw validation_error("config field 'M' must be at least 2");
    }
    if (j.contains("window_seconds")) {
        cfg.window_seconds = as_double(j.at("window_seconds"), "window_seconds");
        if (!(cfg.window_seconds > 0.0)) throw validation_error("config field 'window_seconds' must be positive");
    }
    if (j.contains("rate")) {
        cfg.rate = as_double(j.at("rate"), "rate");
        if (!(cfg.rate > 0.0)) throw validation_error("config field 'rate' must be positive");
    }
    if (j.contains("replications")) {
        cfg.replications = static_cast<int>(as_int(j.at("replications"), "replications"));
        if (cfg.replications < 1) throw validation_error("config field 'replications' must be at least 1");
    }
    if (j.contains("bootstrap")) {
        cfg.bootstrap = static_cast<int>(as_int(j.at("bootstrap"), "bootstrap"));
        if (cfg.bootstrap < 2) throw validation_error("config field 'bootstrap' must be at least 2");
    }
    if (j.contains("budget")) {
        cfg.budget = as_double(j.at("budget"), "budget");
        if (!(cfg.budget > 0.0)) throw validation_error("config field 'budget' must be positive");
    }
    if (j.contains("phase_points")) {
        cfg.phase_points = static_cast<int>(as_int(j.at("phase_points"), "phase_points"));
        if (cfg.phase_points < 2) throw validation_error("config field 'phase_points' must be at least 2");
    }
    if (j.contains("Phi_grid")) {
        if (!j.at("Phi_grid").is_array() || j.at("Phi_grid").empty())
            throw validation_error("config field 'Phi_grid' must be a non-empty array");
        for (const auto& v : j.at("Phi_grid")) cfg.Phi_grid.push_back(as_double(v, "Phi_grid"));
    }
    if (j.contains("inflations")) {
        if (!j.at("inflations").is_array() || j.at("inflations").empty())
            throw validation_error("config field 'inflations' must be a non-empty array");
        cfg.inflations.clear();
        for (const auto& v : j.at("inflations")) {
            const double f = as_double(v, "inflations");
            if (!(f >= 1.0)) throw validation_error("config field 'inflations' entries must be >= 1");
            cfg.inflations.push_back(f);
        }
    }

    if (j.contains("points") && j.contains("phi_degrees"))
        throw validation_error("config fields 'points' and 'phi_degrees' are mutually exclusive");
    if (j.contains("points")) cfg.points = parse_points(j.at("points"));
    if (j.contains("phi_degrees")) {
        if (!j.at("phi_degrees").is_array() || j.at("phi_degrees").empty())
            throw validation_error("config field 'phi_degrees' must be a non-empty array");
        const double p_fixed = j.contains("p_fixed") ? as_double(j.at("p_fixed"), "p_fixed") : 1.0;
        for (const auto& v : j.at("phi_degrees")) {
            const double phi = as_double(v, "phi_degrees") * kPi / 180.0;
            const double c = std::cos(phi);
            cfg.points.emplace_back(p_fixed, c * c);
        }
    } else if (j.contains("p_fixed")) {
        throw validation_error("config field 'p_fixed' requires 'phi_degrees'");
    }

    switch (expected) {
        case ExperimentKind::QfiTable:
        case ExperimentKind::SaturationSweep:
        case ExperimentKind::MixtureSweep:
            if (cfg.points.empty())
                throw validation_error("config field 'points' (or 'phi_degrees') is required");
            break;
        case ExperimentKind::TomoCompare:
            if (cfg.points.size() != 1)
                throw validation_error("config field 'points' must contain exactly one point");
            break;
        case ExperimentKind::PhaseScan:
            break;
        case ExperimentKind::FanoCheck:
            if (cfg.points.empty()) cfg.points.emplace_back(0.9, 0.5);
            if (cfg.points.size() != 1)
                throw validation_error("config field 'points' must contain exactly one point");
            break;
    }
    if (expected == ExperimentKind::MixtureSweep)
        for (const auto& pt : cfg.points)
            if (!(pt.p > 0.0))
                throw validation_error("mixture fraction p = 0 is degenerate (pure admixture)");
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path, ExperimentKind expected) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(j, expected);
}

namespace {

// One replication of the two-setting acquisition. `components` pairs a state
// with its rate; per-window counts are the sums of independent Poisson draws
// from each component (this is how the controlled mixtures are injected).
struct Acquisition {
    std::vector<CoincidenceVector> k;  // correlation windows at (-pi/4, -pi/4)
    std::vector<CoincidenceVector> r;  // population windows at (0, 0)
};

Acquisition acquire_two_settings(const std::vector<std::pair<DensityMatrix, double>>& components,
                                 int M, double window_seconds, SeedKey key, double inflation) {
    Acquisition out;
    const std::array<MeasurementSetting, 2> settings{qc_setting(), pop_setting()};
    for (int si = 0; si < 2; ++si) {
        std::vector<std::array<double, 4>> probs;
        probs.reserve(components.size());
        for (const auto& [state, rate] : components)
            probs.push_back(born_probabilities(state, settings[static_cast<std::size_t>(si)]));
        auto& dest = (si == 0) ? out.k : out.r;
        dest.reserve(static_cast<std::size_t>(M));
        const SeedKey skey = key.child(static_cast<std::uint64_t>(si));
        for (int j = 0; j < M; ++j) {
            std::mt19937_64 eng = skey.child(static_cast<std::uint64_t>(j)).engine();
            CoincidenceVector window{{0, 0, 0, 0}, settings[static_cast<std::size_t>(si)], window_seconds};
            for (std::size_t c = 0; c < components.size(); ++c) {
                const CoincidenceVector part =
                    sample_window(probs[c], components[c].second * window_seconds, eng,
                                  settings[static_cast<std::size_t>(si)], window_seconds, inflation);
                for (int x = 0; x < 4; ++x)
                    window.counts[static_cast<std::size_t>(x)] += part.counts[static_cast<std::size_t>(x)];
            }
            dest.push_back(window);
        }
    }
    return out;
}

SweepRow summarize_replication(ModelKind kind, const ModelPoint& pt, int replication,
                               const Acquisition& acq) {
    const int M = static_cast<int>(acq.k.size());
    std::vector<double> eps(static_cast<std::size_t>(M));
    std::vector<double> phat(static_cast<std::size_t>(M));
    double sumK = 0.0;
    for (int jw = 0; jw < M; ++jw) {
        const auto& kj = acq.k[static_cast<std::size_t>(jw)];
        const auto& rj = acq.r[static_cast<std::size_t>(jw)];
        if (kind == ModelKind::Decoherence) {
            eps[static_cast<std::size_t>(jw)] = epsilon_hat(kj);
            phat[static_cast<std::size_t>(jw)] = p_hat_decoherence(rj, kj);
        } else {
            const auto [pw, ew] = werner_estimators(kj, rj);
            eps[static_cast<std::size_t>(jw)] = ew;
            phat[static_cast<std::size_t>(jw)] = pw;
        }
        sumK += static_cast<double>(kj.total());
    }
    const auto [eps_mean, eps_var] = sample_stats(eps);
    const auto [p_mean, p_var] = sample_stats(phat);
    (void)p_var;
    const double mean_K = sumK / static_cast<double>(M);
    const double phi = std::acos(std::sqrt(pt.q));
    const double eps_true = model_negativity(kind, pt);
    SweepRow row{};
    row.model = kind;
    row.p = pt.p;
    row.q = pt.q;
    row.replication = replication;
    row.epsilon_true = eps_true;
    row.epsilon_hat_mean = eps_mean;
    row.epsilon_t = reference_epsilon(kind, std::min(p_mean, 1.05), phi);
    row.var_sample = eps_var;
    row.var_normalized = eps_var * mean_K;
    row.qfi_bound = 1.0 - eps_true * eps_true;
    row.p_hat_mean = p_mean;
    row.mean_K = mean_K;
    return row;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, bool mixture) {
    const SeedKey root{cfg.seed};
    const int npts = static_cast<int>(cfg.points.size());
    std::vector<SweepRow> rows(static_cast<std::size_t>(npts * cfg.replications),
                               SweepRow{});
    for (int pi = 0; pi < npts; ++pi) {
        const ModelPoint& pt = cfg.points[static_cast<std::size_t>(pi)];
        std::vector<std::pair<DensityMatrix, double>> components;
        if (mixture) {
            // Pure component plus unentangled admixture sampled at relative
            // rate (1-p)/p, mirroring the count-level injection procedure.
            const DensityMatrix pure = DensityMatrix::pure(pure_state_q(pt.q));
            const DensityMatrix admix = cfg.model == ModelKind::Decoherence
                                            ? decoherence_state(ModelPoint(0.0, pt.q))
                                            : werner_state(ModelPoint(0.0, pt.q));
            components.emplace_back(pure, cfg.rate);
            components.emplace_back(admix, cfg.rate * (1.0 - pt.p) / pt.p);
        } else {
            components.emplace_back(model_state(cfg.model, pt), cfg.rate);
        }
        const SeedKey pkey = root.child(static_cast<std::uint64_t>(pi));
        parallel_for(cfg.replications, [&](int rep) {
            const Acquisition acq =
                acquire_two_settings(components, cfg.M, cfg.window_seconds,
                                     pkey.child(static_cast<std::uint64_t>(rep)), 1.0);
            rows[static_cast<std::size_t>(pi * cfg.replications + rep)] =
                summarize_replication(cfg.model, pt, rep, acq);
        });
    }
    return rows;
}

}  // namespace

std::vector<SweepRow> run_saturation_sweep(const ExperimentConfig& cfg) { return run_sweep(cfg, false); }

std::vector<SweepRow> run_mixture_sweep(const ExperimentConfig& cfg) {
    for (const auto& pt : cfg.points)
        if (!(pt.p > 0.0)) throw validation_error("mixture fraction p = 0 is degenerate (pure admixture)");
    return run_sweep(cfg, true);
}

namespace {

CoincidenceVector pool_windows(const std::vector<CoincidenceVector>& windows) {
    CoincidenceVector pooled{{0, 0, 0, 0}, windows.front().setting, 0.0};
    for (const auto& w : windows) {
        for (int x = 0; x < 4; ++x)
            pooled.counts[static_cast<std::size_t>(x)] += w.counts[static_cast<std::size_t>(x)];
        pooled.window_seconds += w.window_seconds;
    }
    return pooled;
}

double poisson_propagated_sigma(const CoincidenceVector& pooled) {
    std::array<double, 4> m{};
    for (int x = 0; x < 4; ++x) m[static_cast<std::size_t>(x)] = static_cast<double>(pooled.counts[static_cast<std::size_t>(x)]);
    return std::sqrt(propagated_variance(m, m));
}

}  // namespace

TomoCompareResult run_tomo_compare(const ExperimentConfig& cfg) {
    const ModelPoint& pt = cfg.points.at(0);
    const DensityMatrix rho = model_state(cfg.model, pt);
    const double budget = cfg.budget > 0.0 ? cfg.budget : static_cast<double>(cfg.M) * cfg.rate * cfg.window_seconds;
    const SeedKey root{cfg.seed};

    TomoCompareResult out;
    out.budget = budget;
    out.model = cfg.model;
    out.p = pt.p;
    out.q = pt.q;

    // Optimal arm at the same total number of coincidences.
    const double rate_eff = budget / (static_cast<double>(cfg.M) * cfg.window_seconds);
    if (cfg.model == ModelKind::Decoherence) {
        SourceConfig sc;
        sc.kind = cfg.model;
        sc.point = pt;
        sc.mean_total_rate = rate_eff;
        sc.windows = cfg.M;
        sc.window_seconds = cfg.window_seconds;
        sc.seed = root.child(0).value;
        const CoincidenceVector pooled = pool_windows(run_acquisition(sc, qc_setting()));
        out.rows.push_back(TomoMethodRow{"Optimal", epsilon_hat(pooled), poisson_propagated_sigma(pooled),
                                         std::nullopt});
    } else {
        // The Werner estimators need both settings; split the budget evenly.
        SourceConfig sc;
        sc.kind = cfg.model;
        sc.point = pt;
        sc.mean_total_rate = rate_eff / 2.0;
        sc.windows = cfg.M;
        sc.window_seconds = cfg.window_seconds;
        sc.seed = root.child(0).value;
        const CoincidenceVector k_pool = pool_windows(run_acquisition(sc, qc_setting()));
        sc.seed = root.child(1).value;
        const CoincidenceVector r_pool = pool_windows(run_acquisition(sc, pop_setting()));
        const double v00 = visibility(r_pool).value;
        const double vqc = visibility(k_pool).value;
        const double eps = -0.5 + 0.5 * v00 + vqc;
        const double s_r = poisson_propagated_sigma(r_pool);
        const double s_k = poisson_propagated_sigma(k_pool);
        out.rows.push_back(TomoMethodRow{"Optimal", eps,
                                         std::sqrt(0.25 * s_r * s_r + s_k * s_k), std::nullopt});
    }

    for (const auto& [name, protocol] : {std::pair{"J16", j16_protocol()}, std::pair{"R16", r16_protocol()}}) {
        std::mt19937_64 sim_eng = root.child(name[0] == 'J' ? 2 : 3).engine();
        std::mt19937_64 boot_eng = root.child(name[0] == 'J' ? 4 : 5).engine();
        const TomoData data = simulate_tomo_counts(rho, protocol, budget, sim_eng);
        const ReconstructionResult rec = tomo_negativity(data, cfg.bootstrap, boot_eng, &rho);
        out.rows.push_back(TomoMethodRow{name, rec.negativity, rec.negativity_sigma, rec.fidelity_vs_reference});
    }
    return out;
}

std::vector<QfiTableRow> run_qfi_table(const ExperimentConfig& cfg) {
    std::vector<QfiTableRow> rows;
    for (const auto& pt : cfg.points) {
        QfiTableRow row{};
        row.model = cfg.model;
        row.p = pt.p;
        row.q = pt.q;
        row.epsilon = model_negativity(cfg.model, pt);
        try {
            const InfoMatrix h = qfi_closed_form(cfg.model, pt);
            row.h_pp = h.at(0, 0);
            row.h_qq = h.at(1, 1);
            if (cfg.model == ModelKind::Decoherence) {
                // closed-form inverse in the (p, eps) chart
                if (row.epsilon <= 0.0) throw std::domain_error("H(p,eps) undefined at eps = 0");
                row.inv_pp = pt.p * pt.p * (1.0 - pt.p * pt.p) / (row.epsilon * row.epsilon);
                row.inv_epseps = 1.0 - row.epsilon * row.epsilon;
            } else {
                const auto jac = pq_to_peps_jacobian(cfg.model, pt.p, row.epsilon);
                const InfoMatrix hpe = reparametrize(h, jac);
                const auto inv = cramer_rao_bound(hpe, 1);
                row.inv_pp = inv[0];
                row.inv_epseps = inv[3];
            }
        } catch (const std::domain_error& e) {
            row.error = e.what();
            row.inv_pp = row.inv_epseps = std::nan("");
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<PhaseScanRow> run_phase_scan_rows(const ExperimentConfig& cfg) {
    std::vector<double> grid = cfg.Phi_grid;
    if (grid.empty()) {
        grid.reserve(static_cast<std::size_t>(cfg.phase_points));
        for (int i = 0; i < cfg.phase_points; ++i)
            grid.push_back(2.0 * kPi * static_cast<double>(i) / static_cast<double>(cfg.phase_points));
    }
    std::vector<PhaseScanRow> rows;
    rows.reserve(grid.size());
    for (const auto& [Phi, p0] : phase_scan(grid))
        rows.push_back(PhaseScanRow{Phi, p0, (1.0 + std::cos(Phi)) / 4.0});
    return rows;
}

std::vector<FanoCheckRow> run_fano_check(const ExperimentConfig& cfg) {
    const ModelPoint& pt = cfg.points.at(0);
    const double eps_true = model_negativity(cfg.model, pt);
    const DensityMatrix rho = model_state(cfg.model, pt);
    const auto probs = born_probabilities(rho, qc_setting());
    const SeedKey root{cfg.seed};

    std::vector<FanoCheckRow> rows;
    for (std::size_t fi = 0; fi < cfg.inflations.size(); ++fi) {
        const double inflation = cfg.inflations[fi];
        const SeedKey fkey = root.child(fi);
        std::array<std::vector<std::int64_t>, 4> channels;
        std::vector<std::int64_t> totals;
        std::vector<double> var_norms(static_cast<std::size_t>(cfg.replications));
        std::vector<double> eps_means(static_cast<std::size_t>(cfg.replications));
        std::vector<std::vector<CoincidenceVector>> all_windows(
            static_cast<std::size_t>(cfg.replications));

        parallel_for(cfg.replications, [&](int rep) {
            const SeedKey rkey = fkey.child(static_cast<std::uint64_t>(rep));
            std::vector<CoincidenceVector> windows;
            windows.reserve(static_cast<std::size_t>(cfg.M));
            for (int jw = 0; jw < cfg.M; ++jw) {
                std::mt19937_64 eng = rkey.child(static_cast<std::uint64_t>(jw)).engine();
                windows.push_back(sample_window(probs, cfg.rate * cfg.window_seconds, eng, qc_setting(),
                                                cfg.window_seconds, inflation));
            }
            std::vector<double> eps(static_cast<std::size_t>(cfg.M));
            double sumK = 0.0;
            for (int jw = 0; jw < cfg.M; ++jw) {
                eps[static_cast<std::size_t>(jw)] = epsilon_hat(windows[static_cast<std::size_t>(jw)]);
                sumK += static_cast<double>(windows[static_cast<std::size_t>(jw)].total());
            }
            const auto [mean, var] = sample_stats(eps);
            eps_means[static_cast<std::size_t>(rep)] = mean;
            var_norms[static_cast<std::size_t>(rep)] = var * (sumK / static_cast<double>(cfg.M));
            all_windows[static_cast<std::size_t>(rep)] = std::move(windows);
        });

        for (const auto& windows : all_windows)
            for (const auto& w : windows) {
                for (int x = 0; x < 4; ++x)
                    channels[static_cast<std::size_t>(x)].push_back(w.counts[static_cast<std::size_t>(x)]);
                totals.push_back(w.total());
            }

        double fano_ch = 0.0;
        int nch = 0;
        for (int x = 0; x < 4; ++x) {
            const auto& ch = channels[static_cast<std::size_t>(x)];
            double mean = 0.0;
            for (std::int64_t v : ch) mean += static_cast<double>(v);
            if (mean <= 0.0) continue;  // dark channel carries no Fano information
            fano_ch += fano_factor(ch);
            ++nch;
        }
        fano_ch /= std::max(1, nch);
        const double fano_tot = fano_factor(totals);

        double meanK = 0.0;
        for (std::int64_t t : totals) meanK += static_cast<double>(t);
        meanK /= static_cast<double>(totals.size());

        double var_norm = 0.0;
        for (double v : var_norms) var_norm += v;
        var_norm /= static_cast<double>(var_norms.size());
        double eps_mean = 0.0;
        for (double v : eps_means) eps_mean += v;
        eps_mean /= static_cast<double>(eps_means.size());

        FanoCheckRow row{};
        row.inflation = inflation;
        row.fano_channels = fano_ch;
        row.fano_total = fano_tot;
        row.mean_K = meanK;
        row.epsilon_true = eps_true;
        row.epsilon_hat_mean = eps_mean;
        row.var_normalized = var_norm;
        row.var_norm_corrected = var_norm / fano_tot;
        row.qfi_bound = 1.0 - eps_true * eps_true;
        rows.push_back(row);
    }
    return rows;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

namespace {

std::string sweep_csv(const std::vector<SweepRow>& rows, const std::string& method) {
    std::string csv =
        "model,p,q,replication,epsilon_true,epsilon_hat_mean,epsilon_t,var_sample,var_normalized,"
        "qfi_bound,p_hat_mean,mean_K,method\r\n";
    for (const auto& r : rows) {
        csv += std::string(model_name(r.model)) + "," + format_double(r.p) + "," + format_double(r.q) +
               "," + std::to_string(r.replication) + "," + format_double(r.epsilon_true) + "," +
               format_double(r.epsilon_hat_mean) + "," + format_double(r.epsilon_t) + "," +
               format_double(r.var_sample) + "," + format_double(r.var_normalized) + "," +
               format_double(r.qfi_bound) + "," + format_double(r.p_hat_mean) + "," +
               format_double(r.mean_K) + "," + method + "\r\n";
    }
    return csv;
}

nlohmann::json sweep_json(const std::vector<SweepRow>& rows) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : rows) {
        a.push_back({{"model", model_name(r.model)},
                     {"p", r.p},
                     {"q", r.q},
                     {"replication", r.replication},
                     {"epsilon_true", r.epsilon_true},
                     {"epsilon_hat_mean", r.epsilon_hat_mean},
                     {"epsilon_t", r.epsilon_t},
                     {"var_sample", r.var_sample},
                     {"var_normalized", r.var_normalized},
                     {"qfi_bound", r.qfi_bound},
                     {"p_hat_mean", r.p_hat_mean},
                     {"mean_K", r.mean_K}});
    }
    return a;
}

nlohmann::json config_echo(const ExperimentConfig& cfg) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& pt : cfg.points) pts.push_back({{"p", pt.p}, {"q", pt.q}});
    return {{"experiment", experiment_name(cfg.experiment)},
            {"model", model_name(cfg.model)},
            {"points", pts},
            {"M", cfg.M},
            {"window_seconds", cfg.window_seconds},
            {"rate", cfg.rate},
            {"seed", cfg.seed},
            {"replications", cfg.replications},
            {"bootstrap", cfg.bootstrap},
            {"budget", cfg.budget}};
}

// Raw per-window counts for --dump-raw; regenerated deterministically from
// the same seeds the sweep used.
nlohmann::json sweep_raw_windows(const ExperimentConfig& cfg, bool mixture) {
    nlohmann::json points = nlohmann::json::array();
    const SeedKey root{cfg.seed};
    for (std::size_t pi = 0; pi < cfg.points.size(); ++pi) {
        const ModelPoint& pt = cfg.points[pi];
        std::vector<std::pair<DensityMatrix, double>> components;
        if (mixture) {
            components.emplace_back(DensityMatrix::pure(pure_state_q(pt.q)), cfg.rate);
            components.emplace_back(cfg.model == ModelKind::Decoherence
                                        ? decoherence_state(ModelPoint(0.0, pt.q))
                                        : werner_state(ModelPoint(0.0, pt.q)),
                                    cfg.rate * (1.0 - pt.p) / pt.p);
        } else {
            components.emplace_back(model_state(cfg.model, pt), cfg.rate);
        }
        nlohmann::json reps = nlohmann::json::array();
        for (int rep = 0; rep < cfg.replications; ++rep) {
            const Acquisition acq = acquire_two_settings(
                components, cfg.M, cfg.window_seconds,
                root.child(pi).child(static_cast<std::uint64_t>(rep)), 1.0);
            nlohmann::json kw = nlohmann::json::array(), rw = nlohmann::json::array();
            for (const auto& w : acq.k) kw.push_back(w.counts);
            for (const auto& w : acq.r) rw.push_back(w.counts);
            reps.push_back({{"replication", rep}, {"k_windows", kw}, {"r_windows", rw}});
        }
        points.push_back({{"p", pt.p}, {"q", pt.q}, {"replications", reps}});
    }
    return points;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    ExperimentOutput out;
    out.report["config"] = config_echo(cfg);
    switch (cfg.experiment) {
        case ExperimentKind::SaturationSweep:
        case ExperimentKind::MixtureSweep: {
            const bool mixture = cfg.experiment == ExperimentKind::MixtureSweep;
            const auto rows = mixture ? run_mixture_sweep(cfg) : run_saturation_sweep(cfg);
            out.csv = sweep_csv(rows, mixture ? "mixture" : "optimal");
            out.report["rows"] = sweep_json(rows);
            if (cfg.dump_raw) out.report["raw_windows"] = sweep_raw_windows(cfg, mixture);
            break;
        }
        case ExperimentKind::TomoCompare: {
            const TomoCompareResult res = run_tomo_compare(cfg);
            std::string csv = "method,epsilon,delta_epsilon,fidelity,budget,model,p,q\r\n";
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& r : res.rows) {
                csv += r.method + "," + format_double(r.epsilon) + "," + format_double(r.delta_epsilon) +
                       "," + (r.fidelity ? format_double(*r.fidelity) : "") + "," +
                       format_double(res.budget) + "," + model_name(res.model) + "," +
                       format_double(res.p) + "," + format_double(res.q) + "\r\n";
                nlohmann::json jr = {{"method", r.method},
                                     {"epsilon", r.epsilon},
                                     {"delta_epsilon", r.delta_epsilon}};
                if (r.fidelity) jr["fidelity"] = *r.fidelity;
                rows.push_back(jr);
            }
            out.csv = csv;
            out.report["rows"] = rows;
            out.report["budget"] = res.budget;
            break;
        }
        case ExperimentKind::QfiTable: {
            const auto rows = run_qfi_table(cfg);
            std::string csv = "model,p,q,epsilon,h_pp,h_qq,inv_pp,inv_epseps,error\r\n";
            nlohmann::json jrows = nlohmann::json::array();
            for (const auto& r : rows) {
                csv += std::string(model_name(r.model)) + "," + format_double(r.p) + "," +
                       format_double(r.q) + "," + format_double(r.epsilon) + "," +
                       format_double(r.h_pp) + "," + format_double(r.h_qq) + "," +
                       format_double(r.inv_pp) + "," + format_double(r.inv_epseps) + "," +
                       csv_escape(r.error) + "\r\n";
                jrows.push_back({{"model", model_name(r.model)},
                                 {"p", r.p},
                                 {"q", r.q},
                                 {"epsilon", r.epsilon},
                                 {"h_pp", r.h_pp},
                                 {"h_qq", r.h_qq},
                                 {"inv_pp", std::isnan(r.inv_pp) ? nlohmann::json() : nlohmann::json(r.inv_pp)},
                                 {"inv_epseps", std::isnan(r.inv_epseps) ? nlohmann::json() : nlohmann::json(r.inv_epseps)},
                                 {"error", r.error}});
            }
            out.csv = csv;
            out.report["rows"] = jrows;
            break;
        }
        case ExperimentKind::PhaseScan: {
            const auto rows = run_phase_scan_rows(cfg);
            std::string csv = "Phi,p0,closed_form,abs_diff\r\n";
            nlohmann::json jrows = nlohmann::json::array();
            for (const auto& r : rows) {
                csv += format_double(r.Phi) + "," + format_double(r.p0) + "," +
                       format_double(r.closed_form) + "," + format_double(std::abs(r.p0 - r.closed_form)) +
                       "\r\n";
                jrows.push_back({{"Phi", r.Phi}, {"p0", r.p0}, {"closed_form", r.closed_form}});
            }
            out.csv = csv;
            out.report["rows"] = jrows;
            break;
        }
        case ExperimentKind::FanoCheck: {
            const auto rows = run_fano_check(cfg);
            std::string csv =
                "inflation,fano_channels,fano_total,mean_K,epsilon_true,epsilon_hat_mean,"
                "var_normalized,var_norm_corrected,qfi_bound\r\n";
            nlohmann::json jrows = nlohmann::json::array();
            for (const auto& r : rows) {
                csv += format_double(r.inflation) + "," + format_double(r.fano_channels) + "," +
                       format_double(r.fano_total) + "," + format_double(r.mean_K) + "," +
                       format_double(r.epsilon_true) + "," + format_double(r.epsilon_hat_mean) + "," +
                       format_double(r.var_normalized) + "," + format_double(r.var_norm_corrected) +
                       "," + format_double(r.qfi_bound) + "\r\n";
                jrows.push_back({{"inflation", r.inflation},
                                 {"fano_channels", r.fano_channels},
                                 {"fano_total", r.fano_total},
                                 {"mean_K", r.mean_K},
                                 {"epsilon_true", r.epsilon_true},
                                 {"epsilon_hat_mean", r.epsilon_hat_mean},
                                 {"var_normalized", r.var_normalized},
                                 {"var_norm_corrected", r.var_norm_corrected},
                                 {"qfi_bound", r.qfi_bound}});
            }
            out.csv = csv;
            out.report["rows"] = jrows;
            break;
        }
    }
    return out;
}

}  // namespace qent
