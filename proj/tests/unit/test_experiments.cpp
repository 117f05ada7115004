#include <cmath>

#include "doctest.h"
#include "qent/experiments.hpp"

using namespace qent;

namespace {

nlohmann::json base_sweep_config() {
    return nlohmann::json{{"model", "decoherence"},
                          {"points", nlohmann::json::array({{{"p", 1.0}, {"q", 0.5}}})},
                          {"M", 40},
                          {"rate", 500.0},
                          {"window_seconds", 10.0},
                          {"seed", 7},
                          {"replications", 4}};
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("config parsing is fail-closed") {
    nlohmann::json j = base_sweep_config();
    j["typo_key"] = 1;
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(j, ExperimentKind::SaturationSweep),
                         doctest::Contains("typo_key"), validation_error);

    nlohmann::json missing = base_sweep_config();
    missing.erase("points");
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(missing, ExperimentKind::SaturationSweep),
                         doctest::Contains("points"), validation_error);

    nlohmann::json mismatch = base_sweep_config();
    mismatch["experiment"] = "phase-scan";
    CHECK_THROWS_AS(ExperimentConfig::from_json(mismatch, ExperimentKind::SaturationSweep),
                    validation_error);

    nlohmann::json bad_point = base_sweep_config();
    bad_point["points"][0]["r"] = 2.0;
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_point, ExperimentKind::SaturationSweep),
                    validation_error);

    // phi degrees land on q = cos^2(phi)
    nlohmann::json phi = base_sweep_config();
    phi.erase("points");
    phi["phi_degrees"] = {45.0};
    const ExperimentConfig cfg = ExperimentConfig::from_json(phi, ExperimentKind::SaturationSweep);
    REQUIRE(cfg.points.size() == 1);
    CHECK(cfg.points[0].q == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cfg.points[0].p == doctest::Approx(1.0));

    nlohmann::json pfix = base_sweep_config();
    pfix["p_fixed"] = 0.9;
    CHECK_THROWS_AS(ExperimentConfig::from_json(pfix, ExperimentKind::SaturationSweep),
                    validation_error);

    nlohmann::json mix = base_sweep_config();
    mix["points"][0]["p"] = 0.0;
    CHECK_THROWS_AS(ExperimentConfig::from_json(mix, ExperimentKind::MixtureSweep), validation_error);
}

TEST_CASE("saturation sweep: determinism and quick statistics") {
    const ExperimentConfig cfg =
        ExperimentConfig::from_json(base_sweep_config(), ExperimentKind::SaturationSweep);
    const auto rows = run_saturation_sweep(cfg);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(r.epsilon_true == doctest::Approx(1.0));
        CHECK(r.epsilon_hat_mean == doctest::Approx(1.0).epsilon(0.01));
        CHECK(r.p_hat_mean == doctest::Approx(1.0).epsilon(0.01));
        CHECK(r.mean_K == doctest::Approx(5000.0).epsilon(0.05));
        CHECK(r.var_normalized >= 0.0);
        CHECK(r.var_normalized < 0.05);  // band 1 - eps^2 = 0 at the Bell point
    }

    const auto rows2 = run_saturation_sweep(cfg);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].epsilon_hat_mean == rows2[i].epsilon_hat_mean);
        CHECK(rows[i].var_sample == rows2[i].var_sample);
    }

    // a mixed point lands near its band with a few replications
    nlohmann::json j = base_sweep_config();
    j["points"] = nlohmann::json::array({{{"p", 1.0}, {"q", 0.78}}});
    j["replications"] = 30;
    const auto mixed_rows =
        run_saturation_sweep(ExperimentConfig::from_json(j, ExperimentKind::SaturationSweep));
    double var_norm = 0.0, eps_mean = 0.0;
    for (const auto& r : mixed_rows) {
        var_norm += r.var_normalized;
        eps_mean += r.epsilon_hat_mean;
    }
    var_norm /= static_cast<double>(mixed_rows.size());
    eps_mean /= static_cast<double>(mixed_rows.size());
    const double eps = mixed_rows[0].epsilon_true;
    CHECK(eps_mean == doctest::Approx(eps).epsilon(0.01));
    CHECK(var_norm == doctest::Approx(1.0 - eps * eps).epsilon(0.25));
}

TEST_CASE("mixture sweep: injection reproduces the model negativity") {
    nlohmann::json j = base_sweep_config();
    j["points"] = nlohmann::json::array({{{"p", 0.5}, {"q", 0.5}}, {{"p", 1.0}, {"q", 0.5}}});
    j["replications"] = 20;

    for (const std::string model : {"decoherence", "werner"}) {
        j["model"] = model;
        const ExperimentConfig cfg = ExperimentConfig::from_json(j, ExperimentKind::MixtureSweep);
        const auto rows = run_mixture_sweep(cfg);
        REQUIRE(rows.size() == 40);
        const ModelKind kind = model_from_name(model);
        double mean_low = 0.0, mean_pure = 0.0;
        for (const auto& r : rows) {
            if (r.p == 0.5) mean_low += r.epsilon_hat_mean;
            else mean_pure += r.epsilon_hat_mean;
        }
        mean_low /= 20.0;
        mean_pure /= 20.0;
        CHECK(mean_low ==
              doctest::Approx(model_negativity(kind, ModelPoint(0.5, 0.5))).epsilon(0.02));
        // p = 1 has no admixture and reduces to the saturation point
        CHECK(mean_pure == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("tomography comparison runs three methods") {
    nlohmann::json j{{"model", "decoherence"},
                     {"points", nlohmann::json::array({{{"p", 0.97}, {"q", 0.5}}})},
                     {"M", 40},
                     {"rate", 500.0},
                     {"window_seconds", 10.0},
                     {"seed", 11},
                     {"bootstrap", 50}};
    const TomoCompareResult res =
        run_tomo_compare(ExperimentConfig::from_json(j, ExperimentKind::TomoCompare));
    REQUIRE(res.rows.size() == 3);
    CHECK(res.rows[0].method == "Optimal");
    CHECK(res.rows[1].method == "J16");
    CHECK(res.rows[2].method == "R16");
    CHECK(res.budget == doctest::Approx(200000.0));
    const double eps_true = model_negativity(ModelKind::Decoherence, ModelPoint(0.97, 0.5));
    for (const auto& r : res.rows) {
        CHECK(r.epsilon == doctest::Approx(eps_true).epsilon(0.05));
        CHECK(r.delta_epsilon > 0.0);
    }
    CHECK(res.rows[0].delta_epsilon < res.rows[1].delta_epsilon);
    CHECK(res.rows[0].delta_epsilon < res.rows[2].delta_epsilon);
    CHECK(res.rows[1].fidelity.has_value());
    CHECK(*res.rows[1].fidelity > 0.99);
}

TEST_CASE("qfi table: values, singular rows, Werner chart") {
    nlohmann::json j;
    j["model"] = "decoherence";
    j["points"] = nlohmann::json::array({{{"p", 0.5}, {"q", 0.5}},
                                         {{"p", 1.0}, {"q", 0.5}},
                                         {{"p", 0.9}, {"q", 0.25}}});
    const auto rows = run_qfi_table(ExperimentConfig::from_json(j, ExperimentKind::QfiTable));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].h_pp == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(rows[0].h_qq == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(rows[0].inv_epseps == doctest::Approx(1.0 - 0.25).epsilon(1e-12));  // eps = 0.5
    CHECK(rows[0].error.empty());
    CHECK_FALSE(rows[1].error.empty());  // p = 1 singular, reported per row
    CHECK(rows[2].error.empty());
    CHECK(rows[2].h_pp == doctest::Approx(0.75 / 0.19).epsilon(1e-12));

    nlohmann::json jw;
    jw["model"] = "werner";
    jw["points"] = nlohmann::json::array({{{"p", 0.8}, {"q", 0.3}}, {{"p", 0.8}, {"q", 0.5}}});
    const auto wrows = run_qfi_table(ExperimentConfig::from_json(jw, ExperimentKind::QfiTable));
    REQUIRE(wrows.size() == 2);
    CHECK(wrows[0].error.empty());
    CHECK(wrows[0].inv_epseps > 0.0);
    // q = 1/2 is the ridge of eps(q); the (p, eps) chart degenerates there
    CHECK_FALSE(wrows[1].error.empty());
}

TEST_CASE("phase scan rows and fano rows") {
    nlohmann::json j;
    j["phase_points"] = 100;
    const auto rows = run_phase_scan_rows(ExperimentConfig::from_json(j, ExperimentKind::PhaseScan));
    REQUIRE(rows.size() == 100);
    for (const auto& r : rows) CHECK(std::abs(r.p0 - r.closed_form) <= 1e-12);

    nlohmann::json jf;
    jf["model"] = "decoherence";
    jf["points"] = nlohmann::json::array({{{"p", 0.9}, {"q", 0.5}}});
    jf["M"] = 2000;
    jf["rate"] = 500.0;
    jf["window_seconds"] = 10.0;
    jf["seed"] = 13;
    jf["inflations"] = {1.0, 2.0};
    const auto frows = run_fano_check(ExperimentConfig::from_json(jf, ExperimentKind::FanoCheck));
    REQUIRE(frows.size() == 2);
    CHECK(frows[0].fano_channels == doctest::Approx(1.0).epsilon(0.05));
    CHECK(frows[1].fano_channels == doctest::Approx(2.0).epsilon(0.05));
    CHECK(frows[1].mean_K == doctest::Approx(2.0 * frows[0].mean_K).epsilon(0.01));
}

TEST_CASE("run_experiment produces stable CSV") {
    nlohmann::json j = base_sweep_config();
    j["replications"] = 2;
    ExperimentConfig cfg = ExperimentConfig::from_json(j, ExperimentKind::SaturationSweep);
    const ExperimentOutput a = run_experiment(cfg);
    const ExperimentOutput b = run_experiment(cfg);
    CHECK(a.csv == b.csv);
    CHECK(a.csv.rfind("model,p,q,replication,", 0) == 0);
    CHECK(a.csv.find("\r\n") != std::string::npos);
    CHECK(a.report.contains("rows"));

    cfg.dump_raw = true;
    const ExperimentOutput c = run_experiment(cfg);
    REQUIRE(c.report.contains("raw_windows"));
    CHECK(c.report["raw_windows"][0]["replications"][0]["k_windows"].size() == 40);
}

TEST_CASE("csv escaping") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("with,comma") == "\"with,comma\"");
    CHECK(csv_escape("with\"quote") == "\"with\"\"quote\"");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1e-12) == "1e-12");
}

}  // TEST_SUITE
