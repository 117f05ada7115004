// Command line front end: one subcommand per experiment, JSON config in,
// CSV out (plus a JSON report with raw counts when --dump-raw is given).
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qent/experiments.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::int64_t seed = -1;  // -1: keep the config seed
    bool dump_raw = false;
};

std::filesystem::path resolve_output(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return p;
    if (const char* dir = std::getenv("QENT_OUT_DIR"); dir && *dir)
        return std::filesystem::path(dir) / p;
    return p;
}

void emit_error(const std::string& kind, const std::string& message) {
    nlohmann::json err{{"error", kind}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

int run(qent::ExperimentKind kind, const CliOptions& opt) {
    qent::ExperimentConfig cfg;
    try {
        cfg = qent::ExperimentConfig::from_json_file(opt.config_path, kind);
        if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
        cfg.dump_raw = opt.dump_raw;
        if (!opt.out_path.empty()) cfg.output_path = opt.out_path;
        if (cfg.output_path.empty())
            throw qent::validation_error("no output path (config 'output_path' or --out)");
    } catch (const qent::validation_error& e) {
        emit_error("config-validation", e.what());
        return 2;
    }

    try {
        const qent::ExperimentOutput out = qent::run_experiment(cfg);
        const std::filesystem::path csv_path = resolve_output(cfg.output_path);
        if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
        csv << out.csv;
        csv.close();
        if (opt.dump_raw) {
            std::filesystem::path json_path = csv_path;
            json_path += ".raw.json";
            std::ofstream js(json_path, std::ios::binary);
            if (!js) throw std::runtime_error("cannot write " + json_path.string());
            js << out.report.dump(2) << "\n";
        }
        std::cout << csv_path.string() << "\n";
        return 0;
    } catch (const qent::validation_error& e) {
        emit_error("validation", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("runtime", e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-qubit entanglement estimation experiments"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, qent::ExperimentKind>> commands{
        {"qfi-table", qent::ExperimentKind::QfiTable},
        {"saturate", qent::ExperimentKind::SaturationSweep},
        {"mixtures", qent::ExperimentKind::MixtureSweep},
        {"tomo-compare", qent::ExperimentKind::TomoCompare},
        {"phase-scan", qent::ExperimentKind::PhaseScan},
        {"fano", qent::ExperimentKind::FanoCheck},
    };

    std::map<std::string, CliOptions> options;
    std::map<std::string, qent::ExperimentKind> kinds;
    for (const auto& [name, kind] : commands) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        CliOptions& opt = options[name];
        kinds[name] = kind;
        sub->add_option("--config", opt.config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", opt.out_path, "output CSV path (overrides config output_path)");
        sub->add_option("--seed", opt.seed, "seed override");
        sub->add_flag("--dump-raw", opt.dump_raw, "also write <out>.raw.json with per-window counts");
    }

    CLI11_PARSE(app, argc, argv);
    for (const auto& [name, kind] : kinds)
        if (app.get_subcommand(name)->parsed()) return run(kind, options[name]);
    return 1;
}
