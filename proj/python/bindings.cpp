// Python bindings for the main operations: state families, negativity,
// Fisher information, coincidence simulation, estimators and tomography.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qent/experiments.hpp"

namespace py = pybind11;
using namespace qent;

namespace {

using PyMat = std::vector<std::vector<cplx>>;

PyMat to_py(const Mat4& m) {
    PyMat out(4, std::vector<cplx>(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    return out;
}

Mat4 from_py(const PyMat& m) {
    if (m.size() != 4) throw validation_error("expected a 4x4 matrix");
    Mat4 out;
    for (int i = 0; i < 4; ++i) {
        if (m[static_cast<std::size_t>(i)].size() != 4) throw validation_error("expected a 4x4 matrix");
        for (int j = 0; j < 4; ++j) out(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return out;
}

ModelKind kind_of(const std::string& model) { return model_from_name(model); }

CoincidenceVector window_of(const std::array<std::int64_t, 4>& counts, double alpha, double beta) {
    return CoincidenceVector{counts, MeasurementSetting(alpha, beta), 1.0};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "two-qubit entanglement estimation toolkit (C++ core)";

    py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<numeric_error>(m, "NumericError", PyExc_RuntimeError);

    // states
    m.def("pure_state", [](double phi, double Phi) {
        const Ket k = pure_state(PhasePoint(phi, Phi));
        return std::vector<cplx>(k.amplitudes().begin(), k.amplitudes().end());
    }, py::arg("phi"), py::arg("Phi") = 0.0, "cos(phi)|HH> + sin(phi) e^{i Phi}|VV>");
    m.def("decoherence_state",
          [](double p, double q) { return to_py(decoherence_state(ModelPoint(p, q)).matrix()); },
          py::arg("p"), py::arg("q"));
    m.def("werner_state",
          [](double p, double q) { return to_py(werner_state(ModelPoint(p, q)).matrix()); },
          py::arg("p"), py::arg("q"));

    // quantum core
    m.def("negativity", [](const PyMat& rho) { return negativity(DensityMatrix(from_py(rho))); });
    m.def("fidelity", [](const PyMat& rho, const PyMat& sigma) {
        return fidelity(DensityMatrix(from_py(rho)), DensityMatrix(from_py(sigma)));
    });
    m.def("partial_transpose_a", [](const PyMat& m_) { return to_py(partial_transpose_a(from_py(m_))); });
    m.def("trace_norm", [](const PyMat& m_) { return trace_norm(from_py(m_)); });
    m.def("eigenvalues", [](const PyMat& m_) {
        const Spectrum s = eigendecompose(from_py(m_));
        return std::vector<double>(s.eigenvalues.begin(), s.eigenvalues.end());
    });

    // model closed forms
    m.def("model_negativity",
          [](const std::string& model, double p, double q) {
              return model_negativity(kind_of(model), ModelPoint(p, q));
          },
          py::arg("model"), py::arg("p"), py::arg("q"));
    m.def("epsilon_to_q", [](const std::string& model, double p, double eps) {
        return epsilon_to_q(kind_of(model), p, eps);
    });
    m.def("qfi_closed_form", [](const std::string& model, double p, double q) {
        const InfoMatrix h = qfi_closed_form(kind_of(model), ModelPoint(p, q));
        return std::vector<std::vector<double>>{{h.at(0, 0), h.at(0, 1)}, {h.at(1, 0), h.at(1, 1)}};
    });
    m.def("qfi_numerical", [](const std::string& model, double p, double q) {
        const InfoMatrix h = qfi(model_family(kind_of(model)), ParamVector({p, q}, {"p", "q"}));
        return std::vector<std::vector<double>>{{h.at(0, 0), h.at(0, 1)}, {h.at(1, 0), h.at(1, 1)}};
    });

    // measurement simulation
    m.def("born_probabilities", [](const PyMat& rho, double alpha, double beta) {
        const auto p = born_probabilities(DensityMatrix(from_py(rho)), MeasurementSetting(alpha, beta));
        return std::vector<double>(p.begin(), p.end());
    });
    m.def("run_acquisition",
          [](const std::string& model, double p, double q, double alpha, double beta, double rate,
             int windows, double window_seconds, std::uint64_t seed) {
              SourceConfig cfg;
              cfg.kind = kind_of(model);
              cfg.point = ModelPoint(p, q);
              cfg.mean_total_rate = rate;
              cfg.windows = windows;
              cfg.window_seconds = window_seconds;
              cfg.seed = seed;
              std::vector<std::array<std::int64_t, 4>> out;
              for (const auto& w : run_acquisition(cfg, MeasurementSetting(alpha, beta)))
                  out.push_back(w.counts);
              return out;
          },
          py::arg("model"), py::arg("p"), py::arg("q"), py::arg("alpha"), py::arg("beta"),
          py::arg("rate") = 500.0, py::arg("windows") = 40, py::arg("window_seconds") = 10.0,
          py::arg("seed") = 1);
    m.def("phase_scan", [](const std::vector<double>& grid) { return phase_scan(grid); });
    m.def("fano_factor", [](const std::vector<std::int64_t>& samples) { return fano_factor(samples); });

    // estimators
    m.def("visibility", [](const std::array<std::int64_t, 4>& counts) {
        return visibility(window_of(counts, 0.0, 0.0)).value;
    });
    m.def("epsilon_hat",
          [](const std::array<std::int64_t, 4>& counts, double alpha, double beta) {
              return epsilon_hat(window_of(counts, alpha, beta));
          },
          py::arg("counts"), py::arg("alpha"), py::arg("beta"));
    m.def("werner_estimators", [](const std::array<std::int64_t, 4>& k_counts,
                                  const std::array<std::int64_t, 4>& r_counts, double alpha, double beta) {
        return werner_estimators(window_of(k_counts, alpha, beta), window_of(r_counts, 0.0, 0.0));
    });
    m.def("propagated_variance", [](const std::array<double, 4>& means, const std::array<double, 4>& vars) {
        return propagated_variance(means, vars);
    });
    m.def("reference_epsilon", [](const std::string& model, double p_est, double phi) {
        return reference_epsilon(kind_of(model), p_est, phi);
    });

    // tomography
    m.def("protocol_json", [](const std::string& name) {
        if (name == "J16") return protocol_to_json(j16_protocol());
        if (name == "R16") return protocol_to_json(r16_protocol());
        throw validation_error("unknown protocol '" + name + "' (J16 or R16)");
    });
    m.def("simulate_tomo_counts",
          [](const PyMat& rho, const std::string& protocol, double budget, std::uint64_t seed) {
              std::mt19937_64 eng = SeedKey{seed}.engine();
              const TomoProtocol proto = protocol == "R16" ? r16_protocol() : j16_protocol();
              const TomoData d = simulate_tomo_counts(DensityMatrix(from_py(rho)), proto, budget, eng);
              return std::vector<std::int64_t>(d.counts.begin(), d.counts.end());
          },
          py::arg("rho"), py::arg("protocol"), py::arg("budget"), py::arg("seed") = 1);
    m.def("tomo_negativity",
          [](const std::vector<std::int64_t>& counts, const std::string& protocol, int bootstrap,
             std::uint64_t seed) {
              if (counts.size() != 16) throw validation_error("expected 16 counts");
              const TomoProtocol proto = protocol == "R16" ? r16_protocol() : j16_protocol();
              TomoData d{{}, proto, 1.0};
              for (int i = 0; i < 16; ++i) d.counts[static_cast<std::size_t>(i)] = counts[static_cast<std::size_t>(i)];
              std::mt19937_64 eng = SeedKey{seed}.engine();
              const ReconstructionResult r = tomo_negativity(d, bootstrap, eng);
              return py::make_tuple(r.negativity, r.negativity_sigma, to_py(r.rho_physical.matrix()));
          },
          py::arg("counts"), py::arg("protocol"), py::arg("bootstrap") = 200, py::arg("seed") = 1);
    m.def("reconstruct_linear", [](const std::vector<std::int64_t>& counts, const std::string& protocol) {
        if (counts.size() != 16) throw validation_error("expected 16 counts");
        const TomoProtocol proto = protocol == "R16" ? r16_protocol() : j16_protocol();
        TomoData d{{}, proto, 1.0};
        for (int i = 0; i < 16; ++i) d.counts[static_cast<std::size_t>(i)] = counts[static_cast<std::size_t>(i)];
        return to_py(reconstruct_linear(d));
    });
    m.def("project_physical", [](const PyMat& raw) { return to_py(project_physical(from_py(raw)).matrix()); });
}
