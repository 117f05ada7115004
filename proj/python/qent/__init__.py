"""Two-qubit entanglement estimation toolkit.

Thin Python layer over the C++ core: parametric state families, negativity
and quantum Fisher information, Poissonian coincidence simulation,
visibility estimators and 16-setting tomography.
"""

from qent._core import (  # noqa: F401
    born_probabilities,
    decoherence_state,
    eigenvalues,
    epsilon_hat,
    epsilon_to_q,
    fano_factor,
    fidelity,
    model_negativity,
    negativity,
    partial_transpose_a,
    phase_scan,
    project_physical,
    propagated_variance,
    protocol_json,
    pure_state,
    qfi_closed_form,
    qfi_numerical,
    reconstruct_linear,
    reference_epsilon,
    run_acquisition,
    simulate_tomo_counts,
    tomo_negativity,
    trace_norm,
    visibility,
    werner_estimators,
    werner_state,
)

__all__ = [
    "born_probabilities",
    "decoherence_state",
    "eigenvalues",
    "epsilon_hat",
    "epsilon_to_q",
    "fano_factor",
    "fidelity",
    "model_negativity",
    "negativity",
    "partial_transpose_a",
    "phase_scan",
    "project_physical",
    "propagated_variance",
    "protocol_json",
    "pure_state",
    "qfi_closed_form",
    "qfi_numerical",
    "reconstruct_linear",
    "reference_epsilon",
    "run_acquisition",
    "simulate_tomo_counts",
    "tomo_negativity",
    "trace_norm",
    "visibility",
    "werner_estimators",
    "werner_state",
]

__version__ = "0.1.0"
