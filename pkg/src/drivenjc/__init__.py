"""Steady states, quasi-probability fields, and mean-field branches of the
coherently driven dissipative Jaynes-Cummings oscillator."""

__version__ = "0.1.0"

from .dispersive import (DuffingParams, duffing_params, hyp0f1, hyp0f2,
                         wigner_analytic, wigner_analytic_field, wigner_series)
from .hilbert import (HilbertDims, annihilation, cavity_operator,
                      coherent_state, fock_state, ground_state, number,
                      qubit_operator, qubit_ops, tensor_product,
                      truncation_loss)
from .lindblad import (Liouvillian, ModelParams, build_liouvillian,
                       check_density_matrix, load_liouvillian,
                       mean_photon_number, residual_norm, save_liouvillian,
                       steady_state, steady_state_auto)
from .observables import (QubitReduced, entanglement_entropy, expectation,
                          g2_zero, partial_trace, purity, qubit_reduced)
from .quasiprob import (BimodalityMetrics, PhaseSpaceGrid, QuasiDistField,
                        auto_grid, bimodality_metrics, load_field, q_function,
                        save_field, wigner_displaced_parity, wigner_numeric)
from .semiclassical import (Branch, BranchSet, PhaseBranch, branch_rows,
                            duffing_discriminant, n_scale, save_branches,
                            solve_duffing, solve_full, solve_kerr,
                            solve_phase_bistability, solve_split_lorentzian)
from .sweep import (Axis, ModelTemplate, ResultRow, SweepConfig, parse_config,
                    read_results_csv, resolve_grid, run_sweep, write_outputs)

__all__ = [
    "__version__",
    # hilbert
    "HilbertDims", "annihilation", "number", "qubit_ops", "tensor_product",
    "coherent_state", "truncation_loss", "fock_state", "ground_state",
    "cavity_operator", "qubit_operator",
    # lindblad
    "ModelParams", "Liouvillian", "build_liouvillian", "steady_state",
    "steady_state_auto", "residual_norm", "mean_photon_number",
    "check_density_matrix", "save_liouvillian", "load_liouvillian",
    # observables
    "QubitReduced", "expectation", "partial_trace", "qubit_reduced",
    "entanglement_entropy", "g2_zero", "purity",
    # quasiprob
    "PhaseSpaceGrid", "QuasiDistField", "BimodalityMetrics", "auto_grid",
    "q_function", "wigner_numeric", "wigner_displaced_parity",
    "bimodality_metrics", "save_field", "load_field",
    # dispersive
    "DuffingParams", "hyp0f1", "hyp0f2", "duffing_params", "wigner_analytic",
    "wigner_analytic_field", "wigner_series",
    # semiclassical
    "Branch", "BranchSet", "PhaseBranch", "n_scale", "solve_full",
    "solve_kerr", "solve_duffing", "solve_split_lorentzian",
    "solve_phase_bistability", "duffing_discriminant", "branch_rows",
    "save_branches",
    # sweep
    "SweepConfig", "Axis", "ModelTemplate", "ResultRow", "parse_config",
    "run_sweep", "write_outputs", "read_results_csv", "resolve_grid",
]
