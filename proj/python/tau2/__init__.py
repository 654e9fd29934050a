"""Sparse recovery by minimizing the squared l1/l2 ratio under measurement constraints."""

from ._core import (
    ConvergenceError,
    DomainError,
    SolverConfig,
    SolverResult,
    alpha_bar,
    alpha_star,
    build_H,
    dinkelbach_function,
    dinkelbach_solve,
    dinkelbach_value,
    export_qp,
    gen_matrix,
    gen_signal,
    l1_initializer,
    lambda_max_gram,
    least_norm_solution,
    mutual_coherence,
    norm_l1,
    norm_l2,
    numerical_rank,
    phi_map,
    project_ball,
    prox_l1,
    prox_sq_l1,
    recover,
    relative_error,
    run_experiment,
    synthesize_measurements,
    tau2,
    tau_q,
    verify,
    verify_H_spectrum,
    worked_example,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
