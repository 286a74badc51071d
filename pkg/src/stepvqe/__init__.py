"""Slack-free penalty VQE for inequality-constrained binary optimization."""

from .bitstrings import as_bit_tuple, bits_to_index, index_to_bits
from .model import (
    ConstrainedProgram,
    LinearConstraint,
    MkpInstance,
    Solution,
    brute_force_solve,
    check_feasible,
    eval_objective,
    generate_instance,
    load_instance,
    save_instance,
    to_program,
)
from .ising import (
    ConstraintHamiltonian,
    DiagonalProblem,
    PenaltySpec,
    build_custom,
    build_problem,
    build_slack,
    build_unbalanced,
    constraint_eigenvalue,
    encode_constraint,
    penalty_value,
    support_eigenvalue_table,
    upper_bound_lambda,
)
from .sim import (
    AnsatzSpec,
    Statevector,
    expectation_diagonal,
    marginal_probabilities,
    prepare_state,
    probabilities,
)
from .vqe import (
    NonFiniteLossError,
    OptimizerConfig,
    VqeOutcome,
    extract_solution,
    gradient,
    loss,
    optimize,
    run_trials,
)
from .paulidecomp import (
    PauliZPolynomial,
    decompose,
    decompose_stepped_constraint,
    reconstruct,
)
from .bench import (
    BenchmarkReport,
    opt_gap,
    run_battery,
    standard_battery,
    sweep_lambda2,
)

__version__ = "0.1.0"
