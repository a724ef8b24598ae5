"""Exact solvers for bipartite chain editing and its k-near variants."""

from .core_model import (
    ChainRankError,
    CheckResult,
    DuplicateEdgeError,
    EMPTY_EDITS,
    EditConflictError,
    EditSet,
    Instance,
    InvalidInstanceError,
    MissingBaseOrderError,
    Mode,
    NotAPermutationError,
    OutOfRangeEdgeError,
    ParseError,
    ProblemSpec,
    Side,
    Solution,
    Variant,
    VerificationReport,
    apply_edits,
    make_instance,
    validate_instance,
    verify_solution,
    with_base_orders,
)
from .dp_engine import (
    CorruptTableError,
    DPTable,
    enumerate_window_sets,
    reconstruct,
    solve_both_knear,
    solve_constrained_knear,
    solve_unconstrained_knear_addition,
)
from .exact_oracle import (
    InstanceTooLargeError,
    QExact,
    QFree,
    QKNear,
    count_knear_permutations,
    enumerate_knear_permutations,
    inner_fixed_orders_cost,
    oracle_solve,
    solve_unconstrained_knear_editing_exact,
)
from .hardness import (
    ClauseTooWideError,
    Formula,
    GadgetRange,
    NotWithinBudgetError,
    ReductionInstance,
    TautologicalClauseError,
    UnsatisfiedClauseError,
    assignment_to_editing,
    build_reduction,
    editing_to_assignment,
    formula,
    parse_cnf,
)
from .ideal import (
    NestingCertificate,
    NotIdeal,
    NotNestedError,
    derive_question_order,
    recognize_ideal,
    solve_fixed_side,
)
from .instance_gen import (
    GenConfig,
    NotEnoughPairsError,
    gen_ideal,
    perturb_edges,
    perturb_order,
)

__version__ = "0.1.0"

__all__ = [
    "ChainRankError",
    "UnsatisfiedClauseError",
    "TautologicalClauseError",
    "NotWithinBudgetError",
    "NotEnoughPairsError",
    "GadgetRange",
    "DPTable",
    "ClauseTooWideError",
    "CheckResult",
    "CorruptTableError",
    "DuplicateEdgeError",
    "EMPTY_EDITS",
    "EditConflictError",
    "EditSet",
    "Formula",
    "GenConfig",
    "Instance",
    "InstanceTooLargeError",
    "InvalidInstanceError",
    "MissingBaseOrderError",
    "Mode",
    "NestingCertificate",
    "NotAPermutationError",
    "NotIdeal",
    "NotNestedError",
    "OutOfRangeEdgeError",
    "ParseError",
    "ProblemSpec",
    "QExact",
    "QFree",
    "QKNear",
    "ReductionInstance",
    "Side",
    "Solution",
    "Variant",
    "VerificationReport",
    "apply_edits",
    "assignment_to_editing",
    "build_reduction",
    "count_knear_permutations",
    "derive_question_order",
    "editing_to_assignment",
    "enumerate_knear_permutations",
    "enumerate_window_sets",
    "formula",
    "gen_ideal",
    "inner_fixed_orders_cost",
    "make_instance",
    "oracle_solve",
    "parse_cnf",
    "perturb_edges",
    "perturb_order",
    "reconstruct",
    "recognize_ideal",
    "solve_both_knear",
    "solve_constrained_knear",
    "solve_fixed_side",
    "solve_unconstrained_knear_addition",
    "solve_unconstrained_knear_editing_exact",
    "validate_instance",
    "verify_solution",
    "with_base_orders",
]
