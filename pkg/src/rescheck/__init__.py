"""Exact solvers for resiliency checking of access-control policies.

An instance is an authorization relation between users and resources
plus a resiliency query res(P, s, d, t): after removing any s users,
can we still form d pairwise disjoint teams, each of at most t users,
each covering every resource of P? This package decides such queries
exactly, produces checkable witnesses, kernelizes the s=0 unbounded-t
case, and generates instances with known answers from classic source
problems.
"""

from .blockers import (
    STRATEGIES,
    ClassDeletionVector,
    branch_solve,
    deletion_cost,
    fastpath_d1_tinf,
    reduced_solve,
    solve,
)
from .generators import (
    GeneratedInstance,
    from_3dm,
    from_domatic,
    from_hitting_set,
    from_set_cover,
    random_instance,
)
from .kernel import (
    ExpansionWitness,
    KernelStep,
    KernelTrace,
    find_d_expansion,
    kernelize,
    lift_teams,
    replay,
    rule1_strip,
    rule2_apply,
)
from .oracle import find_minimal_blocker, solve_rcp_bruteforce, solve_s0_bruteforce
from .policy import (
    DEFAULT_LIMITS,
    INF,
    SAT,
    UNSAT,
    BlockerSet,
    BudgetError,
    ClassPartition,
    DegenerateInstanceError,
    Instance,
    Limits,
    PolicyError,
    PreconditionError,
    SolveStats,
    TeamSet,
    Verdict,
    class_partition,
    is_normalized,
    neighborhood,
    normalize,
    require_normalized,
    restrict,
    verify_witness,
)
from .serialize import (
    FORMAT_VERSION,
    InstanceDocument,
    InstanceFormatError,
    emit_instance,
    emit_trace,
    emit_verdict,
    parse_instance,
    parse_instance_document,
    parse_trace,
    parse_verdict,
)
from .sweep import Disagreement, SweepConfig, SweepReport, run_sweep
from .teams import (
    dp_solve,
    enumerate_configurations,
    ilp_feasible,
    ilp_solve,
    reconstruct_teams,
    setcover_d1,
)

__version__ = "0.1.0"

__all__ = [
    "BlockerSet",
    "branch_solve",
    "BudgetError",
    "class_partition",
    "ClassDeletionVector",
    "ClassPartition",
    "DEFAULT_LIMITS",
    "DegenerateInstanceError",
    "deletion_cost",
    "Disagreement",
    "dp_solve",
    "emit_instance",
    "emit_trace",
    "emit_verdict",
    "enumerate_configurations",
    "ExpansionWitness",
    "fastpath_d1_tinf",
    "find_d_expansion",
    "find_minimal_blocker",
    "FORMAT_VERSION",
    "from_3dm",
    "from_domatic",
    "from_hitting_set",
    "from_set_cover",
    "GeneratedInstance",
    "ilp_feasible",
    "ilp_solve",
    "INF",
    "Instance",
    "InstanceDocument",
    "InstanceFormatError",
    "is_normalized",
    "kernelize",
    "KernelStep",
    "KernelTrace",
    "lift_teams",
    "Limits",
    "neighborhood",
    "normalize",
    "parse_instance",
    "parse_instance_document",
    "parse_trace",
    "parse_verdict",
    "PolicyError",
    "PreconditionError",
    "random_instance",
    "reconstruct_teams",
    "reduced_solve",
    "replay",
    "require_normalized",
    "restrict",
    "rule1_strip",
    "rule2_apply",
    "run_sweep",
    "SAT",
    "setcover_d1",
    "solve",
    "solve_rcp_bruteforce",
    "solve_s0_bruteforce",
    "SolveStats",
    "STRATEGIES",
    "SweepConfig",
    "SweepReport",
    "TeamSet",
    "UNSAT",
    "Verdict",
    "verify_witness",
]
