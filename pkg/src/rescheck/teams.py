"""Solvers for the zero-removal case: find d disjoint covering teams.

Three exact routes with different parameter sweet spots:

* dp_solve: dynamic programming over (user prefix, per-team remaining
  demand and size), exponential only in d*|P|.
* ilp_solve: enumerate team configurations (sets of neighborhood
  classes) and search for a feasible multiplicity vector, exponential
  only in |P|.
* setcover_d1: classic subset DP for the single-team case.

All of them treat s as 0; an UNSAT verdict carries the empty blocker
set, which is exactly the definition of the s=0 query failing.
"""

from __future__ import annotations

import sys
import time

from .policy import (
    DEFAULT_LIMITS,
    SAT,
    UNSAT,
    BlockerSet,
    BudgetError,
    Instance,
    Limits,
    PreconditionError,
    SolveStats,
    TeamSet,
    Verdict,
    class_partition,
    require_normalized,
)


def _trivial_sat(stats: SolveStats, d: int, start: float) -> Verdict:
    # Empty target: d empty teams cover it vacuously.
    stats.seconds = time.perf_counter() - start
    return Verdict(SAT, TeamSet(tuple(frozenset() for _ in range(d))), stats)


def _unsat(stats: SolveStats, start: float) -> Verdict:
    stats.seconds = time.perf_counter() - start
    return Verdict(UNSAT, BlockerSet(frozenset()), stats)


def dp_solve(inst: Instance, *, limits: Limits = DEFAULT_LIMITS) -> Verdict:
    """Team existence via DP over user prefixes and residual demands.

    State: for each of the d teams, the target resources it still
    misses plus how many members it has so far; user i either joins one
    team that it helps and that has room, or is skipped. The size
    counter is what makes finite t honest, with t unbounded it never
    binds. States are packed into a single integer key and memoized
    sparsely; only states reachable from the root query are ever
    visited, which keeps the visited count within n * 2^(d|P|) *
    (t+1)^d. The demand bit budget d*|P| is checked up front.
    """
    require_normalized(inst)
    start = time.perf_counter()
    stats = SolveStats(algorithm="dp")
    n, p, d = inst.n, inst.num_resources, inst.d
    if d * p > limits.dp_bits:
        raise BudgetError(
            f"dp budget: d*|P| = {d * p} exceeds {limits.dp_bits} bits; "
            "use ilp or raise --dp-bits"
        )
    if p == 0:
        return _trivial_sat(stats, d, start)
    t = int(inst.t)
    full = inst.target
    access = inst.access
    cap_bits = t.bit_length()
    width = p + cap_bits
    demand_mask = full
    all_demands = 0
    for j in range(d):
        all_demands |= demand_mask << (j * width)
    initial = 0
    for j in range(d):
        initial |= full << (j * width)

    memo: dict[tuple[int, int], bool] = {}
    stats.extras["dp_bits"] = d * p

    def moves(i: int, state: int):
        # Children of (i, state) that place user i-1 into a team.
        nbr = access[i - 1]
        for j in range(d):
            shift = j * width
            demand = state >> shift & demand_mask
            if not demand & nbr:
                continue
            size = state >> (shift + p) & ((1 << cap_bits) - 1)
            if size >= t:
                continue
            yield j, state - (demand << shift) + ((demand & ~nbr) << shift) + (
                1 << (shift + p)
            )

    def value(i: int, state: int) -> bool:
        if state & all_demands == 0:
            return True
        if i == 0:
            return False
        key = (i, state)
        cached = memo.get(key)
        if cached is not None:
            return cached
        result = value(i - 1, state)
        if not result:
            for _, child in moves(i, state):
                if value(i - 1, child):
                    result = True
                    break
        memo[key] = result
        return result

    old_limit = sys.getrecursionlimit()
    if n + 100 > old_limit:
        sys.setrecursionlimit(n + 200)
    try:
        sat = value(n, initial)
    finally:
        sys.setrecursionlimit(old_limit)
    stats.nodes = len(memo)
    if not sat:
        return _unsat(stats, start)

    # Replay the memo to pull out one concrete team assignment.
    teams: list[set[int]] = [set() for _ in range(d)]
    i, state = n, initial
    while state & all_demands:
        if value(i - 1, state):
            i -= 1
            continue
        for j, child in moves(i, state):
            if value(i - 1, child):
                teams[j].add(i - 1)
                state = child
                i -= 1
                break
        else:  # pragma: no cover - would mean the memo is inconsistent
            raise RuntimeError("dp witness replay failed")
    stats.seconds = time.perf_counter() - start
    return Verdict(SAT, TeamSet(tuple(frozenset(team) for team in teams)), stats)


def enumerate_configurations(
    inst: Instance, *, limits: Limits = DEFAULT_LIMITS
) -> list[tuple[int, ...]]:
    """All team shapes: sets of at most t distinct occupied neighborhood
    classes whose union covers the target.

    A configuration is an ascending tuple of class bitmasks. Listed by
    part count, then lexicographically. The number of candidate
    families examined is budgeted.
    """
    require_normalized(inst)
    if (1 << inst.num_resources) > limits.max_classes:
        raise BudgetError(
            f"configuration budget: 2^|P| = {1 << inst.num_resources} classes "
            f"exceeds {limits.max_classes}"
        )
    masks = [m for m in class_partition(inst).classes if m]
    full = inst.target
    t = int(inst.t)
    suffix = [0] * (len(masks) + 1)
    for i in range(len(masks) - 1, -1, -1):
        suffix[i] = suffix[i + 1] | masks[i]
    configs: list[tuple[int, ...]] = []
    examined = 0

    def extend(start: int, chosen: list[int], union: int) -> None:
        nonlocal examined
        for i in range(start, len(masks)):
            if union | suffix[i] != full:
                break  # no completion possible from here on
            examined += 1
            if examined > limits.max_configs:
                raise BudgetError(
                    f"configuration budget: more than {limits.max_configs} "
                    "candidate configurations"
                )
            chosen.append(masks[i])
            new_union = union | masks[i]
            if new_union == full:
                configs.append(tuple(chosen))
            if len(chosen) < t:
                extend(i + 1, chosen, new_union)
            chosen.pop()

    if full == 0:
        return []
    extend(0, [], 0)
    configs.sort(key=lambda c: (len(c), c))
    return configs


def ilp_feasible(
    configs: list[tuple[int, ...]],
    capacities: dict[int, int],
    d: int,
) -> dict[tuple[int, ...], int] | None:
    """First multiplicity vector filling d teams within class capacities.

    Depth-first over the configuration list, multiplicities tried in
    ascending order, so the result is deterministic. Returns the
    nonzero counts, or None when no assignment works.
    """
    vec, _ = _ilp_feasible(configs, capacities, d)
    return vec


def _ilp_feasible(
    configs: list[tuple[int, ...]],
    capacities: dict[int, int],
    d: int,
) -> tuple[dict[tuple[int, ...], int] | None, int]:
    remaining = dict(capacities)
    counts: list[int] = [0] * len(configs)
    nodes = 0

    def dfs(idx: int, need: int) -> bool:
        nonlocal nodes
        nodes += 1
        if need == 0:
            return True
        if idx == len(configs):
            return False
        parts = configs[idx]
        cap = min((remaining.get(m, 0) for m in parts), default=0)
        top = min(need, cap)
        for x in range(top + 1):
            counts[idx] = x
            for m in parts:
                remaining[m] -= x
            if dfs(idx + 1, need - x):
                return True
            for m in parts:
                remaining[m] += x
            counts[idx] = 0
        return False

    if dfs(0, d):
        vec = {configs[i]: counts[i] for i in range(len(configs)) if counts[i]}
        return vec, nodes
    return None, nodes


def reconstruct_teams(
    inst: Instance, vector: dict[tuple[int, ...], int]
) -> TeamSet:
    """Materialize teams from a feasible configuration vector.

    Each team takes the lowest-index not-yet-used user of every class
    named by its configuration. Capacity feasibility guarantees the
    pools never run dry; running dry anyway means the vector did not
    come from ilp_feasible and is an internal error.
    """
    pools = {mask: list(users) for mask, users in class_partition(inst).classes.items()}
    teams = []
    for parts, count in vector.items():
        for _ in range(count):
            team = []
            for mask in parts:
                pool = pools.get(mask)
                if not pool:
                    raise RuntimeError(f"class {mask:#b} exhausted during reconstruction")
                team.append(pool.pop(0))
            teams.append(frozenset(team))
    return TeamSet(tuple(teams))


def ilp_solve(inst: Instance, *, limits: Limits = DEFAULT_LIMITS) -> Verdict:
    """Configuration-counting solver, fixed-parameter in |P|.

    Whether d disjoint teams exist depends only on how many users each
    neighborhood class holds, never on which users they are. Enumerate
    the possible team shapes, then search for per-shape multiplicities
    that sum to d without overdrawing any class.
    """
    require_normalized(inst)
    start = time.perf_counter()
    stats = SolveStats(algorithm="ilp")
    if inst.num_resources == 0:
        return _trivial_sat(stats, inst.d, start)
    configs = enumerate_configurations(inst, limits=limits)
    capacities = {
        mask: len(users)
        for mask, users in class_partition(inst).classes.items()
        if mask
    }
    vector, nodes = _ilp_feasible(configs, capacities, inst.d)
    stats.nodes = nodes
    stats.extras["configurations"] = len(configs)
    if vector is None:
        return _unsat(stats, start)
    witness = reconstruct_teams(inst, vector)
    stats.seconds = time.perf_counter() - start
    return Verdict(SAT, witness, stats)


def setcover_d1(inst: Instance, *, limits: Limits = DEFAULT_LIMITS) -> Verdict:
    """Single-team case: minimum cover size via subset DP over P.

    SAT iff some at-most-t users jointly cover the target. Only valid
    for d=1, s=0.
    """
    require_normalized(inst)
    if inst.d != 1:
        raise PreconditionError("setcover_d1 requires d=1")
    if inst.s != 0:
        raise PreconditionError("setcover_d1 requires s=0")
    start = time.perf_counter()
    stats = SolveStats(algorithm="setcover")
    p = inst.num_resources
    if p == 0:
        return _trivial_sat(stats, 1, start)
    if (1 << p) > limits.max_classes:
        raise BudgetError(
            f"setcover budget: 2^|P| = {1 << p} exceeds {limits.max_classes}"
        )
    t = int(inst.t)
    full = inst.target
    rep: dict[int, int] = {}
    for u, mask in enumerate(inst.access):
        if mask and mask not in rep:
            rep[mask] = u
    masks = sorted(rep)
    size = 1 << p
    cover = [p + 1] * size
    choice = [0] * size
    cover[0] = 0
    for state in range(1, size):
        best = p + 1
        best_mask = 0
        for mask in masks:
            if not mask & state:
                continue
            stats.nodes += 1
            cost = cover[state & ~mask] + 1
            if cost < best:
                best = cost
                best_mask = mask
        cover[state] = best
        choice[state] = best_mask
    if cover[full] > t:
        return _unsat(stats, start)
    team = set()
    state = full
    while state:
        mask = choice[state]
        team.add(rep[mask])
        state &= ~mask
    stats.seconds = time.perf_counter() - start
    return Verdict(SAT, TeamSet((frozenset(team),)), stats)
