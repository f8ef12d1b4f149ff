"""Brute-force reference solvers.

These are the trusted, definition-shaped searches every other solver is
cross-checked against. They enumerate; they do not reduce. A user-count
guard keeps accidental huge inputs from hanging a test run, callers who
know better can lift it with user_limit=None.
"""

from __future__ import annotations

import time
from itertools import combinations

from .policy import (
    SAT,
    UNSAT,
    BlockerSet,
    BudgetError,
    Instance,
    SolveStats,
    TeamSet,
    Verdict,
    require_normalized,
    restrict,
)


def _check_size(inst: Instance, user_limit: int | None) -> None:
    if user_limit is not None and inst.n > user_limit:
        raise BudgetError(
            f"oracle guard: {inst.n} users exceeds limit {user_limit}; "
            "pass user_limit=None to override"
        )


def solve_s0_bruteforce(inst: Instance, *, user_limit: int | None = 20) -> Verdict:
    """Exhaustive search for d disjoint covering teams (s is ignored).

    Users are assigned one at a time, in index order, to one of the d
    teams or to none. A team only accepts a user while below the size
    cap and only when the user covers something the team still needs;
    dropping a useless member never invalidates a team, so this loses
    no solutions. Dead states, keyed by the multiset of per-team
    (remaining demand, size) pairs, are memoized so identical futures
    are not re-searched. On success the teams are reported sorted by
    smallest member index.
    """
    require_normalized(inst)
    _check_size(inst, user_limit)
    start = time.perf_counter()
    stats = SolveStats(algorithm="oracle-s0")
    n, d, t = inst.n, inst.d, int(inst.t)
    full = inst.target
    access = inst.access

    # suffix_union[i] = resources still reachable using users i..n-1
    suffix_union = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_union[i] = suffix_union[i + 1] | access[i]

    members: list[list[int]] = [[] for _ in range(d)]
    failed: set[tuple] = set()

    def search(i: int, states: tuple[tuple[int, int], ...]) -> bool:
        stats.nodes += 1
        pending = [demand for demand, _ in states if demand]
        if not pending:
            return True
        if i == n or n - i < len(pending):
            return False
        union_needed = 0
        for demand in pending:
            union_needed |= demand
        if union_needed & ~suffix_union[i]:
            return False
        key = (i, tuple(sorted(states)))
        if key in failed:
            return False
        nbr = access[i]
        tried: set[tuple[int, int]] = set()
        for j in range(d):
            demand, size = states[j]
            if size >= t or not demand & nbr:
                continue
            if (demand, size) in tried:
                continue  # team in an identical state, symmetric branch
            tried.add((demand, size))
            child = states[:j] + ((demand & ~nbr, size + 1),) + states[j + 1 :]
            members[j].append(i)
            if search(i + 1, child):
                return True
            members[j].pop()
        if search(i + 1, states):
            return True
        failed.add(key)
        return False

    initial = tuple((full, 0) for _ in range(d))
    sat = search(0, initial)
    stats.seconds = time.perf_counter() - start
    if not sat:
        return Verdict(UNSAT, BlockerSet(frozenset()), stats)
    teams = sorted((frozenset(m) for m in members), key=lambda team: tuple(sorted(team)))
    return Verdict(SAT, TeamSet(tuple(teams)), stats)


def solve_rcp_bruteforce(
    inst: Instance,
    *,
    user_limit: int | None = 20,
    s0_memo: dict[int, Verdict] | None = None,
) -> Verdict:
    """Decide res(P, s, d, t) by trying every removal set.

    Candidate removals are enumerated in increasing cardinality and
    lexicographically within each cardinality, so an UNSAT verdict
    always carries a minimum-cardinality blocker. s0_memo, keyed by the
    bitmask of surviving users, lets sweeps share sub-results across
    repeated calls; it never changes answers.
    """
    require_normalized(inst)
    _check_size(inst, user_limit)
    start = time.perf_counter()
    stats = SolveStats(algorithm="oracle")
    n = inst.n
    memo = s0_memo if s0_memo is not None else {}
    all_users = (1 << n) - 1

    def survivors_verdict(removed: tuple[int, ...]) -> Verdict:
        kept_mask = all_users
        for u in removed:
            kept_mask &= ~(1 << u)
        cached = memo.get(kept_mask)
        if cached is None:
            kept = [u for u in range(n) if kept_mask >> u & 1]
            cached = solve_s0_bruteforce(restrict(inst, kept), user_limit=None)
            memo[kept_mask] = cached
        return cached

    base = survivors_verdict(())
    stats.nodes += 1
    if not base.sat:
        stats.seconds = time.perf_counter() - start
        return Verdict(UNSAT, BlockerSet(frozenset()), stats)
    for k in range(1, min(inst.s, n) + 1):
        for removed in combinations(range(n), k):
            stats.nodes += 1
            if not survivors_verdict(removed).sat:
                stats.seconds = time.perf_counter() - start
                return Verdict(UNSAT, BlockerSet(frozenset(removed)), stats)
    stats.seconds = time.perf_counter() - start
    witness = base.witness if inst.s == 0 else None
    return Verdict(SAT, witness, stats)


def find_minimal_blocker(
    inst: Instance,
    *,
    user_limit: int | None = 20,
    verdict: Verdict | None = None,
    s0_memo: dict[int, Verdict] | None = None,
) -> BlockerSet | None:
    """Inclusion-minimal blocker of size <= s, or None when resilient.

    Starts from the oracle's minimum-cardinality blocker and drops
    members one at a time while the remainder still blocks, until no
    single removal can be spared.
    """
    memo = s0_memo if s0_memo is not None else {}
    if verdict is None:
        verdict = solve_rcp_bruteforce(inst, user_limit=user_limit, s0_memo=memo)
    if verdict.sat:
        return None
    assert isinstance(verdict.witness, BlockerSet)
    blocker = set(verdict.witness.users)

    def blocks(candidate: set[int]) -> bool:
        kept = [u for u in range(inst.n) if u not in candidate]
        kept_mask = 0
        for u in kept:
            kept_mask |= 1 << u
        cached = memo.get(kept_mask)
        if cached is None:
            cached = solve_s0_bruteforce(restrict(inst, kept), user_limit=None)
            memo[kept_mask] = cached
        return not cached.sat

    shrunk = True
    while shrunk:
        shrunk = False
        for u in sorted(blocker):
            candidate = blocker - {u}
            if blocks(candidate):
                blocker = candidate
                shrunk = True
                break
    return BlockerSet(frozenset(blocker))
