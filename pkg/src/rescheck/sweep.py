"""Cross-validation sweep: every solver against the oracle.

The exhaustive grid walks all access relations up to a size cap and
every policy over them; the randomized grid adds seeded coin-flip
instances at slightly larger sizes. For each cell the oracle fixes the
expected answer, then each solver that applies to the cell must agree.
Alongside answers the sweep re-checks every emitted witness, the
search-size guarantees of the dp and branching solvers, and the class
inequality that minimal blockers must satisfy (a minimal blocker that
touches a neighborhood class leaves fewer than d of its users behind,
otherwise a spare user could be kept instead).

One oracle pass per (relation, d, t) serves all removal budgets: the
oracle's blocker has minimum cardinality, so the instance at budget s
is UNSAT exactly when that cardinality is at most s.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace

from .blockers import STRATEGIES
from .oracle import solve_rcp_bruteforce
from .policy import (
    DEFAULT_LIMITS,
    SAT,
    UNSAT,
    BlockerSet,
    Instance,
    Limits,
    TeamSet,
    Verdict,
    class_partition,
    verify_witness,
)


@dataclass(frozen=True)
class SweepConfig:
    max_n: int = 5
    max_p: int = 3
    max_s: int = 2
    max_d: int = 2
    max_t: int = 3  # finite team sizes 1..max_t; the unbounded case is always included
    seeds: int = 1000
    random_max_n: int = 10
    random_max_p: int = 4
    check_node_bounds: bool = True
    check_minimal_blockers: bool = True
    check_witnesses: bool = True
    stop_on_first: bool = True
    limits: Limits = DEFAULT_LIMITS


@dataclass(frozen=True)
class Disagreement:
    kind: str  # answer | witness | node-bound | minimal-blocker
    algorithm: str
    baseline: str
    expected: str
    got: str
    instance: Instance
    detail: str = ""


@dataclass
class SweepReport:
    relations: int = 0
    families: int = 0
    cells: int = 0
    solver_runs: int = 0
    runs_by_algorithm: dict[str, int] = field(default_factory=dict)
    witnesses_checked: int = 0
    blockers_checked: int = 0
    disagreements: list[Disagreement] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.disagreements


def _applicable(inst: Instance) -> list[str]:
    names = ["branch", "reduced"]
    if inst.s == 0:
        names.append("dp")
        names.append("ilp")
        if inst.d == 1:
            names.append("setcover")
    if inst.d == 1 and inst.t >= inst.num_resources:
        names.append("fastpath")
    return names


def _blocker_class_gap(inst: Instance, blocker: BlockerSet) -> str | None:
    """Return a complaint when a minimal blocker leaves d or more users
    in a class it touches, None when the inequality holds everywhere."""
    part = class_partition(inst)
    removed = blocker.users
    for mask, members in part.classes.items():
        touched = [u for u in members if u in removed]
        if touched and len(members) - len(touched) >= inst.d:
            return (
                f"blocker touches class {mask:#b} but leaves "
                f"{len(members) - len(touched)} users, d={inst.d}"
            )
    return None


class _Runner:
    def __init__(self, config: SweepConfig, report: SweepReport):
        self.config = config
        self.report = report

    def stop(self) -> bool:
        return bool(self.report.disagreements) and self.config.stop_on_first

    def flag(self, **kwargs) -> None:
        self.report.disagreements.append(Disagreement(**kwargs))

    def check_team_witness(self, inst: Instance, verdict: Verdict, name: str) -> None:
        if not self.config.check_witnesses or verdict.witness is None:
            return
        self.report.witnesses_checked += 1
        if not verify_witness(inst, verdict):
            got = "teams" if isinstance(verdict.witness, TeamSet) else "blocker"
            self.flag(
                kind="witness",
                algorithm=name,
                baseline="verify_witness",
                expected="valid witness",
                got=f"invalid {got}",
                instance=inst,
            )

    def check_bounds(self, inst: Instance, verdict: Verdict, name: str) -> None:
        if not self.config.check_node_bounds:
            return
        d, p, t, n, s = inst.d, inst.num_resources, int(inst.t), inst.n, inst.s
        if name == "branch":
            cap = sum((d * t) ** i for i in range(s + 1))
        elif name == "dp":
            cap = n * 2 ** (d * p) * (t + 1) ** d
        else:
            return
        if verdict.stats.nodes > cap:
            self.flag(
                kind="node-bound",
                algorithm=name,
                baseline="analysis",
                expected=f"nodes <= {cap}",
                got=str(verdict.stats.nodes),
                instance=inst,
            )

    def run_cell(self, inst: Instance, expected: str) -> None:
        self.report.cells += 1
        for name in _applicable(inst):
            verdict = STRATEGIES[name](inst, self.config.limits)
            self.report.solver_runs += 1
            self.report.runs_by_algorithm[name] = (
                self.report.runs_by_algorithm.get(name, 0) + 1
            )
            if verdict.answer != expected:
                self.flag(
                    kind="answer",
                    algorithm=name,
                    baseline="oracle",
                    expected=expected,
                    got=verdict.answer,
                    instance=inst,
                )
            self.check_team_witness(inst, verdict, name)
            self.check_bounds(inst, verdict, name)
            if self.stop():
                return

    def run_family(self, base: Instance) -> None:
        """One relation with fixed d and t, all removal budgets 0..s."""
        self.report.families += 1
        memo: dict[int, Verdict] = {}
        overall = solve_rcp_bruteforce(base, s0_memo=memo)
        if overall.sat:
            blocker_size = base.s + 1
            blocker = None
        else:
            assert isinstance(overall.witness, BlockerSet)
            blocker = overall.witness
            blocker_size = len(blocker.users)

        if blocker is not None and self.config.check_minimal_blockers:
            # Minimum cardinality implies inclusion-minimality.
            self.report.blockers_checked += 1
            complaint = _blocker_class_gap(base, blocker)
            if complaint is not None:
                self.flag(
                    kind="minimal-blocker",
                    algorithm="oracle",
                    baseline="class-inequality",
                    expected="|class \\ S| < d for touched classes",
                    got=complaint,
                    instance=base,
                )
                if self.stop():
                    return

        full_kept = memo.get((1 << base.n) - 1)
        for s in range(base.s + 1):
            inst = replace(base, s=s)
            expected = UNSAT if blocker_size <= s else SAT
            if self.config.check_witnesses:
                # The oracle's own witnesses go through the same check.
                if expected == UNSAT and s == blocker_size:
                    self.report.witnesses_checked += 1
                    if not verify_witness(inst, Verdict(UNSAT, blocker, overall.stats)):
                        self.flag(
                            kind="witness",
                            algorithm="oracle",
                            baseline="verify_witness",
                            expected="valid witness",
                            got="invalid blocker",
                            instance=inst,
                        )
                if expected == SAT and s == 0 and full_kept is not None:
                    self.report.witnesses_checked += 1
                    if not verify_witness(inst, full_kept):
                        self.flag(
                            kind="witness",
                            algorithm="oracle",
                            baseline="verify_witness",
                            expected="valid witness",
                            got="invalid teams",
                            instance=inst,
                        )
            if self.stop():
                return
            self.run_cell(inst, expected)
            if self.stop():
                return


def _team_sizes(config: SweepConfig, p: int) -> list[int]:
    sizes = {min(t, p) for t in range(1, config.max_t + 1)}
    sizes.add(p)  # the unbounded case, normalized
    return sorted(sizes)


def run_sweep(config: SweepConfig = SweepConfig(), *, progress=None) -> SweepReport:
    """Run both grids; any Disagreement in the report is a bug witness."""
    report = SweepReport()
    runner = _Runner(config, report)
    start = time.perf_counter()

    for n in range(1, config.max_n + 1):
        for p in range(1, config.max_p + 1):
            if progress is not None:
                progress(f"exhaustive n={n} p={p}: {2 ** (n * p)} relations")
            full = (1 << p) - 1
            for bits in range(2 ** (n * p)):
                report.relations += 1
                access = tuple((bits >> (u * p)) & full for u in range(n))
                for d in range(1, config.max_d + 1):
                    for t in _team_sizes(config, p):
                        base = Instance(
                            access=access,
                            num_resources=p,
                            target=full,
                            s=config.max_s,
                            d=d,
                            t=t,
                        )
                        runner.run_family(base)
                        if runner.stop():
                            report.seconds = time.perf_counter() - start
                            return report

    for seed in range(config.seeds):
        if progress is not None and seed % 200 == 0:
            progress(f"random instances: {seed}/{config.seeds}")
        inst = _random_cell(config, seed)
        report.relations += 1
        runner.run_family(inst)
        if runner.stop():
            break

    report.seconds = time.perf_counter() - start
    return report


def _random_cell(config: SweepConfig, seed: int) -> Instance:
    rng = random.Random(seed)

    def pick(size: int) -> int:
        return int(rng.random() * size)

    n = 1 + pick(config.random_max_n)
    p = 1 + pick(config.random_max_p)
    density = 0.15 + 0.7 * rng.random()
    access = []
    for _ in range(n):
        mask = 0
        for r in range(p):
            if rng.random() < density:
                mask |= 1 << r
        access.append(mask)
    d = 1 + pick(config.max_d)
    choice = pick(config.max_t + 1)
    t = p if choice == config.max_t else min(choice + 1, p)
    return Instance(
        access=tuple(access),
        num_resources=p,
        target=(1 << p) - 1,
        s=config.max_s,
        d=d,
        t=t,
    )
