"""Exhaustive and seeded sweeps over small instances.

Each sweep returns a :class:`SweepResult` with instance counts, per-status
tallies and the first few counterexamples, so the CLI and the acceptance
tests report the same numbers.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field

from .fixtures import all_antitone_operators, random_antitone_operator
from .limits import (
    FAIL,
    NOT_MET,
    PASS,
    associated_operator,
    density_report,
    derived_topology,
    star_operator,
    verify_section3,
)
from .topology import (
    GroundSet,
    all_topologies,
    separating_refinement,
    subspace,
    valid_domains,
    verify_minimality,
)

LABELS = "abcdefgh"
MAX_EXAMPLES = 5


@dataclass
class SweepResult:
    name: str
    instances: int = 0
    tally: Counter = field(default_factory=Counter)
    counterexamples: list[dict] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.tally[FAIL] == 0

    def fail(self, detail: dict) -> None:
        self.tally[FAIL] += 1
        if len(self.counterexamples) < MAX_EXAMPLES:
            self.counterexamples.append(detail)

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "instances": self.instances, "tally": dict(sorted(self.tally.items())),
                "counterexamples": self.counterexamples, "seconds": round(self.seconds, 2)}

    def line(self) -> str:
        parts = ", ".join(f"{k}={v}" for k, v in sorted(self.tally.items()))
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.instances} instances ({parts}) in {self.seconds:.1f}s"


def _topology_instances(max_points: int):
    for n in range(1, max_points + 1):
        g = GroundSet.of(LABELS[:n])
        for tau in all_topologies(g):
            for d in valid_domains(tau):
                yield tau, d


def refinement_sweep(max_points: int = 4) -> SweepResult:
    """Refinement is finer, separates, agrees on D and is the unique minimum."""
    res = SweepResult("separating-refinement")
    t0 = time.perf_counter()
    for tau, d in _topology_instances(max_points):
        res.instances += 1
        star = separating_refinement(tau, d)
        rep = verify_minimality(star, tau, d)
        same_on_d = d == 0 or subspace(star, d) == subspace(tau, d)
        if rep.a_fin and rep.a_sep and same_on_d and rep.a_min and rep.unique_minimum:
            res.tally[PASS] += 1
        else:
            res.fail({"opens": tau.describe(), "D": tau.ground.labels_of(d), "a_fin": rep.a_fin,
                      "a_sep": rep.a_sep, "restriction": same_on_d, "a_min": rep.a_min,
                      "unique_minimum": rep.unique_minimum})
    res.seconds = time.perf_counter() - t0
    return res


def chain_sweep(max_points: int = 4) -> SweepResult:
    """Starring the associated operator lands on the separating refinement."""
    res = SweepResult("starred-associated-chain")
    t0 = time.perf_counter()
    for tau, d in _topology_instances(max_points):
        res.instances += 1
        star_top = separating_refinement(tau, d)
        tau_l_star = derived_topology(star_operator(associated_operator(tau), d))
        if tau_l_star == star_top and tau <= star_top <= tau_l_star:
            res.tally[PASS] += 1
        else:
            res.fail({"opens": tau.describe(), "D": tau.ground.labels_of(d),
                      "derived": tau_l_star.describe(), "refinement": star_top.describe()})
    res.seconds = time.perf_counter() - t0
    return res


def density_sweep(max_points: int = 4) -> SweepResult:
    """Where a density hypothesis holds, its conclusion must hold; other instances are tallied as not met."""
    res = SweepResult("density")
    t0 = time.perf_counter()
    for tau, d in _topology_instances(max_points):
        res.instances += 1
        rep = density_report(tau, d)
        for hyp, concl, tag in ((rep.reached_from_domain, rep.dense, "before"),
                                (rep.reached_with_preserved_limits, rep.dense_after_refinement, "after")):
            if not hyp:
                res.tally[f"{NOT_MET}:{tag}"] += 1
            elif concl:
                res.tally[f"{PASS}:{tag}"] += 1
            else:
                res.fail({"opens": tau.describe(), "D": tau.ground.labels_of(d), "side": tag, **rep.to_json()})
    res.seconds = time.perf_counter() - t0
    return res


def _evaluate(res: SweepResult, op, d: int) -> None:
    res.instances += 1
    for c in verify_section3(op, d).claims:
        if c.status == FAIL:
            res.fail({"claim": c.claim, "operator": op.describe(), "coherent": op.coherent,
                      "D": op.ground.labels_of(d), "detail": c.detail})
        else:
            res.tally[f"{c.status}:{c.claim}" if c.status == NOT_MET else c.status] += 1


def theorem_sweep(random_count: int = 10_000, seed: int = 0, max_points: int = 5,
                  exhaustive_points: int = 3) -> SweepResult:
    """Theorem suite on every antitone operator up to ``exhaustive_points`` and on seeded random ones.

    Exhaustive operators are checked at every valid D of their derived topology;
    random ones at one nonempty valid D, except that one draw in ten (and every
    operator without a nonempty valid D) takes an arbitrary subset, which
    exercises the not-met path.
    """
    res = SweepResult("theorem-suite")
    t0 = time.perf_counter()
    for n in range(1, exhaustive_points + 1):
        for op in all_antitone_operators(n):
            for d in valid_domains(derived_topology(op)):
                _evaluate(res, op, d)
    rng = random.Random(seed)
    for _ in range(random_count):
        op = random_antitone_operator(rng, max_points)
        doms = [d for d in valid_domains(derived_topology(op)) if d]
        d = rng.choice(doms) if doms and rng.random() < 0.9 else rng.randrange(1 << op.ground.size)
        _evaluate(res, op, d)
    res.seconds = time.perf_counter() - t0
    return res


