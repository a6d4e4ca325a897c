"""Finite topological spaces and their minimal D-separating refinement.

A topology on a finite ground set is stored by its vector of minimal open
neighbourhoods (one bitmask per point).  This is canonical, so equality and
refinement are cheap; the full family of open sets is produced on demand.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from . import kernels

MAX_POINTS = 24
DEFAULT_MAX_ENUM = 5


class CapacityError(ValueError):
    """The ground set is too large for the requested operation."""


class PreconditionError(ValueError):
    """Inputs violate an operation's precondition."""

    def __init__(self, message: str, witness: object = None) -> None:
        super().__init__(message)
        self.witness = witness


class NotATopologyError(ValueError):
    pass


def max_enum_points() -> int:
    raw = os.environ.get("SEQTOP_MAX_ENUM")
    return int(raw) if raw else DEFAULT_MAX_ENUM


def iter_bits(mask: int) -> Iterable[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class GroundSet:
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("ground set must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate labels in {self.labels}")
        if len(self.labels) > MAX_POINTS:
            raise CapacityError(f"ground set has {len(self.labels)} points; limit is {MAX_POINTS}")

    @classmethod
    def of(cls, labels: Iterable[object]) -> "GroundSet":
        return cls(tuple(str(x) for x in labels))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    @cached_property
    def _index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label: object) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise ValueError(f"unknown point {label!r}") from None

    def mask(self, labels: Iterable[object]) -> int:
        m = 0
        for lab in labels:
            m |= 1 << self.index(lab)
        return m

    def labels_of(self, mask: int) -> list[str]:
        return [self.labels[i] for i in iter_bits(mask)]

    def subsets(self) -> range:
        return range(1 << self.size)


@dataclass(frozen=True)
class FinTopology:
    ground: GroundSet
    min_nbhds: tuple[int, ...]

    @classmethod
    def from_opens(cls, ground: GroundSet, opens: Iterable[int]) -> "FinTopology":
        given = set(opens)
        for u in given:
            if u & ~ground.full:
                raise ValueError(f"open set {u:#x} not contained in ground")
        mn = kernels.min_nbhds_from_opens(ground.size, sorted(given | {ground.full}))
        top = cls(ground, tuple(mn))
        missing = [u for u in (0, ground.full) if u not in given]
        if missing:
            raise NotATopologyError("opens must contain the empty set and the full set")
        if ground.size <= 16:
            generated = set(top.opens)
            if generated != given:
                extra = sorted(generated - given)
                raise NotATopologyError(
                    "family is not closed under unions/intersections; missing "
                    + ", ".join("{" + ",".join(ground.labels_of(u)) + "}" for u in extra[:5])
                )
        else:
            for u in given:
                if not top.is_open(u):
                    raise NotATopologyError(f"{u:#x} is not a union of minimal neighbourhoods")
        return top

    @classmethod
    def discrete(cls, ground: GroundSet) -> "FinTopology":
        return cls(ground, tuple(1 << i for i in range(ground.size)))

    @classmethod
    def indiscrete(cls, ground: GroundSet) -> "FinTopology":
        return cls(ground, (ground.full,) * ground.size)

    @cached_property
    def opens(self) -> tuple[int, ...]:
        return tuple(kernels.opens_from_min_nbhds(self.ground.size, list(self.min_nbhds)))

    @property
    def closed_sets(self) -> tuple[int, ...]:
        full = self.ground.full
        return tuple(sorted(full & ~u for u in self.opens))

    def is_open(self, mask: int) -> bool:
        return all(self.min_nbhds[x] & ~mask == 0 for x in iter_bits(mask))

    def is_closed(self, mask: int) -> bool:
        return self.is_open(self.ground.full & ~mask)

    def closure(self, mask: int) -> int:
        return sum(1 << x for x in range(self.ground.size) if self.min_nbhds[x] & mask)

    def interior(self, mask: int) -> int:
        return sum(1 << x for x in range(self.ground.size) if self.min_nbhds[x] & ~mask == 0)

    def coarser_eq(self, other: "FinTopology") -> bool:
        """True when every open set of ``self`` is open in ``other``."""
        return all(o & ~s == 0 for s, o in zip(self.min_nbhds, other.min_nbhds))

    def __le__(self, other: "FinTopology") -> bool:
        return self.coarser_eq(other)

    def __lt__(self, other: "FinTopology") -> bool:
        return self.coarser_eq(other) and self != other

    def axioms_hold(self) -> bool:
        ops = set(self.opens)
        if 0 not in ops or self.ground.full not in ops:
            return False
        return all(a | b in ops and a & b in ops for a in ops for b in ops)

    def t1_failures(self) -> list[tuple[str, str]]:
        lab = self.ground.labels
        n = self.ground.size
        return [(lab[x], lab[y]) for x in range(n) for y in range(n)
                if x != y and self.min_nbhds[x] >> y & 1]

    def describe(self) -> list[list[str]]:
        return [self.ground.labels_of(u) for u in self.opens]


def _as_mask(ground: GroundSet, subset: int | Iterable[object]) -> int:
    if isinstance(subset, int):
        if subset & ~ground.full:
            raise ValueError("subset not contained in ground")
        return subset
    return ground.mask(subset)


def generate_topology(ground: GroundSet, subbasis: Iterable[int | Iterable[object]]) -> FinTopology:
    masks = [_as_mask(ground, s) for s in subbasis]
    return FinTopology(ground, tuple(kernels.min_nbhds_from_subbasis(ground.size, masks)))


def validate_domain(tau: FinTopology, d: int) -> None:
    """Raise unless ``d`` is open with discrete (hence Hausdorff) subspace topology.

    Local compactness holds trivially on finite spaces.
    """
    g = tau.ground
    if not tau.is_open(d):
        bad = next(x for x in iter_bits(d) if tau.min_nbhds[x] & ~d)
        outside = next(iter_bits(tau.min_nbhds[bad] & ~d))
        raise PreconditionError(
            f"D is not open: every neighbourhood of {g.labels[bad]} contains {g.labels[outside]}",
            (g.labels[bad], g.labels[outside]),
        )
    for x in iter_bits(d):
        rel = tau.min_nbhds[x] & d
        if rel != 1 << x:
            y = next(iter_bits(rel & ~(1 << x)))
            raise PreconditionError(
                f"D is not Hausdorff: {g.labels[x]} and {g.labels[y]} are not separated inside D",
                (g.labels[x], g.labels[y]),
            )


def is_valid_domain(tau: FinTopology, d: int) -> bool:
    try:
        validate_domain(tau, d)
    except PreconditionError:
        return False
    return True


def valid_domains(tau: FinTopology) -> list[int]:
    return [d for d in tau.ground.subsets() if is_valid_domain(tau, d)]


def _refinement_subbasis_full(tau: FinTopology, d: int) -> list[int]:
    full = tau.ground.full
    out = list(tau.min_nbhds)
    k = d
    while True:
        out.append(full & ~k)
        if k == 0:
            break
        k = (k - 1) & d
    return out


def separating_refinement(tau: FinTopology, d: int | Iterable[object]) -> FinTopology:
    g = tau.ground
    d = _as_mask(g, d)
    validate_domain(tau, d)
    full = g.full
    subbasis = list(tau.min_nbhds) + [full & ~(1 << p) for p in iter_bits(d)]
    star = generate_topology(g, subbasis)
    if popcount(d) <= 10:
        every_compact = generate_topology(g, _refinement_subbasis_full(tau, d))
        assert every_compact == star, "singleton complements must generate the same refinement"
    return star


def subspace(tau: FinTopology, s: int | Iterable[object]) -> FinTopology:
    g = tau.ground
    s = _as_mask(g, s)
    idx = list(iter_bits(s))
    if not idx:
        raise ValueError("subspace of the empty set has no ground")
    sub = GroundSet(tuple(g.labels[i] for i in idx))
    remap = {old: new for new, old in enumerate(idx)}

    def project(mask: int) -> int:
        return sum(1 << remap[i] for i in iter_bits(mask & s))

    return FinTopology(sub, tuple(project(tau.min_nbhds[i]) for i in idx))


def all_topologies(ground: GroundSet, cap: int | None = None) -> list[FinTopology]:
    cap = max_enum_points() if cap is None else cap
    if ground.size > cap:
        raise CapacityError(f"exhaustive enumeration supports at most {cap} points (got {ground.size})")
    return [FinTopology(ground, mn) for mn in kernels.enumerate_min_nbhds(ground.size)]


def a_sep(tau: FinTopology, tau_prime: FinTopology, d: int) -> bool:
    return kernels.asep_holds(tau.ground.size, d, list(tau.min_nbhds), list(tau_prime.min_nbhds))


def cross_t2_failures(tau: FinTopology, tau_prime: FinTopology, d: int) -> list[tuple[str, str]]:
    lab = tau.ground.labels
    n = tau.ground.size
    return [(lab[p], lab[q]) for p in iter_bits(d) for q in range(n)
            if not d >> q & 1 and tau.min_nbhds[p] & tau_prime.min_nbhds[q]]


@dataclass
class SeparationReport:
    t1_failures: list[tuple[str, str]]
    cross_t2_failures: list[tuple[str, str]]
    a_fin: bool
    a_sep: bool
    a_min: bool | None = None
    unique_minimum: bool | None = None
    candidates_checked: int = 0
    coarser_witnesses: list[list[list[str]]] = field(default_factory=list)
    non_containing_witnesses: list[list[list[str]]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "t1_failures": [list(p) for p in self.t1_failures],
            "cross_t2_failures": [list(p) for p in self.cross_t2_failures],
            "A_Fin": self.a_fin,
            "A_Sep": self.a_sep,
            "A_Min": self.a_min,
            "unique_minimum": self.unique_minimum,
            "candidates_checked": self.candidates_checked,
        }


def separation_report(tau_star: FinTopology, tau: FinTopology, d: int) -> SeparationReport:
    fails = cross_t2_failures(tau, tau_star, d)
    return SeparationReport(
        t1_failures=tau_star.t1_failures(),
        cross_t2_failures=fails,
        a_fin=tau <= tau_star,
        a_sep=not fails,
    )


def verify_minimality(
    tau_star: FinTopology,
    tau: FinTopology,
    d: int | Iterable[object],
    candidates: Sequence[FinTopology] | None = None,
) -> SeparationReport:
    """Exhaustive check that ``tau_star`` is the least D-separating refinement.

    ``a_min``: no topology strictly between ``tau`` and ``tau_star`` separates.
    ``unique_minimum``: every separating refinement of ``tau`` contains ``tau_star``.
    The two are reported separately.
    """
    g = tau.ground
    d = _as_mask(g, d)
    report = separation_report(tau_star, tau, d)
    if candidates is None:
        cand_mn = kernels.enumerate_min_nbhds(g.size) if g.size <= max_enum_points() else None
        if cand_mn is None:
            raise CapacityError(
                f"minimality needs exhaustive enumeration; {g.size} points exceeds {max_enum_points()}"
            )
    else:
        cand_mn = [c.min_nbhds for c in candidates]
    hits = kernels.filter_finer_separating(g.size, d, list(tau.min_nbhds), list(cand_mn))
    coarser, non_containing = [], []
    for i in hits:
        cand = FinTopology(g, tuple(cand_mn[i]))
        if cand < tau_star:
            coarser.append(cand)
        if not tau_star <= cand:
            non_containing.append(cand)
    report.candidates_checked = len(cand_mn)
    report.a_min = report.a_fin and report.a_sep and not coarser
    report.unique_minimum = report.a_min and not non_containing
    report.coarser_witnesses = [c.describe() for c in coarser[:3]]
    report.non_containing_witnesses = [c.describe() for c in non_containing[:3]]
    return report


def density_check(tau: FinTopology, tau_star: FinTopology, d: int | Iterable[object]) -> tuple[bool, bool]:
    g = tau.ground
    d = _as_mask(g, d)
    if not tau <= tau_star:
        raise PreconditionError("density_check expects tau to be coarser than tau_star")
    return tau.closure(d) == g.full, tau_star.closure(d) == g.full


def topology_from_json(doc: dict) -> tuple[FinTopology, int]:
    """Read ``{"points", "opens", "D"?}``; returns the topology and the D mask (0 if absent)."""
    g = GroundSet.of(doc["points"])
    tau = FinTopology.from_opens(g, [g.mask(u) for u in doc["opens"]])
    return tau, g.mask(doc.get("D", []))


def topology_to_json(tau: FinTopology, d: int | None = None) -> dict:
    out = {"points": list(tau.ground.labels), "opens": tau.describe()}
    if d is not None:
        out["D"] = tau.ground.labels_of(d)
    return out
