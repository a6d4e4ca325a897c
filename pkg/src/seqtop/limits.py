"""Limit operators on finite ground sets, modelled on tail profiles.

A sequence in a finite set is represented by the nonempty set of points it
visits infinitely often; its subsequences are exactly the nonempty subsets of
that profile.  An operator is a table indexed by profile bitmask.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from . import kernels
from .topology import (
    FinTopology,
    GroundSet,
    PreconditionError,
    a_sep,
    density_check,
    iter_bits,
    separating_refinement,
    subspace,
    validate_domain,
)

MAX_OPERATOR_POINTS = 12


class IncompleteTableError(ValueError):
    pass


def nonempty_submasks(a: int) -> Iterable[int]:
    b = a
    while b:
        yield b
        b = (b - 1) & a


@dataclass(frozen=True, eq=False)
class TailLimitOperator:
    ground: GroundSet
    table: tuple[int, ...]
    coherent: bool = True

    def __post_init__(self) -> None:
        if self.ground.size > MAX_OPERATOR_POINTS:
            raise ValueError(f"operators are tabulated up to {MAX_OPERATOR_POINTS} points")
        if len(self.table) != 1 << self.ground.size:
            raise IncompleteTableError("table must have one entry per subset (index 0 unused)")

    @classmethod
    def from_function(cls, ground: GroundSet, fn: Callable[[int], int], coherent: bool = True) -> "TailLimitOperator":
        return cls(ground, (0,) + tuple(fn(a) for a in range(1, 1 << ground.size)), coherent)

    @classmethod
    def from_singletons(cls, ground: GroundSet, singles: dict[str, Iterable[str]], coherent: bool = True) -> "TailLimitOperator":
        """Maximal antitone completion: each profile gets the meet of its singleton values."""
        vals = [ground.mask(singles[lab]) for lab in ground.labels]

        def fn(a: int) -> int:
            acc = ground.full
            for x in iter_bits(a):
                acc &= vals[x]
            return acc

        return cls.from_function(ground, fn, coherent)

    def __eq__(self, other: object) -> bool:
        # operators are compared as maps; the coherence flag only governs validation
        if not isinstance(other, TailLimitOperator):
            return NotImplemented
        return self.ground == other.ground and self.table == other.table

    def __hash__(self) -> int:
        return hash((self.ground, self.table))

    def __call__(self, a: int) -> int:
        return self.table[a]

    def __le__(self, other: "TailLimitOperator") -> bool:
        return all(s & ~o == 0 for s, o in zip(self.table, other.table))

    def profiles(self) -> range:
        return range(1, 1 << self.ground.size)

    def describe(self) -> dict[str, list[str]]:
        g = self.ground
        return {",".join(g.labels_of(a)): g.labels_of(self.table[a]) for a in self.profiles()}


def antitone_meet(ground: GroundSet, raw: Iterable[int], coherent: bool = True) -> TailLimitOperator:
    """Largest antitone table below ``raw``: each profile gets the meet over its subprofiles."""
    table = [0] + list(raw)
    if len(table) != 1 << ground.size:
        raise IncompleteTableError("raw table must have one entry per nonempty subset")
    # process by increasing size so every proper subprofile is already final
    for a in sorted(range(1, 1 << ground.size), key=lambda m: bin(m).count("1")):
        acc = table[a]
        for x in iter_bits(a):
            acc &= table[a & ~(1 << x)] if a & ~(1 << x) else ground.full
        table[a] = acc
    return TailLimitOperator(ground, tuple(table), coherent)


@dataclass
class OperatorValidation:
    valid: bool
    antitone_violations: list[tuple[list[str], list[str]]] = field(default_factory=list)
    coherence_violations: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "antitone_violations": [{"sub": list(b), "sup": list(a)} for b, a in self.antitone_violations],
            "coherence_violations": self.coherence_violations,
        }


def validate_operator(op: TailLimitOperator) -> OperatorValidation:
    g = op.ground
    anti = []
    for a in op.profiles():
        la = op.table[a]
        for b in nonempty_submasks(a):
            if b != a and la & ~op.table[b]:
                anti.append((g.labels_of(b), g.labels_of(a)))
    coh = []
    if op.coherent:
        coh = [g.labels[x] for x in range(g.size) if not op.table[1 << x] >> x & 1]
    return OperatorValidation(not anti and not coh, anti, coh)


def is_coherent(op: TailLimitOperator) -> bool:
    return all(op.table[1 << x] >> x & 1 for x in range(op.ground.size))


def is_limit_operator(op: TailLimitOperator) -> bool:
    """Antitone under passing to subprofiles (coherence not required)."""
    for a in op.profiles():
        la = op.table[a]
        for x in iter_bits(a):
            if la & ~op.table[1 << x]:
                return False
        for b in nonempty_submasks(a):
            if la & ~op.table[b]:
                return False
    return True


def derived_topology(op: TailLimitOperator) -> FinTopology:
    g = op.ground
    closed = kernels.derived_closed_sets(g.size, list(op.table))
    opens = sorted(g.full & ~c for c in closed)
    return FinTopology.from_opens(g, opens)


def associated_operator(tau: FinTopology) -> TailLimitOperator:
    g = tau.ground
    mn = tau.min_nbhds

    def fn(a: int) -> int:
        return sum(1 << p for p in range(g.size) if a & ~mn[p] == 0)

    return TailLimitOperator.from_function(g, fn, coherent=True)


def converges(tau: FinTopology, a: int, p: int) -> bool:
    """A sequence with profile ``a`` converges to point ``p`` iff it eventually lies in U_p."""
    return a & ~tau.min_nbhds[p] == 0


def restrict_operator(op: TailLimitOperator, d: int | Iterable[str]) -> TailLimitOperator:
    g = op.ground
    d = d if isinstance(d, int) else g.mask(d)
    tau = derived_topology(op)
    if not tau.is_open(d):
        raise PreconditionError("restriction needs D open in the derived topology")
    idx = list(iter_bits(d))
    sub = GroundSet(tuple(g.labels[i] for i in idx))

    def lift(a: int) -> int:
        return sum(1 << idx[j] for j in iter_bits(a))

    def project(m: int) -> int:
        return sum(1 << j for j, i in enumerate(idx) if m >> i & 1)

    restricted = TailLimitOperator.from_function(sub, lambda a: project(op.table[lift(a)]), op.coherent)
    assert derived_topology(restricted) == subspace(tau, d), "restricted operator must induce the subspace topology"
    return restricted


def _next_iterate(op: TailLimitOperator, reached: list[int]) -> list[int]:
    out = [0] * len(reached)
    for a in op.profiles():
        u = reached[a]
        acc = 0
        for b in nonempty_submasks(u):
            acc |= op.table[b]
        out[a] = acc
    return out


def iterate_raw(op: TailLimitOperator, up_to: int | None = None) -> list[TailLimitOperator]:
    """L^1, L^2, ... without the coherence precondition; stops once the chain is stable."""
    n = op.ground.size
    limit = up_to if up_to is not None else n + 2
    chain = [op]
    reached = list(op.table)
    while len(chain) < limit:
        nxt = _next_iterate(op, reached)
        if tuple(nxt) == chain[-1].table:
            break
        chain.append(TailLimitOperator(op.ground, tuple(nxt), op.coherent))
        reached = [r | x for r, x in zip(reached, nxt)]
    return chain


def iterate(op: TailLimitOperator, up_to: int | None = None) -> list[TailLimitOperator]:
    if not is_coherent(op):
        raise PreconditionError("iteration requires a coherent operator")
    return iterate_raw(op, up_to)


@dataclass(frozen=True)
class OperatorOrder:
    kind: str
    k: int | None = None

    def __str__(self) -> str:
        return f"KthOrder({self.k})" if self.kind == "KthOrder" else self.kind


FIRST_ORDER = OperatorOrder("FirstOrder")
NOT_ANY_ORDER = OperatorOrder("NotAnyOrder")


def is_first_order(op: TailLimitOperator) -> bool:
    return associated_operator(derived_topology(op)) == op


def order_of(op: TailLimitOperator) -> OperatorOrder:
    target = associated_operator(derived_topology(op))
    if op == target:
        return FIRST_ORDER
    for k, lk in enumerate(iterate(op), start=1):
        if lk.table == target.table:
            return OperatorOrder("KthOrder", k)
    return NOT_ANY_ORDER


def is_first_order_on(op: TailLimitOperator, d: int) -> bool:
    tau = derived_topology(op)
    for a in nonempty_submasks(d):
        for p in iter_bits(d):
            if bool(op.table[a] >> p & 1) != converges(tau, a, p):
                return False
    return True


def star_operator(op: TailLimitOperator, d: int | Iterable[str]) -> TailLimitOperator:
    g = op.ground
    d = d if isinstance(d, int) else g.mask(d)
    validate_domain(derived_topology(op), d)
    return _star(op, d)


def _star(op: TailLimitOperator, d: int) -> TailLimitOperator:
    hits_d = [False] * len(op.table)
    for a in op.profiles():
        hits_d[a] = any(op.table[b] & d for b in nonempty_submasks(a))
    return TailLimitOperator.from_function(
        op.ground, lambda a: op.table[a] & d if hits_d[a] else op.table[a], op.coherent
    )


def satisfies_star_properties(op: TailLimitOperator, cand: TailLimitOperator, d: int) -> bool:
    """Pointwise below ``op``, no mixed D/non-D limits, and unchanged on profiles inside D."""
    for a in op.profiles():
        la, ca = op.table[a], cand.table[a]
        if ca & ~la:
            return False
        if ca & d and ca & ~d:
            return False
        if a & ~d == 0 and (ca & d) != (la & d):
            return False
    return True


def star_maximality_counterexamples(op: TailLimitOperator, d: int) -> list[tuple[int, int]]:
    """Profiles/points where some admissible operator exceeds the starred one.

    For each ``q`` in ``L(A)`` but not in ``L*(A)``, the least limit operator that
    keeps ``L`` on D-profiles and carries ``q`` at every subprofile of ``A`` is
    built; any admissible operator containing ``q`` at ``A`` contains it, and
    mixing only grows with the table, so this witness is decisive.
    """
    star = _star(op, d)
    bad = []
    for a in op.profiles():
        for q in iter_bits(op.table[a] & ~star.table[a]):
            def fn(b: int, a=a, q=q) -> int:
                base = op.table[b] & d if b & ~d == 0 else 0
                return base | ((1 << q) if b & ~a == 0 else 0)

            cand = TailLimitOperator.from_function(op.ground, fn, coherent=False)
            if satisfies_star_properties(op, cand, d):
                bad.append((a, q))
    return bad


def enumerate_admissible_below(op: TailLimitOperator, d: int) -> list[TailLimitOperator]:
    """Brute force: every limit operator satisfying the three starred properties.

    Exponential; intended for ground sets of at most 3 points.
    """
    g = op.ground
    if g.size > 3:
        raise ValueError("brute-force operator enumeration is limited to 3 points")
    profiles = sorted(op.profiles(), key=lambda a: (-bin(a).count("1"), a))
    table = [0] * (1 << g.size)
    out = []

    def options(a: int) -> list[int]:
        lower = 0
        for sup in range(1, 1 << g.size):
            if sup != a and sup & a == a:
                lower |= table[sup]
        la = op.table[a]
        res = []
        free = la & ~lower
        sub = free
        while True:
            val = lower | sub
            ok = val & ~la == 0
            if ok and val & d and val & ~d:
                ok = False
            if ok and a & ~d == 0 and (val & d) != (la & d):
                ok = False
            if ok:
                res.append(val)
            if sub == 0:
                break
            sub = (sub - 1) & free
        return res

    def rec(i: int) -> None:
        if i == len(profiles):
            out.append(TailLimitOperator(g, tuple(table), coherent=False))
            return
        a = profiles[i]
        for v in options(a):
            table[a] = v
            rec(i + 1)
        table[a] = 0

    rec(0)
    return out


# --- theorem suite -----------------------------------------------------------

PASS = "pass"
NOT_MET = "hypothesis-not-met"
FAIL = "FAIL"


@dataclass
class ClaimResult:
    claim: str
    status: str
    detail: str = ""


@dataclass
class TheoremReport:
    claims: list[ClaimResult]

    @property
    def failures(self) -> list[ClaimResult]:
        return [c for c in self.claims if c.status == FAIL]

    def status_of(self, claim: str) -> str:
        return next(c.status for c in self.claims if c.claim == claim)

    def to_json(self) -> list[dict]:
        return [{"claim": c.claim, "status": c.status, "detail": c.detail} for c in self.claims]


def _claim(name: str, hypothesis: bool, conclusion: Callable[[], bool], detail: str = "") -> ClaimResult:
    if not hypothesis:
        return ClaimResult(name, NOT_MET, detail)
    return ClaimResult(name, PASS if conclusion() else FAIL, detail)


def _iterates_equal(a: list[TailLimitOperator], b: list[TailLimitOperator]) -> bool:
    depth = max(len(a), len(b))
    for i in range(depth):
        ta = a[min(i, len(a) - 1)].table
        tb = b[min(i, len(b) - 1)].table
        if ta != tb:
            return False
    return True


def verify_section3(op: TailLimitOperator, d: int | Iterable[str], check_maximality: bool = True) -> TheoremReport:
    """Evaluate each structural claim about L, L_tau, L* and tau* on one instance."""
    g = op.ground
    d = d if isinstance(d, int) else g.mask(d)
    claims: list[ClaimResult] = []
    validation = validate_operator(op)
    valid = not validation.antitone_violations
    tau = derived_topology(op)
    l_tau = associated_operator(tau)
    d_ok = valid and _domain_ok(tau, d)
    coherent = op.coherent and not validation.coherence_violations
    first = op == l_tau
    first_on_d = is_first_order_on(op, d)

    claims.append(_claim("sequential-round-trip", True,
                         lambda: derived_topology(l_tau) == tau and is_first_order(l_tau)))
    claims.append(_claim("limits-converge", valid, lambda: all(
        converges(tau, a, p) for a in op.profiles() for p in iter_bits(op.table[a]))))
    claims.append(_claim("restriction", d_ok and d != 0, lambda: _restriction_holds(op, tau, d)))

    chain = iterate_raw(op) if coherent else []
    claims.append(_claim("iterates-below-associated", coherent, lambda: all(lk <= l_tau for lk in chain)))
    order = order_of(op) if coherent else None
    claims.append(_claim(
        "order-stabilizes", order is not None and order.kind != "NotAnyOrder",
        lambda: all(lk == l_tau for lk in iterate_raw(op, (order.k or 1) + 3)[(order.k or 1) - 1:]),
    ))

    if not d_ok:
        for name in ("refinement-monotone", "refinement-converse", "separation-forces-no-mixing",
                     "no-mixing-gives-separation", "star-is-maximum", "starred-limits-kept",
                     "topology-chain", "first-order-equality", "iterates-agree-off-domain",
                     "starred-associated-equality"):
            claims.append(ClaimResult(name, NOT_MET, "D invalid or operator not antitone"))
        return TheoremReport(claims)

    star = _star(op, d)
    tau_l_star = derived_topology(star)
    tau_star = separating_refinement(tau, d)
    l_tau_star = associated_operator(tau_star)
    sep_l_star = a_sep(tau, tau_l_star, d)

    claims.append(_claim("refinement-monotone", True, lambda: star <= op and tau <= tau_l_star))
    claims.append(_claim(
        "refinement-converse", first,
        lambda: associated_operator(tau_l_star) <= op,
    ))

    def no_mixing(o: TailLimitOperator) -> bool:
        return all(not (o.table[a] & d and o.table[a] & ~d) for a in o.profiles())

    claims.append(_claim(
        "separation-forces-no-mixing", True,
        lambda: (not sep_l_star or no_mixing(star)) and (not a_sep(tau, tau_star, d) or no_mixing(l_tau_star)),
    ))
    claims.append(_claim(
        "no-mixing-gives-separation", first_on_d,
        lambda: a_sep(tau, tau_l_star, d),
    ))

    def maximum() -> bool:
        if not (is_limit_operator(star) and satisfies_star_properties(op, star, d)):
            return False
        if check_maximality and g.size <= 3:
            return all(c <= star for c in enumerate_admissible_below(op, d))
        return not star_maximality_counterexamples(op, d)

    claims.append(_claim("star-is-maximum", True, maximum))
    claims.append(_claim(
        "starred-limits-kept", sep_l_star,
        lambda: all(not (converges(tau_l_star, a, q) and op.table[a] >> q & 1) or star.table[a] >> q & 1
                    for a in op.profiles() for q in range(g.size)),
    ))
    claims.append(_claim(
        "topology-chain", first_on_d,
        lambda: tau <= tau_star and tau_star <= tau_l_star,
    ))
    claims.append(_claim(
        "first-order-equality", first,
        lambda: is_first_order(star) and tau_l_star == tau_star,
    ))
    l_tau_starred = _star(l_tau, d)
    witnesses = [a for a in op.profiles() if l_tau_starred.table[a] & ~d]
    star_chain = iterate_raw(star)
    base_chain = iterate_raw(op)

    def agree_off_domain() -> bool:
        depth = max(len(base_chain), len(star_chain))
        for a in witnesses:
            for i in range(depth):
                lb = base_chain[min(i, len(base_chain) - 1)].table[a]
                ls = star_chain[min(i, len(star_chain) - 1)].table[a]
                if lb != ls:
                    return False
        return True

    claims.append(_claim("iterates-agree-off-domain", coherent and bool(witnesses), agree_off_domain))
    hyp_313 = (order is not None and order.kind != "NotAnyOrder") and first_on_d and is_first_order(star)
    claims.append(_claim("starred-associated-equality", hyp_313, lambda: star == l_tau_starred))
    return TheoremReport(claims)


@dataclass
class DensityReport:
    reached_from_domain: bool
    reached_with_preserved_limits: bool
    dense: bool
    dense_after_refinement: bool

    @property
    def consistent(self) -> bool:
        """Each hypothesis that holds carries its density conclusion."""
        return ((not self.reached_from_domain or self.dense)
                and (not self.reached_with_preserved_limits or self.dense_after_refinement))

    def to_json(self) -> dict:
        return {
            "reached_from_domain": self.reached_from_domain,
            "reached_with_preserved_limits": self.reached_with_preserved_limits,
            "dense": self.dense,
            "dense_after_refinement": self.dense_after_refinement,
        }


def density_report(tau: FinTopology, d: int | Iterable[str]) -> DensityReport:
    """Density of D before and after refinement, with the sequence hypotheses that predict it.

    The first hypothesis asks that every point outside D be a limit of some
    sequence inside D; the second additionally asks that the starred
    associated operator keep that sequence's limits.
    """
    g = tau.ground
    d = d if isinstance(d, int) else g.mask(d)
    validate_domain(tau, d)
    l_tau = associated_operator(tau)
    l_star = _star(l_tau, d)
    outside = list(iter_bits(g.full & ~d))
    subs = list(nonempty_submasks(d))
    h1 = all(any(l_tau.table[a] >> x & 1 for a in subs) for x in outside)
    h2 = all(any(l_tau.table[a] >> x & 1 and l_tau.table[a] == l_star.table[a] for a in subs) for x in outside)
    dense, dense_star = density_check(tau, separating_refinement(tau, d), d)
    return DensityReport(h1, h2, dense, dense_star)


def _domain_ok(tau: FinTopology, d: int) -> bool:
    try:
        validate_domain(tau, d)
    except PreconditionError:
        return False
    return True


def _restriction_holds(op: TailLimitOperator, tau: FinTopology, d: int) -> bool:
    try:
        restrict_operator(op, d)
    except AssertionError:
        return False
    return True


# --- JSON ---------------------------------------------------------------------

def profile_key(ground: GroundSet, a: int) -> str:
    return ",".join(ground.labels_of(a))


def operator_from_json(doc: dict) -> TailLimitOperator:
    """Read ``{"points", "table", "coherent", "autofill"?}``.

    Table keys are comma-separated labels.  Missing multi-point entries are
    filled with the meet of singleton values only under
    ``"autofill": "antitone-max"``.
    """
    g = GroundSet.of(doc["points"])
    raw = doc.get("table", {})
    table = [0] * (1 << g.size)
    seen = [False] * (1 << g.size)
    for key, vals in raw.items():
        labels = [k.strip() for k in key.split(",") if k.strip()]
        if not labels:
            raise IncompleteTableError("empty profile key in table")
        a = g.mask(labels)
        table[a] = g.mask(vals)
        seen[a] = True
    autofill = doc.get("autofill")
    if autofill not in (None, "antitone-max"):
        raise ValueError(f"unknown autofill mode {autofill!r}")
    missing = [a for a in range(1, 1 << g.size) if not seen[a]]
    for a in missing:
        if autofill is None or a & (a - 1) == 0:
            raise IncompleteTableError(f"table has no entry for profile {profile_key(g, a)!r}")
        acc = g.full
        for x in iter_bits(a):
            acc &= table[1 << x]
        table[a] = acc
    return TailLimitOperator(g, tuple(table), bool(doc.get("coherent", True)))


def operator_to_json(op: TailLimitOperator) -> dict:
    g = op.ground
    return {
        "points": list(g.labels),
        "table": {profile_key(g, a): g.labels_of(op.table[a]) for a in op.profiles()},
        "coherent": op.coherent,
    }
