"""Finitely presented chronological sets.

A model has a finite core and finitely many families ``f(0), f(1), ...``.
The relation between two sorts is an index predicate: closed for
core/core, in the family index for core/family, in both indices for
family/family.  Stored relations use ``s`` for the source index and ``t``
for the target index.  Sets keep their element index in ``x``; a set may
depend on parameters, which are any other variables.

Past sets follow the down-closed convention (``I-(P)`` inside ``P``).  For
that convention a nonempty set is indecomposable exactly when it is
directed for the reflexive order, which is what ``is_ip`` decides.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator

from .predicates import (
    Formula,
    PredicateSyntaxError,
    box_points,
    constant,
    diagonal,
    equality,
    from_upset,
    is_false,
    is_true,
    materialize,
    parse,
)
from .upset import UPSet

X = "x"
FALSE = constant(False)
TRUE = constant(True)


class ModelError(ValueError):
    """Schema or invariant violation in a chronological model."""


def _trivially_false(f: Formula) -> bool:
    return f.arity == 0 and not f.fn()


def _or(a: Formula, b: Formula) -> Formula:
    if _trivially_false(a):
        return b
    if _trivially_false(b):
        return a
    return materialize(a | b)


def _and(a: Formula, b: Formula) -> Formula:
    if _trivially_false(a) or _trivially_false(b):
        return FALSE
    return materialize(a & b)


def witness(f: Formula) -> dict[str, int] | None:
    """Some satisfying assignment, searched in the licensed box (lexicographically smallest)."""
    for p in box_points(f.arity, f.bound, f.modulus):
        if f.fn(*p):
            return dict(zip(f.vars, p))
    return None


def formula_upset(f: Formula, var: str) -> UPSet:
    """The set of values of ``var`` satisfying a formula whose only free variable is ``var``."""
    if f.arity == 0:
        return UPSet.universe() if f.truth() else UPSet.empty()
    if f.vars != (var,):
        raise ValueError(f"expected a formula in {var!r}, got {f.vars}")
    return f.to_upset()


# --- symbolic sets ---------------------------------------------------------------

class PSet:
    """A subset of the model, possibly depending on parameters.

    ``core[label]`` is a formula in the parameters; ``fams[name]`` is a
    formula in ``x`` and the parameters.  Absent keys mean "never".
    """

    __slots__ = ("core", "fams")

    def __init__(self, core: dict[str, Formula] | None = None, fams: dict[str, Formula] | None = None) -> None:
        self.core = {k: v for k, v in (core or {}).items() if not _trivially_false(v)}
        self.fams = {k: v for k, v in (fams or {}).items() if not _trivially_false(v)}

    @classmethod
    def of_points(cls, points: Iterable[tuple[str, int | None]]) -> "PSet":
        core: dict[str, Formula] = {}
        idx: dict[str, set[int]] = {}
        for sort, i in points:
            if i is None:
                core[sort] = TRUE
            else:
                idx.setdefault(sort, set()).add(i)
        return cls(core, {f: from_upset(X, UPSet.finite(v)) for f, v in idx.items()})

    def part(self, sort: str) -> Formula:
        return self.core.get(sort) or self.fams.get(sort) or FALSE

    @property
    def params(self) -> tuple[str, ...]:
        out: set[str] = set()
        for f in list(self.core.values()) + list(self.fams.values()):
            out |= set(f.vars)
        out.discard(X)
        return tuple(sorted(out))

    # algebra ------------------------------------------------------------------

    def _merge(self, other: "PSet", op) -> "PSet":
        core = {k: op(self.core.get(k, FALSE), other.core.get(k, FALSE)) for k in set(self.core) | set(other.core)}
        fams = {k: op(self.fams.get(k, FALSE), other.fams.get(k, FALSE)) for k in set(self.fams) | set(other.fams)}
        return PSet(core, fams)

    def __or__(self, other: "PSet") -> "PSet":
        return self._merge(other, _or)

    def __and__(self, other: "PSet") -> "PSet":
        return self._merge(other, _and)

    def __sub__(self, other: "PSet") -> "PSet":
        return self._merge(other, lambda a, b: _and(a, ~b))

    def rename(self, mapping: dict[str, str]) -> "PSet":
        return PSet({k: v.rename(mapping) for k, v in self.core.items()},
                    {k: v.rename(mapping) for k, v in self.fams.items()})

    def substitute(self, var: str, value: int) -> "PSet":
        return PSet({k: v.substitute(var, value) for k, v in self.core.items()},
                    {k: v.substitute(var, value) for k, v in self.fams.items()})

    def restrict(self, guard: Formula) -> "PSet":
        """Intersect every part with a formula in the parameters."""
        return PSet({k: _and(v, guard) for k, v in self.core.items()},
                    {k: _and(v, guard) for k, v in self.fams.items()})

    # decisions (formulas in the parameters) -------------------------------------

    def subset_of(self, other: "PSet") -> Formula:
        # parts absent from ``other`` first: they fail fastest
        order = sorted(list(self.core) + list(self.fams), key=lambda k: (k in other.core or k in other.fams))
        acc = TRUE
        for k in order:
            if k in self.core:
                term = self.core[k].implies(other.core.get(k, FALSE))
            else:
                term = materialize(self.fams[k].implies(other.fams.get(k, FALSE))).forall(X)
            acc = _and(acc, term)
            if is_false(acc):
                return FALSE
        return acc

    def empty(self) -> Formula:
        return self.subset_of(PSet())

    def equals(self, other: "PSet") -> Formula:
        return _and(self.subset_of(other), other.subset_of(self))

    # fixed sets -------------------------------------------------------------------

    def _require_fixed(self) -> None:
        if self.params:
            raise ValueError(f"set depends on parameters {self.params}")

    def key(self) -> tuple:
        self._require_fixed()
        core = frozenset(k for k, v in self.core.items() if v.truth())
        fams = tuple(sorted((k, formula_upset(v, X)) for k, v in self.fams.items()
                            if not formula_upset(v, X).is_empty()))
        return core, fams

    def is_empty_set(self) -> bool:
        core, fams = self.key()
        return not core and not fams

    def contains(self, sort: str, index: int | None = None) -> bool:
        self._require_fixed()
        if index is None:
            return sort in self.core and self.core[sort].truth()
        return sort in self.fams and self.fams[sort].at(**{X: index})

    def describe(self) -> str:
        if self.params:
            parts = [f"{k} if {v.text}" for k, v in sorted(self.core.items())]
            parts += [f"{k}[x: {v.text}]" for k, v in sorted(self.fams.items())]
            return "{" + "; ".join(parts) + "}"
        core, fams = self.key()
        parts = sorted(core) + [f"{k}[{s.to_predicate('n')}]" for k, s in fams]
        return "{" + ", ".join(parts) + "}" if parts else "{}"

    def to_json(self) -> dict:
        core, fams = self.key()
        return {"core": sorted(core), "fams": {k: s.to_predicate("n") for k, s in fams}}

    def __repr__(self) -> str:
        return f"PSet{self.describe()}"


# --- model ------------------------------------------------------------------------

@dataclass
class Designated:
    """A designated terminal past (side='past') or future set, possibly a parametric family in ``k``."""

    name: str
    side: str
    members: PSet
    parametric: bool = False
    index: UPSet = field(default_factory=UPSet.universe)
    chain: tuple[str, UPSet] | None = None
    assume_ip: bool = False

    def at(self, k: int) -> PSet:
        return self.members.substitute("k", k) if self.parametric else self.members


@dataclass
class Component:
    """One interleaved strand of a test sequence.

    kind 'family': manifold points ``fam(n)`` for ``n`` in ``index``;
    kind 'point': a constant manifold point; kind 'boundary': a constant
    boundary pair named by designations; kind 'boundary-family': the pairs of
    a parametric designation for ``k`` in ``index``.
    """

    kind: str
    ref: tuple
    index: UPSet | None = None

    def describe(self) -> str:
        if self.kind == "family":
            return f"{self.ref[0]}(n) for {self.index.to_predicate('n')}"
        if self.kind == "point":
            return _point_name(self.ref)
        if self.kind == "boundary":
            return f"({self.ref[0] or '0'},{self.ref[1] or '0'})"
        return f"({self.ref[0]}(k),{self.ref[1] or '0'}) for {self.index.to_predicate('k')}"


@dataclass
class SequenceSpec:
    name: str
    components: list[Component]


def _point_name(point: tuple[str, int | None]) -> str:
    return point[0] if point[1] is None else f"{point[0]}({point[1]})"


class ChronoModel:
    def __init__(self, name: str, core: list[str], families: list[str],
                 rel: dict[tuple[str, str], Formula], tips: list[Designated] | None = None,
                 tifs: list[Designated] | None = None, sequences: list[SequenceSpec] | None = None) -> None:
        if len(set(core) | set(families)) != len(core) + len(families):
            raise ModelError("core labels and family names must be distinct")
        self.name = name
        self.core = tuple(core)
        self.families = tuple(families)
        self.sorts = self.core + self.families
        self._rel = {k: materialize(v) for k, v in rel.items() if not _trivially_false(v)}
        self.tips = list(tips or [])
        self.tifs = list(tifs or [])
        self.sequences = list(sequences or [])
        self._cache: dict = {}

    def is_family(self, sort: str) -> bool:
        return sort in self.families

    def rel(self, a: str, b: str) -> Formula:
        """``a(s) << b(t)``; a core endpoint has no index variable."""
        return self._rel.get((a, b), FALSE)

    def points(self, below: int) -> Iterator[tuple[str, int | None]]:
        for c in self.core:
            yield (c, None)
        for f in self.families:
            for i in range(below):
                yield (f, i)

    def precedes(self, p: tuple[str, int | None], q: tuple[str, int | None]) -> bool:
        env = {}
        if p[1] is not None:
            env["s"] = p[1]
        if q[1] is not None:
            env["t"] = q[1]
        return self.rel(p[0], q[0]).at(**env)

    # pasts and futures ------------------------------------------------------------

    def _image(self, s: PSet, down: bool, universal: bool) -> PSet:
        """``{y : exists/forall z in s, y << z}`` (down) or ``z << y`` (up)."""
        core: dict[str, Formula] = {}
        fams: dict[str, Formula] = {}
        support = [z for z in self.sorts if not _trivially_false(s.part(z))]
        for y in self.sorts:
            acc = TRUE if universal else FALSE
            for z in support:
                r = self.rel(y, z) if down else self.rel(z, y)
                if _trivially_false(r) and not universal:
                    continue
                yv, zv = ("s", "t") if down else ("t", "s")
                r = r.rename({yv: X, zv: "z"})
                mem = s.part(z).rename({X: "z"}) if self.is_family(z) else s.part(z)
                if universal:
                    term = materialize(mem.implies(r))
                    if self.is_family(z):
                        term = term.forall("z")
                    acc = _and(acc, term)
                    if _trivially_false(acc):
                        break
                else:
                    term = mem & r
                    if self.is_family(z):
                        term = term.exists("z")
                    acc = _or(acc, materialize(term))
            if universal and not support:
                acc = TRUE
            (fams if self.is_family(y) else core)[y] = acc
        return PSet(core, fams)

    def past_of_set(self, s: PSet) -> PSet:
        return self._image(s, down=True, universal=False)

    def future_of_set(self, s: PSet) -> PSet:
        return self._image(s, down=False, universal=False)

    def below_all(self, s: PSet) -> PSet:
        return self._image(s, down=True, universal=True)

    def above_all(self, s: PSet) -> PSet:
        return self._image(s, down=False, universal=True)

    def memo(self, tag: str, args: tuple, compute):
        """Cache by object identity; the arguments are kept alive alongside the value."""
        key = (tag,) + tuple(id(a) for a in args)
        hit = self._cache.get(key)
        if hit is None:
            hit = (args, compute())
            self._cache[key] = hit
        return hit[1]

    def common_past(self, s: PSet) -> PSet:
        return self.memo("common-past", (s,), lambda: self.past_of_set(self.below_all(s)))

    def common_future(self, s: PSet) -> PSet:
        return self.memo("common-future", (s,), lambda: self.future_of_set(self.above_all(s)))

    def point_set(self, point: tuple[str, int | None]) -> PSet:
        return PSet.of_points([point])

    def past(self, point: tuple[str, int | None]) -> PSet:
        return self.past_of_set(self.point_set(point))

    def future(self, point: tuple[str, int | None]) -> PSet:
        return self.future_of_set(self.point_set(point))

    def generic_point(self, fam: str, var: str = "k") -> PSet:
        """The singleton ``{fam(var)}`` as a set parametric in ``var``."""
        return PSet({}, {fam: equality(X, var)})

    def past_family(self, fam: str, var: str = "k") -> PSet:
        key = ("past", fam, var)
        if key not in self._cache:
            self._cache[key] = self.past_of_set(self.generic_point(fam, var))
        return self._cache[key]

    def future_family(self, fam: str, var: str = "k") -> PSet:
        key = ("future", fam, var)
        if key not in self._cache:
            self._cache[key] = self.future_of_set(self.generic_point(fam, var))
        return self._cache[key]

    def everything(self) -> PSet:
        return PSet({c: TRUE for c in self.core}, {f: from_upset(X, UPSet.universe()) for f in self.families})

    # indecomposability --------------------------------------------------------------

    def _le(self, u: str, uv: str, w: str, wv: str) -> Formula:
        """Reflexive order between ``u(uv)`` and ``w(wv)``."""
        r = self.rel(u, w).rename({"s": uv, "t": wv})
        if u == w:
            return materialize(r | (equality(uv, wv) if self.is_family(u) else TRUE))
        return r

    def directedness_failure(self, p: PSet) -> dict | None:
        """Two members with no common upper bound inside ``p``, or None if ``p`` is directed."""
        support = [z for z in self.sorts if not is_false(p.part(z))]
        for u, v in product(support, repeat=2):
            mu = p.part(u).rename({X: "a"}) if self.is_family(u) else p.part(u)
            mv = p.part(v).rename({X: "b"}) if self.is_family(v) else p.part(v)
            bounded = FALSE
            for w in support:
                mw = p.part(w).rename({X: "c"}) if self.is_family(w) else p.part(w)
                term = mw & self._le(u, "a", w, "c") & self._le(v, "b", w, "c")
                if self.is_family(w):
                    term = term.exists("c")
                bounded = _or(bounded, materialize(term))
            bad = materialize(mu & mv & ~bounded)
            found = witness(bad)
            if found is not None:
                a = (u, found.get("a") if self.is_family(u) else None)
                b = (v, found.get("b") if self.is_family(v) else None)
                return {"x": _point_name(a), "y": _point_name(b), "points": (a, b)}
        return None

    def proper_witness(self, p: PSet, side: str = "past") -> tuple[str, int | None] | None:
        """A point whose past (future) equals the fixed set ``p``."""
        for c in self.core:
            other = self.past((c, None)) if side == "past" else self.future((c, None))
            if other.equals(p).truth():
                return (c, None)
        for f in self.families:
            fam = self.past_family(f) if side == "past" else self.future_family(f)
            ks = formula_upset(fam.equals(p), "k")
            if not ks.is_empty():
                return (f, ks.minimum())
        return None

    def is_ip(self, p: PSet, side: str = "past", chain: tuple[str, UPSet] | None = None,
              assume_ip: bool = False) -> "IPVerdict":
        if p.params:
            if assume_ip:
                return IPVerdict(ASSUMED, "parametric designation; indecomposability assumed")
            return IPVerdict(UNDECIDED, "parametric set without a supplied proof")
        if p.is_empty_set():
            return IPVerdict(NOT_IP, "empty")
        closure = self.past_of_set(p) if side == "past" else self.future_of_set(p)
        if not is_true(closure.subset_of(p)):
            return IPVerdict(NOT_IP, f"not a {side} set")
        prop = self.proper_witness(p, side)
        if prop is not None:
            return IPVerdict(IP, f"proper: I{'-' if side == 'past' else '+'}({_point_name(prop)})", proper=prop)
        chain_note = ""
        if chain is not None:
            ok, why = self.check_chain(p, side, chain)
            if ok:
                return IPVerdict(IP, why)
            chain_note = f"; supplied chain rejected: {why}"
        model = self if side == "past" else self._dual()
        bad = model.directedness_failure(p)
        if bad is None:
            return IPVerdict(IP, "directed" + chain_note)
        # p minus the up-set of x and p minus the up-set of y are proper past sets covering p
        parts = []
        for pt in bad.pop("points"):
            up = model.point_set(pt) | model.future(pt)
            parts.append((p - up).describe())
        bad["parts"] = parts
        return IPVerdict(NOT_IP, f"{bad['x']} and {bad['y']} have no common bound inside" + chain_note,
                         decomposition=bad)

    def check_chain(self, p: PSet, side: str, chain: tuple[str, UPSet]) -> tuple[bool, str]:
        fam, idx = chain
        if not idx.is_infinite():
            return False, f"chain {fam} is finite"
        guard_a = from_upset("s", idx)
        guard_b = from_upset("t", idx)
        order = parse("m<n").rename({"m": "s", "n": "t"}) if side == "past" else parse("m>n").rename({"m": "s", "n": "t"})
        ascending = materialize((guard_a & guard_b & order).implies(self.rel(fam, fam)))
        if not is_true(ascending):
            return False, f"{fam} is not a chain on {idx.to_predicate('n')}"
        members = PSet({}, {fam: from_upset(X, idx)})
        generated = self.past_of_set(members) if side == "past" else self.future_of_set(members)
        if not is_true(generated.equals(p)):
            return False, f"I{'-' if side == 'past' else '+'} of chain {fam} differs from the set"
        return True, f"generated by chain {fam}[{idx.to_predicate('n')}]"

    def _dual(self) -> "ChronoModel":
        if "dual" not in self._cache:
            flipped = {(b, a): f.rename({"s": "t", "t": "s"}) if f.arity else f for (a, b), f in self._rel.items()}
            d = ChronoModel(self.name + "-dual", list(self.core), list(self.families), {})
            d._rel = flipped
            self._cache["dual"] = d
        return self._cache["dual"]

    # ideal families ------------------------------------------------------------------

    def ideal_families(self, side: str) -> list["IdealFamily"]:
        """Proper ideals (pasts or futures of points) plus designated terminal ones."""
        key = ("ideals", side)
        if key in self._cache:
            return self._cache[key]
        out = []
        for c in self.core:
            s = self.past((c, None)) if side == "past" else self.future((c, None))
            if not s.is_empty_set():
                out.append(IdealFamily(f"I{'-' if side == 'past' else '+'}({c})", s, None, "proper"))
        for f in self.families:
            s = self.past_family(f) if side == "past" else self.future_family(f)
            idx = formula_upset(~s.empty(), "k")
            if not idx.is_empty():
                out.append(IdealFamily(f"I{'-' if side == 'past' else '+'}({f}(k))", s, idx, "proper"))
        for d in (self.tips if side == "past" else self.tifs):
            out.append(IdealFamily(d.name, d.members, d.index if d.parametric else None, "terminal"))
        self._cache[key] = out
        return out


IP, NOT_IP, UNDECIDED, ASSUMED = "IP", "NOT_IP", "UNDECIDED", "ASSUMED"


@dataclass
class IPVerdict:
    status: str
    reason: str
    proper: tuple[str, int | None] | None = None
    decomposition: dict | None = None

    def to_json(self) -> dict:
        out = {"status": self.status, "reason": self.reason}
        if self.decomposition:
            out["decomposition"] = self.decomposition
        return out


@dataclass
class IdealFamily:
    """An ideal ``members`` (parametric in ``k`` when ``index`` is given)."""

    name: str
    members: PSet
    index: UPSet | None
    kind: str
    _renamed: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def parametric(self) -> bool:
        return self.index is not None

    def renamed(self, var: str) -> PSet:
        if not self.parametric:
            return self.members
        if var not in self._renamed:
            self._renamed[var] = self.members.rename({"k": var})
        return self._renamed[var]

    def guard(self, var: str) -> Formula:
        return from_upset(var, self.index) if self.parametric else TRUE


# --- maximality and the S-relation -------------------------------------------------

def maximal_in(model: ChronoModel, p: PSet, s: PSet, side: str) -> Formula:
    """Formula (in the parameters of p and s): no ideal Q of the model has p < Q inside s."""
    return model.memo("maximal-" + side, (p, s), lambda: _maximal_in(model, p, s, side))


def _maximal_in(model: ChronoModel, p: PSet, s: PSet, side: str) -> Formula:
    dominated = FALSE
    for fam in model.ideal_families(side):
        q = fam.renamed("q")
        inside = model.memo("inside", (q, s), lambda: q.subset_of(s))
        if is_false(inside):
            continue
        term = materialize(fam.guard("q") & inside & p.subset_of(q) & ~q.subset_of(p))
        if fam.parametric:
            term = term.exists("q")
        dominated = _or(dominated, term)
    return materialize(~dominated)


def _related_one_way(model: ChronoModel, p: PSet, f: PSet, side: str) -> Formula:
    """p inside the common past (future) of f and maximal there."""
    if side == "past":
        hull = model.common_past(f)
    else:
        hull = model.common_future(f)
    return _and(p.subset_of(hull), maximal_in(model, p, hull, side))


def s_related_formula(model: ChronoModel, p: PSet | None, f: PSet | None) -> Formula:
    """S-relation between nonempty ideals, or with an empty partner, as a formula in their parameters.

    Parameters of ``p`` and ``f`` must not clash with ``q`` or ``i``.
    """
    if p is None and f is None:
        raise ModelError("an ideal pair needs a nonempty component")
    if p is not None and f is not None:
        return _and(_related_one_way(model, p, f, "past"), _related_one_way(model, f, p, "future"))
    if f is None:
        return _unpaired(model, p, "past")
    return _unpaired(model, f, "future")


def _unpaired(model: ChronoModel, ideal: PSet, side: str) -> Formula:
    """``ideal ~ 0``: not S-related to any ideal of the other side."""
    other = "future" if side == "past" else "past"
    related_somewhere = FALSE
    for fam in model.ideal_families(other):
        partner = fam.renamed("i")
        if side == "past":
            r = s_related_formula(model, ideal, partner)
        else:
            r = s_related_formula(model, partner, ideal)
        r = materialize(fam.guard("i") & r)
        if fam.parametric:
            r = r.exists("i")
        related_somewhere = _or(related_somewhere, r)
    return materialize(~related_somewhere)


# --- JSON ------------------------------------------------------------------------------

def _pred(text: str, allowed: tuple[str, ...], where: str) -> Formula:
    try:
        return parse(text, allowed=allowed)
    except PredicateSyntaxError as e:
        raise ModelError(f"{where}: {e}") from e


def _upset(text: str, var: str, where: str) -> UPSet:
    return formula_upset(_pred(text, (var,), where), var)


def _set_from_json(doc: dict, core: tuple[str, ...], families: tuple[str, ...], where: str,
                   parametric: bool) -> PSet:
    allowed = ("k", "n") if parametric else ("n",)
    cparts: dict[str, Formula] = {}
    raw_core = doc.get("core", [])
    if isinstance(raw_core, dict):
        items = raw_core.items()
    else:
        items = ((c, "true") for c in raw_core)
    for c, text in items:
        if c not in core:
            raise ModelError(f"{where}: unknown core point {c!r}")
        cparts[c] = _pred(text, ("k",), f"{where}.core.{c}")
    fparts: dict[str, Formula] = {}
    for f, text in doc.get("fams", {}).items():
        if f not in families:
            raise ModelError(f"{where}: unknown family {f!r}")
        fparts[f] = materialize(_pred(text, allowed, f"{where}.fams.{f}").rename({"n": X}))
    return PSet(cparts, fparts)


def _designated(doc: dict, side: str, core, families, i: int) -> Designated:
    where = f"{'tips' if side == 'past' else 'tifs'}[{i}]"
    if "name" not in doc:
        raise ModelError(f"{where}: missing name")
    parametric = "range" in doc or doc.get("parametric", False)
    members = _set_from_json(doc, core, families, where, parametric)
    index = _upset(doc.get("range", "true"), "k", f"{where}.range") if parametric else UPSet.universe()
    chain = None
    if "chain" in doc:
        ch = doc["chain"]
        if ch.get("fam") not in families:
            raise ModelError(f"{where}.chain: unknown family {ch.get('fam')!r}")
        chain = (ch["fam"], _upset(ch.get("pred", "true"), "n", f"{where}.chain"))
    return Designated(doc["name"], side, members, parametric, index, chain, bool(doc.get("assume_ip", False)))


def _component(doc: dict, model_core, families, tips, tifs, where: str) -> Component:
    if "family" in doc:
        if doc["family"] not in families:
            raise ModelError(f"{where}: unknown family {doc['family']!r}")
        idx = _upset(doc.get("pred", "true"), "n", where)
        if not idx.is_infinite():
            raise ModelError(f"{where}: a family strand needs infinitely many indices")
        return Component("family", (doc["family"],), idx)
    if "point" in doc:
        pt = doc["point"]
        if isinstance(pt, str):
            if pt not in model_core:
                raise ModelError(f"{where}: unknown core point {pt!r}")
            return Component("point", (pt, None))
        if pt[0] not in families:
            raise ModelError(f"{where}: unknown family {pt[0]!r}")
        return Component("point", (pt[0], int(pt[1])))
    if "boundary" in doc:
        p, f = doc["boundary"]
        if p is not None and p not in tips:
            raise ModelError(f"{where}: unknown TIP {p!r}")
        if f is not None and f not in tifs:
            raise ModelError(f"{where}: unknown TIF {f!r}")
        return Component("boundary", (p, f))
    if "boundary_family" in doc:
        name = doc["boundary_family"]
        partner = doc.get("partner")
        if name not in tips:
            raise ModelError(f"{where}: unknown TIP family {name!r}")
        if partner is not None and partner not in tifs:
            raise ModelError(f"{where}: unknown TIF {partner!r}")
        idx = _upset(doc.get("pred", "true"), "k", where)
        return Component("boundary-family", (name, partner), idx)
    raise ModelError(f"{where}: component needs one of family/point/boundary/boundary_family")


def model_from_json(doc: dict) -> ChronoModel:
    if not isinstance(doc, dict):
        raise ModelError("model document must be an object")
    core = tuple(doc.get("core", []))
    fam_docs = doc.get("families", [])
    families = tuple(f["name"] if isinstance(f, dict) else f for f in fam_docs)
    for name in core + families:
        if not isinstance(name, str) or not name.isidentifier():
            raise ModelError(f"invalid point name {name!r}")
    rel_doc = doc.get("rel", {})
    rel: dict[tuple[str, str], Formula] = {}

    def add(a: str, b: str, f: Formula) -> None:
        rel[(a, b)] = materialize(rel[(a, b)] | f) if (a, b) in rel else f

    for i, pair in enumerate(rel_doc.get("core", [])):
        a, b = pair
        if a not in core or b not in core:
            raise ModelError(f"rel.core[{i}]: unknown point in {pair}")
        add(a, b, TRUE)
    for i, e in enumerate(rel_doc.get("core_family", [])):
        where = f"rel.core_family[{i}]"
        if e.get("lhs") not in core or e.get("fam") not in families:
            raise ModelError(f"{where}: unknown endpoint")
        add(e["lhs"], e["fam"], _pred(e.get("pred", "true"), ("n",), where).rename({"n": "t"}))
    for i, e in enumerate(rel_doc.get("family_core", [])):
        where = f"rel.family_core[{i}]"
        if e.get("fam") not in families or e.get("rhs") not in core:
            raise ModelError(f"{where}: unknown endpoint")
        add(e["fam"], e["rhs"], _pred(e.get("pred", "true"), ("n",), where).rename({"n": "s"}))
    for i, e in enumerate(rel_doc.get("family_family", [])):
        where = f"rel.family_family[{i}]"
        if e.get("f") not in families or e.get("g") not in families:
            raise ModelError(f"{where}: unknown family")
        add(e["f"], e["g"], _pred(e.get("pred", "true"), ("m", "n"), where).rename({"m": "s", "n": "t"}))
    tips = [_designated(d, "past", core, families, i) for i, d in enumerate(doc.get("tips", []))]
    tifs = [_designated(d, "future", core, families, i) for i, d in enumerate(doc.get("tifs", []))]
    names = [d.name for d in tips + tifs]
    if len(set(names)) != len(names):
        raise ModelError("designation names must be unique")
    tip_names = {d.name for d in tips}
    tif_names = {d.name for d in tifs}
    seqs = []
    for i, s in enumerate(doc.get("sequences", [])):
        comps = [_component(c, core, families, tip_names, tif_names, f"sequences[{i}].components[{j}]")
                 for j, c in enumerate(s.get("components", []))]
        if not comps:
            raise ModelError(f"sequences[{i}]: no components")
        seqs.append(SequenceSpec(s.get("name", f"seq{i}"), comps))
    return ChronoModel(doc.get("name", "model"), list(core), list(families), rel, tips, tifs, seqs)


# --- validation ---------------------------------------------------------------------------

@dataclass
class ModelValidation:
    irreflexive: list[str]
    transitivity: list[dict]
    jointly_distinguishing: list[dict]
    past_distinguishing: bool
    future_distinguishing: bool
    designations: list[dict]

    @property
    def valid(self) -> bool:
        return (not self.irreflexive and not self.transitivity and not self.jointly_distinguishing
                and all(d["ok"] for d in self.designations))

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "irreflexivity_violations": self.irreflexive,
            "transitivity_violations": self.transitivity,
            "indistinguishable_points": self.jointly_distinguishing,
            "past_distinguishing": self.past_distinguishing,
            "future_distinguishing": self.future_distinguishing,
            "designations": self.designations,
        }


def check_transitivity(model: ChronoModel) -> list[dict]:
    bad = []
    for a, b, c in product(model.sorts, repeat=3):
        ab, bc = model.rel(a, b), model.rel(b, c)
        if _trivially_false(ab) or _trivially_false(bc):
            continue
        first = ab.rename({"s": "a", "t": "b"})
        second = bc.rename({"s": "b", "t": "c"})
        path = first & second
        if model.is_family(b):
            path = path.exists("b")
        direct = model.rel(a, c).rename({"s": "a", "t": "c"})
        gap = materialize(materialize(path) & ~direct)
        w = witness(gap)
        if w is not None:
            bad.append({"path": [a, b, c], "at": w})
    return bad


def check_irreflexive(model: ChronoModel) -> list[str]:
    bad = []
    for s in model.sorts:
        r = model.rel(s, s)
        if model.is_family(s):
            if not _trivially_false(r) and not is_false(diagonal(r, "s", "t", "n")):
                bad.append(s)
        elif r.truth():
            bad.append(s)
    return bad


def check_distinguishing(model: ChronoModel) -> tuple[list[dict], bool, bool]:
    """Points sharing both past and future; plus whether each side alone is injective."""
    pasts: list[tuple[str, PSet, bool]] = []
    futures: list[tuple[str, PSet, bool]] = []
    for c in model.core:
        pasts.append((c, model.past((c, None)), False))
        futures.append((c, model.future((c, None)), False))
    for f in model.families:
        pasts.append((f, model.past_family(f), True))
        futures.append((f, model.future_family(f), True))
    joint: list[dict] = []
    past_ok = future_ok = True
    n = len(pasts)
    for i in range(n):
        for j in range(i, n):
            a, pa, fa = pasts[i]
            b, pb, fb = pasts[j]
            if i == j and not fa:
                continue
            qa, qb = pb.rename({"k": "i"}) if fb else pb, futures[j][1].rename({"k": "i"}) if fb else futures[j][1]
            same_past = pa.equals(qa)
            same_future = futures[i][1].equals(qb)
            distinct = TRUE
            if i == j:
                distinct = materialize(~equality("k", "i"))
            sp = materialize(same_past & distinct)
            sf = materialize(same_future & distinct)
            if not is_false(sp):
                past_ok = False
            if not is_false(sf):
                future_ok = False
            both = materialize(sp & sf)
            w = witness(both)
            if w is not None:
                pa_name = _point_name((a, w.get("k") if fa else None))
                pb_name = _point_name((b, w.get("i") if fb else None))
                joint.append({"points": [pa_name, pb_name]})
    return joint, past_ok, future_ok


def check_designations(model: ChronoModel) -> list[dict]:
    out = []
    for d in model.tips + model.tifs:
        side = d.side
        closure = model.past_of_set(d.members) if side == "past" else model.future_of_set(d.members)
        closed = materialize(from_upset("k", d.index).implies(closure.subset_of(d.members))) if d.parametric \
            else closure.subset_of(d.members)
        closed_ok = is_true(closed)
        nonempty = materialize(~d.members.empty())
        nonempty_ok = is_true(materialize(from_upset("k", d.index).implies(nonempty))) if d.parametric \
            else nonempty.truth()
        proper = _proper_hits(model, d)
        if d.parametric:
            verdict = model.is_ip(d.members, side, assume_ip=d.assume_ip)
        else:
            verdict = model.is_ip(d.members, side, chain=d.chain)
        ip_ok = verdict.status in (IP, ASSUMED)
        terminal_ok = not proper
        out.append({
            "name": d.name, "side": side, "parametric": d.parametric,
            "closed": closed_ok, "nonempty": nonempty_ok, "terminal": terminal_ok,
            "proper_of": proper, "ip": verdict.to_json(),
            "ok": closed_ok and nonempty_ok and terminal_ok and ip_ok,
        })
    return out


def _proper_hits(model: ChronoModel, d: Designated) -> list[str]:
    """Points whose past (future) equals the designated set (for some admissible k)."""
    hits = []
    m = d.members.rename({"k": "i"}) if d.parametric else d.members
    guard = from_upset("i", d.index) if d.parametric else TRUE
    for c in model.core:
        own = model.past((c, None)) if d.side == "past" else model.future((c, None))
        if not is_false(materialize(guard & own.equals(m))):
            hits.append(c)
    for f in model.families:
        own = model.past_family(f) if d.side == "past" else model.future_family(f)
        eq = materialize(guard & own.equals(m))
        w = witness(eq)
        if w is not None:
            hits.append(f"{f}({w['k']})")
    return hits


def validate_model(model: ChronoModel) -> ModelValidation:
    irr = check_irreflexive(model)
    trans = check_transitivity(model)
    joint, past_ok, future_ok = check_distinguishing(model)
    des = check_designations(model)
    return ModelValidation(irr, trans, joint, past_ok, future_ok, des)
