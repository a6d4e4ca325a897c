"""Causal completion of a finitely presented chronological model.

Points of the completion are ideal pairs ``(P, F)``.  Manifold pairs come
from model points; boundary pairs from designated terminal sets that are
S-related to a partner (or to nothing).  A pair family is either a single
pair or a family indexed by ``k`` together with the set of admissible ``k``.

Limits are computed from the lower and upper limits (``LI``/``LS``) of the
past and future components.  Any infinite subsequence of a family strand
behaves like the residue classes it visits infinitely often, so a sequence
is handled through finitely many *atoms*: constants and residue-class
strands.  Limits are antitone in the atom set, which makes single atoms
enough for the starred branch test and for iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable

from .chrono import (
    FALSE,
    TRUE,
    X,
    ChronoModel,
    Component,
    ModelError,
    PSet,
    SequenceSpec,
    formula_upset,
    maximal_in,
    s_related_formula,
    validate_model,
    witness,
)
from .predicates import Formula, equality, from_upset, is_false, is_true, materialize
from .upset import UPSet, lcm

MAX_ITERATIONS = 6


# --- pairs -----------------------------------------------------------------------------

@dataclass
class PairFamily:
    name: str
    kind: str
    P: PSet
    F: PSet
    index: UPSet | None = None
    origin: str = ""

    @property
    def parametric(self) -> bool:
        return self.index is not None

    @property
    def is_manifold(self) -> bool:
        return self.kind == "manifold"

    def P_as(self, var: str) -> PSet:
        return self.P.rename({"k": var}) if self.parametric else self.P

    def F_as(self, var: str) -> PSet:
        return self.F.rename({"k": var}) if self.parametric else self.F

    def guard(self, var: str) -> Formula:
        return from_upset(var, self.index) if self.parametric else TRUE

    def label(self, k: int | None = None) -> str:
        if k is None or not self.parametric:
            return self.name
        return self.name.replace("(k)", f"({k})") if "(k)" in self.name else f"{self.name}[{k}]"

    def modulus(self) -> int:
        m = self.index.period if self.parametric else 1
        for s in (self.P, self.F):
            for f in list(s.core.values()) + list(s.fams.values()):
                m = lcm(m, f.modulus)
        return m

    def to_json(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "origin": self.origin,
               "P": self.P.describe(), "F": self.F.describe()}
        if self.parametric:
            out["index"] = self.index.to_predicate("k")
        return out


class PairSet:
    """Pairs present, as family name -> admissible indices (universe for single pairs)."""

    __slots__ = ("members",)

    def __init__(self, members: dict[str, UPSet] | None = None) -> None:
        self.members = {k: v for k, v in (members or {}).items() if not v.is_empty()}

    def __or__(self, other: "PairSet") -> "PairSet":
        keys = set(self.members) | set(other.members)
        return PairSet({k: self.members.get(k, UPSet.empty()) | other.members.get(k, UPSet.empty()) for k in keys})

    def __and__(self, other: "PairSet") -> "PairSet":
        keys = set(self.members) & set(other.members)
        return PairSet({k: self.members[k] & other.members[k] for k in keys})

    def __le__(self, other: "PairSet") -> bool:
        return all(v <= other.members.get(k, UPSet.empty()) for k, v in self.members.items())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PairSet) and self.members == other.members

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.members.items())))

    def __contains__(self, name: str) -> bool:
        return name in self.members

    def is_empty(self) -> bool:
        return not self.members

    def only(self, names: Iterable[str]) -> "PairSet":
        keep = set(names)
        return PairSet({k: v for k, v in self.members.items() if k in keep})

    def describe(self, comp: "Completion") -> list[str]:
        out = []
        for name in sorted(self.members):
            pf = comp.by_name[name]
            if pf.parametric:
                out.append(f"{name} for {self.members[name].to_predicate('k')}")
            else:
                out.append(name)
        return out


@dataclass(frozen=True)
class Atom:
    """A constant pair, a family of constant sequences (``const-family``) or a residue-class strand."""

    pair: str
    kind: str
    index: UPSet | None = None

    def describe(self) -> str:
        if self.kind == "const":
            return f"const {self.pair}"
        what = "constants" if self.kind == "const-family" else "strand"
        return f"{what} {self.pair} over {self.index.to_predicate('k')}"


@dataclass
class Bounds:
    li_p: PSet
    ls_p: PSet
    li_f: PSet
    ls_f: PSet

    def key(self) -> tuple:
        return (self.li_p.key(), self.ls_p.key(), self.li_f.key(), self.ls_f.key())


def _combine(bounds: list[Bounds]) -> Bounds:
    return Bounds(reduce(lambda a, b: a & b, (b.li_p for b in bounds)),
                  reduce(lambda a, b: a | b, (b.ls_p for b in bounds)),
                  reduce(lambda a, b: a & b, (b.li_f for b in bounds)),
                  reduce(lambda a, b: a | b, (b.ls_f for b in bounds)))


def _map(s: PSet, fn) -> PSet:
    return PSet({k: fn(v) for k, v in s.core.items()}, {k: fn(v) for k, v in s.fams.items()})


def lower_limit(s: PSet, var: str, guard: Formula) -> PSet:
    """Members for all but finitely many admissible values of ``var``."""
    return _map(s, lambda f: materialize(guard.implies(f)).almost_all(var))


def upper_limit(s: PSet, var: str, guard: Formula) -> PSet:
    """Members for infinitely many admissible values of ``var``."""
    return _map(s, lambda f: materialize(guard & f).infinitely_many(var))


def meets(a: PSet, b: PSet) -> Formula:
    """Formula (in the parameters) for ``a & b`` being nonempty."""
    acc = FALSE
    for c in set(a.core) & set(b.core):
        acc = materialize(acc | (a.core[c] & b.core[c]))
    for f in set(a.fams) & set(b.fams):
        acc = materialize(acc | materialize(a.fams[f] & b.fams[f]).exists(X))
    return acc


# --- completion -----------------------------------------------------------------------------

class Completion:
    def __init__(self, model: ChronoModel, pairs: list[PairFamily], notes: list[str]) -> None:
        self.model = model
        self.pairs = pairs
        self.by_name = {p.name: p for p in pairs}
        self.notes = notes
        self._limit_cache: dict = {}
        self._atom_cache: dict = {}

    @property
    def manifold(self) -> list[PairFamily]:
        return [p for p in self.pairs if p.is_manifold]

    @property
    def boundary(self) -> list[PairFamily]:
        return [p for p in self.pairs if not p.is_manifold]

    def manifold_part(self, s: PairSet) -> PairSet:
        return s.only(p.name for p in self.manifold)

    def boundary_part(self, s: PairSet) -> PairSet:
        return s.only(p.name for p in self.boundary)

    def everything(self) -> PairSet:
        return PairSet({p.name: p.index if p.parametric else UPSet.universe() for p in self.pairs})

    # limit conditions ------------------------------------------------------------------

    def _side_condition(self, comp: PSet, li: PSet, ls: PSet, side: str) -> Formula:
        if not comp.core and not comp.fams:
            return TRUE
        empty = comp.empty()
        sub = comp.subset_of(li)
        if is_false(sub):
            return empty
        return materialize(empty | materialize(sub & maximal_in(self.model, comp, ls, side)))

    def limit_condition(self, pf: PairFamily, b: Bounds) -> Formula:
        """Formula in ``k`` (for a pair family) and the bounds' parameters."""
        cond = self._side_condition(pf.P, b.li_p, b.ls_p, "past")
        if not is_false(cond):
            cond = materialize(cond & self._side_condition(pf.F, b.li_f, b.ls_f, "future"))
        return materialize(cond & pf.guard("k"))

    def limits(self, b: Bounds) -> PairSet:
        key = b.key()
        if key not in self._limit_cache:
            found = {}
            for pf in self.pairs:
                f = self.limit_condition(pf, b)
                if pf.parametric:
                    found[pf.name] = formula_upset(f, "k")
                elif f.truth():
                    found[pf.name] = UPSet.universe()
            self._limit_cache[key] = PairSet(found)
        return self._limit_cache[key]

    # atoms ----------------------------------------------------------------------------------

    def atom_bounds(self, atom: Atom) -> Bounds:
        pf = self.by_name[atom.pair]
        if atom.kind == "const":
            return Bounds(pf.P, pf.P, pf.F, pf.F)
        if atom.kind == "strand":
            g = from_upset("k", atom.index)
            return Bounds(lower_limit(pf.P, "k", g), upper_limit(pf.P, "k", g),
                          lower_limit(pf.F, "k", g), upper_limit(pf.F, "k", g))
        raise ValueError("constant families have no single pair of bounds")

    def atom_limits(self, atom: Atom) -> PairSet:
        if atom in self._atom_cache:
            return self._atom_cache[atom]
        if atom.kind != "const-family":
            out = self.limits(self.atom_bounds(atom))
        else:
            src = self.by_name[atom.pair]
            p, f = src.P_as("j"), src.F_as("j")
            b = Bounds(p, p, f, f)
            g = from_upset("j", atom.index)
            found = {}
            for pf in self.pairs:
                cond = materialize(self.limit_condition(pf, b) & g).exists("j")
                if pf.parametric:
                    found[pf.name] = formula_upset(cond, "k")
                elif cond.truth():
                    found[pf.name] = UPSet.universe()
            out = PairSet(found)
        self._atom_cache[atom] = out
        return out

    def strand_atoms(self, pair: str, index: UPSet) -> list[Atom]:
        """Residue classes of an infinite strand, as sub-atoms."""
        pf = self.by_name[pair]
        k = lcm(pf.modulus(), index.period)
        out = []
        for r in range(k):
            cls = index & UPSet.residue(r, k)
            if cls.is_infinite():
                out.append(Atom(pair, "strand", cls))
        return out

    def atoms_of_set(self, s: PairSet) -> list[Atom]:
        out = []
        for name in sorted(s.members):
            pf = self.by_name[name]
            if not pf.parametric:
                out.append(Atom(name, "const"))
                continue
            idx = s.members[name]
            out.append(Atom(name, "const-family", idx))
            if idx.is_infinite():
                out.extend(self.strand_atoms(name, idx))
        return out

    def union_of_limits(self, atoms: Iterable[Atom]) -> PairSet:
        return reduce(lambda a, b: a | b, (self.atom_limits(a) for a in atoms), PairSet())


def pair_related(model: ChronoModel, p: PSet, f: PSet) -> Formula:
    """S-relation of a pair whose components may be empty (depending on ``k``)."""
    params = set(p.params) | set(f.params)
    if not params:
        return constant_related(model, p, f)
    if params != {"k"}:
        raise ModelError(f"pair components depend on {sorted(params)}; only k is supported")
    ep = formula_upset(p.empty(), "k")
    ef = formula_upset(f.empty(), "k")
    out = ep & ef
    full = ~ep & ~ef
    if not full.is_empty():
        out = out | (full & formula_upset(materialize(s_related_formula(model, p, f)), "k"))
    for empty_side, only in ((ep - ef, "future"), (ef - ep, "past")):
        if empty_side.is_empty():
            continue
        if empty_side.is_infinite():
            rest = f if only == "future" else p
            args = (None, rest) if only == "future" else (rest, None)
            out = out | (empty_side & formula_upset(materialize(s_related_formula(model, *args)), "k"))
            continue
        # finitely many degenerate indices: decide each one on its own
        for k in empty_side.elements(empty_side.threshold):
            if constant_related(model, p.substitute("k", k), f.substitute("k", k)).truth():
                out = out | UPSet.finite([k])
    return from_upset("k", out)


def constant_related(model: ChronoModel, p: PSet, f: PSet) -> Formula:
    pe, fe = p.is_empty_set(), f.is_empty_set()
    if pe and fe:
        return TRUE
    return s_related_formula(model, None if pe else p, None if fe else f)


def build_completion(model: ChronoModel) -> Completion:
    pairs: list[PairFamily] = []
    notes: list[str] = []
    for c in model.core:
        pairs.append(PairFamily(c, "manifold", model.past((c, None)), model.future((c, None)), None, f"point {c}"))
    for f in model.families:
        pairs.append(PairFamily(f"{f}(k)", "manifold", model.past_family(f), model.future_family(f),
                                UPSet.universe(), f"family {f}"))

    def partners(side: str) -> list[tuple[str, PSet, UPSet | None]]:
        out = []
        for fam in model.ideal_families(side):
            if fam.kind == "proper" or side == "future":
                out.append((fam.name, fam.members, fam.index))
        return out

    for t in model.tips:
        tmem = t.members
        for name, u, uidx in partners("future"):
            if t.parametric and uidx is not None:
                both = materialize(from_upset("j", t.index) & from_upset("k", uidx)
                                   & s_related_formula(model, tmem.rename({"k": "j"}), u))
                if not is_false(both):
                    notes.append(f"{t.name} ~ {name}: pair family with two indices not represented")
                continue
            idx = t.index if t.parametric else uidx
            guard = from_upset("k", idx) if idx is not None else TRUE
            rel = materialize(guard & ~tmem.empty() & ~u.empty() & s_related_formula(model, tmem, u))
            _add_boundary(pairs, f"({t.name},{name})", tmem, u, rel, idx is not None, f"{t.name} ~ {name}")
        guard = from_upset("k", t.index) if t.parametric else TRUE
        rel = materialize(guard & ~tmem.empty() & s_related_formula(model, tmem, None))
        _add_boundary(pairs, f"({t.name},0)", tmem, PSet(), rel, t.parametric, f"{t.name} ~ 0")
    for u in model.tifs:
        umem = u.members
        for fam in model.ideal_families("past"):
            if fam.kind != "proper":
                continue
            if u.parametric and fam.parametric:
                both = materialize(from_upset("j", u.index) & from_upset("k", fam.index)
                                   & s_related_formula(model, fam.members, umem.rename({"k": "j"})))
                if not is_false(both):
                    notes.append(f"{fam.name} ~ {u.name}: pair family with two indices not represented")
                continue
            idx = u.index if u.parametric else fam.index
            guard = from_upset("k", idx) if idx is not None else TRUE
            rel = materialize(guard & ~umem.empty() & ~fam.members.empty()
                              & s_related_formula(model, fam.members, umem))
            _add_boundary(pairs, f"({fam.name},{u.name})", fam.members, umem, rel, idx is not None,
                          f"{fam.name} ~ {u.name}")
        guard = from_upset("k", u.index) if u.parametric else TRUE
        rel = materialize(guard & ~umem.empty() & s_related_formula(model, None, umem))
        _add_boundary(pairs, f"(0,{u.name})", PSet(), umem, rel, u.parametric, f"0 ~ {u.name}")
    return Completion(model, pairs, notes)


def _add_boundary(pairs: list[PairFamily], name: str, p: PSet, f: PSet, rel: Formula,
                  parametric: bool, origin: str) -> None:
    if parametric:
        idx = formula_upset(rel, "k")
        if not idx.is_empty():
            pairs.append(PairFamily(name, "boundary", p, f, idx, origin))
    elif rel.truth():
        pairs.append(PairFamily(name, "boundary", p, f, None, origin))


# --- sequences ---------------------------------------------------------------------------------

@dataclass
class PairSequence:
    """A test sequence as a finite list of atoms (constants and strands)."""

    name: str
    atoms: list[Atom]

    def describe(self) -> str:
        return "; ".join(a.describe() for a in self.atoms)


def sequence_from_spec(comp: Completion, spec: SequenceSpec) -> PairSequence:
    atoms: list[Atom] = []
    for c in spec.components:
        atoms.extend(_component_atoms(comp, c))
    return PairSequence(spec.name, atoms)


def _component_atoms(comp: Completion, c: Component) -> list[Atom]:
    if c.kind == "family":
        return [Atom(f"{c.ref[0]}(k)", "strand", c.index)]
    if c.kind == "point":
        sort, i = c.ref
        if i is None:
            return [Atom(sort, "const")]
        return [Atom(f"{sort}(k)", "const-family", UPSet.finite([i]))]
    if c.kind == "boundary":
        p, f = c.ref
        name = f"({p or 0},{f or 0})"
        if name not in comp.by_name:
            raise ModelError(f"sequence uses {name}, which is not a boundary pair of the completion")
        return [Atom(name, "const")]
    p, f = c.ref
    for pf in comp.boundary:
        if pf.parametric and pf.origin == f"{p} ~ {f or 0}":
            idx = c.index & pf.index
            if not idx.is_infinite():
                raise ModelError(f"strand over {pf.name} has finitely many admissible indices")
            return [Atom(pf.name, "strand", idx)]
    raise ModelError(f"no boundary pair family for {p} ~ {f or 0}")


def _sequence_bounds(comp: Completion, seq: PairSequence) -> Bounds:
    parts = []
    for a in seq.atoms:
        if a.kind == "const-family":
            pf = comp.by_name[a.pair]
            (j,) = a.index.elements(a.index.threshold + 1) or (None,)
            if j is None or len(a.index.elements(a.index.threshold + a.index.period)) != 1 or a.index.is_infinite():
                raise ModelError("a sequence component must be one constant pair")
            p, f = pf.P.substitute("k", j), pf.F.substitute("k", j)
            parts.append(Bounds(p, p, f, f))
        else:
            parts.append(comp.atom_bounds(a))
    return _combine(parts)


def chron_limit(comp: Completion, seq: PairSequence) -> PairSet:
    return comp.limits(_sequence_bounds(comp, seq))


def sub_atoms(comp: Completion, seq: PairSequence) -> list[Atom]:
    """Minimal subsequences: constants and residue classes of strands."""
    out = []
    for a in seq.atoms:
        if a.kind == "strand":
            out.extend(comp.strand_atoms(a.pair, a.index))
        else:
            out.append(a)
    return out


def _branch(comp: Completion, seq: PairSequence, keep: str) -> PairSet:
    lim = chron_limit(comp, seq)
    for a in sub_atoms(comp, seq):
        la = comp.atom_limits(a)
        hit = comp.manifold_part(la) if keep == "manifold" else comp.boundary_part(la)
        if not hit.is_empty():
            return comp.manifold_part(lim) if keep == "manifold" else comp.boundary_part(lim)
    return lim


def chron_star(comp: Completion, seq: PairSequence) -> PairSet:
    """Manifold limits only, as soon as some subsequence has a manifold limit."""
    return _branch(comp, seq, "manifold")


def chron_double_star(comp: Completion, seq: PairSequence) -> PairSet:
    """The boundary-preferring variant: boundary limits only once some subsequence has one."""
    return _branch(comp, seq, "boundary")


@dataclass
class IterationResult:
    steps: list[PairSet]
    cumulative: list[PairSet]
    stabilized_at: int | None

    def new_at(self, i: int) -> PairSet:
        """Pairs of ``L^i`` not in ``L^1 .. L^(i-1)`` (1-based)."""
        before = self.cumulative[i - 2] if i >= 2 else PairSet()
        cur = self.steps[i - 1]
        return PairSet({k: v - before.members.get(k, UPSet.empty()) for k, v in cur.members.items()})


def chron_iterate(comp: Completion, seq: PairSequence, up_to: int = MAX_ITERATIONS) -> IterationResult:
    first = chron_limit(comp, seq)
    steps, cumulative = [first], [first]
    while len(steps) < up_to:
        nxt = comp.union_of_limits(comp.atoms_of_set(cumulative[-1]))
        steps.append(nxt)
        total = cumulative[-1] | nxt
        cumulative.append(total)
        if total == cumulative[-2]:
            return IterationResult(steps, cumulative, len(steps) - 1)
    return IterationResult(steps, cumulative, None)


# --- catalog ---------------------------------------------------------------------------------------

def catalog(comp: Completion) -> list[PairSequence]:
    """Fixture sequences plus one constant and one full strand per pair family."""
    out = [sequence_from_spec(comp, s) for s in comp.model.sequences]
    for pf in comp.pairs:
        if pf.parametric:
            k0 = pf.index.minimum()
            out.append(PairSequence(f"const {pf.label(k0)}", [Atom(pf.name, "const-family", UPSet.finite([k0]))]))
            if pf.index.is_infinite():
                out.append(PairSequence(f"strand {pf.name}", [Atom(pf.name, "strand", pf.index)]))
        else:
            out.append(PairSequence(f"const {pf.name}", [Atom(pf.name, "const")]))
    return out


OPERATORS = {"L": chron_limit, "L*": chron_star}


def _pair_in(comp: Completion, s: PairSet, pf: PairFamily, var: str) -> Formula:
    if pf.name not in s.members:
        return FALSE
    return from_upset(var, s.members[pf.name]) if pf.parametric else TRUE


def _eventually(comp: Completion, seq: PairSequence, member) -> Formula:
    """All but finitely many terms satisfy ``member(P, F)`` (a formula builder over pair components)."""
    acc = TRUE
    for a in seq.atoms:
        pf = comp.by_name[a.pair]
        if a.kind == "const":
            term = member(pf.P, pf.F)
        elif a.kind == "const-family":
            (j,) = a.index.elements(a.index.threshold + 1)[:1]
            term = member(pf.P.substitute("k", j), pf.F.substitute("k", j))
        else:
            body = materialize(from_upset("n", a.index).implies(member(pf.P_as("n"), pf.F_as("n"))))
            term = body.almost_all("n")
        acc = materialize(acc & term)
    return acc


def _bounds_for(comp: Completion, seq: PairSequence) -> Bounds:
    return _sequence_bounds(comp, seq)


def check_a1(comp: Completion, seqs: list[PairSequence], op) -> list[dict]:
    """Openness of chronological futures and pasts, tested on the catalog."""
    bad = []
    for seq in seqs:
        lim = op(comp, seq)
        for name in sorted(lim.members):
            pi = comp.by_name[name]
            for rho in comp.pairs:
                for direction in ("future", "past"):
                    if direction == "future":
                        hit = meets(rho.F_as("i"), pi.P_as("k"))
                        ev = _eventually(comp, seq, lambda p, f, rho=rho: meets(rho.F_as("i"), p))
                    else:
                        hit = meets(pi.F_as("k"), rho.P_as("i"))
                        ev = _eventually(comp, seq, lambda p, f, rho=rho: meets(f, rho.P_as("i")))
                    gap = materialize(rho.guard("i") & _pair_in(comp, lim, pi, "k") & hit & ~ev)
                    w = witness(gap)
                    if w is not None:
                        bad.append({"sequence": seq.name, "limit": pi.label(w.get("k")),
                                    "set": f"I{'+' if direction == 'future' else '-'}({rho.label(w.get('i'))})"})
    return bad


def check_a2(comp: Completion, seqs: list[PairSequence], op) -> list[dict]:
    """A limit with an empty component admits no other pair squeezed between it and LI."""
    bad = []
    for seq in seqs:
        lim = op(comp, seq)
        b = _bounds_for(comp, seq)
        for name in sorted(lim.members):
            pi = comp.by_name[name]
            for side in ("past", "future"):
                own = pi.P_as("k") if side == "past" else pi.F_as("k")
                other = pi.F_as("k") if side == "past" else pi.P_as("k")
                li = b.li_p if side == "past" else b.li_f
                if not other.empty().arity and not other.empty().truth():
                    continue
                for rho in comp.pairs:
                    comp_r = rho.P_as("i") if side == "past" else rho.F_as("i")
                    distinct = TRUE
                    if rho.name == pi.name:
                        if not pi.parametric:
                            continue
                        distinct = materialize(~equality("i", "k"))
                    squeeze = materialize(own.subset_of(comp_r) & comp_r.subset_of(li))
                    gap = materialize(_pair_in(comp, lim, pi, "k") & other.empty() & rho.guard("i")
                                      & squeeze & distinct)
                    w = witness(gap)
                    if w is not None:
                        bad.append({"sequence": seq.name, "limit": pi.label(w.get("k")),
                                    "squeezed": rho.label(w.get("i"))})
    return bad


def check_separation(comp: Completion, seqs: list[PairSequence], op) -> list[dict]:
    """Catalog sequences converging to both a manifold and a boundary pair."""
    out = []
    for seq in seqs:
        lim = op(comp, seq)
        m, b = comp.manifold_part(lim), comp.boundary_part(lim)
        if not m.is_empty() and not b.is_empty():
            out.append({"sequence": seq.name, "manifold": m.describe(comp), "boundary": b.describe(comp)})
    return out


def check_t1(comp: Completion, starred: bool) -> list[dict]:
    """Constant sequences converging to a second pair."""
    bad = []
    for pf in comp.pairs:
        if pf.parametric:
            p, f = pf.P_as("j"), pf.F_as("j")
        else:
            p, f = pf.P, pf.F
        b = Bounds(p, p, f, f)
        for rho in comp.pairs:
            cond = comp.limit_condition(rho, b)
            if pf.parametric:
                cond = materialize(cond & pf.guard("j"))
            if rho.name == pf.name:
                if not pf.parametric:
                    continue
                cond = materialize(cond & ~equality("j", "k"))
            if starred and rho.is_manifold != pf.is_manifold and pf.is_manifold:
                # constant manifold sequences take the manifold branch
                continue
            w = witness(cond)
            if w is not None:
                bad.append({"constant": pf.label(w.get("j")), "also_converges_to": rho.label(w.get("k"))})
    return bad


def check_endpoints(comp: Completion) -> list[dict]:
    """Each designated generating chain converges to a boundary pair built on its terminal set."""
    out = []
    model = comp.model
    for d in model.tips + model.tifs:
        if d.parametric:
            continue
        if d.chain is None:
            out.append({"designation": d.name, "status": "not evaluated", "reason": "no generating chain"})
            continue
        fam, idx = d.chain
        seq = PairSequence(f"chain {fam}", [Atom(f"{fam}(k)", "strand", idx)])
        results = {}
        for label, op in OPERATORS.items():
            lim = op(comp, seq)
            ok = any(name in lim.members for name in _pairs_on(comp, d.name))
            results[label] = ok
        out.append({"designation": d.name, "status": "pass" if all(results.values()) else "fail", **results})
    return out


def _pairs_on(comp: Completion, designation: str) -> list[str]:
    return [pf.name for pf in comp.boundary if pf.origin.split(" ~ ")[0] == designation
            or pf.origin.split(" ~ ")[-1] == designation]


def _manifold_atoms(comp: Completion) -> list[Atom]:
    return comp.atoms_of_set(comp.manifold_part(comp.everything()))


def _boundary_atoms(comp: Completion) -> list[Atom]:
    return comp.atoms_of_set(comp.boundary_part(comp.everything()))


def _star_atom(comp: Completion, a: Atom, keep: str = "manifold") -> PairSet:
    seq_atoms = comp.strand_atoms(a.pair, a.index) if a.kind == "strand" else [a]
    lim = comp.atom_limits(a)
    for s in seq_atoms:
        la = comp.atom_limits(s)
        hit = comp.manifold_part(la) if keep == "manifold" else comp.boundary_part(la)
        if not hit.is_empty():
            return comp.manifold_part(lim) if keep == "manifold" else comp.boundary_part(lim)
    return lim


def check_density(comp: Completion, starred: bool) -> dict:
    """Boundary pairs reached by sequences of manifold points."""
    atoms = _manifold_atoms(comp)
    reached = PairSet()
    for a in atoms:
        reached = reached | (_star_atom(comp, a) if starred and a.kind != "const-family" else comp.atom_limits(a))
    if starred:
        reached = reached | PairSet()
    missing = []
    for pf in comp.boundary:
        have = reached.members.get(pf.name, UPSet.empty())
        want = pf.index if pf.parametric else UPSet.universe()
        if not want <= have:
            missing.append(pf.name if not pf.parametric else f"{pf.name} for {(want - have).to_predicate('k')}")
    return {"dense": not missing, "unreached": missing}


def check_boundary_closed(comp: Completion, starred: bool) -> list[str]:
    bad = []
    for a in _boundary_atoms(comp):
        lim = _star_atom(comp, a) if starred and a.kind == "strand" else comp.atom_limits(a)
        m = comp.manifold_part(lim)
        if not m.is_empty():
            bad.append(f"{a.describe()} -> {', '.join(m.describe(comp))}")
    return bad


def check_szabados(comp: Completion) -> list[str]:
    bad = []
    model = comp.model
    for pf in comp.manifold:
        rel = pair_related(model, pf.P, pf.F)
        if pf.parametric:
            fails = formula_upset(materialize(~rel), "k")
            if not fails.is_empty():
                bad.append(pf.label(fails.minimum()))
        elif not rel.truth():
            bad.append(pf.name)
    return bad


def check_manifold_preservation(comp: Completion, seqs: list[PairSequence], op) -> list[dict]:
    out = []
    for seq in seqs:
        base = comp.manifold_part(chron_limit(comp, seq))
        got = op(comp, seq)
        lost = PairSet({k: v - got.members.get(k, UPSet.empty()) for k, v in base.members.items()})
        if not lost.is_empty():
            out.append({"sequence": seq.name, "lost": lost.describe(comp)})
    return out


def boundary_non_t2(comp: Completion, seqs: list[PairSequence]) -> list[dict]:
    out = []
    for seq in seqs:
        b = comp.boundary_part(chron_star(comp, seq))
        count = sum(1 if not comp.by_name[n].parametric else
                    (2 if v.is_infinite() else len(v.elements(v.threshold))) for n, v in b.members.items())
        if count > 1:
            out.append({"sequence": seq.name, "boundary_limits": b.describe(comp)})
    return out


# --- finite skeleton ------------------------------------------------------------------------------------

def finite_skeleton(comp: Completion, cap: int = 5) -> dict:
    """On finite pair sets the limit operator is a tail-model operator; analyse it exhaustively."""
    from .limits import TailLimitOperator, derived_topology, order_of, star_operator
    from .topology import GroundSet, PreconditionError, separating_refinement

    if any(pf.parametric for pf in comp.pairs):
        return {"status": "not evaluated", "reason": "infinitely many pairs"}
    if len(comp.pairs) > cap:
        return {"status": "not evaluated", "reason": f"more than {cap} pairs"}
    g = GroundSet.of([pf.name for pf in comp.pairs])

    def fn(mask: int) -> int:
        atoms = [Atom(name, "const") for name in g.labels_of(mask)]
        lim = chron_limit(comp, PairSequence("profile", atoms))
        return g.mask(lim.members)

    op = TailLimitOperator.from_function(g, fn)
    tau = derived_topology(op)
    d = g.mask(pf.name for pf in comp.manifold)
    out = {"status": "evaluated", "pairs": list(g.labels), "order": str(order_of(op)),
           "opens": tau.describe()}
    try:
        star = star_operator(op, d)
        out["starred_matches_refinement"] = derived_topology(star) == separating_refinement(tau, d)
    except PreconditionError as e:
        out["starred_matches_refinement"] = None
        out["reason"] = str(e)
    return out


# --- report ----------------------------------------------------------------------------------------------

@dataclass
class AdmissibilityReport:
    model: str
    validation: dict
    pairs: list[dict]
    notes: list[str]
    sequences: list[dict]
    checks: dict
    caveats: list[str]
    failures: list[str] = field(default_factory=list)
    undecided: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"model": self.model, "validation": self.validation, "pairs": self.pairs, "notes": self.notes,
                "sequences": self.sequences, "checks": self.checks, "caveats": self.caveats,
                "failures": self.failures, "undecided": self.undecided}

    def text(self) -> str:
        lines = [f"model {self.model}: {len(self.pairs)} pair families "
                 f"({sum(p['kind'] == 'boundary' for p in self.pairs)} boundary)"]
        for p in self.pairs:
            idx = f" for {p['index']}" if "index" in p else ""
            lines.append(f"  {p['kind']:8} {p['name']}{idx}")
        for s in self.sequences:
            lines.append(f"sequence {s['name']}: L={s['L']} L*={s['L*']} L**={s['L**']}")
        for name, value in self.checks.items():
            lines.append(f"{name}: {_verdict(value)}")
        for c in self.caveats:
            lines.append(f"caveat: {c}")
        return "\n".join(lines)


def _verdict(value) -> str:
    if isinstance(value, bool):
        return "pass" if value else "fail"
    if isinstance(value, list):
        if value and all(isinstance(v, dict) and "status" in v for v in value):
            bad = sum(v["status"] == "fail" for v in value)
            open_ = sum(v["status"] == "not evaluated" for v in value)
            return f"fail ({bad})" if bad else ("not evaluated" if open_ else "pass")
        return "pass" if not value else f"fail ({len(value)})"
    if isinstance(value, dict) and "status" in value:
        return value["status"]
    if isinstance(value, dict) and "dense" in value:
        return "pass" if value["dense"] else "fail"
    return str(value)


def admissibility_report(model: ChronoModel, comp: Completion | None = None) -> AdmissibilityReport:
    validation = validate_model(model).to_json()
    comp = comp or build_completion(model)
    seqs = catalog(comp)
    if not seqs:
        raise ModelError("empty sequence catalog")
    seq_rows = []
    for spec in model.sequences:
        seq = sequence_from_spec(comp, spec)
        it = chron_iterate(comp, seq)
        seq_rows.append({
            "name": seq.name,
            "atoms": seq.describe(),
            "L": chron_limit(comp, seq).describe(comp),
            "L*": chron_star(comp, seq).describe(comp),
            "L**": chron_double_star(comp, seq).describe(comp),
            "iterates": [s.describe(comp) for s in it.steps],
            "stabilized_at": it.stabilized_at,
        })
    sep_l = check_separation(comp, seqs, chron_limit)
    checks = {
        "szabados": check_szabados(comp),
        "separation_chr": sep_l,
        "separation_star": check_separation(comp, seqs, chron_star),
        "a1_chr": check_a1(comp, seqs, chron_limit),
        "a1_star": check_a1(comp, seqs, chron_star),
        "a2_chr": check_a2(comp, seqs, chron_limit),
        "a2_star": check_a2(comp, seqs, chron_star),
        "endpoints": check_endpoints(comp),
        "embedding": validation["indistinguishable_points"],
        "density_chr": check_density(comp, starred=False),
        "density_star": check_density(comp, starred=True),
        "boundary_closed_chr": check_boundary_closed(comp, starred=False),
        "boundary_closed_star": check_boundary_closed(comp, starred=True),
        "t1_chr": check_t1(comp, starred=False),
        "t1_star": check_t1(comp, starred=True),
        "manifold_preserved_star": check_manifold_preservation(comp, seqs, chron_star),
        "manifold_breakage_double_star": check_manifold_preservation(comp, seqs, chron_double_star),
        "boundary_non_t2": boundary_non_t2(comp, seqs),
        "finite_skeleton": finite_skeleton(comp),
    }
    caveats = ["maximality ranges over pasts/futures of model points and designated terminal sets only"]
    for d in model.tips + model.tifs:
        if d.assume_ip:
            caveats.append(f"{d.name}: indecomposability assumed, not verified")
    rep = AdmissibilityReport(model.name, validation, [p.to_json() for p in comp.pairs], comp.notes,
                              seq_rows, checks, caveats)
    informational = {"separation_chr", "manifold_breakage_double_star", "boundary_non_t2", "finite_skeleton"}
    for name, value in checks.items():
        if name in informational:
            continue
        if name == "endpoints":
            if any(v["status"] == "fail" for v in value):
                rep.failures.append(name)
            if any(v["status"] == "not evaluated" for v in value):
                rep.undecided.append(name)
        elif _verdict(value) not in ("pass",):
            rep.failures.append(name)
    if not validation["valid"]:
        rep.failures.append("validation")
    return rep


# --- DOT ----------------------------------------------------------------------------------------------------

def _dot_id(s: str) -> str:
    return '"' + s.replace('"', "'") + '"'


def completion_dot(comp: Completion, sample: int = 3) -> str:
    """Chronology between the first ``sample`` members of every pair family."""
    nodes: list[tuple[str, PSet, PSet, bool]] = []
    for pf in comp.pairs:
        if pf.parametric:
            for k in pf.index.elements(10 * sample)[:sample]:
                nodes.append((pf.label(k), pf.P.substitute("k", k), pf.F.substitute("k", k), pf.is_manifold))
        else:
            nodes.append((pf.name, pf.P, pf.F, pf.is_manifold))
    lines = ["digraph completion {", "  rankdir=BT;"]
    for name, _, _, man in nodes:
        lines.append(f"  {_dot_id(name)} [shape={'ellipse' if man else 'box'}];")
    for a, _, fa, _ in nodes:
        for b, pb, _, _ in nodes:
            if a != b and meets(fa, pb).truth():
                lines.append(f"  {_dot_id(a)} -> {_dot_id(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def model_dot(model: ChronoModel, sample: int = 3) -> str:
    pts = list(model.points(sample))
    lines = ["digraph model {", "  rankdir=BT;"]
    for p in pts:
        name = p[0] if p[1] is None else f"{p[0]}({p[1]})"
        lines.append(f"  {_dot_id(name)};")
    for p in pts:
        for q in pts:
            if model.precedes(p, q):
                a = p[0] if p[1] is None else f"{p[0]}({p[1]})"
                b = q[0] if q[1] is None else f"{q[0]}({q[1]})"
                lines.append(f"  {_dot_id(a)} -> {_dot_id(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def completion_to_json(comp: Completion) -> dict:
    return {"model": comp.model.name, "pairs": [p.to_json() for p in comp.pairs], "notes": comp.notes}
