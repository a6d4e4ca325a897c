"""Deterministic fixture generators with expected-verdict manifests.

Each fixture is a JSON document (a topology, an operator table or a
chronological model) plus a manifest of claims.  A claim names one engine
operation, its arguments and the expected result; ``generate`` runs every
claim and raises :class:`FixtureMismatch` if any disagrees.

The module also hosts the small instances the theorem suites sweep over:
exhaustive antitone operators and seeded random ones.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Callable, Iterator

from .chrono import model_from_json, s_related_formula
from .completion import (
    Completion,
    admissibility_report,
    build_completion,
    chron_double_star,
    chron_iterate,
    chron_limit,
    chron_star,
    sequence_from_spec,
)
from .limits import (
    TailLimitOperator,
    antitone_meet,
    associated_operator,
    derived_topology,
    operator_from_json,
    order_of,
)
from .predicates import is_false
from .topology import (
    GroundSet,
    density_check,
    separating_refinement,
    topology_from_json,
    verify_minimality,
)

MANIFEST_VERSION = 1


class FixtureError(ValueError):
    """Unknown fixture id or parameters outside the documented range."""


class FixtureMismatch(AssertionError):
    def __init__(self, fixture: str, failures: list[dict]) -> None:
        self.fixture = fixture
        self.failures = failures
        lines = [f"{f['claim']}: expected {f['expected']!r}, got {f['actual']!r}" for f in failures]
        super().__init__(f"fixture {fixture} disagrees with its manifest:\n  " + "\n  ".join(lines))


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class Fixture:
    id: str
    params: dict
    kind: str
    document: dict
    manifest: dict
    results: list[dict] = field(default_factory=list)

    def document_json(self) -> str:
        return canonical_json(self.document)

    def manifest_json(self) -> str:
        return canonical_json(self.manifest)


# --- topology and operator fixtures -------------------------------------------------------

def _sierpinski() -> tuple[dict, list[dict]]:
    doc = {"points": ["p", "q"], "opens": [[], ["p"], ["p", "q"]], "D": ["p"]}
    claims = [
        {"claim": "refinement is discrete", "op": "separating_refinement", "args": {"D": ["p"]},
         "expect": [[], ["p"], ["p", "q"], ["q"]]},
        {"claim": "refinement is the unique minimum", "op": "verify_minimality", "args": {"D": ["p"]},
         "expect": {"a_min": True, "unique_minimum": True}},
        {"claim": "density lost after refinement", "op": "density_check", "args": {"D": ["p"]},
         "expect": [True, False]},
    ]
    return doc, claims


def _three_point_crust() -> tuple[dict, list[dict]]:
    doc = {"points": ["p", "q", "r"], "opens": [[], ["p"], ["p", "q"], ["p", "q", "r"]], "D": ["p"]}
    claims = [
        {"claim": "refinement splits p off", "op": "separating_refinement", "args": {"D": ["p"]},
         "expect": [[], ["p"], ["p", "q"], ["p", "q", "r"], ["q"], ["q", "r"]]},
        {"claim": "refinement is the unique minimum", "op": "verify_minimality", "args": {"D": ["p"]},
         "expect": {"a_min": True, "unique_minimum": True}},
        {"claim": "density lost after refinement", "op": "density_check", "args": {"D": ["p"]},
         "expect": [True, False]},
    ]
    return doc, claims


def _cascade_order2() -> tuple[dict, list[dict]]:
    doc = {"points": ["a", "b", "c"], "table": {"a": ["a", "b"], "b": ["b", "c"], "c": ["b", "c"]},
           "coherent": True, "autofill": "antitone-max"}
    claims = [
        {"claim": "second order", "op": "order_of", "args": {}, "expect": "KthOrder(2)"},
        {"claim": "derived topology", "op": "derived_topology", "args": {},
         "expect": [[], ["a"], ["a", "b", "c"]]},
    ]
    return doc, claims


# --- chronological model fixtures ----------------------------------------------------------

def _ff(f: str, g: str, pred: str) -> dict:
    return {"f": f, "g": g, "pred": pred}


def _fams(*names: str) -> list[dict]:
    return [{"name": n} for n in names]


def _removed_point() -> dict:
    # an ascending chain c below a descending chain d; the gap between them is one boundary pair
    return {
        "name": "removed-point",
        "core": [],
        "families": _fams("c", "d"),
        "rel": {"family_family": [_ff("c", "c", "m<n"), _ff("d", "d", "m>n"), _ff("c", "d", "true")]},
        "tips": [{"name": "P", "fams": {"c": "true"}, "chain": {"fam": "c", "pred": "true"}}],
        "tifs": [{"name": "F", "fams": {"d": "true"}, "chain": {"fam": "d", "pred": "true"}}],
        "sequences": [{"name": "up", "components": [{"family": "c"}]}],
    }


# Families shared by the two-limit models:
#   s      the test sequence, r and t private points just below and above each s(n)
#   lp/uf  chains below and above the manifold point p
#   a, b   generating chains of the boundary TIP and TIF
# Extremal core points get private neighbours (w00, v00, w2, v2) so that no
# point has an empty past or future; such points would satisfy the limit
# condition vacuously.

def _example_a1() -> dict:
    core_edges = [
        ["w0", "w"], ["w00", "w0"], ["w00", "w"], ["w00", "w1"], ["w", "w1"], ["w0", "w1"],
        ["w1", "w2"], ["w", "w2"], ["w0", "w2"], ["w00", "w2"],
        ["v00", "v0"], ["v00", "v"], ["v00", "v1"], ["v0", "v"], ["v", "v1"], ["v0", "v1"],
        ["v1", "v2"], ["v", "v2"], ["v0", "v2"], ["v00", "v2"],
    ]
    return {
        "name": "example-A1",
        "core": ["p", "w", "w0", "w00", "w1", "w2", "v", "v0", "v00", "v1", "v2"],
        "families": _fams("lp", "uf", "a", "b", "s", "r", "t"),
        "rel": {
            "core": core_edges,
            "family_core": [{"fam": "lp", "rhs": x} for x in ("p", "v", "v1", "v2")]
            + [{"fam": "a", "rhs": x} for x in ("w", "w1", "w2")],
            "core_family": [{"lhs": x, "fam": "uf"} for x in ("p", "w", "w0", "w00")]
            + [{"lhs": x, "fam": "b"} for x in ("v", "v0", "v00")],
            "family_family": [
                _ff("lp", "lp", "m<n"), _ff("uf", "uf", "m>n"), _ff("a", "a", "m<n"), _ff("b", "b", "m>n"),
                _ff("lp", "uf", "true"), _ff("lp", "b", "true"), _ff("a", "uf", "true"), _ff("a", "b", "true"),
                _ff("lp", "s", "m<=n"), _ff("a", "s", "m<=n"), _ff("s", "uf", "n<=m"), _ff("s", "b", "n<=m"),
                _ff("lp", "r", "m<=n"), _ff("a", "r", "m<=n"), _ff("r", "s", "m==n"),
                _ff("r", "uf", "n<=m"), _ff("r", "b", "n<=m"),
                _ff("s", "t", "m==n"), _ff("lp", "t", "m<=n"), _ff("a", "t", "m<=n"), _ff("r", "t", "m==n"),
                _ff("t", "uf", "n<=m"), _ff("t", "b", "n<=m"),
            ],
        },
        "tips": [{"name": "P", "fams": {"a": "true"}, "chain": {"fam": "a", "pred": "true"}}],
        "tifs": [{"name": "F", "fams": {"b": "true"}, "chain": {"fam": "b", "pred": "true"}}],
        "sequences": [{"name": "sigma", "components": [{"family": "s"}]}],
    }


def _example_a2(name: str) -> dict:
    # ap runs strictly below a, so the smaller TIP P' sits inside P and has no future partner
    return {
        "name": name,
        "core": ["p"],
        "families": _fams("lp", "uf", "ap", "a", "b", "s", "r", "t"),
        "rel": {
            "family_core": [{"fam": "lp", "rhs": "p"}],
            "core_family": [{"lhs": "p", "fam": "uf"}],
            "family_family": [
                _ff("lp", "lp", "m<n"), _ff("uf", "uf", "m>n"), _ff("ap", "ap", "m<n"), _ff("a", "a", "m<n"),
                _ff("b", "b", "m>n"), _ff("ap", "a", "m<n"),
                _ff("a", "b", "true"), _ff("ap", "b", "true"), _ff("b", "uf", "true"),
                _ff("a", "uf", "true"), _ff("ap", "uf", "true"), _ff("lp", "uf", "true"),
                _ff("lp", "s", "m<=n"), _ff("ap", "s", "m<=n"), _ff("s", "uf", "n<=m"),
                _ff("lp", "r", "m<=n"), _ff("ap", "r", "m<=n"), _ff("r", "s", "m==n"), _ff("r", "uf", "n<=m"),
                _ff("s", "t", "m==n"), _ff("lp", "t", "m<=n"), _ff("ap", "t", "m<=n"), _ff("r", "t", "m==n"),
                _ff("t", "uf", "n<=m"),
            ],
        },
        "tips": [{"name": "P", "fams": {"a": "true", "ap": "true"}, "chain": {"fam": "a", "pred": "true"}},
                 {"name": "P'", "fams": {"ap": "true"}, "chain": {"fam": "ap", "pred": "true"}}],
        "tifs": [{"name": "F", "fams": {"b": "true", "uf": "true"}, "chain": {"fam": "b", "pred": "true"}}],
        "sequences": [{"name": "sigma", "components": [{"family": "s"}]}],
    }


def _example_a3(k: int) -> dict:
    # x is the test sequence; e(j) marks the j-th TIP P_j of the parametric family.
    # ep, f, f1 and r0 are private neighbours keeping every past and future nonempty.
    return {
        "name": f"example-A3-k{k}",
        "core": [],
        "families": _fams("ap", "a", "b", "e", "ep", "f", "f1", "x", "r", "r0", "t"),
        "rel": {"family_family": [
            _ff("ap", "ap", "m<n"), _ff("a", "a", "m<n"), _ff("b", "b", "m>n"), _ff("ap", "a", "m<n"),
            _ff("a", "b", "true"), _ff("ap", "b", "true"), _ff("e", "b", "true"), _ff("ep", "b", "true"),
            _ff("e", "ep", "m==n"), _ff("ep", "f", "m==n"), _ff("e", "f", "m==n"),
            _ff("f", "f1", "m==n"), _ff("ep", "f1", "m==n"), _ff("e", "f1", "m==n"),
            _ff("a", "x", "m<=n"), _ff("ap", "x", "true"), _ff("e", "x", "m<=n"), _ff("x", "b", "n<=m"),
            _ff("r0", "r", "m==n"), _ff("r0", "x", "m==n"), _ff("r0", "b", "n<=m"), _ff("r0", "t", "m==n"),
            _ff("r", "x", "m==n"), _ff("r", "b", "n<=m"), _ff("r", "t", "m==n"),
            _ff("x", "t", "m==n"), _ff("a", "t", "m<=n"), _ff("ap", "t", "true"), _ff("e", "t", "m<=n"),
        ]},
        "tips": [
            {"name": "P_inf", "fams": {"a": "true", "ap": "true"}, "chain": {"fam": "a", "pred": "true"}},
            {"name": "P'_inf", "fams": {"ap": "true"}, "chain": {"fam": "ap", "pred": "true"}},
            {"name": "P_k", "range": "true", "fams": {"ap": "true", "e": "n==k"}, "assume_ip": True},
        ],
        "tifs": [{"name": "F", "fams": {"b": "true"}, "chain": {"fam": "b", "pred": "true"}}],
        "sequences": [{"name": "sigma", "components": [{"family": "x"}]}],
    }


_PASSING = ["szabados", "separation_star", "a1_chr", "a1_star", "a2_chr", "a2_star", "endpoints", "embedding",
            "density_chr", "density_star", "boundary_closed_chr", "boundary_closed_star", "t1_star",
            "manifold_preserved_star"]


def _removed_point_claims() -> list[dict]:
    return [
        {"claim": "one boundary pair", "op": "boundary_pairs", "args": {}, "expect": ["(P,F)"]},
        {"claim": "P and F are S-related", "op": "s_related", "args": {"P": "P", "F": "F"}, "expect": True},
        {"claim": "admissibility checks", "op": "admissibility_report", "args": {},
         "expect": {"pass": _PASSING + ["separation_chr", "t1_chr"], "fail": [], "failures": []}},
        {"claim": "the chain converges to the boundary pair", "op": "chron_limit", "args": {"sequence": "up"},
         "expect": {"equals": ["(P,F)"]}},
    ]


def _a1_claims() -> list[dict]:
    return [
        {"claim": "sigma converges to both", "op": "chron_limit", "args": {"sequence": "sigma"},
         "expect": {"contains": ["(P,F)", "p"]}},
        {"claim": "starred operator keeps only the manifold point", "op": "chron_star",
         "args": {"sequence": "sigma"}, "expect": {"equals": ["p"]}},
        {"claim": "separation fails before and holds after starring", "op": "admissibility_report", "args": {},
         "expect": {"pass": _PASSING, "fail": ["separation_chr"], "failures": []}},
    ]


def _a2_claims() -> list[dict]:
    return [
        {"claim": "two boundary pairs", "op": "boundary_pairs", "args": {}, "expect": ["(P',0)", "(P,F)"]},
        {"claim": "sigma converges to p and (P',0)", "op": "chron_limit", "args": {"sequence": "sigma"},
         "expect": {"contains": ["(P',0)", "p"]}},
        {"claim": "starred operator drops (P',0)", "op": "chron_star", "args": {"sequence": "sigma"},
         "expect": {"equals": ["p"], "excludes": ["(P',0)"]}},
    ]


def _a3_claims() -> list[dict]:
    return [
        {"claim": "(P'_inf,0) is a second-order limit", "op": "chron_iterate", "args": {"sequence": "sigma"},
         "expect": {"first": {"excludes": ["(P'_inf,0)"]}, "new_at": {"2": ["(P'_inf,0)"]}, "stabilized_at": 2}},
        {"claim": "first limits", "op": "chron_limit", "args": {"sequence": "sigma"},
         "expect": {"equals": ["(P_inf,F)", "(P_k,F) for k>=0"]}},
    ]


def _a4_claims() -> list[dict]:
    return [
        {"claim": "sigma converges to p", "op": "chron_limit", "args": {"sequence": "sigma"},
         "expect": {"contains": ["p"]}},
        {"claim": "boundary-preferring operator drops p", "op": "chron_double_star", "args": {"sequence": "sigma"},
         "expect": {"equals": ["(P',0)"], "excludes": ["p"]}},
        {"claim": "report flags manifold breakage", "op": "admissibility_report", "args": {},
         "expect": {"fail": ["manifold_breakage_double_star"]}},
    ]


GLW_NOTE = (
    "Out of scope. The example separates an interior point from a boundary point by "
    "following null geodesics of a Lorentzian metric. Chronological models in this package "
    "carry only the order relation, so the geodesic structure cannot be encoded."
)


# --- registry -------------------------------------------------------------------------------

def _no_params(params: dict) -> dict:
    if params:
        raise FixtureError(f"fixture takes no parameters, got {sorted(params)}")
    return {}


def _a3_params(params: dict) -> dict:
    extra = set(params) - {"k"}
    if extra:
        raise FixtureError(f"unknown parameters {sorted(extra)}")
    k = params.get("k", 2)
    try:
        k = int(k)
    except (TypeError, ValueError):
        raise FixtureError(f"k must be an integer, got {k!r}") from None
    if k != 2:
        raise FixtureError(f"example-A3 is implemented and verified for k=2 only, got k={k}")
    return {"k": k}


_BUILDERS: dict[str, tuple[str, Callable[[dict], dict], Callable[[dict], tuple[dict, list[dict]]]]] = {
    "sierpinski": ("topology", _no_params, lambda p: _sierpinski()),
    "three-point-crust": ("topology", _no_params, lambda p: _three_point_crust()),
    "cascade-order2": ("operator", _no_params, lambda p: _cascade_order2()),
    "removed-point": ("chrono", _no_params, lambda p: (_removed_point(), _removed_point_claims())),
    "example-A1": ("chrono", _no_params, lambda p: (_example_a1(), _a1_claims())),
    "example-A2": ("chrono", _no_params, lambda p: (_example_a2("example-A2"), _a2_claims())),
    "example-A3": ("chrono", _a3_params, lambda p: (_example_a3(p["k"]), _a3_claims())),
    "example-A4": ("chrono", _no_params, lambda p: (_example_a2("example-A4"), _a4_claims())),
    "glw-placeholder": ("placeholder", _no_params,
                        lambda p: ({"id": "glw-placeholder", "status": "out-of-scope", "note": GLW_NOTE}, [])),
}

FIXTURE_IDS = tuple(_BUILDERS)


def describe(fixture_id: str, params: dict | None = None) -> Fixture:
    """Build document and manifest without running the engine."""
    if fixture_id not in _BUILDERS:
        raise FixtureError(f"unknown fixture {fixture_id!r}; known: {', '.join(FIXTURE_IDS)}")
    kind, check, build = _BUILDERS[fixture_id]
    params = check(dict(params or {}))
    doc, claims = build(params)
    digest = hashlib.sha256(canonical_json(doc).encode()).hexdigest()
    manifest = {"fixture": fixture_id, "params": params, "kind": kind, "manifest_version": MANIFEST_VERSION,
                "document_sha256": digest, "claims": claims}
    return Fixture(fixture_id, params, kind, doc, manifest)


def generate(fixture_id: str, params: dict | None = None, verify: bool = True) -> Fixture:
    fx = describe(fixture_id, params)
    if verify:
        fx.results = check_manifest(fx.kind, fx.document, fx.manifest)
        bad = [r for r in fx.results if not r["ok"]]
        if bad:
            raise FixtureMismatch(fixture_id, bad)
    return fx


# --- claim evaluation -------------------------------------------------------------------------

class _Context:
    """Lazily built engine objects shared by the claims of one document."""

    def __init__(self, kind: str, doc: dict) -> None:
        self.kind = kind
        self.doc = doc
        self._cache: dict[str, Any] = {}

    def get(self, key: str, make: Callable[[], Any]) -> Any:
        if key not in self._cache:
            self._cache[key] = make()
        return self._cache[key]

    @property
    def model(self):
        return self.get("model", lambda: model_from_json(self.doc))

    @property
    def completion(self) -> Completion:
        return self.get("completion", lambda: build_completion(self.model))

    def sequence(self, name: str):
        spec = next((s for s in self.model.sequences if s.name == name), None)
        if spec is None:
            raise FixtureError(f"no sequence named {name!r}")
        return sequence_from_spec(self.completion, spec)

    def designation(self, name: str | None, side: str):
        if name is None:
            return None
        pool = self.model.tips if side == "past" else self.model.tifs
        d = next((d for d in pool if d.name == name), None)
        if d is None:
            raise FixtureError(f"no designation named {name!r}")
        return d.members


def _set_check(actual: list[str], expect: dict) -> bool:
    ok = True
    if "equals" in expect:
        ok &= sorted(actual) == sorted(expect["equals"])
    if "contains" in expect:
        ok &= set(expect["contains"]) <= set(actual)
    if "excludes" in expect:
        ok &= not set(expect["excludes"]) & set(actual)
    return ok


def _limit_op(fn):
    def run(ctx: _Context, args: dict) -> list[str]:
        comp = ctx.completion
        return fn(comp, ctx.sequence(args["sequence"])).describe(comp)
    return run


def _iterate(ctx: _Context, args: dict) -> dict:
    comp = ctx.completion
    it = chron_iterate(comp, ctx.sequence(args["sequence"]))
    return {"steps": [s.describe(comp) for s in it.steps],
            "new_at": {str(i): it.new_at(i).describe(comp) for i in range(1, len(it.steps) + 1)},
            "stabilized_at": it.stabilized_at}


def _iterate_ok(actual: dict, expect: dict) -> bool:
    ok = True
    if "first" in expect:
        ok &= _set_check(actual["steps"][0], expect["first"])
    for i, names in expect.get("new_at", {}).items():
        ok &= set(names) <= set(actual["new_at"].get(i, []))
    if "stabilized_at" in expect:
        ok &= actual["stabilized_at"] == expect["stabilized_at"]
    return ok


def _report(ctx: _Context, args: dict) -> dict:
    from .completion import _verdict

    rep = admissibility_report(ctx.model, ctx.completion)
    return {"verdicts": {k: _verdict(v) for k, v in rep.checks.items()}, "failures": rep.failures,
            "undecided": rep.undecided}


def _report_ok(actual: dict, expect: dict) -> bool:
    v = actual["verdicts"]
    ok = all(v.get(name) == "pass" for name in expect.get("pass", []))
    ok &= all(str(v.get(name, "")).startswith("fail") for name in expect.get("fail", []))
    if "failures" in expect:
        ok &= actual["failures"] == expect["failures"]
    return ok


def _topology(ctx: _Context):
    return ctx.get("topology", lambda: topology_from_json(ctx.doc))


def _mask(ctx: _Context, labels: list[str]) -> int:
    return _topology(ctx)[0].ground.mask(labels)


def _operator(ctx: _Context) -> TailLimitOperator:
    return ctx.get("operator", lambda: operator_from_json(ctx.doc))


def _minimality(ctx: _Context, args: dict) -> dict:
    tau = _topology(ctx)[0]
    d = _mask(ctx, args["D"])
    rep = verify_minimality(separating_refinement(tau, d), tau, d)
    return {"a_min": rep.a_min, "unique_minimum": rep.unique_minimum}


def _same_opens(actual: list[list[str]], expect: list[list[str]]) -> bool:
    return sorted(map(sorted, actual)) == sorted(map(sorted, expect))


def _s_related(ctx: _Context, args: dict) -> bool:
    p = ctx.designation(args.get("P"), "past")
    f = ctx.designation(args.get("F"), "future")
    return not is_false(s_related_formula(ctx.model, p, f))


_OPS: dict[str, tuple[Callable[[_Context, dict], Any], Callable[[Any, Any], bool]]] = {
    "separating_refinement": (
        lambda ctx, a: separating_refinement(_topology(ctx)[0], _mask(ctx, a["D"])).describe(),
        _same_opens),
    "verify_minimality": (_minimality, lambda x, e: x == e),
    "density_check": (lambda ctx, a: list(density_check(_topology(ctx)[0],
                                                        separating_refinement(_topology(ctx)[0], _mask(ctx, a["D"])),
                                                        _mask(ctx, a["D"]))),
                      lambda x, e: x == e),
    "order_of": (lambda ctx, a: str(order_of(_operator(ctx))), lambda x, e: x == e),
    "derived_topology": (lambda ctx, a: derived_topology(_operator(ctx)).describe(), _same_opens),
    "boundary_pairs": (lambda ctx, a: sorted(p.name for p in ctx.completion.boundary), lambda x, e: x == sorted(e)),
    "s_related": (_s_related, lambda x, e: x == e),
    "chron_limit": (_limit_op(chron_limit), _set_check),
    "chron_star": (_limit_op(chron_star), _set_check),
    "chron_double_star": (_limit_op(chron_double_star), _set_check),
    "chron_iterate": (_iterate, _iterate_ok),
    "admissibility_report": (_report, _report_ok),
}

CLAIM_OPS = tuple(_OPS)


def check_manifest(kind: str, doc: dict, manifest: dict) -> list[dict]:
    """Evaluate each claim; returns one result row per claim."""
    ctx = _Context(kind, doc)
    out = []
    for c in manifest.get("claims", []):
        if c["op"] not in _OPS:
            raise FixtureError(f"claim {c['claim']!r}: unknown engine operation {c['op']!r}")
        run, compare = _OPS[c["op"]]
        actual = run(ctx, c.get("args", {}))
        out.append({"claim": c["claim"], "op": c["op"], "expected": c["expect"], "actual": actual,
                    "ok": bool(compare(actual, c["expect"]))})
    return out


# --- suite instances ------------------------------------------------------------------------

def _down_sets(ground: GroundSet) -> list[int]:
    """Sets of profiles closed under nonempty subprofiles, as bitmasks over profile indices."""
    profiles = list(range(1, 1 << ground.size))
    out = []
    for bits in range(1 << len(profiles)):
        chosen = [a for i, a in enumerate(profiles) if bits >> i & 1]
        sel = set(chosen)
        if all(b in sel for a in chosen for b in _proper_subprofiles(a)):
            out.append(bits)
    return out


def _proper_subprofiles(a: int) -> Iterator[int]:
    b = (a - 1) & a
    while b:
        yield b
        b = (b - 1) & a


def all_antitone_operators(size: int, labels: str = "abc") -> list[TailLimitOperator]:
    """Every antitone table on ``size <= 3`` points; coherence is recorded, not required."""
    if not 1 <= size <= 3:
        raise FixtureError("exhaustive operator enumeration covers 1 to 3 points")
    g = GroundSet.of(labels[:size])
    downs = _down_sets(g)
    ops = []
    for choice in product(downs, repeat=size):
        table = [0] * (1 << size)
        for x, bits in enumerate(choice):
            for i in range((1 << size) - 1):
                if bits >> i & 1:
                    table[i + 1] |= 1 << x
        coherent = all(table[1 << x] >> x & 1 for x in range(size))
        ops.append(TailLimitOperator(g, tuple(table), coherent))
    return ops


def random_antitone_operator(rng: random.Random, max_points: int = 5, labels: str = "abcde") -> TailLimitOperator:
    """Random table made antitone by meets; coherent when every singleton keeps its own point."""
    size = rng.randint(1, max_points)
    g = GroundSet.of(labels[:size])
    density = rng.random()
    raw = []
    for a in range(1, 1 << size):
        v = 0
        for x in range(size):
            if rng.random() < density:
                v |= 1 << x
        if rng.random() < 0.7:
            v |= a
        raw.append(v)
    op = antitone_meet(g, raw, coherent=False)
    coherent = all(op.table[1 << x] >> x & 1 for x in range(size))
    return TailLimitOperator(g, op.table, coherent)


def associated_operators(topologies) -> Iterator[TailLimitOperator]:
    for tau in topologies:
        yield associated_operator(tau)
