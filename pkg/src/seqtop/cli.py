"""Command line entry point.

Exit codes: 0 every requested verdict passed, 1 a verdict failed,
2 bad input or unmet precondition, 3 an undecided verdict and no failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from .chrono import UNDECIDED as IP_UNDECIDED, ModelError, model_from_json, validate_model
from .completion import (
    admissibility_report,
    build_completion,
    completion_dot,
    completion_to_json,
    model_dot,
)
from .fixtures import FIXTURE_IDS, FixtureError, FixtureMismatch, canonical_json, generate
from .limits import (
    IncompleteTableError,
    associated_operator,
    derived_topology,
    operator_from_json,
    operator_to_json,
    order_of,
    star_operator,
    validate_operator,
    verify_section3,
)
from .predicates import PredicateSyntaxError
from .suites import chain_sweep, density_sweep, refinement_sweep, theorem_sweep
from .topology import (
    CapacityError,
    NotATopologyError,
    PreconditionError,
    a_sep,
    max_enum_points,
    separating_refinement,
    topology_from_json,
    topology_to_json,
)

OK, FAILED, BAD_INPUT, UNDECIDED = 0, 1, 2, 3


class InputError(Exception):
    pass


# --- input ---------------------------------------------------------------------------------

def _load(path: str | None) -> dict:
    if path is None:
        raise InputError("--in is required")
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    return doc


def _kind(doc: dict) -> str:
    if "opens" in doc:
        return "topology"
    if "table" in doc:
        return "operator"
    if any(k in doc for k in ("families", "core", "rel", "tips", "tifs")):
        return "chrono"
    raise InputError("cannot tell the document type: expected 'opens', 'table' or a chronological model")


def _require(doc: dict, kind: str, *allowed: str) -> None:
    if kind not in allowed:
        raise InputError(f"this command takes a {' or '.join(allowed)} document, got a {kind}")


def _domain(args, tau, doc: dict) -> int:
    labels = args.D.split(",") if args.D is not None else doc.get("D", [])
    labels = [x.strip() for x in labels if x.strip()]
    unknown = [x for x in labels if x not in tau.ground.labels]
    if unknown:
        raise InputError(f"/D: unknown points {unknown}")
    return tau.ground.mask(labels)


def _params(raw: list[str]) -> dict:
    out = {}
    for item in raw:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"--param expects key=value, got {item!r}")
        out[key] = int(value) if value.lstrip("-").isdigit() else value
    return out


# --- output --------------------------------------------------------------------------------

def _emit(args, payload: Any, text: str | None = None, dot: str | None = None) -> None:
    fmt = args.format
    if fmt == "dot":
        if dot is None:
            raise InputError("this command has no DOT output")
        out = dot
    elif fmt == "text" and text is not None:
        out = text + "\n"
    else:
        out = canonical_json(payload)
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def _opens(tau) -> list[list[str]]:
    return sorted(tau.describe(), key=lambda u: (len(u), u))


# --- commands ------------------------------------------------------------------------------

def cmd_validate(args) -> int:
    doc = _load(args.input)
    kind = _kind(doc)
    if kind == "topology":
        tau, _ = topology_from_json(doc)
        d = _domain(args, tau, doc)
        separating_refinement(tau, d)  # raises on an invalid domain
        payload = {"kind": kind, "valid": True, "points": list(tau.ground.labels), "opens": len(tau.opens)}
        _emit(args, payload, f"valid topology on {tau.ground.size} points, {len(tau.opens)} open sets")
        return OK
    if kind == "operator":
        v = validate_operator(operator_from_json(doc))
        _emit(args, {"kind": kind, **v.to_json()}, "valid operator" if v.valid else "invalid operator")
        return OK if v.valid else FAILED
    v = validate_model(model_from_json(doc)).to_json()
    undecided = [d["name"] for d in v["designations"] if d["ip"]["status"] == IP_UNDECIDED]
    _emit(args, {"kind": kind, **v}, f"model {'valid' if v['valid'] else 'invalid'}")
    if not v["valid"]:
        return UNDECIDED if undecided and _only_ip_open(v) else FAILED
    return OK


def _only_ip_open(v: dict) -> bool:
    structural = v["irreflexivity_violations"] or v["transitivity_violations"] or v["indistinguishable_points"]
    other = any(not (d["closed"] and d["nonempty"] and d["terminal"]) for d in v["designations"])
    return not structural and not other


def cmd_refine(args) -> int:
    doc = _load(args.input)
    kind = _kind(doc)
    _require(doc, kind, "topology")
    tau, _ = topology_from_json(doc)
    d = _domain(args, tau, doc)
    tau_star = separating_refinement(tau, d)
    l_star = star_operator(associated_operator(tau), d)
    tau_l_star = derived_topology(l_star)
    chain = tau <= tau_star <= tau_l_star
    equal = tau_star == tau_l_star
    ok = chain and equal and a_sep(tau, tau_star, d)
    payload = {
        "D": tau.ground.labels_of(d),
        "refinement": topology_to_json(tau_star)["opens"],
        "starred_operator": operator_to_json(l_star)["table"],
        "starred_operator_topology": tau_l_star.describe(),
        "chain_holds": chain,
        "refinement_equals_starred_topology": equal,
    }
    text = (f"refinement: {_opens(tau_star)}\n"
            f"chain tau <= refinement <= starred-operator topology: {'pass' if chain else 'fail'}\n"
            f"refinement equals starred-operator topology: {'pass' if equal else 'fail'}")
    _emit(args, payload, text)
    return OK if ok else FAILED


def cmd_order(args) -> int:
    doc = _load(args.input)
    kind = _kind(doc)
    _require(doc, kind, "operator", "topology")
    op = operator_from_json(doc) if kind == "operator" else associated_operator(topology_from_json(doc)[0])
    v = validate_operator(op)
    if v.antitone_violations or v.coherence_violations:
        raise InputError("order needs a coherent antitone operator: " + json.dumps(v.to_json()))
    order = str(order_of(op))
    _emit(args, {"order": order}, order)
    return OK


def cmd_complete(args) -> int:
    doc = _load(args.input)
    _require(doc, _kind(doc), "chrono")
    comp = build_completion(model_from_json(doc))
    _emit(args, completion_to_json(comp), None, completion_dot(comp))
    return OK


def cmd_report(args) -> int:
    doc = _load(args.input)
    kind = _kind(doc)
    if kind == "operator":
        op = operator_from_json(doc)
        d = _domain(args, derived_topology(op), doc)
        rep = verify_section3(op, d)
        text = "\n".join(f"{c.claim}: {c.status}" for c in rep.claims)
        _emit(args, {"claims": rep.to_json()}, text)
        return FAILED if rep.failures else OK
    _require(doc, kind, "chrono")
    rep = admissibility_report(model_from_json(doc))
    _emit(args, rep.to_json(), rep.text())
    if rep.failures:
        return FAILED
    return UNDECIDED if rep.undecided else OK


def cmd_gen(args) -> int:
    fx = generate(args.id, _params(args.param))
    doc = fx.document_json()
    if args.out:
        Path(args.out).write_text(doc)
    else:
        sys.stdout.write(doc)
    if args.manifest:
        Path(args.manifest).write_text(fx.manifest_json())
    for r in fx.results:
        print(f"{'pass' if r['ok'] else 'FAIL'} {r['claim']}", file=sys.stderr)
    return OK


def cmd_export_dot(args) -> int:
    doc = _load(args.input)
    kind = _kind(doc)
    if kind == "chrono":
        model = model_from_json(doc)
        text = completion_dot(build_completion(model)) if args.completion else model_dot(model)
    else:
        tau = topology_from_json(doc)[0] if kind == "topology" else derived_topology(operator_from_json(doc))
        text = _specialization_dot(tau)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def _specialization_dot(tau) -> str:
    """Edge x -> y when y lies in every neighbourhood of x."""
    labels = tau.ground.labels
    lines = ["digraph topology {"] + [f'  "{x}";' for x in labels]
    for i, x in enumerate(labels):
        for j, y in enumerate(labels):
            if i != j and tau.min_nbhds[i] >> j & 1:
                lines.append(f'  "{x}" -> "{y}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_suite(args) -> int:
    cap = max_enum_points()
    n = args.max_points
    if n > cap:
        raise InputError(f"--max-points {n} exceeds the enumeration cap {cap} (raise SEQTOP_MAX_ENUM)")
    results = [refinement_sweep(n), chain_sweep(n), density_sweep(n)]
    if args.random:
        results.append(theorem_sweep(random_count=args.random, seed=args.seed))
    _emit(args, [r.to_json() for r in results], "\n".join(r.line() for r in results))
    return OK if all(r.ok for r in results) else FAILED


# --- parser --------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", metavar="PATH", help="input JSON document ('-' for stdin)")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "text", "dot"), default="json")
    common.add_argument("--D", metavar="LABELS", help="comma-separated designated points (overrides the document)")

    p = argparse.ArgumentParser(prog="seqtop", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a topology, operator or model document")
    sub.add_parser("refine", parents=[common], help="separating refinement and the starred associated operator")
    sub.add_parser("order", parents=[common], help="classify an operator as first, k-th or no order")
    sub.add_parser("complete", parents=[common], help="build the completion of a chronological model")
    sub.add_parser("report", parents=[common], help="admissibility report or operator theorem suite")
    g = sub.add_parser("gen", parents=[common], help="generate a fixture and check its manifest")
    g.add_argument("id", choices=FIXTURE_IDS)
    g.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    g.add_argument("--manifest", metavar="PATH", help="write the manifest here")
    e = sub.add_parser("export-dot", parents=[common], help="DOT export of a model, completion or topology")
    e.add_argument("--completion", action="store_true", help="export the completion instead of the model")
    s = sub.add_parser("suite", parents=[common], help="exhaustive sweeps over small topologies")
    s.add_argument("--max-points", type=int, default=4)
    s.add_argument("--random", type=int, default=0, metavar="N", help="also run N random operators")
    s.add_argument("--seed", type=int, default=0)
    return p


COMMANDS = {
    "validate": cmd_validate, "refine": cmd_refine, "order": cmd_order, "complete": cmd_complete,
    "report": cmd_report, "gen": cmd_gen, "export-dot": cmd_export_dot, "suite": cmd_suite,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except FixtureMismatch as e:
        print(f"error: {e}", file=sys.stderr)
        return FAILED
    except (InputError, ModelError, PredicateSyntaxError, NotATopologyError, PreconditionError,
            CapacityError, IncompleteTableError, FixtureError) as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT
    except (KeyError, TypeError, ValueError) as e:
        print(f"error: malformed input: {e!r}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
