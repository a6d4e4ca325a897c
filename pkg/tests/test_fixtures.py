import hashlib
import random

import pytest

import oracle
from seqtop.fixtures import (
    FIXTURE_IDS,
    FixtureError,
    FixtureMismatch,
    all_antitone_operators,
    canonical_json,
    check_manifest,
    describe,
    generate,
    random_antitone_operator,
)
from seqtop.limits import is_limit_operator


@pytest.mark.parametrize("fixture_id", FIXTURE_IDS)
def test_every_fixture_matches_its_manifest(fixture_id):
    fx = generate(fixture_id)
    assert all(r["ok"] for r in fx.results)
    assert len(fx.results) == len(fx.manifest["claims"])


@pytest.mark.parametrize("fixture_id", FIXTURE_IDS)
def test_regeneration_is_byte_identical(fixture_id):
    a, b = describe(fixture_id), describe(fixture_id)
    assert a.document_json() == b.document_json() and a.manifest_json() == b.manifest_json()
    digest = hashlib.sha256(a.document_json().encode()).hexdigest()
    assert a.manifest["document_sha256"] == digest


def test_each_claim_names_one_operation():
    from seqtop.fixtures import CLAIM_OPS

    for fid in FIXTURE_IDS:
        for c in describe(fid).manifest["claims"]:
            assert c["op"] in CLAIM_OPS and set(c) == {"claim", "op", "args", "expect"}


def test_a3_parameter_range():
    assert describe("example-A3", {"k": 2}).params == {"k": 2}
    for bad in ({"k": 3}, {"k": "x"}, {"j": 2}):
        with pytest.raises(FixtureError):
            describe("example-A3", bad)


def test_unknown_fixture_and_stray_params():
    with pytest.raises(FixtureError):
        describe("example-A9")
    with pytest.raises(FixtureError):
        describe("sierpinski", {"n": 3})


def test_mismatch_fails_loudly():
    fx = describe("cascade-order2")
    fx.manifest["claims"][0]["expect"] = "FirstOrder"
    results = check_manifest(fx.kind, fx.document, fx.manifest)
    assert not results[0]["ok"] and results[0]["actual"] == "KthOrder(2)"
    with pytest.raises(FixtureMismatch) as e:
        raise FixtureMismatch(fx.id, [r for r in results if not r["ok"]])
    assert "KthOrder(2)" in str(e.value)


def test_placeholder_is_documentation_only():
    fx = generate("glw-placeholder")
    assert fx.kind == "placeholder" and fx.document["status"] == "out-of-scope" and fx.results == []


def test_canonical_json_sorts_keys():
    assert canonical_json({"b": 1, "a": [2]}) == '{\n  "a": [\n    2\n  ],\n  "b": 1\n}\n'


# --- suite instances ----------------------------------------------------------------------

def brute_antitone(n):
    """Every table on nonempty subsets that shrinks under passing to subprofiles."""
    pts = "abc"[:n]
    subsets = [frozenset(s) for s in oracle.nonempty_subsets(pts)]
    values = [frozenset(s) for s in oracle.powerset(pts)]
    count = 0

    def rec(i, table):
        nonlocal count
        if i == len(subsets):
            count += 1
            return
        a = subsets[i]
        for v in values:
            if all(not (b < a) or table[b] >= v for b in table) and all(not (a < b) or v >= table[b] for b in table):
                table[a] = v
                rec(i + 1, table)
                del table[a]

    rec(0, {})
    return count


@pytest.mark.parametrize("n", [1, 2, 3])
def test_exhaustive_operators_match_brute_count(n):
    ops = all_antitone_operators(n)
    assert len(ops) == len(set(ops)) == brute_antitone(n)
    assert all(is_limit_operator(op) for op in ops)


def test_random_operators_are_antitone_and_seeded():
    a = [random_antitone_operator(random.Random(7)) for _ in range(3)]
    b = [random_antitone_operator(random.Random(7)) for _ in range(3)]
    assert a == b
    rng = random.Random(1)
    assert all(is_limit_operator(random_antitone_operator(rng)) for _ in range(200))
