import pytest
from hypothesis import given, strategies as st

from seqtop.chrono import (
    ASSUMED,
    IP,
    NOT_IP,
    UNDECIDED,
    ModelError,
    PSet,
    model_from_json,
    s_related_formula,
    validate_model,
)
from seqtop.completion import check_szabados, build_completion
from seqtop.predicates import is_false, is_true
from seqtop.upset import UPSet

WINDOW = 40


def ff(f, g, pred):
    return {"f": f, "g": g, "pred": pred}


REMOVED = {
    "core": [],
    "families": [{"name": "c"}, {"name": "d"}],
    "rel": {"family_family": [ff("c", "c", "m<n"), ff("d", "d", "m>n"), ff("c", "d", "true")]},
    "tips": [{"name": "P", "fams": {"c": "true"}, "chain": {"fam": "c"}}],
    "tifs": [{"name": "F", "fams": {"d": "true"}, "chain": {"fam": "d"}}],
}


@pytest.fixture(scope="module")
def removed():
    return model_from_json(REMOVED)


def members(s: PSet, model, below=WINDOW):
    return {p for p in model.points(below) if s.contains(*p)}


# --- pasts and futures ------------------------------------------------------------

def test_past_of_family_point(removed):
    past = removed.past(("d", 5))
    assert members(past, removed) == {("c", i) for i in range(WINDOW)} | {("d", m) for m in range(6, WINDOW)}


def test_past_of_minimal_core_point_is_empty():
    m = model_from_json({"core": ["a", "b"], "rel": {"core": [["a", "b"]]}})
    assert m.past(("a", None)).is_empty_set()
    assert members(m.past(("b", None)), m) == {("a", None)}


def test_past_of_whole_family(removed):
    whole_c = PSet(fams={"c": removed.everything().fams["c"]})
    assert members(removed.past_of_set(whole_c), removed) == {("c", i) for i in range(WINDOW)}


def test_common_past(removed):
    all_d = PSet(fams={"d": removed.everything().fams["d"]})
    assert members(removed.common_past(all_d), removed) == {("c", i) for i in range(WINDOW)}
    assert removed.common_past(removed.everything()).is_empty_set()


def test_common_past_of_single_point_is_past_of_past():
    # no interpolation in a discrete chain: b is below c but nothing sits between them
    m = model_from_json({"core": ["a", "b", "c"], "rel": {"core": [["a", "b"], ["b", "c"], ["a", "c"]]}})
    top = PSet.of_points([("c", None)])
    assert members(m.common_past(top), m) == members(m.past_of_set(m.past(("c", None))), m) == {("a", None)}


# --- indecomposability --------------------------------------------------------------

def test_proper_past_is_ip(removed):
    assert removed.is_ip(removed.past(("d", 3))).status == IP


def test_removed_point_past_is_ip_with_chain(removed):
    p = removed.tips[0]
    v = removed.is_ip(p.members, chain=p.chain)
    assert v.status == IP and "chain" in v.reason


def test_union_of_incomparable_pasts_is_decomposed():
    m = model_from_json({"core": ["a0", "a", "b0", "b"], "rel": {"core": [["a0", "a"], ["b0", "b"]]}})
    union = m.past(("a", None)) | m.past(("b", None))
    v = m.is_ip(union)
    assert v.status == NOT_IP
    assert sorted(v.decomposition["parts"]) == ["{a0}", "{b0}"]


def test_parametric_sets_need_assumption():
    doc = dict(REMOVED, tips=[{"name": "Pk", "range": "true", "fams": {"c": "n<=k"}}])
    m = model_from_json(doc)
    assert m.is_ip(m.tips[0].members).status == UNDECIDED
    assert m.is_ip(m.tips[0].members, assume_ip=True).status == ASSUMED


def test_non_past_set_rejected(removed):
    some_d = PSet.of_points([("d", 2)])
    assert removed.is_ip(some_d).status == NOT_IP


# --- S-relation ----------------------------------------------------------------------

def test_removed_point_pair_is_related(removed):
    assert is_true(s_related_formula(removed, removed.tips[0].members, removed.tifs[0].members))


def test_manifold_pairs_related(removed):
    assert check_szabados(build_completion(removed)) == []


def test_future_ray_pairs_with_empty():
    m = model_from_json({"families": ["c"], "rel": {"family_family": [ff("c", "c", "m<n")]},
                         "tips": [{"name": "P", "fams": {"c": "true"}, "chain": {"fam": "c"}}]})
    assert is_true(s_related_formula(m, m.tips[0].members, None))


def test_partnered_tip_is_not_related_to_empty(removed):
    assert is_false(s_related_formula(removed, removed.tips[0].members, None))


# --- validation -----------------------------------------------------------------------

def test_removed_point_validates(removed):
    v = validate_model(removed)
    assert v.valid and v.past_distinguishing and v.future_distinguishing


def test_transitivity_violation_reported():
    m = model_from_json({"core": ["a", "b", "c"], "rel": {"core": [["a", "b"], ["b", "c"]]}})
    v = validate_model(m)
    assert not v.valid and v.transitivity


def test_reflexive_family_reported():
    m = model_from_json({"families": ["c"], "rel": {"family_family": [ff("c", "c", "m<=n")]}})
    assert validate_model(m).irreflexive


def test_indistinguishable_points_reported():
    m = model_from_json({"core": ["a", "b", "c"], "rel": {"core": [["a", "c"], ["b", "c"]]}})
    v = validate_model(m)
    assert v.jointly_distinguishing and not v.valid


def test_designation_must_be_terminal(removed):
    doc = dict(REMOVED, tips=[{"name": "P", "fams": {"c": "n<3"}}])
    v = validate_model(model_from_json(doc))
    assert not v.valid and v.designations[0]["proper_of"] == ["c(3)"]


@pytest.mark.parametrize("doc,fragment", [
    ({"core": ["a"], "rel": {"core": [["a", "z"]]}}, "rel.core[0]"),
    ({"families": ["c"], "rel": {"family_family": [ff("c", "c", "m<<n")]}}, "rel.family_family[0]"),
    ({"core": ["1a"]}, "invalid point name"),
    ({"families": ["c"], "tips": [{"fams": {"c": "true"}}]}, "missing name"),
    ({"families": ["c"], "sequences": [{"components": [{"family": "c", "pred": "n<3"}]}]}, "infinitely many"),
])
def test_schema_errors_point_at_location(doc, fragment):
    with pytest.raises(ModelError) as e:
        model_from_json(doc)
    assert fragment in str(e.value)


# --- properties against brute force ---------------------------------------------------

@st.composite
def finite_posets(draw):
    n = draw(st.integers(1, 5))
    edges = {(i, j) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())}
    # transitive closure
    changed = True
    while changed:
        changed = False
        for (a, b) in list(edges):
            for (c, d) in list(edges):
                if b == c and (a, d) not in edges:
                    edges.add((a, d))
                    changed = True
    return n, sorted(edges)


@given(finite_posets())
def test_finite_poset_pasts_and_szabados(poset):
    n, edges = poset
    names = [f"x{i}" for i in range(n)]
    m = model_from_json({"core": names, "rel": {"core": [[names[a], names[b]] for a, b in edges]}})
    for j in range(n):
        assert members(m.past((names[j], None)), m) == {(names[a], None) for a, b in edges if b == j}
        assert members(m.future((names[j], None)), m) == {(names[b], None) for a, b in edges if a == j}
    v = validate_model(m)
    assert v.transitivity == []
    # two points sharing a future (or past) can steal each other's partner, so the
    # manifold-pair property is only claimed for past- and future-distinguishing orders
    if v.past_distinguishing and v.future_distinguishing:
        assert check_szabados(build_completion(m)) == []


REL_PREDS = ["m<n", "m<=n-2", "m>=n+1", "n%2==0 and m<n", "m%3==1", "true", "m==n+1"]


@given(st.sampled_from(REL_PREDS), st.sampled_from(REL_PREDS), st.integers(0, 12))
def test_set_images_match_brute_force(p_cd, p_dd, k):
    m = model_from_json({"families": ["c", "d"],
                         "rel": {"family_family": [ff("c", "d", p_cd), ff("d", "d", p_dd)]}})
    big = 4 * WINDOW
    # past of a single point: direct evaluation
    past = m.past(("d", k))
    assert members(past, m) == {(f, i) for f, i in m.points(WINDOW) if m.precedes((f, i), ("d", k))}
    # past of a whole family: witnesses may sit anywhere, so search a wider window
    all_d = PSet(fams={"d": m.everything().fams["d"]})
    union = m.past_of_set(all_d)
    brute = {(f, i) for f, i in m.points(WINDOW) if any(m.precedes((f, i), ("d", j)) for j in range(big))}
    assert members(union, m) == brute
    # common past generator: points below every d
    below = m.below_all(all_d)
    brute_below = {(f, i) for f, i in m.points(WINDOW) if all(m.precedes((f, i), ("d", j)) for j in range(big))}
    assert members(below, m) == brute_below


@given(st.lists(st.integers(0, 30), max_size=6), st.lists(st.integers(0, 30), max_size=6))
def test_pset_algebra_matches_sets(xs, ys):
    a = PSet.of_points([("c", i) for i in xs])
    b = PSet.of_points([("c", i) for i in ys])
    assert {i for i in range(WINDOW) if (a | b).contains("c", i)} == set(xs) | set(ys)
    assert {i for i in range(WINDOW) if (a - b).contains("c", i)} == set(xs) - set(ys)
    assert is_true(a.subset_of(b)) == set(xs).issubset(ys)
    assert (a.key() == b.key()) == (set(xs) == set(ys))


def test_parametric_family_members():
    doc = dict(REMOVED, tips=[{"name": "Pk", "range": "k>=1", "fams": {"c": "n<=k"}, "assume_ip": True}])
    m = model_from_json(doc)
    d = m.tips[0]
    assert d.index == UPSet.at_least(1)
    assert {i for i in range(WINDOW) if d.at(4).contains("c", i)} == set(range(5))
