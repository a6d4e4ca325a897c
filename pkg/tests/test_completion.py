import pytest
from hypothesis import given, settings, strategies as st

from chrono_oracle import WindowOracle
from seqtop.chrono import ModelError, model_from_json
from seqtop.completion import (
    Atom,
    PairSequence,
    admissibility_report,
    build_completion,
    catalog,
    chron_double_star,
    chron_iterate,
    chron_limit,
    chron_star,
    completion_dot,
    completion_to_json,
    model_dot,
    sequence_from_spec,
    sub_atoms,
)
from seqtop.fixtures import describe
from seqtop.predicates import is_true
from seqtop.upset import UPSet


def ff(f, g, pred):
    return {"f": f, "g": g, "pred": pred}


def completion_of(fixture_id):
    return build_completion(model_from_json(describe(fixture_id).document))


@pytest.fixture(scope="module")
def removed():
    return completion_of("removed-point")


@pytest.fixture(scope="module")
def a1():
    return completion_of("example-A1")


@pytest.fixture(scope="module")
def a2():
    return completion_of("example-A2")


@pytest.fixture(scope="module")
def a3():
    return completion_of("example-A3")


def engine_members(comp, s, k_max):
    out = set()
    for name, idx in s.members.items():
        if comp.by_name[name].parametric:
            out |= {(name, k) for k in idx.elements(k_max)}
        else:
            out.add((name, None))
    return out


def sigma(comp, name="sigma"):
    spec = next(s for s in comp.model.sequences if s.name == name)
    return sequence_from_spec(comp, spec)


# --- assembly --------------------------------------------------------------------------

def test_removed_point_has_one_boundary_pair(removed):
    assert [p.name for p in removed.boundary] == ["(P,F)"]
    assert {p.name for p in removed.manifold} == {"c(k)", "d(k)"}


def test_future_ray_pairs_with_empty():
    m = model_from_json({"families": ["c"], "rel": {"family_family": [ff("c", "c", "m<n")]},
                         "tips": [{"name": "P", "fams": {"c": "true"}, "chain": {"fam": "c"}}]})
    assert [p.name for p in build_completion(m).boundary] == ["(P,0)"]


def test_finite_poset_has_empty_boundary():
    m = model_from_json({"core": ["a", "b"], "rel": {"core": [["a", "b"]]}})
    comp = build_completion(m)
    assert not comp.boundary and [p.name for p in comp.manifold] == ["a", "b"]


def test_nested_tips_give_two_pairs(a2):
    names = sorted(p.name for p in a2.boundary)
    assert names == ["(P',0)", "(P,F)"]
    inner = a2.by_name["(P',0)"].P
    outer = a2.by_name["(P,F)"].P
    assert is_true(inner.subset_of(outer)) and not is_true(outer.subset_of(inner))


def test_parametric_tips_give_pair_family(a3):
    fam = a3.by_name["(P_k,F)"]
    assert fam.parametric and fam.index.is_universe()


# --- limits -------------------------------------------------------------------------------

def test_constant_sequences_converge_to_themselves(a1):
    for pf in a1.pairs:
        if pf.parametric:
            atom = Atom(pf.name, "const-family", UPSet.finite([pf.index.minimum()]))
            lim = chron_limit(a1, PairSequence("c", [atom]))
            assert pf.index.minimum() in lim.members[pf.name]
        else:
            assert pf.name in chron_limit(a1, PairSequence("c", [Atom(pf.name, "const")]))


def test_two_limits_then_star(a1):
    seq = sigma(a1)
    assert {"p", "(P,F)"} <= set(chron_limit(a1, seq).members)
    assert chron_star(a1, seq).describe(a1) == ["p"]


def test_star_equals_limit_without_manifold_limits(removed):
    seq = sigma(removed, "up")
    assert chron_star(removed, seq) == chron_limit(removed, seq)
    assert chron_limit(removed, seq).describe(removed) == ["(P,F)"]


def test_nested_tips_limits(a2):
    seq = sigma(a2)
    assert {"p", "(P',0)"} <= set(chron_limit(a2, seq).members)
    assert chron_star(a2, seq).describe(a2) == ["p"]


def test_double_star_prefers_boundary(a2):
    seq = sigma(a2)
    assert chron_double_star(a2, seq).describe(a2) == ["(P',0)"]


def test_iteration_reaches_new_limit(a3):
    it = chron_iterate(a3, sigma(a3))
    assert "(P'_inf,0)" not in it.steps[0]
    assert it.new_at(2).describe(a3) == ["(P'_inf,0)"]
    assert it.stabilized_at == 2


def test_first_order_instance_is_constant(removed):
    it = chron_iterate(removed, sigma(removed, "up"))
    assert it.stabilized_at == 1 and it.steps[0] == it.steps[1]


@pytest.mark.parametrize("fixture_id", ["removed-point", "example-A1", "example-A2", "example-A3"])
def test_star_never_mixes(fixture_id):
    comp = completion_of(fixture_id)
    for seq in catalog(comp):
        s = chron_star(comp, seq)
        assert comp.manifold_part(s).is_empty() or comp.boundary_part(s).is_empty()


@pytest.mark.parametrize("fixture_id", ["removed-point", "example-A1", "example-A2", "example-A3"])
def test_limits_match_window_oracle(fixture_id):
    comp = completion_of(fixture_id)
    oracle = WindowOracle(comp)
    for seq in catalog(comp):
        for atoms in [seq.atoms] + [[a] for a in sub_atoms(comp, seq)]:
            got = engine_members(comp, chron_limit(comp, PairSequence("t", atoms)), oracle.k_max)
            assert got == oracle.limits(atoms), (seq.name, [a.describe() for a in atoms])


def test_manifold_limit_past_inside_lower_limit(a1):
    from seqtop.completion import _sequence_bounds

    for seq in catalog(a1):
        b = _sequence_bounds(a1, seq)
        for name in chron_limit(a1, seq).members:
            pf = a1.by_name[name]
            if pf.is_manifold and not pf.parametric:
                assert is_true(pf.P.subset_of(b.li_p)) and is_true(pf.F.subset_of(b.li_f))


ORDER = ["m<n", "m<n and n%2==0", "m<=n-2", "m%2==0 and m<n"]
CROSS = ["m<n", "m>n", "true", "m<n and n%2==0", "m<=n-2", "m<n-1", "m%2==0 and m<n", "false"]
ONE = ["true", "n>=3", "n%2==1", "false", "n<=4"]


@settings(max_examples=12, deadline=None)
@given(st.sampled_from(ORDER), st.sampled_from(["m>n", "m>n+1"]), st.sampled_from(CROSS),
       st.sampled_from(ONE), st.sampled_from(ONE))
def test_random_two_chain_models_match_oracle(cc, dd, cd, zd, cz):
    doc = {"core": ["z"], "families": ["c", "d"],
           "rel": {"family_family": [ff("c", "c", cc), ff("d", "d", dd), ff("c", "d", cd)],
                   "core_family": [{"lhs": "z", "fam": "d", "pred": zd}],
                   "family_core": [{"fam": "c", "rhs": "z", "pred": cz}]},
           "tips": [{"name": "P", "fams": {"c": "true"}, "chain": {"fam": "c"}}],
           "tifs": [{"name": "F", "fams": {"d": "true"}, "chain": {"fam": "d"}}]}
    comp = build_completion(model_from_json(doc))
    oracle = WindowOracle(comp)
    for seq in catalog(comp):
        for atoms in [seq.atoms] + [[a] for a in sub_atoms(comp, seq)]:
            got = engine_members(comp, chron_limit(comp, PairSequence("t", atoms)), oracle.k_max)
            assert got == oracle.limits(atoms)


# --- report ----------------------------------------------------------------------------------

def test_removed_point_report_passes(removed):
    rep = admissibility_report(removed.model, removed)
    assert rep.failures == [] and rep.undecided == []
    assert rep.checks["separation_chr"] == [] and rep.checks["density_star"]["dense"]


def test_a1_report_separation(a1):
    rep = admissibility_report(a1.model, a1)
    assert rep.checks["separation_chr"] and rep.checks["separation_star"] == []
    assert rep.failures == []


def test_a4_breakage_flagged(a2):
    rep = admissibility_report(a2.model, a2)
    broken = rep.checks["manifold_breakage_double_star"]
    assert {"sequence": "sigma", "lost": ["p"]} in broken
    assert "manifold_breakage_double_star" not in rep.failures  # informational


def test_assumed_tips_become_caveats(a3):
    rep = admissibility_report(a3.model, a3)
    assert any("P_k" in c for c in rep.caveats)


def test_empty_catalog_is_rejected():
    with pytest.raises(ModelError):
        admissibility_report(model_from_json({"core": []}))


def test_unknown_boundary_in_sequence():
    doc = {"families": ["c"], "rel": {"family_family": [ff("c", "c", "m<n")]},
           "tips": [{"name": "P", "fams": {"c": "true"}, "chain": {"fam": "c"}}],
           "tifs": [{"name": "F", "fams": {"c": "true"}}],
           "sequences": [{"name": "s", "components": [{"boundary": ["P", "F"]}]}]}
    m = model_from_json(doc)
    with pytest.raises(ModelError):
        sequence_from_spec(build_completion(m), m.sequences[0])


# --- export ------------------------------------------------------------------------------------

def test_exports_are_deterministic(a1):
    assert completion_to_json(a1) == completion_to_json(completion_of("example-A1"))
    dot = completion_dot(a1)
    assert dot.startswith("digraph completion") and '"(P,F)" [shape=box]' in dot
    assert completion_dot(a1) == dot
    assert '"lp(0)" -> "p"' in model_dot(a1.model)
