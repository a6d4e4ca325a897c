import pytest
from hypothesis import given, strategies as st

import oracle
from seqtop.limits import (
    FAIL,
    NOT_MET,
    PASS,
    IncompleteTableError,
    TailLimitOperator,
    antitone_meet,
    associated_operator,
    density_report,
    derived_topology,
    enumerate_admissible_below,
    is_limit_operator,
    iterate,
    iterate_raw,
    operator_from_json,
    operator_to_json,
    order_of,
    restrict_operator,
    satisfies_star_properties,
    star_maximality_counterexamples,
    star_operator,
    validate_operator,
    verify_section3,
)
from seqtop.topology import (
    FinTopology,
    GroundSet,
    PreconditionError,
    all_topologies,
    separating_refinement,
    valid_domains,
)

G2 = GroundSet.of("ab")
G3 = GroundSet.of("abc")
SIERP = FinTopology.from_opens(GroundSet.of("pq"), [0, 1, 3])
CRUST = FinTopology.from_opens(GroundSet.of("pqr"), [0, 1, 3, 7])
CASCADE = TailLimitOperator.from_singletons(G3, {"a": "ab", "b": "bc", "c": "c"})
CASCADE2 = TailLimitOperator.from_singletons(G3, {"a": "ab", "b": "bc", "c": "bc"})
PRUNED = TailLimitOperator.from_function(G2, lambda a: 0 if a == 3 else 3)


def as_dict(op):
    g = op.ground
    return {frozenset(g.labels_of(a)): frozenset(g.labels_of(op.table[a])) for a in op.profiles()}


def fam(tau):
    return frozenset(frozenset(tau.ground.labels_of(u)) for u in tau.opens)


# --- validation ------------------------------------------------------------------

def test_constant_operator_is_valid():
    assert validate_operator(TailLimitOperator.from_function(G3, lambda a: G3.full)).valid


def test_identity_operator_is_not_antitone():
    # same shape as the two-point violation below, scaled to three points
    rep = validate_operator(TailLimitOperator.from_function(G3, lambda a: a))
    assert not rep.valid and not rep.coherence_violations
    assert (["a"], ["a", "b"]) in rep.antitone_violations


def test_non_antitone_operator_reported():
    op = TailLimitOperator(G2, (0, 1, 2, 3))
    rep = validate_operator(op)
    assert not rep.valid
    assert (["a"], ["a", "b"]) in rep.antitone_violations


def test_incoherent_flagged_only_when_declared():
    op = TailLimitOperator(G2, (0, 0, 2, 0), coherent=True)
    assert validate_operator(op).coherence_violations == ["a"]
    assert validate_operator(TailLimitOperator(G2, (0, 0, 2, 0), coherent=False)).valid


def test_json_autofill_is_explicit():
    doc = {"points": ["a", "b", "c"], "table": {"a": ["a", "b"], "b": ["b", "c"], "c": ["c"]}}
    with pytest.raises(IncompleteTableError):
        operator_from_json(doc)
    op = operator_from_json({**doc, "autofill": "antitone-max"})
    assert op == CASCADE
    assert operator_from_json(operator_to_json(op)) == op


# --- derived topology and associated operator -------------------------------------

def test_derived_topology_examples():
    assert derived_topology(TailLimitOperator.from_function(G3, lambda a: a)) == FinTopology.discrete(G3)
    assert derived_topology(TailLimitOperator.from_function(G3, lambda a: G3.full)) == FinTopology.indiscrete(G3)
    assert derived_topology(CASCADE) == FinTopology.from_opens(G3, [0, G3.mask("a"), G3.mask("ab"), G3.full])


def test_associated_operator_examples():
    disc = associated_operator(FinTopology.discrete(G3))
    assert all(disc.table[a] == (a if bin(a).count("1") == 1 else 0) for a in disc.profiles())
    indisc = associated_operator(FinTopology.indiscrete(G3))
    assert set(indisc.table[1:]) == {G3.full}
    s = associated_operator(SIERP)
    g = SIERP.ground
    assert s.table[g.mask("p")] == g.mask("pq")
    assert s.table[g.mask("q")] == g.mask("q")
    assert s.table[g.mask("pq")] == g.mask("q")


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_round_trip_and_first_order_on_all_topologies(n):
    g = GroundSet.of("abcd"[:n])
    for tau in all_topologies(g):
        l_tau = associated_operator(tau)
        assert derived_topology(l_tau) == tau
        assert str(order_of(l_tau)) == "FirstOrder"


def test_associated_matches_oracle():
    for tau in all_topologies(G3):
        assert as_dict(associated_operator(tau)) == oracle.associated("abc", fam(tau))


# --- restriction -----------------------------------------------------------------

def test_restrict_full_ground_is_identity():
    assert restrict_operator(CASCADE, G3.full) == CASCADE


def test_restrict_examples():
    s = restrict_operator(associated_operator(SIERP), ["p"])
    assert s.ground.labels == ("p",) and s.table[1] == 1
    c = restrict_operator(CASCADE, ["a"])
    assert c.table[1] == 1


def test_restrict_requires_open():
    with pytest.raises(PreconditionError):
        restrict_operator(CASCADE, ["c"])


# --- iteration and order ---------------------------------------------------------

def test_cascade_iteration_step():
    chain = iterate(CASCADE)
    assert chain[0].table[G3.mask("a")] == G3.mask("ab")
    assert chain[1].table[G3.mask("a")] == G3.full


def test_identity_stabilizes_at_first_step():
    assert len(iterate(TailLimitOperator.from_function(G3, lambda a: a))) == 1


def test_iterate_requires_coherence():
    with pytest.raises(PreconditionError):
        iterate(TailLimitOperator(G2, (0, 0, 2, 0), coherent=False))


def test_iterate_matches_oracle():
    for op in (CASCADE, CASCADE2):
        mine = [as_dict(x) for x in iterate_raw(op, 4)]
        ref = oracle.iterate("abc", as_dict(op), len(mine))
        assert mine == ref


def test_orders():
    assert str(order_of(CASCADE2)) == "KthOrder(2)"
    assert str(order_of(PRUNED)) == "NotAnyOrder"
    # intersection-filled cascade: the alternating a/c profile can never recover c
    assert str(order_of(CASCADE)) == "NotAnyOrder"
    assert CASCADE.table[G3.mask("ac")] == 0


# --- starred operator --------------------------------------------------------------

def test_star_sierpinski():
    g = SIERP.ground
    s = star_operator(associated_operator(SIERP), ["p"])
    assert s.table[g.mask("p")] == g.mask("p")
    assert s.table[g.mask("q")] == g.mask("q")
    assert s.table[g.mask("pq")] == 0
    assert derived_topology(s) == FinTopology.discrete(g) == separating_refinement(SIERP, g.mask("p"))


def test_star_empty_domain_is_identity():
    assert star_operator(CASCADE2, 0) == CASCADE2


def test_star_crust_matches_refinement():
    l_tau = associated_operator(CRUST)
    d = CRUST.ground.mask("p")
    assert derived_topology(star_operator(l_tau, d)) == separating_refinement(CRUST, d)


def test_star_invalid_domain():
    with pytest.raises(PreconditionError):
        star_operator(CASCADE2, ["b"])


def test_star_matches_oracle():
    for op in (CASCADE, CASCADE2):
        assert as_dict(star_operator(op, ["a"])) == oracle.star(as_dict(op), {"a"})


# --- theorem suite -------------------------------------------------------------------

def test_first_order_suite_passes_equality():
    rep = verify_section3(associated_operator(CRUST), CRUST.ground.mask("p"))
    assert rep.status_of("first-order-equality") == PASS
    assert not rep.failures


def test_second_order_instance_for_starred_equality():
    rep = verify_section3(CASCADE2, ["a"])
    assert rep.status_of("starred-associated-equality") == PASS
    assert rep.status_of("first-order-equality") == NOT_MET
    assert not rep.failures


def test_cascade_suite_reports_applicability():
    rep = verify_section3(CASCADE, ["a"])
    statuses = {c.claim: c.status for c in rep.claims}
    assert statuses["order-stabilizes"] == NOT_MET
    assert FAIL not in statuses.values()


def test_maximality_witness_agrees_with_enumeration_on_two_points():
    from itertools import product
    for raw in product(range(4), repeat=3):
        op = antitone_meet(G2, raw, coherent=False)
        tau = derived_topology(op)
        for d in valid_domains(tau):
            star = star_operator(op, d)
            everything = enumerate_admissible_below(op, d)
            assert star in everything
            assert all(c <= star for c in everything)
            assert star_maximality_counterexamples(op, d) == []


# --- properties ------------------------------------------------------------------

@st.composite
def antitone_ops(draw, max_points=5, coherent=None):
    n = draw(st.integers(1, max_points))
    g = GroundSet.of([f"x{i}" for i in range(n)])
    raw = draw(st.lists(st.integers(0, g.full), min_size=g.full, max_size=g.full))
    coh = draw(st.booleans()) if coherent is None else coherent
    if coh:
        raw = [r | a if a & (a - 1) == 0 else r for a, r in enumerate(raw, 1)]
    return antitone_meet(g, raw, coherent=coh)


@given(antitone_ops())
def test_antitone_meet_is_a_limit_operator(op):
    assert is_limit_operator(op)
    assert validate_operator(op).valid or not op.coherent


@given(antitone_ops(max_points=4))
def test_limits_converge_in_derived_topology(op):
    tau = derived_topology(op)
    assert tau.axioms_hold()
    g = op.ground
    ref = oracle.derived_opens(g.labels, as_dict(op))
    assert fam(tau) == ref
    mn = tau.min_nbhds
    for a in op.profiles():
        for p in range(g.size):
            if op.table[a] >> p & 1:
                assert a & ~mn[p] == 0


@given(antitone_ops(max_points=5, coherent=True))
def test_iterates_monotone_and_below_associated(op):
    l_tau = associated_operator(derived_topology(op))
    chain = iterate(op)
    assert len(chain) <= op.ground.size + 1
    for lo, hi in zip(chain, chain[1:]):
        assert lo <= hi
    assert all(lk <= l_tau for lk in chain)


@given(antitone_ops(), st.data())
def test_star_is_antitone_and_admissible(op, data):
    tau = derived_topology(op)
    d = data.draw(st.sampled_from(valid_domains(tau)))
    s = star_operator(op, d)
    assert is_limit_operator(s)
    assert satisfies_star_properties(op, s, d)
    assert tau <= derived_topology(s)


@given(antitone_ops(max_points=4), st.data())
def test_suite_has_no_failures(op, data):
    tau = derived_topology(op)
    d = data.draw(st.sampled_from(valid_domains(tau)))
    assert verify_section3(op, d).failures == []


@given(antitone_ops(max_points=4), antitone_ops(max_points=4))
def test_pointwise_smaller_gives_finer_topology(op, other):
    if other.ground != op.ground:
        return
    meet = TailLimitOperator(op.ground, tuple(x & y for x, y in zip(op.table, other.table)), coherent=False)
    assert derived_topology(op) <= derived_topology(meet)


def test_density_report_sierpinski():
    rep = density_report(SIERP, ["p"])
    assert rep.reached_from_domain and rep.dense and not rep.dense_after_refinement
    assert rep.consistent
