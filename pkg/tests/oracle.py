"""Independent reference implementations on frozensets, used only by tests.

Nothing here touches bitmasks or the package kernels, so agreement with the
package is evidence rather than tautology.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import chain, combinations


def powerset(xs):
    xs = list(xs)
    return [frozenset(c) for c in chain.from_iterable(combinations(xs, r) for r in range(len(xs) + 1))]


def close_family(points, family):
    fam = {frozenset(), frozenset(points)} | {frozenset(f) for f in family}
    changed = True
    while changed:
        changed = False
        cur = list(fam)
        for a in cur:
            for b in cur:
                for c in (a | b, a & b):
                    if c not in fam:
                        fam.add(c)
                        changed = True
    return frozenset(fam)


def is_topology(points, fam):
    x = frozenset(points)
    if frozenset() not in fam or x not in fam:
        return False
    return all(a | b in fam and a & b in fam for a in fam for b in fam)


@lru_cache(maxsize=None)
def all_topologies(points: tuple):
    """Every topology on ``points`` by brute force over families of proper nonempty subsets."""
    x = frozenset(points)
    middle = [s for s in powerset(points) if s and s != x]
    out = []
    for bits in range(1 << len(middle)):
        fam = {frozenset(), x} | {middle[i] for i in range(len(middle)) if bits >> i & 1}
        if is_topology(points, fam):
            out.append(frozenset(fam))
    return out


def min_nbhd(fam, p):
    acc = None
    for u in fam:
        if p in u:
            acc = u if acc is None else acc & u
    return acc


def a_sep(points, tau, tau_star, d):
    for p in d:
        for q in set(points) - set(d):
            if not any(p in u and q in v and not (u & v) for u in tau for v in tau_star):
                return False
    return True


def separating_refinement(points, tau, d):
    x = frozenset(points)
    return close_family(points, set(tau) | {x - k for k in powerset(d)})


def minimal_separating(points, tau, d):
    """All minimal topologies finer than ``tau`` satisfying A_Sep (brute force)."""
    cands = [t for t in all_topologies(tuple(points)) if tau <= t and a_sep(points, tau, t, d)]
    return [t for t in cands if not any(s < t for s in cands)], cands


def closure(points, fam, s):
    s = frozenset(s)
    closed = [frozenset(points) - u for u in fam]
    acc = frozenset(points)
    for c in closed:
        if s <= c:
            acc &= c
    return acc


# --- limit operators as dicts frozenset -> frozenset ---------------------------

def nonempty_subsets(s):
    return [b for b in powerset(s) if b]


def derived_closed(points, op):
    return [c for c in powerset(points) if all(op[a] <= c for a in nonempty_subsets(c))]


def derived_opens(points, op):
    x = frozenset(points)
    return frozenset(x - c for c in derived_closed(points, op))


def associated(points, fam):
    return {a: frozenset(p for p in points if a <= min_nbhd(fam, p)) for a in nonempty_subsets(points)}


def iterate(points, op, steps):
    chain_ = [dict(op)]
    reached = {a: op[a] for a in op}
    for _ in range(steps - 1):
        nxt = {}
        for a in op:
            acc = frozenset()
            for b in nonempty_subsets(reached[a]):
                acc |= op[b]
            nxt[a] = acc
        chain_.append(nxt)
        reached = {a: reached[a] | nxt[a] for a in op}
    return chain_


def star(op, d):
    d = frozenset(d)
    out = {}
    for a, la in op.items():
        hit = any(op[b] & d for b in nonempty_subsets(a))
        out[a] = la & d if hit else la
    return out
