"""Pure-Python bitmask kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and the same output order; ``seqtop.kernels`` picks one at import time.
Subsets of an ``n``-point ground set are ints, bit ``i`` standing for point ``i``.
"""

from __future__ import annotations


def min_nbhds_from_subbasis(n: int, subbasis: list[int]) -> list[int]:
    full = (1 << n) - 1
    out = []
    for x in range(n):
        bit = 1 << x
        acc = full
        for s in subbasis:
            if s & bit:
                acc &= s
        out.append(acc)
    return out


def opens_from_min_nbhds(n: int, mn: list[int]) -> list[int]:
    seen = {0}
    for x in range(n):
        m = mn[x]
        seen |= {s | m for s in seen}
    return sorted(seen)


def min_nbhds_from_opens(n: int, opens: list[int]) -> list[int]:
    return min_nbhds_from_subbasis(n, opens)


def enumerate_min_nbhds(n: int) -> list[tuple[int, ...]]:
    """All topologies on ``n`` labeled points, as minimal-neighbourhood vectors.

    A vector ``mn`` is valid iff ``x in mn[x]`` and ``y in mn[x]`` implies
    ``mn[y] <= mn[x]`` (transitivity of the specialization preorder).
    Output is sorted lexicographically.
    """
    out: list[tuple[int, ...]] = []
    if n == 0:
        return [()]
    choices = []
    for x in range(n):
        bit = 1 << x
        others = [1 << y for y in range(n) if y != x]
        opts = []
        for k in range(1 << (n - 1)):
            m = bit
            for j, ob in enumerate(others):
                if k >> j & 1:
                    m |= ob
            opts.append(m)
        choices.append(sorted(opts))
    cur = [0] * n

    def consistent(i: int) -> bool:
        # check pairs involving point i against 0..i
        mi = cur[i]
        for y in range(i + 1):
            my = cur[y]
            if mi >> y & 1 and (my & ~mi):
                return False
            if my >> i & 1 and (mi & ~my):
                return False
        return True

    def rec(i: int) -> None:
        if i == n:
            out.append(tuple(cur))
            return
        for m in choices[i]:
            cur[i] = m
            if consistent(i):
                rec(i + 1)

    rec(0)
    out.sort()
    return out


def derived_closed_sets(n: int, table: list[int]) -> list[int]:
    """Closed sets of the topology derived from a tail-profile table.

    ``table[A]`` is the limit set of profile ``A`` (index 0 unused).  ``C`` is
    closed iff ``table[A] <= C`` for every nonempty ``A <= C``.
    """
    out = []
    for c in range(1 << n):
        ok = True
        a = c
        while a:
            if table[a] & ~c:
                ok = False
                break
            a = (a - 1) & c
        if ok:
            out.append(c)
    return out


def asep_holds(n: int, d: int, mn_base: list[int], mn_cand: list[int]) -> bool:
    """Cross T2 separation of ``d`` from its complement.

    Separating neighbourhoods may be shrunk to minimal ones, so the condition is
    ``mn_base[p] & mn_cand[q] == 0`` for all ``p in d``, ``q not in d``.
    """
    for p in range(n):
        if not d >> p & 1:
            continue
        up = mn_base[p]
        for q in range(n):
            if d >> q & 1:
                continue
            if up & mn_cand[q]:
                return False
    return True


def filter_finer_separating(n: int, d: int, mn_base: list[int],
                            candidates: list[tuple[int, ...]]) -> list[int]:
    """Indices of candidates finer than the base topology that satisfy A_Sep."""
    out = []
    for idx, mn in enumerate(candidates):
        finer = True
        for x in range(n):
            if mn[x] & ~mn_base[x]:
                finer = False
                break
        if finer and asep_holds(n, d, mn_base, list(mn)):
            out.append(idx)
    return out
