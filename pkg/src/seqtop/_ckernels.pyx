# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the kernels in ``_pykernels``."""

from libc.stdlib cimport malloc, free


def min_nbhds_from_subbasis(int n, list subbasis):
    cdef unsigned long long full = (1ULL << n) - 1
    cdef unsigned long long acc, s, bit
    cdef int x
    out = []
    for x in range(n):
        bit = 1ULL << x
        acc = full
        for s_obj in subbasis:
            s = s_obj
            if s & bit:
                acc &= s
        out.append(acc)
    return out


def opens_from_min_nbhds(int n, list mn):
    seen = {0}
    cdef int x
    for x in range(n):
        m = mn[x]
        seen |= {s | m for s in seen}
    return sorted(seen)


def min_nbhds_from_opens(int n, list opens):
    return min_nbhds_from_subbasis(n, opens)


cdef int _consistent(unsigned int *cur, int i):
    cdef unsigned int mi = cur[i], my
    cdef int y
    for y in range(i + 1):
        my = cur[y]
        if (mi >> y) & 1 and (my & ~mi):
            return 0
        if (my >> i) & 1 and (mi & ~my):
            return 0
    return 1


def enumerate_min_nbhds(int n):
    if n == 0:
        return [()]
    cdef int nopt = 1 << (n - 1)
    cdef unsigned int *opts = <unsigned int *> malloc(n * nopt * sizeof(unsigned int))
    cdef unsigned int *cur = <unsigned int *> malloc(n * sizeof(unsigned int))
    cdef int *pos = <int *> malloc(n * sizeof(int))
    cdef int x, y, j, k, i
    cdef unsigned int m
    out = []
    try:
        for x in range(n):
            row = []
            for k in range(nopt):
                m = 1u << x
                j = 0
                for y in range(n):
                    if y == x:
                        continue
                    if (k >> j) & 1:
                        m |= 1u << y
                    j += 1
                row.append(m)
            row.sort()
            for k in range(nopt):
                opts[x * nopt + k] = row[k]
        i = 0
        pos[0] = -1
        while i >= 0:
            pos[i] += 1
            if pos[i] >= nopt:
                i -= 1
                continue
            cur[i] = opts[i * nopt + pos[i]]
            if not _consistent(cur, i):
                continue
            if i == n - 1:
                out.append(tuple([cur[y] for y in range(n)]))
            else:
                i += 1
                pos[i] = -1
    finally:
        free(opts)
        free(cur)
        free(pos)
    out.sort()
    return out


def derived_closed_sets(int n, list table):
    cdef int size = 1 << n
    cdef unsigned int *tab = <unsigned int *> malloc(size * sizeof(unsigned int))
    cdef unsigned int c, a
    cdef int ok
    out = []
    try:
        for c in range(size):
            tab[c] = table[c]
        for c in range(size):
            ok = 1
            a = c
            while a:
                if tab[a] & ~c:
                    ok = 0
                    break
                a = (a - 1) & c
            if ok:
                out.append(c)
    finally:
        free(tab)
    return out


def asep_holds(int n, unsigned long long d, list mn_base, list mn_cand):
    cdef int p, q
    cdef unsigned long long up, mq
    for p in range(n):
        if not (d >> p) & 1:
            continue
        up = mn_base[p]
        for q in range(n):
            if (d >> q) & 1:
                continue
            mq = mn_cand[q]
            if up & mq:
                return False
    return True


def filter_finer_separating(int n, unsigned long long d, list mn_base, list candidates):
    cdef unsigned long long base[32]
    cdef unsigned long long cand[32]
    cdef int x, p, q, idx, finer, sep
    for x in range(n):
        base[x] = mn_base[x]
    out = []
    idx = 0
    for mn in candidates:
        finer = 1
        for x in range(n):
            cand[x] = mn[x]
            if cand[x] & ~base[x]:
                finer = 0
        if finer:
            sep = 1
            for p in range(n):
                if not (d >> p) & 1:
                    continue
                for q in range(n):
                    if (d >> q) & 1:
                        continue
                    if base[p] & cand[q]:
                        sep = 0
                        break
                if not sep:
                    break
            if sep:
                out.append(idx)
        idx += 1
    return out
