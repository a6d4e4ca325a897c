"""Brute-force limit computation on a finite window of a family model.

Points are truncated to indices below ``2 * window``; only points below
``window`` contribute candidate pasts and futures, so every candidate keeps
the members near its own index that tell it apart.  A point with index ``i``
belongs to the lower (upper) limit of a strand when it lies in every (some)
term ``n`` of the strand with ``n`` in ``[i + start, i + start + length)``;
that tail is long enough once every relation's threshold and period are
small compared with ``start`` and ``length``.
"""

from seqtop.completion import Atom


class WindowOracle:
    def __init__(self, comp, window=40, start=16, length=12, k_max=6):
        self.comp = comp
        self.model = comp.model
        self.window = window
        self.start = start
        self.length = length
        self.k_max = k_max
        self.points = list(self.model.points(2 * window))
        pre = self.model.precedes
        near = [x for x in self.points if (x[1] or 0) < window]
        self.past = {x: frozenset(q for q in self.points if pre(q, x)) for x in near}
        self.future = {x: frozenset(q for q in self.points if pre(x, q)) for x in near}
        self.ips = set(self.past.values()) | self._designated(self.model.tips)
        self.ifs = set(self.future.values()) | self._designated(self.model.tifs)
        self.pairs = {}
        for pf in comp.pairs:
            if pf.parametric:
                for k in pf.index.elements(k_max):
                    self.pairs[(pf.name, k)] = self._pair(pf, k)
            else:
                self.pairs[(pf.name, None)] = self._pair(pf, None)

    def _members(self, s):
        return frozenset(p for p in self.points if s.contains(*p))

    def _pair(self, pf, k):
        if k is None:
            return self._members(pf.P), self._members(pf.F)
        return self._members(pf.P.substitute("k", k)), self._members(pf.F.substitute("k", k))

    def _designated(self, ds):
        out = set()
        for d in ds:
            if d.parametric:
                out |= {self._members(d.at(k)) for k in d.index.elements(self.k_max)}
            else:
                out.add(self._members(d.members))
        return out

    def _bounds(self, atom: Atom):
        """(li_p, ls_p, li_f, ls_f) of one atom as explicit sets on the window."""
        if atom.kind == "const":
            p, f = self.pairs[(atom.pair, None)]
            return p, p, f, f
        if atom.kind == "const-family":
            (k,) = atom.index.elements(atom.index.threshold + 1)
            p, f = self._pair(self.comp.by_name[atom.pair], k)
            return p, p, f, f
        pf = self.comp.by_name[atom.pair]
        fam = atom.pair[:-3] if pf.is_manifold else None
        cache = {}

        def term(n):
            if n not in cache:
                if fam is not None:
                    cache[n] = (frozenset(q for q in self.points if self.model.precedes(q, (fam, n))),
                                frozenset(q for q in self.points if self.model.precedes((fam, n), q)))
                else:
                    cache[n] = self._pair(pf, n)
            return cache[n]

        out = [set(), set(), set(), set()]
        for q in self.points:
            i = q[1] or 0
            ns = [n for n in range(i + self.start, i + self.start + self.length) if n in atom.index]
            for side in (0, 1):
                hits = [q in term(n)[side] for n in ns]
                if hits and all(hits):
                    out[2 * side].add(q)
                if any(hits):
                    out[2 * side + 1].add(q)
        return tuple(frozenset(s) for s in out)

    @staticmethod
    def _side(comp, li, ls, candidates):
        if not comp:
            return True
        return comp <= li and not any(comp < q <= ls for q in candidates)

    def limits(self, atoms):
        bs = [self._bounds(a) for a in atoms]
        li_p = frozenset.intersection(*(b[0] for b in bs))
        ls_p = frozenset.union(*(b[1] for b in bs))
        li_f = frozenset.intersection(*(b[2] for b in bs))
        ls_f = frozenset.union(*(b[3] for b in bs))
        return {key for key, (p, f) in self.pairs.items()
                if self._side(p, li_p, ls_p, self.ips) and self._side(f, li_f, ls_f, self.ifs)}
