"""Index predicates over natural-number variables and their exact quantifier elimination.

Atoms are ``x >= c``, ``x <= c``, ``x - y >= c``, ``x - y <= c`` and
``x % k == r``, combined with ``and``/``or``/``not``.  Sugar accepted by the
parser: ``>``, ``<``, ``==``, ``!=``, a variable on the right-hand side, and
``true``/``false``.

Decisions rest on one region lemma.  Let ``C`` bound the absolute values of
all constants and ``K`` be the lcm of all moduli.  Sort the coordinates of a
point together with 0; shrinking any gap larger than ``C + K`` by a multiple
of ``K`` (keeping it above ``C``) preserves every atom.  Hence

* a one-variable predicate is periodic with period ``K`` from ``C + 1`` on;
* a witness for ``exists y`` may be taken at most ``max(free) + C + K``;
* ``y`` beyond ``max(free) + C`` matters only through ``y mod K``, so the
  infinitely-often / all-but-finitely-often quantifiers inspect one window
  of ``K`` consecutive values;
* eliminating a variable leaves a formula that is region-invariant for
  ``(2C + K, K)``.

Every ``Formula`` carries such a pair ``(C, K)``; all decisions sample only
inside the box it licenses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence

from .upset import UPSet, lcm

VARIABLES = ("k", "m", "n")


class PredicateSyntaxError(ValueError):
    pass


# --- AST ------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    kind: str  # ge, le, dge, dle, mod
    x: str
    y: str | None = None
    c: int = 0
    k: int = 1

    def free(self) -> set[str]:
        return {self.x} | ({self.y} if self.y else set())

    def source(self) -> str:
        if self.kind == "ge":
            return f"{self.x}>={self.c}"
        if self.kind == "le":
            return f"{self.x}<={self.c}"
        if self.kind == "dge":
            return f"{self.x}-{self.y}>={self.c}"
        if self.kind == "dle":
            return f"{self.x}-{self.y}<={self.c}"
        return f"{self.x}%{self.k}=={self.c}"

    def py(self) -> str:
        if self.kind == "ge":
            return f"{self.x}>={self.c}"
        if self.kind == "le":
            return f"{self.x}<={self.c}"
        if self.kind == "dge":
            return f"{self.x}-{self.y}>={self.c}"
        if self.kind == "dle":
            return f"{self.x}-{self.y}<={self.c}"
        return f"{self.x}%{self.k}=={self.c}"


@dataclass(frozen=True)
class Const:
    value: bool

    def free(self) -> set[str]:
        return set()

    def source(self) -> str:
        return "true" if self.value else "false"

    def py(self) -> str:
        return "True" if self.value else "False"


@dataclass(frozen=True)
class Not:
    arg: object

    def free(self) -> set[str]:
        return self.arg.free()

    def source(self) -> str:
        return f"not ({self.arg.source()})"

    def py(self) -> str:
        return f"(not {self.arg.py()})"


@dataclass(frozen=True)
class Junction:
    op: str  # and / or
    args: tuple

    def free(self) -> set[str]:
        out: set[str] = set()
        for a in self.args:
            out |= a.free()
        return out

    def source(self) -> str:
        return f" {self.op} ".join(f"({a.source()})" for a in self.args)

    def py(self) -> str:
        return "(" + f" {self.op} ".join(a.py() for a in self.args) + ")"


def _walk_atoms(node) -> list[Atom]:
    if isinstance(node, Atom):
        return [node]
    if isinstance(node, Not):
        return _walk_atoms(node.arg)
    if isinstance(node, Junction):
        return [a for arg in node.args for a in _walk_atoms(arg)]
    return []


# --- parser ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(>=|<=|==|!=|&&|\|\||[()<>=!%&|+-]|\d+|[A-Za-z_]\w*)")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.replace("≥", ">=").replace("≤", "<=").replace("−", "-")
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise PredicateSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, allowed: Sequence[str]) -> None:
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.allowed = set(allowed)

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expect: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expect is not None and tok != expect):
            raise PredicateSyntaxError(f"expected {expect or 'token'} in {self.text!r}, got {tok!r}")
        self.i += 1
        return tok

    def parse(self):
        node = self.disj()
        if self.peek() is not None:
            raise PredicateSyntaxError(f"trailing input {self.peek()!r} in {self.text!r}")
        return node

    def disj(self):
        args = [self.conj()]
        while self.peek() in ("or", "||", "|"):
            self.take()
            args.append(self.conj())
        return args[0] if len(args) == 1 else Junction("or", tuple(args))

    def conj(self):
        args = [self.unary()]
        while self.peek() in ("and", "&&", "&"):
            self.take()
            args.append(self.unary())
        return args[0] if len(args) == 1 else Junction("and", tuple(args))

    def unary(self):
        tok = self.peek()
        if tok in ("not", "!"):
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            node = self.disj()
            self.take(")")
            return node
        if tok in ("true", "false"):
            self.take()
            return Const(tok == "true")
        return self.comparison()

    def var(self) -> str:
        tok = self.take()
        if tok not in self.allowed:
            raise PredicateSyntaxError(f"unknown variable {tok!r} in {self.text!r} (allowed: {sorted(self.allowed)})")
        return tok

    def number(self) -> int:
        sign = 1
        while self.peek() in ("-", "+"):
            if self.take() == "-":
                sign = -sign
        tok = self.take()
        if not tok.isdigit():
            raise PredicateSyntaxError(f"expected integer in {self.text!r}, got {tok!r}")
        return sign * int(tok)

    def comparison(self):
        x = self.var()
        y = None
        if self.peek() == "%":
            self.take()
            k = self.number()
            if k <= 0:
                raise PredicateSyntaxError("modulus must be positive")
            op = self.take()
            if op not in ("==", "=", "!="):
                raise PredicateSyntaxError(f"congruence needs == or != in {self.text!r}")
            r = self.number()
            atom = Atom("mod", x, c=r % k, k=k)
            return Not(atom) if op == "!=" else atom
        if self.peek() == "-" and self.i + 1 < len(self.toks) and self.toks[self.i + 1] in self.allowed:
            self.take()
            y = self.var()
        op = self.take()
        if op not in (">=", "<=", ">", "<", "==", "=", "!="):
            raise PredicateSyntaxError(f"expected comparison in {self.text!r}, got {op!r}")
        if self.peek() in self.allowed:
            if y is not None:
                raise PredicateSyntaxError(f"difference against a variable is not an atom: {self.text!r}")
            y = self.var()
            c = 0
            if self.peek() in ("+", "-") and self.i + 1 < len(self.toks) and self.toks[self.i + 1].isdigit():
                c = self.number()
                # x op y + c  ->  x - y op c
        else:
            c = self.number()
        return _make(x, y, op, c)


def _make(x: str, y: str | None, op: str, c: int):
    lo, hi = ("dge", "dle") if y else ("ge", "le")

    def ge(v: int) -> Atom:
        return Atom(lo, x, y, v)

    def le(v: int) -> Atom:
        return Atom(hi, x, y, v)

    if op == ">=":
        return ge(c)
    if op == "<=":
        return le(c)
    if op == ">":
        return ge(c + 1)
    if op == "<":
        return le(c - 1)
    eq = Junction("and", (ge(c), le(c)))
    return eq if op in ("==", "=") else Not(eq)


# --- formulas -------------------------------------------------------------------

def _project(fn: Callable[..., bool], own: tuple[str, ...], names: tuple[str, ...]) -> Callable[..., bool]:
    """``fn`` over ``own`` as a function of the (super)tuple ``names``."""
    if own == names:
        return fn
    idx = [names.index(v) for v in own]
    if not idx:
        return lambda *a: fn()
    if len(idx) == 1:
        (i,) = idx
        return lambda *a: fn(a[i])
    if len(idx) == 2:
        i, j = idx
        return lambda *a: fn(a[i], a[j])
    return lambda *a: fn(*[a[i] for i in idx])


@dataclass(frozen=True)
class Formula:
    """A predicate over ``vars`` (sorted) that is region-invariant for ``(bound, modulus)``."""

    vars: tuple[str, ...]
    fn: Callable[..., bool]
    bound: int
    modulus: int
    text: str = ""

    def __call__(self, *args: int) -> bool:
        return bool(self.fn(*args))

    def at(self, **env: int) -> bool:
        return bool(self.fn(*(env[v] for v in self.vars)))

    @property
    def arity(self) -> int:
        return len(self.vars)

    # boolean structure --------------------------------------------------------

    def _lift(self, other: "Formula", conj: bool, text: str) -> "Formula":
        names = tuple(sorted(set(self.vars) | set(other.vars)))
        fa, fb = _project(self.fn, self.vars, names), _project(other.fn, other.vars, names)
        if conj:
            def fn(*args: int) -> bool:
                return bool(fa(*args)) and bool(fb(*args))
        else:
            def fn(*args: int) -> bool:
                return bool(fa(*args)) or bool(fb(*args))

        return Formula(names, fn, max(self.bound, other.bound), lcm(self.modulus, other.modulus), text)

    def __and__(self, other: "Formula") -> "Formula":
        return self._lift(other, True, f"({self.text}) and ({other.text})")

    def __or__(self, other: "Formula") -> "Formula":
        return self._lift(other, False, f"({self.text}) or ({other.text})")

    def __invert__(self) -> "Formula":
        f = self.fn
        return Formula(self.vars, lambda *a: not f(*a), self.bound, self.modulus, f"not ({self.text})")

    def implies(self, other: "Formula") -> "Formula":
        return (~self) | other

    def rename(self, mapping: dict[str, str]) -> "Formula":
        new = [mapping.get(v, v) for v in self.vars]
        if len(set(new)) != len(new):
            raise ValueError("renaming would merge variables")
        order = sorted(range(len(new)), key=lambda i: new[i])
        names = tuple(new[i] for i in order)
        back = [order.index(i) for i in range(len(new))]
        f = self.fn
        if back == list(range(len(back))):
            fn = f
        elif len(back) == 2:
            fn = lambda a, b: f(b, a)  # noqa: E731
        else:
            fn = lambda *a: f(*[a[i] for i in back])  # noqa: E731
        return Formula(names, fn, self.bound, self.modulus, self.text)

    def substitute(self, var: str, value: int) -> "Formula":
        if var not in self.vars:
            return self
        if value < 0:
            raise ValueError("indices are natural numbers")
        pos = self.vars.index(var)
        names = self.vars[:pos] + self.vars[pos + 1:]
        f = self.fn

        def fn(*args: int) -> bool:
            return f(*args[:pos], value, *args[pos:])

        return _materialize(Formula(names, fn, self.bound + value, self.modulus, f"{self.text}[{var}={value}]"))

    # quantifiers ----------------------------------------------------------------

    def exists(self, var: str) -> "Formula":
        return _eliminate(self, var, "exists")

    def forall(self, var: str) -> "Formula":
        return ~_eliminate(~self, var, "exists")

    def infinitely_many(self, var: str) -> "Formula":
        return _eliminate(self, var, "inf")

    def almost_all(self, var: str) -> "Formula":
        return _eliminate(self, var, "cofinite")

    # decisions -------------------------------------------------------------------

    def to_upset(self) -> UPSet:
        if self.arity != 1:
            raise ValueError(f"to_upset needs one free variable, have {self.vars}")
        return UPSet.from_fn(self.fn, self.bound + 1, self.modulus)

    def truth(self) -> bool:
        if self.arity != 0:
            raise ValueError(f"closed formula expected, free variables {self.vars}")
        return bool(self.fn())

    def valid(self) -> bool:
        return all(self.fn(*p) for p in box_points(self.arity, self.bound, self.modulus))

    def satisfiable(self) -> bool:
        return any(self.fn(*p) for p in box_points(self.arity, self.bound, self.modulus))

    def entails(self, other: "Formula") -> bool:
        return self.implies(other).valid()


def box_points(arity: int, bound: int, modulus: int):
    """Representatives of every region: coordinates up to ``arity * (bound + modulus)``."""
    side = arity * (bound + modulus) + 1
    return product(range(side), repeat=arity)


def compress(point: Sequence[int], bound: int, modulus: int) -> tuple[int, ...]:
    """Map a point to its region representative inside the sampling box."""
    vals = sorted(set(point) | {0})
    new = {0: 0}
    prev_old = prev_new = 0
    for v in vals[1:]:
        gap = v - prev_old
        if gap > bound + modulus:
            gap = bound + 1 + (gap - bound - 1) % modulus
        prev_new += gap
        prev_old = v
        new[v] = prev_new
    return tuple(new[v] for v in point)


def _const(value: bool) -> Formula:
    return Formula((), lambda: value, 0, 1, "true" if value else "false")


def _from_upset(var: str, s: UPSet) -> Formula:
    # periodic from the threshold on, i.e. from bound + 1 with bound = threshold - 1
    return Formula((var,), s.__contains__, max(s.threshold - 1, 0), s.period, s.to_predicate(var))


def _divisors(k: int) -> list[int]:
    return [d for d in range(1, k + 1) if k % d == 0]


def _shrink_table(table: list[list[bool]], bound: int, modulus: int) -> tuple[int, int]:
    """Smallest ``(C0, K0)`` with ``C0 <= bound``, ``K0 | modulus`` the table is invariant for."""
    side = len(table)
    cells = [(a, b) for a in range(side) for b in range(side)]
    for k0 in _divisors(modulus):
        for c0 in range(bound + 1):
            if (c0, k0) == (bound, modulus):
                return bound, modulus
            ok = True
            for a, b in cells:
                ca, cb = compress((a, b), c0, k0)
                if table[a][b] != table[ca][cb]:
                    ok = False
                    break
            if ok:
                return c0, k0
    return bound, modulus


def _table_formula(names: tuple[str, ...], table: list[list[bool]], bound: int, modulus: int, text: str) -> Formula:
    side = len(table)

    gap = bound + modulus

    def lookup(a: int, b: int) -> bool:
        if a < side and b < side:
            return table[a][b]
        # two-point compression, inlined: shrink the gaps 0..lo and lo..hi
        lo, hi = (a, b) if a <= b else (b, a)
        nlo = lo if lo <= gap else bound + 1 + (lo - bound - 1) % modulus
        d = hi - lo
        nhi = nlo + (d if d <= gap else bound + 1 + (d - bound - 1) % modulus)
        return table[nlo][nhi] if a <= b else table[nhi][nlo]

    return Formula(names, lookup, bound, modulus, text)


def _materialize(f: Formula) -> Formula:
    if f.arity == 0:
        return _const(bool(f.fn()))
    if f.arity == 1:
        return _from_upset(f.vars[0], f.to_upset())
    if f.arity == 2:
        side = 2 * (f.bound + f.modulus) + 1
        fn = f.fn
        table = [[bool(fn(a, b)) for b in range(side)] for a in range(side)]
        c0, k0 = _shrink_table(table, f.bound, f.modulus)
        small = 2 * (c0 + k0) + 1
        table = [row[:small] for row in table[:small]]
        return _table_formula(f.vars, table, c0, k0, f.text)
    return f


def materialize(f: Formula) -> Formula:
    """Tabulate a formula of arity <= 2 on its smallest licensed box; larger arities pass through."""
    return _materialize(f)


def diagonal(f: Formula, a: str, b: str, into: str) -> Formula:
    """Identify variables ``a`` and ``b`` of ``f`` as the single variable ``into``."""
    ia, ib = f.vars.index(a), f.vars.index(b)
    rest = [v for v in f.vars if v not in (a, b)]
    names = tuple(sorted(rest + [into]))
    fn = f.fn

    def g(*args: int) -> bool:
        env = dict(zip(names, args))
        vals = [env[into] if i in (ia, ib) else env[v] for i, v in enumerate(f.vars)]
        return fn(*vals)

    return _materialize(Formula(names, g, f.bound, f.modulus, f"{f.text}[{a}={b}]"))


def equality(a: str, b: str) -> Formula:
    x, y = sorted((a, b))
    return Formula((x, y), lambda u, v: u == v, 0, 1, f"{a}=={b}")


def is_false(f: Formula) -> bool:
    return not f.satisfiable()


def is_true(f: Formula) -> bool:
    return f.valid()


def _eliminate(f: Formula, var: str, mode: str) -> Formula:
    if var not in f.vars:
        # every quantifier over an unused variable leaves the body unchanged
        return f
    pos = f.vars.index(var)
    names = f.vars[:pos] + f.vars[pos + 1:]
    c, k, fn = f.bound, f.modulus, f.fn

    def at(args: tuple[int, ...], y: int) -> bool:
        return fn(*args[:pos], y, *args[pos:])

    if mode == "exists":
        def g(*args: int) -> bool:
            top = max(args, default=0) + c + k
            return any(at(args, y) for y in range(top + 1))
        new_bound = 2 * c + k
    else:
        want_all = mode == "cofinite"

        def g(*args: int) -> bool:
            start = max(args, default=0) + c + 1
            window = (at(args, y) for y in range(start, start + k))
            return all(window) if want_all else any(window)
        new_bound = c
    return _materialize(Formula(names, g, new_bound, k, f"{mode} {var}. {f.text}"))


@lru_cache(maxsize=4096)
def _compile(text: str, allowed: tuple[str, ...]) -> tuple[object, tuple[str, ...], int, int]:
    node = _Parser(text, allowed).parse()
    names = tuple(sorted(node.free()))
    atoms = _walk_atoms(node)
    bound = max((abs(a.c) for a in atoms if a.kind != "mod"), default=0)
    modulus = 1
    for a in atoms:
        if a.kind == "mod":
            modulus = lcm(modulus, a.k)
    return node, names, bound, modulus


def parse(text: str, allowed: Sequence[str] = VARIABLES, max_free: int = 2) -> Formula:
    node, names, bound, modulus = _compile(text, tuple(sorted(allowed)))
    if len(names) > max_free:
        raise PredicateSyntaxError(f"{text!r} has {len(names)} free variables; at most {max_free} allowed")
    body = node.py()
    fn = eval(f"lambda {','.join(names)}: {body}", {"__builtins__": {}})  # body built from parsed atoms only
    return Formula(names, fn, bound, modulus, text)


def ast(text: str, allowed: Sequence[str] = VARIABLES):
    return _compile(text, tuple(sorted(allowed)))[0]


def from_upset(var: str, s: UPSet) -> Formula:
    return _from_upset(var, s)


def constant(value: bool) -> Formula:
    return _const(value)


def normalize(text: str, var: str | None = None) -> UPSet:
    """Canonical form of a one-variable predicate."""
    f = parse(text)
    if f.arity == 0:
        return UPSet.universe() if f.truth() else UPSet.empty()
    if var is not None and f.vars != (var,):
        raise PredicateSyntaxError(f"{text!r} is not a predicate in {var!r} alone")
    return f.to_upset()
