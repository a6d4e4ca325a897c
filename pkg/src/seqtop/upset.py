"""Ultimately periodic subsets of the natural numbers.

An ``UPSet`` is stored canonically as ``(prefix, pattern)``: membership of
``n`` is ``prefix[n]`` for ``n < len(prefix)`` and
``pattern[(n - len(prefix)) % len(pattern)]`` afterwards.  Canonical means the
pattern has minimal period and the prefix is as short as possible, so two
sets are equal iff their representations are.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _min_period(pattern: tuple[bool, ...]) -> tuple[bool, ...]:
    p = len(pattern)
    for d in range(1, p + 1):
        if p % d == 0 and all(pattern[i] == pattern[i % d] for i in range(p)):
            return pattern[:d]
    return pattern


@dataclass(frozen=True)
class UPSet:
    prefix: tuple[bool, ...]
    pattern: tuple[bool, ...]

    def __post_init__(self) -> None:
        if not self.pattern:
            raise ValueError("pattern must be nonempty")

    # construction ---------------------------------------------------------

    @classmethod
    def canonical(cls, prefix: Iterable[bool], pattern: Iterable[bool]) -> "UPSet":
        pre = list(map(bool, prefix))
        pat = list(_min_period(tuple(map(bool, pattern))))
        # pull the threshold down while the last prefix bit repeats the cycle
        while pre and pre[-1] == pat[-1]:
            pat = [pre.pop()] + pat[:-1]
        return cls(tuple(pre), _min_period(tuple(pat)))

    @classmethod
    def from_fn(cls, fn: Callable[[int], bool], threshold: int, period: int) -> "UPSet":
        """Sample ``fn`` assuming it is periodic with ``period`` from ``threshold`` on."""
        return cls.canonical((fn(i) for i in range(threshold)), (fn(threshold + i) for i in range(period)))

    @classmethod
    def empty(cls) -> "UPSet":
        return cls((), (False,))

    @classmethod
    def universe(cls) -> "UPSet":
        return cls((), (True,))

    @classmethod
    def finite(cls, elems: Iterable[int]) -> "UPSet":
        es = set(elems)
        if any(e < 0 for e in es):
            raise ValueError("indices are natural numbers")
        top = max(es) + 1 if es else 0
        return cls.canonical((i in es for i in range(top)), (False,))

    @classmethod
    def at_least(cls, c: int) -> "UPSet":
        return cls.canonical((False,) * max(c, 0), (True,))

    @classmethod
    def residue(cls, r: int, k: int) -> "UPSet":
        return cls.canonical((), (i % k == r % k for i in range(k)))

    # inspection -------------------------------------------------------------

    @property
    def threshold(self) -> int:
        return len(self.prefix)

    @property
    def period(self) -> int:
        return len(self.pattern)

    def __contains__(self, n: int) -> bool:
        if n < 0:
            return False
        if n < len(self.prefix):
            return self.prefix[n]
        return self.pattern[(n - len(self.prefix)) % len(self.pattern)]

    def is_empty(self) -> bool:
        return not any(self.prefix) and not any(self.pattern)

    def is_universe(self) -> bool:
        return all(self.prefix) and all(self.pattern)

    def is_infinite(self) -> bool:
        return any(self.pattern)

    def is_cofinite(self) -> bool:
        return all(self.pattern)

    def minimum(self) -> int | None:
        for i, b in enumerate(self.prefix + self.pattern):
            if b:
                return i
        return None

    def elements(self, below: int) -> list[int]:
        return [i for i in range(below) if i in self]

    # algebra ----------------------------------------------------------------

    def _combine(self, other: "UPSet", op: Callable[[bool, bool], bool]) -> "UPSet":
        t = max(self.threshold, other.threshold)
        p = lcm(self.period, other.period)
        return UPSet.from_fn(lambda i: op(i in self, i in other), t, p)

    def __or__(self, other: "UPSet") -> "UPSet":
        return self._combine(other, lambda a, b: a or b)

    def __and__(self, other: "UPSet") -> "UPSet":
        return self._combine(other, lambda a, b: a and b)

    def __sub__(self, other: "UPSet") -> "UPSet":
        return self._combine(other, lambda a, b: a and not b)

    def __invert__(self) -> "UPSet":
        return UPSet(tuple(not b for b in self.prefix), tuple(not b for b in self.pattern))

    def __le__(self, other: "UPSet") -> bool:
        return (self - other).is_empty()

    def __lt__(self, other: "UPSet") -> bool:
        return self <= other and self != other

    def shift(self, k: int) -> "UPSet":
        """``{n + k : n in self}`` for k >= 0, ``{n - |k| : n in self, n >= |k|}`` for k < 0."""
        if k >= 0:
            return UPSet.canonical((False,) * k + self.prefix, self.pattern)
        return UPSet.from_fn(lambda i: (i - k) in self, max(self.threshold + k, 0), self.period)

    # export -----------------------------------------------------------------

    def boxes(self) -> list[tuple[int, int | None, int, int]]:
        """Guarded-box normal form ``(lo, hi, modulus, residue)``; ``hi`` None means unbounded."""
        out: list[tuple[int, int | None, int, int]] = []
        i = 0
        while i < self.threshold:
            if self.prefix[i]:
                j = i
                while j + 1 < self.threshold and self.prefix[j + 1]:
                    j += 1
                out.append((i, j, 1, 0))
                i = j + 1
            else:
                i += 1
        if self.is_cofinite():
            out.append((self.threshold, None, 1, 0))
        else:
            for r, b in enumerate(self.pattern):
                if b:
                    out.append((self.threshold + r, None, self.period, (self.threshold + r) % self.period))
        return out

    def to_predicate(self, var: str = "n") -> str:
        parts = []
        for lo, hi, k, r in self.boxes():
            if hi is not None:
                parts.append(f"{var}=={lo}" if lo == hi else f"({var}>={lo} and {var}<={hi})")
            elif k == 1:
                parts.append(f"{var}>={lo}")
            else:
                parts.append(f"({var}>={lo} and {var}%{k}=={r})")
        return " or ".join(parts) if parts else "false"

    def describe(self) -> str:
        return self.to_predicate()

    def to_json(self) -> dict:
        return {"prefix": "".join("1" if b else "0" for b in self.prefix),
                "pattern": "".join("1" if b else "0" for b in self.pattern)}

    @classmethod
    def from_json(cls, doc: dict) -> "UPSet":
        return cls.canonical((c == "1" for c in doc["prefix"]), (c == "1" for c in doc["pattern"]))
