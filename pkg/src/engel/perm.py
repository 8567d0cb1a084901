"""Permutations on {0, ..., n-1} and the element-level commutator calculus.

Products are written left to right: ``p * q`` applies ``p`` first, then ``q``,
so ``(p * q)(i) == q(p(i))``.  Conjugation is ``x ** g == g^-1 x g`` and the
commutator is ``[x, g] = x^-1 x^g``.  Cycle notation is 1-based on the way in
and out; everything else is 0-based.
"""

from __future__ import annotations

import re
from math import lcm
from typing import Iterable, Sequence

__all__ = [
    "Permutation",
    "compose",
    "commutator",
    "left_normed_commutator",
    "parse_cycles",
]


class Permutation:
    __slots__ = ("_images", "_hash")

    def __init__(self, images: Iterable[int]):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a bijection on 0..{len(images) - 1}: {images}")
        self._images = images
        self._hash = hash(images)

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        return cls(range(degree))

    @classmethod
    def from_cycles(cls, cycles: Sequence[Sequence[int]], degree: int) -> Permutation:
        """Build from 0-based cycles."""
        images = list(range(degree))
        seen = set()
        for cyc in cycles:
            for a in cyc:
                if not 0 <= a < degree:
                    raise ValueError(f"point {a} outside 0..{degree - 1}")
                if a in seen:
                    raise ValueError(f"point {a} repeated in cycles")
                seen.add(a)
            for a, b in zip(cyc, list(cyc[1:]) + list(cyc[:1])):
                images[a] = b
        return cls(images)

    @classmethod
    def parse(cls, text: str, degree: int) -> Permutation:
        return parse_cycles(text, degree)

    @property
    def images(self) -> tuple[int, ...]:
        return self._images

    @property
    def degree(self) -> int:
        return len(self._images)

    def __call__(self, i: int) -> int:
        return self._images[i]

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __invert__(self) -> Permutation:
        return self.inverse()

    def __pow__(self, other):
        if isinstance(other, Permutation):
            return other.inverse() * self * other
        k = int(other)
        if k < 0:
            return self.inverse() ** (-k)
        result = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> Permutation:
        inv = [0] * len(self._images)
        for i, j in enumerate(self._images):
            inv[j] = i
        return Permutation(inv)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self._images))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its smallest point, 0-based."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            j = self._images[start]
            while j != start:
                cyc.append(j)
                seen[j] = True
                j = self._images[j]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return lcm(*(len(c) for c in self.cycles())) if not self.is_identity() else 1

    def to_cycle_string(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + " ".join(str(a + 1) for a in c) + ")" for c in cycs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._images == other._images

    def __lt__(self, other: Permutation) -> bool:
        return self._images < other._images

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Permutation({self.to_cycle_string()!r}, degree={self.degree})"

    def __str__(self) -> str:
        return self.to_cycle_string()


def _check_degree(p: Permutation, q: Permutation) -> None:
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch: {p.degree} vs {q.degree}")


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply ``p`` then ``q``."""
    _check_degree(p, q)
    qi = q.images
    return Permutation(qi[i] for i in p.images)


def commutator(x: Permutation, g: Permutation) -> Permutation:
    _check_degree(x, g)
    return x.inverse() * g.inverse() * x * g


def left_normed_commutator(x: Permutation, g: Permutation, n: int) -> Permutation:
    """``[x, g, ..., g]`` with ``g`` repeated ``n`` times."""
    if n < 1:
        raise ValueError("n must be at least 1")
    y = x
    for _ in range(n):
        y = commutator(y, g)
    return y


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse 1-based cycle notation such as ``"(1 2 3)(4 5)"`` or ``"()"``."""
    stripped = re.sub(r"\s+", "", text)
    if not stripped:
        raise ValueError("empty permutation text; write () for the identity")
    rebuilt = "".join(f"({m})" for m in re.findall(r"\(([^()]*)\)", text))
    if re.sub(r"\s+", "", rebuilt) != stripped:
        raise ValueError(f"malformed cycle notation: {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(text):
        tokens = body.replace(",", " ").split()
        if not tokens:
            continue
        try:
            pts = [int(t) - 1 for t in tokens]
        except ValueError:
            raise ValueError(f"non-integer point in {text!r}") from None
        bad = [p + 1 for p in pts if not 0 <= p < degree]
        if bad:
            raise ValueError(f"point {bad[0]} outside 1..{degree}")
        cycles.append(pts)
    flat = [p for c in cycles for p in c]
    if len(set(flat)) != len(flat):
        dup = next(p for p in flat if flat.count(p) > 1)
        raise ValueError(f"point {dup + 1} repeated in {text!r}")
    return Permutation.from_cycles(cycles, degree)
