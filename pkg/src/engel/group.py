"""Permutation groups with an enumerated, index-space representation.

A :class:`GroupHandle` below the enumeration threshold materialises every
element once, sorted lexicographically by image array (so index 0 is the
identity), and all further arithmetic happens on integer indices.  Above the
threshold only order and membership are available, via a stabilizer chain.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .perm import Permutation

__all__ = [
    "DEFAULT_ENUMERATION_THRESHOLD",
    "TABLE_CAP",
    "GroupHandle",
    "SubgroupHandle",
    "NotEnumerableError",
    "closure",
]

log = logging.getLogger(__name__)

DEFAULT_ENUMERATION_THRESHOLD = 20000
# Full Cayley tables are cached only up to this order; larger enumerable groups
# multiply through base-image lookups.
TABLE_CAP = 2500


class NotEnumerableError(RuntimeError):
    """Raised when an operation needs the element list of a group above threshold."""


@dataclass
class _Enumeration:
    elements: np.ndarray  # (N, degree), canonical lexicographic order
    base: np.ndarray  # points whose images determine an element
    radix: int
    key_order: np.ndarray
    sorted_keys: np.ndarray
    inv: np.ndarray = field(init=False)
    table: np.ndarray | None = None

    def keys_of(self, base_images: np.ndarray) -> np.ndarray:
        k = np.zeros(base_images.shape[:-1], dtype=np.int64)
        for j in range(base_images.shape[-1]):
            k = k * self.radix + base_images[..., j]
        return k

    def lookup(self, base_images: np.ndarray) -> np.ndarray:
        keys = self.keys_of(base_images)
        pos = np.searchsorted(self.sorted_keys, keys)
        pos = np.minimum(pos, len(self.sorted_keys) - 1)
        return self.key_order[pos]


def _enumerate(degree: int, gens: Sequence[Permutation], limit: int) -> np.ndarray:
    dtype = np.int16 if degree < 2**15 else np.int32
    ident = np.arange(degree, dtype=dtype)
    gen_arr = [np.asarray(g.images, dtype=dtype) for g in gens if not g.is_identity()]
    seen = {ident.tobytes()}
    rows = [ident]
    frontier = ident[None, :]
    while len(frontier):
        fresh = []
        for s in gen_arr:
            prod = s[frontier]  # apply row first, then s
            for row in prod:
                b = row.tobytes()
                if b not in seen:
                    seen.add(b)
                    fresh.append(row)
                    if len(seen) > limit:
                        raise NotEnumerableError(f"group order exceeds {limit}")
        rows.extend(fresh)
        frontier = np.array(fresh, dtype=dtype) if fresh else np.empty((0, degree), dtype)
    elems = np.array(rows, dtype=dtype)
    order = np.lexsort(elems.T[::-1])
    return elems[order]


def _choose_base(elems: np.ndarray) -> np.ndarray:
    n_elems, degree = elems.shape
    base: list[int] = []
    if n_elems == 1:
        return np.array([0], dtype=np.int64)
    current = np.zeros(n_elems, dtype=np.int64)
    distinct = 1
    for pt in range(degree):
        trial = current * degree + elems[:, pt]
        d = len(np.unique(trial))
        if d > distinct:
            base.append(pt)
            current = np.unique(trial, return_inverse=True)[1].astype(np.int64)
            distinct = d
            if distinct == n_elems:
                break
    return np.array(base, dtype=np.int64)


class GroupHandle:
    """A permutation group given by generators on ``degree`` points."""

    def __init__(
        self,
        generators: Sequence[Permutation],
        degree: int | None = None,
        label: str = "",
        threshold: int = DEFAULT_ENUMERATION_THRESHOLD,
        metadata: dict | None = None,
    ):
        gens = list(generators)
        if degree is None:
            if not gens:
                raise ValueError("degree required when no generators are given")
            degree = gens[0].degree
        if not gens:
            gens = [Permutation.identity(degree)]
        for g in gens:
            if g.degree != degree:
                raise ValueError(f"generator {g} has degree {g.degree}, expected {degree}")
        self.degree = degree
        self.generators = gens
        self.label = label
        self.threshold = threshold
        self.metadata = metadata or {}
        self._enum: _Enumeration | None = None
        self._order: int | None = None
        self._sympy = None
        self._cache: dict = {}

    def __repr__(self) -> str:
        return f"GroupHandle({self.label or '?'}, degree={self.degree}, ngens={len(self.generators)})"

    # -- tiers ------------------------------------------------------------

    @property
    def order(self) -> int:
        if self._order is None:
            if self._enum is not None:
                self._order = len(self._enum.elements)
            else:
                self._order = int(self._sympy_group().order())
                if self._order <= self.threshold:
                    self._order = len(self._ensure_enum().elements)
        return self._order

    @property
    def is_enumerable(self) -> bool:
        return self.order <= self.threshold

    def _sympy_group(self):
        if self._sympy is None:
            from sympy.combinatorics import Permutation as SymPerm
            from sympy.combinatorics import PermutationGroup

            self._sympy = PermutationGroup([SymPerm(list(g.images)) for g in self.generators])
        return self._sympy

    def _ensure_enum(self) -> _Enumeration:
        if self._enum is None:
            if self._order is not None and self._order > self.threshold:
                raise NotEnumerableError(f"{self.label or 'group'} of order {self._order} is above threshold {self.threshold}")
            elems = _enumerate(self.degree, self.generators, self.threshold)
            self._install(elems)
        return self._enum

    def _install(self, elems: np.ndarray) -> None:
        base = _choose_base(elems)
        radix = max(self.degree, 2)
        if len(base) * np.log2(radix) >= 62:
            raise NotEnumerableError("base too long for int64 keys")
        enum = _Enumeration(elems, base, radix, np.empty(0, np.int64), np.empty(0, np.int64))
        keys = enum.keys_of(elems[:, base].astype(np.int64))
        enum.key_order = np.argsort(keys, kind="stable")
        enum.sorted_keys = keys[enum.key_order]
        inv_imgs = np.argsort(elems, axis=1)
        enum.inv = enum.lookup(inv_imgs[:, base].astype(np.int64))
        self._enum = enum
        self._order = len(elems)
        if len(elems) <= TABLE_CAP:
            n = len(elems)
            table = np.empty((n, n), dtype=np.int32 if n > 32000 else np.int16)
            ar = np.arange(n)
            step = max(1, 200000 // max(n, 1))
            for lo in range(0, n, step):
                a = ar[lo : lo + step, None]
                table[lo : lo + step] = self._mul_lookup(a, ar[None, :])
            enum.table = table.astype(np.int32)

    # -- index-space arithmetic -------------------------------------------

    @property
    def elements_array(self) -> np.ndarray:
        return self._ensure_enum().elements

    @property
    def inv(self) -> np.ndarray:
        return self._ensure_enum().inv

    @property
    def N(self) -> int:
        return len(self._ensure_enum().elements)

    def _mul_lookup(self, a, b) -> np.ndarray:
        enum = self._enum
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        base_imgs = enum.elements[a][..., enum.base]
        prod = np.take_along_axis(enum.elements[b], base_imgs.astype(np.int64), axis=-1)
        return enum.lookup(prod.astype(np.int64))

    def mul(self, a, b):
        """Index of ``a * b`` (apply ``a`` first), broadcasting over arrays."""
        enum = self._ensure_enum()
        if enum.table is not None:
            return enum.table[a, b]
        out = self._mul_lookup(a, b)
        return out if np.ndim(out) else int(out)

    def conj(self, x, g):
        """Index of ``g^-1 x g``."""
        inv = self.inv
        return self.mul(self.mul(inv[g], x), g)

    def comm(self, x, g):
        """Index of ``[x, g] = x^-1 g^-1 x g``."""
        inv = self.inv
        return self.mul(self.mul(self.mul(inv[x], inv[g]), x), g)

    def index_of(self, p: Permutation) -> int:
        """Index of ``p`` in the element list; ``-1`` if ``p`` is not in the group."""
        if p.degree != self.degree:
            raise ValueError(f"degree mismatch: {p.degree} vs {self.degree}")
        enum = self._ensure_enum()
        imgs = np.asarray(p.images, dtype=np.int64)
        i = int(enum.lookup(imgs[enum.base][None, :])[0])
        if np.array_equal(enum.elements[i], imgs):
            return i
        return -1

    def element(self, i: int) -> Permutation:
        return Permutation(self._ensure_enum().elements[int(i)].tolist())

    def elements(self) -> list[Permutation]:
        return [Permutation(row.tolist()) for row in self._ensure_enum().elements]

    def contains(self, p: Permutation) -> bool:
        if p.degree != self.degree:
            return False
        if self.is_enumerable:
            return self.index_of(p) >= 0
        from sympy.combinatorics import Permutation as SymPerm

        return bool(self._sympy_group().contains(SymPerm(list(p.images))))

    @property
    def gen_indices(self) -> np.ndarray:
        if "gen_idx" not in self._cache:
            self._cache["gen_idx"] = np.array([self.index_of(g) for g in self.generators], dtype=np.int64)
        return self._cache["gen_idx"]

    def element_orders(self) -> np.ndarray:
        if "orders" not in self._cache:
            self._power_data()
        return self._cache["orders"]

    def cyclic_ids(self) -> np.ndarray:
        """For each element, the smallest index of a generator of ``<x>``."""
        if "cyc" not in self._cache:
            self._power_data()
        return self._cache["cyc"]

    def _power_data(self) -> None:
        n = self.N
        ar = np.arange(n)
        orders = np.zeros(n, dtype=np.int64)
        cyc = ar.copy()
        power = ar.copy()
        k = 1
        pending = np.ones(n, dtype=bool)
        pending[0] = False
        orders[0] = 1
        powers = [ar.copy()]
        while pending.any():
            power = self.mul(power, ar)
            k += 1
            powers.append(power)
            hit = pending & (power == 0)
            orders[hit] = k
            pending &= ~hit
        exponent = k
        for j in range(2, exponent):
            pj = powers[j - 1]
            ok = (orders > j) & (np.gcd(j, orders) == 1)
            cyc = np.where(ok, np.minimum(cyc, pj), cyc)
        self._cache["orders"] = orders
        self._cache["cyc"] = cyc

    def power(self, x: int, k: int) -> int:
        result, base = 0, int(x)
        k = int(k)
        while k:
            if k & 1:
                result = int(self.mul(result, base))
            base = int(self.mul(base, base))
            k >>= 1
        return result

    # -- subgroups --------------------------------------------------------

    def whole(self) -> SubgroupHandle:
        return SubgroupHandle(self, list(self.generators), np.ones(self.N, dtype=bool))

    def trivial(self) -> SubgroupHandle:
        mask = np.zeros(self.N, dtype=bool)
        mask[0] = True
        return SubgroupHandle(self, [Permutation.identity(self.degree)], mask)

    def subgroup(self, gens: Iterable[Permutation]) -> SubgroupHandle:
        return closure(self, list(gens))

    def subgroup_from_indices(self, idx: Iterable[int]) -> SubgroupHandle:
        idx = [int(i) for i in idx]
        mask = close_indices(self, idx)
        gens = [self.element(i) for i in idx] or [Permutation.identity(self.degree)]
        return SubgroupHandle(self, gens, mask)


class SubgroupHandle:
    """A subgroup of an enumerable parent: generators plus the full membership mask."""

    __slots__ = ("parent", "generators", "mask", "_idx", "_as_group")

    def __init__(self, parent: GroupHandle, generators: list[Permutation], mask: np.ndarray):
        self.parent = parent
        self.generators = generators
        self.mask = mask
        self._idx = None
        self._as_group = None

    @property
    def order(self) -> int:
        return int(self.mask.sum())

    @property
    def indices(self) -> np.ndarray:
        if self._idx is None:
            self._idx = np.flatnonzero(self.mask)
        return self._idx

    @property
    def gen_indices(self) -> np.ndarray:
        return np.array([self.parent.index_of(g) for g in self.generators], dtype=np.int64)

    def elements(self) -> list[Permutation]:
        return [self.parent.element(i) for i in self.indices]

    def contains(self, p: Permutation) -> bool:
        i = self.parent.index_of(p)
        return i >= 0 and bool(self.mask[i])

    def __contains__(self, p: Permutation) -> bool:
        return self.contains(p)

    def __le__(self, other: SubgroupHandle) -> bool:
        self._check_parent(other)
        return bool(np.all(other.mask[self.mask]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubgroupHandle):
            return NotImplemented
        return self.parent is other.parent and np.array_equal(self.mask, other.mask)

    __hash__ = None  # mutable numpy payload

    def _check_parent(self, other: SubgroupHandle) -> None:
        if self.parent is not other.parent:
            raise ValueError("subgroups of different parent groups")

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_normal_in(self, other: SubgroupHandle | None = None) -> bool:
        G = self.parent
        over = G.gen_indices if other is None else other.gen_indices
        for s in self.gen_indices:
            if not self.mask[G.conj(s, over)].all():
                return False
        return True

    def key(self) -> bytes:
        return np.packbits(self.mask).tobytes()

    def as_group(self, label: str | None = None) -> GroupHandle:
        """This subgroup as a standalone group, reusing the parent's enumeration."""
        if self._as_group is None:
            G = self.parent
            H = GroupHandle(self.generators, G.degree, label or f"sub({G.label})", G.threshold)
            elems = G.elements_array[self.indices]
            H._install(elems)
            self._as_group = H
        return self._as_group

    def __repr__(self) -> str:
        return f"SubgroupHandle(order={self.order}, of {self.parent.label or '?'})"


def _cyclic_mask(G: GroupHandle, x: int) -> np.ndarray:
    mask = np.zeros(G.N, dtype=bool)
    y = 0
    while True:
        mask[y] = True
        y = int(G.mul(y, x))
        if y == 0:
            return mask


def extend(G: GroupHandle, mask: np.ndarray, gens: list[int], new: int) -> np.ndarray:
    """``<H, new>`` where ``H`` (given by ``mask``) is generated by ``gens``.

    Breadth-first closure under right multiplication by all generators, seeded
    with ``H`` and the coset ``H * new``.
    """
    out = mask.copy()
    if out[new]:
        return out
    all_gens = np.array(list(gens) + [new], dtype=np.int64)
    frontier = np.asarray(G.mul(np.flatnonzero(mask), new)).ravel()
    out[frontier] = True
    while frontier.size:
        z = np.asarray(G.mul(frontier[:, None], all_gens[None, :])).ravel()
        z = np.unique(z[~out[z]])
        out[z] = True
        frontier = z
    return out


def close_indices(G: GroupHandle, gens: Iterable[int], start: tuple[np.ndarray, list[int]] | None = None) -> np.ndarray:
    """Membership mask of the subgroup generated by element indices ``gens``."""
    if start is None:
        mask = np.zeros(G.N, dtype=bool)
        mask[0] = True
        used: list[int] = []
    else:
        mask, used = start[0].copy(), list(start[1])
    for g in gens:
        g = int(g)
        if mask[g]:
            continue
        if mask.sum() == 1:
            mask = _cyclic_mask(G, g)
        else:
            mask = extend(G, mask, used, g)
        used.append(g)
    return mask


def closure(parent: GroupHandle, gens: Sequence[Permutation]) -> SubgroupHandle:
    """``<gens>`` as a subgroup of ``parent``."""
    gens = list(gens)
    if not gens:
        raise ValueError("closure needs at least one generator")
    idx = []
    for g in gens:
        if g.degree != parent.degree:
            raise ValueError(f"degree mismatch: {g.degree} vs {parent.degree}")
        i = parent.index_of(g)
        if i < 0:
            raise ValueError(f"{g} is not an element of {parent.label or 'the parent group'}")
        idx.append(i)
    return SubgroupHandle(parent, gens, close_indices(parent, idx))
