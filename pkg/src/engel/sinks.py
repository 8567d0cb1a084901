"""Minimal Engel sinks.

For a fixed ``g`` the map ``phi(x) = [x, g]`` is a self-map of the finite set
``G``; the smallest set that eventually captures every orbit is the set of
periodic points of ``phi``.  We find it on the functional graph of ``phi``
rather than by simulating each orbit.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field

import numpy as np

from .checks import CheckResult
from .group import GroupHandle, NotEnumerableError, SubgroupHandle, close_indices
from .perm import Permutation
from .structure import as_subgroup, conjugacy_classes

log = logging.getLogger(__name__)

__all__ = [
    "SinkReport",
    "SinkProfile",
    "commutator_map",
    "periodic_points",
    "minimal_sink",
    "naive_sink_oracle",
    "sink_profile",
    "verify_l0",
]


@dataclass
class SinkReport:
    element: Permutation
    index: int
    sink: np.ndarray  # sorted element indices
    sink_subgroup: SubgroupHandle
    max_tail: int
    sink_rank: int | None = None

    @property
    def size(self) -> int:
        return len(self.sink)

    def sink_elements(self) -> list[Permutation]:
        G = self.sink_subgroup.parent
        return [G.element(i) for i in self.sink]


def _element_index(G: GroupHandle, g) -> int:
    if isinstance(g, Permutation):
        i = G.index_of(g)
        if i < 0:
            raise ValueError(f"{g} is not an element of {G.label or 'the group'}")
        return i
    return int(g)


def _require_enumerable(G: GroupHandle) -> None:
    if not G.is_enumerable:
        raise NotEnumerableError(f"{G.label or 'group'} is above the enumeration threshold")


def commutator_map(G: GroupHandle, g: int) -> np.ndarray:
    """``phi[x] = [x, g]`` as an index array."""
    return np.asarray(G.comm(np.arange(G.N), g), dtype=np.int64)


def periodic_points(f: np.ndarray) -> tuple[np.ndarray, int]:
    """Periodic points of the self-map ``f`` of ``{0..n-1}`` and the longest tail.

    ``f`` composed with itself ``2**m >= n`` times maps every point onto its
    cycle, so the image of that power is exactly the set of periodic points.
    """
    n = len(f)
    h = f.copy()
    steps = 1
    while steps < n:
        h = h[h]
        steps *= 2
    periodic = np.zeros(n, dtype=bool)
    periodic[h] = True
    cur = np.arange(n)
    tail = 0
    while not periodic[cur].all():
        cur = f[cur]
        tail += 1
    return np.flatnonzero(periodic), tail


def minimal_sink(G: GroupHandle, g, rank: bool = False) -> SinkReport:
    _require_enumerable(G)
    gi = _element_index(G, g)
    sink, tail = periodic_points(commutator_map(G, gi))
    sub = as_subgroup(G, close_indices(G, sink))
    rep = SinkReport(G.element(gi), gi, sink, sub, tail)
    if rank:
        from .rank import rank as rank_of

        rep.sink_rank = rank_of(sub).rank_value
    return rep


def naive_sink_oracle(G: GroupHandle, g, horizon: int) -> set[Permutation]:
    """Reference sink by direct iteration of ``x -> [x, g]`` on image arrays.

    Every orbit is iterated ``horizon`` times and then followed for one full
    cycle.  Works on raw permutation arrays, independent of the index tables.
    """
    _require_enumerable(G)
    if horizon < G.order:
        raise ValueError(f"horizon {horizon} is smaller than |G| = {G.order}")
    gp = g if isinstance(g, Permutation) else G.element(g)
    if not G.contains(gp):
        raise ValueError(f"{gp} is not an element of the group")
    gimg = np.asarray(gp.images, dtype=np.int64)
    ginv = np.argsort(gimg)
    X = G.elements_array.astype(np.int64)

    def step(Y: np.ndarray) -> np.ndarray:
        # [y, g] = y^-1 g^-1 y g, applied left to right
        yinv = np.argsort(Y, axis=1)
        t = ginv[yinv]
        t = np.take_along_axis(Y, t, axis=1)
        return gimg[t]

    Y = np.unique(X, axis=0)
    for _ in range(horizon):
        Y = np.unique(step(Y), axis=0)
    # after the horizon every state is periodic; collect one full cycle of each
    sink: set[Permutation] = set()
    for row in Y:
        start = row.copy()
        cur = row
        while True:
            sink.add(Permutation(cur.tolist()))
            cur = step(cur[None, :])[0]
            if np.array_equal(cur, start):
                break
    return sink


@dataclass
class SinkProfile:
    group: GroupHandle
    class_reps: list[int]
    rep_reports: dict[int, SinkReport]
    rep_of: np.ndarray  # element -> class representative
    conjugator: np.ndarray  # element x -> h with rep^h == x
    r_star: int
    audited: list[int] = field(default_factory=list)

    def report(self, x) -> SinkReport:
        G = self.group
        i = _element_index(G, x)
        r = int(self.rep_of[i])
        base = self.rep_reports[r]
        if i == r:
            return base
        h = int(self.conjugator[i])
        sink = np.sort(np.asarray(G.conj(base.sink, h)))
        mask = np.zeros(G.N, dtype=bool)
        mask[G.conj(base.sink_subgroup.indices, h)] = True
        gens = [G.element(int(G.conj(int(s), h))) for s in base.sink_subgroup.gen_indices]
        sub = SubgroupHandle(G, gens, mask)
        return SinkReport(G.element(i), i, sink, sub, base.max_tail, base.sink_rank)

    def reports(self) -> list[SinkReport]:
        return [self.report(i) for i in range(self.group.N)]

    def sink_mask(self, x) -> np.ndarray:
        return self.report(x).sink_subgroup.mask


def _class_transversal(G: GroupHandle) -> tuple[list[int], np.ndarray, np.ndarray]:
    labels = conjugacy_classes(G)
    reps = sorted(set(int(v) for v in labels))
    conjugator = np.full(G.N, -1, dtype=np.int64)
    gens = [int(s) for s in G.gen_indices]
    for r in reps:
        conjugator[r] = 0
        queue = [r]
        while queue:
            x = queue.pop()
            for s in gens:
                y = int(G.conj(x, s))
                if conjugator[y] < 0:
                    conjugator[y] = int(G.mul(int(conjugator[x]), s))
                    queue.append(y)
    return reps, labels, conjugator


def sink_profile(G: GroupHandle, rank: bool = True, audit: int = 8, seed: int = 0) -> SinkProfile:
    """Sinks of every element, computed on class representatives and transported by conjugation.

    ``audit`` randomly chosen non-representatives are recomputed directly and
    compared with the transported sink.
    """
    _require_enumerable(G)
    key = ("sink_profile", rank)
    if key in G._cache:
        return G._cache[key]
    reps, rep_of, conjugator = _class_transversal(G)
    rep_reports = {r: minimal_sink(G, r, rank=rank) for r in reps}
    r_star = max((rr.sink_rank or 0) for rr in rep_reports.values()) if rank else 0
    prof = SinkProfile(G, reps, rep_reports, rep_of, conjugator, r_star)
    others = [i for i in range(G.N) if int(rep_of[i]) != i]
    rng = random.Random(seed)
    for i in rng.sample(others, min(audit, len(others))):
        direct = minimal_sink(G, i)
        moved = prof.report(i)
        if not np.array_equal(direct.sink, moved.sink):
            raise RuntimeError(f"sink equivariance audit failed at element {G.element(i)}")
        prof.audited.append(i)
    G._cache[key] = prof
    return prof


def verify_l0(G: GroupHandle, P: SubgroupHandle, g, sink_subgroup: SubgroupHandle | None = None) -> CheckResult:
    """``[P, g]`` lies in ``<E(g)>`` for a ``p'``-element ``g`` normalizing the ``p``-subgroup ``P``."""
    from sympy import factorint

    gi = _element_index(G, g)
    order = P.order
    primes = list(factorint(order)) if order > 1 else []
    if len(primes) > 1:
        return CheckResult.skipped("l0", "P is not a p-group")
    if not primes:
        return CheckResult.passed("l0", "P trivial", commutator_order=1)
    p = primes[0]
    if int(G.element_orders()[gi]) % p == 0:
        return CheckResult.skipped("l0", "g is not a p'-element")
    pidx = P.indices
    if not P.mask[G.conj(pidx, gi)].all():
        return CheckResult.skipped("l0", "g does not normalize P")
    comms = np.unique(np.asarray(G.comm(pidx, gi)))
    pg = close_indices(G, comms)
    if sink_subgroup is None:
        sink_subgroup = minimal_sink(G, gi).sink_subgroup
    outside = np.flatnonzero(pg & ~sink_subgroup.mask)
    if len(outside):
        return CheckResult.failed(
            "l0",
            f"[P,g] not contained in <E(g)> for g={G.element(gi)}",
            witness=G.element(int(outside[0])).to_cycle_string(),
            commutator_order=int(pg.sum()),
            sink_subgroup_order=sink_subgroup.order,
        )
    return CheckResult.passed("l0", commutator_order=int(pg.sum()), sink_subgroup_order=sink_subgroup.order)
