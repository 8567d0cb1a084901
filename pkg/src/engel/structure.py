"""Commutator subgroups, structural series, Sylow subgroups and the Fitting subgroup."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sympy import factorint

from .group import GroupHandle, SubgroupHandle, close_indices, extend
from .perm import Permutation

__all__ = [
    "SeriesReport",
    "QuotientMap",
    "commutator_subgroup",
    "normal_closure",
    "derived_subgroup",
    "derived_series",
    "lower_central_series",
    "gamma_infinity",
    "is_soluble",
    "is_nilpotent",
    "conjugacy_classes",
    "normalizer",
    "sylow_subgroup",
    "p_core",
    "fitting_subgroup",
    "fitting_series",
    "fitting_height",
    "quotient_action",
    "prime_divisors",
]


@dataclass
class SeriesReport:
    kind: str  # "derived", "lower-central" or "fitting"
    terms: list[SubgroupHandle]
    stabilized: bool
    height: int | None

    @property
    def orders(self) -> list[int]:
        return [t.order for t in self.terms]

    @property
    def last(self) -> SubgroupHandle:
        return self.terms[-1]


def prime_divisors(n: int) -> list[int]:
    return sorted(factorint(n)) if n > 1 else []


def _subgroup(G: GroupHandle, mask: np.ndarray, gens: list[int]) -> SubgroupHandle:
    gens = [int(g) for g in gens] or [0]
    return SubgroupHandle(G, [G.element(i) for i in gens], mask)


def _normal_closure_idx(G: GroupHandle, seeds, over) -> tuple[np.ndarray, list[int]]:
    """Normal closure of ``seeds`` under conjugation by ``over`` (element indices)."""
    mask = np.zeros(G.N, dtype=bool)
    mask[0] = True
    used: list[int] = []
    queue = [int(s) for s in seeds]
    over = np.asarray(list(over), dtype=np.int64)
    while queue:
        t = queue.pop()
        if mask[t]:
            continue
        mask = close_indices(G, [t], (mask, used)) if used else close_indices(G, [t])
        used.append(t)
        # only conjugates of generators can escape; the closure is then normal
        for u in used:
            for c in np.atleast_1d(G.conj(u, over)):
                if not mask[int(c)]:
                    queue.append(int(c))
    return mask, used


def normal_closure(S: SubgroupHandle, over: SubgroupHandle) -> SubgroupHandle:
    G = S.parent
    mask, used = _normal_closure_idx(G, S.gen_indices, over.gen_indices)
    return _subgroup(G, mask, used)


def commutator_subgroup(A: SubgroupHandle, B: SubgroupHandle) -> SubgroupHandle:
    """``[A, B]``: normal closure in ``<A, B>`` of the commutators of generators."""
    if A.parent is not B.parent:
        raise ValueError("commutator_subgroup needs subgroups of the same parent")
    G = A.parent
    a, b = A.gen_indices, B.gen_indices
    seeds = np.unique(G.comm(a[:, None], b[None, :]).ravel())
    seeds = [int(s) for s in seeds if s != 0]
    if not seeds:
        return G.trivial()
    over = np.concatenate([a, b])
    mask, used = _normal_closure_idx(G, seeds, over)
    return _subgroup(G, mask, used)


def derived_subgroup(H: SubgroupHandle) -> SubgroupHandle:
    return commutator_subgroup(H, H)


def _cached(G: GroupHandle, key, fn):
    if key not in G._cache:
        G._cache[key] = fn()
    return G._cache[key]


def lower_central_series(G: GroupHandle) -> SeriesReport:
    def run():
        whole = G.whole()
        terms = [whole]
        while True:
            nxt = commutator_subgroup(terms[-1], whole)
            terms.append(nxt)
            if nxt == terms[-2]:
                return SeriesReport("lower-central", terms, True, len(terms) - 1)

    return _cached(G, "lcs", run)


def derived_series(G: GroupHandle) -> SeriesReport:
    def run():
        terms = [G.whole()]
        while True:
            nxt = derived_subgroup(terms[-1])
            terms.append(nxt)
            if nxt == terms[-2]:
                return SeriesReport("derived", terms, True, len(terms) - 1)

    return _cached(G, "derived", run)


def gamma_infinity(G: GroupHandle) -> SubgroupHandle:
    """The nilpotent residual: last term of the lower central series."""
    return lower_central_series(G).last


def is_soluble(G: GroupHandle) -> bool:
    return derived_series(G).last.is_trivial()


def conjugacy_classes(G: GroupHandle) -> np.ndarray:
    """Class label of every element; the label is the smallest index in the class."""

    def run():
        n = G.N
        ar = np.arange(n)
        rows, cols = [], []
        for s in G.gen_indices:
            rows.append(ar)
            cols.append(np.asarray(G.conj(ar, s)))
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(n, n))
        _, comp = connected_components(graph, directed=True, connection="weak")
        rep = np.full(comp.max() + 1, n, dtype=np.int64)
        np.minimum.at(rep, comp, ar)
        return rep[comp]

    return _cached(G, "classes", run)


def normalizer(G: GroupHandle, H: SubgroupHandle, within: np.ndarray | None = None) -> np.ndarray:
    """Mask of ``N_G(H)``, optionally intersected with ``within``."""
    cand = np.arange(G.N) if within is None else np.flatnonzero(within)
    ok = np.ones(len(cand), dtype=bool)
    for s in H.gen_indices:
        ok &= H.mask[G.conj(int(s), cand)]
    out = np.zeros(G.N, dtype=bool)
    out[cand[ok]] = True
    return out


def _is_p_power(n: np.ndarray, p: int) -> np.ndarray:
    n = np.asarray(n).copy()
    while True:
        div = (n % p == 0) & (n > 1)
        if not div.any():
            return n == 1
        n[div] //= p


def sylow_subgroup(G: GroupHandle, p: int) -> SubgroupHandle:
    """A Sylow ``p``-subgroup by greedy ascent through normalizers.

    Starts from the first element of maximal ``p``-power order in canonical
    order and adjoins, one at a time, the first normalizing element whose
    ``p``-th power falls back into the current subgroup.
    """

    def run():
        orders = G.element_orders()
        if G.N % p != 0:
            return G.trivial()
        pel = np.flatnonzero(_is_p_power(orders, p) & (orders > 1))
        start = int(pel[np.argmax(orders[pel])])
        mask = close_indices(G, [start])
        used = [start]
        while True:
            P = _subgroup(G, mask, used)
            nmask = normalizer(G, P)
            if (int(nmask.sum()) // P.order) % p != 0:
                return P
            cand = np.flatnonzero(nmask & ~mask)
            pw = cand.copy()
            for _ in range(p - 1):
                pw = G.mul(pw, cand)
            y = int(cand[np.flatnonzero(mask[pw])[0]])
            mask = extend(G, mask, used, y)
            used.append(y)

    return _cached(G, ("sylow", p), run)


def p_core(G: GroupHandle, p: int) -> SubgroupHandle:
    """``O_p(G)``: the elements whose whole conjugacy class lies in a Sylow ``p``-subgroup."""

    def run():
        P = sylow_subgroup(G, p)
        labels = conjugacy_classes(G)
        outside = np.unique(labels[~P.mask])
        mask = P.mask & ~np.isin(labels, outside)
        return as_subgroup(G, mask)

    return _cached(G, ("pcore", p), run)


def _minimal_gens(G: GroupHandle, mask: np.ndarray) -> list[int]:
    """A short (not necessarily minimal) generating list for the subgroup ``mask``."""
    cur = np.zeros(G.N, dtype=bool)
    cur[0] = True
    used: list[int] = []
    for x in np.flatnonzero(mask):
        if not cur[x]:
            cur = close_indices(G, [int(x)], (cur, used)) if used else close_indices(G, [int(x)])
            used.append(int(x))
    return used


def as_subgroup(G: GroupHandle, mask: np.ndarray) -> SubgroupHandle:
    """Wrap a membership mask that is known to be a subgroup."""
    return _subgroup(G, mask, _minimal_gens(G, mask))


def fitting_subgroup(G: GroupHandle) -> SubgroupHandle:
    def run():
        mask = np.zeros(G.N, dtype=bool)
        mask[0] = True
        for p in prime_divisors(G.N):
            mask |= p_core(G, p).mask
        F = as_subgroup(G, close_indices(G, np.flatnonzero(mask)))
        if not F.is_normal_in():
            raise RuntimeError("Fitting subgroup is not normal")
        if not is_nilpotent(F.as_group()):
            raise RuntimeError("Fitting subgroup is not nilpotent")
        return F

    return _cached(G, "fitting", run)


def is_nilpotent(G: GroupHandle) -> bool:
    """Lower central series reaches 1; cross-checked against normality of all Sylow subgroups."""

    def run():
        by_lcs = gamma_infinity(G).is_trivial()
        by_sylow = all(sylow_subgroup(G, p).is_normal_in() for p in prime_divisors(G.N))
        if by_lcs != by_sylow:
            raise RuntimeError(f"nilpotency tests disagree on {G.label}")
        return by_lcs

    return _cached(G, "nilpotent", run)


class QuotientMap:
    """``G/N`` realised as the permutation action of ``G`` on the right cosets of ``N``."""

    def __init__(self, G: GroupHandle, N: SubgroupHandle, coset_of: np.ndarray, reps: np.ndarray, group: GroupHandle):
        self.source = G
        self.kernel = N
        self.coset_of = coset_of  # element index -> coset point
        self.reps = reps  # coset point -> representative element index
        self.group = group

    def image(self, x: Permutation) -> Permutation:
        G = self.source
        i = G.index_of(x)
        if i < 0:
            raise ValueError(f"{x} is not in the source group")
        return Permutation(self.coset_of[G.mul(self.reps, i)].tolist())

    def preimage(self, Q: SubgroupHandle) -> SubgroupHandle:
        if Q.parent is not self.group:
            raise ValueError("subgroup is not in this quotient")
        # the action is regular: an element is fixed by where it sends the trivial coset
        points = self.group.elements_array[Q.indices, 0]
        mask = np.isin(self.coset_of, points)
        return as_subgroup(self.source, mask)


def quotient_action(G: GroupHandle, N: SubgroupHandle) -> QuotientMap:
    if N.parent is not G:
        raise ValueError("N must be a subgroup of G")
    if not N.is_normal_in():
        raise ValueError("N is not normal in G")
    index = G.N // N.order
    if index > G.threshold:
        raise ValueError(f"index {index} above enumeration threshold")
    ar = np.arange(G.N)
    label = np.full(G.N, G.N, dtype=np.int64)
    for n in N.indices:
        label = np.minimum(label, G.mul(int(n), ar))
    reps, coset_of = np.unique(label, return_inverse=True)
    gens = []
    for s in G.gen_indices:
        gens.append(Permutation(coset_of[G.mul(reps, int(s))].tolist()))
    label_q = f"{G.label}/{N.order}" if G.label else ""
    Q = GroupHandle(gens, index, label_q, G.threshold)
    return QuotientMap(G, N, coset_of, reps, Q)


def fitting_series(G: GroupHandle) -> SeriesReport:
    """Ascending Fitting series; height is ``None`` when the series stalls below ``G``."""

    def run():
        terms = [fitting_subgroup(G)]
        while terms[-1].order < G.N:
            qm = quotient_action(G, terms[-1])
            nxt = qm.preimage(fitting_subgroup(qm.group))
            if nxt == terms[-1]:
                return SeriesReport("fitting", terms, True, None)
            terms.append(nxt)
        return SeriesReport("fitting", terms, True, len(terms))

    return _cached(G, "fitting_series", run)


def fitting_height(G: GroupHandle) -> int | None:
    """Fitting height of a soluble group; ``None`` (undefined) otherwise."""
    if not is_soluble(G):
        return None
    return fitting_series(G).height
