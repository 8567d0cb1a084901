"""Minimal generating sets, subgroup lattices up to conjugacy, and group rank.

``d(H)`` is the least size of a generating set of ``H``; the rank of ``G`` is
the maximum of ``d(H)`` over all subgroups ``H``.  Since ``d`` is invariant
under conjugation the maximum only needs one subgroup per conjugacy class.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .checks import CheckResult
from .group import GroupHandle, SubgroupHandle, close_indices, extend
from .structure import (
    commutator_subgroup,
    conjugacy_classes,
    gamma_infinity,
    fitting_height,
    fitting_subgroup,
    is_nilpotent,
    p_core,
    prime_divisors,
    sylow_subgroup,
)

log = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_LATTICE_CAP",
    "RankCertificate",
    "SubgroupClasses",
    "frattini_dimension",
    "min_generators",
    "subgroup_classes",
    "rank",
    "verify_kovacs",
    "verify_lprod",
    "verify_lf2",
]

DEFAULT_LATTICE_CAP = 50000
METHODS = ("abelian-shortcut", "nilpotent-shortcut", "exhaustive-lattice")


@dataclass
class RankCertificate:
    group: SubgroupHandle
    rank_value: int
    witness_subgroup: SubgroupHandle
    witness_generators: list
    method: str
    exact: bool = True
    classes_seen: int = 0

    def to_record(self) -> dict:
        return {
            "group": self.group.parent.label,
            "order": self.group.order,
            "rank": self.rank_value,
            "witness_order": self.witness_subgroup.order,
            "witness_generators": [g.to_cycle_string() for g in self.witness_generators],
            "method": self.method,
            "exact": self.exact,
        }


# -- helpers in the index space of a standalone group K --------------------


def _sub(K: GroupHandle, mask: np.ndarray, gens: list[int]) -> SubgroupHandle:
    gens = [int(g) for g in gens] or [0]
    return SubgroupHandle(K, [K.element(i) for i in gens], mask)


def _powers(K: GroupHandle, idx: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros(len(idx), dtype=np.int64)
    base = idx.astype(np.int64)
    while k:
        if k & 1:
            out = np.asarray(K.mul(out, base), dtype=np.int64)
        base = np.asarray(K.mul(base, base), dtype=np.int64)
        k >>= 1
    return out


def _frattini_like(K: GroupHandle, H: SubgroupHandle, p: int) -> np.ndarray:
    """Mask of ``H' H^p``, the smallest normal subgroup with elementary abelian ``p``-quotient."""
    D = commutator_subgroup(H, H)
    pw = np.unique(_powers(K, H.indices, p))
    used = [int(i) for i in D.gen_indices if i != 0]
    mask = D.mask
    for x in pw:
        if not mask[x]:
            mask = close_indices(K, [int(x)], (mask, used)) if used else close_indices(K, [int(x)])
            used.append(int(x))
    return mask


def _log_p(n: int, p: int) -> int:
    k = 0
    while n > 1:
        if n % p:
            raise ValueError(f"{n} is not a power of {p}")
        n //= p
        k += 1
    return k


def frattini_dimension(H: SubgroupHandle) -> int:
    """``log_p |P / Phi(P)|`` for a ``p``-group ``P`` (Burnside basis theorem)."""
    primes = prime_divisors(H.order)
    if not primes:
        return 0
    if len(primes) > 1:
        raise ValueError("frattini_dimension needs a p-group")
    p = primes[0]
    return _log_p(H.order // int(_frattini_like(H.parent, H, p).sum()), p)


def _abelianisation_bound(K: GroupHandle, H: SubgroupHandle) -> int:
    """``max_p log_p |H : H'H^p|``, a lower bound for ``d(H)``."""
    best = 0
    for p in prime_divisors(H.order):
        phi = int(_frattini_like(K, H, p).sum())
        best = max(best, _log_p(H.order // phi, p))
    return best


def _cyclic_candidates(K: GroupHandle, mask: np.ndarray) -> np.ndarray:
    """One generator per nontrivial cyclic subgroup inside ``mask``, larger cyclics first."""
    cyc = np.unique(K.cyclic_ids()[mask])
    cyc = cyc[cyc != 0]
    orders = K.element_orders()[cyc]
    return cyc[np.lexsort((cyc, -orders))]


def _search_generators(K: GroupHandle, mask: np.ndarray, gens: list[int], start_k: int) -> list[int]:
    """Smallest generating tuple of the subgroup ``mask``, trying sizes from ``start_k`` up.

    The first entry runs over representatives of cyclic subgroups up to
    conjugacy in the subgroup (a generating set conjugates to a generating
    set), the remaining entries over increasing combinations of all cyclic
    generators, never re-adding an element already generated.
    """
    target = int(mask.sum())
    if target == 1:
        return []
    cands = _cyclic_candidates(K, mask)
    pos = {int(c): i for i, c in enumerate(cands)}
    cyc = K.cyclic_ids()
    # classes of cyclic subgroups under conjugation by the subgroup
    parent = list(range(len(cands)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for s in gens:
        img = cyc[np.asarray(K.conj(cands, int(s)))]
        for i, j in enumerate(img):
            a, b = find(i), find(pos[int(j)])
            if a != b:
                parent[max(a, b)] = min(a, b)
    firsts = [i for i in range(len(cands)) if find(i) == i]

    def dfs(cur: np.ndarray, used: list[int], nxt: int, left: int, first: int) -> list[int] | None:
        if left == 0:
            return used if int(cur.sum()) == target else None
        for j in range(nxt, len(cands)):
            if j == first:
                continue
            c = int(cands[j])
            if cur[c]:
                continue
            new = extend(K, cur, used, c)
            if int(new.sum()) == target and left > 1:
                return used + [c]
            found = dfs(new, used + [c], j + 1, left - 1, first)
            if found is not None:
                return found
        return None

    k = max(start_k, 1)
    while True:
        for f in firsts:
            c = int(cands[f])
            m0 = close_indices(K, [c])
            if k == 1:
                if int(m0.sum()) == target:
                    return [c]
                continue
            found = dfs(m0, [c], 0, k - 1, f)
            if found is not None:
                return found
        k += 1


def min_generators(H: SubgroupHandle, method: str = "lattice", cap: int = DEFAULT_LATTICE_CAP) -> tuple[int, list]:
    """``d(H)`` and a generating set of that size (as permutations).

    ``"lattice"`` reads it off the subgroup-class recursion.  ``"search"``
    tries generating tuples directly, starting at ``max_p log_p |H : H'H^p|``;
    it is exponential in ``d`` and kept as an independent cross-check.
    """
    K = H.as_group()
    if method == "lattice":
        lat = subgroup_classes(K, cap)
        if not lat.complete:
            raise ValueError("subgroup lattice hit the cap; d(H) unknown")
        top = int(np.argmax([S.order for S in lat.reps]))
        return lat.d[top], [K.element(i) for i in lat.min_gens[top]]
    if method != "search":
        raise ValueError(f"unknown method {method!r}")
    whole = K.whole()
    start = _abelianisation_bound(K, whole)
    gens = _search_generators(K, whole.mask, [int(i) for i in whole.gen_indices], start)
    return len(gens), [K.element(i) for i in gens]


# -- subgroup lattice ---------------------------------------------------------


@dataclass
class SubgroupClasses:
    """Subgroup class representatives with ``d`` and a minimal generating set for each."""

    group: GroupHandle
    reps: list[SubgroupHandle]
    d: list[int]
    min_gens: list[list[int]]
    complete: bool


def _conjugator(K: GroupHandle, a_gens: list[int], b_mask: np.ndarray, over: np.ndarray) -> int:
    """Some ``g`` in ``over`` with ``a_gens^g`` inside ``b_mask``, or ``-1``."""
    ok = np.ones(len(over), dtype=bool)
    for s in a_gens:
        ok &= b_mask[np.asarray(K.conj(int(s), over))]
        if not ok.any():
            return -1
    return int(over[np.argmax(ok)])


def _normalizer_elements(K: GroupHandle, gens: list[int], mask: np.ndarray) -> np.ndarray:
    ok = np.ones(K.N, dtype=bool)
    ar = np.arange(K.N)
    for s in gens:
        ok &= mask[np.asarray(K.conj(int(s), ar))]
    return np.flatnonzero(ok)


def subgroup_classes(K: GroupHandle, cap: int = DEFAULT_LATTICE_CAP) -> SubgroupClasses:
    """Representatives of all conjugacy classes of subgroups of ``K``, with ``d`` of each.

    Grown from the trivial subgroup by joining class representatives with
    cyclic subgroups; every subgroup is a join of cyclic subgroups, and joining
    a conjugate of ``H`` with ``C`` is conjugate to joining ``H`` with a
    conjugate of ``C``, so this reaches every class.  Every join is kept as an
    edge ``H -> class(<H, c>)``.  Dropping the last element of a minimal
    generating set of ``S`` leaves a proper subgroup with an edge into the
    class of ``S``, so ``d(S) = 1 + min d(H)`` over incoming edges.
    """
    key = ("lattice", cap)
    if key in K._cache:
        return K._cache[key]
    labels = conjugacy_classes(K)
    _, compact = np.unique(labels, return_inverse=True)
    nlab = int(compact.max()) + 1
    cyclics = np.sort(_cyclic_candidates(K, np.ones(K.N, dtype=bool)))
    cyc_ids = K.cyclic_ids()
    over = np.arange(K.N)

    def invariant(mask):
        return np.bincount(compact[mask], minlength=nlab).tobytes()

    triv = np.zeros(K.N, dtype=bool)
    triv[0] = True
    reps: list[tuple[np.ndarray, list[int]]] = [(triv, [])]
    by_inv = {invariant(triv): [0]}
    seen = {np.packbits(triv).tobytes(): (0, 0)}  # mask -> (class, g) with mask^g == rep
    edges: list[tuple[int, int, int, int]] = []  # (source class, c, target class, g)
    complete = True
    i = 0
    while i < len(reps) and complete:
        mask, gens = reps[i]
        src = i
        i += 1
        # joins with N(H)-conjugate cyclic subgroups are conjugate; keep one per orbit
        outside = cyclics[~mask[cyclics]]
        if len(outside) == 0:
            continue
        norm = _normalizer_elements(K, gens, mask)
        orbit_min = cyc_ids[np.asarray(K.conj(outside[:, None], norm[None, :]))].min(axis=1)
        for c in outside[orbit_min == outside]:
            c = int(c)
            new = extend(K, mask, gens, c) if gens else close_indices(K, [c])
            k = np.packbits(new).tobytes()
            if k in seen:
                j, g = seen[k]
                edges.append((src, c, j, g))
                continue
            new_gens = gens + [c]
            bucket = by_inv.setdefault(invariant(new), [])
            for j in bucket:
                g = _conjugator(K, new_gens, reps[j][0], over)
                if g >= 0:
                    break
            else:
                j, g = len(reps), 0
                bucket.append(j)
                reps.append((new, new_gens))
            seen[k] = (j, g)
            edges.append((src, c, j, g))
            if len(reps) >= cap:
                complete = False
                break

    orders = [int(m.sum()) for m, _ in reps]
    incoming: dict[int, list[tuple[int, int, int]]] = {}
    for src, c, j, g in edges:
        incoming.setdefault(j, []).append((src, c, g))
    d = [0] * len(reps)
    min_gens: list[list[int]] = [[] for _ in reps]
    for j in sorted(range(1, len(reps)), key=lambda j: orders[j]):
        best = None
        for src, c, g in incoming.get(j, []):
            if orders[src] < orders[j] and (best is None or d[src] + 1 < best[0]):
                best = (d[src] + 1, src, c, g)
        d[j], src, c, g = best
        min_gens[j] = [int(K.conj(x, g)) for x in min_gens[src] + [c]]
    out = SubgroupClasses(K, [_sub(K, m, g) for m, g in reps], d, min_gens, complete)
    K._cache[key] = out
    return out


# -- rank ---------------------------------------------------------------------


def _lift(H: SubgroupHandle, K: GroupHandle, sub: SubgroupHandle) -> SubgroupHandle:
    mask = np.zeros(H.parent.N, dtype=bool)
    mask[H.indices[sub.indices]] = True
    return SubgroupHandle(H.parent, list(sub.generators), mask)


def _basis(K: GroupHandle, mask: np.ndarray, phi: np.ndarray) -> list[int]:
    """Burnside basis: greedily pick elements outside ``<picked, Phi>``."""
    picked = []
    phi_gens = [int(x) for x in np.flatnonzero(phi) if x != 0]
    cur = close_indices(K, phi_gens) if phi_gens else phi.copy()
    used = phi_gens
    for x in np.flatnonzero(mask):
        if not cur[x]:
            cur = close_indices(K, [int(x)], (cur, used)) if used else close_indices(K, [int(x)])
            used = used + [int(x)]
            picked.append(int(x))
    return picked


def _omega_rank(K: GroupHandle, p: int) -> tuple[int, list[int]]:
    """Rank of the Sylow ``p``-subgroup of an abelian group, via the elements of order ``p``."""
    orders = K.element_orders()
    omega = np.flatnonzero((orders == 1) | (orders == p))
    mask = np.zeros(K.N, dtype=bool)
    mask[omega] = True
    triv = np.zeros(K.N, dtype=bool)
    triv[0] = True
    return _log_p(len(omega), p), _basis(K, mask, triv)


def _p_group_lattice_rank(K: GroupHandle, cap: int) -> tuple[int, SubgroupHandle, list[int], bool, int]:
    lat = subgroup_classes(K, cap)
    best = (0, lat.reps[0], [])
    p = prime_divisors(K.N)[0]
    for S in lat.reps:
        if S.order == 1:
            continue
        phi = _frattini_like(K, S, p)
        d = _log_p(S.order // int(phi.sum()), p)
        if d > best[0]:
            best = (d, S, _basis(K, S.mask, phi))
    return best[0], best[1], best[2], lat.complete, len(lat.reps)


def _exhaustive_rank(K: GroupHandle, cap: int) -> tuple[int, SubgroupHandle, list[int], bool, int]:
    lat = subgroup_classes(K, cap)
    j = int(np.argmax(lat.d))
    return lat.d[j], lat.reps[j], lat.min_gens[j], lat.complete, len(lat.reps)


def _factor_exponents(n: int) -> list[int]:
    from sympy import factorint

    return list(factorint(n).values())


def _is_abelian(K: GroupHandle) -> bool:
    g = K.gen_indices
    return bool(np.all(K.comm(g[:, None], g[None, :]) == 0))


def rank(H: SubgroupHandle | GroupHandle, method: str | None = None, cap: int = DEFAULT_LATTICE_CAP) -> RankCertificate:
    """Rank of ``H`` with a witness subgroup and a minimal generating set for it.

    ``method`` defaults to the cheapest valid one: abelian groups read the rank
    off the elements of prime order, nilpotent groups take the maximum over
    their Sylow subgroups, everything else enumerates subgroup classes.
    """
    if isinstance(H, GroupHandle):
        H = H.whole()
    G = H.parent
    key = ("rank", H.key(), method, cap)
    if key in G._cache:
        return G._cache[key]
    K = H.as_group()
    if method is None:
        if _is_abelian(K):
            method = "abelian-shortcut"
        elif is_nilpotent(K):
            method = "nilpotent-shortcut"
        else:
            method = "exhaustive-lattice"
    if method not in METHODS:
        raise ValueError(f"unknown rank method {method!r}")

    exact, seen = True, 0
    if K.N == 1:
        value, wit, wgens = 0, K.whole(), []
    elif method == "abelian-shortcut":
        if not _is_abelian(K):
            raise ValueError("abelian-shortcut on a nonabelian group")
        value, wgens = -1, []
        for p in prime_divisors(K.N):
            r, basis = _omega_rank(K, p)
            if r > value:
                value, wgens = r, basis
        wit = _sub(K, close_indices(K, wgens), wgens)
    elif method == "nilpotent-shortcut":
        if not is_nilpotent(K):
            raise ValueError("nilpotent-shortcut on a non-nilpotent group")
        value, wit, wgens = -1, None, []
        for p in prime_divisors(K.N):
            P = sylow_subgroup(K, p)
            Pk = P.as_group()
            if _is_abelian(Pk):
                r, basis = _omega_rank(Pk, p)
                wsub = _sub(Pk, close_indices(Pk, basis), basis)
            else:
                r, wsub, basis, ok, n = _p_group_lattice_rank(Pk, cap)
                exact &= ok
                seen += n
            if r > value:
                value = r
                wit = _lift(P, Pk, wsub)  # in K's index space
                wgens = [K.index_of(Pk.element(b)) for b in basis]
        wit = _sub(K, wit.mask, wgens)
    else:
        value, wit, wgens, exact, seen = _exhaustive_rank(K, cap)

    wit_parent = _lift(H, K, wit)
    cert = RankCertificate(
        H,
        value,
        SubgroupHandle(G, [K.element(i) for i in wgens] or [K.element(0)], wit_parent.mask),
        [K.element(i) for i in wgens],
        method,
        exact,
        seen,
    )
    G._cache[key] = cert
    return cert


# -- lemma checks -------------------------------------------------------------


def verify_kovacs(G: GroupHandle, cap: int = DEFAULT_LATTICE_CAP) -> CheckResult:
    """``rank(G) <= 1 + max_p rank(Sylow_p(G))``."""
    cert = rank(G, cap=cap)
    if not cert.exact:
        return CheckResult.skipped("kovacs", "lattice cap reached", rank_G=cert.rank_value)
    sylow_ranks = {}
    for p in prime_divisors(G.N):
        c = rank(sylow_subgroup(G, p), cap=cap)
        if not c.exact:
            return CheckResult.skipped("kovacs", f"lattice cap reached on Sylow {p}")
        sylow_ranks[p] = c.rank_value
    d = max(sylow_ranks.values(), default=0)
    values = dict(rank_G=cert.rank_value, max_sylow_rank=d)
    if cert.rank_value <= d + 1:
        return CheckResult.passed("kovacs", f"{cert.rank_value} <= {d} + 1", **values)
    wit = ",".join(g.to_cycle_string() for g in cert.witness_generators)
    return CheckResult.failed("kovacs", f"{cert.rank_value} > {d} + 1", witness=wit, **values)


def _gen_commutator_product(K: SubgroupHandle, a: int) -> np.ndarray:
    """``[K, a]``: subgroup generated by all ``[k, a]``, ``k`` in ``K``."""
    G = K.parent
    comms = np.unique(np.asarray(G.comm(K.indices, a)))
    return close_indices(G, comms[comms != 0])


def verify_lprod(K: SubgroupHandle, A: SubgroupHandle) -> CheckResult:
    """``[K, A] = [K, a_1] ... [K, a_k]`` over the generators ``a_i`` of ``A``."""
    G = K.parent
    if A.parent is not G:
        raise ValueError("K and A need a common parent")
    for a in A.gen_indices:
        if not K.mask[np.asarray(G.conj(K.gen_indices, int(a)))].all():
            return CheckResult.skipped("lprod", "A does not normalize K")
    lhs = commutator_subgroup(K, A)
    rhs = np.zeros(G.N, dtype=bool)
    rhs[0] = True
    for a in A.gen_indices:
        rhs |= _gen_commutator_product(K, int(a))
    rhs = close_indices(G, np.flatnonzero(rhs))
    values = dict(lhs_order=lhs.order, rhs_order=int(rhs.sum()))
    if np.array_equal(lhs.mask, rhs):
        return CheckResult.passed("lprod", **values)
    diff = np.flatnonzero(lhs.mask ^ rhs)
    return CheckResult.failed("lprod", "[K,A] differs from the product", witness=G.element(int(diff[0])).to_cycle_string(), **values)


def verify_lf2(H: GroupHandle) -> CheckResult:
    """``gamma_inf(H) = prod_q [F_q, H_q']`` for a group of Fitting height at most 2.

    Needs Hall ``q'``-subgroups from construction metadata (key ``"hall"``:
    prime -> generator list).
    """
    hall = H.metadata.get("hall")
    if not hall and is_nilpotent(H):
        # Sylow subgroups are normal, so the Hall q'-subgroup is the product of the others
        primes = prime_divisors(H.N)
        hall = {q: [g for p in primes if p != q for g in sylow_subgroup(H, p).generators] or [H.element(0)] for q in primes}
    if not hall:
        return CheckResult.skipped("lf2", "no Hall subgroup metadata")
    h = fitting_height(H)
    if h is None or h > 2:
        return CheckResult.skipped("lf2", f"Fitting height {h} is not at most 2")
    F = fitting_subgroup(H)
    rhs = np.zeros(H.N, dtype=bool)
    rhs[0] = True
    for q in prime_divisors(F.order):
        if q not in hall:
            return CheckResult.skipped("lf2", f"no Hall {q}'-subgroup in metadata")
        Hq = H.subgroup(hall[q])
        qpart = q ** _factor_q(H.N, q)
        if Hq.order != H.N // qpart:
            return CheckResult.skipped("lf2", f"metadata Hall {q}'-subgroup has wrong order {Hq.order}")
        Fq = p_core(H, q)
        rhs |= commutator_subgroup(Fq, Hq).mask
    rhs = close_indices(H, np.flatnonzero(rhs))
    lhs = gamma_infinity(H)
    values = dict(gamma_inf_order=lhs.order, product_order=int(rhs.sum()))
    if np.array_equal(lhs.mask, rhs):
        return CheckResult.passed("lf2", **values)
    diff = np.flatnonzero(lhs.mask ^ rhs)
    return CheckResult.failed("lf2", "gamma_inf differs from the product", witness=H.element(int(diff[0])).to_cycle_string(), **values)


def _factor_q(n: int, q: int) -> int:
    k = 0
    while n % q == 0:
        n //= q
        k += 1
    return k
