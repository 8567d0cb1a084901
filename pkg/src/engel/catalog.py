"""Deterministic group constructors, the default catalog, and the group-file format."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path

import numpy as np
from sympy import isprime, primitive_root

from .group import DEFAULT_ENUMERATION_THRESHOLD, GroupHandle
from .perm import Permutation, parse_cycles

log = logging.getLogger(__name__)

__all__ = [
    "KINDS",
    "GroupRecipe",
    "GroupFileError",
    "build",
    "default_catalog",
    "recipe_order",
    "inverted_abelian_example",
    "sl2_diagonal_pair",
    "parse_recipe",
    "resolve_group",
    "load_group",
    "save_group",
    "dumps_group",
]

KINDS = (
    "cyclic",
    "dihedral",
    "symmetric",
    "alternating",
    "elementary-abelian",
    "direct-product",
    "semidirect",
    "sl2",
    "psl2",
    "quaternion",
    "inverted-abelian",
    "from-file",
)


@dataclass(frozen=True)
class GroupRecipe:
    kind: str
    params: tuple = ()
    label: str = ""
    expected: tuple = field(default=(), compare=False)  # (key, value) pairs checked by acceptance

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown recipe kind {self.kind!r}")

    @property
    def name(self) -> str:
        return self.label or f"{self.kind}:{','.join(map(str, self.params))}"


class GroupFileError(ValueError):
    pass


# -- small constructors -------------------------------------------------------


def _cycle(points: list[int], degree: int) -> Permutation:
    return Permutation.from_cycles([points], degree) if len(points) > 1 else Permutation.identity(degree)


def _cyclic(n: int) -> list[Permutation]:
    return [Permutation([(i + 1) % n for i in range(n)])]


def _dihedral(n: int) -> list[Permutation]:
    return [Permutation([(i + 1) % n for i in range(n)]), Permutation([(-i) % n for i in range(n)])]


def _symmetric(n: int) -> list[Permutation]:
    if n == 1:
        return [Permutation.identity(1)]
    if n == 2:
        return [_cycle([0, 1], 2)]
    return [_cycle([0, 1], n), _cycle(list(range(n)), n)]


def _alternating(n: int) -> list[Permutation]:
    if n < 3:
        return [Permutation.identity(n)]
    return [_cycle([0, 1, i], n) for i in range(2, n)]


def _vectors(p: int, k: int) -> list[tuple[int, ...]]:
    # index = sum v_i p^i
    return [tuple((i // p**j) % p for j in range(k)) for i in range(p**k)]


def _vec_index(v, p: int) -> int:
    return sum(int(x) * p**j for j, x in enumerate(v))


def _translations(p: int, k: int, extra: int = 0) -> list[Permutation]:
    vecs = _vectors(p, k)
    gens = []
    for j in range(k):
        imgs = [_vec_index([(x + (1 if i == j else 0)) % p for i, x in enumerate(v)], p) for v in vecs]
        gens.append(Permutation(imgs + list(range(len(vecs), len(vecs) + extra))))
    return gens


def _matpow(M: np.ndarray, e: int, p: int) -> np.ndarray:
    R = np.eye(len(M), dtype=np.int64)
    for _ in range(e):
        R = (R @ M) % p
    return R


def _semidirect(p: int, k: int, m: int, matrix: tuple) -> tuple[list[Permutation], dict]:
    """``F_p^k`` extended by a cyclic group of order ``m`` acting through ``matrix``.

    Points: the ``p^k`` vectors, followed by the ``m`` elements of the cyclic
    group so that the complement acts faithfully even when the matrix has
    smaller order.
    """
    M = np.array(matrix, dtype=np.int64).reshape(k, k) % p
    if not np.array_equal(_matpow(M, m, p), np.eye(k, dtype=np.int64)):
        raise ValueError(f"matrix does not have order dividing {m} over F_{p}")
    vecs = _vectors(p, k)
    nA = len(vecs)
    deg = nA + m
    trans = _translations(p, k, extra=m)
    c_imgs = [_vec_index((np.array(v) @ M) % p, p) for v in vecs]
    c_imgs += [nA + (j + 1) % m for j in range(m)]
    c = Permutation(c_imgs)
    order_M = next(e for e in range(1, m + 1) if np.array_equal(_matpow(M, e, p), np.eye(k, dtype=np.int64)))
    hall = {}
    if m % p:
        hall[p] = [c]
        kernel = m // order_M
        for q in _prime_factors(kernel):
            qpart = q ** _vfactor(m, q)
            hall[q] = trans + [c**qpart]
    meta = {
        "base": trans,
        "complement": [c],
        "hall": hall,
        "action_order": order_M,
    }
    return trans + [c], meta | {"degree": deg}


def _prime_factors(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if n % q == 0 and isprime(q)]


def _vfactor(n: int, q: int) -> int:
    e = 0
    while n % q == 0:
        n //= q
        e += 1
    return e


def _sl2_points(p: int) -> list[tuple[int, int]]:
    return [(x, y) for y in range(p) for x in range(p) if (x, y) != (0, 0)]


def _sl2_perm(p: int, M) -> Permutation:
    """Row-vector action ``v -> v M`` on nonzero vectors; a homomorphism under left-first products."""
    pts = _sl2_points(p)
    where = {v: i for i, v in enumerate(pts)}
    (a, b), (c, d) = M
    return Permutation([where[((x * a + y * c) % p, (x * b + y * d) % p)] for x, y in pts])


def _sl2(p: int) -> list[Permutation]:
    return [_sl2_perm(p, ((1, 1), (0, 1))), _sl2_perm(p, ((0, 1), (p - 1, 0)))]


def _psl2(p: int) -> list[Permutation]:
    inf = p
    t = Permutation([(x + 1) % p for x in range(p)] + [inf])
    imgs = []
    for x in range(p):
        imgs.append(inf if x == 0 else (-pow(x, -1, p)) % p)
    imgs.append(0)
    return [t, Permutation(imgs)]


def _quaternion(order: int) -> list[Permutation]:
    """Generalised quaternion group of 2-power order, right regular representation."""
    if order < 8 or order & (order - 1):
        raise ValueError("quaternion order must be a power of 2, at least 8")
    n = order // 2
    elems = [(i, j) for j in range(2) for i in range(n)]
    where = {e: k for k, e in enumerate(elems)}

    def mul(x, y):
        (i1, j1), (i2, j2) = x, y
        i = (i1 + (i2 if j1 == 0 else -i2)) % n
        j = j1 + j2
        if j == 2:
            i, j = (i + n // 2) % n, 0
        return (i, j)

    return [Permutation([where[mul(e, g)] for e in elems]) for g in [(1, 0), (0, 1)]]


def _shift(p: Permutation, offset: int, degree: int) -> Permutation:
    imgs = list(range(degree))
    for i, j in enumerate(p.images):
        imgs[i + offset] = j + offset
    return Permutation(imgs)


# -- recipes ------------------------------------------------------------------


def _validate_prime(p) -> int:
    p = int(p)
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    return p


def build(recipe: GroupRecipe, threshold: int = DEFAULT_ENUMERATION_THRESHOLD) -> GroupHandle:
    kind, prm = recipe.kind, recipe.params
    meta: dict = {}
    if kind == "cyclic":
        (n,) = prm
        if n < 1:
            raise ValueError("cyclic order must be positive")
        gens = _cyclic(n)
    elif kind == "dihedral":
        (n,) = prm
        if n < 3:
            raise ValueError("dihedral recipe needs n >= 3")
        gens = _dihedral(n)
        if n % 2:
            r, s = gens
            meta["hall"] = {q: [r ** (q ** _vfactor(n, q)), s] for q in _prime_factors(n)}
    elif kind == "symmetric":
        (n,) = prm
        if n < 1:
            raise ValueError("symmetric degree must be positive")
        gens = _symmetric(n)
        if n == 3:
            meta["hall"] = {3: [_cycle([0, 1], 3)]}
    elif kind == "alternating":
        (n,) = prm
        if n < 1:
            raise ValueError("alternating degree must be positive")
        gens = _alternating(n)
    elif kind == "elementary-abelian":
        p, k = prm
        p = _validate_prime(p)
        gens = _translations(p, int(k))
    elif kind == "quaternion":
        (n,) = prm
        gens = _quaternion(int(n))
    elif kind == "sl2":
        (p,) = prm
        gens = _sl2(_validate_prime(p))
    elif kind == "psl2":
        (p,) = prm
        p = _validate_prime(p)
        if p < 3:
            raise ValueError("psl2 recipe needs an odd prime")
        gens = _psl2(p)
    elif kind == "semidirect":
        p, k, m, matrix = prm
        gens, meta = _semidirect(_validate_prime(p), int(k), int(m), tuple(matrix))
    elif kind == "inverted-abelian":
        (r,) = prm
        return inverted_abelian_example(int(r), threshold)
    elif kind == "direct-product":
        parts = [build(sub, threshold) for sub in prm]
        degree = sum(g.degree for g in parts)
        gens, off = [], 0
        for g in parts:
            gens += [_shift(x, off, degree) for x in g.generators if not x.is_identity()]
            off += g.degree
        if not gens:
            gens = [Permutation.identity(degree)]
    elif kind == "from-file":
        (path,) = prm
        G = load_group(path, threshold)
        if recipe.label:
            G.label = recipe.label
        return G
    else:  # pragma: no cover - guarded by GroupRecipe
        raise ValueError(kind)
    meta.pop("degree", None)
    G = GroupHandle(gens, label=recipe.name, threshold=threshold, metadata=meta)
    _verify_metadata(G)
    return G


def _verify_metadata(G: GroupHandle) -> None:
    """Cheap checks on construction claims: base normality and Hall subgroup orders."""
    if not G.metadata or not G.is_enumerable:
        return
    if "base" in G.metadata:
        A = G.subgroup(G.metadata["base"])
        if not A.is_normal_in():
            raise RuntimeError(f"{G.label}: base is not normal")
    for q, gens in G.metadata.get("hall", {}).items():
        H = G.subgroup(gens)
        n = G.order
        while n % q == 0:
            n //= q
        if H.order != n:
            raise RuntimeError(f"{G.label}: Hall {q}'-subgroup has order {H.order}, expected {n}")


def inverted_abelian_example(r: int, threshold: int = DEFAULT_ENUMERATION_THRESHOLD) -> GroupHandle:
    """Elementary abelian ``3``-group of rank ``r+1`` extended by the inversion automorphism."""
    if r < 0:
        raise ValueError("r must be non-negative")
    k = r + 1
    minus = tuple(tuple((2 if i == j else 0) for j in range(k)) for i in range(k))
    gens, meta = _semidirect(3, k, 2, minus)
    meta.pop("degree")
    meta["expected_r_star"] = r + 1
    meta["expected_gamma_inf_order"] = 3**k
    G = GroupHandle(gens, label=f"AB_r{r}", threshold=threshold, metadata=meta)
    _verify_metadata(G)
    A = G.subgroup(meta["base"])
    b = meta["complement"][0]
    fixed = [a for a in A.elements() if a * b == b * a]
    if len(fixed) != 1:
        raise RuntimeError("b does not act fixed-point-freely on A")
    return G


def sl2_diagonal_pair(p: int, threshold: int = DEFAULT_ENUMERATION_THRESHOLD):
    """``SL_2(p)``, the diagonal element ``diag(z^-1, z)`` and the upper unitriangular group ``T``.

    ``z`` is the smallest primitive root mod ``p``; a valid choice needs
    ``z^2 != 1``, which rules out ``p = 2, 3``.
    """
    p = _validate_prime(p)
    if p < 5:
        raise ValueError(f"no element z of F_{p}^* with z^2 != 1")
    z = int(primitive_root(p))
    G = GroupHandle(_sl2(p), label=f"SL2({p})", threshold=threshold)
    g = _sl2_perm(p, ((pow(z, -1, p), 0), (0, z)))
    t = _sl2_perm(p, ((1, 1), (0, 1)))
    T = G.subgroup([t])
    if not G.contains(g):
        raise RuntimeError("diagonal element not in the constructed group")
    from .structure import commutator_subgroup

    if not T.mask[G.conj(T.indices, G.index_of(g))].all():
        raise RuntimeError("g does not normalize T")
    centralized = [x for x in T.elements() if x * g == g * x]
    if len(centralized) != 1:
        raise RuntimeError("C_T(g) is not trivial")
    if commutator_subgroup(T, G.subgroup([g])) != T:
        raise RuntimeError("[T, g] != T")
    return G, g, T


def _semi(label, p, k, m, matrix):
    return GroupRecipe("semidirect", (p, k, m, tuple(matrix)), label)


SEMIDIRECT_PRODUCTS = [
    _semi("C7:C3", 7, 1, 3, (2,)),
    _semi("C5:C4", 5, 1, 4, (2,)),
    _semi("C3:C4", 3, 1, 4, (2,)),
    _semi("C2^2:C3", 2, 2, 3, (0, 1, 1, 1)),
    _semi("C3^2:C4", 3, 2, 4, (0, 2, 1, 0)),
    _semi("C2^3:C7", 2, 3, 7, (0, 1, 0, 0, 0, 1, 1, 1, 0)),
    _semi("C11:C5", 11, 1, 5, (3,)),
    _semi("C7:C6", 7, 1, 6, (3,)),
    _semi("C2^4:C5", 2, 4, 5, (0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1)),
    _semi("C5^2:C3", 5, 2, 3, (0, 1, 4, 4)),
]


def _r(kind, *params, label=""):
    return GroupRecipe(kind, tuple(params), label)


def _dp(a: GroupRecipe, b: GroupRecipe) -> GroupRecipe:
    return GroupRecipe("direct-product", (a, b), f"{a.label}x{b.label}")


def default_catalog(max_order: int | None = None) -> list[GroupRecipe]:
    """The reproducible test corpus, in canonical order."""
    C = lambda n: _r("cyclic", n, label=f"C{n}")  # noqa: E731
    S = lambda n: _r("symmetric", n, label=f"S{n}")  # noqa: E731
    A = lambda n: _r("alternating", n, label=f"A{n}")  # noqa: E731
    D = lambda n: _r("dihedral", n, label=f"D{n}")  # noqa: E731
    Q = lambda n: _r("quaternion", n, label=f"Q{n}")  # noqa: E731
    E = lambda p, k: _r("elementary-abelian", p, k, label=f"C{p}^{k}")  # noqa: E731
    out: list[tuple[GroupRecipe, int]] = []
    out += [(C(n), n) for n in range(1, 61)]
    out += [(D(n), 2 * n) for n in range(3, 31)]
    out += [(S(n), _fact(n)) for n in range(3, 7)]
    out += [(A(n), _fact(n) // 2) for n in range(4, 7)]
    out += [(E(p, k), p**k) for p in (2, 3, 5) for k in (2, 3, 4)]
    out += [(Q(n), n) for n in (8, 16, 32)]
    out += [
        (GroupRecipe("inverted-abelian", (r,), f"AB_r{r}", (("r_star", r + 1), ("rank_gamma_inf", r + 1))), 2 * 3 ** (r + 1))
        for r in range(4)
    ]
    for p in (5, 7, 11):
        out.append((_r("sl2", p, label=f"SL2({p})"), (p * p - 1) * p))
        out.append((_r("psl2", p, label=f"PSL2({p})"), (p * p - 1) * p // 2))
    pairs = [
        (S(3), S(3)),
        (S(3), C(3)),
        (D(4), C(3)),
        (A(4), C(2)),
        (S(4), C(2)),
        (Q(8), C(3)),
        (S(3), D(4)),
        (A(5), C(2)),
        (D(5), C(3)),
        (E(2, 2), S(3)),
    ]
    for a, b in pairs:
        out.append((_dp(a, b), recipe_order(a) * recipe_order(b)))
    for rec in SEMIDIRECT_PRODUCTS:
        p, k, m, _ = rec.params
        out.append((rec, p**k * m))
    return [rec for rec, n in out if max_order is None or n <= max_order]


def _fact(n: int) -> int:
    return reduce(lambda a, b: a * b, range(1, n + 1), 1)


def recipe_order(rec: GroupRecipe) -> int:
    """Closed-form order of a built-in recipe."""
    k, prm = rec.kind, rec.params
    if k in ("cyclic", "quaternion"):
        return prm[0]
    if k == "dihedral":
        return 2 * prm[0]
    if k == "symmetric":
        return _fact(prm[0])
    if k == "alternating":
        return max(_fact(prm[0]) // 2, 1)
    if k == "elementary-abelian":
        return prm[0] ** prm[1]
    if k == "sl2":
        return (prm[0] ** 2 - 1) * prm[0]
    if k == "psl2":
        return (prm[0] ** 2 - 1) * prm[0] // 2
    if k == "inverted-abelian":
        return 2 * 3 ** (prm[0] + 1)
    if k == "semidirect":
        return prm[0] ** prm[1] * prm[2]
    if k == "direct-product":
        return recipe_order(prm[0]) * recipe_order(prm[1])
    raise ValueError(f"no closed form for {k}")


def parse_recipe(text: str) -> GroupRecipe:
    """``kind:args`` (comma-separated integers); direct products as ``direct-product:a*b``."""
    kind, _, rest = text.strip().partition(":")
    if kind == "direct-product":
        parts = tuple(parse_recipe(t) for t in rest.split("*"))
        return GroupRecipe(kind, parts, "x".join(p.name for p in parts))
    if kind == "from-file":
        return GroupRecipe(kind, (rest,), "")
    if kind not in KINDS:
        raise ValueError(f"unknown recipe kind {kind!r}")
    try:
        nums = [int(t) for t in rest.split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"bad recipe parameters in {text!r}") from None
    if kind == "semidirect":
        p, k, m, *matrix = nums
        return GroupRecipe(kind, (p, k, m, tuple(matrix)), text.strip())
    return GroupRecipe(kind, tuple(nums), text.strip())


def resolve_group(spec: str, threshold: int = DEFAULT_ENUMERATION_THRESHOLD) -> GroupHandle:
    """A group from a file path, a default-catalog label, or a ``kind:args`` recipe."""
    if os.path.exists(spec):
        return load_group(spec, threshold)
    for rec in default_catalog():
        if rec.label == spec:
            return build(rec, threshold)
    return build(parse_recipe(spec), threshold)


# -- group files --------------------------------------------------------------


def dumps_group(G: GroupHandle) -> str:
    lines = [f"degree: {G.degree}"]
    if G.label:
        lines.append(f"label: {G.label}")
    lines += [f"gen: {g.to_cycle_string()}" for g in G.generators]
    return "\n".join(lines) + "\n"


def save_group(G: GroupHandle, path) -> None:
    Path(path).write_text(dumps_group(G))


def loads_group(text: str, threshold: int = DEFAULT_ENUMERATION_THRESHOLD, source: str = "<string>") -> GroupHandle:
    degree = None
    label = ""
    gens: list[Permutation] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key, value = key.strip().lower(), value.strip()
        if not sep:
            raise GroupFileError(f"{source}, line {lineno}: expected 'key: value', got {raw!r}")
        if degree is None and key != "degree":
            raise GroupFileError(f"{source}, line {lineno}: first entry must be 'degree: <n>'")
        if key == "degree":
            if degree is not None:
                raise GroupFileError(f"{source}, line {lineno}: duplicate degree")
            try:
                degree = int(value)
            except ValueError:
                raise GroupFileError(f"{source}, line {lineno}: bad degree {value!r}") from None
            if degree < 1:
                raise GroupFileError(f"{source}, line {lineno}: degree must be positive")
        elif key == "label":
            label = value
        elif key == "gen":
            try:
                gens.append(parse_cycles(value, degree))
            except ValueError as exc:
                raise GroupFileError(f"{source}, line {lineno}: {exc}") from None
        else:
            raise GroupFileError(f"{source}, line {lineno}: unknown key {key!r}")
    if degree is None:
        raise GroupFileError(f"{source}: missing 'degree: <n>' line")
    G = GroupHandle(gens, degree, label, threshold)
    if G.order > threshold:
        log.warning("%s: order %d above enumeration threshold %d; loaded in stabilizer-chain tier", source, G.order, threshold)
    return G


def load_group(path, threshold: int = DEFAULT_ENUMERATION_THRESHOLD) -> GroupHandle:
    return loads_group(Path(path).read_text(), threshold, str(path))
