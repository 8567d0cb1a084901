"""Catalog-wide runs: per-group structural rows, lemma checks, and their serialisation.

Rows are computed independently per group (optionally in worker processes)
and emitted in catalog order, so the output depends only on the config.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .catalog import GroupRecipe, build, default_catalog, parse_recipe, recipe_order
from .checks import CheckResult
from .group import DEFAULT_ENUMERATION_THRESHOLD, GroupHandle, SubgroupHandle
from .rank import DEFAULT_LATTICE_CAP, rank, verify_kovacs, verify_lf2, verify_lprod
from .sinks import sink_profile, verify_l0
from .structure import (
    derived_subgroup,
    fitting_height,
    fitting_subgroup,
    gamma_infinity,
    is_nilpotent,
    is_soluble,
    normalizer,
    prime_divisors,
    sylow_subgroup,
)

log = logging.getLogger(__name__)

__all__ = [
    "LEMMAS",
    "CSV_COLUMNS",
    "ConfigError",
    "RunConfig",
    "GroupReport",
    "RunResult",
    "select_recipes",
    "analyse",
    "run",
    "render",
    "l0_pairs",
]

LEMMAS = ("kovacs", "lprod", "lf2", "l0")
FORMATS = ("csv", "json")
THREADS_ENV = "ENGEL_THREADS"

# frozen external contract; extend only at the end
CSV_COLUMNS = (
    "label",
    "order",
    "soluble",
    "nilpotent",
    "fitting_height",
    "rank_G",
    "r_star",
    "rank_gamma_inf",
    "kovacs",
    "lprod",
    "lf2",
    "l0",
    "cap",
)
UNDEFINED = "-"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    catalog: str = "default"
    max_order: int = 2000
    lemmas: tuple[str, ...] = ()
    format: str = "csv"
    out: str | None = None
    threads: int = 1
    enumeration_threshold: int = DEFAULT_ENUMERATION_THRESHOLD
    lattice_cap: int = DEFAULT_LATTICE_CAP
    seed: int = 42
    l0_pairs: int = 500
    corrupt_oracle: bool = False  # harness self-test: checks run against a wrong sink

    def __post_init__(self):
        for name in ("max_order", "threads", "enumeration_threshold", "lattice_cap", "l0_pairs"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        bad = [x for x in self.lemmas if x not in LEMMAS]
        if bad:
            raise ConfigError(f"unknown lemma(s) {', '.join(bad)}; choose from {', '.join(LEMMAS)}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")

    @classmethod
    def from_mapping(cls, data: dict) -> RunConfig:
        known = {f.name for f in fields(cls)}
        kw = {}
        for key, value in data.items():
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if name == "lemmas":
                value = _split_lemmas(value)
            kw[name] = value
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> RunConfig:
        return cls.from_mapping(read_config_file(path))

    def header(self) -> dict:
        """The settings that determine the output (thread count and paths do not)."""
        d = asdict(self)
        for k in ("out", "threads", "format", "corrupt_oracle"):
            d.pop(k)
        d["lemmas"] = list(self.lemmas)
        return d


def read_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data


def _split_lemmas(value) -> tuple[str, ...]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    return tuple(v.strip() for v in value)


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


@dataclass
class GroupReport:
    label: str
    order: int
    soluble: bool | None = None
    nilpotent: bool | None = None
    fitting_height: int | None = None
    rank_G: int | None = None
    r_star: int | None = None
    rank_gamma_inf: int | None = None
    lemmas: dict[str, CheckResult] = field(default_factory=dict)
    cap: str = ""
    seconds: float = 0.0  # kept out of serialised output

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.lemmas.values() if c.status == "fail"]

    def invariant_violations(self) -> list[str]:
        out = []
        if self.nilpotent and (self.r_star or self.rank_gamma_inf):
            out.append("nilpotent group with nonzero r_star or rank_gamma_inf")
        if self.nilpotent is False and self.r_star == 0:
            out.append("non-nilpotent group with r_star = 0")
        if self.rank_gamma_inf is not None and self.rank_G is not None and self.rank_gamma_inf > self.rank_G:
            out.append("rank_gamma_inf exceeds rank_G")
        return out

    def csv_row(self) -> list[str]:
        def fmt(v):
            if v is None:
                return UNDEFINED
            if isinstance(v, bool):
                return "yes" if v else "no"
            return str(v)

        def lemma(name):
            c = self.lemmas.get(name)
            if c is None:
                return UNDEFINED
            if c.status == "fail":
                return f"fail:{c.witness}"
            if c.status == "skipped":
                return f"skipped:{c.detail}"
            return "pass"

        return [
            self.label,
            str(self.order),
            fmt(self.soluble),
            fmt(self.nilpotent),
            fmt(self.fitting_height),
            fmt(self.rank_G),
            fmt(self.r_star),
            fmt(self.rank_gamma_inf),
            *(lemma(x) for x in LEMMAS),
            self.cap,
        ]

    def json_record(self) -> dict:
        return {
            "label": self.label,
            "order": self.order,
            "soluble": self.soluble,
            "nilpotent": self.nilpotent,
            "fitting_height": UNDEFINED if self.fitting_height is None else self.fitting_height,
            "rank_G": self.rank_G,
            "r_star": self.r_star,
            "rank_gamma_inf": self.rank_gamma_inf,
            "lemmas": {
                k: {"status": c.status, "detail": c.detail, "witness": c.witness, "values": c.values}
                for k, c in sorted(self.lemmas.items(), key=lambda kv: LEMMAS.index(kv[0]))
            },
            "cap": self.cap,
        }


# -- group selection ----------------------------------------------------------


def select_recipes(cfg: RunConfig) -> list[GroupRecipe]:
    """``default`` / ``nilpotent`` (filtered when built), or a comma list of labels, recipes and files."""
    if cfg.catalog in ("default", "nilpotent"):
        return default_catalog(cfg.max_order)
    by_label = {r.label: r for r in default_catalog()}
    out = []
    for item in cfg.catalog.split(","):
        item = item.strip()
        if not item:
            continue
        if os.path.exists(item):
            out.append(GroupRecipe("from-file", (item,), Path(item).stem))
        elif item in by_label:
            out.append(by_label[item])
        else:
            try:
                out.append(parse_recipe(item))
            except ValueError as exc:
                raise ConfigError(f"catalog entry {item!r}: {exc}") from None
    return [r for r in out if r.kind == "from-file" or recipe_order(r) <= cfg.max_order]


# -- lemma case generation ----------------------------------------------------


def _combine(lemma: str, results: list[CheckResult]) -> CheckResult:
    """One verdict per group: any failure wins, then any pass, else skipped."""
    fails = [r for r in results if r.status == "fail"]
    passes = [r for r in results if r.status == "pass"]
    counts = dict(cases=len(results), passed=len(passes), skipped=len(results) - len(passes) - len(fails))
    if fails:
        f = fails[0]
        return CheckResult.failed(lemma, f.detail, f.witness, failed=len(fails), **counts)
    if passes:
        return CheckResult.passed(lemma, **counts)
    reason = results[0].detail if results else "no applicable case"
    return CheckResult.skipped(lemma, reason, **counts)


def _sylow_conjugates(G: GroupHandle, P: SubgroupHandle) -> list[SubgroupHandle]:
    """All conjugates of ``P``, in order of their sorted element lists."""
    imgs = np.sort(np.asarray(G.conj(P.indices[:, None], np.arange(G.N)[None, :])), axis=0).T
    _, first = np.unique(imgs, axis=0, return_index=True)
    out = []
    for x in first:
        mask = np.zeros(G.N, dtype=bool)
        mask[imgs[x]] = True
        gens = np.atleast_1d(G.conj(P.gen_indices, int(x)))
        out.append(SubgroupHandle(G, [G.element(int(i)) for i in gens], mask))
    return out


def l0_pairs(G: GroupHandle, limit: int, seed: int) -> list[tuple[int, SubgroupHandle, int]]:
    """``(p, P, g)`` with ``P`` a Sylow ``p``-subgroup and ``g`` a ``p'``-element normalizing it.

    Listed canonically (prime, conjugate, element index); above ``limit`` a
    seeded sample of ``limit`` pairs is kept, still in canonical order.
    """
    orders = G.element_orders()
    pairs = []
    for p in prime_divisors(G.N):
        coprime = orders % p != 0
        for P in _sylow_conjugates(G, sylow_subgroup(G, p)):
            for g in np.flatnonzero(normalizer(G, P) & coprime):
                pairs.append((p, P, int(g)))
    if len(pairs) > limit:
        keep = sorted(random.Random(seed).sample(range(len(pairs)), limit))
        pairs = [pairs[i] for i in keep]
    return pairs


def _check_l0(G: GroupHandle, cfg: RunConfig) -> CheckResult:
    prof = sink_profile(G, rank=False)
    results = []
    for _, P, g in l0_pairs(G, cfg.l0_pairs, cfg.seed):
        sink = G.trivial() if cfg.corrupt_oracle else prof.report(g).sink_subgroup
        results.append(verify_l0(G, P, g, sink))
    return _combine("l0", results)


def _check_lprod(G: GroupHandle) -> CheckResult:
    whole = G.whole()
    Ks = [whole, derived_subgroup(whole), fitting_subgroup(G)]
    As = [whole] + [sylow_subgroup(G, p) for p in prime_divisors(G.N)]
    return _combine("lprod", [verify_lprod(K, A) for K in Ks for A in As])


def _lemma(name: str, G: GroupHandle, cfg: RunConfig) -> CheckResult:
    if name == "kovacs":
        return verify_kovacs(G, cfg.lattice_cap)
    if name == "lprod":
        return _check_lprod(G)
    if name == "lf2":
        return verify_lf2(G)
    return _check_l0(G, cfg)


# -- per-group analysis -------------------------------------------------------


def _build(recipe: GroupRecipe, cfg: RunConfig) -> GroupHandle:
    if recipe.kind == "from-file":
        from .catalog import load_group

        G = load_group(recipe.params[0], cfg.enumeration_threshold)
        if not G.label:
            G.label = recipe.label
        return G
    return build(recipe, cfg.enumeration_threshold)


def analyse(recipe: GroupRecipe, cfg: RunConfig, structure: bool = True) -> GroupReport | None:
    """The row for one group, or ``None`` when the catalog filter excludes it."""
    t0 = time.perf_counter()
    G = _build(recipe, cfg)
    label = G.label or recipe.name
    rep = GroupReport(label, G.order)
    if not G.is_enumerable:
        sg = G._sympy_group()
        rep.soluble, rep.nilpotent = bool(sg.is_solvable), bool(sg.is_nilpotent)
        rep.cap = "enumeration"
        for name in cfg.lemmas:
            rep.lemmas[name] = CheckResult.skipped(name, "group above enumeration threshold")
        return None if cfg.catalog == "nilpotent" and not rep.nilpotent else rep
    rep.nilpotent = is_nilpotent(G)
    if cfg.catalog == "nilpotent" and not rep.nilpotent:
        return None
    rep.soluble = is_soluble(G)
    rep.fitting_height = fitting_height(G)
    if structure:
        cert = rank(G, cap=cfg.lattice_cap)
        gcert = rank(gamma_infinity(G), cap=cfg.lattice_cap)
        rep.rank_G, rep.rank_gamma_inf = cert.rank_value, gcert.rank_value
        rep.r_star = sink_profile(G, rank=True).r_star
        if not (cert.exact and gcert.exact):
            rep.cap = "lattice"
    for name in cfg.lemmas:
        rep.lemmas[name] = _lemma(name, G, cfg)
    rep.seconds = time.perf_counter() - t0
    log.info("%s: %.2fs", label, rep.seconds)
    return rep


@dataclass
class RunResult:
    config: RunConfig
    rows: list[GroupReport]
    structure: bool = True

    @property
    def failures(self) -> list[tuple[str, CheckResult]]:
        return [(r.label, c) for r in self.rows for c in r.failures]

    @property
    def violations(self) -> list[tuple[str, str]]:
        return [(r.label, v) for r in self.rows for v in r.invariant_violations()]

    @property
    def ok(self) -> bool:
        return not self.failures and not self.violations

    def summary(self) -> list[tuple[int, int, int]]:
        """``(r_star, max rank_gamma_inf, groups)`` over rows with exact values."""
        best: dict[int, list[int]] = {}
        for r in self.rows:
            if r.r_star is None or r.rank_gamma_inf is None or r.cap:
                continue
            b = best.setdefault(r.r_star, [0, 0])
            b[0] = max(b[0], r.rank_gamma_inf)
            b[1] += 1
        return [(k, v[0], v[1]) for k, v in sorted(best.items())]

    def skipped(self) -> list[tuple[str, CheckResult]]:
        return [(r.label, c) for r in self.rows for c in r.lemmas.values() if c.status == "skipped"]


def _analyse_job(args):
    recipe, cfg, structure = args
    return analyse(recipe, cfg, structure)


def run(cfg: RunConfig, structure: bool = True) -> RunResult:
    """Analyse every selected group; rows come back in catalog order whatever the thread count."""
    recipes = select_recipes(cfg)
    jobs = [(r, cfg, structure) for r in recipes]
    if cfg.threads == 1 or len(jobs) <= 1:
        rows = [_analyse_job(j) for j in jobs]
    else:
        rows = [None] * len(jobs)
        # largest first so the long jobs do not trail at the end
        order = sorted(range(len(jobs)), key=lambda i: -_cost(recipes[i]))
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            futs = {pool.submit(_analyse_job, jobs[i]): i for i in order}
            for fut in as_completed(futs):
                rows[futs[fut]] = fut.result()
    return RunResult(cfg, [r for r in rows if r is not None], structure)


def _cost(recipe: GroupRecipe) -> int:
    try:
        return recipe_order(recipe)
    except ValueError:
        return 0


# -- output -------------------------------------------------------------------


def render(result: RunResult) -> str:
    cfg = result.config
    if cfg.format == "json":
        doc = {
            "config": cfg.header(),
            "columns": list(CSV_COLUMNS),
            "groups": [r.json_record() for r in result.rows],
            "summary": [{"r_star": a, "max_rank_gamma_inf": b, "groups": c} for a, b, c in result.summary()],
            "failures": len(result.failures),
            "invariant_violations": [{"label": a, "violation": b} for a, b in result.violations],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in result.rows:
        w.writerow(r.csv_row())
    buf.write("\n")
    w.writerow(("r_star", "max_rank_gamma_inf", "groups"))
    for row in result.summary():
        w.writerow(row)
    return buf.getvalue()


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
