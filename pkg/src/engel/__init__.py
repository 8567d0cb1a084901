"""Engel sinks, ranks and nilpotent residuals of finite permutation groups."""

from .catalog import (
    GroupRecipe,
    build,
    default_catalog,
    load_group,
    inverted_abelian_example,
    sl2_diagonal_pair,
    resolve_group,
    save_group,
)
from .group import GroupHandle, NotEnumerableError, SubgroupHandle, closure
from .perm import Permutation, commutator, compose, left_normed_commutator, parse_cycles
from .rank import RankCertificate, min_generators, rank
from .report import GroupReport, RunConfig
from .sinks import SinkReport, minimal_sink, naive_sink_oracle, sink_profile
from .structure import (
    commutator_subgroup,
    derived_series,
    fitting_height,
    fitting_series,
    fitting_subgroup,
    gamma_infinity,
    is_nilpotent,
    is_soluble,
    lower_central_series,
    p_core,
    quotient_action,
    sylow_subgroup,
)

__version__ = "0.1.0"

__all__ = [
    "GroupRecipe",
    "build",
    "default_catalog",
    "load_group",
    "inverted_abelian_example",
    "sl2_diagonal_pair",
    "resolve_group",
    "save_group",
    "commutator_subgroup",
    "derived_series",
    "fitting_height",
    "fitting_series",
    "fitting_subgroup",
    "gamma_infinity",
    "is_nilpotent",
    "is_soluble",
    "lower_central_series",
    "p_core",
    "quotient_action",
    "sylow_subgroup",
    "GroupHandle",
    "NotEnumerableError",
    "SubgroupHandle",
    "closure",
    "Permutation",
    "commutator",
    "compose",
    "left_normed_commutator",
    "parse_cycles",
    "RankCertificate",
    "min_generators",
    "rank",
    "GroupReport",
    "RunConfig",
    "SinkReport",
    "minimal_sink",
    "naive_sink_oracle",
    "sink_profile",
]
