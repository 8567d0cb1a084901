"""Invariants on random permutation groups (not just catalog entries)."""

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import elems, oracle_group
from engel.group import GroupHandle
from engel.perm import Permutation
from engel.rank import min_generators, rank
from engel.sinks import commutator_map, naive_sink_oracle, sink_profile
from engel.structure import (
    derived_subgroup,
    fitting_height,
    fitting_subgroup,
    gamma_infinity,
    is_nilpotent,
    is_soluble,
    lower_central_series,
    quotient_action,
)


@st.composite
def groups(draw, max_degree=6):
    n = draw(st.integers(2, max_degree))
    gens = draw(st.lists(st.permutations(list(range(n))), min_size=1, max_size=3))
    return GroupHandle([Permutation(g) for g in gens])


@given(groups())
def test_enumeration_matches_oracle(G):
    assert elems(G.whole()) == oracle_group(G)


@given(groups())
def test_nilpotent_iff_all_sinks_trivial(G):
    prof = sink_profile(G, rank=True)
    assert is_nilpotent(G) == (prof.r_star == 0)
    assert is_nilpotent(G) == all(r.size == 1 for r in prof.reports())


@given(groups(5))
def test_sinks_match_brute_force(G):
    E = oracle_group(G)
    prof = sink_profile(G, rank=False)
    for i in range(0, G.N, max(1, G.N // 10)):
        g = G.element(i)
        fast = frozenset(tuple(x.images) for x in prof.report(i).sink_elements())
        assert fast == oracles.sink(E, g.images, G.degree)
        assert naive_sink_oracle(G, i, G.order) == set(prof.report(i).sink_elements())


@given(groups())
def test_sink_is_permuted_by_commutator_map(G):
    for i in range(0, G.N, max(1, G.N // 8)):
        rep = sink_profile(G, rank=False).report(i)
        phi = commutator_map(G, i)
        assert np.array_equal(np.sort(phi[rep.sink]), rep.sink)


@given(groups())
def test_series_and_residual(G):
    lcs = lower_central_series(G)
    for a, b in zip(lcs.terms, lcs.terms[1:]):
        assert b <= a
    assert lcs.terms[1] == derived_subgroup(G.whole())
    gi = gamma_infinity(G)
    assert gi.is_normal_in()
    assert is_nilpotent(quotient_action(G, gi).group)
    assert quotient_action(G, gi).group.order == G.order // gi.order


@given(groups())
def test_fitting_subgroup_and_height(G):
    F = fitting_subgroup(G)
    assert F.is_normal_in() and is_nilpotent(F.as_group())
    h = fitting_height(G)
    assert (h is None) == (not is_soluble(G))
    if h is not None:
        assert (h == 1) == is_nilpotent(G)


@given(groups(5))
def test_rank_bounds(G):
    r = rank(G)
    d = min_generators(G.whole())[0]
    assert d <= r.rank_value <= max(G.order.bit_length() - 1, 0)
    assert rank(gamma_infinity(G)).rank_value <= r.rank_value
    assert (d <= 1) == (G.order in G.element_orders())


@given(groups(4))
def test_rank_matches_brute_force_small(G):
    E = oracle_group(G)
    assert rank(G).rank_value == oracles.rank(E, G.degree)
