import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import elems, oracle_group
from engel.catalog import build, default_catalog, recipe_order
from engel.group import GroupHandle, NotEnumerableError, closure
from engel.perm import Permutation

P = Permutation.from_cycles


def s(n):
    return GroupHandle([P([(0, 1)], n), P([tuple(range(n))], n)], label=f"S{n}")


def test_identity_is_index_zero_and_member():
    G = s(4)
    assert G.element(0).is_identity()
    assert G.contains(Permutation.identity(4))


def test_order_counts_distinct_closure_elements():
    G = s(4)
    assert G.order == 24
    assert elems(G.whole()) == oracle_group(G)


def test_closure_examples():
    S3, S4 = s(3), s(4)
    assert closure(S3, [P([(0, 1, 2)], 3)]).order == 3
    assert closure(S4, [P([(0, 1)], 4), P([(0, 1, 2, 3)], 4)]).order == 24
    assert closure(S4, [Permutation.identity(4)]).is_trivial()


def test_closure_errors():
    S3 = s(3)
    with pytest.raises(ValueError):
        closure(S3, [P([(0, 1)], 4)])
    A3 = GroupHandle([P([(0, 1, 2)], 3)])
    with pytest.raises(ValueError):
        closure(A3, [P([(0, 1)], 3)])
    with pytest.raises(ValueError):
        closure(S3, [])


def test_mixed_degree_generators_rejected():
    with pytest.raises(ValueError):
        GroupHandle([P([(0, 1)], 3), P([(0, 1)], 4)])


def test_elements_are_in_canonical_order():
    G = s(4)
    rows = [tuple(r) for r in G.elements_array.tolist()]
    assert rows == sorted(rows)


def test_table_and_lookup_agree_with_composition():
    G = s(4)
    rng = np.random.default_rng(0)
    for a, b in rng.integers(0, G.N, size=(50, 2)):
        assert G.element(int(G.mul(int(a), int(b)))) == G.element(int(a)) * G.element(int(b))
        assert G.element(int(G.inv[a])) == G.element(int(a)).inverse()


def test_above_threshold_uses_stabilizer_chain():
    G = GroupHandle([P([(0, 1)], 9), P([tuple(range(9))], 9)], threshold=1000)
    assert G.order == 362880
    assert not G.is_enumerable
    assert G.contains(P([(0, 5, 7)], 9))
    with pytest.raises(NotEnumerableError):
        G.elements_array


@pytest.mark.parametrize("rec", [r for r in default_catalog() if recipe_order(r) <= 200], ids=lambda r: r.name)
def test_catalog_groups_match_oracle_closure(rec):
    G = build(rec)
    assert G.order == recipe_order(rec)
    if G.order <= 120:
        assert elems(G.whole()) == oracle_group(G)


@given(st.lists(st.integers(0, 119), min_size=1, max_size=3))
def test_closure_is_idempotent(idx):
    G = s(5)
    H = closure(G, [G.element(i) for i in idx])
    again = closure(G, H.elements())
    assert again == H
    assert H.order == len(H.indices) and G.N % H.order == 0
