import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import elems, oracle_group
from engel.catalog import build, default_catalog, recipe_order
from engel.group import closure
from engel.structure import (
    commutator_subgroup,
    conjugacy_classes,
    derived_series,
    derived_subgroup,
    fitting_height,
    fitting_series,
    fitting_subgroup,
    gamma_infinity,
    is_nilpotent,
    is_soluble,
    lower_central_series,
    p_core,
    prime_divisors,
    quotient_action,
    sylow_subgroup,
)

SMALL = [r for r in default_catalog() if recipe_order(r) <= 200]
TINY = [r for r in default_catalog() if recipe_order(r) <= 48]


def test_derived_subgroup_of_s3_is_a3(group):
    S3 = group("S3")
    D = derived_subgroup(S3.whole())
    n = S3.degree
    assert elems(D) == oracles.commutator_subgroup(oracle_group(S3), oracle_group(S3), n)
    assert D.order == 3


def test_abelian_commutator_trivial(group):
    C = group("C12")
    assert derived_subgroup(C.whole()).is_trivial()


def test_derived_series_of_s4(group):
    S4 = group("S4")
    rep = derived_series(S4)
    assert rep.orders == [24, 12, 4, 1, 1]
    assert [len(t) for t in oracles.derived(oracle_group(S4), 4)] == [24, 12, 4, 1]
    assert is_soluble(S4)


def test_a5_is_perfect(group):
    A5 = group("A5")
    assert derived_subgroup(A5.whole()).order == 60
    assert not is_soluble(A5)
    assert len(oracles.commutator_subgroup(oracle_group(A5), oracle_group(A5), 5)) == 60


def test_lower_central_examples(group):
    assert gamma_infinity(group("D4")).is_trivial()
    s3 = lower_central_series(group("S3"))
    assert s3.orders == [6, 3, 3] and s3.stabilized
    S4 = group("S4")
    g = gamma_infinity(S4)
    assert elems(g) == oracles.lower_central(oracle_group(S4), 4)[-1]
    assert g.order == 12


def test_sylow_examples(group):
    S4 = group("S4")
    P = sylow_subgroup(S4, 2)
    assert P.order == 8
    assert elems(P) in {oracles.conjugate(oracles.sylow(oracle_group(S4), 2, 4), g) for g in oracle_group(S4)}
    S3 = group("S3")
    assert sylow_subgroup(S3, 3) == derived_subgroup(S3.whole())
    assert sylow_subgroup(group("C6"), 5).is_trivial()


def test_pcore_and_fitting_examples(group):
    S4 = group("S4")
    V = p_core(S4, 2)
    assert V.order == 4
    assert elems(V) == oracles.p_core(oracle_group(S4), 2, 4)
    S3 = group("S3")
    assert fitting_subgroup(S3).order == 3
    D4 = group("D4")
    assert fitting_subgroup(D4).order == 8


def test_fitting_height_examples(group):
    assert fitting_height(group("Q8")) == 1
    assert fitting_series(group("S3")).orders == [3, 6]
    assert fitting_height(group("S3")) == 2
    assert fitting_series(group("S4")).orders == [4, 12, 24]
    assert fitting_height(group("S4")) == 3
    assert fitting_height(group("A5")) is None
    assert fitting_series(group("A5")).height is None


def test_nilpotent_examples(group):
    assert is_nilpotent(group("D4"))
    assert not is_nilpotent(group("S3"))
    assert is_nilpotent(group("C6"))


def test_quotient_examples(group):
    S4 = group("S4")
    assert quotient_action(S4, S4.trivial()).group.order == 24
    Q = quotient_action(S4, p_core(S4, 2)).group
    assert Q.order == 6 and not is_nilpotent(Q)
    assert quotient_action(S4, S4.whole()).group.order == 1
    with pytest.raises(ValueError):
        quotient_action(S4, sylow_subgroup(S4, 2))


def test_quotient_image_is_a_homomorphism(group):
    S4 = group("S4")
    qm = quotient_action(S4, p_core(S4, 2))
    for a in S4.elements()[::5]:
        for b in S4.elements()[::7]:
            assert qm.image(a * b) == qm.image(a) * qm.image(b)


def test_conjugacy_classes_of_s5(group):
    labels = conjugacy_classes(group("S5"))
    assert len(set(labels.tolist())) == 7


@pytest.mark.parametrize("rec", TINY, ids=lambda r: r.name)
def test_structure_matches_brute_force(rec):
    G = build(rec)
    n = G.degree
    E = oracle_group(G)
    lcs = oracles.lower_central(E, n)
    assert elems(gamma_infinity(G)) == lcs[-1]
    assert is_nilpotent(G) == (len(lcs[-1]) == 1)
    assert is_soluble(G) == (len(oracles.derived(E, n)[-1]) == 1)
    assert elems(fitting_subgroup(G)) == oracles.largest_normal_nilpotent(E, n)
    for p in prime_divisors(G.order):
        assert elems(p_core(G, p)) == oracles.p_core(E, p, n)


@pytest.mark.parametrize("rec", SMALL, ids=lambda r: r.name)
def test_structural_invariants(rec):
    G = build(rec)
    whole = G.whole()
    assert lower_central_series(G).terms[1] == derived_subgroup(whole)
    F = fitting_subgroup(G)
    assert F.is_normal_in() and is_nilpotent(F.as_group())
    for p in prime_divisors(G.order):
        P = sylow_subgroup(G, p)
        assert P.order == p ** _vp(G.order, p)
        assert p_core(G, p) <= F
    if is_soluble(G):
        assert (fitting_height(G) == 1) == is_nilpotent(G)
        assert fitting_series(G).terms[-1] == whole
    subs = [whole, derived_subgroup(whole), F] + [sylow_subgroup(G, p) for p in prime_divisors(G.order)]
    for A in subs:
        for B in subs:
            assert commutator_subgroup(A, B) == commutator_subgroup(B, A)
    for N in lower_central_series(G).terms + [F]:
        assert quotient_action(G, N).group.order == G.order // N.order


def _vp(n, p):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


S4 = build(next(r for r in default_catalog() if r.label == "S4"))


@given(st.lists(st.integers(0, 23), min_size=1, max_size=2), st.lists(st.integers(0, 23), min_size=1, max_size=2))
def test_commutator_subgroup_symmetric_and_matches_oracle(a, b):
    A = closure(S4, [S4.element(i) for i in a])
    B = closure(S4, [S4.element(i) for i in b])
    AB = commutator_subgroup(A, B)
    assert AB == commutator_subgroup(B, A)
    # brute force: all commutators, then close under conjugation by <A, B>
    raw = oracles.commutator_subgroup(elems(A), elems(B), 4)
    J = oracles.close(list(elems(A) | elems(B)), 4)
    conj = set()
    for j in J:
        conj |= oracles.conjugate(raw, j)
    assert elems(AB) == oracles.close(list(conj), 4)
