from math import gcd

import numpy as np
import pytest
from sympy import totient

from ybset.constructions import AbelianGroup, trivial_solution
from ybset.core import Permutation, derived_maps, validate
from ybset.errors import DomainError
from ybset.structure import datum_from_solution
from ybset.tstruct import (
    TStructure,
    datum_from_t_cyclic,
    datums_isomorphic,
    enumerate_t_structures,
    is_t_structure,
    kernel_exponent,
    restrict_to_multiples,
    ring_datum,
    ring_solution,
    t_from_datum,
    t_power_datum,
    trivial_datum,
)

SWAP13 = Permutation((0, 3, 2, 1))
ALL = {n: enumerate_t_structures(n) for n in range(1, 11)}


def test_is_t_structure_examples():
    assert is_t_structure(AbelianGroup.cyclic(6), Permutation.identity(6))
    assert is_t_structure(AbelianGroup((2, 2)), Permutation.identity(4))
    assert is_t_structure(AbelianGroup.cyclic(4), SWAP13)
    assert not is_t_structure(AbelianGroup.cyclic(4), Permutation((1, 2, 3, 0)))
    assert TStructure(AbelianGroup.cyclic(4), SWAP13).is_valid()


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_primes_admit_only_identity(p):
    assert ALL[p] == [Permutation.identity(p)]


def test_small_lists():
    assert ALL[1] == [Permutation((0,))]
    assert ALL[4] == [Permutation.identity(4), SWAP13]
    assert all(Permutation.identity(n) in ALL[n] for n in ALL)


def test_brute_force_agrees_on_four():
    import itertools

    A = AbelianGroup.cyclic(4)
    brute = [Permutation(p) for p in itertools.permutations(range(4)) if is_t_structure(A, Permutation(p))]
    assert sorted(brute, key=lambda q: q.images) == ALL[4]


@pytest.mark.parametrize("n", range(1, 11))
def test_invariants(n):
    A = AbelianGroup.cyclic(n)
    g = gcd(int(totient(n)), n)
    for T in ALL[n]:
        assert T.power(n) == Permutation.identity(n)
        assert T.power(g) == Permutation.identity(n)
        for k in range(-n, n + 1):
            assert is_t_structure(A, T.power(k))
        for k in range(1, n + 1):
            sub = restrict_to_multiples(n, T, k)
            assert sub is not None and is_t_structure(AbelianGroup.cyclic(len(sub)), sub)
        for T2 in ALL[n]:
            if T.compose(T2) == T2.compose(T):
                assert is_t_structure(A, T.compose(T2))


@pytest.mark.parametrize("n", range(1, 11))
def test_cyclic_round_trip_is_exact(n):
    for T in ALL[n]:
        d = datum_from_t_cyclic(n, T)
        assert d.is_valid()
        assert t_from_datum(d).T == T
        assert datums_isomorphic(datum_from_t_cyclic(n, t_from_datum(d).T), d)


def test_datum_from_t_rejects_non_structure():
    with pytest.raises(DomainError):
        datum_from_t_cyclic(4, Permutation((1, 2, 3, 0)))


def test_identity_gives_trivial_action():
    d = datum_from_t_cyclic(5, Permutation.identity(5))
    assert np.array_equal(d.action, np.tile(np.arange(5), (5, 1)))
    assert t_from_datum(trivial_datum(AbelianGroup((2, 2)))).T == Permutation.identity(4)


def test_nontrivial_z4_datum_has_nontrivial_action():
    d = datum_from_t_cyclic(4, SWAP13)
    assert not np.array_equal(d.action, np.tile(np.arange(4), (4, 1)))


def test_data_from_solutions(classes):
    for n in range(1, 7):
        for s in classes[n]:
            d = datum_from_solution(s)
            t = t_from_datum(d)
            assert t.is_valid()
            r = kernel_exponent(d)
            assert t.T.power(r) == Permutation.identity(d.A.order)
            if d.A.rank <= 1:
                assert datums_isomorphic(d, datum_from_t_cyclic(d.A.order, t.T))


def test_power_datum():
    d = datum_from_t_cyclic(4, SWAP13)
    assert t_from_datum(t_power_datum(d, 1)).T == SWAP13
    d0 = t_power_datum(d, 0)
    assert t_from_datum(d0).T == Permutation.identity(4)
    assert np.array_equal(d0.action, np.tile(np.arange(4), (4, 1)))
    assert t_from_datum(t_power_datum(d, -1)).T == SWAP13
    for n in range(1, 11):
        for T in ALL[n]:
            d = datum_from_t_cyclic(n, T)
            for k in (-2, -1, 2, 3):
                assert t_from_datum(t_power_datum(d, k)).T == T.power(k)


def test_ring_construction():
    T, s = ring_solution(4, 2)
    assert T == SWAP13
    assert validate(s).ok
    assert derived_maps(s).T == T
    assert [T(x) for x in range(4)] == [(x * pow(1 + 2 * x, -1, 4)) % 4 for x in range(4)]
    assert t_from_datum(ring_datum(4, 2)).T == SWAP13
    T0, s0 = ring_solution(5, 0)
    assert T0 == Permutation.identity(5) and s0 == trivial_solution(5)
    T9, s9 = ring_solution(9, 3)
    assert validate(s9).ok and T9.power(3) == Permutation.identity(9)
    with pytest.raises(DomainError, match="1 \\+ 1\\*1"):
        ring_solution(4, 1)
