from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import nilpotent_square_pairs
from ybset.constructions import (
    AbelianGroup,
    Endomorphism,
    abelian_groups,
    affine_keys,
    affine_solution,
    assemble_union,
    cyclic_solution,
    endomorphisms,
    jordan_binomial,
    permutation_solution,
    right_extension,
    solve_linear_pairs,
    trivial_solution,
    twisted_union,
)
from ybset.core import Permutation, SolutionTable, canonical_form, is_isomorphic, validate
from ybset.errors import DomainError, StructureError, UnionError
from ybset.taxonomy import classify, decompositions, is_twisted_union, multipermutation_level

KLEIN = AbelianGroup((2, 2))
KLEIN_A = [[1, 1], [1, 0]]
KLEIN_B = [[0, 1], [1, 0]]


def test_abelian_group_indexing():
    A = AbelianGroup((2, 4))
    assert A.order == 8 and A.rank == 2
    els = A.elements()
    assert A.indices(els).tolist() == list(range(8))
    add = A.add_table()
    assert all(add[x, A.neg()[x]] == 0 for x in range(8))
    with pytest.raises(DomainError):
        AbelianGroup((4, 2))


def test_groups_of_order_eight():
    assert sorted(g.invariant_factors for g in abelian_groups(8)) == [(2, 2, 2), (2, 4), (8,)]
    assert [g.invariant_factors for g in abelian_groups(7)] == [(7,)]


def test_endomorphism_well_definedness():
    A = AbelianGroup((2, 4))
    with pytest.raises(StructureError):
        Endomorphism(A, [[0, 0], [1, 0]])  # Z/2 -> Z/4 by 1 is not a map
    e = Endomorphism(A, [[0, 0], [2, 0]])
    assert Endomorphism.from_table(A, e.table) == e


def test_endomorphism_count():
    assert len(endomorphisms(AbelianGroup.cyclic(6))) == 6
    assert len(endomorphisms(KLEIN)) == 16
    assert len(endomorphisms(AbelianGroup((2, 4)))) == 2 * 2 * 2 * 4


@given(st.integers(1, 12), st.data())
def test_endomorphism_ring_laws(n, data):
    A = AbelianGroup.cyclic(n)
    a, b, c = (Endomorphism(A, [[data.draw(st.integers(0, n - 1))]]) for _ in range(3))
    assert a @ (b + c) == a @ b + a @ c
    assert (a @ b) @ c == a @ (b @ c)
    if a.is_invertible():
        assert a @ a.inverse() == Endomorphism.scalar(A, 1)


@pytest.mark.parametrize("n", range(1, 9))
def test_cyclic_pairs_are_square_zero_times_units(n):
    A = AbelianGroup.cyclic(n)
    got = {(int(p.a.matrix[0, 0]), int(p.b.matrix[0, 0])) for p in solve_linear_pairs(A)}
    assert got == nilpotent_square_pairs(n)


def test_z4_pairs():
    got = {(int(p.a.matrix[0, 0]), int(p.b.matrix[0, 0])) for p in solve_linear_pairs(AbelianGroup.cyclic(4))}
    assert got == {(0, 1), (0, 3), (2, 1), (2, 3)}


def test_klein_pair_is_admissible():
    pairs = solve_linear_pairs(KLEIN)
    a, b = Endomorphism(KLEIN, KLEIN_A), Endomorphism(KLEIN, KLEIN_B)
    assert any(p.a == a and p.b == b for p in pairs)
    one = Endomorphism.scalar(KLEIN, 1)
    for p in pairs:
        assert p.b @ p.c == one - p.a @ p.a
        assert p.c.is_invertible()


def test_affine_special_cases():
    A = AbelianGroup.cyclic(5)
    zero, one = Endomorphism.scalar(A, 0), Endomorphism.scalar(A, 1)
    assert affine_solution(A, zero, one) == trivial_solution(5)
    two = Endomorphism.scalar(A, 2)
    s = affine_solution(A, zero, two)
    assert is_isomorphic(s, permutation_solution(Permutation(tuple((2 * x) % 5 for x in range(5))))) is not None
    with pytest.raises(StructureError):
        affine_solution(A, one, one)


def test_affine_translation_keeps_validity():
    a, b = Endomorphism(KLEIN, KLEIN_A), Endomorphism(KLEIN, KLEIN_B)
    lin = affine_solution(KLEIN, a, b)
    assert lin(0, 0) == (0, 0)
    for z in range(4):
        assert validate(affine_solution(KLEIN, a, b, z)).ok


def test_cyclic_affine_solutions_are_multipermutation():
    for n in range(2, 9):
        A = AbelianGroup.cyclic(n)
        for p in solve_linear_pairs(A):
            for z in range(n):
                assert multipermutation_level(affine_solution(A, p.a, p.b, z)) is not None


@pytest.mark.parametrize("p, N", [(3, 2), (5, 2)])
def test_pairs_over_small_vector_spaces_have_nilpotent_a(p, N):
    A = AbelianGroup((p,) * N)
    for pair in solve_linear_pairs(A):
        power = pair.a
        for _ in range(N - 1):
            power = power @ pair.a
        assert power == Endomorphism.scalar(A, 0)


def test_affine_key_counts():
    assert [len(affine_keys(n)) for n in range(1, 7)] == [1, 2, 3, 12, 4, 5]


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_jordan_binomial(N):
    J, B = jordan_binomial(N)
    assert np.array_equal(J @ B, B @ J + J @ B @ J)
    for i in range(N):
        for j in range(N):
            assert B[i, j] == comb(j + 1, i + 1)
    if N == 2:
        assert J.tolist() == [[0, 1], [0, 0]] and B.tolist() == [[1, 2], [0, 1]]


def test_twisted_union_examples():
    c2 = cyclic_solution(2)
    swap = Permutation((1, 0))
    u = twisted_union(c2, c2, swap, swap)
    assert is_twisted_union(u)
    assert all(np.array_equal(u.f_table[0], r) for r in u.f_table)
    assert canonical_form(twisted_union(c2, c2, Permutation((0, 1)), Permutation((0, 1)))) == canonical_form(
        assemble_union(c2, c2, [[[y, x] for y in range(2)] for x in range(2)])
    )
    with pytest.raises(StructureError):
        twisted_union(cyclic_solution(3), c2, Permutation((0, 2, 1)), swap)


def test_one_point_unions_are_twisted(classes):
    one = trivial_solution(1)
    for y in classes[3]:
        u = twisted_union(one, y, Permutation((0,)), Permutation.identity(3))
        assert is_twisted_union(u)


def test_assemble_union_reports_failed_flag():
    t2 = trivial_solution(2)
    cross = [[[0, 0], [0, 0]], [[1, 1], [1, 1]]]
    with pytest.raises(UnionError) as err:
        assemble_union(t2, t2, cross)
    assert err.value.flag == "bijective"
    # a bijective cross map that breaks the braid relation
    cross = [[[0, 0], [0, 1]], [[1, 0], [1, 1]]]
    with pytest.raises(UnionError) as err:
        assemble_union(t2, t2, cross)
    assert err.value.flag == "braided"


def test_right_extension():
    c3 = cyclic_solution(3)
    t2 = trivial_solution(2)
    rot = Permutation((1, 2, 0))
    u = right_extension(c3, t2, [rot, rot])
    assert validate(u).ok and decompositions(u)
    assert canonical_form(right_extension(c3, t2, [Permutation.identity(3)] * 2)) == canonical_form(
        twisted_union(c3, t2, Permutation.identity(3), Permutation.identity(2))
    )
    with pytest.raises(StructureError):
        right_extension(c3, t2, [Permutation((0, 2, 1)), rot])


def test_right_extension_relation_check():
    # over a trivial Y the relations say the fmaps commute
    t3, t2 = trivial_solution(3), trivial_solution(2)
    with pytest.raises(StructureError, match="relation broken"):
        right_extension(t3, t2, [Permutation((1, 0, 2)), Permutation((0, 2, 1))])
    u = right_extension(t3, t2, [Permutation((1, 2, 0)), Permutation((2, 0, 1))])
    assert validate(u).ok


@pytest.mark.parametrize("ds", [(2,), (3,), (4,), (6,), (2, 2)])
def test_pairs_match_brute_force_linear_solutions(ds):
    # every linear S(x, y) = (ax + by, cx + dy) that validates comes from an admissible pair
    import itertools

    A = AbelianGroup(ds)
    ends = endomorphisms(A)
    add, n = A.add_table(), A.order
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    found = set()
    for a, b, c, d in itertools.product(ends, repeat=4):
        s = SolutionTable(n, add[a.table[x], b.table[y]], add[c.table[x], d.table[y]])
        if validate(s).ok:
            found.add((a.table.tobytes(), b.table.tobytes()))
    assert found == {(p.a.table.tobytes(), p.b.table.tobytes()) for p in solve_linear_pairs(A)}
