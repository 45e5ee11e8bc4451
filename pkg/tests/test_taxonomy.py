import pytest

from ybset.constructions import (
    AbelianGroup,
    Endomorphism,
    affine_solution,
    cyclic_solution,
    permutation_solution,
    trivial_solution,
    twisted_union,
)
from ybset.core import Permutation, is_isomorphic, validate
from ybset.enumeration import all_solutions
from ybset.golden import GOLDEN
from ybset.taxonomy import (
    check_record,
    classify,
    decompositions,
    is_generalized_twisted_union,
    is_irretractable,
    is_twisted_union,
    multipermutation_level,
    orbits,
    retraction,
    summary_row,
)


def klein_affine():
    A = AbelianGroup((2, 2))
    return affine_solution(A, Endomorphism(A, [[1, 1], [1, 0]]), Endomorphism(A, [[0, 1], [1, 0]]))


@pytest.mark.parametrize("n", range(1, 7))
def test_summary_rows_match_table(n, classes):
    assert summary_row(n, classes[n]) == GOLDEN[n]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_prime_size_has_one_indecomposable(p):
    ind = [s for s in all_solutions(p) if len(orbits(s)) == 1]
    assert len(ind) == 1
    cyc = permutation_solution(Permutation.from_cycles(p, [range(p)]))
    assert is_isomorphic(ind[0], cyc) is not None


def test_orbits_and_decompositions():
    s = trivial_solution(3)
    assert orbits(s) == [[0], [1], [2]]
    assert all(0 in X for X, _ in decompositions(s))
    assert orbits(cyclic_solution(4)) == [[0, 1, 2, 3]]
    assert decompositions(cyclic_solution(4)) == []


def test_retraction_levels():
    assert multipermutation_level(trivial_solution(1)) == 0
    assert multipermutation_level(trivial_solution(3)) == 1
    assert multipermutation_level(cyclic_solution(5)) == 1
    r, proj = retraction(trivial_solution(4))
    assert r.n == 1 and proj.tolist() == [0, 0, 0, 0]


def test_klein_affine_solution_is_irretractable():
    s = klein_affine()
    rec = classify(s)
    assert rec.indecomposable and rec.irretractable and rec.affine
    assert rec.multipermutation_level is None
    assert is_irretractable(s)


def test_twisted_union_is_recognized():
    c2 = cyclic_solution(2)
    u = twisted_union(c2, c2, Permutation((1, 0)), Permutation((1, 0)))
    assert validate(u).ok
    assert is_twisted_union(u) and is_generalized_twisted_union(u)


def test_records_are_internally_consistent(classes):
    for n in range(1, 6):
        for s in classes[n]:
            check_record(classify(s, affine=False), n)


def test_twisted_implies_generalized(classes):
    for s in classes[5]:
        rec = classify(s, affine=False)
        assert not rec.twisted_union or rec.generalized_twisted_union
        assert rec.decomposable or not rec.generalized_twisted_union
