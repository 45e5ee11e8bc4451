import numpy as np
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from ybset.lattice import HermiteBasis, hnf_sublattices, invariant_factors, smith_normal_form

square = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)
)


@given(square)
def test_snf_diagonalizes_with_unimodular_transforms(rows):
    diag, P, Q = smith_normal_form(rows)
    M, P, Q = sympy.Matrix(rows), sympy.Matrix(P), sympy.Matrix(Q)
    D = P * M * Q
    n = len(rows)
    assert abs(P.det()) == 1 and abs(Q.det()) == 1
    assert all(D[i, j] == 0 for i in range(n) for j in range(n) if i != j)
    assert [D[i, i] for i in range(n)] == list(diag)
    nz = [abs(d) for d in diag]
    assert all(nz[i + 1] % nz[i] == 0 for i in range(n - 1) if nz[i])


@given(square)
def test_snf_matches_sympy(rows):
    ours = sorted(abs(int(d)) for d in smith_normal_form(rows)[0])
    ref = sympy_snf(sympy.Matrix(rows), domain=sympy.ZZ)
    theirs = sorted(abs(int(ref[i, i])) for i in range(len(rows)))
    assert ours == theirs


def test_invariant_factors_of_cyclic_lattice():
    assert [d for d in invariant_factors([[2, 0], [0, 3]]) if d != 1] == [6]
    assert [d for d in invariant_factors([[2, 0], [0, 2]]) if d != 1] == [2, 2]


def test_hermite_basis_membership():
    hb = HermiteBasis(2)
    hb.add([2, 0])
    hb.add([1, 1])
    assert hb.full_rank and hb.index() == 2
    assert hb.contains([3, 1]) and not hb.contains([1, 0])
    assert list(hb.reduce([3, 1])) == [0, 0]


def test_sublattice_counts():
    # sublattices of index k in Z^r: sigma-type counts
    assert len(list(hnf_sublattices(2, 3))) == 4
    assert len(list(hnf_sublattices(3, 2))) == 7
    assert len(list(hnf_sublattices(2, 4))) == 7
    for H in hnf_sublattices(2, 4):
        assert abs(int(np.prod([H[i][i] for i in range(2)]))) == 4
