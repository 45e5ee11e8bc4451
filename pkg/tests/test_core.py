import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_key, direct_braid, naive_solutions
from ybset.constructions import cyclic_solution, permutation_solution, trivial_solution
from ybset.core import (
    CanonicalKey,
    FMap,
    Permutation,
    SolutionTable,
    canonical_form,
    cartesian_product,
    centralizer,
    check_crossing_symmetry,
    check_j_conjugation,
    derived_maps,
    from_f_table,
    is_isomorphic,
    j_map,
    r_fixed_points,
    relabel,
    require_valid,
    t_representative,
    validate,
)
from ybset.errors import BraidError, MalformedTableError, NondegeneracyError, ResourceError


def perms(n):
    return st.permutations(list(range(n))).map(lambda p: Permutation(tuple(p)))


# -- permutations -----------------------------------------------------------


def test_permutation_basics():
    p = Permutation.from_cycles(5, [(0, 1, 2), (3, 4)])
    assert p.images == (1, 2, 0, 4, 3)
    assert p.order() == 6
    assert p.cycle_type() == (2, 3)
    assert p.compose(p.inverse()) == Permutation.identity(5)
    assert p.power(6) == Permutation.identity(5)
    assert p.power(-1) == p.inverse()


def test_permutation_rejects_non_bijection():
    with pytest.raises(MalformedTableError):
        Permutation((0, 0, 1))


@given(st.integers(1, 7).flatmap(lambda n: st.tuples(perms(n), perms(n))))
def test_compose_applies_right_first(pq):
    p, q = pq
    r = p.compose(q)
    assert all(r(x) == p(q(x)) for x in range(p.n))


# -- tables and validation ---------------------------------------------------


def test_trivial_solution_validates():
    rep = validate(trivial_solution(3))
    assert rep.ok and rep.flags() == dict.fromkeys(("bijective", "involutive", "braided", "nondegenerate"), True)


def test_identity_map_is_degenerate():
    n = 3
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    rep = validate(SolutionTable(n, x, y))
    assert rep.bijective and rep.involutive and rep.braided
    assert not rep.nondegenerate


# involutive and nondegenerate, but the braid relation fails at (0, 0, 0)
UNBRAIDED = SolutionTable(3, [[1, 0, 2], [1, 2, 0], [1, 0, 2]], [[2, 1, 1], [0, 0, 0], [1, 2, 2]])


def test_non_braided_table_reports_witness():
    rep = validate(UNBRAIDED)
    assert rep.bijective and rep.involutive and rep.nondegenerate
    assert not rep.braided and rep.braid_witness == (0, 0, 0)
    assert rep.first_failure() == "braided"
    with pytest.raises(BraidError):
        require_valid(UNBRAIDED)


def test_malformed_tables():
    with pytest.raises(MalformedTableError):
        SolutionTable(2, [[0, 1]], [[0, 1]])
    with pytest.raises(MalformedTableError):
        SolutionTable(2, [[0, 2], [0, 1]], [[0, 1], [0, 1]])


@given(st.integers(1, 3).flatmap(lambda n: st.lists(st.integers(0, n - 1), min_size=2 * n * n, max_size=2 * n * n).map(lambda v: (n, v))))
def test_validate_braid_flag_matches_direct_check(nv):
    n, v = nv
    s = SolutionTable(n, np.array(v[: n * n]).reshape(n, n), np.array(v[n * n :]).reshape(n, n))
    assert validate(s).braided == direct_braid(s)


def test_every_labeled_small_solution_agrees_with_direct_braid():
    for s in naive_solutions(2):
        assert direct_braid(s)


def test_from_f_table_round_trip(classes):
    for n in range(1, 5):
        for s in classes[n]:
            t = from_f_table(FMap(n, s.f_table))
            assert t == s


def test_from_f_table_rejects_lawless_family():
    # f_0 = id, f_1 = swap on 2 points breaks T bijectivity or the action law
    with pytest.raises((NondegeneracyError, BraidError)):
        from_f_table(FMap(2, [[1, 0], [0, 1]]))


def test_derived_maps_of_cyclic_solution():
    s = cyclic_solution(4)
    dm = derived_maps(s)
    assert all(f.images == (1, 2, 3, 0) for f in dm.f)
    assert dm.T.images == (3, 0, 1, 2)


def test_r_fixed_points():
    assert r_fixed_points(trivial_solution(4)) == 16
    assert r_fixed_points(cyclic_solution(2)) == 0


def test_j_conjugation_and_crossing_symmetry(classes):
    for n in range(1, 4):
        for s in classes[n]:
            assert check_crossing_symmetry(s)
            for m in range(1, 4):
                assert check_j_conjugation(s, m)


def test_j_map_budget(monkeypatch):
    monkeypatch.setenv("YBSET_BUDGET", "10")
    with pytest.raises(ResourceError):
        j_map(trivial_solution(3), 3)


def test_j_map_is_bijective(classes):
    for s in classes[4]:
        J = j_map(s, 3)
        codes = J[:, 0] * 16 + J[:, 1] * 4 + J[:, 2]
        assert len(set(codes.tolist())) == 64


def test_j_conjugation_fails_without_braid_relation():
    assert not check_j_conjugation(UNBRAIDED, 3)


# -- canonical forms and isomorphism ----------------------------------------


def test_t_representative_and_centralizer_size():
    assert t_representative((1, 2)).tolist() == [0, 2, 1]
    assert len(centralizer((2, 2))) == 8
    assert len(centralizer((1, 1, 1))) == 6
    assert len(centralizer((3,))) == 3


@given(st.data())
def test_canonical_form_is_relabeling_invariant(data):
    from ybset.enumeration import all_solutions

    n = data.draw(st.integers(1, 5))
    sols = all_solutions(n)
    s = sols[data.draw(st.integers(0, len(sols) - 1))]
    p = data.draw(perms(n))
    t = relabel(s, p)
    assert canonical_form(t) == canonical_form(s)
    phi = is_isomorphic(s, t)
    assert phi is not None and relabel(s, phi) == t


def test_canonical_key_round_trip(classes):
    for s in classes[4]:
        k = canonical_form(s)
        assert CanonicalKey(k.data).table() == s
        assert k.table() == s


def test_canonical_agrees_with_brute_force_on_labeled_solutions():
    sols = naive_solutions(3)
    ours = {}
    brute = {}
    for s in sols:
        ours.setdefault(canonical_form(s), set()).add(brute_key(s))
        brute.setdefault(brute_key(s), set()).add(canonical_form(s))
    assert all(len(v) == 1 for v in ours.values())
    assert all(len(v) == 1 for v in brute.values())


def test_conjugate_permutations_give_isomorphic_solutions():
    a = permutation_solution(Permutation.from_cycles(4, [(0, 1, 2)]))
    b = permutation_solution(Permutation.from_cycles(4, [(1, 3, 2)]))
    c = permutation_solution(Permutation.from_cycles(4, [(0, 1), (2, 3)]))
    assert is_isomorphic(a, b) is not None
    assert is_isomorphic(a, c) is None


def test_cartesian_product_validates(classes):
    for a in classes[2]:
        for b in classes[3]:
            assert validate(cartesian_product(a, b)).ok
