"""Named constructions: trivial, permutation, affine and linear solutions over
finite abelian groups, and unions of two solutions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, prod
from typing import Optional

import numpy as np

from .core import Permutation, SolutionTable, relabel, validate
from .errors import DomainError, InternalInvariantViolation, ResourceError, StructureError, UnionError, budget

# ---------------------------------------------------------------------------
# Finite abelian groups and their endomorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbelianGroup:
    """``Z/d_1 + ... + Z/d_r`` with ``d_i | d_{i+1}``.

    Elements are indexed in mixed radix, last component fastest, so a cyclic
    group ``Z/n`` has element ``k`` at index ``k``.
    """

    invariant_factors: tuple

    def __post_init__(self):
        ds = tuple(int(d) for d in self.invariant_factors)
        if any(d < 1 for d in ds):
            raise DomainError("invariant factors must be >= 1")
        if any(ds[i + 1] % ds[i] for i in range(len(ds) - 1)):
            raise DomainError(f"invariant factors must form a divisor chain: {ds}")
        object.__setattr__(self, "invariant_factors", ds)

    @classmethod
    def cyclic(cls, n: int) -> "AbelianGroup":
        return cls((n,))

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    def elements(self) -> np.ndarray:
        return _elements(self.invariant_factors)

    def index(self, vec) -> int:
        idx = 0
        for v, d in zip(vec, self.invariant_factors):
            idx = idx * d + int(v) % d
        return idx

    def indices(self, vecs: np.ndarray) -> np.ndarray:
        vecs = np.asarray(vecs, dtype=np.int64).reshape(-1, self.rank)
        idx = np.zeros(len(vecs), dtype=np.int64)
        for i, d in enumerate(self.invariant_factors):
            idx = idx * d + vecs[:, i] % d
        return idx

    def add_table(self) -> np.ndarray:
        return _add_table(self.invariant_factors)

    def neg(self) -> np.ndarray:
        return self.indices(-self.elements())

    def scale(self, k: int) -> np.ndarray:
        """Index table of ``x -> k x``."""
        return self.indices(k * self.elements())

    def zero(self) -> int:
        return 0


@lru_cache(maxsize=64)
def _elements(ds: tuple) -> np.ndarray:
    if not ds:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices(ds).reshape(len(ds), -1).T
    grids.setflags(write=False)
    return grids


@lru_cache(maxsize=64)
def _add_table(ds: tuple) -> np.ndarray:
    A = AbelianGroup(ds)
    el = A.elements()
    tab = A.indices((el[:, None, :] + el[None, :, :]).reshape(-1, A.rank)).reshape(A.order, A.order)
    tab.setflags(write=False)
    return tab


@dataclass(frozen=True, eq=False)
class Endomorphism:
    """An integer matrix acting on column vectors, entry (i, j) taken mod d_i."""

    group: AbelianGroup
    matrix: np.ndarray

    def __post_init__(self):
        A = self.group
        M = np.array(self.matrix, dtype=np.int64).reshape(A.rank, A.rank)
        ds = np.array(A.invariant_factors, dtype=np.int64)
        if A.rank:
            M = M % ds[:, None]
            # column j is the image of a generator of order d_j
            if np.any((M * ds[None, :]) % ds[:, None]):
                raise StructureError(f"matrix {M.tolist()} is not well defined on Z/{A.invariant_factors}")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_table(cls, A: AbelianGroup, table) -> "Endomorphism":
        table = np.asarray(table, dtype=np.int64)
        el = A.elements()
        cols = []
        for j in range(A.rank):
            e = np.zeros(A.rank, dtype=np.int64)
            e[j] = 1
            cols.append(el[table[A.index(e)]])
        M = np.array(cols, dtype=np.int64).T if cols else np.zeros((0, 0), dtype=np.int64)
        out = cls(A, M)
        if not np.array_equal(out.table, table):
            raise StructureError("table is not additive")
        return out

    @classmethod
    def scalar(cls, A: AbelianGroup, k: int) -> "Endomorphism":
        return cls(A, k * np.eye(A.rank, dtype=np.int64))

    @property
    def table(self) -> np.ndarray:
        A = self.group
        return A.indices(A.elements() @ self.matrix.T)

    def __eq__(self, other):
        return isinstance(other, Endomorphism) and self.group == other.group and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.group, self.matrix.tobytes()))

    def __repr__(self):
        return f"Endomorphism({self.matrix.tolist()} on {self.group.invariant_factors})"

    def __matmul__(self, other: "Endomorphism") -> "Endomorphism":
        return Endomorphism(self.group, self.matrix @ other.matrix)

    def __add__(self, other: "Endomorphism") -> "Endomorphism":
        return Endomorphism(self.group, self.matrix + other.matrix)

    def __sub__(self, other: "Endomorphism") -> "Endomorphism":
        return Endomorphism(self.group, self.matrix - other.matrix)

    def __neg__(self) -> "Endomorphism":
        return Endomorphism(self.group, -self.matrix)

    def is_invertible(self) -> bool:
        return len(np.unique(self.table)) == self.group.order

    def inverse(self) -> "Endomorphism":
        if not self.is_invertible():
            raise StructureError(f"{self!r} is not invertible")
        return Endomorphism.from_table(self.group, np.argsort(self.table))

    def apply(self, x: int) -> int:
        return int(self.table[x])


def endomorphisms(A: AbelianGroup) -> list:
    """All endomorphisms, by choosing an image of each generator."""
    el = A.elements()
    choices = []
    for d in A.invariant_factors:
        ok = A.indices(d * el) == 0
        choices.append(el[ok])
    total = prod(len(c) for c in choices)
    if total > budget("endomorphisms"):
        raise ResourceError(f"End(A) has {total} elements, above the budget")
    out = []
    for combo in np.ndindex(*(len(c) for c in choices)):
        M = np.array([choices[j][combo[j]] for j in range(A.rank)], dtype=np.int64).T
        out.append(Endomorphism(A, M.reshape(A.rank, A.rank)))
    return out


def abelian_groups(order: int) -> list:
    """Every abelian group of the given order, as divisor chains."""
    if order == 1:
        return [AbelianGroup((1,))]
    out = []

    def chains(rest, smallest):
        # non-decreasing divisor chains ending with a multiple of the previous part
        if rest == 1:
            yield ()
            return
        for d in range(smallest, rest + 1):
            if rest % d == 0 and d > 1:
                for tail in chains(rest // d, d):
                    if not tail or tail[0] % d == 0:
                        yield (d,) + tail

    for ch in chains(order, 2):
        out.append(AbelianGroup(ch))
    return out


# ---------------------------------------------------------------------------
# Basic solutions
# ---------------------------------------------------------------------------


def trivial_solution(n: int) -> SolutionTable:
    """``S(x, y) = (y, x)``."""
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return SolutionTable(n, y, x)


def permutation_solution(f) -> SolutionTable:
    """``S(x, y) = (f(y), f^-1(x))``."""
    p = f if isinstance(f, Permutation) else Permutation(tuple(f))
    arr = p.array()
    inv = p.inverse().array()
    n = p.n
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return SolutionTable(n, arr[y], inv[x])


def cyclic_solution(m: int) -> SolutionTable:
    """The cyclic solution ``S(x, y) = (y - 1, x + 1)`` on ``Z/m``."""
    return permutation_solution(Permutation(tuple((i - 1) % m for i in range(m))))


# ---------------------------------------------------------------------------
# Affine solutions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearPair:
    a: Endomorphism
    b: Endomorphism
    c: Endomorphism
    d: Endomorphism


def _pair_data(a: Endomorphism, b: Endomorphism) -> Optional[LinearPair]:
    """Complete (a, b) to (a, b, c, d), or None if the pair is not admissible."""
    A = a.group
    one = Endomorphism.scalar(A, 1)
    if not b.is_invertible():
        return None
    ap1 = one + a
    if not ap1.is_invertible():
        return None
    if b @ a != a @ ap1.inverse() @ b:
        return None
    am1 = a - one
    c = b.inverse() @ (one - a @ a)
    if not am1.is_invertible() or not c.is_invertible():
        raise InternalInvariantViolation(f"admissible pair with singular c or a-1: a={a!r}, b={b!r}")
    return LinearPair(a, b, c, a @ am1.inverse())


def solve_linear_pairs(A: AbelianGroup) -> list:
    """All (a, b) with b and 1+a invertible and ``b a = a (1+a)^-1 b``."""
    ends = endomorphisms(A)
    tables = np.array([e.table for e in ends], dtype=np.int64)
    bij = np.array([len(np.unique(t)) == A.order for t in tables])
    units = tables[bij]
    unit_ends = [e for e, ok in zip(ends, bij) if ok]
    add = A.add_table()
    ident = np.arange(A.order)
    out = []
    for a, ta in zip(ends, tables):
        ap1 = add[ident, ta]
        if len(np.unique(ap1)) != A.order:
            continue
        h = ta[np.argsort(ap1)]  # a o (1+a)^-1
        hits = np.all(units[:, ta] == h[units], axis=1)
        for k in np.flatnonzero(hits):
            pd = _pair_data(a, unit_ends[k])
            if pd is None:
                raise InternalInvariantViolation("vectorized pair filter disagrees with the direct check")
            out.append(pd)
    return out


def _affine_tables(A: AbelianGroup, pd: LinearPair, z: int):
    one = Endomorphism.scalar(A, 1)
    add = A.add_table()
    t = int(A.neg()[(pd.b.inverse() @ (one + pd.a)).table[z]])
    n = A.order
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    first = add[add[pd.a.table[x], pd.b.table[y]], z]
    second = add[add[pd.c.table[x], pd.d.table[y]], t]
    return first, second


def affine_solution(A: AbelianGroup, a: Endomorphism, b: Endomorphism, z: int = 0) -> SolutionTable:
    """``S(x, y) = (ax + by + z, cx + dy + t)`` with ``t = -b^-1 (1+a) z``."""
    pd = _pair_data(a, b)
    if pd is None:
        raise StructureError("(a, b) violates b a b^-1 = a (1+a)^-1 with b, 1+a invertible")
    s = SolutionTable(A.order, *_affine_tables(A, pd, z))
    rep = validate(s)
    if not rep.ok:
        raise InternalInvariantViolation(f"affine solution fails {rep.first_failure()}")
    return s


@lru_cache(maxsize=16)
def affine_keys(n: int) -> frozenset:
    """Canonical keys of every affine solution over every abelian group of order n."""
    from .core import canonical_form

    keys = set()
    for A in abelian_groups(n):
        for pd in solve_linear_pairs(A):
            for z in range(A.order):
                s = SolutionTable(n, *_affine_tables(A, pd, z))
                if z == 0 and not validate(s).ok:
                    raise InternalInvariantViolation("linear solution fails validation")
                keys.add(canonical_form(s))
    return frozenset(keys)


def jordan_binomial(N: int) -> tuple:
    """The nilpotent Jordan block and the binomial matrix, 0-based storage.

    ``J[i, j] = 1`` iff ``j = i + 1``; ``B[i, j] = C(j + 1, i + 1)``, which is
    the 1-based rule ``b_ij = C(j, i)`` shifted by one.
    """
    J = np.zeros((N, N), dtype=object)
    B = np.zeros((N, N), dtype=object)
    for i in range(N):
        for j in range(N):
            J[i, j] = 1 if j == i + 1 else 0
            B[i, j] = comb(j + 1, i + 1)
    if not np.array_equal(J.dot(B), B.dot(J) + J.dot(B).dot(J)):
        raise InternalInvariantViolation("ab = ba + aba fails for the Jordan/binomial pair")
    return J.astype(np.int64), B.astype(np.int64)


# ---------------------------------------------------------------------------
# Unions
# ---------------------------------------------------------------------------


def _is_automorphism(s: SolutionTable, f) -> bool:
    return relabel(s, f) == s


def _union_tables(x: SolutionTable, y: SolutionTable):
    n1, n2 = x.n, y.n
    n = n1 + n2
    s1 = -np.ones((n, n), dtype=np.int64)
    s2 = -np.ones((n, n), dtype=np.int64)
    s1[:n1, :n1], s2[:n1, :n1] = x.s1, x.s2
    s1[n1:, n1:], s2[n1:, n1:] = y.s1 + n1, y.s2 + n1
    return s1, s2


def twisted_union(x: SolutionTable, y: SolutionTable, f, g) -> SolutionTable:
    """Union with ``S(x, y) = (g(y), f(x))`` on X x Y (Y indices shifted by |X|)."""
    f = f if isinstance(f, Permutation) else Permutation(tuple(f))
    g = g if isinstance(g, Permutation) else Permutation(tuple(g))
    if not _is_automorphism(x, f):
        raise StructureError("f does not preserve S_X")
    if not _is_automorphism(y, g):
        raise StructureError("g does not preserve S_Y")
    n1 = x.n
    fa, ga = f.array(), g.array()
    fi, gi = f.inverse().array(), g.inverse().array()
    s1, s2 = _union_tables(x, y)
    xs, ys = np.arange(n1), np.arange(y.n)
    s1[np.ix_(xs, ys + n1)] = ga[ys][None, :] + n1
    s2[np.ix_(xs, ys + n1)] = fa[xs][:, None]
    s1[np.ix_(ys + n1, xs)] = fi[xs][None, :]
    s2[np.ix_(ys + n1, xs)] = gi[ys][:, None] + n1
    s = SolutionTable(x.n + y.n, s1, s2)
    rep = validate(s)
    if not rep.ok:
        raise InternalInvariantViolation(f"twisted union fails {rep.first_failure()}")
    return s


def assemble_union(x: SolutionTable, y: SolutionTable, cross) -> SolutionTable:
    """Union from the cross map ``cross[x][y] = (y', x')`` (Y-local indices).

    The Y x X block is forced to be the inverse of the cross map.
    """
    n1, n2 = x.n, y.n
    cr = np.asarray(cross, dtype=np.int64)
    if cr.shape != (n1, n2, 2):
        raise UnionError(f"cross map must have shape ({n1}, {n2}, 2)", flag="bijective")
    yy, xx = cr[:, :, 0], cr[:, :, 1]
    if yy.min() < 0 or yy.max() >= n2 or xx.min() < 0 or xx.max() >= n1:
        raise UnionError("cross map entry out of range", flag="bijective")
    codes = yy * n1 + xx
    if len(np.unique(codes)) != n1 * n2:
        raise UnionError("cross map is not a bijection X x Y -> Y x X", flag="bijective")
    s1, s2 = _union_tables(x, y)
    for a in range(n1):
        for b in range(n2):
            u, v = int(yy[a, b]), int(xx[a, b])
            s1[a, b + n1], s2[a, b + n1] = u + n1, v
            s1[u + n1, v], s2[u + n1, v] = a, b + n1
    s = SolutionTable(n1 + n2, s1, s2)
    rep = validate(s)
    if not rep.ok:
        flag = rep.first_failure()
        raise UnionError(f"assembled union fails {flag}", flag=flag, witness=rep.braid_witness)
    return s


def right_extension(x: SolutionTable, y: SolutionTable, fmap) -> SolutionTable:
    """Union with ``S(x, y) = (y, f_y(x))`` for a family ``fmap[y]`` of
    automorphisms of X compatible with the relations of ``G_Y``."""
    n1, n2 = x.n, y.n
    F = np.array([p.images if isinstance(p, Permutation) else p for p in fmap], dtype=np.int64)
    if F.shape != (n2, n1):
        raise StructureError(f"fmap must give {n2} permutations of size {n1}")
    for j in range(n2):
        if sorted(F[j].tolist()) != list(range(n1)):
            raise StructureError(f"fmap[{j}] is not a permutation")
        if not _is_automorphism(x, F[j]):
            raise StructureError(f"fmap[{j}] does not preserve S_X")
    for a in range(n2):
        for b in range(n2):
            u, v = y(a, b)
            # fmap[b] o fmap[a] == fmap[v] o fmap[u]
            if not np.array_equal(F[b][F[a]], F[v][F[u]]):
                raise StructureError(
                    f"relation broken: fmap[{b}] o fmap[{a}] != fmap[{v}] o fmap[{u}] (S_Y({a},{b}) = ({u},{v}))"
                )
    cross = np.zeros((n1, n2, 2), dtype=np.int64)
    for a in range(n1):
        for b in range(n2):
            cross[a, b] = (b, F[b][a])
    return assemble_union(x, y, cross)
