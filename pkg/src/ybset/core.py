"""Solution tables, validation, derived maps, relabelings and canonical keys.

A solution on ``{0..n-1}`` is stored as two ``n x n`` arrays with
``S(x, y) = (s1[x, y], s2[x, y])``.  Writing ``S(x, y) = (g_x(y), f_y(x))``
we keep three derived views around:

* ``f_table[y, x] = f_y(x)``
* ``sigma[x, y] = f_x^{-1}(y)``, the form the enumerator works with
* ``T[y] = f_y^{-1}(y)``, the diagonal of ``sigma``
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import factorial
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .errors import (
    BraidError,
    InternalInvariantViolation,
    MalformedTableError,
    NondegeneracyError,
    ResourceError,
    budget,
)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


def _is_perm(row: np.ndarray) -> bool:
    n = len(row)
    if n == 0:
        return True
    if row.min() < 0 or row.max() >= n:
        return False
    return len(np.unique(row)) == n


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{0..n-1}`` given by its images."""

    images: tuple

    def __post_init__(self):
        imgs = tuple(int(v) for v in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise MalformedTableError(f"not a permutation: {list(imgs)}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        imgs = list(range(n))
        for cyc in cycles:
            cyc = list(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                imgs[a] = b
        return cls(tuple(imgs))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __len__(self) -> int:
        return len(self.images)

    def array(self) -> np.ndarray:
        return np.array(self.images, dtype=np.int64)

    def compose(self, other: "Permutation") -> "Permutation":
        """``self o other``: apply ``other`` first."""
        return Permutation(tuple(self.images[v] for v in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, v in enumerate(self.images):
            inv[v] = i
        return Permutation(tuple(inv))

    def power(self, k: int) -> "Permutation":
        base = self if k >= 0 else self.inverse()
        out = Permutation.identity(self.n)
        for _ in range(abs(k)):
            out = base.compose(out)
        return out

    def cycles(self) -> list:
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            cyc = []
            x = start
            while not seen[x]:
                seen[x] = True
                cyc.append(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def cycle_type(self) -> tuple:
        return tuple(sorted(len(c) for c in self.cycles()))

    def order(self) -> int:
        from math import lcm

        return lcm(*self.cycle_type()) if self.n else 1


# ---------------------------------------------------------------------------
# Solution tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SolutionTable:
    """The map ``S`` on ``{0..n-1}^2`` as two index tables."""

    n: int
    s1: np.ndarray
    s2: np.ndarray

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise MalformedTableError("n must be at least 1")
        try:
            s1 = np.array(self.s1, dtype=np.int64)
            s2 = np.array(self.s2, dtype=np.int64)
        except (TypeError, ValueError) as exc:
            raise MalformedTableError(f"tables are not integer arrays: {exc}") from exc
        if s1.shape != (n, n) or s2.shape != (n, n):
            raise MalformedTableError(f"expected {n}x{n} tables, got {s1.shape} and {s2.shape}")
        for t in (s1, s2):
            if t.min() < 0 or t.max() >= n:
                raise MalformedTableError("table entry out of range")
        s1.setflags(write=False)
        s2.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)

    # constructors ---------------------------------------------------------

    @classmethod
    def from_pairs(cls, pairs) -> "SolutionTable":
        arr = np.array(pairs, dtype=np.int64)
        if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
            raise MalformedTableError("expected an n x n array of pairs")
        return cls(arr.shape[0], arr[:, :, 0], arr[:, :, 1])

    @classmethod
    def from_sigma(cls, sigma) -> "SolutionTable":
        """Build from ``sigma[x, y] = f_x^{-1}(y)`` (rows must be permutations)."""
        sig = np.array(sigma, dtype=np.int64)
        n = sig.shape[0]
        if sig.shape != (n, n) or not all(_is_perm(r) for r in sig):
            raise MalformedTableError("sigma rows must be permutations")
        f = np.argsort(sig, axis=1)  # f[y, x] = f_y(x)
        s2 = f.T
        s1 = sig[s2, np.arange(n)[None, :]]
        return cls(n, s1, s2)

    # views ---------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, SolutionTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.s1, other.s1) and np.array_equal(self.s2, other.s2)

    def __hash__(self):
        return hash((self.n, self.s1.tobytes(), self.s2.tobytes()))

    def __repr__(self):
        return f"SolutionTable(n={self.n}, f={self.f_table.tolist()})"

    def __call__(self, x: int, y: int) -> tuple:
        return int(self.s1[x, y]), int(self.s2[x, y])

    @cached_property
    def f_table(self) -> np.ndarray:
        """``f_table[y, x] = f_y(x)``."""
        return _frozen(self.s2.T)

    @cached_property
    def g_table(self) -> np.ndarray:
        """``g_table[x, y] = g_x(y)``."""
        return _frozen(self.s1)

    @cached_property
    def sigma(self) -> np.ndarray:
        """``sigma[x, y] = f_x^{-1}(y)``; requires nondegeneracy."""
        if not np.all(np.sort(self.f_table, axis=1) == np.arange(self.n)[None, :]):
            raise NondegeneracyError("some f_y is not a bijection")
        return _frozen(np.argsort(self.f_table, axis=1))

    @cached_property
    def T(self) -> np.ndarray:
        return _frozen(np.diagonal(self.sigma))

    def pairs(self) -> list:
        return np.stack([self.s1, self.s2], axis=2).tolist()


@dataclass(frozen=True)
class FMap:
    """A family of permutations ``f[y] = f_y`` of ``{0..n-1}``."""

    n: int
    f: np.ndarray

    def __post_init__(self):
        f = np.array(
            [p.images if isinstance(p, Permutation) else p for p in self.f], dtype=np.int64
        )
        if f.shape != (self.n, self.n):
            raise MalformedTableError(f"expected {self.n} permutations of size {self.n}")
        for row in f:
            if not _is_perm(row):
                raise MalformedTableError(f"f row is not a permutation: {row.tolist()}")
        f.setflags(write=False)
        object.__setattr__(self, "f", f)


@dataclass(frozen=True)
class ValidationReport:
    bijective: bool
    involutive: bool
    braided: bool
    nondegenerate: bool
    braid_witness: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return self.bijective and self.involutive and self.braided and self.nondegenerate

    def flags(self) -> dict:
        return {
            "bijective": self.bijective,
            "involutive": self.involutive,
            "braided": self.braided,
            "nondegenerate": self.nondegenerate,
        }

    def first_failure(self) -> Optional[str]:
        for name, val in self.flags().items():
            if not val:
                return name
        return None


def validate(s: SolutionTable) -> ValidationReport:
    """Check all four defining conditions exhaustively."""
    if not isinstance(s, SolutionTable):
        raise MalformedTableError("validate expects a SolutionTable")
    n, s1, s2 = s.n, s.s1, s.s2
    codes = s1 * n + s2
    bijective = len(np.unique(codes)) == n * n
    involutive = bool(np.all(s1[s1, s2] == np.arange(n)[:, None]) and np.all(s2[s1, s2] == np.arange(n)[None, :]))
    ar = np.arange(n)
    nondeg = bool(np.all(np.sort(s2, axis=0) == ar[:, None]) and np.all(np.sort(s1, axis=1) == ar[None, :]))
    w = kernels.braid_witness(s1, s2)
    braided = w[0] < 0
    return ValidationReport(bool(bijective), involutive, braided, nondeg, None if braided else w)


def require_valid(s: SolutionTable) -> SolutionTable:
    rep = validate(s)
    if not rep.ok:
        raise BraidError(f"table fails validation ({rep.first_failure()})", rep.braid_witness)
    return s


def from_f_table(fm: FMap) -> SolutionTable:
    """Assemble ``S(x, y) = (g_x(y), f_y(x))`` with ``g_x(y) = f_{f_y(x)}^{-1}(y)``."""
    if not isinstance(fm, FMap):
        fm = FMap(len(fm), fm)
    n, F = fm.n, fm.f
    Finv = np.argsort(F, axis=1)
    T = Finv[np.arange(n), np.arange(n)]
    if len(np.unique(T)) != n:
        dup = [int(v) for v in T]
        raise NondegeneracyError(f"T: y -> f_y^-1(y) is not bijective: {dup}")
    s2 = F.T.copy()  # s2[x, y] = f_y(x)
    s1 = Finv[s2, np.arange(n)[None, :]]
    # right-action law f_y f_x = f_{f_y(x)} f_{g_x(y)}, checked on every point
    lhs = F[np.arange(n)[None, :, None], F[np.arange(n)[:, None, None], np.arange(n)[None, None, :]]]
    # lhs[x, y, u] = f_y(f_x(u))
    rhs = F[s2[:, :, None], F[s1[:, :, None], np.arange(n)[None, None, :]]]
    bad = np.argwhere(np.any(lhs != rhs, axis=2))
    if len(bad):
        x, y = (int(v) for v in bad[0])
        raise BraidError(f"right-action law fails at (x, y) = ({x}, {y})", (x, y))
    s = SolutionTable(n, s1, s2)
    rep = validate(s)
    if not rep.ok:
        raise InternalInvariantViolation(f"table built from a lawful FMap fails {rep.first_failure()}")
    return s


@dataclass(frozen=True)
class DerivedMaps:
    f: list
    g: list
    T: Permutation


def derived_maps(s: SolutionTable) -> DerivedMaps:
    f = [Permutation(tuple(r)) for r in s.f_table]
    g = [Permutation(tuple(r)) for r in s.g_table]
    return DerivedMaps(f, g, Permutation(tuple(s.T)))


def r_fixed_points(s: SolutionTable) -> int:
    """Number of pairs with ``S(x, y) = (y, x)``, i.e. fixed points of ``R = sigma o S``."""
    n = s.n
    return int(np.sum((s.s1 == np.arange(n)[None, :]) & (s.s2 == np.arange(n)[:, None])))


# ---------------------------------------------------------------------------
# J maps
# ---------------------------------------------------------------------------


def _tuples(n: int, m: int) -> np.ndarray:
    return np.indices((n,) * m).reshape(m, -1).T


def _encode(t: np.ndarray, n: int) -> np.ndarray:
    code = np.zeros(len(t), dtype=np.int64)
    for i in range(t.shape[1]):
        code = code * n + t[:, i]
    return code


def j_map(s: SolutionTable, m: int) -> np.ndarray:
    """Table of ``J_m`` on ``X^m``: row ``k`` is the image of the k-th tuple in
    mixed-radix order (first coordinate most significant)."""
    if m < 1:
        raise ValueError("arity must be at least 1")
    if s.n ** m > budget("j_map"):
        raise ResourceError(f"n^m = {s.n ** m} exceeds the j_map budget {budget('j_map')}")
    F = s.f_table
    t = _tuples(s.n, m)
    out = t.copy()
    for i in range(m - 1):
        comp = t[:, i].copy()
        for k in range(i + 1, m):
            comp = F[t[:, k], comp]
        out[:, i] = comp
    return out


def check_j_conjugation(s: SolutionTable, m: int) -> bool:
    """``J_m o S^{i,i+1} = sigma^{i,i+1} o J_m`` for every adjacent pair."""
    n = s.n
    J = j_map(s, m)
    t = _tuples(n, m)
    for i in range(m - 1):
        st = t.copy()
        st[:, i], st[:, i + 1] = s.s1[t[:, i], t[:, i + 1]], s.s2[t[:, i], t[:, i + 1]]
        lhs = J[_encode(st, n)]
        rhs = J.copy()
        rhs[:, [i, i + 1]] = rhs[:, [i + 1, i]]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def check_crossing_symmetry(s: SolutionTable) -> bool:
    n = s.n
    counts = np.zeros((n,) * 4, dtype=np.int64)
    l, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    l, j = l.ravel(), j.ravel()
    k, i = s.s1[l, j], s.s2[l, j]
    for ip in range(n):
        l2, jp = s.s1[k, ip], s.s2[k, ip]
        hit = l2 == l
        np.add.at(counts, (i[hit], j[hit], np.full(hit.sum(), ip), jp[hit]), 1)
    eye = np.eye(n, dtype=np.int64)
    expected = eye[:, None, :, None] * eye[None, :, None, :]
    return bool(np.array_equal(counts, expected))


# ---------------------------------------------------------------------------
# Relabeling and canonical keys
# ---------------------------------------------------------------------------


def relabel(s: SolutionTable, phi) -> SolutionTable:
    """``(phi . s)(x, y) = (phi x phi) S(phi^-1 x, phi^-1 y)``."""
    p = np.asarray(phi.images if isinstance(phi, Permutation) else phi, dtype=np.int64)
    inv = np.argsort(p)
    return SolutionTable(s.n, p[s.s1[np.ix_(inv, inv)]], p[s.s2[np.ix_(inv, inv)]])


def partition_of(T) -> tuple:
    """Cycle type of a permutation array, ascending."""
    return Permutation(tuple(int(v) for v in T)).cycle_type()


def t_representative(parts: Sequence[int]) -> np.ndarray:
    """Lex-least permutation of the given cycle type: ascending cycles on
    consecutive points, each ``a -> a+1 -> ... -> a``."""
    T = []
    start = 0
    for L in sorted(parts):
        T.extend(start + (i + 1) % L for i in range(L))
        start += L
    return np.array(T, dtype=np.int64)


@lru_cache(maxsize=64)
def centralizer(parts: tuple) -> np.ndarray:
    """All relabelings commuting with ``t_representative(parts)`` (rows)."""
    parts = tuple(sorted(parts))
    n = sum(parts)
    blocks = {}
    start = 0
    for L in parts:
        blocks.setdefault(L, []).append(start)
        start += L
    size = 1
    for L, starts in blocks.items():
        size *= factorial(len(starts)) * L ** len(starts)
    if size > budget("relabel"):
        raise ResourceError(f"centralizer of size {size} exceeds the relabel budget")
    per_len = []
    for L, starts in blocks.items():
        opts = []
        for order in itertools.permutations(starts):
            for rots in itertools.product(range(L), repeat=len(starts)):
                opts.append([(src, dst, r) for src, dst, r in zip(starts, order, rots)])
        per_len.append((L, opts))
    rows = []
    for combo in itertools.product(*(opts for _, opts in per_len)):
        phi = np.empty(n, dtype=np.int64)
        for (L, _), moves in zip(per_len, combo):
            for src, dst, r in moves:
                for j in range(L):
                    phi[src + j] = dst + (j + r) % L
        rows.append(phi)
    out = np.array(rows, dtype=np.int64).reshape(-1, n)
    out.setflags(write=False)
    return out


def _to_representative(T: np.ndarray) -> np.ndarray:
    """A relabeling carrying T onto ``t_representative`` of its cycle type."""
    n = len(T)
    cyc = sorted(Permutation(tuple(int(v) for v in T)).cycles(), key=len)
    phi = np.empty(n, dtype=np.int64)
    start = 0
    for c in cyc:
        for j, x in enumerate(c):
            phi[x] = start + j
        start += len(c)
    return phi


@dataclass(frozen=True, order=True)
class CanonicalKey:
    """Total-order encoding: ``n``, the diagonal T, then the sigma table."""

    data: bytes = field(repr=False)

    @classmethod
    def from_sigma(cls, sigma: np.ndarray) -> "CanonicalKey":
        sig = np.asarray(sigma, dtype=np.int64)
        n = sig.shape[0]
        flat = np.concatenate([[n], np.diagonal(sig), sig.ravel()])
        return cls(flat.astype(">u2").tobytes())

    def sigma(self) -> np.ndarray:
        vals = np.frombuffer(self.data, dtype=">u2").astype(np.int64)
        n = int(vals[0])
        return vals[1 + n :].reshape(n, n)

    def table(self) -> SolutionTable:
        return SolutionTable.from_sigma(self.sigma())

    def hex(self) -> str:
        return self.data.hex()


def canonical_sigma(s: SolutionTable) -> np.ndarray:
    """Lex-least relabeled sigma-table among relabelings sending T to its
    representative (which is itself the lex-least diagonal)."""
    sig = s.sigma
    T = np.diagonal(sig)
    phi0 = _to_representative(T)
    C = centralizer(partition_of(T))
    perms = C[:, phi0]
    best = kernels.min_relabel(sig, perms)
    return best.reshape(s.n, s.n)


def canonical_form(s: SolutionTable) -> CanonicalKey:
    return CanonicalKey.from_sigma(canonical_sigma(s))


def canonical_table(s: SolutionTable) -> SolutionTable:
    return SolutionTable.from_sigma(canonical_sigma(s))


# ---------------------------------------------------------------------------
# Isomorphism search
# ---------------------------------------------------------------------------


def orbit_sizes(s: SolutionTable) -> tuple:
    n = s.n
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    sig = s.sigma
    for x in range(n):
        for y in range(n):
            a, b = find(y), find(int(sig[x, y]))
            if a != b:
                parent[a] = b
    sizes = {}
    for x in range(n):
        r = find(x)
        sizes[r] = sizes.get(r, 0) + 1
    return tuple(sorted(sizes.values()))


def fingerprint(s: SolutionTable) -> tuple:
    """Relabeling-invariant summary used to reject non-isomorphic pairs."""
    ctypes = sorted(Permutation(tuple(r)).cycle_type() for r in s.f_table)
    return (s.n, tuple(ctypes), r_fixed_points(s), orbit_sizes(s), partition_of(s.T))


def is_isomorphic(a: SolutionTable, b: SolutionTable) -> Optional[Permutation]:
    """A relabeling ``phi`` with ``relabel(a, phi) == b``, or None."""
    if a.n != b.n or fingerprint(a) != fingerprint(b):
        return None
    n = a.n
    A1, A2, B1, B2 = a.s1, a.s2, b.s1, b.s2
    ctA = [Permutation(tuple(r)).cycle_type() for r in a.f_table]
    ctB = [Permutation(tuple(r)).cycle_type() for r in b.f_table]

    def extend(phi, inv, x, y):
        stack = [(x, y)]
        phi = phi.copy()
        inv = inv.copy()
        while stack:
            u, v = stack.pop()
            if phi[u] >= 0 or inv[v] >= 0:
                if phi[u] != v or inv[v] != u:
                    return None
                continue
            if ctA[u] != ctB[v]:
                return None
            phi[u] = v
            inv[v] = u
            done = np.flatnonzero(phi >= 0)
            for w in done:
                pw = phi[w]
                for (p, q, pp, qq) in ((u, w, v, pw), (w, u, pw, v)):
                    stack.append((int(A1[p, q]), int(B1[pp, qq])))
                    stack.append((int(A2[p, q]), int(B2[pp, qq])))
        return phi, inv

    def search(phi, inv):
        free = np.flatnonzero(phi < 0)
        if len(free) == 0:
            return phi
        x = int(free[0])
        for y in np.flatnonzero(inv < 0):
            res = extend(phi, inv, x, int(y))
            if res is not None:
                found = search(*res)
                if found is not None:
                    return found
        return None

    empty = -np.ones(n, dtype=np.int64)
    phi = search(empty, empty.copy())
    if phi is None:
        return None
    perm = Permutation(tuple(int(v) for v in phi))
    if relabel(a, perm) != b:
        raise InternalInvariantViolation("isomorphism search returned a non-witness")
    return perm


def cartesian_product(a: SolutionTable, b: SolutionTable) -> SolutionTable:
    """Componentwise product on pairs, indexed ``x1 * n2 + x2``."""
    n1, n2 = a.n, b.n
    x1 = np.repeat(np.arange(n1), n2)
    x2 = np.tile(np.arange(n2), n1)
    X1, Y1 = np.meshgrid(x1, x1, indexing="ij")
    X2, Y2 = np.meshgrid(x2, x2, indexing="ij")
    s1 = a.s1[X1, Y1] * n2 + b.s1[X2, Y2]
    s2 = a.s2[X1, Y1] * n2 + b.s2[X2, Y2]
    return SolutionTable(n1 * n2, s1, s2)
