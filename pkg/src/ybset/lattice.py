"""Exact integer lattice arithmetic: Hermite basis maintenance and Smith
normal form, on Python integers (no overflow, no modular shortcuts)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


def _xgcd(a: int, b: int):
    """``(g, x, y)`` with ``a x + b y = g = gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


@dataclass
class HermiteBasis:
    """Row-style Hermite basis of a sublattice of ``Z^n``.

    ``rows[j]`` is either None or a vector whose first nonzero entry is the
    positive pivot in column j.
    """

    n: int
    rows: list = field(default_factory=list)

    def __post_init__(self):
        if not self.rows:
            self.rows = [None] * self.n

    def add(self, vec) -> bool:
        """Insert a generator; returns True if the lattice grew."""
        v = [int(a) for a in vec]
        grew = False
        for j in range(self.n):
            if v[j] == 0:
                continue
            r = self.rows[j]
            if r is None:
                if v[j] < 0:
                    v = [-a for a in v]
                self.rows[j] = v
                self._reduce_above(j)
                return True
            if v[j] % r[j] == 0:
                q = v[j] // r[j]
                v = [a - q * b for a, b in zip(v, r)]
                continue
            g, x, y = _xgcd(r[j], v[j])
            p, q = r[j] // g, v[j] // g
            new_r = [x * a + y * b for a, b in zip(r, v)]
            v = [p * b - q * a for a, b in zip(r, v)]
            self.rows[j] = new_r
            self._reduce_above(j)
            grew = True
        return grew

    def _reduce_above(self, j: int) -> None:
        piv = self.rows[j]
        for i in range(j):
            r = self.rows[i]
            if r is not None and r[j] != 0:
                q = r[j] // piv[j]
                if q:
                    self.rows[i] = [a - q * b for a, b in zip(r, piv)]
        for k in range(j + 1, self.n):
            later = self.rows[k]
            if later is not None and piv[k] != 0:
                q = piv[k] // later[k]
                if q:
                    piv = [a - q * b for a, b in zip(piv, later)]
        self.rows[j] = piv

    def reduce(self, vec) -> list:
        """Canonical representative of ``vec`` modulo the lattice."""
        v = [int(a) for a in vec]
        for j in range(self.n):
            r = self.rows[j]
            if r is not None and v[j] != 0:
                q = v[j] // r[j]
                if q:
                    v = [a - q * b for a, b in zip(v, r)]
        return v

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))

    @property
    def full_rank(self) -> bool:
        return all(r is not None for r in self.rows)

    def basis(self) -> list:
        return [list(r) for r in self.rows if r is not None]

    def index(self):
        """``[Z^n : L]``, or None when the lattice is not of full rank."""
        if not self.full_rank:
            return None
        out = 1
        for j, r in enumerate(self.rows):
            out *= r[j]
        return out


def smith_normal_form(mat):
    """Return ``(diag, P, Q)`` with ``P @ mat @ Q`` diagonal, ``diag[i] | diag[i+1]``.

    ``mat`` is a list of integer rows; P and Q are unimodular.
    """
    A = [[int(a) for a in row] for row in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    P = [[int(i == j) for j in range(m)] for i in range(m)]
    Q = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(M, i, j):
        M[i], M[j] = M[j], M[i]

    def swap_cols(M, i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]

    def add_row(M, dst, src, k):  # row dst += k * row src
        M[dst] = [a + k * b for a, b in zip(M[dst], M[src])]

    def add_col(M, dst, src, k):  # col dst += k * col src
        for row in M:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            # smallest nonzero entry of the trailing block becomes the pivot
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return [A[i][i] for i in range(min(m, n))], P, Q
            i, j = best
            if i != t:
                swap_rows(A, i, t)
                swap_rows(P, i, t)
            if j != t:
                swap_cols(A, j, t)
                swap_cols(Q, j, t)
            piv = A[t][t]
            clean = True
            for i in range(t + 1, m):
                q = A[i][t] // piv
                if q:
                    add_row(A, i, t, -q)
                    add_row(P, i, t, -q)
                if A[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = A[t][j] // piv
                if q:
                    add_col(A, j, t, -q)
                    add_col(Q, j, t, -q)
                if A[t][j]:
                    clean = False
            if not clean:
                continue
            # the pivot must divide the whole trailing block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv), None)
            if bad is None:
                break
            add_row(A, t, bad[0], 1)
            add_row(P, t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            P[t] = [-a for a in P[t]]
    return [A[i][i] for i in range(min(m, n))], P, Q


def invariant_factors(mat) -> list:
    diag, _, _ = smith_normal_form(mat)
    return [abs(d) for d in diag]


def hnf_sublattices(rank: int, index: int):
    """Every sublattice of ``Z^rank`` of the given index, as upper-triangular
    row Hermite matrices ``H`` (``0 <= H[i][j] < H[j][j]`` for ``i < j``)."""

    def diagonals(k, rest):
        if k == 0:
            if rest == 1:
                yield ()
            return
        for d in range(1, rest + 1):
            if rest % d == 0:
                for tail in diagonals(k - 1, rest // d):
                    yield (d,) + tail

    for diag in diagonals(rank, index):
        slots = [(i, j) for i in range(rank) for j in range(i + 1, rank)]
        ranges = [range(diag[j]) for (_, j) in slots]
        for vals in itertools.product(*ranges):
            H = [[0] * rank for _ in range(rank)]
            for i in range(rank):
                H[i][i] = diag[i]
            for (i, j), v in zip(slots, vals):
                H[i][j] = v
            yield H
