"""Bijections T of a finite abelian group with ``T(kx) = k T^k(x)``, their
relation to cocycle data, and the ring construction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

import numpy as np

from .constructions import AbelianGroup
from .core import Permutation, SolutionTable, validate
from .errors import DomainError, InternalInvariantViolation, StructureError
from .structure import CocycleDatum


@dataclass(frozen=True)
class TStructure:
    group: AbelianGroup
    T: Permutation

    def is_valid(self) -> bool:
        return is_t_structure(self.group, self.T)


def _powers(T: np.ndarray, count: int) -> np.ndarray:
    out = np.empty((count, len(T)), dtype=np.int64)
    out[0] = np.arange(len(T))
    for k in range(1, count):
        out[k] = T[out[k - 1]]
    return out


def is_t_structure(A: AbelianGroup, T) -> bool:
    """Exhaustive check of ``T(kx) = k T^k(x)`` for ``0 <= k < |A|``."""
    T = np.asarray(T.images if isinstance(T, Permutation) else T, dtype=np.int64)
    n = A.order
    if T.shape != (n,) or sorted(T.tolist()) != list(range(n)):
        return False
    pw = _powers(T, n)
    for k in range(n):
        sk = A.scale(k)
        if not np.array_equal(T[sk], sk[pw[k]]):
            return False
    return True


def _circ(d: CocycleDatum) -> np.ndarray:
    """``circ[x, y] = rho(pi^-1(x))(y)``."""
    return np.asarray(d.action)[d.pi_inv]


def t_from_datum(d: CocycleDatum, check_law: bool = True) -> TStructure:
    """``T(x) = rho(pi^-1(x))(x)``; also checks ``(y+x)o z = (y o x) o (y o z)``."""
    problems = d.problems()
    if problems:
        raise StructureError("invalid datum: " + "; ".join(problems))
    circ = _circ(d)
    n = d.A.order
    T = circ[np.arange(n), np.arange(n)]
    if check_law:
        add = d.A.add_table()
        lhs = circ[add]  # [y, x, z] -> (y+x) o z
        rhs = circ[circ[:, :, None], circ[:, None, :]]  # (y o x) o (y o z)
        if not np.array_equal(lhs, rhs):
            raise InternalInvariantViolation("composition identity for the datum fails")
    t = TStructure(d.A, Permutation(tuple(T.tolist())))
    if not t.is_valid():
        raise InternalInvariantViolation("datum produced a map violating T(kx) = k T^k(x)")
    return t


def _datum_from_circ(A: AbelianGroup, circ: np.ndarray) -> CocycleDatum:
    """Datum on the set A with ``pi = id`` and ``rho(x) = circ[x]``; the
    product is forced by the cocycle law: ``x . y = rho(y)^-1(x) + y``."""
    n = A.order
    inv_rows = np.argsort(circ, axis=1)
    add = A.add_table()
    group = add[inv_rows.T, np.arange(n)[None, :]]  # [x, y] -> rho(y)^-1(x) + y
    return CocycleDatum(group=group, A=A, action=circ.copy(), pi=np.arange(n))


def datum_from_t_cyclic(n: int, T) -> CocycleDatum:
    """Datum on Z/n with ``y o z = z T^y(1)`` and ``y . z = z + (-T(z)) o y``."""
    A = AbelianGroup.cyclic(n)
    T = np.asarray(T.images if isinstance(T, Permutation) else T, dtype=np.int64)
    if not is_t_structure(A, T):
        raise DomainError(f"{T.tolist()} is not a T-structure on Z/{n}")
    pw = _powers(T, n)
    one = 1 % n
    z = np.arange(n)
    circ = (z[None, :] * pw[:, one][:, None]) % n  # [y, z]
    group = (z[None, :] + circ[(-T[z]) % n][:, :].T) % n  # [y, z] = z + (-T z) o y
    d = CocycleDatum(group=group, A=A, action=circ, pi=np.arange(n))
    problems = d.problems()
    if problems:
        raise InternalInvariantViolation("cyclic datum is invalid: " + "; ".join(problems))
    return d


def datums_isomorphic(d1: CocycleDatum, d2: CocycleDatum) -> bool:
    """Same A, and ``pi_2^-1 o pi_1`` is a group isomorphism carrying rho_1 to rho_2."""
    if d1.A != d2.A or d1.order != d2.order:
        return False
    psi = d2.pi_inv[d1.pi]
    G1, G2 = np.asarray(d1.group), np.asarray(d2.group)
    if not np.array_equal(G2[psi[:, None], psi[None, :]], psi[G1]):
        return False
    return np.array_equal(np.asarray(d2.action)[psi], np.asarray(d1.action))


def t_power_datum(d: CocycleDatum, k: int) -> CocycleDatum:
    """Datum on A with ``rho_k(x) = rho(pi^-1(k x))`` and ``pi_k = id``; its
    T-structure is ``T^k``."""
    circ = _circ(d)
    out = _datum_from_circ(d.A, circ[d.A.scale(k)])
    problems = out.problems()
    if problems:
        raise InternalInvariantViolation("power datum is invalid: " + "; ".join(problems))
    return out


def trivial_datum(A: AbelianGroup) -> CocycleDatum:
    n = A.order
    return CocycleDatum(group=A.add_table(), A=A, action=np.tile(np.arange(n), (n, 1)), pi=np.arange(n))


def _units(n: int, c: int) -> None:
    for x in range(n):
        if gcd((1 + c * x) % n, n) != 1:
            raise DomainError(f"1 + {c}*{x} is not a unit mod {n}")


def ring_datum(n: int, c: int) -> CocycleDatum:
    """Group ``x . y = x + y + cxy`` on Z/n acting by ``rho(y)x = x (1 + cy)^-1``."""
    if n == 1:
        return trivial_datum(AbelianGroup.cyclic(1))
    _units(n, c)
    x = np.arange(n)
    inv = np.array([pow(int(1 + c * v) % n, -1, n) for v in x])
    circ = (x[None, :] * inv[:, None]) % n
    d = _datum_from_circ(AbelianGroup.cyclic(n), circ)
    if not np.array_equal(d.group, (x[:, None] + x[None, :] + c * x[:, None] * x[None, :]) % n):
        raise InternalInvariantViolation("ring datum product mismatch")
    return d


def ring_solution(n: int, c: int):
    """``T(x) = x (1 + cx)^-1`` and ``S(x, y) = (y (1 + cx + cxcy)^-1, x (1 + cy))``."""
    if n < 1:
        raise DomainError("n must be positive")
    if n == 1:
        return Permutation((0,)), SolutionTable(1, np.zeros((1, 1), dtype=np.int64), np.zeros((1, 1), dtype=np.int64))
    _units(n, c)
    x = np.arange(n)
    inv = np.array([pow(int(1 + c * v) % n, -1, n) for v in x])
    T = (x * inv) % n
    X, Y = np.meshgrid(x, x, indexing="ij")
    s2 = (X * (1 + c * Y)) % n
    s1 = (Y * inv[s2]) % n  # 1 + cx + cxcy = 1 + c * x(1+cy)
    s = SolutionTable(n, s1, s2)
    rep = validate(s)
    if not rep.ok:
        raise InternalInvariantViolation(f"ring solution fails {rep.first_failure()}")
    if not np.array_equal(np.asarray(s.T), T):
        raise InternalInvariantViolation("ring solution has an unexpected T-map")
    return Permutation(tuple(T.tolist())), s


def _order_classes(n: int) -> list:
    """Elements of Z/n grouped by additive order."""
    by = {}
    for x in range(n):
        by.setdefault(n // gcd(x, n), []).append(x)
    return [by[k] for k in sorted(by)]


def enumerate_t_structures(n: int) -> list:
    """All T-structures on Z/n, as permutations in lex order.

    T preserves each subgroup kA, hence the set of elements of each order;
    candidates are products of permutations of those sets.
    """
    if not 1 <= n <= 10:
        raise DomainError("enumeration is limited to 1 <= n <= 10")
    A = AbelianGroup.cyclic(n)
    classes = _order_classes(n)
    out = []
    for choice in itertools.product(*(itertools.permutations(c) for c in classes)):
        T = np.empty(n, dtype=np.int64)
        for cls, img in zip(classes, choice):
            T[list(cls)] = img
        if is_t_structure(A, T):
            out.append(Permutation(tuple(T.tolist())))
    return sorted(out, key=lambda p: p.images)


def restrict_to_multiples(n: int, T: Permutation, k: int):
    """T on the subgroup kZ/n, transported to Z/(n / gcd(n, k))."""
    g = gcd(k, n)
    m = n // g
    imgs = [T(g * i) for i in range(m)]
    if any(v % g for v in imgs):
        return None
    return Permutation(tuple(v // g for v in imgs))


def kernel_exponent(d: CocycleDatum) -> int:
    """Exponent of ``A / pi(Ker rho)``."""
    act = np.asarray(d.action)
    ident = np.arange(d.A.order)
    K = {int(d.pi[g]) for g in range(d.order) if np.array_equal(act[g], ident)}
    add, neg = d.A.add_table(), d.A.neg()
    for r in range(1, d.A.order + 1):
        sr = d.A.scale(r)
        if all(int(sr[a]) in K for a in range(d.A.order)):
            return r
    raise InternalInvariantViolation("no exponent found")
