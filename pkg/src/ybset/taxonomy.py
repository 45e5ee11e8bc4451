"""Orbits, decompositions, retraction and the classification flags tabulated
per size (decomposable, twisted unions, multipermutation level, ...)."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .core import SolutionTable, canonical_form, is_isomorphic, validate
from .errors import DomainError, InternalInvariantViolation

COLUMNS = ("n", "s", "ds", "tu", "gtu", "id", "idmp", "idir", "idira")


def orbits(s: SolutionTable) -> list:
    """Orbits of the group generated by the maps ``f_x^-1`` (sorted lists)."""
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
                parent[max(a, b)] = min(a, b)
    groups = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return sorted(groups.values())


def decompositions(s: SolutionTable) -> list:
    """Every unordered split of the orbit set into two nonempty parts."""
    orbs = orbits(s)
    k = len(orbs)
    out = []
    # orbit 0 always goes in the first part, so each split appears once
    for mask in range(1 << (k - 1)):
        if mask == (1 << (k - 1)) - 1:
            continue
        first = list(orbs[0])
        second = []
        for i in range(1, k):
            if mask >> (i - 1) & 1:
                first += orbs[i]
            else:
                second += orbs[i]
        out.append((sorted(first), sorted(second)))
    return out


def _twisted_on(s: SolutionTable, X, Y) -> bool:
    ix = np.ix_(X, Y)
    a = s.s1[ix]  # first output on X x Y
    b = s.s2[ix]
    return bool(np.all(a == a[:1, :]) and np.all(b == b[:, :1]))


def _generalized_twisted_on(s: SolutionTable, X, Y) -> bool:
    X = np.asarray(X)
    Y = np.asarray(Y)
    fy_x = s.s2[np.ix_(X, Y)]  # f_y(x) for x in X, y in Y
    gx_y = s.s1[np.ix_(X, Y)]  # g_x(y)
    # g_{f_y(x)} restricted to Y must not depend on y
    rows = s.s1[fy_x[:, :, None], Y[None, None, :]]  # [x, y, y'] = g_{f_y(x)}(y')
    if not np.all(rows == rows[:, :1, :]):
        return False
    # f_{g_x(y)} restricted to X must not depend on x
    cols = s.s2[X[None, None, :], gx_y[:, :, None]]  # [x, y, x'] = f_{g_x(y)}(x')
    return bool(np.all(cols == cols[:1, :, :]))


def is_twisted_union(s: SolutionTable) -> bool:
    return any(_twisted_on(s, X, Y) for X, Y in decompositions(s))


def is_generalized_twisted_union(s: SolutionTable) -> bool:
    return any(
        _generalized_twisted_on(s, X, Y) or _generalized_twisted_on(s, Y, X) for X, Y in decompositions(s)
    )


def retraction(s: SolutionTable) -> tuple:
    """Quotient by ``x ~ y iff f_x = f_y``; classes numbered by first member."""
    n = s.n
    F = s.f_table
    _, first, proj = np.unique(F, axis=0, return_index=True, return_inverse=True)
    proj = np.asarray(proj).ravel()
    # renumber classes in order of their least member
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    proj = rank[proj]
    reps = np.sort(first)
    m = len(reps)
    s1 = proj[s.s1[np.ix_(reps, reps)]]
    s2 = proj[s.s2[np.ix_(reps, reps)]]
    # well defined: every representative choice gives the same classes
    if not (np.array_equal(proj[s.s1], s1[np.ix_(proj, proj)]) and np.array_equal(proj[s.s2], s2[np.ix_(proj, proj)])):
        raise InternalInvariantViolation("retraction is not well defined")
    return SolutionTable(m, s1, s2), proj


def multipermutation_level(s: SolutionTable) -> Optional[int]:
    level = 0
    cur = s
    while cur.n > 1:
        nxt, _ = retraction(cur)
        if nxt.n == cur.n:
            return None
        cur = nxt
        level += 1
    return level


def is_irretractable(s: SolutionTable) -> bool:
    return s.n > 1 and retraction(s)[0].n == s.n


def is_retractable(s: SolutionTable) -> bool:
    return not is_irretractable(s)


def is_affine(s: SolutionTable) -> bool:
    from .constructions import affine_keys

    if s.n > 8:
        raise DomainError("affine recognition covers n <= 8")
    return canonical_form(s) in affine_keys(s.n)


@dataclass(frozen=True)
class ClassificationRecord:
    decomposable: bool
    twisted_union: bool
    generalized_twisted_union: bool
    indecomposable: bool
    multipermutation_level: Optional[int]
    irretractable: bool
    affine: bool

    def as_dict(self) -> dict:
        return asdict(self)


def classify(s: SolutionTable, affine: bool = True) -> ClassificationRecord:
    """All flags for one solution.  ``affine=False`` skips the (costlier) affine
    test when the caller only needs it for irretractable indecomposables."""
    decs = decompositions(s)
    decomposable = bool(decs)
    tu = any(_twisted_on(s, X, Y) for X, Y in decs)
    gtu = tu or any(_generalized_twisted_on(s, X, Y) or _generalized_twisted_on(s, Y, X) for X, Y in decs)
    level = multipermutation_level(s)
    irr = is_irretractable(s)
    aff = is_affine(s) if affine else False
    return ClassificationRecord(decomposable, tu, gtu, not decomposable, level, irr, aff)


def summary_row(n: int, solutions) -> tuple:
    counts = dict.fromkeys(COLUMNS[1:], 0)
    for s in solutions:
        rec = classify(s, affine=False)
        counts["s"] += 1
        counts["ds"] += rec.decomposable
        counts["tu"] += rec.twisted_union
        counts["gtu"] += rec.generalized_twisted_union
        if rec.indecomposable:
            counts["id"] += 1
            counts["idmp"] += rec.multipermutation_level is not None
            if rec.irretractable:
                counts["idir"] += 1
                counts["idira"] += is_affine(s)
    return (n,) + tuple(counts[c] for c in COLUMNS[1:])


def summary_table(n_max: int, jobs: int = 1) -> list:
    from .enumeration import enumerate_keys

    rows = []
    for n in range(1, n_max + 1):
        keys = enumerate_keys(n, jobs=jobs)
        rows.append(summary_row(n, (k.table() for k in keys)))
    return rows


def check_record(rec: ClassificationRecord, n: int) -> None:
    """Raise if the record's internal implications fail."""
    if rec.indecomposable == rec.decomposable:
        raise InternalInvariantViolation("indecomposable must be the negation of decomposable")
    if rec.twisted_union and not rec.generalized_twisted_union:
        raise InternalInvariantViolation("twisted union must be generalized")
    if rec.generalized_twisted_union and not rec.decomposable:
        raise InternalInvariantViolation("generalized twisted union must be decomposable")
    if rec.irretractable and rec.multipermutation_level is not None and n != 1:
        raise InternalInvariantViolation("irretractable solution with a multipermutation level")


__all__ = [
    "COLUMNS",
    "ClassificationRecord",
    "check_record",
    "classify",
    "decompositions",
    "is_affine",
    "is_generalized_twisted_union",
    "is_irretractable",
    "is_twisted_union",
    "is_isomorphic",
    "multipermutation_level",
    "orbits",
    "retraction",
    "summary_row",
    "summary_table",
    "validate",
]
