"""Isomorph-free generation of all solutions of a given size.

The search splits on the conjugacy type of T (the diagonal of the sigma
table, a relabeling invariant).  For each type the diagonal is pinned to the
lex-least representative, and the kernel fills the remaining cells keeping
only tables that are lex-least under the centralizer of that diagonal.  The
surviving tables are therefore exactly the canonical representatives
produced by :func:`ybset.core.canonical_form`.
"""

from __future__ import annotations

import json
import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Callable, Iterable, Optional

import numpy as np

from . import kernels
from .core import CanonicalKey, SolutionTable, centralizer, t_representative
from .errors import DomainError, InternalInvariantViolation

log = logging.getLogger(__name__)

SOFT_LIMIT = 8
HARD_LIMIT = 10


def partitions(n: int, largest: Optional[int] = None):
    """Integer partitions of n, parts in non-increasing order."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def _part_label(parts) -> str:
    return ",".join(str(p) for p in parts)


def search_type(n: int, parts) -> np.ndarray:
    """All canonical sigma-tables whose T has cycle type ``parts``."""
    T = t_representative(parts)
    C = centralizer(tuple(sorted(parts)))
    ident = np.all(C == np.arange(n)[None, :], axis=1)
    P = np.ascontiguousarray(C[~ident])
    if len(P) == 0:
        P = np.zeros((0, n), dtype=np.int64)
    Pinv = np.ascontiguousarray(np.argsort(P, axis=1)) if len(P) else P.copy()
    cap = 1024
    while True:
        out = np.zeros((cap, n, n), dtype=np.int64)
        count, _nodes = kernels.orderly_search(n, T, P, Pinv, out)
        if count <= cap:
            return out[:count].copy()
        cap = int(count)


def _search_job(args):
    n, parts = args
    return parts, search_type(n, parts)


def _load_checkpoint(path, n) -> dict:
    if not path or not os.path.exists(path):
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if data.get("n") != n:
        raise DomainError(f"checkpoint {path} is for n={data.get('n')}, not n={n}")
    return {
        tuple(int(v) for v in k.split(",")): np.array(rows, dtype=np.int64).reshape(-1, n, n)
        for k, rows in data["done"].items()
    }


def _save_checkpoint(path, n, done: dict) -> None:
    if not path:
        return
    payload = {"n": n, "done": {_part_label(k): v.reshape(len(v), -1).tolist() for k, v in done.items()}}
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


def enumerate_keys(n: int, jobs: int = 1, checkpoint: Optional[str] = None) -> list:
    """Sorted canonical keys of every isomorphism class of size n."""
    if n < 1:
        raise DomainError("n must be at least 1")
    if n > HARD_LIMIT:
        raise DomainError(f"n={n} is beyond the supported range (<= {HARD_LIMIT})")
    if n > SOFT_LIMIT:
        warnings.warn(f"enumerating n={n} is far beyond the tested range", RuntimeWarning)
    done = _load_checkpoint(checkpoint, n)
    todo = [p for p in partitions(n) if p not in done]
    try:
        if jobs > 1 and len(todo) > 1:
            # largest centralizers (most work) first
            todo.sort(key=lambda p: -len(centralizer(tuple(sorted(p)))))
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for parts, tables in pool.map(_search_job, [(n, p) for p in todo]):
                    done[parts] = tables
                    _save_checkpoint(checkpoint, n, done)
        else:
            for parts in todo:
                done[parts] = search_type(n, parts)
                log.debug("n=%d type=%s classes=%d", n, parts, len(done[parts]))
                _save_checkpoint(checkpoint, n, done)
    except KeyboardInterrupt:
        _save_checkpoint(checkpoint, n, done)
        raise
    keys = [CanonicalKey.from_sigma(m) for tables in done.values() for m in tables]
    keys.sort()
    if len(set(keys)) != len(keys):
        raise InternalInvariantViolation("orderly search produced a repeated class")
    return keys


def enumerate_solutions(
    n: int,
    sink: Optional[Callable[[SolutionTable], None]] = None,
    jobs: int = 1,
    checkpoint: Optional[str] = None,
) -> int:
    """Emit one canonical table per class (in key order); return the count."""
    keys = enumerate_keys(n, jobs=jobs, checkpoint=checkpoint)
    if sink is not None:
        for k in keys:
            sink(k.table())
    return len(keys)


@lru_cache(maxsize=16)
def _cached_keys(n: int) -> tuple:
    return tuple(enumerate_keys(n))


def all_solutions(n: int) -> list:
    """Every class of size n as canonical tables (cached per process)."""
    return [k.table() for k in _cached_keys(n)]


def count_by_type(n: int) -> dict:
    return {p: len(search_type(n, p)) for p in partitions(n)}


def iter_solutions(n: int) -> Iterable[SolutionTable]:
    for k in _cached_keys(n):
        yield k.table()
