"""Reading and writing solutions: JSON, compact text, and JSON lines."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator, Union

import numpy as np

from .core import FMap, Permutation, SolutionTable, from_f_table
from .errors import MalformedTableError, ParseError, YBError

PathLike = Union[str, Path]


def solution_to_json(s: SolutionTable) -> dict:
    pairs = np.stack([s.s1, s.s2], axis=2)
    return {"n": s.n, "s": pairs.tolist()}


def solution_from_json(obj, location=None) -> SolutionTable:
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg} at line {exc.lineno} column {exc.colno})", location) from exc
    if not isinstance(obj, dict) or "n" not in obj or "s" not in obj:
        raise ParseError('expected an object with keys "n" and "s"', location)
    try:
        arr = np.array(obj["s"], dtype=np.int64)
        n = int(obj["n"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"table entries must be integers: {exc}", location) from exc
    if arr.shape != (n, n, 2):
        raise ParseError(f'"s" must have shape ({n}, {n}, 2), got {arr.shape}', location)
    try:
        return SolutionTable(n, arr[:, :, 0], arr[:, :, 1])
    except MalformedTableError as exc:
        raise ParseError(str(exc), location) from exc


def solution_to_text(s: SolutionTable) -> str:
    """Line 1 is n; then one line per y with the images of ``f_y``."""
    lines = [str(s.n)] + [" ".join(str(int(v)) for v in row) for row in s.f_table]
    return "\n".join(lines) + "\n"


def solution_from_text(text: str, location=None) -> SolutionTable:
    lines = [ln for ln in text.strip().splitlines()]
    try:
        n = int(lines[0])
    except (IndexError, ValueError) as exc:
        raise ParseError("first line must be the size n", f"{location or '<text>'}:1") from exc
    rows = []
    for i in range(n):
        where = f"{location or '<text>'}:{i + 2}"
        try:
            row = [int(v) for v in lines[i + 1].split()]
        except IndexError as exc:
            raise ParseError(f"expected {n} permutation lines", where) from exc
        except ValueError as exc:
            raise ParseError("non-integer entry", where) from exc
        if len(row) != n:
            raise ParseError(f"expected {n} entries, got {len(row)}", where)
        rows.append(row)
    if len(lines) > n + 1:
        raise ParseError("trailing lines after the table", f"{location or '<text>'}:{n + 2}")
    try:
        return from_f_table(FMap(n, np.array(rows, dtype=np.int64)))
    except MalformedTableError as exc:
        raise ParseError(str(exc), location) from exc


def read_solution(path: PathLike) -> SolutionTable:
    """JSON or compact text, chosen by the first non-blank character."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path)) from exc
    if text.lstrip().startswith("{"):
        return solution_from_json(text, str(path))
    return solution_from_text(text, str(path))


def write_solution(s: SolutionTable, path: PathLike, fmt: str = "json") -> None:
    text = json.dumps(solution_to_json(s)) + "\n" if fmt == "json" else solution_to_text(s)
    Path(path).write_text(text)


def write_jsonl(solutions: Iterable[SolutionTable], path: PathLike) -> int:
    count = 0
    with open(path, "w") as fh:
        for s in solutions:
            fh.write(json.dumps(solution_to_json(s), separators=(",", ":")) + "\n")
            count += 1
    return count


def iter_jsonl(path: PathLike) -> Iterator[SolutionTable]:
    try:
        fh = open(path)
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", str(path)) from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                yield solution_from_json(line, f"{path}:{lineno}")


def read_json(path: PathLike, what: str = "file"):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {what}: {exc.strerror}", str(path)) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg})", f"{path}:{exc.lineno}:{exc.colno}") from exc


def permutation_from_json(obj, location=None) -> Permutation:
    try:
        return Permutation(tuple(int(v) for v in obj))
    except (TypeError, ValueError, YBError) as exc:
        raise ParseError(f"expected an images array: {exc}", location) from exc
