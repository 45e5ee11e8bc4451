"""``ybset`` command line.

Exit codes: 0 success, 1 a check or comparison failed, 2 input could not be
parsed, 3 a resource budget was hit, 4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from typing import Optional

import numpy as np

from . import io as yio
from .errors import InternalInvariantViolation, ParseError, ResourceError, YBError

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_BUDGET, EXIT_INTERNAL = 0, 1, 2, 3, 4

log = logging.getLogger("ybset")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _emit_solution(s, args) -> None:
    fmt = getattr(args, "format", "json")
    text = yio.solution_to_text(s).rstrip("\n") if fmt == "text" else json.dumps(yio.solution_to_json(s))
    _emit(text, getattr(args, "out", None))


def _load_many(path: str) -> list:
    """Solutions from a JSONL file, or a single JSON / text solution."""
    if path.endswith(".jsonl"):
        return list(yio.iter_jsonl(path))
    return [yio.read_solution(path)]


def _int_list(text: str, what: str) -> list:
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ParseError(f"{what} must be integers: {text!r}") from exc


def _matrix(text: str, rank: int):
    rows = [r for r in text.split(";")]
    vals = [_int_list(r, "matrix entries") for r in rows]
    if len(vals) != rank or any(len(r) != rank for r in vals):
        raise ParseError(f"matrix {text!r} must be {rank}x{rank}, rows separated by ';'")
    return np.array(vals, dtype=np.int64)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_enumerate(args) -> int:
    from .enumeration import enumerate_keys

    keys = enumerate_keys(args.n, jobs=args.jobs, checkpoint=args.checkpoint)
    lines = (json.dumps(yio.solution_to_json(k.table()), separators=(",", ":")) for k in keys)
    if args.out:
        with open(args.out, "w") as fh:
            for ln in lines:
                fh.write(ln + "\n")
    else:
        for ln in lines:
            print(ln)
    log.info("n=%d: %d classes", args.n, len(keys))
    return EXIT_OK


def cmd_table(args) -> int:
    from .taxonomy import COLUMNS, summary_table

    rows = summary_table(args.n, jobs=args.jobs)
    if args.csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(COLUMNS)
        w.writerows(rows)
    else:
        print(" ".join(f"{c:>7}" for c in COLUMNS))
        for r in rows:
            print(" ".join(f"{v:>7}" for v in r))
    return EXIT_OK


def cmd_classify(args) -> int:
    from .taxonomy import classify

    for s in _load_many(args.input):
        rec = classify(s, affine=not args.no_affine)
        print(json.dumps({"n": s.n, **rec.as_dict()}))
    return EXIT_OK


def cmd_check(args) -> int:
    from .core import validate

    status = EXIT_OK
    for s in _load_many(args.input):
        rep = validate(s)
        out = {"n": s.n, **rep.flags()}
        if rep.braid_witness is not None:
            out["braid_witness"] = [int(v) for v in rep.braid_witness]
        print(json.dumps(out))
        if not rep.ok:
            status = EXIT_FAIL
    return status


def cmd_structure(args) -> int:
    from .structure import compute_structure, is_solvable

    s = yio.read_solution(args.input)
    d = compute_structure(s)
    info = {
        "order": d.order,
        "invariant_factors": [int(v) for v in d.invariant_factors if v != 1],
        "solvable": is_solvable(d),
        "transitive": d.transitive(),
        "cocycle_ok": d.cocycle_ok(),
    }
    if args.json:
        print(json.dumps(info))
    else:
        for k, v in info.items():
            print(f"{k}: {v}")
    return EXIT_OK if info["cocycle_ok"] else EXIT_FAIL


def cmd_retract(args) -> int:
    from .taxonomy import multipermutation_level, retraction

    s = yio.read_solution(args.input)
    r, proj = retraction(s)
    if args.info:
        print(json.dumps({"n": s.n, "retraction_size": r.n, "projection": proj.tolist(),
                          "multipermutation_level": multipermutation_level(s)}))
    else:
        _emit_solution(r, args)
    return EXIT_OK


def cmd_blowup(args) -> int:
    from .structure import BundleSpec, blow_up, cyclic_blowups

    if args.cyclic is not None:
        sols = cyclic_blowups(args.cyclic, args.fiber)
        text = "\n".join(json.dumps(yio.solution_to_json(s), separators=(",", ":")) for s in sols)
        _emit(text, args.out)
        return EXIT_OK
    if not (args.base and args.bundle):
        raise ParseError("blowup needs --base and --bundle, or --cyclic M --fiber K")
    base = yio.read_solution(args.base)
    obj = yio.read_json(args.bundle, "bundle")
    try:
        b = BundleSpec(base, len(obj["projection"]), obj["projection"], obj["gen_action"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bundle JSON needs projection and gen_action: {exc}", args.bundle) from exc
    _emit_solution(blow_up(b), args)
    return EXIT_OK


def _union(args):
    from .constructions import assemble_union, twisted_union

    x = yio.read_solution(args.x)
    y = yio.read_solution(args.y)
    if args.cross:
        obj = yio.read_json(args.cross, "cross map")
        return assemble_union(x, y, obj["cross"] if isinstance(obj, dict) else obj)
    f = _int_list(args.f, "--f") if args.f else list(range(x.n))
    g = _int_list(args.g, "--g") if args.g else list(range(y.n))
    return twisted_union(x, y, f, g)


def cmd_union(args) -> int:
    _emit_solution(_union(args), args)
    return EXIT_OK


def cmd_make(args) -> int:
    from .constructions import AbelianGroup, Endomorphism, affine_solution, permutation_solution, trivial_solution
    from .core import Permutation

    if args.kind == "trivial":
        s = trivial_solution(args.n)
    elif args.kind == "perm":
        if args.images:
            p = Permutation(tuple(_int_list(args.images, "--images")))
        else:
            cyc = _int_list(args.cycle or "", "--cycle")
            size = args.n or (max(cyc) + 1 if cyc else 1)
            p = Permutation.from_cycles(size, [cyc] if cyc else [])
        s = permutation_solution(p)
    elif args.kind == "affine":
        A = AbelianGroup(tuple(_int_list(args.group, "--group")))
        a = Endomorphism(A, _matrix(args.a, A.rank))
        b = Endomorphism(A, _matrix(args.b, A.rank))
        z = A.index(_int_list(args.z, "--z")) if args.z else 0
        s = affine_solution(A, a, b, z)
    else:
        s = _union(args)
    _emit_solution(s, args)
    return EXIT_OK


def cmd_colorings(args) -> int:
    from .links import LinkDiagram, obstruction_diagram, planarity_obstruction

    if args.diagram == "builtin":
        d = obstruction_diagram()
    else:
        d = LinkDiagram.from_json(yio.read_json(args.diagram, "diagram"))
    s = yio.read_solution(args.solution)
    rep = planarity_obstruction(d, s)
    print(json.dumps({"colorings": rep.colorings, "expected": rep.expected,
                      "components": rep.components, "obstructed": rep.obstructed}))
    return EXIT_FAIL if args.expect_planar and rep.obstructed else EXIT_OK


def cmd_tstruct(args) -> int:
    from .constructions import AbelianGroup
    from .tstruct import enumerate_t_structures, is_t_structure, ring_solution

    n = args.order
    if args.check:
        p = yio.permutation_from_json(yio.read_json(args.check, "permutation"), args.check)
        ok = len(p) == n and is_t_structure(AbelianGroup.cyclic(n), p)
        print(json.dumps({"order": n, "T": list(p.images), "t_structure": ok}))
        return EXIT_OK if ok else EXIT_FAIL
    if args.ring_c is not None:
        T, s = ring_solution(n, args.ring_c)
        print(json.dumps({"order": n, "c": args.ring_c, "T": list(T.images), "solution": yio.solution_to_json(s)}))
        return EXIT_OK
    for T in enumerate_t_structures(n):
        print(json.dumps(list(T.images)))
    return EXIT_OK


def cmd_verify_golden(args) -> int:
    from .golden import verify_golden

    rep = verify_golden(args.n_max, jobs=args.jobs)
    for line in rep.lines():
        print(line)
    verdict = "PASS" if rep.ok else f"FAIL ({len(rep.mismatches)} mismatched cells)"
    print(f"{verdict}: {rep.cells_checked()} cells checked")
    return EXIT_OK if rep.ok else EXIT_FAIL


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParseError(message, "arguments")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ybset", description="Finite involutive nondegenerate solutions of the braid relation.")
    p.add_argument("--budget", type=int, help="override every resource budget (same as YBSET_BUDGET)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solution_out(q):
        q.add_argument("--out", help="write here instead of stdout")
        q.add_argument("--format", choices=("json", "text"), default="json")

    q = sub.add_parser("enumerate", help="one canonical solution per class, as JSON lines")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--out")
    q.add_argument("--jobs", type=int, default=1)
    q.add_argument("--checkpoint")
    q.set_defaults(func=cmd_enumerate)

    q = sub.add_parser("table", help="class counts by type for sizes 1..n")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--csv", action="store_true")
    q.add_argument("--jobs", type=int, default=1)
    q.set_defaults(func=cmd_table)

    q = sub.add_parser("classify", help="decomposition and retraction flags")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--no-affine", action="store_true", help="skip the affine test")
    q.set_defaults(func=cmd_classify)

    q = sub.add_parser("check", help="validate a table")
    q.add_argument("--in", dest="input", required=True)
    q.set_defaults(func=cmd_check)

    q = sub.add_parser("structure", help="permutation group, abelian invariant and cocycle")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_structure)

    q = sub.add_parser("retract", help="retraction of a solution")
    q.add_argument("--in", dest="input", required=True)
    q.add_argument("--info", action="store_true", help="print sizes, projection and level instead")
    solution_out(q)
    q.set_defaults(func=cmd_retract)

    q = sub.add_parser("blowup", help="solution from a bundle over a base")
    q.add_argument("--base")
    q.add_argument("--bundle")
    q.add_argument("--cyclic", type=int, help="all blow-ups of the cyclic solution on Z/M")
    q.add_argument("--fiber", type=int, default=2)
    solution_out(q)
    q.set_defaults(func=cmd_blowup)

    def union_args(q):
        q.add_argument("--x", required=True)
        q.add_argument("--y", required=True)
        q.add_argument("--cross", help="JSON cross map [[[y', x'], ...], ...] for every (x, y)")
        q.add_argument("--f", help="automorphism of X for a twisted union (images)")
        q.add_argument("--g", help="automorphism of Y for a twisted union (images)")

    q = sub.add_parser("make", help="named constructions")
    mk = q.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    m = mk.add_parser("trivial")
    m.add_argument("-n", type=int, required=True)
    solution_out(m)
    m = mk.add_parser("perm")
    m.add_argument("--cycle", help='one cycle, e.g. "0 1 2"')
    m.add_argument("--images", help="full permutation as images")
    m.add_argument("-n", type=int)
    solution_out(m)
    m = mk.add_parser("affine")
    m.add_argument("--group", required=True, help='invariant factors, e.g. "2,2"')
    m.add_argument("--a", required=True, help='matrix rows separated by ";"')
    m.add_argument("--b", required=True)
    m.add_argument("--z", help="translation vector")
    solution_out(m)
    m = mk.add_parser("union")
    union_args(m)
    solution_out(m)
    q.set_defaults(func=cmd_make)

    q = sub.add_parser("union", help="union from a cross map or a twisted pair")
    union_args(q)
    solution_out(q)
    q.set_defaults(func=cmd_union)

    q = sub.add_parser("colorings", help="count colorings of a flat-link diagram")
    q.add_argument("--diagram", required=True, help='diagram JSON, or "builtin" for the two-strand example')
    q.add_argument("--solution", required=True)
    q.add_argument("--expect-planar", action="store_true", help="exit 1 if the count is not n^components")
    q.set_defaults(func=cmd_colorings)

    q = sub.add_parser("tstruct", help="T-structures on Z/N")
    q.add_argument("--order", type=int, required=True)
    g = q.add_mutually_exclusive_group()
    g.add_argument("--enumerate", action="store_true")
    g.add_argument("--check", help="permutation JSON (images array)")
    g.add_argument("--ring-c", type=int)
    q.set_defaults(func=cmd_tstruct)

    q = sub.add_parser("verify-golden", help="recompute the class-count table and diff it")
    q.add_argument("--n-max", type=int, default=6)
    q.add_argument("--jobs", type=int, default=1)
    q.set_defaults(func=cmd_verify_golden)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ParseError as exc:
        print(f"ybset: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if args.budget is not None:
        if args.budget <= 0:
            print("ybset: error: --budget must be positive", file=sys.stderr)
            return EXIT_PARSE
        os.environ["YBSET_BUDGET"] = str(args.budget)
    if getattr(args, "jobs", 1) < 1:
        print("ybset: error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"ybset: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ResourceError as exc:
        print(f"ybset: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InternalInvariantViolation as exc:
        print(f"ybset: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except YBError as exc:
        print(f"ybset: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BrokenPipeError:
        return EXIT_OK
    except Exception as exc:  # noqa: BLE001 - surfaced as an internal error
        log.exception("unexpected failure")
        print(f"ybset: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
