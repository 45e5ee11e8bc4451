"""Compare the compiled kernels against the pure numpy/Python fallback.

Each backend runs in its own interpreter because the choice is made at import
time from ``YBSET_PURE_PYTHON``.  Compilation is warmed up before timing.

    python3 benchmarks/bench_kernels.py [--sizes 4 5 6] [--repeat 3]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from ybset import backend
from ybset.enumeration import enumerate_keys, all_solutions
from ybset.core import canonical_form, validate

sizes, repeat = json.loads(sys.argv[1]), int(sys.argv[2])
enumerate_keys(3)  # compile
out = {"backend": backend(), "enumerate": {}, "canonical": {}, "validate": {}}

def best(fn):
    times = []
    for _ in range(repeat):
        t = time.perf_counter(); fn(); times.append(time.perf_counter() - t)
    return min(times)

for n in sizes:
    out["enumerate"][n] = best(lambda: enumerate_keys(n))
    sols = all_solutions(n)
    out["canonical"][n] = best(lambda: [canonical_form(s) for s in sols])
    out["validate"][n] = best(lambda: [validate(s) for s in sols])
print(json.dumps(out))
"""


def run(pure: bool, sizes, repeat) -> dict:
    env = dict(os.environ)
    env.pop("NUMBA_DISABLE_JIT", None)
    if pure:
        env["YBSET_PURE_PYTHON"] = "1"
    else:
        env.pop("YBSET_PURE_PYTHON", None)
    res = subprocess.run(
        [sys.executable, "-c", WORKER, json.dumps(sizes), str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(res.stdout.strip().splitlines()[-1])


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 5, 6])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    fast = run(False, args.sizes, args.repeat)
    slow = run(True, args.sizes, args.repeat)
    print(f"{'task':<10} {'n':>3} {fast['backend']:>12} {slow['backend']:>12} {'speedup':>9}")
    for task in ("enumerate", "canonical", "validate"):
        for n in args.sizes:
            a, b = fast[task][str(n)], slow[task][str(n)]
            print(f"{task:<10} {n:>3} {a:>11.4f}s {b:>11.4f}s {b / a:>8.1f}x")


if __name__ == "__main__":
    main()
