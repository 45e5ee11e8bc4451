import json
import os
import subprocess
import sys

import numpy as np

from ybset import _accel, kernels
from ybset.constructions import trivial_solution
from ybset.core import SolutionTable

SCRIPT = """
import json
from ybset._accel import backend
from ybset.enumeration import enumerate_keys
from ybset.golden import verify_golden
print(json.dumps({"backend": backend(), "keys": [k.hex() for k in enumerate_keys(5)],
                  "golden": verify_golden(4).ok}))
"""


def _run(flag):
    env = dict(os.environ)
    env.pop("YBSET_PURE_PYTHON", None)
    env.pop("NUMBA_DISABLE_JIT", None)
    if flag:
        env["YBSET_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_pure_and_compiled_backends_agree():
    fast, pure = _run(False), _run(True)
    assert fast["backend"] == "numba" and pure["backend"] == "python"
    assert fast["keys"] == pure["keys"] and len(fast["keys"]) == 88
    assert fast["golden"] and pure["golden"]


def test_flag_parsing(monkeypatch):
    for raw, want in [("1", True), ("yes", True), ("0", False), ("", False), ("false", False)]:
        monkeypatch.setenv("YBSET_PURE_PYTHON", raw)
        assert _accel._flag_set("YBSET_PURE_PYTHON") is want


def test_kernel_dispatch_matches_numpy():
    rng = np.random.default_rng(7)
    perms = np.array([rng.permutation(5) for _ in range(30)], dtype=np.int64)
    for _ in range(20):
        sig = rng.integers(0, 5, size=(5, 5)).astype(np.int64)
        want = kernels._min_relabel_numpy(sig, perms)
        assert np.array_equal(kernels.min_relabel(sig, perms), want)
        assert np.array_equal(kernels._min_relabel_jit(sig, perms), want)


def test_braid_witness_backends_agree():
    bad = SolutionTable(3, [[1, 0, 2], [1, 2, 0], [1, 0, 2]], [[2, 1, 1], [0, 0, 0], [1, 2, 2]])
    s1, s2 = bad.s1.astype(np.int64), bad.s2.astype(np.int64)
    want = kernels._braid_witness_numpy(s1, s2)
    assert want != (-1, -1, -1)
    assert kernels.braid_witness(s1, s2) == want
    assert tuple(int(v) for v in kernels._braid_witness_jit(s1, s2)) == want
    good = trivial_solution(3)
    assert kernels.braid_witness(good.s1.astype(np.int64), good.s2.astype(np.int64)) == (-1, -1, -1)
