import json
import numpy as np
import pytest

from oracles import brute_key, naive_solutions
from ybset.core import canonical_form, partition_of, validate
from ybset.enumeration import (
    all_solutions,
    count_by_type,
    enumerate_keys,
    enumerate_solutions,
    iter_solutions,
    partitions,
)
from ybset.errors import DomainError

COUNTS = {1: 1, 2: 2, 3: 5, 4: 23, 5: 88, 6: 595}


@pytest.mark.parametrize("n", sorted(COUNTS))
def test_class_counts(n):
    assert len(enumerate_keys(n)) == COUNTS[n]


def test_outputs_validate_and_are_canonical(classes):
    for n in range(1, 7):
        for s in classes[n]:
            assert validate(s).ok
            assert canonical_form(s).table() == s


@pytest.mark.parametrize("n", [1, 2, 3])
def test_matches_naive_enumeration(n):
    naive = {brute_key(s) for s in naive_solutions(n)}
    ours = {brute_key(s) for s in all_solutions(n)}
    assert ours == naive


def test_partitions():
    assert list(partitions(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert len(list(partitions(8))) == 22


def test_type_split_covers_every_class():
    for n in range(1, 6):
        by = count_by_type(n)
        assert sum(by.values()) == COUNTS[n]
        seen = {}
        for s in all_solutions(n):
            p = tuple(sorted(partition_of(np.asarray(s.T)), reverse=True))
            seen[p] = seen.get(p, 0) + 1
        assert {tuple(sorted(k, reverse=True)): v for k, v in by.items() if v} == seen


def test_sorted_and_deterministic():
    a = enumerate_keys(5)
    assert a == sorted(a)
    assert a == enumerate_keys(5)


def test_jobs_give_same_result():
    assert enumerate_keys(6, jobs=2) == enumerate_keys(6)


def test_sink_receives_every_class():
    got = []
    assert enumerate_solutions(4, sink=got.append) == 23
    assert [canonical_form(s) for s in got] == enumerate_keys(4)
    assert len(list(iter_solutions(4))) == 23


def test_checkpoint_resume(tmp_path):
    ck = tmp_path / "ck.json"
    full = enumerate_keys(5, checkpoint=str(ck))
    data = json.loads(ck.read_text())
    assert data["n"] == 5 and len(data["done"]) == len(list(partitions(5)))
    # drop two partitions as if interrupted, then resume
    for label in list(data["done"])[:2]:
        del data["done"][label]
    ck.write_text(json.dumps(data))
    assert enumerate_keys(5, checkpoint=str(ck)) == full


def test_checkpoint_for_other_size_is_rejected(tmp_path):
    ck = tmp_path / "ck.json"
    enumerate_keys(3, checkpoint=str(ck))
    with pytest.raises(DomainError):
        enumerate_keys(4, checkpoint=str(ck))


def test_size_limits():
    with pytest.raises(DomainError):
        enumerate_keys(0)
    with pytest.raises(DomainError):
        enumerate_keys(11)
