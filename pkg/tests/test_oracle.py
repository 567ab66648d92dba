import itertools
import json
from math import prod
from pathlib import Path

import pytest

from potent_split.canonical import CompanionSpec
from potent_split.decomp import Route, check_trace_condition
from potent_split.errors import SearchSpaceTooLarge
from potent_split.field import FieldSpec
from potent_split.matf import Matrix
from potent_split.oracle import (
    SweepReport,
    enumerate_p_potents,
    exhaustive_sweep,
    naive_certificate_ok,
    oracle_decompose,
    sharpness_candidates,
    sharpness_scan,
    sweep_workers,
)

from conftest import F3, F5, F9, companion

GOLDEN = Path(__file__).parent / "golden"


def load(name):
    return json.loads((GOLDEN / name).read_text())


def gl_order(n, q):
    return prod(q ** n - q ** i for i in range(n))


def class_count_p_potents(n, spec):
    """E^p = E means diagonalizable with eigenvalues in F_p: sum |GL_n| / |centralizer|."""
    p, q = spec.p, spec.q
    total = 0
    # multiplicity vector over the p eigenvalues
    for mult in itertools.product(range(n + 1), repeat=p):
        if sum(mult) == n:
            total += gl_order(n, q) // prod(gl_order(m, q) for m in mult)
    return total


@pytest.mark.parametrize("entry", load("p_potent_counts.json")["counts"], ids=lambda e: f"{e['field']['p']}^{e['field']['m']}-n{e['n']}")
def test_p_potent_counts_golden(entry):
    spec = FieldSpec.from_json(entry["field"])
    n = entry["n"]
    found = list(enumerate_p_potents(n, spec))
    assert len(found) == entry["count"] == class_count_p_potents(n, spec)
    assert len(set(found)) == len(found)
    assert found == sorted(found, key=lambda E: E.codes)


def test_p_potent_examples():
    assert [E.code(0, 0) for E in enumerate_p_potents(1, F3)] == [0, 1, 2]
    for E in enumerate_p_potents(2, F3):
        L = Matrix.identity(F3, 2).scale(2) - E
        assert L ** 3 == L


def test_p_potent_guard():
    with pytest.raises(SearchSpaceTooLarge):
        enumerate_p_potents(4, F5)


def test_oracle_examples():
    N = companion(F3, 0, 0, 0).matrix()
    E, V = oracle_decompose(N, 3)
    assert E.is_zero() and V == N
    A = companion(F3, 1, 0, 2).matrix()
    assert oracle_decompose(A, 2) is None
    E, V = oracle_decompose(A, 3)
    assert naive_certificate_ok(A, E, V)


def test_oracle_matches_trace_gate_f3_and_f9():
    # oracle finds a nilpotent remainder exactly when the trace is t*1
    for n in (1, 2, 3):
        for codes in itertools.product(range(3), repeat=n):
            A = CompanionSpec(F3, codes).matrix()
            assert oracle_decompose(A, n) is not None
    for codes in itertools.product(range(9), repeat=2):
        A = CompanionSpec(F9, codes).matrix()
        assert (oracle_decompose(A, 2) is not None) == (check_trace_condition(A) is not None)


def test_sharpness_candidates():
    quals = sharpness_candidates(F3)
    assert CompanionSpec.of(F3, [1, 0, -1]) in quals
    assert all(C.codes[0] != 0 for C in quals)
    for C in quals:
        assert C.trace() == F3(1)
        assert all(C.char_poly()(x) for x in (0, 1, 2))


def test_sharpness_golden():
    report = sharpness_scan()
    golden = load("sharpness_f3.json")
    assert report.to_json() == golden
    assert report.confirmed
    assert len(report.entries) >= 1
    assert all(e.index2_impossible for e in report.entries)
    with pytest.raises(ValueError):
        sharpness_scan(F5)


@pytest.mark.parametrize("name,spec,n", [("sweep_f3_n3.json", F3, 3), ("sweep_f9_n2.json", F9, 2)])
def test_sweep_golden(name, spec, n):
    report = exhaustive_sweep(n, spec)
    assert report.to_json() == load(name)
    assert report.consistent()


def test_sweep_examples():
    r = exhaustive_sweep(1, F3)
    assert (r.total, r.succeeded) == (3, 3)
    r = exhaustive_sweep(2, F9)
    assert (r.total, r.succeeded, r.rejected_trace) == (81, 27, 54)
    assert not r.failures


def test_parallel_sweep_matches_serial():
    serial = exhaustive_sweep(4, F3, workers=1)
    parallel = exhaustive_sweep(4, F3, workers=3)
    assert serial.to_json() == parallel.to_json()


def test_sweep_workers_env(monkeypatch):
    monkeypatch.delenv("POTENT_SPLIT_THREADS", raising=False)
    assert sweep_workers() == 1
    monkeypatch.setenv("POTENT_SPLIT_THREADS", "4")
    assert sweep_workers() == 4
    monkeypatch.setenv("POTENT_SPLIT_THREADS", "zero")
    with pytest.raises(ValueError):
        sweep_workers()


def test_sweep_guard():
    with pytest.raises(SearchSpaceTooLarge):
        exhaustive_sweep(9, F5)


def test_report_merge_rejects_mismatch():
    with pytest.raises(ValueError):
        SweepReport(F3, 2).merge(SweepReport(F3, 3))


def test_f5_n3_fallbacks_are_constructive():
    r = exhaustive_sweep(3, F5)
    assert r.succeeded == 125 and not r.oracle_fallbacks
    assert r.route_histogram.get(Route.ORACLE_FALLBACK.value, 0) == 0
