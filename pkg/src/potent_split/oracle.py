"""Brute-force ground truth at desk scale.

Nothing here calls the constructive engine except to cross-check it: the
p-potent enumeration is a plain filter over every matrix, and certificate
checks recompute powers by naive repeated multiplication.
"""

from __future__ import annotations

import functools
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

from .canonical import CompanionSpec
from .decomp import Decomposition, Route, decompose_companion
from .errors import PotentSplitError, SearchSpaceTooLarge, TraceNotPrimeSubfield
from .field import FieldSpec
from .matf import Matrix

P_POTENT_GUARD = 10**8
SWEEP_GUARD = 10**6


@functools.lru_cache(maxsize=None)
def _p_potents(n: int, spec: FieldSpec) -> tuple[Matrix, ...]:
    p = spec.p
    found = []
    for entries in itertools.product(range(spec.q), repeat=n * n):
        E = Matrix._raw(spec, tuple(entries[i * n:(i + 1) * n] for i in range(n)))
        P = E
        for _ in range(p - 1):
            P = P @ E
        if P == E:
            found.append(E)
    return tuple(found)


def enumerate_p_potents(n: int, spec: FieldSpec) -> Iterator[Matrix]:
    """Every n x n E with E^p = E, in lexicographic row-major code order."""
    if spec.q ** (n * n) > P_POTENT_GUARD:
        raise SearchSpaceTooLarge(f"{spec.q}^{n * n} candidates exceed {P_POTENT_GUARD}")
    return iter(_p_potents(n, spec))


def oracle_decompose(A: Matrix, max_index: int) -> tuple[Matrix, Matrix] | None:
    """First (E, A - E) in enumeration order with E^p = E and (A - E)^max_index = 0."""
    for E in enumerate_p_potents(A.rows, A.spec):
        N = A - E
        P = N
        for _ in range(max_index - 1):
            P = P @ N
        if P.is_zero():
            return E, N
    return None


def naive_certificate_ok(A: Matrix, E: Matrix, V: Matrix, max_index: int = 3) -> bool:
    """A = E + V, E^p = E, V^max_index = 0, by plain repeated products."""
    if E + V != A:
        return False
    P = E
    for _ in range(A.spec.p - 1):
        P = P @ E
    if P != E:
        return False
    P = V
    for _ in range(max_index - 1):
        P = P @ V
    return P.is_zero()


# -- sharpness --

@dataclass
class SharpnessEntry:
    companion: CompanionSpec
    index2_impossible: bool
    certificate: Decomposition


@dataclass
class SharpnessReport:
    field: FieldSpec
    entries: list[SharpnessEntry]
    p_potent_candidates: int = 0

    @property
    def qualifying(self) -> list[CompanionSpec]:
        return [e.companion for e in self.entries]

    @property
    def confirmed(self) -> bool:
        return bool(self.entries) and all(
            e.index2_impossible and e.certificate.checks.ok(3) for e in self.entries
        )

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "n": 3,
            "p_potent_candidates": self.p_potent_candidates,
            "qualifying": [
                {
                    "coeffs": [self.field.format(c) for c in e.companion.codes],
                    "index2_impossible": e.index2_impossible,
                    "certificate": e.certificate.to_json(),
                }
                for e in self.entries
            ],
            "confirmed": self.confirmed,
        }


def sharpness_candidates(spec: FieldSpec) -> list[CompanionSpec]:
    """3x3 companions with trace 1 and none of 0, 1, -1 as eigenvalues."""
    out = []
    minus_one = spec.p - 1
    for c0, c1 in itertools.product(range(spec.q), repeat=2):
        C = CompanionSpec(spec, (c0, c1, minus_one))
        chi = C.char_poly()
        if all(chi(x).code for x in (0, 1, minus_one)):
            out.append(C)
    return out


def sharpness_scan(spec: FieldSpec | None = None) -> SharpnessReport:
    spec = spec or FieldSpec(3)
    if spec.p != 3 or spec.m != 1:
        raise ValueError("the sharpness scan is defined over GF(3)")
    entries = []
    for C in sharpness_candidates(spec):
        impossible = oracle_decompose(C.matrix(), 2) is None
        entries.append(SharpnessEntry(C, impossible, decompose_companion(C)))
    return SharpnessReport(spec, entries, len(_p_potents(3, spec)))


# -- sweeps --

@dataclass
class SweepReport:
    field: FieldSpec
    n: int
    total: int = 0
    succeeded: int = 0
    rejected_trace: int = 0
    route_histogram: dict[str, int] = field(default_factory=dict)
    failures: list[CompanionSpec] = field(default_factory=list)
    fallbacks: list[tuple[CompanionSpec, str, str]] = field(default_factory=list)

    @property
    def oracle_fallbacks(self) -> list[CompanionSpec]:
        return [C for C, route, _ in self.fallbacks if route == Route.ORACLE_FALLBACK.value]

    def merge(self, other: SweepReport) -> SweepReport:
        if (self.field, self.n) != (other.field, other.n):
            raise ValueError("cannot merge reports for different fields or sizes")
        hist = dict(self.route_histogram)
        for k, v in other.route_histogram.items():
            hist[k] = hist.get(k, 0) + v
        return SweepReport(
            self.field, self.n,
            self.total + other.total,
            self.succeeded + other.succeeded,
            self.rejected_trace + other.rejected_trace,
            hist,
            self.failures + other.failures,
            self.fallbacks + other.fallbacks,
        )

    def consistent(self) -> bool:
        return self.total == self.succeeded + self.rejected_trace + len(self.failures)

    def to_json(self) -> dict:
        fmt = self.field.format
        return {
            "field": self.field.to_json(),
            "n": self.n,
            "total": self.total,
            "succeeded": self.succeeded,
            "rejected_trace": self.rejected_trace,
            "route_histogram": dict(sorted(self.route_histogram.items())),
            "failures": [[fmt(c) for c in C.codes] for C in self.failures],
            "fallbacks": [
                {"coeffs": [fmt(c) for c in C.codes], "route": route, "detail": detail}
                for C, route, detail in self.fallbacks
            ],
        }


def _sweep_range(spec: FieldSpec, n: int, start: int, stop: int) -> SweepReport:
    report = SweepReport(spec, n)
    q = spec.q
    for index in range(start, stop):
        codes = []
        x = index
        for _ in range(n):
            x, r = divmod(x, q)
            codes.append(r)
        C = CompanionSpec(spec, tuple(reversed(codes)))
        report.total += 1
        try:
            dec = decompose_companion(C)
        except TraceNotPrimeSubfield:
            report.rejected_trace += 1
            continue
        except PotentSplitError:
            report.failures.append(C)
            continue
        if not naive_certificate_ok(C.matrix(), dec.E, dec.V, 3):
            report.failures.append(C)
            continue
        report.succeeded += 1
        key = dec.route.value
        report.route_histogram[key] = report.route_histogram.get(key, 0) + 1
        if dec.fallback or dec.route == Route.ORACLE_FALLBACK:
            report.fallbacks.append((C, key, dec.detail))
    return report


def sweep_workers() -> int:
    raw = os.environ.get("POTENT_SPLIT_THREADS")
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"POTENT_SPLIT_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"POTENT_SPLIT_THREADS must be a positive integer, got {raw!r}")
    return value


def exhaustive_sweep(n: int, spec: FieldSpec, workers: int | None = None) -> SweepReport:
    """Decompose and re-verify every n x n companion over ``spec``.

    Companions are visited in lexicographic order of (c_0, ..., c_{n-1});
    with several workers the index range is split into contiguous chunks and
    the partial reports are merged in order.
    """
    total = spec.q ** n
    if total > SWEEP_GUARD:
        raise SearchSpaceTooLarge(f"{total} companions exceed {SWEEP_GUARD}")
    workers = sweep_workers() if workers is None else workers
    if workers <= 1 or total < 64:
        return _sweep_range(spec, n, 0, total)
    step = -(-total // workers)
    bounds = [(s, min(s + step, total)) for s in range(0, total, step)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_sweep_range, *zip(*[(spec, n, a, b) for a, b in bounds])))
    report = parts[0]
    for part in parts[1:]:
        report = report.merge(part)
    return report
