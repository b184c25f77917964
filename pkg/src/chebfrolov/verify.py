"""Independent correctness machinery.

Three unrelated routes confirm the enumeration: a brute-force oracle that
inverts the dense generator and tests every integer vector in a bounding
box, a two-scale consistency check that enumerates the double-scale box and
filters, and regression against an embedded table of known-good node counts
for the standard cubature boxes (data/golden_counts.csv, columns
d, log2N, count).
"""

from __future__ import annotations

import csv
import io
import itertools
from functools import lru_cache
from importlib import resources
from typing import NamedTuple

import numpy as np

from .cubature import CubatureSpec, standard_box
from .enumeration import Box, LatticePoint, count_points, enumerate_stream
from .lattice import (
    Level,
    build_diag_ladder,
    build_generator_matrix,
    build_vandermonde,
)

#: The brute-force oracle refuses levels above this (bounding-box cost).
ORACLE_MAX_LEVEL = 3

#: Hard cap on candidate vectors the oracle will sweep.
_ORACLE_MAX_CANDIDATES = 1 << 24

#: Membership slack of the oracle; matches the enumeration tolerance so a
#: disagreement isolates an algorithmic bug, not rounding.
ORACLE_TOLERANCE = 1e-9


class CountRecord(NamedTuple):
    d: int
    log2n: int
    count: int


class TableCheck(NamedTuple):
    record: CountRecord
    observed: int
    match: bool


class DoubleBoxCheck(NamedTuple):
    direct: int
    filtered: int
    agree: bool


class UnimodularCheck(NamedTuple):
    max_integer_deviation: float
    det_deviation: float
    passed: bool


@lru_cache(maxsize=1)
def load_golden_table() -> tuple[CountRecord, ...]:
    """Known-good node counts for the standard boxes, one row per (d, log2N)."""
    text = resources.files("chebfrolov").joinpath("data/golden_counts.csv").read_text()
    return tuple(
        CountRecord(int(row["d"]), int(row["log2N"]), int(row["count"]))
        for row in csv.DictReader(io.StringIO(text))
    )


def oracle_enumerate(level: Level, box: Box) -> list[LatticePoint]:
    """Brute-force reference enumeration, independent of the streaming code.

    Inverts the dense generator, derives integer bounds for k by interval
    arithmetic on the box corners, and tests every candidate against the box
    with ``ORACLE_TOLERANCE`` slack.  Returns points in lexicographic k
    order.  Only sensible for small levels; larger ones are refused.
    """
    if level.n > ORACLE_MAX_LEVEL:
        raise ValueError(
            f"oracle refuses level {level.n} > {ORACLE_MAX_LEVEL}: "
            "bounding-box sweep cost grows too fast"
        )
    if box.dimension != level.d:
        raise ValueError(f"box dimension {box.dimension} != {level.d}")
    gen = build_generator_matrix(level, build_diag_ladder(level))
    inv = np.linalg.inv(gen)
    b = np.asarray(box.lower)
    c = np.asarray(box.upper)
    # interval image of the box under the inverse, inflated before rounding
    lo = np.minimum(inv * b, inv * c).sum(axis=1)
    hi = np.maximum(inv * b, inv * c).sum(axis=1)
    kmin = np.ceil(lo - 1e-6).astype(int)
    kmax = np.floor(hi + 1e-6).astype(int)
    sizes = np.maximum(kmax - kmin + 1, 0)
    total = int(np.prod(sizes))
    if total == 0:
        return []
    if total > _ORACLE_MAX_CANDIDATES:
        raise ValueError(f"oracle candidate set too large ({total} vectors)")

    accepted: list[LatticePoint] = []
    blo = b - ORACLE_TOLERANCE
    chi = c + ORACLE_TOLERANCE
    ranges = [range(a, z + 1) for a, z in zip(kmin, kmax)]
    chunk: list[tuple[int, ...]] = []

    def flush() -> None:
        if not chunk:
            return
        karr = np.array(chunk)
        imgs = karr @ gen.T
        ok = np.all((imgs >= blo) & (imgs <= chi), axis=1)
        for idx in np.nonzero(ok)[0]:
            accepted.append(
                LatticePoint(tuple(chunk[idx]), tuple(float(v) for v in imgs[idx]))
            )
        chunk.clear()

    for k in itertools.product(*ranges):
        chunk.append(k)
        if len(chunk) == 65536:
            flush()
    flush()
    return accepted


def double_box_check(level: Level, scale: float) -> DoubleBoxCheck:
    """Two-scale consistency: enumerate at scale 2N, filter into the N box.

    The N-scale box is strictly contained in the 2N-scale box, so every
    N-scale point reappears in the larger enumeration; the filtered count
    must equal the direct count.
    """
    ladder = build_diag_ladder(level)
    small = standard_box(CubatureSpec(level, scale))
    big = standard_box(CubatureSpec(level, 2.0 * scale))
    direct = count_points(level, small, ladder)

    lower, upper = small.lower, small.upper
    filtered = 0

    def consume(point: LatticePoint) -> None:
        nonlocal filtered
        x = point.x
        for j in range(len(x)):
            if not lower[j] <= x[j] <= upper[j]:
                return
        filtered += 1

    enumerate_stream(level, big, ladder, consume)
    return DoubleBoxCheck(direct, filtered, direct == filtered)


def unimodular_check(level: Level) -> UnimodularCheck:
    """Confirm the block generator spans the same lattice as the Vandermonde.

    Solves V S = A; S must be an integer matrix with |det S| = 1.  Reports
    the worst entry deviation from the nearest integer and the deviation of
    |det| from one; passes when both are below 1e-6.
    """
    if level.n > 3:
        raise ValueError(f"unimodular check limited to level <= 3, got {level.n}")
    vand = build_vandermonde(level)
    gen = build_generator_matrix(level, build_diag_ladder(level))
    s = np.linalg.solve(vand, gen)
    max_dev = float(np.max(np.abs(s - np.round(s))))
    det_dev = float(abs(abs(np.linalg.det(s)) - 1.0))
    return UnimodularCheck(max_dev, det_dev, max_dev < 1e-6 and det_dev < 1e-6)


def reproduce_table(max_level: Level, max_log2n: int) -> list[TableCheck]:
    """Re-count every golden row with d <= 2**max_level.n and log2N <= max_log2n."""
    checks: list[TableCheck] = []
    ladders: dict[int, tuple[Level, object]] = {}
    for record in load_golden_table():
        if record.d > max_level.d or record.log2n > max_log2n:
            continue
        if record.d not in ladders:
            lvl = Level.from_dimension(record.d, max_n=max_level.n)
            ladders[record.d] = (lvl, build_diag_ladder(lvl))
        lvl, ladder = ladders[record.d]
        box = standard_box(CubatureSpec(lvl, float(2**record.log2n)))
        observed = count_points(lvl, box, ladder)
        checks.append(TableCheck(record, observed, observed == record.count))
    return checks
