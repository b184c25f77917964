"""Equal-weight cubature on shrunk lattice points, deterministic and randomized.

For a scale N > 0 the rule integrates f over the centered unit cube by
averaging f over the lattice points that fall in the symmetric box of
half-width 1/(2 s), mapped into the cube by x -> s*x, where the shrink
s = (|det| * N)**(-1/d) normalises the expected node count to about N and
the weight is exactly 1/N.

The randomized variant draws a diagonal dilation u in [1/2, 3/2]^d and a
lattice shift v in [0, 1]^d; its nodes are the lattice points of a dilated,
shifted box mapped by x -> s * (x + G v) / u componentwise (G v is the
generator image of the shift).  With u = 1, v = 0 it degenerates to the
deterministic rule bit-for-bit.  Averaging over shifts gives an unbiased
estimator of the integral.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from .enumeration import Box, DiagLadder, apply_generator, enumerate_stream, split_k1_ranges
from .lattice import Level, det_magnitude

#: Evaluation contract for integrands: total on the closed centered unit cube.
Integrand = Callable[[tuple[float, ...]], float]

#: Slack allowed when checking that mapped nodes lie in the unit cube.
NODE_TOLERANCE = 1e-9


class ConsistencyError(RuntimeError):
    """A mapped node landed outside the tolerance-inflated unit cube."""


@dataclass(frozen=True)
class CubatureSpec:
    """Level plus scale N; shrink and weight are derived.

    Invariants: ``shrink**d * |det| * N == 1`` and ``weight * N == 1`` up to
    relative 1e-12.
    """

    level: Level
    scale: float

    def __post_init__(self) -> None:
        s = float(self.scale)
        if not (math.isfinite(s) and s > 0.0):
            raise ValueError(f"scale must be a positive finite real, got {self.scale}")
        object.__setattr__(self, "scale", s)

    @property
    def shrink(self) -> float:
        """Contraction factor applied to lattice points: (|det| N)**(-1/d)."""
        return (det_magnitude(self.level) * self.scale) ** (-1.0 / self.level.d)

    @property
    def weight(self) -> float:
        """Equal cubature weight |det of the shrunk generator| = 1/N."""
        return 1.0 / self.scale


@dataclass(frozen=True)
class RandomShift:
    """Dilation u in [1/2, 3/2]^d and lattice shift v in [0, 1]^d."""

    u: tuple[float, ...]
    v: tuple[float, ...]
    seed: int | None = None

    def __post_init__(self) -> None:
        u = tuple(float(t) for t in self.u)
        v = tuple(float(t) for t in self.v)
        if len(u) != len(v):
            raise ValueError(f"u and v lengths differ: {len(u)} vs {len(v)}")
        if not all(0.5 <= t <= 1.5 for t in u):
            raise ValueError("all dilation entries must lie in [1/2, 3/2]")
        if not all(0.0 <= t <= 1.0 for t in v):
            raise ValueError("all shift entries must lie in [0, 1]")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def dimension(self) -> int:
        return len(self.u)

    @classmethod
    def identity(cls, d: int) -> "RandomShift":
        """The do-nothing randomization: u = 1, v = 0."""
        return cls((1.0,) * d, (0.0,) * d)


def sample_shift(seed: int, d: int) -> RandomShift:
    """Deterministic seeded shift: u uniform on [1/2, 3/2]^d, v on [0, 1]^d.

    Uses the stdlib Mersenne Twister (``random.Random``), whose streams are
    stable across CPython releases; u and v come from two substreams derived
    from the master seed so they are mutually independent.
    """
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    master = random.Random(seed)
    rng_u = random.Random(master.getrandbits(64))
    rng_v = random.Random(master.getrandbits(64))
    u = tuple(0.5 + rng_u.random() for _ in range(d))
    v = tuple(rng_v.random() for _ in range(d))
    return RandomShift(u, v, seed)


def standard_box(spec: CubatureSpec) -> Box:
    """Symmetric box of half-width 1/(2 shrink); its lattice points biject to the nodes."""
    hw = 0.5 / spec.shrink
    return Box.symmetric(hw, spec.level.d)


def randomized_box(
    spec: CubatureSpec, shift: RandomShift, ladder: DiagLadder
) -> tuple[Box, tuple[float, ...]]:
    """Dilated, shifted enumeration box for the randomized rule.

    Returns the box with corners -+(u_i / (2 shrink)) - (G v)_i together with
    the generator image G v of the shift, computed by the same butterfly
    merges the streaming traversal uses.  The box is never empty.
    """
    d = spec.level.d
    if shift.dimension != d:
        raise ValueError(f"shift dimension {shift.dimension} != lattice dimension {d}")
    shift_vector = apply_generator(ladder, shift.v)
    base = 0.5 / spec.shrink
    lower = tuple(-(base * ui) - avi for ui, avi in zip(shift.u, shift_vector))
    upper = tuple(base * ui - avi for ui, avi in zip(shift.u, shift_vector))
    return Box(lower, upper), shift_vector


def map_to_unit(
    x: Sequence[float],
    spec: CubatureSpec,
    shift: RandomShift | None = None,
    shift_vector: Sequence[float] | None = None,
) -> tuple[float, ...]:
    """Map an enumerated lattice point to its cubature node in [-1/2, 1/2]^d.

    Deterministic rule: node = shrink * x.  Randomized rule: node =
    shrink * (x + shift_vector) / u componentwise.  Raises
    :class:`ConsistencyError` if the result leaves the cube by more than
    ``NODE_TOLERANCE`` (which would indicate an enumeration/mapping mismatch).
    """
    s = spec.shrink
    if shift is None:
        node = tuple(s * xi for xi in x)
    else:
        if shift_vector is None:
            raise ValueError("shift_vector is required when a shift is given")
        node = tuple(
            s * (xi + avi) / ui for xi, avi, ui in zip(x, shift_vector, shift.u)
        )
    bound = 0.5 + NODE_TOLERANCE
    for c in node:
        if not -bound <= c <= bound:
            raise ConsistencyError(
                f"node coordinate {c!r} outside [-1/2, 1/2] beyond tolerance"
            )
    return node


class IntegrationResult(NamedTuple):
    value: float
    node_count: int


def integrate(
    spec: CubatureSpec,
    f: Integrand,
    ladder: DiagLadder,
    shift: RandomShift | None = None,
    *,
    compensated: bool = False,
    threads: int = 1,
) -> IntegrationResult:
    """Weighted sum of f over the cubature nodes, plus the node count.

    The deterministic weight is 1/N.  For a randomized shift the weight also
    carries the dilation's volume change: 1/(N * prod(u)), the |det| of the
    dilated shrunk generator, which keeps the estimator unbiased for every
    dilation (the identity shift reproduces the deterministic value
    bit-for-bit).

    Nodes are streamed: each enumerated lattice point is mapped into the unit
    cube and fed to ``f`` immediately, so nothing is stored.  ``compensated``
    switches the accumulator to Kahan summation.  ``threads`` > 1 splits the
    outermost coordinate range across a thread pool; the result may then
    differ by floating-point reassociation (relative ~1e-12).
    """
    level = spec.level
    if shift is None:
        box = standard_box(spec)
        shift_vector: tuple[float, ...] | None = None
        node_weight = spec.weight
    else:
        box, shift_vector = randomized_box(spec, shift, ladder)
        node_weight = spec.weight / math.prod(shift.u)

    def run_chunk(k1_range: tuple[int, int] | None) -> tuple[float, int]:
        total = 0.0
        carry = 0.0
        if compensated:

            def consume(point) -> None:
                nonlocal total, carry
                fx = f(map_to_unit(point.x, spec, shift, shift_vector))
                y = fx - carry
                t = total + y
                carry = (t - total) - y
                total = t

        else:

            def consume(point) -> None:
                nonlocal total
                total += f(map_to_unit(point.x, spec, shift, shift_vector))

        emitted = enumerate_stream(level, box, ladder, consume, k1_range=k1_range)
        return total, emitted

    if threads <= 1:
        total, count = run_chunk(None)
    else:
        ranges = split_k1_ranges(level, box, ladder, threads)
        total, count = 0.0, 0
        if ranges:
            with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
                for part, emitted in pool.map(run_chunk, ranges):
                    total += part
                    count += emitted
    return IntegrationResult(node_weight * total, count)
