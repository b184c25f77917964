"""Permuted Chebyshev roots, diagonal ladders, and generating matrices.

For dimensions d = 2**n the lattice handled by this package is generated by
the Vandermonde matrix of the roots of the rescaled degree-d Chebyshev
polynomial 2*cos(d*arccos(x/2)).  Listing the roots in a particular
bit-reversal-style order turns the generator (up to an integer change of
basis) into the block-recursive matrix

    A_0 = (1),   A_{L+1} = ((A_L,  D_L A_L),
                            (A_L, -D_L A_L)),

where D_L is diagonal and positive.  The enumeration and cubature modules
only ever need the diagonals D_0..D_{n-1} (the "ladder"); dense matrices are
materialised here for verification and the brute-force oracle.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass

import numpy as np

#: Default cap on the recursion depth n (dimension d = 2**n).  The streaming
#: enumeration stays practical up to d = 32; raise explicitly if you know
#: what you are doing.
DEFAULT_MAX_LEVEL = 5


@dataclass(frozen=True)
class Level:
    """Recursion depth ``n``; the ambient dimension is ``d = 2**n``."""

    n: int
    max_n: InitVar[int | None] = None

    def __post_init__(self, max_n: int | None) -> None:
        cap = DEFAULT_MAX_LEVEL if max_n is None else max_n
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise ValueError(f"level must be an integer, got {self.n!r}")
        if self.n < 0:
            raise ValueError(f"level must be non-negative, got {self.n}")
        if self.n > cap:
            raise ValueError(
                f"level {self.n} (d = {1 << self.n}) exceeds the configured cap {cap}"
            )

    @property
    def d(self) -> int:
        return 1 << self.n

    @classmethod
    def from_dimension(cls, d: int, max_n: int | None = None) -> "Level":
        """Level for dimension ``d``; raises if ``d`` is not a power of two."""
        n = d.bit_length() - 1
        if d <= 0 or (1 << n) != d:
            raise ValueError(f"dimension must be a power of two, got {d}")
        return cls(n, max_n)


def root_permutation(n: int, k: int) -> int:
    """Position of the k-th root in the recursion-friendly ordering.

    Defined by ``perm(0, 1) = 1`` and, with d = 2**n, by keeping the first
    half and reflecting the second half through 2d + 1.  For every n the map
    ``k -> perm(n, k)`` is a bijection on {1, ..., 2**n}.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    d = 1 << n
    if not 1 <= k <= d:
        raise ValueError(f"index k={k} outside [1, {d}]")
    if n == 0:
        return 1
    half = d >> 1
    if k <= half:
        return root_permutation(n - 1, k)
    return d + 1 - root_permutation(n - 1, k - half)


def chebyshev_root(n: int, k: int) -> float:
    """The k-th permuted root: 2*cos(pi*(2*perm(n,k) - 1) / 2**(n+1)).

    All 2**n values are distinct roots of ``rescaled_chebyshev(2**n, .)`` and
    lie in (-2, 2).
    """
    pos = root_permutation(n, k)
    return 2.0 * math.cos(math.pi * (2 * pos - 1) / (1 << (n + 1)))


def rescaled_chebyshev(d: int, x: float) -> float:
    """Evaluate 2*cos(d*arccos(x/2)) for |x| <= 2 (monic integer polynomial in x)."""
    if d < 1:
        raise ValueError(f"degree must be positive, got {d}")
    if abs(x) > 2.0:
        raise ValueError(f"argument {x} outside [-2, 2]")
    return 2.0 * math.cos(d * math.acos(0.5 * x))


@dataclass(frozen=True)
class DiagLadder:
    """Positive diagonals D_0..D_{n-1} linking consecutive block levels.

    ``levels[L]`` holds 2**L entries: the first half of the level-(L+1)
    permuted roots, all positive.  Squaring an entry and subtracting two
    reproduces the matching level-L root, which is what makes the block
    recursion close.
    """

    levels: tuple[tuple[float, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, L: int) -> tuple[float, ...]:
        if not 0 <= L < len(self.levels):
            raise ValueError(f"ladder has no level {L} (depth {len(self.levels)})")
        return self.levels[L]


def build_diag_ladder(level: Level) -> DiagLadder:
    """Ladder of diagonals for all block merges up to ``level`` (empty for n=0)."""
    return DiagLadder(
        tuple(
            tuple(chebyshev_root(L + 1, k) for k in range(1, (1 << L) + 1))
            for L in range(level.n)
        )
    )


def build_generator_matrix(level: Level, ladder: DiagLadder) -> np.ndarray:
    """Dense 2**n x 2**n generator built by the block recursion.

    Only verification and the brute-force oracle touch this; the enumeration
    algorithms work from the ladder alone.
    """
    if ladder.depth < level.n:
        raise ValueError(f"ladder depth {ladder.depth} < level {level.n}")
    a = np.ones((1, 1))
    for L in range(level.n):
        diag = np.asarray(ladder.levels[L])
        scaled = diag[:, None] * a
        a = np.block([[a, scaled], [a, -scaled]])
    return a


def build_vandermonde(level: Level) -> np.ndarray:
    """Vandermonde matrix of the permuted roots, powers 0..d-1 across columns."""
    d = level.d
    roots = np.array([chebyshev_root(level.n, k) for k in range(1, d + 1)])
    return np.vander(roots, N=d, increasing=True)


def det_magnitude(level: Level) -> float:
    """|det| of the generator in closed form: (2d)**(d/2) / sqrt(2)."""
    d = level.d
    return (2.0 * d) ** (d / 2.0) / math.sqrt(2.0)
