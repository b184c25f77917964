"""Chebyshev-Frolov lattice point enumeration and lattice-rule cubature.

Enumerates the points of the block-recursive Chebyshev lattices (dimension
d = 2**n) inside arbitrary axis-parallel boxes, either all at once or as a
constant-memory stream, and uses them as nodes for deterministic and
randomized equal-weight cubature over the centered unit cube.  A brute-force
oracle and golden count tables back everything up.
"""

from .cubature import (
    ConsistencyError,
    CubatureSpec,
    Integrand,
    IntegrationResult,
    RandomShift,
    integrate,
    map_to_unit,
    randomized_box,
    sample_shift,
    standard_box,
)
from .enumeration import (
    Box,
    EnumState,
    LatticePoint,
    apply_generator,
    butterfly_merge,
    clamp_bounds,
    count_points,
    enumerate_recursive,
    enumerate_stream,
    interval_mean,
    split_k1_ranges,
)
from .lattice import (
    DEFAULT_MAX_LEVEL,
    DiagLadder,
    Level,
    build_diag_ladder,
    build_generator_matrix,
    build_vandermonde,
    chebyshev_root,
    det_magnitude,
    rescaled_chebyshev,
    root_permutation,
)
from .verify import (
    CountRecord,
    DoubleBoxCheck,
    TableCheck,
    UnimodularCheck,
    double_box_check,
    load_golden_table,
    oracle_enumerate,
    reproduce_table,
    unimodular_check,
)

__version__ = "0.1.0"

__all__ = [
    "Box",
    "ConsistencyError",
    "CountRecord",
    "CubatureSpec",
    "DEFAULT_MAX_LEVEL",
    "DiagLadder",
    "DoubleBoxCheck",
    "EnumState",
    "Integrand",
    "IntegrationResult",
    "LatticePoint",
    "Level",
    "RandomShift",
    "TableCheck",
    "UnimodularCheck",
    "apply_generator",
    "build_diag_ladder",
    "build_generator_matrix",
    "build_vandermonde",
    "butterfly_merge",
    "chebyshev_root",
    "clamp_bounds",
    "count_points",
    "det_magnitude",
    "double_box_check",
    "enumerate_recursive",
    "enumerate_stream",
    "integrate",
    "interval_mean",
    "load_golden_table",
    "map_to_unit",
    "oracle_enumerate",
    "randomized_box",
    "reproduce_table",
    "rescaled_chebyshev",
    "root_permutation",
    "sample_shift",
    "split_k1_ranges",
    "standard_box",
    "unimodular_check",
]
