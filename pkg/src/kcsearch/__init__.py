"""k-completeness guided search over compact binary-classifier architectures."""

from .oracle import CachingOracle, EvalRecord, Oracle, OracleStats, SurfaceOracle, make_surface, with_cache
from .scoring import ScoreParams, jumping_factor, k_completeness
from .search_space import Architecture, GridPoint, SearchSpace, build_space, derive_architecture
from .traversal import (
    SearchResult,
    brute_force_search,
    diagonal_cells,
    diagonal_search,
    primary_diagonal,
    secondary_diagonal,
    zigzag_search,
)

__version__ = "0.1.0"
