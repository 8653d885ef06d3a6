"""Exact (H,F)-regularity checks, semi-blowups and the partition reduction."""

from .counting import count_copies, density, hf_coefficient, n_copies
from .model import (
    BipartiteGraph,
    KPartiteGraph,
    Pattern,
    PatternPair,
    VertexPartition,
    parse_instance,
    parse_partition,
    parse_pattern,
)
from .reduction import lift_irregularity_witness, reduce_partition, slice_check
from .regularity import (
    CheckBudget,
    check_bipartite_regular,
    check_hf_regular,
    check_hf_regular_partition,
    check_regular_partition,
)
from .semiblowup import build_blowup, build_semi_blowup, pattern_coefficients

__all__ = [
    "BipartiteGraph",
    "CheckBudget",
    "KPartiteGraph",
    "Pattern",
    "PatternPair",
    "VertexPartition",
    "build_blowup",
    "build_semi_blowup",
    "check_bipartite_regular",
    "check_hf_regular",
    "check_hf_regular_partition",
    "check_regular_partition",
    "count_copies",
    "density",
    "hf_coefficient",
    "lift_irregularity_witness",
    "n_copies",
    "parse_instance",
    "parse_partition",
    "parse_pattern",
    "pattern_coefficients",
    "reduce_partition",
    "slice_check",
]
