"""Minimal perfect hashing via pseudoforest orientation folded into a
compressed retrieval structure, with a bucketed layer for large key sets.

Positions are 0-based: an instance over n keys is a bijection onto range(n).
"""

from ._kernel import BACKEND
from .core import (BaseCaseConfig, BaseCaseMphf, ConstructionFailure,
                   SearchStats, construct_base, query_base,
                   shockhash_stats_base)
from .gf2 import BitMatrix, BitVector, gf2_defect, gf2_rank, gf2_solve
from .gfp import PrimeField, PrimeFieldVector, gfp_solve
from .hashing import (BIPARTITE, PLAIN, KeyHash, bucket_assign, candidate,
                      master_hash, retrieval_row, threshold_value)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BIPARTITE",
    "PLAIN",
    "BaseCaseConfig",
    "BaseCaseMphf",
    "BitMatrix",
    "BitVector",
    "ConstructionFailure",
    "KeyHash",
    "PrimeField",
    "PrimeFieldVector",
    "SearchStats",
    "bucket_assign",
    "candidate",
    "construct_base",
    "gf2_defect",
    "gf2_rank",
    "gf2_solve",
    "gfp_solve",
    "master_hash",
    "query_base",
    "retrieval_row",
    "shockhash_stats_base",
    "threshold_value",
]
