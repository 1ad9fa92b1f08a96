"""divscope: a geometric view of amplicon read diversity.

Smith-Waterman distances between reads, classical MDS through a randomized
eigensolver, homology-gap species assignment and density exports.
"""

from .align import AlignmentResult, ScoringScheme, distance, sw_align
from .assign import (AssignmentResult, HomologyGapClassifier, ReferenceDB, Status, classify,
                     color_table, gap_threshold)
from .density import HexBinGrid, ParallelCoordsTable, hexbin, log_counts, parallel_coords
from .distmat import (AlignmentDistance, DistanceMatrix, pairwise_cross, pairwise_self,
                      read_matrix, write_matrix)
from .mds import (Embedding, GramMatrix, RandomizedMDS, embed, gram_from_distances,
                  reconstruction_error)
from .rsvd import SolverOptions, Spectrum, eigs_sym, randomized_range, stable_rank
from .seqio import Read, ReadSet, parse_fasta, subsample, write_fasta

__version__ = "0.1.0"

__all__ = [
    "AlignmentDistance", "AlignmentResult", "AssignmentResult", "DistanceMatrix", "Embedding",
    "GramMatrix", "HexBinGrid", "HomologyGapClassifier", "ParallelCoordsTable", "RandomizedMDS",
    "Read", "ReadSet", "ReferenceDB", "ScoringScheme", "SolverOptions", "Spectrum", "Status",
    "classify", "color_table", "distance", "eigs_sym", "embed", "gap_threshold",
    "gram_from_distances", "hexbin", "log_counts", "pairwise_cross", "pairwise_self",
    "parallel_coords", "parse_fasta", "randomized_range", "read_matrix", "reconstruction_error",
    "stable_rank", "subsample", "sw_align", "write_fasta", "write_matrix",
]
