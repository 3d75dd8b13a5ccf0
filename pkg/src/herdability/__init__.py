"""Exact herdability analysis for linear time-invariant pairs (A, B)."""

from .criteria import CriterionReport, run_all_criteria
from .design import minimal_herdable_leader_sets
from .graph import SignedDigraph, clustering_balance, structural_balance
from .matrix import RationalMatrix, SystemPair, controllability_matrix
from .positivity import HerdabilityVerdict, strictly_positive_in_image
from .reductions import pair_verdict
from .synthesis import herding_input, simulate

__version__ = "0.1.0"

__all__ = [
    "CriterionReport",
    "HerdabilityVerdict",
    "RationalMatrix",
    "SignedDigraph",
    "SystemPair",
    "clustering_balance",
    "controllability_matrix",
    "herding_input",
    "minimal_herdable_leader_sets",
    "pair_verdict",
    "run_all_criteria",
    "simulate",
    "strictly_positive_in_image",
    "structural_balance",
]
