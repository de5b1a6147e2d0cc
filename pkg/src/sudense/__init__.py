"""Deciding whether a finitely generated subgroup of a free group is dense in
the pro-supersolvable topology."""

from .decider import Budget, Kind, Verdict, WitnessData, ab_dense, decide, verify_witness
from .words import SubgroupBasis, Word, parse_basis

__all__ = ["Budget", "Kind", "SubgroupBasis", "Verdict", "WitnessData", "Word", "ab_dense",
           "decide", "parse_basis", "verify_witness"]
__version__ = "0.1.0"
